//! Gate sets and qubit connectivities, expanded into discrete action lists.
//!
//! An action space is a deterministically ordered list of bound gates:
//! single-qubit gates by (kind, qubit), then two-qubit gates by (kind,
//! control, target) filtered by the connectivity. Asymmetric two-qubit
//! gates (CNOT) get both directions of every undirected edge; symmetric
//! ones (√XX) get each edge once. The `all_to_all_directed` catalog is the
//! exception: it admits CNOT(i→j) only for i < j, which is sufficient when
//! the unencoded logical qubits sit at the lowest indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{GateAction, GateKind};

/// Named qubit connectivities plus an explicit edge-list escape hatch.
///
/// `line` is the open chain i—i+1; `brick` is a two-row brickwork (two
/// chains with every second rung); `square`/`nn_square_lattice` is a
/// near-square grid with 4-neighbor adjacency; `nnn_ring` is a periodic
/// ring with next-to-nearest-neighbor edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    AllToAllDirected,
    AllToAll,
    Line,
    Brick,
    Square,
    NnSquareLattice,
    NnnRing,
    Custom { edges: Vec<(usize, usize)> },
}

impl Connectivity {
    /// Undirected edges (i < j), sorted, deduplicated.
    pub fn undirected_edges(&self, n: usize) -> Result<Vec<(usize, usize)>> {
        let mut edges: Vec<(usize, usize)> = match self {
            Connectivity::AllToAllDirected | Connectivity::AllToAll => {
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
            }
            Connectivity::Line => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            Connectivity::Brick => {
                let top = n.div_ceil(2);
                let mut e: Vec<(usize, usize)> = Vec::new();
                for i in 0..top.saturating_sub(1) {
                    e.push((i, i + 1));
                }
                for i in top..n.saturating_sub(1) {
                    e.push((i, i + 1));
                }
                // Every second rung between the rows.
                for i in (0..n - top).step_by(2) {
                    e.push((i, i + top));
                }
                e
            }
            Connectivity::Square | Connectivity::NnSquareLattice => {
                let rows = (1..=n).take_while(|r| r * r <= n).last().unwrap_or(1);
                let cols = n.div_ceil(rows);
                let mut e = Vec::new();
                for q in 0..n {
                    let (r, c) = (q / cols, q % cols);
                    if c + 1 < cols && q + 1 < n {
                        e.push((q, q + 1));
                    }
                    if (r + 1) * cols + c < n {
                        e.push((q, q + cols));
                    }
                }
                e
            }
            Connectivity::NnnRing => {
                let mut e = Vec::new();
                for i in 0..n {
                    for step in [1usize, 2] {
                        let j = (i + step) % n;
                        if i != j {
                            e.push((i.min(j), i.max(j)));
                        }
                    }
                }
                e
            }
            Connectivity::Custom { edges } => {
                let mut e = Vec::new();
                for &(a, b) in edges {
                    if a >= n {
                        return Err(Error::QubitOutOfRange { index: a, n });
                    }
                    if b >= n {
                        return Err(Error::QubitOutOfRange { index: b, n });
                    }
                    if a == b {
                        return Err(Error::DuplicateQubit(a));
                    }
                    e.push((a.min(b), a.max(b)));
                }
                e
            }
        };
        edges.sort_unstable();
        edges.dedup();
        Ok(edges)
    }

    /// Ordered (control, target) pairs for asymmetric two-qubit gates.
    pub fn directed_pairs(&self, n: usize) -> Result<Vec<(usize, usize)>> {
        if matches!(self, Connectivity::AllToAllDirected) {
            return self.undirected_edges(n);
        }
        let mut pairs: Vec<(usize, usize)> = self
            .undirected_edges(n)?
            .into_iter()
            .flat_map(|(a, b)| [(a, b), (b, a)])
            .collect();
        pairs.sort_unstable();
        Ok(pairs)
    }
}

impl std::fmt::Display for Connectivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Connectivity::AllToAllDirected => "all_to_all_directed",
            Connectivity::AllToAll => "all_to_all",
            Connectivity::Line => "line",
            Connectivity::Brick => "brick",
            Connectivity::Square => "square",
            Connectivity::NnSquareLattice => "nn_square_lattice",
            Connectivity::NnnRing => "nnn_ring",
            Connectivity::Custom { .. } => "custom",
        };
        write!(f, "{s}")
    }
}

/// A gate alphabet bound to a qubit count and connectivity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSetSpec {
    pub kinds: Vec<GateKind>,
    pub connectivity: Connectivity,
    pub n: usize,
}

impl GateSetSpec {
    pub fn new(kinds: &[GateKind], connectivity: Connectivity, n: usize) -> Self {
        let mut kinds = kinds.to_vec();
        kinds.sort_unstable();
        kinds.dedup();
        Self { kinds, connectivity, n }
    }

    /// Expand into the ordered action list.
    pub fn action_space(&self) -> Result<Vec<GateAction>> {
        let mut kinds = self.kinds.clone();
        kinds.sort_unstable();
        kinds.dedup();
        let mut actions = Vec::new();
        for &kind in kinds.iter().filter(|k| k.arity() == 1) {
            for q in 0..self.n {
                actions.push(GateAction::single(kind, q)?);
            }
        }
        for &kind in kinds.iter().filter(|k| k.arity() == 2) {
            if kind.is_symmetric() {
                for (a, b) in self.connectivity.undirected_edges(self.n)? {
                    actions.push(GateAction::two(kind, a, b)?);
                }
            } else {
                for (c, t) in self.connectivity.directed_pairs(self.n)? {
                    actions.push(GateAction::two(kind, c, t)?);
                }
            }
        }
        if actions.is_empty() {
            return Err(Error::EmptyActionSpace);
        }
        Ok(actions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_counts_match_closed_forms() {
        let spec = GateSetSpec::new(
            &[GateKind::H, GateKind::Cnot],
            Connectivity::AllToAllDirected,
            7,
        );
        assert_eq!(spec.action_space().unwrap().len(), 7 + 21);

        let spec = GateSetSpec::new(
            &[GateKind::H, GateKind::S, GateKind::Cnot],
            Connectivity::AllToAll,
            9,
        );
        assert_eq!(spec.action_space().unwrap().len(), 9 + 9 + 72);

        let spec = GateSetSpec::new(&[GateKind::Cnot], Connectivity::Line, 3);
        let actions = spec.action_space().unwrap();
        assert_eq!(actions.len(), 4);
    }

    #[test]
    fn ordering_is_single_qubit_then_two_qubit() {
        let spec = GateSetSpec::new(
            &[GateKind::Cnot, GateKind::H, GateKind::S],
            Connectivity::Line,
            3,
        );
        let labels: Vec<String> =
            spec.action_space().unwrap().iter().map(|a| a.to_string()).collect();
        assert_eq!(
            labels,
            vec!["H(0)", "H(1)", "H(2)", "S(0)", "S(1)", "S(2)", "CNOT(0,1)", "CNOT(1,0)", "CNOT(1,2)", "CNOT(2,1)"]
        );
    }

    #[test]
    fn symmetric_gates_use_each_edge_once() {
        let spec = GateSetSpec::new(&[GateKind::SqrtXx], Connectivity::Line, 4);
        assert_eq!(spec.action_space().unwrap().len(), 3);
    }

    #[test]
    fn nnn_ring_edges() {
        // n = 6: each qubit reaches i±1 and i±2 around the ring.
        let edges = Connectivity::NnnRing.undirected_edges(6).unwrap();
        assert_eq!(edges.len(), 12);
        assert!(edges.contains(&(0, 1)) && edges.contains(&(0, 2)) && edges.contains(&(0, 5)));
        assert!(!edges.contains(&(0, 3)), "diameters are not NNN edges");
        // Small rings collapse to the complete graph without duplicates.
        let tiny = Connectivity::NnnRing.undirected_edges(3).unwrap();
        assert_eq!(tiny, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn square_grid_for_nine_qubits() {
        let edges = Connectivity::Square.undirected_edges(9).unwrap();
        // 3×3 grid: 6 horizontal + 6 vertical edges.
        assert_eq!(edges.len(), 12);
        assert!(edges.contains(&(0, 1)) && edges.contains(&(0, 3)) && edges.contains(&(5, 8)));
        assert!(!edges.contains(&(2, 3)), "no wraparound between grid rows");
    }

    #[test]
    fn custom_edges_validated() {
        let bad = Connectivity::Custom { edges: vec![(0, 9)] };
        assert!(bad.undirected_edges(4).is_err());
        let dup = Connectivity::Custom { edges: vec![(1, 1)] };
        assert!(dup.undirected_edges(4).is_err());
        let ok = Connectivity::Custom { edges: vec![(2, 0), (0, 2)] };
        assert_eq!(ok.undirected_edges(4).unwrap(), vec![(0, 2)]);
    }

    #[test]
    fn empty_action_space_is_an_error() {
        let spec = GateSetSpec::new(&[GateKind::Cnot], Connectivity::Line, 1);
        assert!(matches!(spec.action_space(), Err(Error::EmptyActionSpace)));
    }

    #[test]
    fn connectivity_serde_names() {
        let c: Connectivity = serde_json::from_str("\"nnn_ring\"").unwrap();
        assert_eq!(c, Connectivity::NnnRing);
        let c: Connectivity = serde_json::from_str(r#"{"custom":{"edges":[[0,1]]}}"#).unwrap();
        assert_eq!(c, Connectivity::Custom { edges: vec![(0, 1)] });
    }
}
