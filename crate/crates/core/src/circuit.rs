//! Encoding circuits: ordered gate lists with a JSON file format and
//! redundancy pruning.
//!
//! Pruning shortens a circuit without changing the code it prepares. Two
//! reductions run to a fixed point: gates whose deletion leaves the final
//! tableau row space unchanged are dropped greedily from the end, and
//! adjacent identical self-inverse pairs cancel. Row-space equality (not
//! row-list equality) is the criterion throughout, since generator sets
//! are not unique.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{GateAction, GateKind};
use crate::gateset::Connectivity;
use crate::tableau::Tableau;

#[derive(Serialize, Deserialize)]
struct GateRepr {
    kind: GateKind,
    qubits: Vec<usize>,
}

impl From<CircuitGate> for GateRepr {
    fn from(g: CircuitGate) -> Self {
        GateRepr { kind: g.0.kind(), qubits: g.0.qubits() }
    }
}

impl TryFrom<GateRepr> for CircuitGate {
    type Error = Error;
    fn try_from(r: GateRepr) -> Result<Self> {
        let gate = match r.qubits.as_slice() {
            [q] => GateAction::single(r.kind, *q)?,
            [a, b] => GateAction::two(r.kind, *a, *b)?,
            other => {
                return Err(Error::Config(format!(
                    "gate {} expects {} qubit indices, got {}",
                    r.kind,
                    r.kind.arity(),
                    other.len()
                )))
            }
        };
        Ok(CircuitGate(gate))
    }
}

/// Serializable gate wrapper used in circuit files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GateRepr", into = "GateRepr")]
pub struct CircuitGate(pub GateAction);

/// An encoding circuit together with the context it was discovered in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub k: usize,
    pub gates: Vec<CircuitGate>,
    pub gateset: Vec<GateKind>,
    pub connectivity: Connectivity,
}

impl Circuit {
    pub fn new(
        n: usize,
        k: usize,
        gates: Vec<GateAction>,
        gateset: Vec<GateKind>,
        connectivity: Connectivity,
    ) -> Self {
        Self { n, k, gates: gates.into_iter().map(CircuitGate).collect(), gateset, connectivity }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate_actions(&self) -> Vec<GateAction> {
        self.gates.iter().map(|g| g.0).collect()
    }

    /// The tableau this circuit prepares from the initial generators.
    pub fn final_tableau(&self) -> Result<Tableau> {
        Tableau::initial(self.n, self.k).apply_circuit(&self.gate_actions())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(json)?;
        for g in &c.gates {
            g.0.validate(c.n)?;
        }
        Ok(c)
    }

    /// Remove gates that do not affect the prepared code.
    ///
    /// Returns a circuit whose final tableau spans the same row space as
    /// `target`; the result is never longer than the input.
    pub fn prune(&self, target: &Tableau) -> Result<Circuit> {
        let mut gates = self.gate_actions();
        let final_now = Tableau::initial(self.n, self.k).apply_circuit(&gates)?;
        if !final_now.same_code(target) {
            return Err(Error::Config(
                "prune target does not match the circuit's final tableau row space".into(),
            ));
        }
        loop {
            let mut changed = false;
            // (a) greedy deletions from the end.
            let mut idx = gates.len();
            while idx > 0 {
                idx -= 1;
                let mut candidate = gates.clone();
                candidate.remove(idx);
                let t = Tableau::initial(self.n, self.k).apply_circuit(&candidate)?;
                if t.same_code(target) {
                    gates = candidate;
                    changed = true;
                }
            }
            // (b) adjacent identical self-inverse pairs cancel exactly.
            let mut i = 0;
            while i + 1 < gates.len() {
                if gates[i] == gates[i + 1] {
                    gates.drain(i..=i + 1);
                    changed = true;
                    i = i.saturating_sub(1);
                } else {
                    i += 1;
                }
            }
            if !changed {
                break;
            }
        }
        debug_assert!(Tableau::initial(self.n, self.k)
            .apply_circuit(&gates)?
            .same_code(target));
        Ok(Circuit::new(self.n, self.k, gates, self.gateset.clone(), self.connectivity.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit(n: usize, k: usize, gates: Vec<GateAction>) -> Circuit {
        Circuit::new(n, k, gates, vec![GateKind::H, GateKind::Cnot], Connectivity::AllToAll)
    }

    #[test]
    fn json_round_trip_is_exact() {
        let c = circuit(3, 1, vec![GateAction::cnot(0, 1), GateAction::h(2), GateAction::cnot(0, 2)]);
        let json = c.to_json().unwrap();
        let back = Circuit::from_json(&json).unwrap();
        assert_eq!(c, back);
        assert_eq!(json, back.to_json().unwrap());
        assert!(json.contains("\"kind\": \"Cnot\"") || json.contains("\"kind\":\"Cnot\""));
    }

    #[test]
    fn from_json_validates_gates() {
        let bad = r#"{"n":3,"k":1,"gates":[{"kind":"Cnot","qubits":[0,7]}],"gateset":["Cnot"],"connectivity":"line"}"#;
        assert!(Circuit::from_json(bad).is_err());
        let bad_arity = r#"{"n":3,"k":1,"gates":[{"kind":"H","qubits":[0,1]}],"gateset":["H"],"connectivity":"line"}"#;
        assert!(Circuit::from_json(bad_arity).is_err());
    }

    #[test]
    fn prune_drops_trailing_double_h() {
        let g = GateAction::cnot(0, 1);
        let c = circuit(3, 1, vec![g, GateAction::h(2), GateAction::h(2)]);
        let target = c.final_tableau().unwrap();
        let pruned = c.prune(&target).unwrap();
        assert_eq!(pruned.gate_actions(), vec![g]);
    }

    #[test]
    fn prune_cancels_double_s_to_empty() {
        let c = circuit(2, 1, vec![GateAction::s(1), GateAction::s(1)]);
        let target = c.final_tableau().unwrap();
        let pruned = c.prune(&target).unwrap();
        assert!(pruned.is_empty());
    }

    #[test]
    fn prune_preserves_row_space_on_random_circuits() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let n = 5;
            let mut gates = Vec::new();
            for _ in 0..rng.gen_range(5..30) {
                let a = rng.gen_range(0..n);
                if rng.gen_bool(0.4) {
                    gates.push(GateAction::h(a));
                } else {
                    let b = (a + 1 + rng.gen_range(0..n - 1)) % n;
                    gates.push(GateAction::cnot(a, b));
                }
            }
            let c = circuit(n, 1, gates);
            let target = c.final_tableau().unwrap();
            let pruned = c.prune(&target).unwrap();
            assert!(pruned.len() <= c.len());
            assert!(pruned.final_tableau().unwrap().same_code(&target));
        }
    }
}
