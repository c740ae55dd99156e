//! Stabilizer tableaus: (n−k)×2n check matrices under Clifford evolution.
//!
//! A tableau holds the n−k stabilizer generators of an [[n,k]] code as
//! packed bit rows (x-block then z-block per row, row-major). The encoding
//! walk starts from the generators Z_{k+1}, …, Z_n and every gate updates
//! all rows via its column rule. Rows stay pairwise commuting and
//! independent under any Clifford gate; those invariants are checked in
//! debug builds and in tests, never per gate in hot loops.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gate::GateAction;
use crate::gf2::RowBasis;
use crate::pauli::{words_for, PauliString};

/// Minimum batch size before batched application fans out to worker threads.
const PAR_BATCH_THRESHOLD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: usize,
    k: usize,
    words: usize,
    /// Row-major bits; each row is `words` x-words then `words` z-words.
    bits: Vec<u64>,
}

impl Tableau {
    /// The encoding start state: generators Z on every non-logical qubit
    /// (qubits k, …, n−1 in 0-based indexing). `k = n` is the unencoded
    /// register with an empty generator set.
    pub fn initial(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k <= n, "need 1 ≤ n and k ≤ n");
        let words = words_for(n);
        let rows = n - k;
        let mut bits = vec![0u64; rows * 2 * words];
        for (r, q) in (k..n).enumerate() {
            let base = r * 2 * words;
            bits[base + words + q / 64] |= 1 << (q % 64);
        }
        Self { n, k, words, bits }
    }

    /// Build from explicit generator rows; rows must pairwise commute and be
    /// linearly independent.
    pub fn from_rows(n: usize, rows: &[PauliString]) -> Result<Self> {
        if rows.is_empty() || rows.len() >= n + 1 {
            return Err(Error::Config(format!(
                "expected between 1 and {n} generator rows, got {}",
                rows.len()
            )));
        }
        for row in rows {
            if row.num_qubits() != n {
                return Err(Error::LengthMismatch(row.num_qubits(), n));
            }
        }
        for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                if a.symplectic_product(b)? == 1 {
                    return Err(Error::Config(format!(
                        "generators must commute: {a} anticommutes with {b}"
                    )));
                }
            }
        }
        let words = words_for(n);
        let mut bits = Vec::with_capacity(rows.len() * 2 * words);
        for row in rows {
            bits.extend_from_slice(row.x_words());
            bits.extend_from_slice(row.z_words());
        }
        let t = Self { n, k: n - rows.len(), words, bits };
        if t.row_basis().rank() != rows.len() {
            return Err(Error::Config("generators must be linearly independent".into()));
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_logical(&self) -> usize {
        self.k
    }

    pub fn num_rows(&self) -> usize {
        self.n - self.k
    }

    pub(crate) fn row_slices(&self, r: usize) -> (&[u64], &[u64]) {
        let base = r * 2 * self.words;
        (&self.bits[base..base + self.words], &self.bits[base + self.words..base + 2 * self.words])
    }

    pub fn row(&self, r: usize) -> PauliString {
        let (x, z) = self.row_slices(r);
        PauliString::from_words(self.n, x.to_vec(), z.to_vec())
    }

    pub fn rows(&self) -> impl Iterator<Item = PauliString> + '_ {
        (0..self.num_rows()).map(|r| self.row(r))
    }

    /// Row bits in the packed (x-block | z-block) layout used by the GF(2)
    /// helpers.
    pub(crate) fn combined_row(&self, r: usize) -> Vec<u64> {
        let (x, z) = self.row_slices(r);
        let mut row = x.to_vec();
        row.extend_from_slice(z);
        row
    }

    /// Row bits with blocks swapped (z-block | x-block): the row multiplied
    /// by the symplectic metric, ready for AND/popcount products.
    pub(crate) fn swapped_row(&self, r: usize) -> Vec<u64> {
        let (x, z) = self.row_slices(r);
        let mut row = z.to_vec();
        row.extend_from_slice(x);
        row
    }

    /// Apply a gate in place.
    pub fn apply_gate_mut(&mut self, g: &GateAction) -> Result<()> {
        g.validate(self.n)?;
        let stride = 2 * self.words;
        for r in 0..self.num_rows() {
            let base = r * stride;
            let (x, z) = self.bits[base..base + stride].split_at_mut(self.words);
            g.apply_to_row(x, z);
        }
        debug_assert_eq!(self.row_basis().rank(), self.num_rows());
        Ok(())
    }

    /// Pure variant: returns the evolved tableau.
    pub fn apply_gate(&self, g: &GateAction) -> Result<Self> {
        let mut t = self.clone();
        t.apply_gate_mut(g)?;
        Ok(t)
    }

    pub fn apply_circuit(&self, gates: &[GateAction]) -> Result<Self> {
        let mut t = self.clone();
        for g in gates {
            t.apply_gate_mut(g)?;
        }
        Ok(t)
    }

    /// Echelon basis of the generator rows over 2n bits.
    pub(crate) fn row_basis(&self) -> RowBasis {
        let mut basis = RowBasis::new();
        for r in 0..self.num_rows() {
            basis.insert(&self.combined_row(r));
        }
        basis
    }

    /// Exact membership in the full stabilizer group: solves p = xᵀ·G over
    /// GF(2) via a rank test on the row space.
    pub fn membership_exact(&self, p: &PauliString) -> Result<bool> {
        if p.num_qubits() != self.n {
            return Err(Error::LengthMismatch(p.num_qubits(), self.n));
        }
        let mut row = p.x_words().to_vec();
        row.extend_from_slice(p.z_words());
        Ok(self.row_basis().contains(&row))
    }

    /// Soft membership: is `p` a product of at most `softness` distinct
    /// generators? `softness = 0` tests against the empty subgroup and is
    /// always false.
    pub fn membership_in_group(&self, p: &PauliString, softness: usize) -> Result<bool> {
        if p.num_qubits() != self.n {
            return Err(Error::LengthMismatch(p.num_qubits(), self.n));
        }
        if softness == 0 {
            return Ok(false);
        }
        let rows = self.num_rows();
        let words = 2 * self.words;
        let mut target = p.x_words().to_vec();
        target.extend_from_slice(p.z_words());
        let mut acc = vec![0u64; words];

        fn dfs(
            t: &Tableau,
            target: &[u64],
            acc: &mut Vec<u64>,
            start: usize,
            left: usize,
            rows: usize,
        ) -> bool {
            for i in start..rows {
                let row = t.combined_row(i);
                for (a, b) in acc.iter_mut().zip(&row) {
                    *a ^= b;
                }
                if acc == target {
                    return true;
                }
                if left > 1 && dfs(t, target, acc, i + 1, left - 1, rows) {
                    return true;
                }
                for (a, b) in acc.iter_mut().zip(&row) {
                    *a ^= b;
                }
            }
            false
        }

        Ok(dfs(self, &target, &mut acc, 0, softness.min(rows), rows))
    }

    /// Flattened observation bits: row-major, x-block then z-block per row;
    /// length 2n(n−k).
    pub fn observation_bits(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 * self.n * self.num_rows());
        for r in 0..self.num_rows() {
            let (x, z) = self.row_slices(r);
            for block in [x, z] {
                for i in 0..self.n {
                    out.push(((block[i / 64] >> (i % 64)) & 1) as u8);
                }
            }
        }
        out
    }

    /// One generator per line in I/X/Y/Z text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for row in self.rows() {
            s.push_str(&row.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let rows: Vec<PauliString> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse())
            .collect::<Result<_>>()?;
        let n = rows.first().map(|r| r.num_qubits()).ok_or_else(|| {
            Error::Config("tableau text needs at least one generator row".into())
        })?;
        Self::from_rows(n, &rows)
    }

    /// True iff every generator is pure-X or pure-Z.
    pub fn is_css(&self) -> bool {
        self.rows().all(|r| r.is_pure_x() || r.is_pure_z())
    }

    /// Same stabilizer group: row-space equality over GF(2).
    pub fn same_code(&self, other: &Tableau) -> bool {
        if self.n != other.n || self.k != other.k {
            return false;
        }
        let a: Vec<Vec<u64>> = (0..self.num_rows()).map(|r| self.combined_row(r)).collect();
        let b: Vec<Vec<u64>> = (0..other.num_rows()).map(|r| other.combined_row(r)).collect();
        crate::gf2::same_row_space(&a, &b)
    }
}

impl std::fmt::Debug for Tableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tableau[[{},{}]]{{", self.n, self.k)?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{row}")?;
        }
        write!(f, "}}")
    }
}

/// Elementwise gate application over a homogeneous batch; bit-identical to
/// the sequential loop regardless of the parallel schedule.
pub fn apply_gate_batched(tableaus: &[Tableau], gates: &[GateAction]) -> Result<Vec<Tableau>> {
    if tableaus.len() != gates.len() {
        return Err(Error::BatchMismatch(tableaus.len(), gates.len()));
    }
    if let Some(first) = tableaus.first() {
        let (n, rows) = (first.num_qubits(), first.num_rows());
        if tableaus.iter().any(|t| t.num_qubits() != n || t.num_rows() != rows) {
            return Err(Error::HeterogeneousBatch { n, rows });
        }
    }
    let apply = |(t, g): (&Tableau, &GateAction)| t.apply_gate(g);
    if tableaus.len() >= PAR_BATCH_THRESHOLD {
        tableaus.par_iter().zip(gates.par_iter()).map(apply).collect()
    } else {
        tableaus.iter().zip(gates.iter()).map(apply).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn initial_generators_are_z_on_nonlogical_qubits() {
        let t = Tableau::initial(3, 1);
        assert_eq!(t.to_text(), "IZI\nIIZ\n");
        assert_eq!(t.num_rows(), 2);
    }

    #[test]
    fn h_exchanges_x_and_z() {
        let t = Tableau::initial(1, 0);
        assert_eq!(t.row(0), p("Z"));
        let t = t.apply_gate(&GateAction::h(0)).unwrap();
        assert_eq!(t.row(0), p("X"));
    }

    #[test]
    fn s_exchanges_x_and_y() {
        let t = Tableau::from_rows(1, &[p("X")]).unwrap();
        let t = t.apply_gate(&GateAction::s(0)).unwrap();
        assert_eq!(t.row(0), p("Y"));
        let t = t.apply_gate(&GateAction::s(0)).unwrap();
        assert_eq!(t.row(0), p("X"), "S twice is the identity map phase-free");
    }

    #[test]
    fn repetition_code_generator_evolution() {
        // {IZI, IIZ} --CNOT(0,1)--> {ZZI, IIZ} --CNOT(0,2)--> {ZZI, ZIZ}
        let t = Tableau::initial(3, 1);
        let t = t.apply_gate(&GateAction::cnot(0, 1)).unwrap();
        assert_eq!(t.to_text(), "ZZI\nIIZ\n");
        let t = t.apply_gate(&GateAction::cnot(0, 2)).unwrap();
        assert_eq!(t.to_text(), "ZZI\nZIZ\n");
    }

    #[test]
    fn self_inverse_gates_phase_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = random_tableau(6, 2, 40, &mut rng);
        for g in [GateAction::h(3), GateAction::s(1), GateAction::sqrt_x(4)] {
            let twice = t.apply_gate(&g).unwrap().apply_gate(&g).unwrap();
            assert_eq!(twice, t, "{g} applied twice should be the identity map");
        }
        let g = GateAction::sqrt_xx(0, 5);
        let twice = t.apply_gate(&g).unwrap().apply_gate(&g).unwrap();
        assert_eq!(twice, t);
    }

    use crate::testutil::random_tableau;

    #[test]
    fn batched_matches_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tableaus: Vec<Tableau> = (0..64).map(|_| random_tableau(5, 1, 30, &mut rng)).collect();
        let gates: Vec<GateAction> = (0..64)
            .map(|_| {
                let a = rng.gen_range(0..5);
                let b = (a + 1 + rng.gen_range(0..4)) % 5;
                GateAction::cnot(a, b)
            })
            .collect();
        let batched = apply_gate_batched(&tableaus, &gates).unwrap();
        for ((t, g), out) in tableaus.iter().zip(&gates).zip(&batched) {
            assert_eq!(&t.apply_gate(g).unwrap(), out);
        }
    }

    #[test]
    fn batch_shape_errors() {
        let a = Tableau::initial(3, 1);
        let b = Tableau::initial(4, 1);
        let gs = vec![GateAction::h(0)];
        assert!(apply_gate_batched(&[a.clone()], &[]).is_err());
        assert!(apply_gate_batched(&[a, b], &[gs[0], gs[0]]).is_err());
    }

    #[test]
    fn membership_soft_and_exact() {
        let t = Tableau::from_rows(3, &[p("ZZI"), p("ZIZ")]).unwrap();
        assert!(t.membership_in_group(&p("ZZI"), 1).unwrap());
        assert!(!t.membership_in_group(&p("IZZ"), 1).unwrap());
        assert!(t.membership_in_group(&p("IZZ"), 2).unwrap());
        assert!(!t.membership_in_group(&p("ZZI"), 0).unwrap(), "softness 0 is the empty subgroup");
        assert!(!t.membership_exact(&p("XII")).unwrap());
        assert!(t.membership_exact(&p("IZZ")).unwrap());
        assert!(t.membership_exact(&PauliString::identity(3)).unwrap());
    }

    #[test]
    fn membership_exact_matches_brute_force_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t = random_tableau(5, 1, 25, &mut rng);
            // All 2^(n-k) group elements by subset enumeration.
            let rows: Vec<PauliString> = t.rows().collect();
            let mut group = std::collections::HashSet::new();
            for mask in 0u32..1 << rows.len() {
                let mut acc = PauliString::identity(5);
                for (i, row) in rows.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        acc = acc.mul(row).unwrap();
                    }
                }
                group.insert(acc);
            }
            for _ in 0..40 {
                let probe = PauliString::from_bits(
                    5,
                    (0..5).map(|_| (rng.gen_bool(0.5), rng.gen_bool(0.5))),
                );
                assert_eq!(
                    t.membership_exact(&probe).unwrap(),
                    group.contains(&probe),
                    "probe {probe} disagrees with enumeration"
                );
            }
        }
    }

    #[test]
    fn from_rows_rejects_bad_generators() {
        assert!(Tableau::from_rows(2, &[p("XI"), p("ZI")]).is_err(), "anticommuting");
        assert!(Tableau::from_rows(2, &[p("ZI"), p("ZI")]).is_err(), "dependent");
        assert!(Tableau::from_rows(2, &[]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = Tableau::from_rows(4, &[p("XXXX"), p("ZZII"), p("IZZI")]).unwrap();
        let back = Tableau::from_text(&t.to_text()).unwrap();
        assert_eq!(t, back);
    }
}
