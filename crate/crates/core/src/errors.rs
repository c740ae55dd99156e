//! Target error sets: the Pauli operators an encoding must detect.
//!
//! Stabilizer mode enumerates every Pauli string of symmetric weight < d,
//! of which there are Σ_{w<d} 3^w·C(n,w). CSS mode exploits the independent
//! detection of X- and Z-type errors and keeps only pure-X and pure-Z
//! strings of weight < d, 2·Σ_{w<d} C(n,w) counting both species (the
//! identity appears once in the stored list; the factor-2 bookkeeping
//! survives in the memory estimate).
//!
//! Operators are ordered by weight then lexicographically (I < X < Y < Z),
//! so reward vectors and syndrome tables are reproducible across runs and
//! platforms. Each row also carries its occurrence probability p_μ under
//! the channel and the reward weight λ_μ = p_μ / max(p_μ).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::pauli::{words_for, PauliString};

/// Default cap on the packed operator storage (bytes).
pub const DEFAULT_MEMORY_BUDGET: u128 = 4 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorSetMode {
    Stabilizer,
    Css,
}

/// Binomial coefficient in u128 (exact for the parameter ranges used here).
fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of target operators of symmetric weight < d.
///
/// Stabilizer mode: Σ_{w=0}^{d−1} 3^w·C(n,w). CSS mode: 2·Σ_{w=0}^{d−1}
/// C(n,w), counting X- and Z-type species separately (the identity twice).
pub fn target_count(n: usize, d: usize, mode: ErrorSetMode) -> u128 {
    let mut total: u128 = 0;
    for w in 0..d {
        let c = binomial(n, w);
        total += match mode {
            ErrorSetMode::Stabilizer => 3u128.pow(w as u32) * c,
            ErrorSetMode::Css => 2 * c,
        };
    }
    total
}

/// Storage estimate in bytes for the target error set.
///
/// CSS mode shares one length-n representation between the X and Z species:
/// (|E|/2)·n bytes. Stabilizer mode stores 2n bits per operator, rounded up
/// to whole bytes in total.
pub fn memory_estimate(n: usize, d: usize, mode: ErrorSetMode) -> u128 {
    let count = target_count(n, d, mode);
    match mode {
        ErrorSetMode::Css => (count / 2) * n as u128,
        ErrorSetMode::Stabilizer => (count * 2 * n as u128).div_ceil(8),
    }
}

/// The enumerated error operators with probabilities and reward weights.
#[derive(Clone, Debug)]
pub struct ErrorSet {
    n: usize,
    words: usize,
    /// Packed (x-block | z-block) rows, stride 2·words.
    combined: Vec<u64>,
    /// Per-operator (w_X, w_Y, w_Z).
    counts: Vec<(u16, u16, u16)>,
    probabilities: Vec<f64>,
    lambdas: Vec<f64>,
    model: NoiseModel,
}

impl ErrorSet {
    /// Enumerate all targets of weight < d with the default memory budget.
    pub fn enumerate(n: usize, d: usize, mode: ErrorSetMode, model: &NoiseModel) -> Result<Self> {
        Self::enumerate_with_budget(n, d, mode, model, DEFAULT_MEMORY_BUDGET)
    }

    pub fn enumerate_with_budget(
        n: usize,
        d: usize,
        mode: ErrorSetMode,
        model: &NoiseModel,
        budget: u128,
    ) -> Result<Self> {
        if d < 1 {
            return Err(Error::Config("target distance d must be at least 1".into()));
        }
        let needed = memory_estimate(n, d, mode);
        if needed > budget {
            return Err(Error::CapacityExceeded { needed, budget });
        }

        // Letters per qubit: 0 = I, 1 = X, 2 = Y, 3 = Z (lexicographic order).
        let mut ops: Vec<Vec<u8>> = Vec::new();
        let mut support = Vec::new();
        for w in 0..d.min(n + 1) {
            combinations(n, w, &mut support, &mut |positions| match mode {
                ErrorSetMode::Stabilizer => {
                    let mut letters = vec![0u8; n];
                    assign_letters(positions, &mut letters, 0, &mut ops);
                }
                ErrorSetMode::Css => {
                    if positions.is_empty() {
                        ops.push(vec![0u8; n]); // single identity row
                    } else {
                        for letter in [1u8, 3u8] {
                            let mut letters = vec![0u8; n];
                            for &p in positions {
                                letters[p] = letter;
                            }
                            ops.push(letters);
                        }
                    }
                }
            });
        }
        ops.sort_unstable_by(|a, b| weight_of(a).cmp(&weight_of(b)).then_with(|| a.cmp(b)));
        Self::from_letter_rows(n, ops, model)
    }

    /// Build from an explicit operator list (deduplicated, kept in the given
    /// order); used for hand-picked targets such as bit-flip-only sets.
    pub fn from_paulis(n: usize, operators: &[PauliString], model: &NoiseModel) -> Result<Self> {
        let mut rows = Vec::with_capacity(operators.len());
        for op in operators {
            if op.num_qubits() != n {
                return Err(Error::LengthMismatch(op.num_qubits(), n));
            }
            let letters: Vec<u8> = (0..n)
                .map(|q| match op.get(q) {
                    (false, false) => 0,
                    (true, false) => 1,
                    (true, true) => 2,
                    (false, true) => 3,
                })
                .collect();
            if !rows.contains(&letters) {
                rows.push(letters);
            }
        }
        Self::from_letter_rows(n, rows, model)
    }

    fn from_letter_rows(n: usize, rows: Vec<Vec<u8>>, model: &NoiseModel) -> Result<Self> {
        let words = words_for(n);
        let mut combined = Vec::with_capacity(rows.len() * 2 * words);
        let mut counts = Vec::with_capacity(rows.len());
        for letters in &rows {
            let mut x = vec![0u64; words];
            let mut z = vec![0u64; words];
            let (mut wx, mut wy, mut wz) = (0u16, 0u16, 0u16);
            for (q, &l) in letters.iter().enumerate() {
                match l {
                    0 => {}
                    1 => {
                        x[q / 64] |= 1 << (q % 64);
                        wx += 1;
                    }
                    2 => {
                        x[q / 64] |= 1 << (q % 64);
                        z[q / 64] |= 1 << (q % 64);
                        wy += 1;
                    }
                    _ => {
                        z[q / 64] |= 1 << (q % 64);
                        wz += 1;
                    }
                }
            }
            combined.extend_from_slice(&x);
            combined.extend_from_slice(&z);
            counts.push((wx, wy, wz));
        }
        let mut set = Self {
            n,
            words,
            combined,
            counts,
            probabilities: Vec::new(),
            lambdas: Vec::new(),
            model: *model,
        };
        set.reweight(model);
        Ok(set)
    }

    /// Recompute p_μ and λ_μ for a new channel (same operator list). Used
    /// when the bias parameter changes between episodes.
    pub fn reweight(&mut self, model: &NoiseModel) {
        self.model = *model;
        self.probabilities = self
            .counts
            .iter()
            .map(|&(wx, wy, wz)| {
                model.probability_from_counts(self.n, wx as usize, wy as usize, wz as usize)
            })
            .collect();
        let max = self.probabilities.iter().cloned().fold(f64::MIN, f64::max);
        self.lambdas = self.probabilities.iter().map(|p| p / max).collect();
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> &NoiseModel {
        self.model_ref()
    }

    fn model_ref(&self) -> &NoiseModel {
        &self.model
    }

    pub(crate) fn combined_row(&self, i: usize) -> &[u64] {
        &self.combined[i * 2 * self.words..(i + 1) * 2 * self.words]
    }

    pub(crate) fn words(&self) -> usize {
        self.words
    }

    pub fn operator(&self, i: usize) -> PauliString {
        let row = self.combined_row(i);
        PauliString::from_words(self.n, row[..self.words].to_vec(), row[self.words..].to_vec())
    }

    pub fn operators(&self) -> impl Iterator<Item = PauliString> + '_ {
        (0..self.len()).map(|i| self.operator(i))
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.probabilities[i]
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.lambdas[i]
    }

    /// Symmetric weight of operator i.
    pub fn weight(&self, i: usize) -> usize {
        let (wx, wy, wz) = self.counts[i];
        (wx + wy + wz) as usize
    }

    /// Effective weight of operator i at the set's current bias.
    pub fn effective_weight(&self, i: usize) -> f64 {
        let (wx, wy, wz) = self.counts[i];
        (wx + wy) as f64 + self.model.c_z * wz as f64
    }

    pub fn is_identity(&self, i: usize) -> bool {
        self.counts[i] == (0, 0, 0)
    }

    /// CSV export: pauli_string, weight, effective_weight, probability, lambda.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pauli_string,weight,effective_weight,probability,lambda\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{:e},{:e}\n",
                self.operator(i),
                self.weight(i),
                self.effective_weight(i),
                self.probability(i),
                self.lambda(i)
            ));
        }
        out
    }
}

fn weight_of(letters: &[u8]) -> usize {
    letters.iter().filter(|&&l| l != 0).count()
}

/// Visit all ascending index combinations of size `w` from 0..n.
fn combinations(n: usize, w: usize, scratch: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    fn rec(
        n: usize,
        w: usize,
        start: usize,
        scratch: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if scratch.len() == w {
            visit(scratch);
            return;
        }
        let remaining = w - scratch.len();
        for i in start..=n.saturating_sub(remaining) {
            scratch.push(i);
            rec(n, w, i + 1, scratch, visit);
            scratch.pop();
        }
    }
    scratch.clear();
    rec(n, w, 0, scratch, visit);
}

/// Expand every {X,Y,Z} assignment over the chosen support.
fn assign_letters(positions: &[usize], letters: &mut Vec<u8>, depth: usize, out: &mut Vec<Vec<u8>>) {
    if depth == positions.len() {
        out.push(letters.clone());
        return;
    }
    for l in [1u8, 2u8, 3u8] {
        letters[positions[depth]] = l;
        assign_letters(positions, letters, depth + 1, out);
    }
    letters[positions[depth]] = 0;
}
