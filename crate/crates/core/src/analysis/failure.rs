//! Exact failure probability of syndrome-based most-likely-error decoding.
//!
//! The decoder measures the n−k generator syndromes and applies the most
//! likely error compatible with the observed syndrome. A correction cycle
//! fails when the applied correction times the actual error is a logical
//! operator (commutes with the group but is not in it). Exact mode
//! enumerates all 4ⁿ errors in two passes: one to pick the per-syndrome
//! correction, one to accumulate failure mass. Truncated mode enumerates
//! errors up to a weight cap and reports the unenumerated probability mass
//! as a rigorous additive residual.
//!
//! Ties between equally likely corrections break toward the smaller
//! (weight, letters) key, independent of enumeration order.

use crate::error::{Error, Result};
use crate::errors::{ErrorSet, ErrorSetMode};
use crate::gf2::RowBasis;
use crate::noise::NoiseModel;
use crate::pauli::{words_for, PauliString};
use crate::tableau::Tableau;

/// Enumeration strategy for the error population.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureBudget {
    /// All 4ⁿ errors; refuses n above the cap.
    Exact { max_qubits: usize },
    /// Errors of symmetric weight ≤ max_weight, with a residual bound.
    Truncated { max_weight: usize },
}

impl Default for FailureBudget {
    fn default() -> Self {
        FailureBudget::Exact { max_qubits: 11 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FailureReport {
    /// Failure mass over the enumerated error population.
    pub p_fail: f64,
    /// Probability mass never enumerated (0 in exact mode); adding it to
    /// `p_fail` gives a rigorous upper bound.
    pub residual: f64,
}

impl FailureReport {
    pub fn upper_bound(&self) -> f64 {
        self.p_fail + self.residual
    }
}

/// Per-syndrome decoder choice.
#[derive(Clone, Debug)]
pub struct SyndromeEntry {
    pub correction: PauliString,
    /// Probability of the chosen correction itself.
    pub correction_probability: f64,
    /// Total probability of enumerated errors with this syndrome.
    pub syndrome_probability: f64,
}

/// Lookup table: syndrome bits (generator i anticommutes → bit i) to the
/// most likely compatible error.
#[derive(Clone, Debug)]
pub struct SyndromeTable {
    num_generators: usize,
    entries: Vec<Option<SyndromeEntry>>,
}

impl SyndromeTable {
    pub fn num_syndromes(&self) -> usize {
        1 << self.num_generators
    }

    pub fn entry(&self, syndrome: u64) -> Option<&SyndromeEntry> {
        self.entries.get(syndrome as usize).and_then(|e| e.as_ref())
    }

    /// Syndromes populated by the enumerated error set.
    pub fn covered(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }
}

/// Walks every error in the population, calling `visit(x, z, weight-key,
/// probability)`; returns the total visited probability mass.
fn walk_population(
    t: &Tableau,
    model: &NoiseModel,
    budget: FailureBudget,
    mut visit: impl FnMut(&[u64], &[u64], u128, f64),
) -> Result<f64> {
    let n = t.num_qubits();
    let words = words_for(n);
    let mut mass = 0.0;
    match budget {
        FailureBudget::Exact { max_qubits } => {
            if n > max_qubits || n > 31 {
                return Err(Error::BudgetExceeded(format!(
                    "exact p_f enumerates 4^n errors; n={n} exceeds the cap of {max_qubits}"
                )));
            }
            let mut x = vec![0u64; words];
            let mut z = vec![0u64; words];
            for code in 0..4u64.pow(n as u32) {
                x.fill(0);
                z.fill(0);
                let (mut wx, mut wy, mut wz) = (0usize, 0usize, 0usize);
                let mut packed: u128 = 0;
                for q in 0..n {
                    let letter = (code >> (2 * q)) & 3;
                    packed = (packed << 2) | letter as u128;
                    match letter {
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
                let p = model.probability_from_counts(n, wx, wy, wz);
                let key = ((wx + wy + wz) as u128) << (2 * n) | packed;
                visit(&x, &z, key, p);
                mass += p;
            }
        }
        FailureBudget::Truncated { max_weight } => {
            let set = ErrorSet::enumerate(n, max_weight + 1, ErrorSetMode::Stabilizer, model)?;
            for i in 0..set.len() {
                let row = set.combined_row(i);
                let (x, z) = row.split_at(set.words());
                let mut packed: u128 = 0;
                for q in 0..n {
                    let xb = (x[q / 64] >> (q % 64)) & 1;
                    let zb = (z[q / 64] >> (q % 64)) & 1;
                    let letter = match (xb, zb) {
                        (0, 0) => 0u128,
                        (1, 0) => 1,
                        (1, 1) => 2,
                        _ => 3,
                    };
                    packed = (packed << 2) | letter;
                }
                let p = set.probability(i);
                let key = (set.weight(i) as u128) << (2 * n) | packed;
                visit(x, z, key, p);
                mass += p;
            }
        }
    }
    Ok(mass)
}

/// Build the most-likely-error decoding table for the given population.
pub fn syndrome_table(
    t: &Tableau,
    model: &NoiseModel,
    budget: FailureBudget,
) -> Result<SyndromeTable> {
    let rows = t.num_rows();
    if rows > 26 {
        return Err(Error::BudgetExceeded(format!(
            "syndrome table needs 2^(n-k) = 2^{rows} entries"
        )));
    }
    let gens: Vec<Vec<u64>> = (0..rows).map(|r| t.swapped_row(r)).collect();
    let words = words_for(t.num_qubits());

    // (probability, tie key, x, z) per syndrome.
    let mut best: Vec<Option<(f64, u128, Vec<u64>, Vec<u64>)>> = vec![None; 1 << rows];
    let mut syndrome_mass = vec![0.0f64; 1 << rows];
    walk_population(t, model, budget, |x, z, key, p| {
        let syn = syndrome_of(x, z, &gens, words);
        syndrome_mass[syn as usize] += p;
        let slot = &mut best[syn as usize];
        let better = match slot {
            None => true,
            Some((bp, bk, _, _)) => p > *bp || (p == *bp && key < *bk),
        };
        if better {
            *slot = Some((p, key, x.to_vec(), z.to_vec()));
        }
    })?;

    let entries = best
        .into_iter()
        .zip(&syndrome_mass)
        .map(|(slot, &mass)| {
            slot.map(|(p, _, x, z)| SyndromeEntry {
                correction: PauliString::from_words(t.num_qubits(), x, z),
                correction_probability: p,
                syndrome_probability: mass,
            })
        })
        .collect();
    Ok(SyndromeTable { num_generators: rows, entries })
}

#[inline]
fn syndrome_of(x: &[u64], z: &[u64], swapped_gens: &[Vec<u64>], words: usize) -> u64 {
    let mut syn = 0u64;
    for (i, g) in swapped_gens.iter().enumerate() {
        let (gz, gx) = g.split_at(words); // swapped layout: z-block then x-block
        let mut acc = 0u64;
        for w in 0..words {
            acc ^= x[w] & gz[w];
            acc ^= z[w] & gx[w];
        }
        syn |= ((acc.count_ones() & 1) as u64) << i;
    }
    syn
}

/// Probability that most-likely-error decoding applies a wrong correction.
pub fn failure_probability(
    t: &Tableau,
    model: &NoiseModel,
    budget: FailureBudget,
) -> Result<FailureReport> {
    let table = syndrome_table(t, model, budget)?;
    let rows = t.num_rows();
    let gens: Vec<Vec<u64>> = (0..rows).map(|r| t.swapped_row(r)).collect();
    let words = words_for(t.num_qubits());
    let basis = {
        let mut rb = RowBasis::new();
        for r in 0..rows {
            rb.insert(&t.combined_row(r));
        }
        rb
    };

    let mut p_fail = 0.0;
    let mass = walk_population(t, model, budget, |x, z, _, p| {
        let syn = syndrome_of(x, z, &gens, words);
        let entry = table.entry(syn).expect("population covers its own syndromes");
        // correction · error, packed (x|z).
        let mut residue: Vec<u64> = entry
            .correction
            .x_words()
            .iter()
            .zip(x)
            .map(|(a, b)| a ^ b)
            .collect();
        residue.extend(entry.correction.z_words().iter().zip(z).map(|(a, b)| a ^ b));
        if !basis.contains(&residue) {
            p_fail += p;
        }
    })?;
    Ok(FailureReport { p_fail, residual: (1.0 - mass).max(0.0) })
}
