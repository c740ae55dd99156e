//! Batched Knill–Laflamme detection checks and the weighted-KL reward.
//!
//! An error E is detected by a code with generators g_i iff it anticommutes
//! with at least one generator or lies in the stabilizer group itself (a
//! harmless, degenerate error). The anticommutation side is one GF(2)
//! product E_M·Ω·Gᵀ OR-reduced per row; the group-membership side runs only
//! on rows that commute with every generator, since few operators ever land
//! in the stabilizer group. Membership can be skipped (targets
//! non-degenerate codes only), capped by a softness parameter s (products
//! of at most s distinct generators), or exact.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::errors::ErrorSet;
use crate::tableau::Tableau;

/// Minimum batch size before the batched check fans out to worker threads.
const PAR_BATCH_THRESHOLD: usize = 32;

/// How the harmless-error condition (membership in the stabilizer group) is
/// evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DegeneracyCheck {
    /// Ignore membership entirely; only anticommutation detects. Equivalent
    /// to `Soft(0)` and targets non-degenerate codes only.
    Off,
    /// Membership against products of at most s distinct generators.
    Soft(usize),
    /// Full-group membership via a GF(2) rank test.
    Exact,
}

impl fmt::Display for DegeneracyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegeneracyCheck::Off => write!(f, "off"),
            DegeneracyCheck::Soft(s) => write!(f, "{s}"),
            DegeneracyCheck::Exact => write!(f, "exact"),
        }
    }
}

// Config form: an integer softness, or the strings "off" / "exact".
impl Serialize for DegeneracyCheck {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DegeneracyCheck::Off => ser.serialize_str("off"),
            DegeneracyCheck::Soft(s) => ser.serialize_u64(*s as u64),
            DegeneracyCheck::Exact => ser.serialize_str("exact"),
        }
    }
}

impl<'de> Deserialize<'de> for DegeneracyCheck {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = DegeneracyCheck;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a softness integer, \"off\" or \"exact\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                Ok(if v == 0 { DegeneracyCheck::Off } else { DegeneracyCheck::Soft(v as usize) })
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                if v < 0 {
                    return Err(E::custom("softness must be non-negative"));
                }
                self.visit_u64(v as u64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                match v {
                    "off" => Ok(DegeneracyCheck::Off),
                    "exact" => Ok(DegeneracyCheck::Exact),
                    other => Err(E::custom(format!("unknown degeneracy check '{other}'"))),
                }
            }
        }
        de.deserialize_any(V)
    }
}

/// Outcome of a KL scan over one tableau and one error set.
#[derive(Clone, Debug, PartialEq)]
pub struct KlReport {
    /// Per-operator detection flags (K_μ inverted: true = detected).
    pub detected: Vec<bool>,
    /// Σ_μ λ_μ K_μ — zero iff every target is detected.
    pub kl_sum: f64,
    /// Σ_μ p_μ K_μ — the raw undetected probability mass.
    pub undetected_prob: f64,
    /// Minimum effective weight among undetected operators at the error
    /// set's bias, +∞ when everything is detected.
    pub undetected_min_weight: f64,
}

impl KlReport {
    pub fn all_detected(&self) -> bool {
        self.kl_sum == 0.0
    }
}

/// The instantaneous reward: the negated weighted KL sum, zero exactly when
/// the code detects every target.
pub fn reward(report: &KlReport) -> f64 {
    -report.kl_sum
}

/// Evaluate the KL conditions for every operator in the set.
pub fn kl_check(t: &Tableau, es: &ErrorSet, check: DegeneracyCheck) -> Result<KlReport> {
    if es.num_qubits() != t.num_qubits() {
        return Err(Error::LengthMismatch(es.num_qubits(), t.num_qubits()));
    }
    let gens: Vec<Vec<u64>> = (0..t.num_rows()).map(|r| t.swapped_row(r)).collect();

    // Products of at most s distinct generators, built lazily on the first
    // row that fails the anticommutation test.
    let mut soft_products: Option<HashSet<Vec<u64>>> = None;
    let mut detected = vec![false; es.len()];
    let mut kl_sum = 0.0;
    let mut undetected_prob = 0.0;
    let mut undetected_min_weight = f64::INFINITY;

    for i in 0..es.len() {
        let row = es.combined_row(i);
        let hit = es.is_identity(i)
            || anticommutes_with_any(row, &gens)
            || match check {
                DegeneracyCheck::Off | DegeneracyCheck::Soft(0) => false,
                DegeneracyCheck::Soft(s) => soft_products
                    .get_or_insert_with(|| soft_product_set(t, s))
                    .contains(row),
                DegeneracyCheck::Exact => t.membership_exact(&es.operator(i))?,
            };
        detected[i] = hit;
        if !hit {
            kl_sum += es.lambda(i);
            undetected_prob += es.probability(i);
            undetected_min_weight = undetected_min_weight.min(es.effective_weight(i));
        }
    }
    Ok(KlReport { detected, kl_sum, undetected_prob, undetected_min_weight })
}

/// Elementwise [`kl_check`] over a homogeneous batch, bit-identical to the
/// sequential loop.
pub fn kl_check_batched(
    ts: &[Tableau],
    es: &ErrorSet,
    check: DegeneracyCheck,
) -> Result<Vec<KlReport>> {
    if let Some(first) = ts.first() {
        let (n, rows) = (first.num_qubits(), first.num_rows());
        if ts.iter().any(|t| t.num_qubits() != n || t.num_rows() != rows) {
            return Err(Error::HeterogeneousBatch { n, rows });
        }
    }
    if ts.len() >= PAR_BATCH_THRESHOLD {
        ts.par_iter().map(|t| kl_check(t, es, check)).collect()
    } else {
        ts.iter().map(|t| kl_check(t, es, check)).collect()
    }
}

#[inline]
fn anticommutes_with_any(row: &[u64], swapped_gens: &[Vec<u64>]) -> bool {
    swapped_gens.iter().any(|g| {
        let mut acc = 0u64;
        for (a, b) in row.iter().zip(g) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    })
}

/// All products of 1..=s distinct generators, as packed rows.
fn soft_product_set(t: &Tableau, s: usize) -> HashSet<Vec<u64>> {
    let rows: Vec<Vec<u64>> = (0..t.num_rows()).map(|r| t.combined_row(r)).collect();
    let mut out = HashSet::new();
    let words = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut acc = vec![0u64; words];

    fn rec(
        rows: &[Vec<u64>],
        acc: &mut Vec<u64>,
        start: usize,
        left: usize,
        out: &mut HashSet<Vec<u64>>,
    ) {
        for i in start..rows.len() {
            for (a, b) in acc.iter_mut().zip(&rows[i]) {
                *a ^= b;
            }
            out.insert(acc.clone());
            if left > 1 {
                rec(rows, acc, i + 1, left - 1, out);
            }
            for (a, b) in acc.iter_mut().zip(&rows[i]) {
                *a ^= b;
            }
        }
    }
    rec(&rows, &mut acc, 0, s.min(rows.len()), &mut out);
    out
}
