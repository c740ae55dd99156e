//! Post-discovery code analysis: weight enumerators, family
//! classification, (effective) distance, failure probability and
//! evaluation sweeps.
//!
//! The quantum weight enumerators are computed by group counting instead of
//! trace formulas: A_j histograms the 2^(n−k) stabilizer elements by
//! weight; B_j histograms the centralizer, whose 2^(n+k) elements are
//! enumerated from a GF(2) kernel basis of the generator matrix. Both
//! walks are Gray-coded so each element costs one row XOR. No projector is
//! ever materialized.

mod failure;
mod sweep;

pub use failure::{failure_probability, syndrome_table, FailureBudget, FailureReport, SyndromeTable};
pub use sweep::{evaluate_sweep, sweep_csv, SweepPoint, SweepRow};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{kernel_basis, xor_into, RowBasis};
use crate::tableau::Tableau;

/// Cap on 2^(n+k) centralizer enumeration (bits).
const ENUM_LIMIT_BITS: usize = 26;

/// The (A, B) weight-enumerator pair identifying a code family, plus the
/// distance data derived from it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeFingerprint {
    /// A_j: number of weight-j elements of the stabilizer group.
    pub a: Vec<u64>,
    /// B_j: number of weight-j Pauli strings commuting with every generator.
    pub b: Vec<u64>,
    /// Symmetric distance: smallest j with B_j > A_j (min logical weight).
    pub d: usize,
    /// A_{d−1} ≠ 0: some sub-distance errors are harmless stabilizers.
    pub degenerate: bool,
}

/// Packed (x|z) rows for the stabilizer generators and a completion to a
/// centralizer basis; the shared input of the enumerator and distance
/// scans.
struct CentralizerBasis {
    words: usize,
    /// Generator rows (n−k of them).
    stabilizer: Vec<Vec<u64>>,
    /// 2k logical rows completing the stabilizer rows to a basis of the
    /// symplectic complement.
    logical: Vec<Vec<u64>>,
}

fn centralizer_basis(t: &Tableau) -> Result<CentralizerBasis> {
    let n = t.num_qubits();
    let rows = t.num_rows();
    let block = crate::pauli::words_for(n) * 64;
    let swapped: Vec<Vec<u64>> = (0..rows).map(|r| t.swapped_row(r)).collect();
    // Valid bit positions in the padded (x-block | z-block) layout.
    let columns: Vec<usize> = (0..n).chain(block..block + n).collect();
    let kernel = kernel_basis(&swapped, &columns, 2 * crate::pauli::words_for(n));
    if kernel.len() != n + t.num_logical() {
        return Err(Error::Config(format!(
            "centralizer dimension {} does not match n+k={}",
            kernel.len(),
            n + t.num_logical()
        )));
    }
    let stabilizer: Vec<Vec<u64>> = (0..rows).map(|r| t.combined_row(r)).collect();
    let mut basis = RowBasis::new();
    for row in &stabilizer {
        basis.insert(row);
    }
    let mut logical = Vec::with_capacity(2 * t.num_logical());
    for v in kernel {
        if basis.insert(&v) {
            logical.push(v);
        }
    }
    debug_assert_eq!(logical.len(), 2 * t.num_logical());
    Ok(CentralizerBasis { words: 2 * crate::pauli::words_for(n), stabilizer, logical })
}

/// Symmetric weight of a packed (x|z) row.
#[inline]
fn row_weight(row: &[u64], words: usize) -> usize {
    let (x, z) = row.split_at(words / 2);
    x.iter().zip(z).map(|(a, b)| (a | b).count_ones() as usize).sum()
}

/// (w_X + w_Y, w_Z) of a packed row.
#[inline]
fn row_split_weight(row: &[u64], words: usize) -> (usize, usize) {
    let (x, z) = row.split_at(words / 2);
    let wxy: usize = x.iter().map(|a| a.count_ones() as usize).sum();
    let wz: usize = x.iter().zip(z).map(|(a, b)| (!a & b).count_ones() as usize).sum();
    (wxy, wz)
}

/// Gray-code walk over all subset XORs of `rows`, calling `visit` once per
/// subset (including the empty one) with the running accumulator and the
/// subset mask.
fn gray_walk(rows: &[Vec<u64>], words: usize, mut visit: impl FnMut(u64, &[u64])) {
    let mut acc = vec![0u64; words];
    visit(0, &acc);
    let total: u64 = 1 << rows.len();
    for i in 1..total {
        let flip = i.trailing_zeros() as usize;
        xor_into(&mut acc, &rows[flip]);
        visit(i ^ (i >> 1), &acc);
    }
}

/// Quantum weight enumerators of the code stabilized by `t`.
pub fn weight_enumerators(t: &Tableau) -> Result<CodeFingerprint> {
    let n = t.num_qubits();
    let k = t.num_logical();
    if n + k > ENUM_LIMIT_BITS {
        return Err(Error::BudgetExceeded(format!(
            "centralizer enumeration needs 2^(n+k) = 2^{} steps (limit 2^{ENUM_LIMIT_BITS})",
            n + k
        )));
    }
    let basis = centralizer_basis(t)?;
    let words = basis.words;

    let mut a = vec![0u64; n + 1];
    gray_walk(&basis.stabilizer, words, |_, acc| a[row_weight(acc, words)] += 1);

    let mut all_rows = basis.stabilizer.clone();
    all_rows.extend(basis.logical.iter().cloned());
    let mut b = vec![0u64; n + 1];
    gray_walk(&all_rows, words, |_, acc| b[row_weight(acc, words)] += 1);

    let d = (1..=n)
        .find(|&j| b[j] > a[j])
        .or_else(|| (1..=n).find(|&j| a[j] > 0))
        .unwrap_or(n);
    let degenerate = a[d - 1] != 0;
    Ok(CodeFingerprint { a, b, d, degenerate })
}

/// Distance data at a given noise bias.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceReport {
    /// Minimum effective weight over all KL-violating Pauli strings.
    pub min_violating_weight: f64,
    /// The effective distance: integer part of the minimum.
    pub d_e: usize,
}

/// Effective distance: scan the logical operators (centralizer minus
/// stabilizer) for the minimum c_Z-effective weight. At c_Z = 1 this is the
/// integer symmetric distance.
pub fn distance(t: &Tableau, c_z: f64) -> Result<DistanceReport> {
    let n = t.num_qubits();
    let k = t.num_logical();
    if n + k > ENUM_LIMIT_BITS {
        return Err(Error::BudgetExceeded(format!(
            "distance scan needs 2^(n+k) = 2^{} steps (limit 2^{ENUM_LIMIT_BITS})",
            n + k
        )));
    }
    let basis = centralizer_basis(t)?;
    let words = basis.words;
    let mut min_w = f64::INFINITY;

    let weight_of = |row: &[u64]| -> f64 {
        let (wxy, wz) = row_split_weight(row, words);
        wxy as f64 + c_z * wz as f64
    };

    if k == 0 {
        // No logical operators: the distance of an [[n,0]] state is the
        // minimum weight of a nontrivial stabilizer element.
        gray_walk(&basis.stabilizer, words, |mask, acc| {
            if mask != 0 {
                min_w = min_w.min(weight_of(acc));
            }
        });
    } else {
        // Rows ordered stabilizer-first: elements whose subset mask has no
        // logical bit are stabilizers, not logicals.
        let mut all_rows = basis.stabilizer.clone();
        all_rows.extend(basis.logical.iter().cloned());
        let stab_bits = basis.stabilizer.len();
        gray_walk(&all_rows, words, |mask, acc| {
            if mask >> stab_bits != 0 {
                min_w = min_w.min(weight_of(acc));
            }
        });
    }
    if !min_w.is_finite() {
        return Err(Error::Config("no KL-violating operator found".into()));
    }
    // Guard against representation error in c_Z·w_Z sums.
    let d_e = (min_w + 1e-9).floor() as usize;
    Ok(DistanceReport { min_violating_weight: min_w, d_e })
}

/// One discovered code headed for classification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeEntry {
    pub n: usize,
    pub k: usize,
    pub fingerprint: CodeFingerprint,
    pub circuit_size: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Family {
    pub id: usize,
    pub fingerprint: CodeFingerprint,
    /// Occurrences in the input (duplicates counted per occurrence).
    pub count: usize,
    pub min_circuit_size: usize,
}

/// Classification of a code corpus by exact (A, B) equality.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyTable {
    pub n: usize,
    pub k: usize,
    pub families: Vec<Family>,
}

impl FamilyTable {
    /// (#non-degenerate, #degenerate) family counts.
    pub fn census(&self) -> (usize, usize) {
        let deg = self.families.iter().filter(|f| f.fingerprint.degenerate).count();
        (self.families.len() - deg, deg)
    }

    /// CSV report: family_id, A, B, degenerate, count, min_circuit_size.
    pub fn to_csv(&self) -> String {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        let mut out = String::from("family_id,A,B,degenerate,count,min_circuit_size\n");
        for f in &self.families {
            out.push_str(&format!(
                "{},\"{}\",\"{}\",{},{},{}\n",
                f.id,
                join(&f.fingerprint.a),
                join(&f.fingerprint.b),
                f.fingerprint.degenerate,
                f.count,
                f.min_circuit_size
            ));
        }
        out
    }
}

/// Group codes into families by exact (A, B) equality. Families are sorted
/// by their enumerator vectors so ids are stable across input orderings.
pub fn classify_families(entries: &[CodeEntry]) -> Result<FamilyTable> {
    let (n, k) = match entries.first() {
        None => return Ok(FamilyTable { n: 0, k: 0, families: vec![] }),
        Some(e) => (e.n, e.k),
    };
    for e in entries {
        if e.n != n || e.k != k {
            return Err(Error::MixedParameters(format!(
                "[[{},{}]] mixed with [[{},{}]]",
                n, k, e.n, e.k
            )));
        }
    }
    let mut groups: std::collections::BTreeMap<(Vec<u64>, Vec<u64>), (usize, usize, CodeFingerprint)> =
        std::collections::BTreeMap::new();
    for e in entries {
        let key = (e.fingerprint.a.clone(), e.fingerprint.b.clone());
        let slot = groups.entry(key).or_insert((0, usize::MAX, e.fingerprint.clone()));
        slot.0 += 1;
        slot.1 = slot.1.min(e.circuit_size);
    }
    let families = groups
        .into_values()
        .enumerate()
        .map(|(i, (count, min_size, fingerprint))| Family {
            id: i + 1,
            fingerprint,
            count,
            min_circuit_size: min_size,
        })
        .collect();
    Ok(FamilyTable { n, k, families })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use crate::testutil::random_tableau;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(rows: &[&str]) -> Tableau {
        let rows: Vec<PauliString> = rows.iter().map(|s| s.parse().unwrap()).collect();
        Tableau::from_rows(rows[0].num_qubits(), &rows).unwrap()
    }

    #[test]
    fn repetition_code_enumerators() {
        let f = weight_enumerators(&t(&["ZZI", "ZIZ"])).unwrap();
        assert_eq!(f.a, vec![1, 0, 3, 0]);
        assert_eq!(f.b, vec![1, 3, 3, 9]);
        assert_eq!(f.d, 1);
        assert!(f.degenerate, "A_0 = 1 is nonzero for a d=1 code");
    }

    #[test]
    fn five_qubit_code_fingerprint() {
        let f = weight_enumerators(&t(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"])).unwrap();
        assert_eq!(f.a, vec![1, 0, 0, 0, 15, 0]);
        assert_eq!(f.b, vec![1, 0, 0, 30, 15, 18]);
        assert_eq!(f.d, 3);
        assert!(!f.degenerate);
    }

    #[test]
    fn identity_sums_on_random_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..60 {
            let n = 4 + trial % 6; // up to n = 9
            let k = 1 + trial % 3.min(n - 1);
            let tab = random_tableau(n, k, 40, &mut rng);
            let f = weight_enumerators(&tab).unwrap();
            assert_eq!(f.a.iter().sum::<u64>(), 1 << (n - k));
            assert_eq!(f.b.iter().sum::<u64>(), 1 << (n + k));
            for j in 0..=n {
                assert!(f.b[j] >= f.a[j], "B_{j} < A_{j}");
            }
        }
    }

    #[test]
    fn fast_enumerators_match_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..30 {
            let n = 3 + trial % 4; // n ≤ 6
            let k = 1 + trial % 2.min(n - 1);
            let tab = random_tableau(n, k, 30, &mut rng);
            let f = weight_enumerators(&tab).unwrap();
            let (a, b) = crate::reference::weight_enumerators(&tab).unwrap();
            assert_eq!(f.a, a, "A mismatch on {tab:?}");
            assert_eq!(f.b, b, "B mismatch on {tab:?}");
        }
    }

    #[test]
    fn distances() {
        // Repetition code: Z₁ is an undetected weight-1 logical.
        let rep = t(&["ZZI", "ZIZ"]);
        let r = distance(&rep, 1.0).unwrap();
        assert_eq!(r.d_e, 1);
        assert_eq!(r.min_violating_weight, 1.0);

        let five = t(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]);
        assert_eq!(distance(&five, 1.0).unwrap().d_e, 3);

        // c_Z = 1 equals the naive brute-force distance on random codes.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..25 {
            let n = 3 + trial % 5; // n ≤ 7
            let tab = random_tableau(n, 1.min(n - 1), 35, &mut rng);
            let got = distance(&tab, 1.0).unwrap();
            let naive = crate::reference::distance(&tab).unwrap();
            assert_eq!(got.d_e, naive);
            assert_eq!(got.min_violating_weight, naive as f64);
        }
    }

    #[test]
    fn effective_distance_tracks_bias() {
        // Bit-flip repetition code (generators ZZI, ZIZ): logical Z is
        // weight 1, so d_e = c_Z at small c_Z and saturates by the X
        // logical (weight 3) at large c_Z.
        let rep = t(&["ZZI", "ZIZ"]);
        let low = distance(&rep, 0.5).unwrap();
        assert!((low.min_violating_weight - 0.5).abs() < 1e-12);
        assert_eq!(low.d_e, 0);
        let high = distance(&rep, 2.0).unwrap();
        assert!((high.min_violating_weight - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unencoded_register_has_distance_one() {
        let unencoded = Tableau::initial(3, 3);
        let r = distance(&unencoded, 1.0).unwrap();
        assert_eq!(r.d_e, 1);
    }

    #[test]
    fn bell_pair_is_a_202_state() {
        let bell = t(&["XX", "ZZ"]);
        let f = weight_enumerators(&bell).unwrap();
        assert_eq!(f.a, vec![1, 0, 3]);
        assert_eq!(f.b, vec![1, 0, 3]);
        assert_eq!(f.d, 2, "k=0: distance is the minimum stabilizer weight");
        assert_eq!(distance(&bell, 1.0).unwrap().d_e, 2);
    }

    #[test]
    fn enumerators_are_letter_blind() {
        // X- and Z-repetition codes are locally equivalent and share (A,B).
        let a = weight_enumerators(&t(&["ZZI", "ZIZ"])).unwrap();
        let b = weight_enumerators(&t(&["XXI", "XIX"])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn classification_groups_by_exact_enumerators() {
        let rep = weight_enumerators(&t(&["ZZI", "ZIZ"])).unwrap();
        let rot = weight_enumerators(&t(&["XXX", "ZZI"])).unwrap();
        let entries = vec![
            CodeEntry { n: 3, k: 1, fingerprint: rep.clone(), circuit_size: 2 },
            CodeEntry { n: 3, k: 1, fingerprint: rot.clone(), circuit_size: 4 },
            CodeEntry { n: 3, k: 1, fingerprint: rep.clone(), circuit_size: 3 },
        ];
        let table = classify_families(&entries).unwrap();
        assert_eq!(table.families.len(), 2);
        let rep_family = table
            .families
            .iter()
            .find(|f| f.fingerprint == rep)
            .unwrap();
        assert_eq!(rep_family.count, 2);
        assert_eq!(rep_family.min_circuit_size, 2);

        // Duplicate input file: counts reflect both occurrences.
        let doubled = classify_families(&[entries[0].clone(), entries[0].clone()]).unwrap();
        assert_eq!(doubled.families[0].count, 2);

        assert!(classify_families(&[]).unwrap().families.is_empty());
        let mixed = vec![
            entries[0].clone(),
            CodeEntry { n: 4, k: 1, fingerprint: rot, circuit_size: 1 },
        ];
        assert!(classify_families(&mixed).is_err());
    }

    #[test]
    fn csv_report_shape() {
        let rep = weight_enumerators(&t(&["ZZI", "ZIZ"])).unwrap();
        let table = classify_families(&[CodeEntry {
            n: 3,
            k: 1,
            fingerprint: rep,
            circuit_size: 2,
        }])
        .unwrap();
        let csv = table.to_csv();
        assert!(csv.starts_with("family_id,A,B,degenerate,count,min_circuit_size\n"));
        assert!(csv.contains("1,\"1 0 3 0\",\"1 3 3 9\",true,1,2"));
    }
}
