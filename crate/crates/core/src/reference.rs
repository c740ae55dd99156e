//! Naive reference implementations used to cross-check the fast paths.
//!
//! Everything here works on letter vectors (one byte per qubit, I/X/Y/Z)
//! and explicit enumeration: anticommutation is counted position by
//! position, group membership enumerates all 2^(n−k) stabilizer elements,
//! weight enumerators and failure probabilities scan all 4ⁿ Pauli strings.
//! None of it touches the packed-word kernel, so agreement between the two
//! routes is a real check, not a tautology. Budgets are small by design
//! (n ≤ 8); these run in tests and in the `oracle` CLI verb.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::pauli::PauliString;
use crate::tableau::Tableau;

/// Letter codes: 0 = I, 1 = X, 2 = Y, 3 = Z (lexicographic order).
pub type Letters = Vec<u8>;

pub fn letters_of(p: &PauliString) -> Letters {
    (0..p.num_qubits())
        .map(|q| match p.get(q) {
            (false, false) => 0,
            (true, false) => 1,
            (true, true) => 2,
            (false, true) => 3,
        })
        .collect()
}

pub fn letters_to_pauli(l: &[u8]) -> PauliString {
    PauliString::from_bits(
        l.len(),
        l.iter().map(|&c| match c {
            0 => (false, false),
            1 => (true, false),
            2 => (true, true),
            _ => (false, true),
        }),
    )
}

fn letters_weight(l: &[u8]) -> usize {
    l.iter().filter(|&&c| c != 0).count()
}

/// Two single-qubit Paulis anticommute iff both are non-identity and
/// different; strings anticommute iff that happens an odd number of times.
pub fn anticommute(a: &[u8], b: &[u8]) -> bool {
    let odd = a.iter().zip(b).filter(|(&x, &y)| x != 0 && y != 0 && x != y).count();
    odd % 2 == 1
}

/// Single-qubit multiplication, phases dropped.
fn letter_mul(a: u8, b: u8) -> u8 {
    if a == 0 {
        b
    } else if b == 0 {
        a
    } else if a == b {
        0
    } else {
        // The remaining letter: X·Y = Z and cyclic.
        6 - a - b
    }
}

pub fn string_mul(a: &[u8], b: &[u8]) -> Letters {
    a.iter().zip(b).map(|(&x, &y)| letter_mul(x, y)).collect()
}

/// All 2^(n−k) elements of the stabilizer group, by subset products.
pub fn enumerate_group(t: &Tableau) -> Vec<Letters> {
    let gens: Vec<Letters> = t.rows().map(|r| letters_of(&r)).collect();
    let n = t.num_qubits();
    let mut out = Vec::with_capacity(1 << gens.len());
    for mask in 0u64..1 << gens.len() {
        let mut acc = vec![0u8; n];
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = string_mul(&acc, g);
            }
        }
        out.push(acc);
    }
    out
}

/// The Knill–Laflamme detection test, by definition: anticommutes with at
/// least one generator, or is an element of the stabilizer group.
pub fn detected(t: &Tableau, error: &PauliString) -> Result<bool> {
    if error.num_qubits() != t.num_qubits() {
        return Err(Error::LengthMismatch(error.num_qubits(), t.num_qubits()));
    }
    let e = letters_of(error);
    let gens: Vec<Letters> = t.rows().map(|r| letters_of(&r)).collect();
    if gens.iter().any(|g| anticommute(g, &e)) {
        return Ok(true);
    }
    Ok(enumerate_group(t).contains(&e))
}

/// Quantum weight enumerators by full 4ⁿ enumeration: A_j counts weight-j
/// stabilizer elements, B_j counts weight-j strings commuting with every
/// generator.
pub fn weight_enumerators(t: &Tableau) -> Result<(Vec<u64>, Vec<u64>)> {
    let n = t.num_qubits();
    if n > 8 {
        return Err(Error::BudgetExceeded(format!("naive enumerator scan is 4^n; n={n} > 8")));
    }
    let gens: Vec<Letters> = t.rows().map(|r| letters_of(&r)).collect();
    let group: std::collections::HashSet<Letters> = enumerate_group(t).into_iter().collect();
    let mut a = vec![0u64; n + 1];
    let mut b = vec![0u64; n + 1];
    for code in 0..4u64.pow(n as u32) {
        let letters: Letters = (0..n).map(|q| ((code >> (2 * q)) & 3) as u8).collect();
        let w = letters_weight(&letters);
        if gens.iter().all(|g| !anticommute(g, &letters)) {
            b[w] += 1;
            if group.contains(&letters) {
                a[w] += 1;
            }
        }
    }
    Ok((a, b))
}

/// Smallest weight of a Pauli string violating both KL conditions, by a
/// full scan.
pub fn distance(t: &Tableau) -> Result<usize> {
    let n = t.num_qubits();
    if n > 8 {
        return Err(Error::BudgetExceeded(format!("naive distance scan needs n ≤ 8, got {n}")));
    }
    let mut best: Option<usize> = None;
    for code in 0..4u64.pow(n as u32) {
        let letters: Letters = (0..n).map(|q| ((code >> (2 * q)) & 3) as u8).collect();
        let w = letters_weight(&letters);
        if w == 0 || best.is_some_and(|b| w >= b) {
            continue;
        }
        if !detected(t, &letters_to_pauli(&letters))? {
            best = Some(w);
        }
    }
    best.ok_or_else(|| Error::Config("every Pauli string is detected; no distance".into()))
}

/// Exact failure probability by definition: enumerate every error, build
/// the most-likely-error correction per syndrome (ties broken toward the
/// smaller (weight, letters) key), then add up the mass of errors whose
/// correction leaves a logical operator.
pub fn failure_probability(t: &Tableau, model: &NoiseModel) -> Result<f64> {
    let n = t.num_qubits();
    if n > 8 {
        return Err(Error::BudgetExceeded(format!("naive p_f scan needs n ≤ 8, got {n}")));
    }
    let gens: Vec<Letters> = t.rows().map(|r| letters_of(&r)).collect();
    let group: std::collections::HashSet<Letters> = enumerate_group(t).into_iter().collect();

    let syndrome_of = |e: &[u8]| -> u64 {
        gens.iter().enumerate().map(|(i, g)| (anticommute(g, e) as u64) << i).sum()
    };

    let all: Vec<(Letters, f64)> = (0..4u64.pow(n as u32))
        .map(|code| {
            let letters: Letters = (0..n).map(|q| ((code >> (2 * q)) & 3) as u8).collect();
            let p = model.error_probability(&letters_to_pauli(&letters));
            (letters, p)
        })
        .collect();

    // Pass 1: per-syndrome most likely error.
    let mut best: HashMap<u64, (f64, (usize, Letters))> = HashMap::new();
    for (letters, p) in &all {
        let syn = syndrome_of(letters);
        let key = (letters_weight(letters), letters.clone());
        match best.get(&syn) {
            Some((bp, bk)) if *bp > *p || (*bp == *p && *bk <= key) => {}
            _ => {
                best.insert(syn, (*p, key));
            }
        }
    }

    // Pass 2: an error fails when correction·error is a logical operator.
    let mut p_fail = 0.0;
    for (letters, p) in &all {
        let syn = syndrome_of(letters);
        let correction = &best[&syn].1 .1;
        let residual = string_mul(correction, letters);
        if !group.contains(&residual) {
            p_fail += p;
        }
    }
    Ok(p_fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rows: &[&str]) -> Tableau {
        let rows: Vec<PauliString> = rows.iter().map(|s| s.parse().unwrap()).collect();
        Tableau::from_rows(rows[0].num_qubits(), &rows).unwrap()
    }

    #[test]
    fn letter_algebra() {
        assert!(anticommute(&[1], &[3])); // X vs Z
        assert!(!anticommute(&[1, 2, 3, 0], &[1, 2, 3, 0]));
        assert_eq!(string_mul(&[1], &[2]), vec![3]); // X·Y = Z
        assert_eq!(string_mul(&[3, 3, 0], &[3, 0, 3]), vec![0, 3, 3]);
    }

    #[test]
    fn repetition_code_oracles() {
        let rep = t(&["ZZI", "ZIZ"]);
        // ZII commutes with both generators and is not in the group.
        assert!(!detected(&rep, &"ZII".parse().unwrap()).unwrap());
        assert!(detected(&rep, &"XII".parse().unwrap()).unwrap());
        assert!(detected(&rep, &"IZZ".parse().unwrap()).unwrap(), "degenerate detection");
        assert_eq!(distance(&rep).unwrap(), 1);

        let (a, b) = weight_enumerators(&rep).unwrap();
        assert_eq!(a, vec![1, 0, 3, 0]);
        assert_eq!(b, vec![1, 3, 3, 9]);
    }

    #[test]
    fn five_qubit_code_distance() {
        let code = t(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]);
        assert_eq!(distance(&code).unwrap(), 3);
        let (a, b) = weight_enumerators(&code).unwrap();
        assert_eq!(a.iter().sum::<u64>(), 16);
        assert_eq!(b.iter().sum::<u64>(), 64);
        assert_eq!(a, vec![1, 0, 0, 0, 15, 0]);
    }

    #[test]
    fn single_qubit_failure_probabilities() {
        let m = NoiseModel::symmetric(0.9).unwrap();
        // [[1,0]] Z-stabilized state: every residual error is I or Z up to
        // the correction, and both stabilize the state, so decoding never
        // fails.
        let one = t(&["Z"]);
        let pf = failure_probability(&one, &m).unwrap();
        assert!(pf.abs() < 1e-15);

        // Unencoded qubit (no generators): identity is the only correction
        // and every actual error is a logical failure.
        let unencoded = Tableau::initial(1, 1);
        let pf = failure_probability(&unencoded, &m).unwrap();
        assert!((pf - (1.0 - m.p_i)).abs() < 1e-12);
    }
}
