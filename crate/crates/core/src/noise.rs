//! Biased depolarizing noise channels.
//!
//! The channel is an i.i.d. tensor product of single-qubit depolarizing
//! channels with p_X = p_Y and p_Z = p_X^{c_Z}, where c_Z = log p_Z / log p_X
//! is the bias parameter (c_Z = 1 is symmetric, c_Z < 1 is Z-dominated).
//! Normalization with p_I held fixed leaves a single unknown, the root of
//! 2·p_X + p_X^{c_Z} = 1 − p_I in (0, 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Relative tolerance for the p_X bisection.
const PX_REL_TOL: f64 = 1e-12;

/// A single-qubit biased depolarizing channel, extended i.i.d. to n qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p_i: f64,
    pub c_z: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl NoiseModel {
    /// Build the channel from (p_I, c_Z) by solving the normalization
    /// constraint for p_X.
    pub fn new(p_i: f64, c_z: f64) -> Result<Self> {
        let p_x = solve_px(p_i, c_z)?;
        Ok(Self { p_i, c_z, p_x, p_y: p_x, p_z: p_x.powf(c_z) })
    }

    /// Symmetric depolarizing channel: p_X = p_Y = p_Z = (1 − p_I)/3.
    pub fn symmetric(p_i: f64) -> Result<Self> {
        Self::new(p_i, 1.0)
    }

    /// Probability of a specific n-qubit Pauli error under the i.i.d.
    /// channel: p_I^{n−w} · p_X^{w_X} · p_Y^{w_Y} · p_Z^{w_Z}.
    pub fn error_probability(&self, e: &PauliString) -> f64 {
        let (wx, wy, wz) = e.letter_counts();
        let w = wx + wy + wz;
        self.p_i.powi((e.num_qubits() - w) as i32)
            * self.p_x.powi(wx as i32)
            * self.p_y.powi(wy as i32)
            * self.p_z.powi(wz as i32)
    }

    /// Probability from letter counts alone (for precomputed error sets).
    pub fn probability_from_counts(&self, n: usize, wx: usize, wy: usize, wz: usize) -> f64 {
        self.p_i.powi((n - wx - wy - wz) as i32)
            * self.p_x.powi(wx as i32)
            * self.p_y.powi(wy as i32)
            * self.p_z.powi(wz as i32)
    }
}

/// Solve 2x + x^{c_Z} = 1 − p_I for x in (0, 1) by bisection.
///
/// The left side is strictly increasing in x with range (0, 3), so the root
/// exists and is unique for 0 < p_I < 1; bisection converges for any
/// c_Z > 0 where Newton iterations can leave the bracket.
pub fn solve_px(p_i: f64, c_z: f64) -> Result<f64> {
    if !(0.0 < p_i && p_i < 1.0) {
        return Err(Error::Config(format!("p_I must lie in (0,1), got {p_i}")));
    }
    if c_z <= 0.0 {
        return Err(Error::Config(format!("c_Z must be positive, got {c_z}")));
    }
    let rhs = 1.0 - p_i;
    let f = |x: f64| 2.0 * x + x.powf(c_z) - rhs;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if f(hi) < 0.0 {
        return Err(Error::Config(format!(
            "no root of 2x + x^{c_z} = {rhs} in (0,1)"
        )));
    }
    while hi - lo > PX_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The c_Z-effective weight w_X + w_Y + c_Z·w_Z; reduces to the symmetric
/// weight at c_Z = 1.
pub fn effective_weight(e: &PauliString, c_z: f64) -> f64 {
    let (wx, wy, wz) = e.letter_counts();
    (wx + wy) as f64 + c_z * wz as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn symmetric_channel_reduces_to_third() {
        let m = NoiseModel::new(0.9, 1.0).unwrap();
        assert!((m.p_x - 1.0 / 30.0).abs() < 1e-12);
        assert!((m.p_x - m.p_y).abs() < 1e-15);
        assert!((m.p_x - m.p_z).abs() < 1e-12);
        assert!((m.p_i + m.p_x + m.p_y + m.p_z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_bias_root() {
        // c_Z = 2: 2x + x^2 = 0.1 has root (−2 + √4.4)/2.
        let expected = (-2.0 + 4.4_f64.sqrt()) / 2.0;
        let got = solve_px(0.9, 2.0).unwrap();
        assert!((got - expected).abs() < 1e-12, "got {got}, expected {expected}");
    }

    #[test]
    fn sqrt_bias_residual() {
        let x = solve_px(0.9, 0.5).unwrap();
        assert!((2.0 * x + x.sqrt() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn solve_px_rejects_bad_inputs() {
        assert!(solve_px(0.0, 1.0).is_err());
        assert!(solve_px(1.0, 1.0).is_err());
        assert!(solve_px(0.9, 0.0).is_err());
    }

    #[test]
    fn error_probabilities() {
        let m = NoiseModel::new(0.9, 1.0).unwrap();
        assert!((m.error_probability(&p("III")) - 0.729).abs() < 1e-12);
        assert!((m.error_probability(&p("XII")) - (1.0 / 30.0) * 0.81).abs() < 1e-12);

        let b = NoiseModel::new(0.9, 2.0).unwrap();
        let expected = b.p_x * b.p_x.powi(2) * b.p_i;
        assert!((b.error_probability(&p("XZI")) - expected).abs() < 1e-15);
    }

    #[test]
    fn full_pauli_group_probabilities_sum_to_one() {
        for (p_i, c_z) in [(0.9, 1.0), (0.85, 0.5), (0.95, 2.0), (0.8, 1.3)] {
            let m = NoiseModel::new(p_i, c_z).unwrap();
            for n in 1..=6 {
                let mut total = 0.0;
                for code in 0..4usize.pow(n as u32) {
                    let op = PauliString::from_bits(
                        n,
                        (0..n).map(|q| {
                            let digit = (code >> (2 * q)) & 3;
                            ((digit & 1) == 1, (digit & 2) == 2)
                        }),
                    );
                    total += m.error_probability(&op);
                }
                assert!(
                    (total - 1.0).abs() < 1e-10,
                    "n={n} p_i={p_i} c_z={c_z}: sum {total}"
                );
            }
        }
    }

    #[test]
    fn effective_weights() {
        assert!((effective_weight(&p("IXZ"), 0.5) - 1.5).abs() < 1e-15);
        assert!((effective_weight(&p("ZZZ"), 2.0) - 6.0).abs() < 1e-15);
        // c_Z = 1 reduces to the symmetric weight.
        for s in ["IXYZ", "XXXX", "IIII", "ZIZI"] {
            assert_eq!(effective_weight(&p(s), 1.0), p(s).weight() as f64);
        }
    }

    #[test]
    fn effective_weight_monotone_in_cz_iff_z_present() {
        let grid = [0.5, 0.8, 1.0, 1.5, 2.0];
        for s in ["IZX", "ZZZ", "YZI"] {
            let op = p(s);
            for w in grid.windows(2) {
                assert!(effective_weight(&op, w[0]) < effective_weight(&op, w[1]));
            }
        }
        for s in ["XXY", "III", "XYX"] {
            let op = p(s);
            let base = effective_weight(&op, 1.0);
            for &c in &grid {
                assert_eq!(effective_weight(&op, c), base);
            }
        }
    }
}
