//! Evaluation sweeps over (c_Z, p_I) grids for a fixed encoding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{distance, failure_probability, FailureBudget};
use crate::error::Result;
use crate::errors::{ErrorSet, ErrorSetMode};
use crate::kl::{kl_check, DegeneracyCheck};
use crate::noise::NoiseModel;
use crate::tableau::Tableau;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub c_z: f64,
    pub p_i: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub c_z: f64,
    pub p_i: f64,
    /// Weighted KL sum of the target error set at this channel.
    pub kl_sum: f64,
    /// Effective distance (integer part of the minimum violating weight).
    pub d_e: usize,
    /// Raw minimum effective weight among KL-violating operators.
    pub min_violating_weight: f64,
    pub p_fail: f64,
    pub p_fail_residual: f64,
}

/// Evaluate a fixed tableau across a noise grid: per point the weighted KL
/// sum over the weight-< d target set, the effective distance and the
/// failure probability. Grid points are independent and evaluated in
/// parallel; output order follows the input grid.
pub fn evaluate_sweep(
    t: &Tableau,
    d: usize,
    check: DegeneracyCheck,
    grid: &[SweepPoint],
    budget: FailureBudget,
) -> Result<Vec<SweepRow>> {
    grid.par_iter()
        .map(|&SweepPoint { c_z, p_i }| {
            let model = NoiseModel::new(p_i, c_z)?;
            let set = ErrorSet::enumerate(t.num_qubits(), d, ErrorSetMode::Stabilizer, &model)?;
            let report = kl_check(t, &set, check)?;
            let dist = distance(t, c_z)?;
            let fail = failure_probability(t, &model, budget)?;
            Ok(SweepRow {
                c_z,
                p_i,
                kl_sum: report.kl_sum,
                d_e: dist.d_e,
                min_violating_weight: dist.min_violating_weight,
                p_fail: fail.p_fail,
                p_fail_residual: fail.residual,
            })
        })
        .collect()
}

/// CSV report: c_Z, p_I, kl_sum, d_e, p_f.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("c_Z,p_I,kl_sum,d_e,p_f\n");
    for r in rows {
        out.push_str(&format!("{},{},{:e},{},{:e}\n", r.c_z, r.p_i, r.kl_sum, r.d_e, r.p_fail));
    }
    out
}
