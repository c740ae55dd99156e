//! Scratch calibration run: can the trainer find a [[5,1,3]] code?

use qecdisc::env::{EnvSpec, EpisodeMode};
use qecdisc::errors::DEFAULT_MEMORY_BUDGET;
use qecdisc::gateset::{Connectivity, GateSetSpec};
use qecdisc::kl::DegeneracyCheck;
use qecdisc::ppo::{train, HyperParams, TrainConfig};

fn main() {
    let n = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(5);
    let epochs = std::env::args().nth(2).map(|s| s.parse().unwrap()).unwrap_or(300);
    let spec = EnvSpec {
        n,
        k: 1,
        d: 3,
        mode: EpisodeMode::FixedTarget,
        gateset: GateSetSpec::new(
            &[qecdisc::gate::GateKind::H, qecdisc::gate::GateKind::Cnot],
            Connectivity::AllToAllDirected,
            n,
        ),
        max_gates: 20,
        p_i: 0.9,
        c_z: 1.0,
        cz_grid: vec![],
        check: DegeneracyCheck::Soft(2),
        hadamard_qubits: vec![],
        custom_targets: None,
        memory_budget: DEFAULT_MEMORY_BUDGET,
    };
    let hp = HyperParams { num_epochs: epochs, ..Default::default() };
    let config = TrainConfig { env: spec, hp, seeds: vec![1] };
    let t0 = std::time::Instant::now();
    let result = train(&config).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let total: usize = result.metrics.iter().map(|m| m.success_count).sum();
    let first = result.metrics.iter().find(|m| m.success_count > 0).map(|m| m.epoch);
    println!(
        "n={n} epochs={epochs}: {} discoveries ({} successes), first at epoch {:?}, {:.1}s",
        result.discoveries.len(),
        total,
        first,
        secs
    );
    for m in result.metrics.iter().step_by((epochs / 10).max(1)) {
        println!(
            "  epoch {:4}  return {:8.4}  circ {:5.1}  succ {:4}  lr {:.2e}",
            m.epoch, m.mean_return, m.mean_circuit_size, m.success_count, m.lr
        );
    }
    if let Some(d) = result.discoveries.first() {
        println!("first discovery (epoch {}):\n{}", d.epoch, d.tableau);
    }

    // Family census over everything discovered.
    let entries: Vec<qecdisc::analysis::CodeEntry> = result
        .discoveries
        .iter()
        .map(|d| {
            let t = qecdisc::tableau::Tableau::from_text(&d.tableau).unwrap();
            let fp = qecdisc::analysis::weight_enumerators(&t).unwrap();
            qecdisc::analysis::CodeEntry {
                n,
                k: 1,
                fingerprint: fp,
                circuit_size: d.circuit.len(),
            }
        })
        .collect();
    let table = qecdisc::analysis::classify_families(&entries).unwrap();
    let (x, y) = table.census();
    println!("families: {} ({x} non-degenerate, {y} degenerate)", table.families.len());
    for f in &table.families {
        println!(
            "  family {}: count {:4}  min_size {:2}  d={} deg={}",
            f.id, f.count, f.min_circuit_size, f.fingerprint.d, f.fingerprint.degenerate
        );
    }
}
