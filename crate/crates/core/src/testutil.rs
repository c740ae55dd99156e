//! Shared helpers for unit tests.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::gate::{GateAction, GateKind};
use crate::tableau::Tableau;

/// A valid random tableau: the initial generators evolved by a random
/// {H, S, CNOT} circuit.
pub(crate) fn random_tableau(n: usize, k: usize, gates: usize, rng: &mut ChaCha8Rng) -> Tableau {
    let mut t = Tableau::initial(n, k);
    for _ in 0..gates {
        let g = loop {
            let kind = *[GateKind::H, GateKind::S, GateKind::Cnot].choose(rng).unwrap();
            match kind {
                GateKind::Cnot => {
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..n);
                    if a != b {
                        break GateAction::cnot(a, b);
                    }
                }
                GateKind::H => break GateAction::h(rng.gen_range(0..n)),
                _ => break GateAction::s(rng.gen_range(0..n)),
            }
        };
        t.apply_gate_mut(&g).unwrap();
    }
    t
}
