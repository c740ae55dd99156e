//! The code-discovery RL environment.
//!
//! An episode starts from the generators Z_{k+1}, …, Z_n and applies one
//! gate per step, drawn from the expanded action space. After every gate
//! the weighted KL sum over the target error set is recomputed and its
//! negation is the instantaneous reward. Observations are the flattened
//! tableau bits (length 2n(n−k)), with the bias parameter c_Z appended as
//! one extra raw input in meta mode.
//!
//! Modes:
//! - `fixed_target`: fixed channel; episodes end when the KL sum reaches
//!   zero or at `max_gates`.
//! - `meta`: every reset draws a fresh c_Z from the configured grid and
//!   reweights the (fixed) operator list; episodes are fixed-length.
//! - `css`: the initial tableau carries a user-chosen Hadamard block and
//!   only CNOT actions are legal afterwards, which confines the search to
//!   CSS codes; termination as in `fixed_target`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::errors::{ErrorSet, ErrorSetMode, DEFAULT_MEMORY_BUDGET};
use crate::gate::{GateAction, GateKind};
use crate::gateset::GateSetSpec;
use crate::kl::{kl_check, reward, DegeneracyCheck, KlReport};
use crate::noise::NoiseModel;
use crate::tableau::Tableau;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeMode {
    FixedTarget,
    Meta,
    Css,
}

/// Everything needed to build identical episodes: the static part of the
/// environment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvSpec {
    pub n: usize,
    pub k: usize,
    /// Target distance: the error set holds all operators of weight < d.
    pub d: usize,
    pub mode: EpisodeMode,
    pub gateset: GateSetSpec,
    pub max_gates: usize,
    pub p_i: f64,
    /// Bias for fixed_target/css mode (1.0 = symmetric).
    #[serde(default = "default_cz")]
    pub c_z: f64,
    /// Sampling grid for meta mode.
    #[serde(default)]
    pub cz_grid: Vec<f64>,
    pub check: DegeneracyCheck,
    /// Hadamard block positions for css mode (0-based, ≥ k).
    #[serde(default)]
    pub hadamard_qubits: Vec<usize>,
    /// Explicit target operators (text form) overriding the weight-based
    /// enumeration; used for hand-picked sets such as bit-flip-only targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_targets: Option<Vec<String>>,
    #[serde(default = "default_budget")]
    pub memory_budget: u128,
}

fn default_cz() -> f64 {
    1.0
}

fn default_budget() -> u128 {
    DEFAULT_MEMORY_BUDGET
}

impl EnvSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k >= self.n {
            return Err(Error::Config(format!("need k < n, got [[{},{}]]", self.n, self.k)));
        }
        if self.gateset.n != self.n {
            return Err(Error::Config(format!(
                "gate set is for {} qubits, environment for {}",
                self.gateset.n, self.n
            )));
        }
        if self.max_gates == 0 {
            return Err(Error::Config("max_gates must be positive".into()));
        }
        if self.mode == EpisodeMode::Meta && self.cz_grid.is_empty() {
            return Err(Error::Config("meta mode needs a non-empty c_Z grid".into()));
        }
        if self.mode == EpisodeMode::Css {
            for &q in &self.hadamard_qubits {
                if q < self.k {
                    return Err(Error::HadamardOnLogical { index: q, k: self.k });
                }
                if q >= self.n {
                    return Err(Error::QubitOutOfRange { index: q, n: self.n });
                }
            }
        }
        Ok(())
    }

    /// The initial tableau: Z generators, with the CSS Hadamard block
    /// applied (those rows become X-type).
    pub fn initial_tableau(&self) -> Result<Tableau> {
        let mut t = Tableau::initial(self.n, self.k);
        if self.mode == EpisodeMode::Css {
            for &q in &self.hadamard_qubits {
                t.apply_gate_mut(&GateAction::h(q))?;
            }
        }
        Ok(t)
    }

    fn action_list(&self) -> Result<Vec<GateAction>> {
        match self.mode {
            EpisodeMode::Css => {
                // CNOT block only, regardless of the declared kinds.
                GateSetSpec::new(&[GateKind::Cnot], self.gateset.connectivity.clone(), self.n)
                    .action_space()
            }
            _ => self.gateset.action_space(),
        }
    }

    fn error_set(&self) -> Result<ErrorSet> {
        let model = NoiseModel::new(self.p_i, self.c_z)?;
        if let Some(texts) = &self.custom_targets {
            let ops = texts
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<crate::pauli::PauliString>>>()?;
            return ErrorSet::from_paulis(self.n, &ops, &model);
        }
        let mode = match self.mode {
            EpisodeMode::Css => ErrorSetMode::Css,
            _ => ErrorSetMode::Stabilizer,
        };
        ErrorSet::enumerate_with_budget(self.n, self.d, mode, &model, self.memory_budget)
    }

    /// Build an episode with its own RNG stream.
    pub fn build(&self, rng: ChaCha8Rng) -> Result<Episode> {
        self.validate()?;
        let actions = self.action_list()?;
        let error_set = self.error_set()?;
        let initial = self.initial_tableau()?;
        let mut ep = Episode {
            spec: self.clone(),
            actions,
            initial,
            tableau: Tableau::initial(self.n, self.k),
            gates: Vec::new(),
            step: 0,
            c_z: self.c_z,
            error_set,
            rng,
            last_report: None,
        };
        ep.reset();
        Ok(ep)
    }
}

/// Observation handed to the agent: raw tableau bits plus the bias input in
/// meta mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub bits: Vec<u8>,
    pub extra: Option<f64>,
}

impl Observation {
    pub fn len(&self) -> usize {
        self.bits.len() + self.extra.is_some() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Network input: bits as 0/1 floats, c_Z appended unnormalized.
    pub fn to_input(&self) -> Vec<f32> {
        let mut v: Vec<f32> = self.bits.iter().map(|&b| b as f32).collect();
        if let Some(cz) = self.extra {
            v.push(cz as f32);
        }
        v
    }

    /// Same layout at double precision (the trainer's working type).
    pub fn to_input_f64(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.bits.iter().map(|&b| b as f64).collect();
        if let Some(cz) = self.extra {
            v.push(cz);
        }
        v
    }
}

/// One step's result.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    /// True when every target error is detected (the success condition).
    pub solved: bool,
}

/// A running episode; owns its tableau, circuit-so-far and RNG stream.
#[derive(Clone, Debug)]
pub struct Episode {
    spec: EnvSpec,
    actions: Vec<GateAction>,
    initial: Tableau,
    tableau: Tableau,
    gates: Vec<GateAction>,
    step: usize,
    c_z: f64,
    error_set: ErrorSet,
    rng: ChaCha8Rng,
    last_report: Option<KlReport>,
}

impl Episode {
    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    pub fn actions(&self) -> &[GateAction] {
        &self.actions
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn observation_len(&self) -> usize {
        2 * self.spec.n * (self.spec.n - self.spec.k)
            + (self.spec.mode == EpisodeMode::Meta) as usize
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn gates(&self) -> &[GateAction] {
        &self.gates
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn current_cz(&self) -> f64 {
        self.c_z
    }

    pub fn error_set(&self) -> &ErrorSet {
        &self.error_set
    }

    pub fn last_report(&self) -> Option<&KlReport> {
        self.last_report.as_ref()
    }

    pub fn observation(&self) -> Observation {
        Observation {
            bits: self.tableau.observation_bits(),
            extra: (self.spec.mode == EpisodeMode::Meta).then_some(self.c_z),
        }
    }

    /// Reset to the initial generators; meta mode draws a fresh c_Z from
    /// the grid and reweights the operator probabilities.
    pub fn reset(&mut self) -> Observation {
        self.tableau = self.initial.clone();
        self.gates.clear();
        self.step = 0;
        self.last_report = None;
        if self.spec.mode == EpisodeMode::Meta {
            let idx = self.rng.gen_range(0..self.spec.cz_grid.len());
            self.c_z = self.spec.cz_grid[idx];
            // p_I stays fixed; p_X is re-solved for the new bias.
            let model = NoiseModel::new(self.spec.p_i, self.c_z)
                .expect("grid biases validated at spec build time");
            self.error_set.reweight(&model);
        }
        self.observation()
    }

    /// Apply action `index`, recompute the KL report and return the reward.
    pub fn step(&mut self, index: usize) -> Result<StepOutcome> {
        if index >= self.actions.len() {
            return Err(Error::InvalidAction { index, len: self.actions.len() });
        }
        let gate = self.actions[index];
        if self.spec.mode == EpisodeMode::Css && gate.kind() != GateKind::Cnot {
            return Err(Error::CssViolation(gate.to_string()));
        }
        self.tableau.apply_gate_mut(&gate)?;
        self.gates.push(gate);
        self.step += 1;

        let report = kl_check(&self.tableau, &self.error_set, self.spec.check)?;
        let r = reward(&report);
        let solved = report.all_detected();
        let done = match self.spec.mode {
            EpisodeMode::Meta => self.step >= self.spec.max_gates,
            _ => solved || self.step >= self.spec.max_gates,
        };
        self.last_report = Some(report);
        Ok(StepOutcome { observation: self.observation(), reward: r, done, solved })
    }

    /// The circuit built so far, in file form.
    pub fn circuit(&self) -> crate::circuit::Circuit {
        let mut gates = Vec::new();
        if self.spec.mode == EpisodeMode::Css {
            gates.extend(self.spec.hadamard_qubits.iter().map(|&q| GateAction::h(q)));
        }
        gates.extend_from_slice(&self.gates);
        crate::circuit::Circuit::new(
            self.spec.n,
            self.spec.k,
            gates,
            self.spec.gateset.kinds.clone(),
            self.spec.gateset.connectivity.clone(),
        )
    }
}

/// A lockstep batch of environments with per-env RNG streams derived from
/// one master seed.
pub struct EnvBatch {
    pub envs: Vec<Episode>,
}

impl EnvBatch {
    pub fn new(spec: &EnvSpec, num_envs: usize, master_seed: u64) -> Result<Self> {
        let envs = (0..num_envs)
            .map(|i| {
                use rand::SeedableRng;
                let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
                rng.set_stream(i as u64 + 1);
                spec.build(rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { envs })
    }

    pub fn len(&self) -> usize {
        self.envs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envs.is_empty()
    }

    pub fn observations(&self) -> Vec<Observation> {
        self.envs.iter().map(|e| e.observation()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn repetition_spec() -> EnvSpec {
        EnvSpec {
            n: 3,
            k: 1,
            d: 2,
            mode: EpisodeMode::FixedTarget,
            gateset: GateSetSpec::new(
                &[GateKind::H, GateKind::Cnot],
                crate::gateset::Connectivity::AllToAllDirected,
                3,
            ),
            max_gates: 10,
            p_i: 0.9,
            c_z: 1.0,
            cz_grid: vec![],
            check: DegeneracyCheck::Exact,
            hadamard_qubits: vec![],
            custom_targets: None,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    /// The Appendix-A-style repetition environment: bit-flip targets only.
    fn bitflip_spec() -> EnvSpec {
        let mut spec = repetition_spec();
        spec.custom_targets =
            Some(["XII", "IXI", "IIX", "XXI", "XIX", "IXX"].map(String::from).to_vec());
        spec
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0)
    }

    #[test]
    fn observation_length_law() {
        for (n, k) in [(3, 1), (5, 1), (7, 1), (6, 2), (9, 3)] {
            let mut spec = repetition_spec();
            spec.n = n;
            spec.k = k;
            spec.gateset = GateSetSpec::new(
                &[GateKind::H, GateKind::Cnot],
                crate::gateset::Connectivity::AllToAllDirected,
                n,
            );
            let ep = spec.build(rng()).unwrap();
            assert_eq!(ep.observation().len(), 2 * n * (n - k));
            assert_eq!(ep.observation_len(), 2 * n * (n - k));
        }
    }

    #[test]
    fn reset_observation_encodes_initial_generators() {
        let ep = repetition_spec().build(rng()).unwrap();
        let obs = ep.observation();
        assert_eq!(obs.len(), 12);
        // Rows IZI and IIZ: x-blocks all zero, z-blocks one-hot.
        assert_eq!(obs.bits, vec![0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn repetition_episode_terminates_on_solution() {
        let mut ep = bitflip_spec().build(rng()).unwrap();
        let actions = ep.actions().to_vec();
        let cnot01 = actions.iter().position(|g| *g == GateAction::cnot(0, 1)).unwrap();
        let cnot02 = actions.iter().position(|g| *g == GateAction::cnot(0, 2)).unwrap();

        let m = NoiseModel::symmetric(0.9).unwrap();
        let out1 = ep.step(cnot01).unwrap();
        assert!(!out1.done);
        // Undetected mass after the first CNOT is p_X²·p_I (only XXI left).
        let report = ep.last_report().unwrap();
        assert!((report.undetected_prob - m.p_x * m.p_x * m.p_i).abs() < 1e-15);
        let out2 = ep.step(cnot02).unwrap();
        assert!(out2.done && out2.solved);
        assert_eq!(out2.reward, 0.0);
        assert_eq!(ep.tableau().to_text(), "ZZI\nZIZ\n");
        assert!(out1.reward < out2.reward);
    }

    #[test]
    fn deterministic_replay() {
        let spec = repetition_spec();
        let run = |seed: u64| {
            let mut ep = spec.build(ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let mut log = Vec::new();
            for idx in [0, 3, 3, 1, 4, 2, 0, 0] {
                let out = ep.step(idx % ep.num_actions()).unwrap();
                log.push((out.observation.bits.clone(), out.reward.to_bits(), out.done));
                if out.done {
                    ep.reset();
                }
            }
            log
        };
        assert_eq!(run(42), run(42));
    }

    #[test]
    fn h_twice_returns_to_prior_state_with_equal_rewards() {
        let mut ep = repetition_spec().build(rng()).unwrap();
        let h2 = 2; // H on qubit 2
        let before = ep.tableau().clone();
        let r1 = ep.step(h2).unwrap().reward;
        let _ = ep.step(h2).unwrap();
        assert_eq!(ep.tableau(), &before);
        // Revisit: applying H again must produce the same reward as the
        // first visit.
        let r3 = ep.step(h2).unwrap().reward;
        assert_eq!(r1, r3);
    }

    #[test]
    fn meta_mode_runs_fixed_length_episodes() {
        let mut spec = repetition_spec();
        spec.mode = EpisodeMode::Meta;
        spec.cz_grid = vec![0.5, 1.0, 2.0];
        spec.max_gates = 35;
        let mut ep = spec.build(rng()).unwrap();
        let solve = [
            ep.actions().iter().position(|g| *g == GateAction::cnot(0, 1)).unwrap(),
            ep.actions().iter().position(|g| *g == GateAction::cnot(0, 2)).unwrap(),
        ];
        let mut dones = 0;
        for step in 0..35 {
            let idx = solve.get(step).copied().unwrap_or(0);
            let out = ep.step(idx).unwrap();
            if step < 34 {
                assert!(!out.done, "meta episodes must not end early (step {step})");
            } else {
                assert!(out.done);
                dones += 1;
            }
        }
        assert_eq!(dones, 1);
    }

    #[test]
    fn meta_reset_samples_reproducible_cz_sequence() {
        let mut spec = repetition_spec();
        spec.mode = EpisodeMode::Meta;
        spec.cz_grid = (0..16).map(|i| 0.5 + 0.1 * i as f64).collect();
        let sample = |seed| {
            let mut ep = spec.build(ChaCha8Rng::seed_from_u64(seed)).unwrap();
            (0..20).map(|_| {
                ep.reset();
                ep.current_cz()
            }).collect::<Vec<_>>()
        };
        assert_eq!(sample(7), sample(7));
        assert_ne!(sample(7), sample(8), "different seeds should give different draws");
        for cz in sample(7) {
            assert!(spec.cz_grid.contains(&cz));
        }
        // Meta observations carry the bias as the extra input.
        let ep = spec.build(rng()).unwrap();
        let obs = ep.observation();
        assert_eq!(obs.extra, Some(ep.current_cz()));
        assert_eq!(obs.to_input().len(), obs.bits.len() + 1);
    }

    #[test]
    fn invalid_actions_are_rejected() {
        let mut ep = repetition_spec().build(rng()).unwrap();
        let n_actions = ep.num_actions();
        assert!(matches!(
            ep.step(n_actions),
            Err(Error::InvalidAction { .. })
        ));
    }

    #[test]
    fn css_env_initial_rows_and_cnot_restriction() {
        let mut spec = repetition_spec();
        spec.mode = EpisodeMode::Css;
        spec.hadamard_qubits = vec![1];
        let ep = spec.build(rng()).unwrap();
        assert_eq!(ep.tableau().to_text(), "IXI\nIIZ\n");
        assert!(ep.actions().iter().all(|g| g.kind() == GateKind::Cnot));

        // Hadamard on a logical slot is rejected.
        let mut bad = spec.clone();
        bad.hadamard_qubits = vec![0];
        assert!(matches!(bad.build(rng()), Err(Error::HadamardOnLogical { .. })));
    }

    #[test]
    fn css_closure_under_random_cnot_sequences() {
        use rand::Rng;
        let mut master = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..200 {
            let n = 4 + (trial % 7); // up to n = 10
            let k = 1 + (trial % 2).min(n - 2);
            let mut spec = repetition_spec();
            spec.n = n;
            spec.k = k;
            spec.mode = EpisodeMode::Css;
            spec.gateset = GateSetSpec::new(
                &[GateKind::Cnot],
                crate::gateset::Connectivity::AllToAll,
                n,
            );
            let h_count = master.gen_range(0..=(n - k));
            spec.hadamard_qubits = (k..k + h_count).collect();
            let mut ep = spec.build(ChaCha8Rng::seed_from_u64(trial as u64)).unwrap();
            for _ in 0..30 {
                let idx = master.gen_range(0..ep.num_actions());
                let out = ep.step(idx).unwrap();
                if out.done {
                    ep.reset();
                }
                assert!(ep.tableau().is_css(), "row mixed X and Z parts");
            }
        }
    }

    #[test]
    fn env_batch_streams_are_independent_and_reproducible() {
        let mut spec = repetition_spec();
        spec.mode = EpisodeMode::Meta;
        spec.cz_grid = vec![0.5, 1.0, 1.5, 2.0];
        let seq = |seed: u64| {
            let mut batch = EnvBatch::new(&spec, 4, seed).unwrap();
            batch
                .envs
                .iter_mut()
                .map(|e| (0..5).map(|_| { e.reset(); e.current_cz() }).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        let a = seq(1);
        assert_eq!(a, seq(1));
        assert!(a.windows(2).any(|w| w[0] != w[1]), "env streams should differ");
    }
}
