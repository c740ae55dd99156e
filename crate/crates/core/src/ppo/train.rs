//! The collect/update training loop and discovery bookkeeping.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::env::{EnvBatch, EnvSpec, EpisodeMode};
use crate::error::{Error, Result};
use crate::ppo::net::{Adam, Mlp};
use crate::ppo::update::{log_softmax, ppo_update, TrajectoryBatch};
use crate::ppo::{gae, HyperParams};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub env: EnvSpec,
    pub hp: HyperParams,
    /// One independent agent is trained per seed.
    pub seeds: Vec<u64>,
}

/// A circuit that reached KL sum zero (fixed-target/css) or finished an
/// episode with the best KL sum seen so far for its bias (meta).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Discovery {
    pub seed: u64,
    pub epoch: usize,
    pub c_z: f64,
    pub kl_sum: f64,
    pub circuit: Circuit,
    /// Final generators, one per line.
    pub tableau: String,
}

/// One metrics record per (seed, epoch); serialized as a JSON line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub seed: u64,
    pub epoch: usize,
    pub mean_return: f64,
    pub mean_circuit_size: f64,
    pub success_count: usize,
    pub lr: f64,
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    pub discoveries: Vec<Discovery>,
    pub metrics: Vec<EpochMetrics>,
    pub agents: Vec<Trainer>,
}

/// Flat parameter dump with the owning config's hash.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    pub seed: u64,
    pub actor: Vec<f64>,
    pub critic: Vec<f64>,
}

/// A single agent: networks, optimizers and its environment batch.
#[derive(Clone, Debug)]
pub struct Trainer {
    pub seed: u64,
    pub actor: Mlp,
    pub critic: Mlp,
    spec: EnvSpec,
    hp: HyperParams,
}

impl Trainer {
    pub fn new(spec: &EnvSpec, hp: &HyperParams, seed: u64) -> Result<Self> {
        spec.validate()?;
        hp.validate()?;
        let probe = spec.build(ChaCha8Rng::seed_from_u64(seed))?;
        let obs_dim = probe.observation_len();
        let n_actions = probe.num_actions();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0xA11C);
        let actor = Mlp::new(obs_dim, hp.hidden, n_actions, 0.01, &mut rng);
        let critic = Mlp::new(obs_dim, hp.hidden, 1, 1.0, &mut rng);
        Ok(Self { seed, actor, critic, spec: spec.clone(), hp: hp.clone() })
    }

    pub fn checkpoint(&self, config_hash: &str) -> Checkpoint {
        Checkpoint {
            config_hash: config_hash.to_string(),
            seed: self.seed,
            actor: self.actor.flatten(),
            critic: self.critic.flatten(),
        }
    }

    pub fn restore(&mut self, ckpt: &Checkpoint) -> Result<()> {
        self.actor.unflatten_into(&ckpt.actor)?;
        self.critic.unflatten_into(&ckpt.critic)
    }

    /// Train this agent for `hp.num_epochs` collect/update cycles.
    pub fn run(
        &mut self,
        discoveries: &mut Vec<Discovery>,
        metrics: &mut Vec<EpochMetrics>,
    ) -> Result<()> {
        let hp = self.hp.clone();
        let mut envs = EnvBatch::new(&self.spec, hp.num_envs, self.seed)?;
        let mut actor_opt = Adam::new(&self.actor, hp.lr);
        let mut critic_opt = Adam::new(&self.critic, hp.lr);
        let mut update_rng = ChaCha8Rng::seed_from_u64(self.seed);
        update_rng.set_stream(0x5EED);
        let mut collect_rng = ChaCha8Rng::seed_from_u64(self.seed);
        collect_rng.set_stream(0xC011);

        let mut book = EpisodeBook::new(hp.num_envs);
        // Best final KL sum per bias value, for meta-mode recording.
        let mut best_kl: std::collections::BTreeMap<u64, f64> = Default::default();

        for epoch in 0..hp.num_epochs {
            let lr = if hp.anneal_lr {
                hp.lr * (1.0 - epoch as f64 / hp.num_epochs as f64)
            } else {
                hp.lr
            };
            actor_opt.set_lr(lr);
            critic_opt.set_lr(lr);

            let out = collect(
                &self.actor,
                &self.critic,
                &mut envs,
                hp.num_steps,
                &mut collect_rng,
                &mut book,
            )?;
            let (batch, events) = out.into_batch(hp.gamma, hp.gae_lambda);

            let mut success_count = 0;
            for ev in events {
                match self.spec.mode {
                    EpisodeMode::Meta => {
                        let key = ev.c_z.to_bits();
                        let improved = best_kl.get(&key).map_or(true, |&b| ev.kl_sum < b);
                        if ev.finished && improved {
                            best_kl.insert(key, ev.kl_sum);
                            discoveries.push(ev.into_discovery(self.seed, epoch));
                        }
                    }
                    _ => {
                        if ev.solved {
                            success_count += 1;
                            discoveries.push(ev.into_discovery(self.seed, epoch));
                        }
                    }
                }
            }

            metrics.push(EpochMetrics {
                seed: self.seed,
                epoch,
                mean_return: book.mean_return(),
                mean_circuit_size: book.mean_length(),
                success_count,
                lr,
            });

            ppo_update(
                &mut self.actor,
                &mut self.critic,
                &mut actor_opt,
                &mut critic_opt,
                &batch,
                &hp,
                &mut update_rng,
            )?;
        }
        Ok(())
    }
}

/// Per-env episode accumulators surviving across collect boundaries, plus
/// the finished-episode statistics of the current epoch.
pub struct EpisodeBook {
    returns_acc: Vec<f64>,
    lengths_acc: Vec<usize>,
    finished_returns: Vec<f64>,
    finished_lengths: Vec<usize>,
}

impl EpisodeBook {
    pub fn new(num_envs: usize) -> Self {
        Self {
            returns_acc: vec![0.0; num_envs],
            lengths_acc: vec![0; num_envs],
            finished_returns: Vec::new(),
            finished_lengths: Vec::new(),
        }
    }

    pub fn mean_return(&self) -> f64 {
        mean(&self.finished_returns)
    }

    pub fn mean_length(&self) -> f64 {
        let v: Vec<f64> = self.finished_lengths.iter().map(|&l| l as f64).collect();
        mean(&v)
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// A notable episode end observed during collection.
pub struct EpisodeEvent {
    pub solved: bool,
    pub finished: bool,
    pub c_z: f64,
    pub kl_sum: f64,
    pub circuit: Circuit,
    pub tableau: String,
}

impl EpisodeEvent {
    fn into_discovery(self, seed: u64, epoch: usize) -> Discovery {
        Discovery {
            seed,
            epoch,
            c_z: self.c_z,
            kl_sum: self.kl_sum,
            circuit: self.circuit,
            tableau: self.tableau,
        }
    }
}

/// Raw transitions from one collect phase, before advantage estimation.
pub struct CollectOutput {
    pub observations: Array2<f64>,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub values: Vec<f64>,
    pub rewards: Array2<f64>,
    pub dones: Array2<f64>,
    pub bootstrap: Vec<f64>,
    pub events: Vec<EpisodeEvent>,
}

impl CollectOutput {
    /// Apply GAE and flatten into an update-ready batch.
    pub fn into_batch(self, gamma: f64, lambda: f64) -> (TrajectoryBatch, Vec<EpisodeEvent>) {
        let (num_steps, num_envs) = self.rewards.dim();
        let values_matrix = Array2::from_shape_vec((num_steps, num_envs), self.values.clone())
            .expect("step-major layout");
        let (advantages, returns) =
            gae(&self.rewards, &values_matrix, &self.dones, &self.bootstrap, gamma, lambda);
        (
            TrajectoryBatch {
                observations: self.observations,
                actions: self.actions,
                log_probs: self.log_probs,
                values: self.values,
                advantages: advantages.into_raw_vec_and_offset().0,
                returns: returns.into_raw_vec_and_offset().0,
                num_steps,
                num_envs,
            },
            self.events,
        )
    }
}

/// Interact with the environments for `num_steps` steps, sampling actions
/// from the softmax policy; environments reset automatically on episode
/// end.
pub fn collect(
    actor: &Mlp,
    critic: &Mlp,
    envs: &mut EnvBatch,
    num_steps: usize,
    rng: &mut ChaCha8Rng,
    book: &mut EpisodeBook,
) -> Result<CollectOutput> {
    let num_envs = envs.len();
    let obs_dim = actor.input_dim();
    let mut observations = Array2::zeros((num_steps * num_envs, obs_dim));
    let mut actions = vec![0usize; num_steps * num_envs];
    let mut log_probs = vec![0.0f64; num_steps * num_envs];
    let mut values = vec![0.0f64; num_steps * num_envs];
    let mut rewards = Array2::zeros((num_steps, num_envs));
    let mut dones = Array2::zeros((num_steps, num_envs));
    let mut events = Vec::new();

    book.finished_returns.clear();
    book.finished_lengths.clear();

    let mut current_obs: Vec<Vec<f64>> = envs
        .envs
        .iter()
        .map(|e| e.observation().to_input_f64())
        .collect();

    for t in 0..num_steps {
        let mut obs_matrix = Array2::zeros((num_envs, obs_dim));
        for (e, obs) in current_obs.iter().enumerate() {
            obs_matrix.row_mut(e).assign(&Array1::from_vec(obs.clone()));
        }
        let logits = actor.infer(obs_matrix.view());
        if logits.iter().any(|v| !v.is_finite()) {
            return Err(Error::TrainingFault(format!(
                "non-finite policy logits at collect step {t}"
            )));
        }
        let logp = log_softmax(logits.view());
        let value_col = critic.infer(obs_matrix.view());

        for e in 0..num_envs {
            // Inverse-CDF sample from the softmax row.
            let u: f64 = rng.gen();
            let row = logp.row(e);
            let mut cum = 0.0;
            let mut action = row.len() - 1;
            for (j, &lp) in row.iter().enumerate() {
                cum += lp.exp();
                if u < cum {
                    action = j;
                    break;
                }
            }

            let idx = t * num_envs + e;
            observations.row_mut(idx).assign(&obs_matrix.row(e));
            actions[idx] = action;
            log_probs[idx] = row[action];
            values[idx] = value_col[(e, 0)];

            let env = &mut envs.envs[e];
            let out = env.step(action)?;
            rewards[(t, e)] = out.reward;
            dones[(t, e)] = out.done as usize as f64;
            book.returns_acc[e] += out.reward;
            book.lengths_acc[e] += 1;

            if out.done {
                let report = env.last_report().expect("stepped episode has a report");
                events.push(EpisodeEvent {
                    solved: out.solved,
                    finished: true,
                    c_z: env.current_cz(),
                    kl_sum: report.kl_sum,
                    circuit: env.circuit(),
                    tableau: env.tableau().to_text(),
                });
                book.finished_returns.push(book.returns_acc[e]);
                book.finished_lengths.push(book.lengths_acc[e]);
                book.returns_acc[e] = 0.0;
                book.lengths_acc[e] = 0;
                current_obs[e] = env.reset().to_input_f64();
            } else {
                current_obs[e] = out.observation.to_input_f64();
            }
        }
    }

    // Bootstrap values for the observations after the last step.
    let mut last_matrix = Array2::zeros((num_envs, obs_dim));
    for (e, obs) in current_obs.iter().enumerate() {
        last_matrix.row_mut(e).assign(&Array1::from_vec(obs.clone()));
    }
    let bootstrap: Vec<f64> = critic.infer(last_matrix.view()).column(0).to_vec();

    Ok(CollectOutput {
        observations,
        actions,
        log_probs,
        values,
        rewards,
        dones,
        bootstrap,
        events,
    })
}

/// Deterministic rollout: argmax actions until the episode ends (or
/// `max_gates` in meta mode). For meta agents the bias is pinned to `c_z`.
pub fn greedy_rollout(trainer: &Trainer, c_z: Option<f64>) -> Result<Circuit> {
    let mut spec = trainer.spec.clone();
    if let Some(cz) = c_z {
        if spec.mode == EpisodeMode::Meta {
            spec.cz_grid = vec![cz];
        } else {
            spec.c_z = cz;
        }
    }
    let mut env = spec.build(ChaCha8Rng::seed_from_u64(trainer.seed))?;
    let obs_dim = trainer.actor.input_dim();
    loop {
        let obs = env.observation().to_input_f64();
        let mut m = Array2::zeros((1, obs_dim));
        m.row_mut(0).assign(&Array1::from_vec(obs));
        let logits = trainer.actor.infer(m.view());
        let action = logits
            .row(0)
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite logits"))
            .map(|(i, _)| i)
            .expect("non-empty action space");
        let out = env.step(action)?;
        if out.done {
            break;
        }
    }
    Ok(env.circuit())
}

/// Train one agent per seed and merge their outputs in seed order.
pub fn train(config: &TrainConfig) -> Result<TrainResult> {
    if config.seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    let mut result =
        TrainResult { discoveries: Vec::new(), metrics: Vec::new(), agents: Vec::new() };
    for &seed in &config.seeds {
        let mut trainer = Trainer::new(&config.env, &config.hp, seed)?;
        trainer.run(&mut result.discoveries, &mut result.metrics)?;
        result.agents.push(trainer);
    }
    Ok(result)
}
