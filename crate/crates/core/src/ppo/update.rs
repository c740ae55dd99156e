//! The PPO loss, its analytic gradients and the minibatch update loop.
//!
//! The total loss is the clipped surrogate actor term plus vf_coef times a
//! squared value error, minus ent_coef times the policy entropy:
//!
//!   L = mean_i[ −min(ρ_i·Â_i, clip(ρ_i, 1−ε, 1+ε)·Â_i) ]
//!     + vf_coef · mean_i[ ½(V(s_i) − R_i)² ]
//!     − ent_coef · mean_i[ H(π(·|s_i)) ]
//!
//! with ρ the new/old probability ratio and Â the minibatch-normalized
//! advantage. Gradients flow through softmax log-probabilities, the active
//! branch of the clip and the value head; everything is differentiated by
//! hand against the two network outputs and then backpropagated.

use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ppo::net::{clip_global_norm, Adam, Gradients, Mlp};
use crate::ppo::HyperParams;

/// Transitions collected from a batch of environments, flattened in
/// (step-major, env-minor) order: row t·num_envs + e.
#[derive(Clone, Debug)]
pub struct TrajectoryBatch {
    pub observations: Array2<f64>,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub values: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
    pub num_steps: usize,
    pub num_envs: usize,
}

impl TrajectoryBatch {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Log-softmax rows (numerically stable).
pub fn log_softmax(logits: ArrayView2<f64>) -> Array2<f64> {
    let mut out = logits.to_owned();
    for mut row in out.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| v - max);
        let lse = row.iter().map(|v| v.exp()).sum::<f64>().ln();
        row.mapv_inplace(|v| v - lse);
    }
    out
}

/// The three scalar parts of the PPO objective on one minibatch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossParts {
    pub actor: f64,
    pub value: f64,
    pub entropy: f64,
}

impl LossParts {
    pub fn total(&self, hp: &HyperParams) -> f64 {
        self.actor + hp.vf_coef * self.value - hp.ent_coef * self.entropy
    }
}

/// Evaluate the PPO loss on a minibatch and, optionally, its gradients.
///
/// `advantages` must already be normalized if normalization is wanted; the
/// caller owns that choice so the gradient check can probe the raw loss.
#[allow(clippy::too_many_arguments)]
pub fn loss_and_grads(
    actor: &Mlp,
    critic: &Mlp,
    obs: ArrayView2<f64>,
    actions: &[usize],
    old_log_probs: &[f64],
    advantages: &[f64],
    returns: &[f64],
    hp: &HyperParams,
    want_grads: bool,
) -> (LossParts, Option<(Gradients, Gradients)>) {
    let batch = actions.len();
    let scale = 1.0 / batch as f64;

    let (logits, actor_cache) = actor.forward(obs);
    let logp = log_softmax(logits.view());
    let probs = logp.mapv(f64::exp);

    let (values, critic_cache) = critic.forward(obs);

    let mut actor_loss = 0.0;
    let mut entropy_sum = 0.0;
    let mut value_loss = 0.0;
    // d(total)/d(logits) and d(total)/d(value) per sample.
    let mut d_logits = Array2::zeros(logits.raw_dim());
    let mut d_value = Array2::zeros(values.raw_dim());

    for i in 0..batch {
        let a = actions[i];
        let adv = advantages[i];
        let ratio = (logp[(i, a)] - old_log_probs[i]).exp();
        let unclipped = ratio * adv;
        let clipped = ratio.clamp(1.0 - hp.clip_eps, 1.0 + hp.clip_eps) * adv;
        actor_loss -= unclipped.min(clipped) * scale;

        // Gradient of −min(u, c) with respect to the ratio: the unclipped
        // branch wins ties, the clipped branch only passes gradient while
        // the clamp is inactive.
        let d_ratio = if unclipped <= clipped {
            -adv
        } else if ratio > 1.0 - hp.clip_eps && ratio < 1.0 + hp.clip_eps {
            -adv
        } else {
            0.0
        };

        let h: f64 = -probs.row(i).iter().zip(logp.row(i)).map(|(&p, &lp)| p * lp).sum::<f64>();
        entropy_sum += h;

        let v = values[(i, 0)];
        let err = v - returns[i];
        value_loss += 0.5 * err * err;

        if want_grads {
            // d logp(a)/d logits_j = δ_aj − p_j; d ratio/d logp(a) = ratio.
            let coeff = d_ratio * ratio * scale;
            for j in 0..logits.ncols() {
                let onehot = (j == a) as usize as f64;
                let p_j = probs[(i, j)];
                // Entropy: dH/dz_j = −p_j (log p_j + H); loss carries −ent_coef·H.
                let d_entropy = -p_j * (logp[(i, j)] + h);
                d_logits[(i, j)] =
                    coeff * (onehot - p_j) + hp.ent_coef * (-d_entropy) * scale;
            }
            d_value[(i, 0)] = hp.vf_coef * err * scale;
        }
    }

    let parts = LossParts {
        actor: actor_loss,
        value: value_loss * scale,
        entropy: entropy_sum * scale,
    };
    if !want_grads {
        return (parts, None);
    }
    let actor_grads = actor.backward(&actor_cache, d_logits.view());
    let critic_grads = critic.backward(&critic_cache, d_value.view());
    (parts, Some((actor_grads, critic_grads)))
}

/// Diagnostics from one update phase.
#[derive(Clone, Copy, Debug, Default)]
pub struct UpdateMetrics {
    pub mean_total_loss: f64,
    pub mean_actor_loss: f64,
    pub mean_value_loss: f64,
    pub mean_entropy: f64,
    pub grad_norm: f64,
}

/// Run `update_epochs` passes of shuffled minibatch SGD over the batch.
///
/// Advantages are normalized per minibatch (zero mean, unit variance).
/// Returns averaged diagnostics; aborts with a training fault if any loss
/// goes non-finite.
pub fn ppo_update(
    actor: &mut Mlp,
    critic: &mut Mlp,
    actor_opt: &mut Adam,
    critic_opt: &mut Adam,
    batch: &TrajectoryBatch,
    hp: &HyperParams,
    rng: &mut ChaCha8Rng,
) -> Result<UpdateMetrics> {
    let total = batch.len();
    let mb_size = total / hp.num_minibatches;
    let mut indices: Vec<usize> = (0..total).collect();
    let mut metrics = UpdateMetrics::default();
    let mut updates = 0usize;

    for _ in 0..hp.update_epochs {
        indices.shuffle(rng);
        for mb in 0..hp.num_minibatches {
            let slice = &indices[mb * mb_size..(mb + 1) * mb_size];
            let obs = gather_rows(&batch.observations, slice);
            let actions: Vec<usize> = slice.iter().map(|&i| batch.actions[i]).collect();
            let old_logp: Vec<f64> = slice.iter().map(|&i| batch.log_probs[i]).collect();
            let returns: Vec<f64> = slice.iter().map(|&i| batch.returns[i]).collect();
            let raw_adv: Vec<f64> = slice.iter().map(|&i| batch.advantages[i]).collect();
            let advantages = normalize(&raw_adv);

            let (parts, grads) = loss_and_grads(
                actor,
                critic,
                obs.view(),
                &actions,
                &old_logp,
                &advantages,
                &returns,
                hp,
                true,
            );
            let total_loss = parts.total(hp);
            if !total_loss.is_finite() {
                return Err(Error::TrainingFault(format!(
                    "non-finite loss (actor {}, value {}, entropy {})",
                    parts.actor, parts.value, parts.entropy
                )));
            }
            let (mut ag, mut cg) = grads.expect("gradients requested");
            let norm = clip_global_norm(&mut [&mut ag, &mut cg], hp.max_grad_norm);
            actor_opt.step(actor, &ag);
            critic_opt.step(critic, &cg);

            metrics.mean_total_loss += total_loss;
            metrics.mean_actor_loss += parts.actor;
            metrics.mean_value_loss += parts.value;
            metrics.mean_entropy += parts.entropy;
            metrics.grad_norm += norm;
            updates += 1;
        }
    }
    let inv = 1.0 / updates.max(1) as f64;
    metrics.mean_total_loss *= inv;
    metrics.mean_actor_loss *= inv;
    metrics.mean_value_loss *= inv;
    metrics.mean_entropy *= inv;
    metrics.grad_norm *= inv;
    Ok(metrics)
}

fn gather_rows(m: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), m.ncols()));
    for (dst, &src) in rows.iter().enumerate() {
        out.row_mut(dst).assign(&m.row(src));
    }
    out
}

/// Zero-mean unit-variance normalization (the PPO default for advantages).
pub fn normalize(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = var.sqrt() + 1e-8;
    v.iter().map(|x| (x - mean) / std).collect()
}
