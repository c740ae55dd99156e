//! Proximal Policy Optimization, written out in full.
//!
//! Actor and critic are identical two-hidden-layer ReLU networks (the actor
//! ends in n_A logits, the critic in one value). Training alternates a
//! collect phase, where the agent steps a batch of environments and stores
//! (observation, action, reward) transitions, and an update phase, where
//! the transitions are shuffled into minibatches and pushed through the
//! clipped-surrogate loss with an entropy bonus and a value term, optimized
//! by Adam under a global gradient-norm clip. Forward, backward and the
//! optimizer are implemented here directly in f64; there is no autodiff,
//! which keeps the finite-difference gradient checks meaningful.

mod gae;
mod net;
mod train;
mod update;

pub use gae::gae;
pub use net::{Adam, Mlp};
pub use train::{
    collect, greedy_rollout, train, Checkpoint, Discovery, EpochMetrics, TrainConfig, TrainResult,
    Trainer,
};
pub use update::{loss_and_grads, ppo_update, LossParts, TrajectoryBatch, UpdateMetrics};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// PPO hyperparameters. Defaults are the reference values used by the demo
/// configs; all of them sit inside the ranges that train reliably.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperParams {
    pub lr: f64,
    pub num_envs: usize,
    pub num_steps: usize,
    /// Total collect-update cycles.
    pub num_epochs: usize,
    /// Gradient passes over each collected batch.
    pub update_epochs: usize,
    pub num_minibatches: usize,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_eps: f64,
    pub ent_coef: f64,
    pub vf_coef: f64,
    pub max_grad_norm: f64,
    pub anneal_lr: bool,
    /// Hidden width of both networks.
    pub hidden: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            lr: 2.5e-4,
            num_envs: 64,
            num_steps: 16,
            num_epochs: 1000,
            update_epochs: 4,
            num_minibatches: 8,
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_eps: 0.2,
            ent_coef: 0.02,
            vf_coef: 0.5,
            max_grad_norm: 0.25,
            anneal_lr: true,
            hidden: 64,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lr", self.lr),
            ("gamma", self.gamma),
            ("gae_lambda", self.gae_lambda),
            ("clip_eps", self.clip_eps),
            ("vf_coef", self.vf_coef),
            ("max_grad_norm", self.max_grad_norm),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.ent_coef < 0.0 {
            return Err(Error::Config("ent_coef must be non-negative".into()));
        }
        for (name, v) in [
            ("num_envs", self.num_envs),
            ("num_steps", self.num_steps),
            ("num_epochs", self.num_epochs),
            ("update_epochs", self.update_epochs),
            ("num_minibatches", self.num_minibatches),
            ("hidden", self.hidden),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if (self.num_envs * self.num_steps) % self.num_minibatches != 0 {
            return Err(Error::Config(format!(
                "num_envs*num_steps = {} must divide into {} minibatches",
                self.num_envs * self.num_steps,
                self.num_minibatches
            )));
        }
        Ok(())
    }
}
