//! Generalized advantage estimation.

use ndarray::Array2;

/// Standard GAE-λ over a (num_steps × num_envs) trajectory block.
///
/// `dones[t][e]` flags that the episode ended after the action at step t
/// (the following observation starts a fresh episode); `bootstrap[e]` is
/// the critic's value of the observation after the final step. Returns
/// (advantages, returns) with returns = advantages + values.
pub fn gae(
    rewards: &Array2<f64>,
    values: &Array2<f64>,
    dones: &Array2<f64>,
    bootstrap: &[f64],
    gamma: f64,
    lambda: f64,
) -> (Array2<f64>, Array2<f64>) {
    let (steps, envs) = rewards.dim();
    assert_eq!(values.dim(), (steps, envs));
    assert_eq!(dones.dim(), (steps, envs));
    assert_eq!(bootstrap.len(), envs);

    let mut advantages = Array2::zeros((steps, envs));
    let mut carry = vec![0.0f64; envs];
    for t in (0..steps).rev() {
        for e in 0..envs {
            let not_done = 1.0 - dones[(t, e)];
            let next_value = if t + 1 < steps { values[(t + 1, e)] } else { bootstrap[e] };
            let delta = rewards[(t, e)] + gamma * next_value * not_done - values[(t, e)];
            carry[e] = delta + gamma * lambda * not_done * carry[e];
            advantages[(t, e)] = carry[e];
        }
    }
    let returns = &advantages + values;
    (advantages, returns)
}
