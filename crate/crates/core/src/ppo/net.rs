//! Dense networks, orthogonal initialization and the Adam optimizer.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A fully connected net: input → hidden → hidden → output, ReLU inside.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    /// Weight matrices, (fan_in × fan_out) each.
    pub w: Vec<Array2<f64>>,
    pub b: Vec<Array1<f64>>,
}

/// Activations saved by the forward pass for backprop.
pub struct ForwardCache {
    /// Layer inputs: x, h1, h2 (post-activation).
    inputs: Vec<Array2<f64>>,
    /// Pre-activations of the hidden layers.
    pre: Vec<Array2<f64>>,
}

/// Per-parameter gradients, same shapes as the network.
#[derive(Clone, Debug)]
pub struct Gradients {
    pub w: Vec<Array2<f64>>,
    pub b: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            w: net.w.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            b: net.b.iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
        }
    }

    pub fn squared_norm(&self) -> f64 {
        let ws: f64 = self.w.iter().map(|w| w.iter().map(|x| x * x).sum::<f64>()).sum();
        let bs: f64 = self.b.iter().map(|b| b.iter().map(|x| x * x).sum::<f64>()).sum();
        ws + bs
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.w {
            w.mapv_inplace(|x| x * factor);
        }
        for b in &mut self.b {
            b.mapv_inplace(|x| x * factor);
        }
    }
}

/// Orthogonal matrix of shape (rows × cols) scaled by `gain`: modified
/// Gram-Schmidt on a Gaussian sample, columns sign-fixed by their leading
/// entry (the diag(R) convention).
fn orthogonal(rows: usize, cols: usize, gain: f64, rng: &mut impl Rng) -> Array2<f64> {
    let (m, n) = (rows.max(cols), rows.min(cols));
    let a = Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal));

    // Gaussian columns are independent with probability one; no pivoting.
    let mut q: Vec<Array1<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = a.column(j).to_owned();
        for qcol in &q {
            let dot = v.dot(qcol);
            v.zip_mut_with(qcol, |vi, &qi| *vi -= dot * qi);
        }
        let norm = v.dot(&v).sqrt();
        let sign = if v[j] >= 0.0 { 1.0 } else { -1.0 };
        v.mapv_inplace(|x| x / (norm * sign));
        q.push(v);
    }

    let mut out = Array2::zeros((rows, cols));
    for (j, col) in q.iter().enumerate() {
        for i in 0..m {
            if rows >= cols {
                out[(i, j)] = gain * col[i];
            } else {
                out[(j, i)] = gain * col[i];
            }
        }
    }
    out
}

impl Mlp {
    /// Orthogonal hidden layers (gain √2 for ReLU) and a small-gain final
    /// layer: 0.01 keeps initial policies near uniform, 1.0 for critics.
    pub fn new(
        input: usize,
        hidden: usize,
        output: usize,
        final_gain: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let root2 = std::f64::consts::SQRT_2;
        Self {
            w: vec![
                orthogonal(input, hidden, root2, rng),
                orthogonal(hidden, hidden, root2, rng),
                orthogonal(hidden, output, final_gain, rng),
            ],
            b: vec![Array1::zeros(hidden), Array1::zeros(hidden), Array1::zeros(output)],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w[0].nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.w[2].ncols()
    }

    /// Batched forward pass; rows of `x` are samples.
    pub fn forward(&self, x: ArrayView2<f64>) -> (Array2<f64>, ForwardCache) {
        let pre1 = x.dot(&self.w[0]) + &self.b[0];
        let h1 = pre1.mapv(|v| v.max(0.0));
        let pre2 = h1.dot(&self.w[1]) + &self.b[1];
        let h2 = pre2.mapv(|v| v.max(0.0));
        let out = h2.dot(&self.w[2]) + &self.b[2];
        let cache = ForwardCache {
            inputs: vec![x.to_owned(), h1, h2],
            pre: vec![pre1, pre2],
        };
        (out, cache)
    }

    /// Output without keeping activations.
    pub fn infer(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let h1 = (x.dot(&self.w[0]) + &self.b[0]).mapv(|v| v.max(0.0));
        let h2 = (h1.dot(&self.w[1]) + &self.b[1]).mapv(|v| v.max(0.0));
        h2.dot(&self.w[2]) + &self.b[2]
    }

    /// Backpropagate `d_out` = ∂L/∂output through the cached forward pass.
    pub fn backward(&self, cache: &ForwardCache, d_out: ArrayView2<f64>) -> Gradients {
        let mut grads = Gradients::zeros_like(self);

        grads.w[2] = cache.inputs[2].t().dot(&d_out);
        grads.b[2] = d_out.sum_axis(Axis(0));
        let mut delta = d_out.dot(&self.w[2].t());
        delta.zip_mut_with(&cache.pre[1], |d, &p| {
            if p <= 0.0 {
                *d = 0.0;
            }
        });

        grads.w[1] = cache.inputs[1].t().dot(&delta);
        grads.b[1] = delta.sum_axis(Axis(0));
        let mut delta = delta.dot(&self.w[1].t());
        delta.zip_mut_with(&cache.pre[0], |d, &p| {
            if p <= 0.0 {
                *d = 0.0;
            }
        });

        grads.w[0] = cache.inputs[0].t().dot(&delta);
        grads.b[0] = delta.sum_axis(Axis(0));
        grads
    }

    /// All parameters flattened, weights then bias per layer.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..3 {
            out.extend(self.w[i].iter());
            out.extend(self.b[i].iter());
        }
        out
    }

    pub fn num_params(&self) -> usize {
        self.w.iter().map(|w| w.len()).sum::<usize>() + self.b.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Restore from a flat vector produced by [`Mlp::flatten`].
    pub fn unflatten_into(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::Config(format!(
                "checkpoint has {} parameters, network needs {}",
                flat.len(),
                self.num_params()
            )));
        }
        let mut it = flat.iter();
        for i in 0..3 {
            for v in self.w[i].iter_mut() {
                *v = *it.next().unwrap();
            }
            for v in self.b[i].iter_mut() {
                *v = *it.next().unwrap();
            }
        }
        Ok(())
    }

    /// Add `eps` to the idx-th flat parameter (finite-difference probes).
    pub fn nudge(&mut self, idx: usize, eps: f64) {
        let mut offset = 0;
        for i in 0..3 {
            let wl = self.w[i].len();
            if idx < offset + wl {
                let flat = idx - offset;
                let ncols = self.w[i].ncols();
                self.w[i][(flat / ncols, flat % ncols)] += eps;
                return;
            }
            offset += wl;
            let bl = self.b[i].len();
            if idx < offset + bl {
                self.b[i][idx - offset] += eps;
                return;
            }
            offset += bl;
        }
        panic!("parameter index {idx} out of range");
    }
}

/// Adam with global gradient-norm clipping.
#[derive(Clone, Debug)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: u64,
    m: Gradients,
    v: Gradients,
}

impl Adam {
    pub fn new(net: &Mlp, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: Gradients::zeros_like(net),
            v: Gradients::zeros_like(net),
        }
    }

    pub fn set_lr(&mut self, lr: f64) {
        self.lr = lr;
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    /// One Adam step; `grads` may be pre-scaled by the caller's clip.
    pub fn step(&mut self, net: &mut Mlp, grads: &Gradients) {
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for layer in 0..3 {
            update(
                self.lr,
                (self.beta1, self.beta2, self.eps),
                (bc1, bc2),
                self.m.w[layer].iter_mut(),
                self.v.w[layer].iter_mut(),
                net.w[layer].iter_mut(),
                grads.w[layer].iter(),
            );
            update(
                self.lr,
                (self.beta1, self.beta2, self.eps),
                (bc1, bc2),
                self.m.b[layer].iter_mut(),
                self.v.b[layer].iter_mut(),
                net.b[layer].iter_mut(),
                grads.b[layer].iter(),
            );
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn update<'a>(
    lr: f64,
    (beta1, beta2, eps): (f64, f64, f64),
    (bc1, bc2): (f64, f64),
    m: impl Iterator<Item = &'a mut f64>,
    v: impl Iterator<Item = &'a mut f64>,
    p: impl Iterator<Item = &'a mut f64>,
    g: impl Iterator<Item = &'a f64>,
) {
    for (((m, v), p), &g) in m.zip(v).zip(p).zip(g) {
        *m = beta1 * *m + (1.0 - beta1) * g;
        *v = beta2 * *v + (1.0 - beta2) * g * g;
        let mhat = *m / bc1;
        let vhat = *v / bc2;
        *p -= lr * mhat / (vhat.sqrt() + eps);
    }
}

/// Clip a set of gradients jointly to `max_norm` (global L2 norm).
pub fn clip_global_norm(grads: &mut [&mut Gradients], max_norm: f64) -> f64 {
    let total: f64 = grads.iter().map(|g| g.squared_norm()).sum::<f64>().sqrt();
    if total > max_norm && total > 0.0 {
        let factor = max_norm / total;
        for g in grads.iter_mut() {
            g.scale(factor);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonal_columns_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (r, c) in [(8, 4), (4, 8), (6, 6)] {
            let m = orthogonal(r, c, 1.0, &mut rng);
            // The smaller dimension indexes an orthonormal system.
            let gram = if r >= c { m.t().dot(&m) } else { m.dot(&m.t()) };
            let dim = r.min(c);
            for i in 0..dim {
                for j in 0..dim {
                    let expected = (i == j) as usize as f64;
                    assert!(
                        (gram[(i, j)] - expected).abs() < 1e-10,
                        "gram[{i},{j}] = {} for ({r},{c})",
                        gram[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn forward_matches_manual_computation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut net = Mlp::new(2, 3, 2, 1.0, &mut rng);
        net.w[0] = array![[1.0, 0.0, -1.0], [0.0, 1.0, 1.0]];
        net.b[0] = array![0.0, -0.5, 0.0];
        net.w[1] = Array2::eye(3);
        net.b[1] = Array1::zeros(3);
        net.w[2] = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        net.b[2] = array![0.1, -0.1];
        let x = array![[1.0, 2.0]];
        let (out, _) = net.forward(x.view());
        // h1 = relu([1, 1.5, 1]) = [1, 1.5, 1]; out = [1+1+0.1, 1.5+1-0.1]
        assert!((out[(0, 0)] - 2.1).abs() < 1e-12);
        assert!((out[(0, 1)] - 2.4).abs() < 1e-12);
    }

    #[test]
    fn backward_matches_finite_differences_on_scalar_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Mlp::new(4, 5, 1, 1.0, &mut rng);
        let x = Array2::from_shape_fn((3, 4), |_| rng.sample::<f64, _>(StandardNormal));
        // L = sum of outputs.
        let (_, cache) = net.forward(x.view());
        let d_out = Array2::ones((3, 1));
        let grads = net.backward(&cache, d_out.view());

        let loss = |net: &Mlp| net.infer(x.view()).sum();
        let flat_grads: Vec<f64> = {
            let mut out = Vec::new();
            for i in 0..3 {
                out.extend(grads.w[i].iter());
                out.extend(grads.b[i].iter());
            }
            out
        };
        let h = 1e-6;
        for idx in 0..net.num_params() {
            let mut plus = net.clone();
            plus.nudge(idx, h);
            let mut minus = net.clone();
            minus.nudge(idx, -h);
            let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let analytic = flat_grads[idx];
            assert!(
                (numeric - analytic).abs() <= 1e-6 * (1.0 + numeric.abs().max(analytic.abs())),
                "param {idx}: numeric {numeric} vs analytic {analytic}"
            );
        }
    }

    #[test]
    fn adam_with_zero_gradient_is_a_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut net = Mlp::new(3, 4, 2, 0.01, &mut rng);
        let before = net.flatten();
        let mut opt = Adam::new(&net, 1e-3);
        let zeros = Gradients::zeros_like(&net);
        opt.step(&mut net, &zeros);
        assert_eq!(net.flatten(), before);
    }

    #[test]
    fn global_clip_scales_to_the_requested_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = Mlp::new(2, 3, 2, 1.0, &mut rng);
        let mut g = Gradients::zeros_like(&net);
        g.w[0][(0, 0)] = 3.0;
        g.w[2][(1, 1)] = 4.0;
        let norm = clip_global_norm(&mut [&mut g], 1.0);
        assert!((norm - 5.0).abs() < 1e-12);
        let new_norm = g.squared_norm().sqrt();
        assert!((new_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flatten_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let net = Mlp::new(5, 7, 3, 0.01, &mut rng);
        let flat = net.flatten();
        let mut other = Mlp::new(5, 7, 3, 0.01, &mut rng);
        other.unflatten_into(&flat).unwrap();
        assert_eq!(net, other);
        assert!(other.unflatten_into(&flat[1..]).is_err());
    }
}
