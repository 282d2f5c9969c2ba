//! Single-hidden-layer perceptron: tanh hidden units, one linear output.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// `y = w2 · tanh(W1 x + b1) + b2`.
///
/// Parameters are stored flat in the order `W1` (row-major, one row per
/// hidden unit), `b1`, `w2`, `b2`; [`Mlp::params`] and
/// [`MlpGradient::weights`] share that layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    input_dim: usize,
    hidden_units: usize,
    params: Vec<f64>,
}

/// Derivatives of the network output.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub output: f64,
    /// ∂y/∂θ in parameter order.
    pub weights: Vec<f64>,
    /// ∂y/∂x.
    pub input: Vec<f64>,
}

impl Mlp {
    pub fn n_params(input_dim: usize, hidden_units: usize) -> usize {
        hidden_units * input_dim + 2 * hidden_units + 1
    }

    pub fn zeros(input_dim: usize, hidden_units: usize) -> Self {
        Self {
            input_dim,
            hidden_units,
            params: vec![0.0; Self::n_params(input_dim, hidden_units)],
        }
    }

    /// Each layer's weights and biases drawn from `U(−1/√fan_in, 1/√fan_in)`.
    pub fn random<R: Rng + ?Sized>(input_dim: usize, hidden_units: usize, rng: &mut R) -> Self {
        let mut net = Self::zeros(input_dim, hidden_units);
        let hidden_scale = 1.0 / (input_dim as f64).sqrt();
        let output_scale = 1.0 / (hidden_units as f64).sqrt();
        let split = hidden_units * (input_dim + 1);
        for (i, p) in net.params.iter_mut().enumerate() {
            let scale = if i < split { hidden_scale } else { output_scale };
            *p = scale * (2.0 * rng.random::<f64>() - 1.0);
        }
        net
    }

    pub fn from_params(input_dim: usize, hidden_units: usize, params: Vec<f64>) -> Option<Self> {
        (params.len() == Self::n_params(input_dim, hidden_units)).then_some(Self {
            input_dim,
            hidden_units,
            params,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_units
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn w1(&self, h: usize) -> &[f64] {
        &self.params[h * self.input_dim..(h + 1) * self.input_dim]
    }

    fn b1(&self, h: usize) -> f64 {
        self.params[self.hidden_units * self.input_dim + h]
    }

    fn w2(&self, h: usize) -> f64 {
        self.params[self.hidden_units * (self.input_dim + 1) + h]
    }

    fn b2(&self) -> f64 {
        self.params[self.params.len() - 1]
    }

    fn hidden(&self, x: &[f64], h: usize) -> f64 {
        let pre: f64 = self.w1(h).iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1(h);
        pre.tanh()
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.input_dim);
        (0..self.hidden_units)
            .map(|h| self.w2(h) * self.hidden(x, h))
            .sum::<f64>()
            + self.b2()
    }

    /// Backpropagated derivatives of the output with respect to all
    /// parameters and to the input.
    pub fn gradient(&self, x: &[f64]) -> MlpGradient {
        let (d, nh) = (self.input_dim, self.hidden_units);
        let mut weights = vec![0.0; self.params.len()];
        let mut input = vec![0.0; d];
        let mut output = self.b2();
        for h in 0..nh {
            let z = self.hidden(x, h);
            let w2 = self.w2(h);
            output += w2 * z;
            // ∂y/∂pre_h
            let delta = w2 * (1.0 - z * z);
            for j in 0..d {
                weights[h * d + j] = delta * x[j];
                input[j] += delta * self.w1(h)[j];
            }
            weights[nh * d + h] = delta;
            weights[nh * (d + 1) + h] = z;
        }
        *weights.last_mut().unwrap() = 1.0;
        MlpGradient {
            output,
            weights,
            input,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::rng_from_seed;

    #[test]
    fn zero_net_outputs_output_bias() {
        let mut net = Mlp::zeros(12, 8);
        *net.params_mut().last_mut().unwrap() = 0.37;
        assert_eq!(net.forward(&[0.5; 12]), 0.37);
        let g = net.gradient(&[0.1; 12]);
        assert_eq!(*g.weights.last().unwrap(), 1.0);
        assert!(g.input.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_output_weights_give_bias_and_no_input_gradient() {
        let mut rng = rng_from_seed(3);
        let mut net = Mlp::random(12, 8, &mut rng);
        let start = 8 * 13;
        for h in 0..8 {
            net.params_mut()[start + h] = 0.0;
        }
        let b2 = *net.params().last().unwrap();
        let x: Vec<f64> = (0..12).map(|i| i as f64 / 12.0 - 0.5).collect();
        assert_eq!(net.forward(&x), b2);
        assert!(net.gradient(&x).input.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn forward_at_origin_matches_hand_computation() {
        let mut rng = rng_from_seed(17);
        let net = Mlp::random(12, 8, &mut rng);
        let p = net.params();
        let b1 = &p[96..104];
        let w2 = &p[104..112];
        let b2 = p[112];
        let expect: f64 = w2.iter().zip(b1).map(|(w, b)| w * b.tanh()).sum::<f64>() + b2;
        assert!((net.forward(&[0.0; 12]) - expect).abs() < 1e-15);
    }

    #[test]
    fn random_init_respects_fan_in_scale() {
        let mut rng = rng_from_seed(1);
        let net = Mlp::random(12, 8, &mut rng);
        let split = 8 * 13;
        assert!(net.params()[..split].iter().all(|v| v.abs() <= 1.0 / 12f64.sqrt()));
        assert!(net.params()[split..].iter().all(|v| v.abs() <= 1.0 / 8f64.sqrt()));
    }

    #[test]
    fn gradients_match_central_differences() {
        use rand::Rng;
        let mut rng = rng_from_seed(8);
        let h = 1e-5;
        for _ in 0..20 {
            let net = Mlp::random(12, 8, &mut rng);
            let x: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g = net.gradient(&x);
            for k in 0..net.params().len() {
                let (mut up, mut dn) = (net.clone(), net.clone());
                up.params_mut()[k] += h;
                dn.params_mut()[k] -= h;
                let fd = (up.forward(&x) - dn.forward(&x)) / (2.0 * h);
                assert!((fd - g.weights[k]).abs() <= 1e-6 * fd.abs().max(1.0), "param {k}");
            }
            for j in 0..12 {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[j] += h;
                xm[j] -= h;
                let fd = (net.forward(&xp) - net.forward(&xm)) / (2.0 * h);
                assert!((fd - g.input[j]).abs() <= 1e-6 * fd.abs().max(1.0), "input {j}");
            }
        }
    }
}
