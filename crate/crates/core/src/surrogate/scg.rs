//! Scaled conjugate gradient training (Møller's algorithm, in the form used
//! by common neural-network toolboxes). A step is taken only when it does
//! not increase the loss, so the loss sequence is non-increasing.

use super::mlp::Mlp;
use super::SurrogateError;

const SIGMA0: f64 = 1e-4;
const BETA_MIN: f64 = 1e-15;
const BETA_MAX: f64 = 1e100;

/// Paired network inputs and targets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingSet {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn push(&mut self, input: Vec<f64>, target: f64) {
        self.inputs.push(input);
        self.targets.push(target);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Loss before training followed by the loss after each cycle.
    pub losses: Vec<f64>,
    pub final_loss: f64,
}

/// `½ Σₙ (y(xₙ) − tₙ)²`.
pub fn sum_of_squares(net: &Mlp, set: &TrainingSet) -> f64 {
    0.5 * set
        .inputs
        .iter()
        .zip(&set.targets)
        .map(|(x, t)| (net.forward(x) - t).powi(2))
        .sum::<f64>()
}

fn loss_and_gradient(net: &Mlp, set: &TrainingSet) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; net.params().len()];
    let mut loss = 0.0;
    for (x, t) in set.inputs.iter().zip(&set.targets) {
        let g = net.gradient(x);
        let e = g.output - t;
        loss += 0.5 * e * e;
        for (acc, d) in grad.iter_mut().zip(&g.weights) {
            *acc += e * d;
        }
    }
    (loss, grad)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn with_params(net: &Mlp, base: &[f64], dir: &[f64], step: f64) -> Mlp {
    let mut out = net.clone();
    for ((p, b), d) in out.params_mut().iter_mut().zip(base).zip(dir) {
        *p = b + step * d;
    }
    out
}

/// Runs `cycles` scaled-conjugate-gradient iterations on the
/// sum-of-squares loss, updating `net` in place.
pub fn mlp_train(net: &mut Mlp, set: &TrainingSet, cycles: usize) -> Result<TrainOutcome, SurrogateError> {
    if set.is_empty() {
        return Err(SurrogateError::EmptyTrainingSet);
    }
    if set.inputs.iter().any(|x| x.len() != net.input_dim()) {
        return Err(SurrogateError::InputDimension {
            expected: net.input_dim(),
        });
    }
    let n_params = net.params().len();
    let (mut f_old, mut grad_new) = loss_and_gradient(net, set);
    if !f_old.is_finite() {
        return Err(SurrogateError::NonFiniteLoss { cycle: 0 });
    }
    let mut losses = vec![f_old];
    let mut grad_old = grad_new.clone();
    let mut dir: Vec<f64> = grad_new.iter().map(|g| -g).collect();
    let mut success = true;
    let mut n_success = 0;
    let mut beta = 1.0;
    let (mut mu, mut kappa, mut gamma) = (0.0, 0.0, 0.0);

    for cycle in 1..=cycles {
        if success {
            mu = dot(&dir, &grad_new);
            if mu >= 0.0 {
                dir = grad_new.iter().map(|g| -g).collect();
                mu = dot(&dir, &grad_new);
            }
            kappa = dot(&dir, &dir);
            if kappa < f64::EPSILON {
                break;
            }
            let sigma = SIGMA0 / kappa.sqrt();
            let plus = with_params(net, net.params(), &dir, sigma);
            let (_, grad_plus) = loss_and_gradient(&plus, set);
            gamma = dir
                .iter()
                .zip(grad_plus.iter().zip(&grad_new))
                .map(|(d, (gp, g))| d * (gp - g))
                .sum::<f64>()
                / sigma;
        }

        // Levenberg-Marquardt style scaling keeps the curvature positive.
        let mut theta = gamma + beta * kappa;
        if theta <= 0.0 {
            theta = beta * kappa;
            beta -= gamma / kappa;
        }
        let alpha = -mu / theta;
        let candidate = with_params(net, net.params(), &dir, alpha);
        let f_new = sum_of_squares(&candidate, set);
        // A non-finite trial point counts as a failed step.
        let delta = if f_new.is_finite() {
            2.0 * (f_new - f_old) / (alpha * mu)
        } else {
            f64::NEG_INFINITY
        };
        if delta >= 0.0 && f_new <= f_old {
            success = true;
            n_success += 1;
            *net = candidate;
            grad_old = std::mem::take(&mut grad_new);
            grad_new = loss_and_gradient(net, set).1;
            f_old = f_new;
            if !f_old.is_finite() {
                return Err(SurrogateError::NonFiniteLoss { cycle });
            }
        } else {
            success = false;
        }
        losses.push(f_old);

        if success && dot(&grad_new, &grad_new) == 0.0 {
            break;
        }
        if delta < 0.25 {
            beta = (4.0 * beta).min(BETA_MAX);
        }
        if delta > 0.75 {
            beta = (0.5 * beta).max(BETA_MIN);
        }
        if n_success == n_params {
            dir = grad_new.iter().map(|g| -g).collect();
            n_success = 0;
        } else if success {
            let g = (dot(&grad_old, &grad_new) - dot(&grad_new, &grad_new)) / mu;
            for (d, gn) in dir.iter_mut().zip(&grad_new) {
                *d = g * *d - gn;
            }
        }
    }

    Ok(TrainOutcome {
        final_loss: f_old,
        losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::rng_from_seed;
    use rand::Rng;

    #[test]
    fn memorizes_a_single_pair() {
        let mut rng = rng_from_seed(4);
        let mut net = Mlp::random(12, 8, &mut rng);
        let mut set = TrainingSet::default();
        set.push((0..12).map(|i| (i as f64 * 0.37).sin()).collect(), 1.7);
        let out = mlp_train(&mut net, &set, 200).unwrap();
        assert!(out.final_loss < 1e-10, "{}", out.final_loss);
    }

    #[test]
    fn zero_cycles_leave_net_unchanged() {
        let mut rng = rng_from_seed(5);
        let mut net = Mlp::random(3, 4, &mut rng);
        let before = net.clone();
        let mut set = TrainingSet::default();
        set.push(vec![0.1, 0.2, 0.3], 1.0);
        let out = mlp_train(&mut net, &set, 0).unwrap();
        assert_eq!(net, before);
        assert_eq!(out.losses.len(), 1);
    }

    #[test]
    fn loss_never_increases() {
        let mut rng = rng_from_seed(6);
        let mut net = Mlp::random(4, 8, &mut rng);
        let mut set = TrainingSet::default();
        for _ in 0..40 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let t = x[0] * x[1] - x[2].sin() + 0.3 * x[3] * x[3];
            set.push(x, t);
        }
        let out = mlp_train(&mut net, &set, 150).unwrap();
        for w in out.losses.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(out.final_loss < 0.1 * out.losses[0]);
    }

    #[test]
    fn empty_set_is_rejected() {
        let mut net = Mlp::zeros(2, 2);
        assert!(matches!(
            mlp_train(&mut net, &TrainingSet::default(), 5),
            Err(SurrogateError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn fits_linear_targets() {
        use nalgebra::{DMatrix, DVector};
        let mut rng = rng_from_seed(9);
        let slope: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut set = TrainingSet::default();
        for _ in 0..150 {
            let x: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
            let t = slope.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + 0.3;
            set.push(x, t);
        }
        // Least squares on [x, 1] reproduces the targets: they are representable.
        let a = DMatrix::from_fn(150, 13, |i, j| if j < 12 { set.inputs[i][j] } else { 1.0 });
        let b = DVector::from_vec(set.targets.clone());
        let coef = a.clone().svd(true, true).solve(&b, 1e-12).unwrap();
        assert!((a * coef - b).norm() < 1e-10);

        let mut net = Mlp::random(12, 8, &mut rng);
        let out = mlp_train(&mut net, &set, 200).unwrap();
        assert!(out.final_loss < 1e-4 * out.losses[0], "{} vs {}", out.final_loss, out.losses[0]);
    }
}

