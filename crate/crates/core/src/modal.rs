//! Undamped modal analysis, inertance FRF synthesis and COMAC correlation.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fe::GlobalMatrices;

/// Eigenvalues below this fraction of the mean `K_ii / M_ii` ratio are rigid-body modes.
pub const RIGID_BODY_RATIO: f64 = 1e-6;

const MAX_EIGEN_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModalError {
    #[error("mass matrix is not positive definite")]
    MassNotPositiveDefinite,
    #[error("matrices must be square and equally sized")]
    Shape,
    #[error("symmetric eigen-solver did not converge on a {n}x{n} problem within {max_iterations} iterations")]
    NoConvergence { n: usize, max_iterations: usize },
    #[error("stiffness matrix is indefinite: eigenvalue {eigenvalue} below -{threshold}")]
    IndefiniteStiffness { eigenvalue: f64, threshold: f64 },
    #[error("expected {expected} rigid-body modes, found {found}")]
    RigidModeCount { expected: usize, found: usize },
    #[error("requested {requested} elastic modes but only {available} exist")]
    TooManyModes { requested: usize, available: usize },
    #[error("dof {dof} out of range (have {n_dofs})")]
    DofOutOfRange { dof: usize, n_dofs: usize },
    #[error("expected {expected} damping ratios, got {got}")]
    DampingCount { expected: usize, got: usize },
    #[error("damping ratio {value} of mode {mode} outside [0, 1)")]
    InvalidDamping { mode: usize, value: f64 },
    #[error("frequency grid value {value} must be finite and non-negative")]
    InvalidGrid { value: f64 },
    #[error("undamped mode {mode} is excited exactly at resonance ({omega} rad/s)")]
    Resonance { mode: usize, omega: f64 },
    #[error("mode-shape sets differ in shape: {a:?} vs {b:?}")]
    ComacShape { a: (usize, usize), b: (usize, usize) },
    #[error("COMAC is undefined at dof row {row}: all entries are zero")]
    ComacZeroRow { row: usize },
    #[error("cannot average an empty COMAC vector")]
    EmptyComac,
}

/// Elastic natural frequencies and mass-normalized mode shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalSolution {
    /// Natural frequencies in Hz, ascending, rigid-body modes excluded.
    pub frequencies: Vec<f64>,
    /// Column `i` is mode `i` over all DOFs, with `φᵢᵀ M φᵢ = 1`.
    pub mode_shapes: DMatrix<f64>,
    /// Number of rigid-body modes discarded.
    pub n_rigid: usize,
}

impl ModalSolution {
    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    /// Natural circular frequencies ωᵢ = 2π fᵢ.
    pub fn angular_frequencies(&self) -> Vec<f64> {
        self.frequencies.iter().map(|f| 2.0 * PI * f).collect()
    }
}

/// Solves `K φ = ω² M φ` by Cholesky reduction to a standard symmetric
/// eigenproblem, drops rigid-body modes and returns the lowest `n_modes`
/// elastic modes.
pub fn solve_modes(matrices: &GlobalMatrices, n_modes: usize) -> Result<ModalSolution, ModalError> {
    let m = &matrices.mass;
    let k = &matrices.stiffness;
    let n = m.nrows();
    if !m.is_square() || k.shape() != m.shape() || n == 0 {
        return Err(ModalError::Shape);
    }

    let chol = Cholesky::new(m.clone()).ok_or(ModalError::MassNotPositiveDefinite)?;
    let l = chol.l();
    // A = L⁻¹ K L⁻ᵀ
    let x = l
        .solve_lower_triangular(k)
        .ok_or(ModalError::MassNotPositiveDefinite)?;
    let mut a = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(ModalError::MassNotPositiveDefinite)?;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }

    let eig = SymmetricEigen::try_new(a, f64::EPSILON, MAX_EIGEN_ITERATIONS).ok_or(
        ModalError::NoConvergence {
            n,
            max_iterations: MAX_EIGEN_ITERATIONS,
        },
    )?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mean_ratio = (0..n).map(|i| k[(i, i)] / m[(i, i)]).sum::<f64>() / n as f64;
    let threshold = RIGID_BODY_RATIO * mean_ratio.abs();

    let mut n_rigid = 0;
    for &i in &order {
        let lambda = eig.eigenvalues[i];
        if lambda < -threshold {
            return Err(ModalError::IndefiniteStiffness {
                eigenvalue: lambda,
                threshold,
            });
        }
        if lambda < threshold {
            n_rigid += 1;
        }
    }
    if let Some(expected) = matrices.rigid_body_modes {
        if expected != n_rigid {
            return Err(ModalError::RigidModeCount {
                expected,
                found: n_rigid,
            });
        }
    }
    let available = n - n_rigid;
    if n_modes > available {
        return Err(ModalError::TooManyModes {
            requested: n_modes,
            available,
        });
    }

    let lt = l.transpose();
    let mut frequencies = Vec::with_capacity(n_modes);
    let mut mode_shapes = DMatrix::zeros(n, n_modes);
    for (col, &i) in order[n_rigid..n_rigid + n_modes].iter().enumerate() {
        let y: DVector<f64> = eig.eigenvectors.column(i).into_owned();
        let mut phi = lt
            .solve_upper_triangular(&y)
            .ok_or(ModalError::MassNotPositiveDefinite)?;
        apply_sign_convention(&mut phi);
        frequencies.push(eig.eigenvalues[i].sqrt() / (2.0 * PI));
        mode_shapes.set_column(col, &phi);
    }

    Ok(ModalSolution {
        frequencies,
        mode_shapes,
        n_rigid,
    })
}

/// Flips the vector so its largest-magnitude entry (first on ties) is positive.
fn apply_sign_convention(phi: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..phi.len() {
        if phi[i].abs() > phi[best].abs() {
            best = i;
        }
    }
    if phi[best] < 0.0 {
        phi.neg_mut();
    }
}

/// Inertance FRF request: acceleration at `response_dof` per force at `excitation_dof`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrfSpec {
    pub excitation_dof: usize,
    pub response_dof: usize,
    /// One damping ratio per mode in the solution.
    pub damping_ratios: Vec<f64>,
    /// Circular frequencies, rad/s.
    pub frequency_grid: Vec<f64>,
}

/// Modal-summation inertance
/// `H_kl(ω) = Σᵢ −ω² φ_kⁱ φ_lⁱ / (ωᵢ² − ω² + 2jζᵢωᵢω)`.
pub fn frf_inertance(solution: &ModalSolution, spec: &FrfSpec) -> Result<Vec<Complex64>, ModalError> {
    let n_dofs = solution.mode_shapes.nrows();
    for dof in [spec.excitation_dof, spec.response_dof] {
        if dof >= n_dofs {
            return Err(ModalError::DofOutOfRange { dof, n_dofs });
        }
    }
    let n_modes = solution.n_modes();
    if spec.damping_ratios.len() != n_modes {
        return Err(ModalError::DampingCount {
            expected: n_modes,
            got: spec.damping_ratios.len(),
        });
    }
    for (mode, &z) in spec.damping_ratios.iter().enumerate() {
        if !(0.0..1.0).contains(&z) {
            return Err(ModalError::InvalidDamping { mode, value: z });
        }
    }

    let omegas = solution.angular_frequencies();
    spec.frequency_grid
        .iter()
        .map(|&w| {
            if !(w.is_finite() && w >= 0.0) {
                return Err(ModalError::InvalidGrid { value: w });
            }
            if w == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let mut h = Complex64::new(0.0, 0.0);
            for (i, (&wi, &zeta)) in omegas.iter().zip(&spec.damping_ratios).enumerate() {
                let denom = Complex64::new(wi * wi - w * w, 2.0 * zeta * wi * w);
                if denom.re == 0.0 && denom.im == 0.0 {
                    return Err(ModalError::Resonance { mode: i, omega: w });
                }
                let num = -w * w
                    * solution.mode_shapes[(spec.excitation_dof, i)]
                    * solution.mode_shapes[(spec.response_dof, i)];
                h += num / denom;
            }
            Ok(h)
        })
        .collect()
}

/// Coordinate modal assurance criterion per measured DOF (row):
/// `(Σᵢ |aⱼᵢ bⱼᵢ|)² / (Σᵢ aⱼᵢ² · Σᵢ bⱼᵢ²)`.
pub fn comac(shapes_a: &DMatrix<f64>, shapes_b: &DMatrix<f64>) -> Result<Vec<f64>, ModalError> {
    if shapes_a.shape() != shapes_b.shape() || shapes_a.ncols() == 0 {
        return Err(ModalError::ComacShape {
            a: shapes_a.shape(),
            b: shapes_b.shape(),
        });
    }
    (0..shapes_a.nrows())
        .map(|row| {
            let a = shapes_a.row(row);
            let b = shapes_b.row(row);
            let aa = a.norm_squared();
            let bb = b.norm_squared();
            if aa == 0.0 || bb == 0.0 {
                return Err(ModalError::ComacZeroRow { row });
            }
            let cross: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x * y).abs()).sum();
            Ok((cross * cross / (aa * bb)).min(1.0))
        })
        .collect()
}

pub fn average_comac(values: &[f64]) -> Result<f64, ModalError> {
    if values.is_empty() {
        return Err(ModalError::EmptyComac);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Rows of the mode-shape matrix at `measured_dofs`, in that order.
pub fn select_measured(solution: &ModalSolution, measured_dofs: &[usize]) -> Result<DMatrix<f64>, ModalError> {
    let n_dofs = solution.mode_shapes.nrows();
    if let Some(&dof) = measured_dofs.iter().find(|&&d| d >= n_dofs) {
        return Err(ModalError::DofOutOfRange { dof, n_dofs });
    }
    Ok(solution.mode_shapes.select_rows(measured_dofs))
}
