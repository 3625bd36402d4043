use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::VertexField;
use crate::variational::ProblemSpec;

use super::{euclid, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewtonStatus {
    Converged,
    /// The start was already critical to tolerance.
    AlreadyCritical,
    /// No damped step reduced the gradient; the input is returned.
    NoProgress,
    SingularJacobian,
    MaxIterations,
    NotAttempted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub coords: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
    pub status: NewtonStatus,
}

impl NewtonOutcome {
    pub fn converged(&self) -> bool {
        matches!(self.status, NewtonStatus::Converged | NewtonStatus::AlreadyCritical)
    }
}

/// Central-difference Jacobian of the coordinate gradient.
pub(crate) fn jacobian(prob: &ProblemSpec, c: &[f64], h: f64) -> DMatrix<f64> {
    let d = c.len();
    let mut jac = DMatrix::zeros(d, d);
    let mut probe = c.to_vec();
    for j in 0..d {
        let step = h * c[j].abs().max(1.0);
        probe[j] = c[j] + step;
        let plus = prob.gradient_at(&probe);
        probe[j] = c[j] - step;
        let minus = prob.gradient_at(&probe);
        probe[j] = c[j];
        for i in 0..d {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * step);
        }
    }
    jac
}

/// Number of negative eigenvalues of the symmetrized finite-difference
/// Hessian, with the eigenpairs for deflation.
pub(crate) fn morse_data(prob: &ProblemSpec, c: &[f64], h: f64) -> (usize, nalgebra::SymmetricEigen<f64, nalgebra::Dyn>) {
    let jac = jacobian(prob, c, h);
    let sym = (&jac + jac.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1.0);
    let index = eig.eigenvalues.iter().filter(|&&v| v < -1e-7 * scale).count();
    (index, eig)
}

/// Damped Newton on `J′ = 0` in basis coordinates.
pub fn newton_coords(prob: &ProblemSpec, start: &[f64], cfg: &SolverConfig) -> NewtonOutcome {
    let mut c = start.to_vec();
    let mut grad = prob.gradient_at(&c);
    let mut gnorm = euclid(&grad);
    let tol = |c: &[f64]| cfg.newton_tol * (1.0 + euclid(c));
    if gnorm <= tol(&c) {
        return NewtonOutcome {
            coords: c,
            grad_norm: gnorm,
            iterations: 0,
            status: NewtonStatus::AlreadyCritical,
        };
    }
    for it in 1..=cfg.newton_max_iter {
        let jac = jacobian(prob, &c, cfg.fd_step);
        let rhs = DVector::from_vec(grad.iter().map(|v| -v).collect());
        let step = jac.clone().lu().solve(&rhs).filter(|s| s.iter().all(|v| v.is_finite()));
        let Some(step) = step else {
            return NewtonOutcome {
                coords: start.to_vec(),
                grad_norm: euclid(&prob.gradient_at(start)),
                iterations: it,
                status: NewtonStatus::SingularJacobian,
            };
        };
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(a, s)| a + lambda * s).collect();
            let tg = prob.gradient_at(&trial);
            let tn = euclid(&tg);
            if tn.is_finite() && tn < (1.0 - 1e-4 * lambda) * gnorm {
                accepted = Some((trial, tg, tn));
                break;
            }
            lambda *= 0.5;
        }
        let Some((next, ng, nn)) = accepted else {
            return NewtonOutcome {
                coords: c,
                grad_norm: gnorm,
                iterations: it,
                status: NewtonStatus::NoProgress,
            };
        };
        c = next;
        grad = ng;
        gnorm = nn;
        if gnorm <= tol(&c) {
            return NewtonOutcome {
                coords: c,
                grad_norm: gnorm,
                iterations: it,
                status: NewtonStatus::Converged,
            };
        }
    }
    NewtonOutcome {
        coords: c,
        grad_norm: gnorm,
        iterations: cfg.newton_max_iter,
        status: NewtonStatus::MaxIterations,
    }
}

/// Newton refinement of an admissible field near a critical point.
///
/// Returns the refined field and the outcome; on a singular Jacobian the input
/// comes back unchanged.
pub fn newton_refine(
    prob: &ProblemSpec,
    u0: &VertexField,
    cfg: &SolverConfig,
) -> Result<(VertexField, NewtonOutcome)> {
    prob.space().check_member(u0)?;
    let out = newton_coords(prob, &prob.space().coords(u0), cfg);
    Ok((prob.space().to_field(&out.coords), out))
}
