//! Constructive solvers for the six existence results and the certificates
//! attached to their output.

mod geometry;
mod mountain_pass;
mod nehari;
mod newton;
mod positivity;
mod residual;

use serde::{Deserialize, Serialize};

use crate::graph::VertexField;

pub use geometry::{verify_geometry, Geometry};
pub use mountain_pass::mountain_pass_solve;
pub use nehari::{nehari_solve, nehari_scale};
pub use newton::{newton_refine, NewtonOutcome, NewtonStatus};
pub use positivity::{certify_positivity, Positivity, PropagationWitness};
pub use residual::{residual, Residual};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub seed: u64,
    /// Nodes on the discrete mountain-pass path, endpoints included.
    pub path_nodes: usize,
    pub grad_tol: f64,
    pub max_steps: usize,
    pub stall_sweeps: usize,
    pub newton_enter: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub fd_step: f64,
    pub pos_tol: f64,
    /// Gate on `residual_dual / (1 + ‖u‖)`.
    pub residual_gate: f64,
    pub energy_tol: f64,
    pub sphere_directions: usize,
    pub radius_start: f64,
    pub radius_budget: usize,
    /// Random restarts of the direction descent in the Nehari solver.
    pub nehari_starts: usize,
    /// Random path endpoints tried besides the geometry endpoint.
    pub mp_endpoints: usize,
    pub trivial_restarts: usize,
    /// Path bends away from critical points of Morse index above one.
    pub max_deflations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            path_nodes: 40,
            grad_tol: 1e-10,
            max_steps: 100_000,
            stall_sweeps: 100,
            newton_enter: 1e-3,
            newton_tol: 1e-12,
            newton_max_iter: 50,
            fd_step: 1e-7,
            pos_tol: 1e-10,
            residual_gate: 1e-8,
            energy_tol: 1e-10,
            sphere_directions: 64,
            radius_start: 1e-2,
            radius_budget: 60,
            nehari_starts: 4,
            mp_endpoints: 4,
            trivial_restarts: 3,
            max_deflations: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MountainPass,
    Nehari,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Energy of the iterate before and after the accepted step.
    pub energy_before: f64,
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub variant: String,
    pub method: Method,
    pub solution: VertexField,
    pub energy: f64,
    /// Critical level located by the method: the mountain-pass value or the
    /// Nehari minimum, evaluated at the refined solution.
    pub mp_level: f64,
    /// Largest node energy of the final path (mountain pass) or the best
    /// energy on the Nehari manifold before refinement.
    pub path_max: f64,
    pub norm: f64,
    pub residual_linf: f64,
    pub residual_dual: f64,
    pub iterations: usize,
    pub newton: NewtonStatus,
    /// Negative directions of the finite-difference Hessian at the solution.
    pub morse_index: usize,
    pub geometry: Geometry,
    /// Absent for the signed variants, which only claim a nontrivial solution.
    pub positivity: Option<Positivity>,
    pub trace: Vec<TraceEntry>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn euclid(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

/// Shared post-processing: positivity cleanup, residuals and the final report.
#[allow(clippy::too_many_arguments)]
pub(crate) fn finish(
    prob: &crate::variational::ProblemSpec,
    method: Method,
    coords: Vec<f64>,
    newton: NewtonStatus,
    geometry: Geometry,
    iterations: usize,
    path_max: f64,
    trace: Vec<TraceEntry>,
    cfg: &SolverConfig,
) -> crate::error::Result<SolverReport> {
    let space = prob.space();
    let mut solution = space.to_field(&coords);
    let positivity = if prob.kind().is_truncated() {
        let pos = certify_positivity(prob, &solution, cfg.pos_tol);
        if pos.u_minus_norm <= cfg.pos_tol {
            solution = solution.positive_part();
        }
        Some(pos)
    } else {
        None
    };
    let res = residual(prob, &solution)?;
    let (morse_index, _) = newton::morse_data(prob, &space.coords(&solution), cfg.fd_step);
    let energy = prob.energy(&solution)?;
    Ok(SolverReport {
        variant: prob.kind().name().to_string(),
        method,
        norm: prob.norm(&solution),
        solution,
        energy,
        mp_level: energy,
        path_max,
        residual_linf: res.linf,
        residual_dual: res.dual,
        iterations,
        newton,
        morse_index,
        geometry,
        positivity,
        trace,
    })
}
