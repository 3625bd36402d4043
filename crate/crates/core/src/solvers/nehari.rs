use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::VertexField;
use crate::variational::ProblemSpec;

use super::geometry::verify_geometry;
use super::newton::newton_coords;
use super::{axpy, dot, euclid, finish, Method, SolverConfig, SolverReport, TraceEntry};

/// `⟨J′(tv), v⟩`.
fn fiber_derivative(prob: &ProblemSpec, v: &[f64], t: f64) -> f64 {
    let u: Vec<f64> = v.iter().map(|x| x * t).collect();
    dot(&prob.gradient_at(&u), v)
}

/// Positive root `t` of `⟨J′(tv), tv⟩ = 0` in coordinates.
fn fiber_root(prob: &ProblemSpec, v: &[f64]) -> Result<f64> {
    let phi = |t: f64| {
        let y = fiber_derivative(prob, v, t);
        // overflow of the nonlinearity means we are past the root
        if y.is_finite() { y } else { f64::NEG_INFINITY }
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    if phi(1.0) > 0.0 {
        let mut found = false;
        for _ in 0..200 {
            hi *= 2.0;
            if phi(hi) <= 0.0 {
                found = true;
                break;
            }
            lo = hi;
        }
        if !found {
            return Err(Error::NoNehariRoot);
        }
    } else {
        let mut found = false;
        for _ in 0..200 {
            lo *= 0.5;
            if phi(lo) > 0.0 {
                found = true;
                break;
            }
            hi = lo;
        }
        if !found {
            return Err(Error::NoNehariRoot);
        }
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The scalar `t(v) > 0` putting `t·v` on the Nehari manifold.
pub fn nehari_scale(prob: &ProblemSpec, v: &VertexField) -> Result<f64> {
    prob.space().check_member(v)?;
    fiber_root(prob, &prob.space().coords(v))
}

fn unit(c: &[f64]) -> Option<Vec<f64>> {
    let n = euclid(c);
    (n > 0.0 && n.is_finite()).then(|| c.iter().map(|x| x / n).collect())
}

struct Descent {
    coords: Vec<f64>,
    level: f64,
    steps: usize,
    trace: Vec<TraceEntry>,
}

/// Minimizes `v ↦ J(t(v)v)` over the unit sphere of the coordinates.
fn descend_directions(prob: &ProblemSpec, start: Vec<f64>, cfg: &SolverConfig, offset: usize) -> Result<Descent> {
    let mut v = unit(&start).ok_or(Error::NoNehariRoot)?;
    let mut t = fiber_root(prob, &v)?;
    let mut u: Vec<f64> = v.iter().map(|x| x * t).collect();
    let mut level = prob.energy_at(&u);
    let mut trace = Vec::new();
    let mut alpha = 0.1;
    let mut steps = 0;
    while steps < cfg.max_steps {
        steps += 1;
        let grad = prob.gradient_at(&u);
        let gn = euclid(&grad);
        if gn < cfg.newton_enter.min(1e-6) {
            break;
        }
        // envelope: d/dv J(t(v) v) = t J′(tv)
        let gv: Vec<f64> = grad.iter().map(|g| g * t).collect();
        let tangent = axpy(-dot(&gv, &v), &v, &gv);
        let tn = euclid(&tangent);
        if tn <= cfg.grad_tol {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let Some(trial) = unit(&axpy(-alpha, &tangent, &v)) else {
                alpha *= 0.5;
                continue;
            };
            if let Ok(tt) = fiber_root(prob, &trial) {
                let ut: Vec<f64> = trial.iter().map(|x| x * tt).collect();
                let lt = prob.energy_at(&ut);
                if lt <= level - 1e-4 * alpha * tn * tn {
                    trace.push(TraceEntry {
                        iteration: offset + steps,
                        energy_before: level,
                        energy: lt,
                        grad_norm: gn,
                    });
                    v = trial;
                    t = tt;
                    u = ut;
                    level = lt;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        alpha *= 2.0;
    }
    Ok(Descent {
        coords: u,
        level,
        steps,
        trace,
    })
}

/// Ground-state candidate by minimizing the energy on the Nehari manifold.
pub fn nehari_solve(prob: &ProblemSpec, cfg: &SolverConfig) -> Result<SolverReport> {
    let geometry = verify_geometry(prob, cfg)?;
    let d = prob.space().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut starts = vec![prob.seed_direction()];
    for _ in 0..cfg.nehari_starts {
        starts.push((0..d).map(|_| rng.random_range(-1.0..1.0)).collect());
    }

    let mut best: Option<(f64, Vec<f64>, super::NewtonStatus, f64)> = None;
    let mut steps = 0;
    let mut trace = Vec::new();
    let mut last_err = Error::NoNehariRoot;
    for start in starts {
        let run = match descend_directions(prob, start, cfg, steps) {
            Ok(run) => run,
            Err(err) => {
                last_err = err;
                continue;
            }
        };
        steps += run.steps;
        trace.extend(run.trace);
        let out = newton_coords(prob, &run.coords, cfg);
        if !out.converged() || prob.norm_at(&out.coords) <= geometry.r {
            debug!("nehari: start discarded, newton {:?}", out.status);
            continue;
        }
        let energy = prob.energy_at(&out.coords);
        if best.as_ref().is_none_or(|b| energy < b.0) {
            best = Some((energy, out.coords, out.status, run.level));
        }
    }
    let (_, coords, status, level) = best.ok_or(last_err)?;
    finish(prob, Method::Nehari, coords, status, geometry, steps, level, trace, cfg)
}
