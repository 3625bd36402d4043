use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexField;
use crate::variational::ProblemSpec;

use super::{axpy, dot, euclid, SolverConfig};

/// Mountain-pass geometry: `inf_{‖u‖=r} J > 0 = J(0) > J(e)` with `‖e‖ > r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub r: f64,
    pub sphere_inf: f64,
    pub e: VertexField,
    pub energy_e: f64,
    pub norm_e: f64,
}

fn to_sphere(prob: &ProblemSpec, c: &[f64], r: f64) -> Option<Vec<f64>> {
    let n = prob.norm_at(c);
    (n > 0.0 && n.is_finite()).then(|| c.iter().map(|v| v * r / n).collect())
}

/// Smallest energy found on `{‖u‖ = r}`: best of the random directions, then
/// projected descent from the best few.
fn sphere_infimum(prob: &ProblemSpec, r: f64, cfg: &SolverConfig) -> f64 {
    let d = prob.space().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut dirs: Vec<Vec<f64>> = vec![prob.seed_direction()];
    for _ in 0..cfg.sphere_directions {
        dirs.push((0..d).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    for dir in dirs {
        if let Some(c) = to_sphere(prob, &dir, r) {
            candidates.push((prob.energy_at(&c), c));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = candidates.first().map_or(f64::INFINITY, |c| c.0);
    for (mut e, mut c) in candidates.into_iter().take(4) {
        let mut step = r;
        for _ in 0..200 {
            let g = prob.gradient_at(&c);
            let radial = dot(&g, &c) / dot(&c, &c);
            let tangent = axpy(-radial, &c, &g);
            let tn = euclid(&tangent);
            if tn <= 1e-14 * (1.0 + e.abs()) {
                break;
            }
            let mut moved = false;
            for _ in 0..30 {
                let trial = axpy(-step / tn, &tangent, &c);
                if let Some(t) = to_sphere(prob, &trial, r) {
                    let et = prob.energy_at(&t);
                    if et < e {
                        e = et;
                        c = t;
                        moved = true;
                        step *= 1.5;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        best = best.min(e);
    }
    best
}

/// Finds the radius `r` and the far endpoint `e` of the mountain-pass geometry.
pub fn verify_geometry(prob: &ProblemSpec, cfg: &SolverConfig) -> Result<Geometry> {
    let mut r = cfg.radius_start;
    let mut found = None;
    for _ in 0..cfg.radius_budget {
        let inf = sphere_infimum(prob, r, cfg);
        if inf > 0.0 {
            found = Some((r, inf));
            break;
        }
        r *= 0.5;
    }
    let Some((r, sphere_inf)) = found else {
        return Err(Error::GeometryNotFound(format!(
            "no radius down to {r:.3e} has a positive sphere infimum"
        )));
    };

    let mut seed = prob.seed_direction();
    if euclid(&seed) == 0.0 {
        seed = vec![0.0; prob.space().dim()];
        seed[0] = 1.0;
    }
    let mut t = 1.0;
    for _ in 0..200 {
        let c: Vec<f64> = seed.iter().map(|v| v * t).collect();
        let energy = prob.energy_at(&c);
        let norm = prob.norm_at(&c);
        if !energy.is_finite() || !norm.is_finite() {
            break;
        }
        if energy < 0.0 && norm > r {
            return Ok(Geometry {
                r,
                sphere_inf,
                e: prob.space().to_field(&c),
                energy_e: energy,
                norm_e: norm,
            });
        }
        t *= 2.0;
    }
    Err(Error::GeometryNotFound(
        "energy stays nonnegative along the positive seed direction".into(),
    ))
}
