use log::{debug, trace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::VertexField;
use crate::variational::ProblemSpec;

use super::geometry::{verify_geometry, Geometry};
use super::newton::{morse_data, newton_coords, NewtonOutcome, NewtonStatus};
use super::{axpy, dot, euclid, finish, Method, SolverConfig, SolverReport, TraceEntry};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

struct PathRun {
    coords: Vec<f64>,
    newton: NewtonStatus,
    steps: usize,
    path_max: f64,
    trace: Vec<TraceEntry>,
}

/// Point at parameter `s ∈ [−1, 1]` on the polyline `a → b → c`, with `b` at `s = 0`.
fn polyline(a: &[f64], b: &[f64], c: &[f64], s: f64) -> Vec<f64> {
    let far = if s < 0.0 { a } else { c };
    let t = s.abs();
    b.iter().zip(far).map(|(bi, fi)| bi + t * (fi - bi)).collect()
}

/// Golden-section maximization of the energy along the polyline through three nodes.
fn polyline_peak(prob: &ProblemSpec, a: &[f64], b: &[f64], c: &[f64]) -> (Vec<f64>, f64) {
    let f = |s: f64| prob.energy_at(&polyline(a, b, c, s));
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-13 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    let s = 0.5 * (lo + hi);
    let p = polyline(a, b, c, s);
    let e = prob.energy_at(&p);
    (p, e)
}

/// Redistributes interior nodes to equal spacing in the combined
/// coordinate/energy arc length.
fn regrade(prob: &ProblemSpec, nodes: &mut [Vec<f64>], energies: &mut [f64]) {
    let n = nodes.len();
    let mut cum = vec![0.0; n];
    for i in 1..n {
        let dc = euclid(&axpy(-1.0, &nodes[i - 1], &nodes[i]));
        let de = energies[i] - energies[i - 1];
        cum[i] = cum[i - 1] + (dc * dc + de * de).sqrt();
    }
    let total = cum[n - 1];
    if !(total > 0.0) {
        return;
    }
    let old = nodes.to_vec();
    let mut seg = 0;
    for j in 1..n - 1 {
        let target = total * j as f64 / (n - 1) as f64;
        while seg + 1 < n - 1 && cum[seg + 1] < target {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { (target - cum[seg]) / len } else { 0.0 };
        nodes[j] = old[seg]
            .iter()
            .zip(&old[seg + 1])
            .map(|(a, b)| a + t * (b - a))
            .collect();
        energies[j] = prob.energy_at(&nodes[j]);
    }
}

fn argmax_interior(energies: &[f64]) -> usize {
    (1..energies.len() - 1).fold(1, |best, i| if energies[i] > energies[best] { i } else { best })
}

fn acceptable(prob: &ProblemSpec, out: &NewtonOutcome, geometry: &Geometry) -> bool {
    out.converged() && prob.norm_at(&out.coords) > geometry.r && prob.energy_at(&out.coords) > 0.0
}

/// A unit direction of negative curvature at `crit` transverse to the path,
/// if the critical point has Morse index above one.
fn transverse_descent(
    prob: &ProblemSpec,
    nodes: &[Vec<f64>],
    k: usize,
    crit: &[f64],
    cfg: &SolverConfig,
) -> Option<Vec<f64>> {
    let (index, eig) = morse_data(prob, crit, cfg.fd_step);
    if index <= 1 {
        return None;
    }
    let tangent = axpy(-1.0, &nodes[k - 1], &nodes[k + 1]);
    let tn = euclid(&tangent).max(1e-300);
    let scale = eig.eigenvalues.amax().max(1.0);
    (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] < -1e-7 * scale)
        .map(|i| {
            let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let along = (dot(&v, &tangent) / tn).abs();
            (along, v)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, v)| v)
}

fn run_path(
    prob: &ProblemSpec,
    mut nodes: Vec<Vec<f64>>,
    geometry: &Geometry,
    max_steps: usize,
    cfg: &SolverConfig,
) -> Result<PathRun> {
    let mut energies: Vec<f64> = nodes.iter().map(|c| prob.energy_at(c)).collect();
    let mut trace = Vec::new();
    let mut alphas = vec![1.0f64; nodes.len()];
    let mut best_max = f64::INFINITY;
    let mut stalled = 0;
    let mut last_gn = f64::INFINITY;
    let mut deflations = 0;
    for step in 1..=max_steps {
        let k = argmax_interior(&energies);
        let (p, ep) = polyline_peak(prob, &nodes[k - 1], &nodes[k], &nodes[k + 1]);
        if ep > energies[k] {
            nodes[k] = p;
            energies[k] = ep;
        }
        let grad = prob.gradient_at(&nodes[k]);
        let gn = euclid(&grad);
        last_gn = gn;
        if gn < cfg.newton_enter || stalled >= cfg.stall_sweeps {
            let out = newton_coords(prob, &nodes[k], cfg);
            if acceptable(prob, &out, geometry) && deflations < cfg.max_deflations {
                if let Some(bend) = transverse_descent(prob, &nodes, k, &out.coords, cfg) {
                    deflations += 1;
                    debug!("mountain pass: critical point of Morse index > 1 at step {step}, bending the path");
                    let amp = 0.1 * euclid(&out.coords).max(geometry.r);
                    let n = nodes.len();
                    for (i, node) in nodes.iter_mut().enumerate().take(n - 1).skip(1) {
                        let w = amp * (std::f64::consts::PI * i as f64 / (n - 1) as f64).sin();
                        *node = axpy(w, &bend, node);
                        energies[i] = prob.energy_at(node);
                    }
                    best_max = f64::INFINITY;
                    stalled = 0;
                    continue;
                }
            }
            if acceptable(prob, &out, geometry) {
                debug!("mountain pass: newton hand-off after {step} steps, |g| = {gn:.3e}");
                return Ok(PathRun {
                    coords: out.coords,
                    newton: out.status,
                    steps: step,
                    path_max: energies[k],
                    trace,
                });
            }
            if stalled >= cfg.stall_sweeps {
                return Err(Error::StalledPath(gn));
            }
            if gn < cfg.grad_tol {
                return Ok(PathRun {
                    coords: nodes[k].clone(),
                    newton: out.status,
                    steps: step,
                    path_max: energies[k],
                    trace,
                });
            }
        }

        let before = energies[k];
        let n = nodes.len();
        let mut moved_max = false;
        for i in 1..n - 1 {
            // the unbounded-below tail would drag the path off to −∞
            if i != k && energies[i] < 0.5 * before.max(0.0) {
                continue;
            }
            // the max node descends on the full gradient, the others only across the path
            let (dir, dn) = if i == k {
                (grad.clone(), gn)
            } else {
                let gi = prob.gradient_at(&nodes[i]);
                let tau = axpy(-1.0, &nodes[i - 1], &nodes[i + 1]);
                let tn2 = dot(&tau, &tau);
                let along = if tn2 > 0.0 { dot(&gi, &tau) / tn2 } else { 0.0 };
                let perp = axpy(-along, &tau, &gi);
                let pn = euclid(&perp);
                (perp, pn)
            };
            if !(dn > 0.0) {
                continue;
            }
            let e0 = energies[i];
            if i != k {
                // a relaxed node may not jump further than half its gap to a neighbour
                let gap = euclid(&axpy(-1.0, &nodes[i - 1], &nodes[i]))
                    .min(euclid(&axpy(-1.0, &nodes[i], &nodes[i + 1])));
                alphas[i] = alphas[i].min(0.5 * gap / dn);
            }
            for _ in 0..60 {
                let trial = axpy(-alphas[i], &dir, &nodes[i]);
                let et = prob.energy_at(&trial);
                if et <= e0 - 1e-4 * alphas[i] * dn * dn {
                    nodes[i] = trial;
                    energies[i] = et;
                    alphas[i] *= 2.0;
                    moved_max |= i == k;
                    break;
                }
                alphas[i] *= 0.5;
            }
        }
        if moved_max {
            trace.push(TraceEntry {
                iteration: step,
                energy_before: before,
                energy: energies[k],
                grad_norm: gn,
            });
            trace!("step {step}: node {k} energy {before:.12e} -> {:.12e}, |g| {gn:.3e}", energies[k]);
        }
        regrade(prob, &mut nodes, &mut energies);
        // stalled: the refined peak made no real progress over a whole window
        stalled += 1;
        if stalled >= cfg.stall_sweeps
            && best_max - before > 1e-10 * (1.0 + before.abs()) {
                stalled = 0;
                best_max = before;
            }
    }
    debug!("mountain pass: step budget exhausted at |g| = {last_gn:.3e}");
    Err(Error::MaxIterations(max_steps))
}

/// Pushes `dir` outward until the energy is negative beyond radius `r`.
fn far_endpoint(prob: &ProblemSpec, dir: &[f64], r: f64) -> Option<Vec<f64>> {
    let mut t = 1.0 / euclid(dir).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let c: Vec<f64> = dir.iter().map(|v| v * t).collect();
        let energy = prob.energy_at(&c);
        if !energy.is_finite() {
            return None;
        }
        if energy < 0.0 && prob.norm_at(&c) > r {
            return Some(c);
        }
        t *= 2.0;
    }
    None
}

fn segment_peak(prob: &ProblemSpec, e: &[f64], n: usize) -> f64 {
    (1..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            prob.energy_at(&e.iter().map(|v| t * v).collect::<Vec<_>>())
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Runs the path from 0 to `e`, restarting with a perturbed path while the
/// result is the trivial critical point.
fn path_from(
    prob: &ProblemSpec,
    e: &[f64],
    geometry: &Geometry,
    rng: &mut ChaCha8Rng,
    max_steps: usize,
    cfg: &SolverConfig,
) -> Result<Option<PathRun>> {
    let n = cfg.path_nodes.max(3);
    let scale = euclid(e);
    for attempt in 0..=cfg.trivial_restarts {
        let noise: Vec<f64> = if attempt == 0 {
            vec![0.0; e.len()]
        } else {
            (0..e.len()).map(|_| rng.random_range(-0.2..0.2) * scale).collect()
        };
        let nodes: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                let bump = (std::f64::consts::PI * t).sin();
                e.iter().zip(&noise).map(|(ei, ni)| t * ei + bump * ni).collect()
            })
            .collect();
        let run = run_path(prob, nodes, geometry, max_steps, cfg)?;
        if prob.norm_at(&run.coords) > geometry.r {
            return Ok(Some(run));
        }
        debug!("mountain pass: trivial critical point on attempt {attempt}, perturbing the path");
    }
    Ok(None)
}

/// Mountain-pass critical point by deformation of discrete paths from 0.
///
/// The first path ends at the geometry endpoint. The `mp_endpoints` further
/// paths end along the candidate directions (vertex indicators and random
/// directions) whose straight segments peak lowest. The lowest critical level
/// found is returned.
pub fn mountain_pass_solve(prob: &ProblemSpec, cfg: &SolverConfig) -> Result<SolverReport> {
    let geometry = verify_geometry(prob, cfg)?;
    let d = prob.space().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for x in prob.equation_vertices() {
        let mut v = vec![0.0; prob.graph().len()];
        v[x] = 1.0;
        dirs.push(prob.space().coords(&VertexField::new(v)));
    }
    for _ in 0..4 * cfg.mp_endpoints {
        let mut dir: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        if prob.kind().is_truncated() {
            // the nonlinearity only sees u⁺, so aim into the positive part
            let field = prob.space().to_field(&dir);
            let abs: Vec<f64> = field.values().iter().map(|v| v.abs()).collect();
            dir = prob.space().coords(&VertexField::new(abs));
        }
        dirs.push(dir);
    }
    // the straight segment's peak bounds the mountain-pass level from above
    let mut ranked: Vec<(f64, Vec<f64>)> = dirs
        .iter()
        .filter_map(|dir| far_endpoint(prob, dir, geometry.r))
        .map(|e| (segment_peak(prob, &e, cfg.path_nodes.max(3)), e))
        .filter(|(peak, _)| peak.is_finite())
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ends = vec![prob.space().coords(&geometry.e)];
    ends.extend(ranked.into_iter().take(cfg.mp_endpoints).map(|(_, e)| e));

    let mut best: Option<PathRun> = None;
    let mut first_err = None;
    for (i, e) in ends.iter().enumerate() {
        // the extra endpoints only explore, so they get a tenth of the budget
        let budget = if i == 0 { cfg.max_steps } else { cfg.max_steps / 10 };
        match path_from(prob, e, &geometry, &mut rng, budget, cfg) {
            Ok(Some(run)) => {
                let level = prob.energy_at(&run.coords);
                if best.as_ref().is_none_or(|b| level < prob.energy_at(&b.coords) - cfg.energy_tol) {
                    best = Some(run);
                }
            }
            Ok(None) => {}
            Err(err) => {
                debug!("mountain pass: path failed: {err}");
                first_err.get_or_insert(err);
            }
        }
    }
    match (best, first_err) {
        (Some(run), _) => finish(
            prob,
            Method::MountainPass,
            run.coords,
            run.newton,
            geometry,
            run.steps,
            run.path_max,
            run.trace,
            cfg,
        ),
        (None, Some(err)) => Err(err),
        (None, None) => Err(Error::TrivialSolution),
    }
}
