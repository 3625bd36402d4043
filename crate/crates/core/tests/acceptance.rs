//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use graph_yamabe::calculus::{gradient_form, grad_norm, laplacian, lmp_apply, p_laplacian};
use graph_yamabe::graph::integrate;
use graph_yamabe::prelude::*;
use graph_yamabe::spectrum::sobolev_constant;
use rand::Rng;

use common::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn closed_form_family() -> Outcome {
    let (g, dom) = toy();
    let cfg = SolverConfig::default();
    let mut worst_err = 0.0f64;
    let mut worst_res = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut failures = Vec::new();
    for alpha in [0.0, 0.5, 1.0, 1.5, 1.9] {
        for p in [2.5, 3.0, 4.0, 6.0] {
            let start = Instant::now();
            let solved = ProblemSpec::thm1(&g, &dom, alpha, p).and_then(|prob| mountain_pass_solve(&prob, &cfg));
            let elapsed = start.elapsed();
            slowest = slowest.max(elapsed);
            let report = match solved {
                Ok(r) => r,
                Err(e) => {
                    failures.push(format!("(α={alpha}, p={p}): {e}"));
                    continue;
                }
            };
            let expected = (2.0f64 - alpha).powf(1.0 / (p - 2.0));
            let err = (report.solution[2] - expected).abs();
            worst_err = worst_err.max(err);
            worst_res = worst_res.max(report.residual_linf);
            let positive = report
                .positivity
                .as_ref()
                .is_some_and(|pos| pos.nonneg && pos.strictly_positive_interior);
            if err > 1e-8 || report.residual_linf > 1e-10 || !positive || elapsed >= Duration::from_secs(1) {
                failures.push(format!(
                    "(α={alpha}, p={p}): err {err:.2e}, residual {:.2e}, positive {positive}, {elapsed:?}",
                    report.residual_linf
                ));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "20 points, max |u(c) − (2−α)^(1/(p−2))| = {worst_err:.2e}, max residual {worst_res:.2e}, slowest {slowest:?}{}",
            fmt_failures(&failures)
        ),
    )
}

fn eigenvalue_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(2024);
    let mut worst = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut failures = Vec::new();
    let mut done = 0;
    while done < 50 {
        let g = random_graph(&mut rng, 60);
        let Some(dom) = random_domain(&mut rng, &g) else {
            continue;
        };
        done += 1;
        let oracle = dirichlet_oracle(&g, &dom);
        let l1 = match lambda1(&g, &dom) {
            Ok(r) => r.value,
            Err(e) => {
                failures.push(format!("graph {done}: {e}"));
                continue;
            }
        };
        let lp = lambda_p(&g, &dom, 2.0).map(|r| r.value).unwrap_or(f64::NAN);
        let rel = (l1 - oracle).abs() / oracle.abs();
        let rel_p = (lp - l1).abs() / l1.abs();
        worst = worst.max(rel);
        worst_p = worst_p.max(rel_p);
        if !(rel <= 1e-10) || !(rel_p <= 1e-10) {
            failures.push(format!("graph {done} (n = {}): rel {rel:.2e}, p=2 rel {rel_p:.2e}", g.len()));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "50 graphs, max rel err vs Jacobi oracle {worst:.2e}, lambda_p(2) vs lambda1 {worst_p:.2e}, {elapsed:?}{}",
            fmt_failures(&failures)
        ),
    )
}

fn gradient_check(graphs: &SmokeGraphs) -> Outcome {
    let start = Instant::now();
    let mut rng = rng(99);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (kind, _, prob) in graphs.instances() {
        let d = prob.space().dim();
        for pair in 0..200 {
            let cu: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let cphi: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let u = prob.space().to_field(&cu);
            let phi = prob.space().to_field(&cphi);
            let analytic = prob.pairing(&u, &phi).unwrap();
            let h = 1e-5;
            let plus = prob.energy(&u.add(&phi.scaled(h))).unwrap();
            let minus = prob.energy(&u.sub(&phi.scaled(h))).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            // relative to the Cauchy–Schwarz bound on the pairing
            let grad = prob.gradient_at(&cu);
            let scale = norm2(&grad) * norm2(&cphi);
            let rel = (fd - analytic).abs() / scale.max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            if !(rel <= 1e-6) {
                failures.push(format!("{} pair {pair}: rel {rel:.2e}", kind.name()));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "6 variants × 200 pairs, max rel err {worst:.2e}, {elapsed:?}{}",
            fmt_failures(&failures)
        ),
    )
}

fn calculus_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(7);
    let mut worst_green = 0.0f64;
    let mut worst_pos = f64::NEG_INFINITY;
    let mut worst_neg = f64::NEG_INFINITY;
    let mut worst_plap = 0.0f64;
    let mut failures = Vec::new();
    let mut fields = 0;
    while fields < 1000 {
        let g = random_graph(&mut rng, 30);
        let Some(dom) = random_domain(&mut rng, &g) else {
            continue;
        };
        let all: Vec<usize> = (0..g.len()).collect();
        for _ in 0..20 {
            fields += 1;
            let u = random_field(&mut rng, g.len(), 1.0);
            let v = random_field(&mut rng, g.len(), 1.0);
            let gamma = VertexField::new((0..g.len()).map(|x| gradient_form(&g, &u, &v, x).unwrap()).collect());
            let v_lap = VertexField::new((0..g.len()).map(|x| v[x] * laplacian(&g, &u, x).unwrap()).collect());
            let green = integrate(&g, &all, &gamma).unwrap() + integrate(&g, &all, &v_lap).unwrap();
            worst_green = worst_green.max(green.abs());

            let (up, un) = (u.positive_part(), u.negative_part());
            for x in 0..g.len() {
                worst_pos = worst_pos.max(grad_norm(&g, &up, x).unwrap() - grad_norm(&g, &u, x).unwrap());
                let gn = grad_norm(&g, &un, x).unwrap();
                worst_neg = worst_neg.max(gn * gn - gradient_form(&g, &un, &u, x).unwrap());
            }

            let p = rng.random_range(1.5..4.0);
            let w = random_interior_field(&mut rng, &g, &dom);
            let order = OperatorOrder::new(1, p).unwrap();
            let weak = lmp_apply(&g, &dom, &w, order).unwrap();
            for &x in dom.interior() {
                let strong = -p_laplacian(&g, &w, p, x).unwrap();
                worst_plap = worst_plap.max((weak[x] - strong).abs());
            }
        }
    }
    if worst_green > 1e-12 {
        failures.push("Green's identity".to_string());
    }
    if worst_pos > 1e-12 {
        failures.push("|∇u⁺| ≤ |∇u|".to_string());
    }
    if worst_neg > 1e-12 {
        failures.push("Γ(u⁻,u) ≥ |∇u⁻|²".to_string());
    }
    if worst_plap > 1e-8 {
        failures.push("p-Laplacian vs weak operator".to_string());
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "{fields} fields, Green {worst_green:.2e}, positive-part excess {worst_pos:.2e}, negative-part excess {worst_neg:.2e}, p-Laplacian {worst_plap:.2e}, {elapsed:?}{}",
            fmt_failures(&failures)
        ),
    )
}

fn smoke_reports(graphs: &SmokeGraphs) -> (Vec<(VariantKind, bool, Result<SolverReport>, Duration)>, Vec<String>) {
    let cfg = SolverConfig::default();
    let mut runs = Vec::new();
    let mut json = Vec::new();
    for (kind, pure, prob) in graphs.instances() {
        let start = Instant::now();
        let report = mountain_pass_solve(&prob, &cfg);
        let elapsed = start.elapsed();
        json.push(match &report {
            Ok(r) => serde_json::to_string(r).unwrap(),
            Err(e) => format!("error: {e}"),
        });
        runs.push((kind, pure, report, elapsed));
    }
    (runs, json)
}

fn smoke(runs: &[(VariantKind, bool, Result<SolverReport>, Duration)]) -> Outcome {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for (kind, _, report, elapsed) in runs {
        let report = match report {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{}: {e}", kind.name()));
                continue;
            }
        };
        let nontrivial = report.solution.max_abs() > 0.0;
        let mut ok = nontrivial && report.residual_dual <= 1e-8 && report.mp_level > 0.0;
        if kind.is_truncated() {
            ok &= report
                .positivity
                .as_ref()
                .is_some_and(|p| p.nonneg && p.strictly_positive_interior);
        }
        ok &= *elapsed < Duration::from_secs(60);
        lines.push(format!(
            "{} level {:.6e} dual {:.1e} {elapsed:.2?}",
            kind.name(),
            report.mp_level,
            report.residual_dual
        ));
        if !ok {
            failures.push(kind.name().to_string());
        }
    }
    outcome(
        failures.is_empty(),
        format!("{}{}", lines.join("; "), fmt_failures(&failures)),
    )
}

fn cross_check(graphs: &SmokeGraphs, runs: &[(VariantKind, bool, Result<SolverReport>, Duration)]) -> Outcome {
    let cfg = SolverConfig::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for ((kind, pure, prob), (_, _, mp, _)) in graphs.instances().into_iter().zip(runs) {
        if !pure {
            continue;
        }
        checked += 1;
        let (Ok(mp), Ok(ne)) = (mp, nehari_solve(&prob, &cfg)) else {
            failures.push(format!("{}: a solver failed", kind.name()));
            continue;
        };
        let rel = (mp.energy - ne.energy).abs() / ne.energy.abs();
        worst = worst.max(rel);
        if !(rel <= 1e-6) {
            failures.push(format!("{}: MP {:.10e} vs Nehari {:.10e}", kind.name(), mp.energy, ne.energy));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} pure-power instances, max rel gap {worst:.2e}{}",
            fmt_failures(&failures)
        ),
    )
}

fn sobolev() -> Outcome {
    let mut rng = rng(31);
    let mut worst = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut failures = Vec::new();
    let order = OperatorOrder::new(1, 2.0).unwrap();
    let mut done = 0;
    while done < 20 {
        let g = random_graph(&mut rng, 40);
        let Some(dom) = random_domain(&mut rng, &g) else {
            continue;
        };
        done += 1;
        let oracle = dirichlet_oracle(&g, &dom).powf(-0.5);
        let c2 = sobolev_constant(&g, &dom, order, 2.0).unwrap_or(f64::NAN);
        let rel = (c2 - oracle).abs() / oracle;
        worst = worst.max(rel);
        if !(rel <= 1e-10) {
            failures.push(format!("domain {done}: q=2 rel {rel:.2e}"));
        }
        let cinf = sobolev_constant(&g, &dom, order, f64::INFINITY).unwrap_or(f64::NAN);
        for _ in 0..1000 {
            let u = random_interior_field(&mut rng, &g, &dom);
            let grad = dirichlet_energy(&g, &u).sqrt();
            if grad == 0.0 {
                continue;
            }
            let ratio = u.max_abs() / (cinf * grad);
            worst_ratio = worst_ratio.max(ratio);
        }
        if !(worst_ratio <= 1.0 + 1e-12) {
            failures.push(format!("domain {done}: sup-norm inequality ratio {worst_ratio:.6}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "20 domains, q=2 rel err vs λ₁^(-1/2) {worst:.2e}, max ‖u‖∞/(C‖∇u‖₂) {worst_ratio:.6}{}",
            fmt_failures(&failures)
        ),
    )
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn fmt_failures(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!(" | failed: {}", failures.join(", "))
    }
}

fn main() -> ExitCode {
    let graphs = SmokeGraphs::new();
    let (runs, first) = smoke_reports(&graphs);
    let (_, second) = smoke_reports(&graphs);
    let identical = first == second;
    let results = [
        ("closed-form family", closed_form_family()),
        ("eigenvalue oracle", eigenvalue_oracle()),
        ("gradient vs finite differences", gradient_check(&graphs)),
        ("calculus identities", calculus_identities()),
        ("smoke instances", smoke(&runs)),
        ("mountain pass vs Nehari", cross_check(&graphs, &runs)),
        ("Sobolev constants", sobolev()),
        (
            "determinism",
            outcome(
                identical,
                format!("{} report JSON documents byte-identical: {identical}", first.len()),
            ),
        ),
    ];

    let mut all = true;
    for (i, (name, out)) in results.iter().enumerate() {
        all &= out.passed;
        println!(
            "{} criterion {}: {name}: {}",
            if out.passed { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
