use std::path::{Path, PathBuf};

use clap::Args;
use graph_yamabe::io::formats::{domain_hash, field_to_csv, graph_hash, parse_field_csv, trace_to_csv};
use graph_yamabe::prelude::*;
use graph_yamabe::solvers::{certify_positivity, residual, Positivity, Residual};
use graph_yamabe::spectrum::{lambda_mp_v_with, lambda_mp_with, lambda_p_v_with, lambda_p_with, sobolev_constant_with};
use graph_yamabe::variational::HypothesisReport;
use log::info;
use serde::Serialize;

use crate::output::{read, to_json, write_atomic, CliError, CliResult, ExitKind};
use crate::problem::{build, load_domain, load_graph, load_potential, MethodArg, ProblemArgs};

fn absolute(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}

fn resolve(path: &mut Option<PathBuf>) {
    if let Some(p) = path.as_mut() {
        *p = absolute(p);
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// `path(n)`, `cycle(n)`, `grid(nx,ny)`, `complete(n)` or `gnp(n,prob,seed)`.
    #[arg(long)]
    pub family: String,
    /// Vertex measure: `unit` or `degree`.
    #[arg(long, default_value = "unit")]
    pub mu: String,
    /// Edge weights: `unit` or `uniform(a,b,seed)`.
    #[arg(long, default_value = "unit")]
    pub weights: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn gen(args: &GenArgs) -> CliResult<()> {
    let family: Family = args.family.parse()?;
    let mu: MeasureRule = args.mu.parse()?;
    let w: WeightRule = args.weights.parse()?;
    let g = generate(&family, mu, &w)?;
    let mut text = g.to_spec().to_json();
    text.push('\n');
    match &args.out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Domain JSON; without it the whole-graph problem with potential h is solved.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Also compute the Sobolev constant for this q (`inf` for the sup norm).
    #[arg(long)]
    pub q: Option<f64>,
    /// Potential h as `vertex_id,value` CSV for the whole-graph problem.
    #[arg(long = "h-file")]
    pub h_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    config: &'a SpectrumConfig,
    graph_hash: String,
    domain_hash: Option<String>,
    quantity: &'static str,
    value: f64,
    certified: bool,
    restarts: usize,
    sobolev: Option<Sobolev>,
}

#[derive(Serialize)]
struct Sobolev {
    q: f64,
    constant: f64,
}

#[derive(Serialize)]
struct SpectrumConfig {
    command: &'static str,
    graph_path: PathBuf,
    domain_path: Option<PathBuf>,
    h_path: Option<PathBuf>,
    p: f64,
    m: usize,
    q: Option<f64>,
    eigen: EigenConfig,
    output_dir: PathBuf,
}

pub fn spectrum(args: &SpectrumArgs) -> CliResult<()> {
    let mut config = SpectrumConfig {
        command: "spectrum",
        graph_path: absolute(&args.graph),
        domain_path: args.domain.clone(),
        h_path: args.h_file.clone(),
        p: args.p,
        m: args.m,
        q: args.q,
        eigen: EigenConfig {
            seed: args.seed,
            ..EigenConfig::default()
        },
        output_dir: absolute(&args.out),
    };
    resolve(&mut config.domain_path);
    resolve(&mut config.h_path);
    let g = load_graph(Some(&config.graph_path))?;
    let dom = load_domain(&g, config.domain_path.as_deref())?;
    let order = OperatorOrder::new(args.m, args.p)?;
    let cfg = &config.eigen;
    let (quantity, result) = match &dom {
        Some(dom) if args.m > 1 => ("lambda_mp", lambda_mp_with(&g, dom, order, cfg)?),
        Some(dom) if args.p == 2.0 => ("lambda1", lambda_p_with(&g, dom, 2.0, cfg)?),
        Some(dom) => ("lambda_p", lambda_p_with(&g, dom, args.p, cfg)?),
        None => {
            if config.h_path.is_none() {
                return Err(CliError::usage(
                    "a Dirichlet eigenvalue needs --domain; pass --h-file for the whole-graph problem",
                ));
            }
            let h = load_potential(&g, config.h_path.as_deref())?;
            if args.m == 1 {
                ("lambda_p_v", lambda_p_v_with(&g, &h, args.p, cfg)?)
            } else {
                ("lambda_mp_v", lambda_mp_v_with(&g, &h, order, cfg)?)
            }
        }
    };
    let sobolev = match (args.q, &dom) {
        (Some(q), Some(dom)) => Some(Sobolev {
            q,
            constant: sobolev_constant_with(&g, dom, order, q, cfg)?,
        }),
        (Some(_), None) => return Err(CliError::usage("Sobolev constants need --domain")),
        (None, _) => None,
    };
    println!(
        "{quantity} = {:.16e}{}",
        result.value,
        if result.certified { " (certified)" } else { "" }
    );
    let report = SpectrumReport {
        config: &config,
        graph_hash: graph_hash(&g),
        domain_hash: dom.as_ref().map(|d| domain_hash(&g, d)),
        quantity,
        value: result.value,
        certified: result.certified,
        restarts: result.restarts,
        sobolev,
    };
    write_atomic(&args.out.join("spectrum.json"), &to_json(&report))?;
    write_atomic(&args.out.join("minimizer.csv"), &field_to_csv(&g, &result.minimizer))
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run even when a sampled hypothesis check fails.
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// The run configuration echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub problem: ProblemArgs,
    pub solver: SolverConfig,
    pub seed: u64,
    pub force: bool,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn new(command: &'static str, problem: &ProblemArgs, seed: u64, force: bool, out: &Path) -> Self {
        let mut problem = problem.clone();
        resolve(&mut problem.graph);
        resolve(&mut problem.domain);
        resolve(&mut problem.h_file);
        Self {
            command,
            problem,
            solver: SolverConfig {
                seed,
                ..SolverConfig::default()
            },
            seed,
            force,
            output_dir: absolute(out),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Solved {
    /// `verified`, or `hypotheses-unverified` when a failed check was forced through.
    pub status: &'static str,
    pub threshold_eigenvalue: f64,
    pub hypotheses: Option<HypothesisReport>,
    pub report: SolverReport,
}

/// Validates and solves one instance.
pub fn solve_instance(prob: &ProblemSpec, config: &RunConfig) -> CliResult<Solved> {
    let eigen = EigenConfig {
        seed: config.seed,
        ..EigenConfig::default()
    };
    let threshold = prob.threshold_eigenvalue(&eigen)?.value;
    let hypotheses = prob.check_hypotheses(&eigen)?;
    let mut status = "verified";
    if let Some(report) = hypotheses.as_ref().filter(|r| !r.all_passed()) {
        let failed: Vec<String> = report
            .failures()
            .iter()
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        if !config.force {
            return Err(CliError::new(
                ExitKind::Hypothesis,
                format!("hypothesis check failed: {}", failed.join("; ")),
            ));
        }
        log::warn!("hypothesis check failed, continuing under --force: {}", failed.join("; "));
        status = "hypotheses-unverified";
    }
    let report = match config.problem.method {
        MethodArg::MountainPass => mountain_pass_solve(prob, &config.solver)?,
        MethodArg::Nehari => nehari_solve(prob, &config.solver)?,
    };
    Ok(Solved {
        status,
        threshold_eigenvalue: threshold,
        hypotheses,
        report,
    })
}

#[derive(Serialize)]
struct SolveReport<'a> {
    config: &'a RunConfig,
    graph_hash: String,
    domain_hash: Option<String>,
    #[serde(flatten)]
    solved: &'a Solved,
}

pub fn solve(args: &SolveArgs) -> CliResult<()> {
    let config = RunConfig::new("solve", &args.problem, args.seed, args.force, &args.out);
    let p = &config.problem;
    let g = load_graph(p.graph.as_deref())?;
    let dom = load_domain(&g, p.domain.as_deref())?;
    let h = load_potential(&g, p.h_file.as_deref())?;
    let prob = build(p, &g, dom.as_ref(), &h)?;
    let solved = solve_instance(&prob, &config)?;
    let r = &solved.report;
    info!("solved in {} iterations, newton {:?}", r.iterations, r.newton);
    println!(
        "{}: energy {:.12e}, mp_level {:.12e}, residual {:.3e}",
        p.variant.kind().name(),
        r.energy,
        r.mp_level,
        r.residual_linf
    );
    let report = SolveReport {
        config: &config,
        graph_hash: graph_hash(&g),
        domain_hash: dom.as_ref().map(|d| domain_hash(&g, d)),
        solved: &solved,
    };
    write_atomic(&args.out.join("report.json"), &to_json(&report))?;
    write_atomic(&args.out.join("solution.csv"), &field_to_csv(&g, &r.solution))?;
    write_atomic(&args.out.join("trace.csv"), &trace_to_csv(&r.trace))
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Solution field as `vertex_id,value` CSV.
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Gate {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct CheckReport<'a> {
    config: &'a RunConfig,
    solution_path: PathBuf,
    graph_hash: String,
    passed: bool,
    gates: Vec<Gate>,
    energy: Option<f64>,
    residual: Option<Residual>,
    positivity: Option<Positivity>,
}

pub fn check(args: &CheckArgs) -> CliResult<()> {
    let config = RunConfig::new("check", &args.problem, args.seed, false, &args.out);
    let p = &config.problem;
    let g = load_graph(p.graph.as_deref())?;
    let dom = load_domain(&g, p.domain.as_deref())?;
    let h = load_potential(&g, p.h_file.as_deref())?;
    let prob = build(p, &g, dom.as_ref(), &h)?;
    let solution_path = absolute(&args.solution);
    let u = parse_field_csv(&g, &read(&solution_path)?)?;

    let mut gates = Vec::new();
    let admissible = prob.space().check_member(&u);
    gates.push(Gate {
        name: "admissible",
        passed: admissible.is_ok(),
        detail: match &admissible {
            Ok(()) => "field lies in the admissible class".into(),
            Err(e) => e.to_string(),
        },
    });
    let (mut energy, mut res, mut positivity) = (None, None, None);
    if admissible.is_ok() {
        let r = residual(&prob, &u)?;
        let relative = r.dual / (1.0 + prob.norm(&u));
        gates.push(Gate {
            name: "residual",
            passed: relative <= config.solver.residual_gate,
            detail: format!(
                "relative dual residual {:.3e} against gate {:.1e}; sup residual {:.3e}",
                relative, config.solver.residual_gate, r.linf
            ),
        });
        gates.push(Gate {
            name: "nontrivial",
            passed: u.max_abs() > 0.0,
            detail: format!("sup norm {:.6e}", u.max_abs()),
        });
        let pos = certify_positivity(&prob, &u, config.solver.pos_tol);
        if prob.kind().is_truncated() {
            let detail = match &pos.witness {
                Some(w) => format!(
                    "vanishes at `{}`, which forces zeros at {}",
                    w.start,
                    w.forced_zero.join(", ")
                ),
                None if !pos.nonneg => format!("negative part of size {:.3e}", pos.u_minus_norm),
                None => "nonnegative and strictly positive on the equation vertices".into(),
            };
            gates.push(Gate {
                name: "positivity",
                passed: pos.nonneg && pos.strictly_positive_interior,
                detail,
            });
        }
        energy = Some(prob.energy(&u)?);
        res = Some(r);
        positivity = Some(pos);
    }
    let passed = gates.iter().all(|g| g.passed);
    for gate in &gates {
        println!("{} {}: {}", if gate.passed { "pass" } else { "FAIL" }, gate.name, gate.detail);
    }
    let report = CheckReport {
        config: &config,
        solution_path,
        graph_hash: graph_hash(&g),
        passed,
        gates,
        energy,
        residual: res,
        positivity,
    };
    write_atomic(&args.out.join("check.json"), &to_json(&report))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::new(ExitKind::Solver, "verification gates failed"))
    }
}
