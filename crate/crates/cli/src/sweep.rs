use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use graph_yamabe::prelude::*;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{solve_instance, RunConfig};
use crate::output::{read, to_json, write_atomic, CliError, CliResult};
use crate::problem::{build, load_domain, load_graph, load_potential, ProblemArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Alpha,
    P,
    Size,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Self::Alpha => "alpha",
            Self::P => "p",
            Self::Size => "size",
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "range")]
    pub values: Option<Vec<f64>>,
    /// `start:stop:step`, stop included up to rounding.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Family for the size axis; `{n}` is replaced by the size, otherwise
    /// `(n)` is appended (`path`, `cycle`, `complete`, `gnp({n},0.3,7)`).
    #[arg(long, default_value = "path")]
    pub family: String,
    #[arg(long, default_value = "unit")]
    pub mu: String,
    #[arg(long, default_value = "unit")]
    pub weights: String,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub axis: String,
    pub value: f64,
    pub lambda: Option<f64>,
    pub energy: Option<f64>,
    pub mp_level: Option<f64>,
    pub solution_max: Option<f64>,
    pub residual_linf: Option<f64>,
    pub iterations: Option<usize>,
    pub wall_time_s: f64,
    pub status: String,
    pub error: Option<String>,
}

pub fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::usage(format!("malformed range `{text}`")))?;
    let [start, stop, step] = nums[..] else {
        return Err(CliError::usage(format!("range `{text}` must be start:stop:step")));
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::usage(format!("range `{text}` needs finite bounds and a positive step")));
    }
    let mut out = Vec::new();
    let mut i = 0usize;
    loop {
        let v = start + i as f64 * step;
        if v > stop + 1e-9 * step {
            break;
        }
        out.push(v);
        i += 1;
    }
    Ok(out)
}

fn size_family(template: &str, n: f64) -> CliResult<Family> {
    if n.fract() != 0.0 || n < 1.0 {
        return Err(CliError::usage(format!("size {n} is not a positive integer")));
    }
    let n = n as usize;
    let text = if template.contains("{n}") {
        template.replace("{n}", &n.to_string())
    } else {
        format!("{template}({n})")
    };
    Ok(text.parse()?)
}

struct Point {
    problem: ProblemArgs,
    graph: Option<WeightedGraph>,
}

fn run_point(args: &SweepArgs, index: usize, value: f64) -> PointRecord {
    let start = Instant::now();
    let mut record = PointRecord {
        index,
        axis: args.axis.name().to_string(),
        value,
        lambda: None,
        energy: None,
        mp_level: None,
        solution_max: None,
        residual_linf: None,
        iterations: None,
        wall_time_s: 0.0,
        status: "error".into(),
        error: None,
    };
    let outcome = (|| -> CliResult<()> {
        let point = prepare(args, value)?;
        let config = RunConfig::new("sweep", &point.problem, args.seed, args.force, &args.out);
        let p = &config.problem;
        let g = match point.graph {
            Some(g) => g,
            None => load_graph(p.graph.as_deref())?,
        };
        let dom = match (&p.domain, args.axis) {
            (_, Axis::Size) if p.variant.kind().is_dirichlet() => {
                let omega: Vec<usize> = (1..g.len().saturating_sub(1)).collect();
                Some(DomainDecomposition::new(&g, &omega)?)
            }
            (path, _) => load_domain(&g, path.as_deref())?,
        };
        let h = match args.axis {
            Axis::Size => VertexField::constant(g.len(), 1.0),
            _ => load_potential(&g, p.h_file.as_deref())?,
        };
        let prob = build(p, &g, dom.as_ref(), &h)?;
        let solved = solve_instance(&prob, &config)?;
        let r = &solved.report;
        record.lambda = Some(solved.threshold_eigenvalue);
        record.energy = Some(r.energy);
        record.mp_level = Some(r.mp_level);
        record.solution_max = Some(r.solution.values().iter().copied().fold(f64::NEG_INFINITY, f64::max));
        record.residual_linf = Some(r.residual_linf);
        record.iterations = Some(r.iterations);
        record.status = solved.status.to_string();
        Ok(())
    })();
    if let Err(e) = outcome {
        log::warn!("sweep point {index} ({value}) failed: {e}");
        record.status = format!("error-{}", e.kind as i32);
        record.error = Some(e.message);
    }
    record.wall_time_s = start.elapsed().as_secs_f64();
    record
}

fn prepare(args: &SweepArgs, value: f64) -> CliResult<Point> {
    let mut problem = args.problem.clone();
    let mut graph = None;
    match args.axis {
        Axis::Alpha => problem.alpha = value,
        Axis::P => problem.p = Some(value),
        Axis::Size => {
            let family = size_family(&args.family, value)?;
            graph = Some(generate(&family, args.mu.parse()?, &args.weights.parse()?)?);
        }
    }
    Ok(Point { problem, graph })
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let values = match (&args.values, &args.range) {
        (Some(v), None) => v.clone(),
        (None, Some(r)) => parse_range(r)?,
        _ => return Err(CliError::usage("pass exactly one of --values and --range")),
    };
    if args.axis != Axis::Size && args.problem.graph.is_none() {
        return Err(CliError::usage("--graph is required"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::io(format!("cannot start the worker pool: {e}")))?;
    let points_dir = args.out.join("points");
    let written: Vec<CliResult<PathBuf>> = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| {
                let record = run_point(args, i, v);
                let path = points_dir.join(format!("point_{i:05}.json"));
                write_atomic(&path, &to_json(&record))?;
                Ok(path)
            })
            .collect()
    });

    let mut records = Vec::with_capacity(values.len());
    for path in written {
        let text = read(&path?)?;
        let record: PointRecord =
            serde_json::from_str(&text).map_err(|e| CliError::io(format!("corrupt point file: {e}")))?;
        records.push(record);
    }
    records.sort_by_key(|r| r.index);

    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record([
        "index",
        "axis",
        "value",
        "lambda",
        "energy",
        "mp_level",
        "solution_max",
        "residual_linf",
        "iterations",
        "wall_time_s",
        "status",
        "error",
    ])
    .and_then(|_| records.iter().try_for_each(|r| w.serialize(r)))
    .map_err(|e| CliError::io(format!("cannot format sweep.csv: {e}")))?;
    let bytes = w.into_inner().map_err(|e| CliError::io(e.to_string()))?;
    write_atomic(&args.out.join("sweep.csv"), &String::from_utf8_lossy(&bytes))?;

    let failed = records.iter().filter(|r| r.error.is_some()).count();
    println!("{} points, {failed} failed", records.len());
    Ok(())
}
