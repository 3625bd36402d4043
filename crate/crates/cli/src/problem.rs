use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use graph_yamabe::io::formats::{parse_domain, parse_field_csv};
use graph_yamabe::prelude::*;
use serde::Serialize;

use crate::output::{read, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Thm1,
    Thm2,
    Thm4,
    Thm5,
    Thm6,
    Thm8,
}

impl VariantArg {
    pub fn kind(self) -> VariantKind {
        match self {
            Self::Thm1 => VariantKind::Thm1,
            Self::Thm2 => VariantKind::Thm2,
            Self::Thm4 => VariantKind::Thm4,
            Self::Thm5 => VariantKind::Thm5,
            Self::Thm6 => VariantKind::Thm6,
            Self::Thm8 => VariantKind::Thm8,
        }
    }

    fn higher_order(self) -> bool {
        matches!(self, Self::Thm4 | Self::Thm8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    MountainPass,
    Nehari,
}

/// Everything that identifies a problem instance.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ProblemArgs {
    /// Graph JSON file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Domain JSON file (a list of vertex ids); required by thm1, thm2, thm4.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "thm1")]
    pub variant: VariantArg,
    /// Shift α in −Δu − αu = (u⁺)^{p−1} (thm1).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Operator exponent; defaults to 2 for thm4, thm6, thm8 and 3 otherwise.
    #[arg(long)]
    pub p: Option<f64>,
    /// Superlinearity exponent of the nonlinearity; defaults to p + 1.
    #[arg(long)]
    pub q: Option<f64>,
    /// Derivative order; defaults to 2 for thm4 and thm8, 1 otherwise.
    #[arg(long)]
    pub m: Option<usize>,
    /// Potential h as `vertex_id,value` CSV; defaults to h ≡ 1.
    #[arg(long = "h-file")]
    pub h_file: Option<PathBuf>,
    /// `power{q}`, `power{q,a}`, `exp_growth`, `exp_growth{a}` or a JSON object;
    /// defaults to `power{q}`.
    #[arg(long)]
    pub nonlinearity: Option<String>,
    #[arg(long, value_enum, default_value = "mountain-pass")]
    pub method: MethodArg,
}

impl ProblemArgs {
    pub fn p(&self) -> f64 {
        self.p.unwrap_or(match self.variant {
            VariantArg::Thm4 | VariantArg::Thm6 | VariantArg::Thm8 => 2.0,
            _ => 3.0,
        })
    }

    pub fn q(&self) -> f64 {
        self.q.unwrap_or(self.p() + 1.0)
    }

    pub fn m(&self) -> usize {
        self.m.unwrap_or(if self.variant.higher_order() { 2 } else { 1 })
    }

    fn nonlinearity_spec(&self, mode: Sidedness) -> CliResult<NonlinearitySpec> {
        let nl = match &self.nonlinearity {
            Some(text) => Nonlinearity::parse(text)?,
            None => Nonlinearity::Power {
                q: self.q(),
                scale: 1.0,
            },
        };
        Ok(NonlinearitySpec::new(nl, self.p(), self.q(), mode)?)
    }
}

pub fn load_graph(path: Option<&Path>) -> CliResult<WeightedGraph> {
    let path = path.ok_or_else(|| CliError::usage("--graph is required"))?;
    Ok(WeightedGraph::from_json(&read(path)?)?)
}

pub fn load_domain(g: &WeightedGraph, path: Option<&Path>) -> CliResult<Option<DomainDecomposition>> {
    path.map(|p| Ok(parse_domain(g, &read(p)?)?)).transpose()
}

pub fn load_potential(g: &WeightedGraph, path: Option<&Path>) -> CliResult<VertexField> {
    match path {
        Some(p) => Ok(parse_field_csv(g, &read(p)?)?),
        None => Ok(VertexField::constant(g.len(), 1.0)),
    }
}

/// Builds the problem on an already loaded graph and domain.
pub fn build<'g>(
    args: &ProblemArgs,
    g: &'g WeightedGraph,
    dom: Option<&DomainDecomposition>,
    h: &VertexField,
) -> CliResult<ProblemSpec<'g>> {
    let need_domain = || dom.ok_or_else(|| CliError::usage(format!("--domain is required for {}", args.variant.kind().name())));
    let order = || OperatorOrder::new(args.m(), args.p());
    let prob = match args.variant {
        VariantArg::Thm1 => ProblemSpec::thm1(g, need_domain()?, args.alpha, args.p())?,
        VariantArg::Thm2 => ProblemSpec::thm2(g, need_domain()?, args.nonlinearity_spec(Sidedness::OneSided)?)?,
        VariantArg::Thm4 => ProblemSpec::thm4(
            g,
            need_domain()?,
            order()?,
            args.nonlinearity_spec(Sidedness::TwoSided)?,
        )?,
        VariantArg::Thm5 => ProblemSpec::thm5(g, h, args.p())?,
        VariantArg::Thm6 => ProblemSpec::thm6(g, h, args.nonlinearity_spec(Sidedness::OneSided)?)?,
        VariantArg::Thm8 => ProblemSpec::thm8(g, h, order()?, args.nonlinearity_spec(Sidedness::TwoSided)?)?,
    };
    Ok(prob)
}
