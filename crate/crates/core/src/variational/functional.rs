//! The energy functionals whose critical points solve the six model equations.
//!
//! Every variant is an instance of
//! `J(u) = (1/s) ∫_R |∇ᵐu|^s dμ + (1/s) ∫_R c |u|^s dμ − ∫_R N(x, u) dμ`
//! with region `R = Ω` (Dirichlet) or `R = V` (whole graph), a potential
//! coefficient `c` (`−α`, `h` or 0) and `N(x,u) = F(x,u⁺)` for the truncated
//! variants or `F(x,u)` for the signed ones.

use serde::{Deserialize, Serialize};

use crate::calculus::{check_exponent, m_grad_norm_field, poly_pairing_representative, OperatorOrder};
use crate::error::{Error, Result};
use crate::graph::{DomainDecomposition, VertexField, WeightedGraph};
use crate::spectrum::{self, EigenConfig, EigenResult};

use super::hypotheses::{check_hypotheses, HypothesisReport};
use super::nonlinearity::{Nonlinearity, NonlinearitySpec, Sidedness};
use super::space::{AdmissibleSpace, SpaceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantKind {
    Thm1,
    Thm2,
    Thm4,
    Thm5,
    Thm6,
    Thm8,
}

impl VariantKind {
    pub const ALL: [VariantKind; 6] = [
        Self::Thm1,
        Self::Thm2,
        Self::Thm4,
        Self::Thm5,
        Self::Thm6,
        Self::Thm8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Thm1 => "thm1",
            Self::Thm2 => "thm2",
            Self::Thm4 => "thm4",
            Self::Thm5 => "thm5",
            Self::Thm6 => "thm6",
            Self::Thm8 => "thm8",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown variant `{s}`")))
    }

    /// Variants whose nonlinearity only sees `u⁺` and whose solutions are nonnegative.
    pub fn is_truncated(self) -> bool {
        matches!(self, Self::Thm1 | Self::Thm2 | Self::Thm5 | Self::Thm6)
    }

    pub fn is_dirichlet(self) -> bool {
        matches!(self, Self::Thm1 | Self::Thm2 | Self::Thm4)
    }
}

#[derive(Debug, Clone)]
pub enum Variant {
    /// `−Δu − αu = |u|^{p−2}u` in Ω°, `u = 0` on ∂Ω.
    Thm1 { alpha: f64, p: f64 },
    /// `−Δ_p u = f(x,u)` in Ω°, `u = 0` on ∂Ω.
    Thm2 { nonlinearity: NonlinearitySpec },
    /// `𝓛_{m,p} u = f(x,u)` in Ω°, `|∇ʲu| = 0` on ∂Ω for `j < m`.
    Thm4 {
        order: OperatorOrder,
        nonlinearity: NonlinearitySpec,
    },
    /// `−Δu + hu = |u|^{p−2}u` in V.
    Thm5 { h: VertexField, p: f64 },
    /// `−Δ_p u + h|u|^{p−2}u = f(x,u)` in V.
    Thm6 {
        h: VertexField,
        nonlinearity: NonlinearitySpec,
    },
    /// `𝓛_{m,p} u + h|u|^{p−2}u = f(x,u)` in V.
    Thm8 {
        h: VertexField,
        order: OperatorOrder,
        nonlinearity: NonlinearitySpec,
    },
}

impl Variant {
    pub fn kind(&self) -> VariantKind {
        match self {
            Self::Thm1 { .. } => VariantKind::Thm1,
            Self::Thm2 { .. } => VariantKind::Thm2,
            Self::Thm4 { .. } => VariantKind::Thm4,
            Self::Thm5 { .. } => VariantKind::Thm5,
            Self::Thm6 { .. } => VariantKind::Thm6,
            Self::Thm8 { .. } => VariantKind::Thm8,
        }
    }
}

/// A validated problem: graph, admissible class and variant.
#[derive(Debug, Clone)]
pub struct ProblemSpec<'g> {
    graph: &'g WeightedGraph,
    domain: Option<DomainDecomposition>,
    space: AdmissibleSpace,
    variant: Variant,
    m: usize,
    exponent: f64,
    potential: Vec<f64>,
    nonlinear: NonlinearitySpec,
    lambda1: Option<f64>,
}

fn require(cond: bool, constraint: &'static str, value: f64) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::BadExponent { constraint, value })
    }
}

fn pure_power(p: f64) -> NonlinearitySpec {
    NonlinearitySpec {
        nonlinearity: Nonlinearity::Power { q: p, scale: 1.0 },
        p: 2.0,
        q: p,
        threshold: None,
        mode: Sidedness::OneSided,
    }
}

impl<'g> ProblemSpec<'g> {
    /// Requires `p > 2` and `α < λ₁(Ω)`.
    pub fn thm1(g: &'g WeightedGraph, dom: &DomainDecomposition, alpha: f64, p: f64) -> Result<Self> {
        require(p > 2.0, "p > 2", p)?;
        let lambda1 = spectrum::lambda1(g, dom)?.value;
        if !(alpha < lambda1) {
            return Err(Error::HypothesisViolation(format!(
                "alpha {alpha} >= lambda1 {lambda1}"
            )));
        }
        let space = AdmissibleSpace::dirichlet(g, dom, 1)?;
        let potential = region_constant(&space, -alpha);
        Ok(Self {
            graph: g,
            domain: Some(dom.clone()),
            space,
            variant: Variant::Thm1 { alpha, p },
            m: 1,
            exponent: 2.0,
            potential,
            nonlinear: pure_power(p),
            lambda1: Some(lambda1),
        })
    }

    pub fn thm2(g: &'g WeightedGraph, dom: &DomainDecomposition, nl: NonlinearitySpec) -> Result<Self> {
        check_exponent(nl.p)?;
        let space = AdmissibleSpace::dirichlet(g, dom, 1)?;
        Ok(Self {
            graph: g,
            domain: Some(dom.clone()),
            potential: vec![0.0; g.len()],
            space,
            m: 1,
            exponent: nl.p,
            nonlinear: NonlinearitySpec {
                mode: Sidedness::OneSided,
                ..nl.clone()
            },
            variant: Variant::Thm2 { nonlinearity: nl },
            lambda1: None,
        })
    }

    /// Requires `m ≥ 2` and the nonlinearity exponent to match `order.p()`.
    pub fn thm4(
        g: &'g WeightedGraph,
        dom: &DomainDecomposition,
        order: OperatorOrder,
        nl: NonlinearitySpec,
    ) -> Result<Self> {
        check_order(order, &nl)?;
        let space = AdmissibleSpace::dirichlet(g, dom, order.m())?;
        Ok(Self {
            graph: g,
            domain: Some(dom.clone()),
            potential: vec![0.0; g.len()],
            space,
            m: order.m(),
            exponent: order.p(),
            nonlinear: NonlinearitySpec {
                mode: Sidedness::TwoSided,
                ..nl.clone()
            },
            variant: Variant::Thm4 {
                order,
                nonlinearity: nl,
            },
            lambda1: None,
        })
    }

    /// Requires `p > 2` and `h > 0`.
    pub fn thm5(g: &'g WeightedGraph, h: &VertexField, p: f64) -> Result<Self> {
        require(p > 2.0, "p > 2", p)?;
        let space = AdmissibleSpace::whole_graph(g, h)?;
        Ok(Self {
            graph: g,
            domain: None,
            space,
            variant: Variant::Thm5 { h: h.clone(), p },
            m: 1,
            exponent: 2.0,
            potential: h.values().to_vec(),
            nonlinear: pure_power(p),
            lambda1: None,
        })
    }

    pub fn thm6(g: &'g WeightedGraph, h: &VertexField, nl: NonlinearitySpec) -> Result<Self> {
        check_exponent(nl.p)?;
        let space = AdmissibleSpace::whole_graph(g, h)?;
        Ok(Self {
            graph: g,
            domain: None,
            space,
            m: 1,
            exponent: nl.p,
            potential: h.values().to_vec(),
            nonlinear: NonlinearitySpec {
                mode: Sidedness::OneSided,
                ..nl.clone()
            },
            variant: Variant::Thm6 {
                h: h.clone(),
                nonlinearity: nl,
            },
            lambda1: None,
        })
    }

    pub fn thm8(
        g: &'g WeightedGraph,
        h: &VertexField,
        order: OperatorOrder,
        nl: NonlinearitySpec,
    ) -> Result<Self> {
        check_order(order, &nl)?;
        let space = AdmissibleSpace::whole_graph(g, h)?;
        Ok(Self {
            graph: g,
            domain: None,
            space,
            m: order.m(),
            exponent: order.p(),
            potential: h.values().to_vec(),
            nonlinear: NonlinearitySpec {
                mode: Sidedness::TwoSided,
                ..nl.clone()
            },
            variant: Variant::Thm8 {
                h: h.clone(),
                order,
                nonlinearity: nl,
            },
            lambda1: None,
        })
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn domain(&self) -> Option<&DomainDecomposition> {
        self.domain.as_ref()
    }

    pub fn space(&self) -> &AdmissibleSpace {
        &self.space
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn kind(&self) -> VariantKind {
        self.variant.kind()
    }

    /// Derivative order and exponent of the leading term (`s = 2` for Thm1/Thm5).
    pub fn order(&self) -> OperatorOrder {
        OperatorOrder::new(self.m, self.exponent).expect("validated on construction")
    }

    /// The nonlinearity as it enters the functional.
    pub fn nonlinearity(&self) -> &NonlinearitySpec {
        &self.nonlinear
    }

    pub fn lambda1(&self) -> Option<f64> {
        self.lambda1
    }

    /// Vertices where the strong equation is posed: Ω° or V.
    pub fn equation_vertices(&self) -> Vec<usize> {
        match &self.domain {
            Some(d) => d.interior().to_vec(),
            None => (0..self.graph.len()).collect(),
        }
    }

    /// The nonlinear right-hand side at `x`: `f(x,u⁺)` or `f(x,u)`.
    pub fn rhs(&self, x: usize, u: f64) -> f64 {
        if self.kind().is_truncated() {
            self.nonlinear.f(x, u.max(0.0))
        } else {
            self.nonlinear.f(x, u)
        }
    }

    fn nonlinear_primitive(&self, x: usize, u: f64) -> f64 {
        if self.kind().is_truncated() {
            self.nonlinear.primitive(x, u.max(0.0))
        } else {
            self.nonlinear.primitive(x, u)
        }
    }

    /// Energy of an admissible field.
    pub fn energy(&self, u: &VertexField) -> Result<f64> {
        self.space.check_member(u)?;
        Ok(self.energy_of(u))
    }

    /// Energy at basis coordinates.
    pub fn energy_at(&self, coords: &[f64]) -> f64 {
        self.energy_of(&self.space.to_field(coords))
    }

    fn energy_of(&self, u: &VertexField) -> f64 {
        let g = self.graph;
        let s = self.exponent;
        let grad = m_grad_norm_field(g, u, self.m);
        let region = self.space.region();
        (0..g.len())
            .filter(|&x| region[x])
            .map(|x| {
                let quad = (grad[x].powf(s) + self.potential[x] * u[x].abs().powf(s)) / s;
                g.mu(x) * (quad - self.nonlinear_primitive(x, u[x]))
            })
            .sum()
    }

    /// μ-Riesz representative of `J′(u)` on the whole vertex set (before
    /// projection onto the admissible space).
    pub fn gradient_representative(&self, u: &VertexField) -> VertexField {
        let g = self.graph;
        let s = self.exponent;
        let region = self.space.region();
        let (mut rep, _) = poly_pairing_representative(g, region, u, self.m, s);
        for x in 0..g.len() {
            if region[x] {
                let ux = u[x];
                let pot = if ux == 0.0 {
                    0.0
                } else {
                    self.potential[x] * ux.abs().powf(s - 2.0) * ux
                };
                rep[x] += pot - self.rhs(x, ux);
            }
        }
        rep
    }

    /// `J′(u)` in basis coordinates (the Riesz representative restricted to the space).
    pub fn energy_gradient(&self, u: &VertexField) -> Result<Vec<f64>> {
        self.space.check_member(u)?;
        Ok(self.space.coords(&self.gradient_representative(u)))
    }

    pub fn gradient_at(&self, coords: &[f64]) -> Vec<f64> {
        let u = self.space.to_field(coords);
        self.space.coords(&self.gradient_representative(&u))
    }

    /// `⟨J′(u), φ⟩`.
    pub fn pairing(&self, u: &VertexField, phi: &VertexField) -> Result<f64> {
        self.space.check_member(phi)?;
        let g = self.energy_gradient(u)?;
        Ok(g.iter().zip(self.space.coords(phi)).map(|(a, b)| a * b).sum())
    }

    /// The norm the mountain-pass geometry is measured in.
    pub fn norm(&self, u: &VertexField) -> f64 {
        norm_unchecked(self.graph, &self.space, u, self.m, self.exponent)
    }

    pub fn norm_at(&self, coords: &[f64]) -> f64 {
        self.norm(&self.space.to_field(coords))
    }

    /// Coordinates of the positive seed field `u*`: the projection of the
    /// indicator of the admissible support.
    pub fn seed_direction(&self) -> Vec<f64> {
        let mut ones = VertexField::zeros(self.graph.len());
        for &x in self.space.support() {
            ones[x] = 1.0;
        }
        self.space.coords(&ones)
    }

    /// The eigenvalue the small-`t` hypothesis is compared against:
    /// λ₁(Ω), λ_p(Ω), λ_{mp}(Ω), λ₁ with potential, λ_p(V) or λ_{mp}(V).
    pub fn threshold_eigenvalue(&self, cfg: &EigenConfig) -> Result<EigenResult> {
        let g = self.graph;
        match &self.variant {
            Variant::Thm1 { .. } => spectrum::lambda1(g, self.domain.as_ref().unwrap()),
            Variant::Thm2 { nonlinearity } => spectrum::lambda_p_with(
                g,
                self.domain.as_ref().unwrap(),
                nonlinearity.p,
                cfg,
            ),
            Variant::Thm4 { order, .. } => {
                spectrum::lambda_mp_with(g, self.domain.as_ref().unwrap(), *order, cfg)
            }
            Variant::Thm5 { h, .. } => spectrum::lambda_p_v_with(g, h, 2.0, cfg),
            Variant::Thm6 { h, nonlinearity } => spectrum::lambda_p_v_with(g, h, nonlinearity.p, cfg),
            Variant::Thm8 { h, order, .. } => spectrum::lambda_mp_v_with(g, h, *order, cfg),
        }
    }

    /// Sampled hypothesis report for the variants with a general nonlinearity.
    pub fn check_hypotheses(&self, cfg: &EigenConfig) -> Result<Option<HypothesisReport>> {
        match self.kind() {
            VariantKind::Thm1 | VariantKind::Thm5 => Ok(None),
            _ => {
                let threshold = self.threshold_eigenvalue(cfg)?.value;
                Ok(Some(check_hypotheses(
                    &self.nonlinear,
                    threshold,
                    self.graph.len(),
                )))
            }
        }
    }
}

fn check_order(order: OperatorOrder, nl: &NonlinearitySpec) -> Result<()> {
    if order.m() < 2 {
        return Err(Error::BadOrder {
            min: 2,
            value: order.m(),
        });
    }
    if nl.p != order.p() {
        return Err(Error::BadExponent {
            constraint: "nonlinearity p equal to operator p",
            value: nl.p,
        });
    }
    Ok(())
}

fn region_constant(space: &AdmissibleSpace, c: f64) -> Vec<f64> {
    space
        .region()
        .iter()
        .map(|&r| if r { c } else { 0.0 })
        .collect()
}

/// `(∫_Ω |∇ᵐu|^p dμ)^{1/p}` on a Dirichlet space, `(∫_V (|∇ᵐu|^p + h|u|^p) dμ)^{1/p}`
/// on the whole graph.
pub fn norm(
    g: &WeightedGraph,
    space: &AdmissibleSpace,
    u: &VertexField,
    order: OperatorOrder,
) -> Result<f64> {
    space.check_member(u)?;
    Ok(norm_unchecked(g, space, u, order.m(), order.p()))
}

fn norm_unchecked(g: &WeightedGraph, space: &AdmissibleSpace, u: &VertexField, m: usize, p: f64) -> f64 {
    let grad = m_grad_norm_field(g, u, m);
    let region = space.region();
    let h = match space.kind() {
        SpaceKind::WholeGraph { h } => Some(h),
        SpaceKind::Dirichlet { .. } => None,
    };
    (0..g.len())
        .filter(|&x| region[x])
        .map(|x| {
            let pot = h.map_or(0.0, |h| h[x] * u[x].abs().powf(p));
            g.mu(x) * (grad[x].powf(p) + pot)
        })
        .sum::<f64>()
        .powf(1.0 / p)
}

/// `(Σ_{k=0}^m ∫_R |∇ᵏu|^p dμ)^{1/p}` over the space's region.
pub fn full_norm(g: &WeightedGraph, space: &AdmissibleSpace, u: &VertexField, order: OperatorOrder) -> Result<f64> {
    space.check_member(u)?;
    let region = space.region();
    let mut total = 0.0;
    for k in 0..=order.m() {
        let grad = m_grad_norm_field(g, u, k);
        total += (0..g.len())
            .filter(|&x| region[x])
            .map(|x| g.mu(x) * grad[x].powf(order.p()))
            .sum::<f64>();
    }
    Ok(total.powf(1.0 / order.p()))
}
