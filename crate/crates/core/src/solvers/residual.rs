use serde::{Deserialize, Serialize};

use crate::calculus::{laplacian_field, p_laplacian_field, poly_pairing_representative};
use crate::error::Result;
use crate::graph::VertexField;
use crate::variational::{ProblemSpec, Variant};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// Left minus right side of the strong equation on Ω° (or V), zero elsewhere.
    pub field: VertexField,
    pub linf: f64,
    /// μ-norm of the projection of `field` onto the admissible space.
    pub dual: f64,
}

fn signed_power(t: f64, e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(e)
    }
}

pub fn residual(prob: &ProblemSpec, u: &VertexField) -> Result<Residual> {
    let space = prob.space();
    space.check_member(u)?;
    let g = prob.graph();
    let n = g.len();
    let lhs: VertexField = match prob.variant() {
        Variant::Thm1 { alpha, .. } => {
            let lap = laplacian_field(g, u);
            (0..n).map(|x| -lap[x] - alpha * u[x]).collect::<Vec<_>>().into()
        }
        Variant::Thm5 { h, .. } => {
            let lap = laplacian_field(g, u);
            (0..n).map(|x| -lap[x] + h[x] * u[x]).collect::<Vec<_>>().into()
        }
        Variant::Thm2 { nonlinearity } => p_laplacian_field(g, u, nonlinearity.p)?.0.scaled(-1.0),
        Variant::Thm6 { h, nonlinearity } => {
            let p = nonlinearity.p;
            let lap = p_laplacian_field(g, u, p)?.0;
            (0..n)
                .map(|x| -lap[x] + h[x] * signed_power(u[x], p - 1.0))
                .collect::<Vec<_>>()
                .into()
        }
        Variant::Thm4 { order, .. } => {
            poly_pairing_representative(g, space.region(), u, order.m(), order.p()).0
        }
        Variant::Thm8 { h, order, .. } => {
            let (rep, _) = poly_pairing_representative(g, space.region(), u, order.m(), order.p());
            (0..n)
                .map(|x| rep[x] + h[x] * signed_power(u[x], order.p() - 1.0))
                .collect::<Vec<_>>()
                .into()
        }
    };
    let mut field = VertexField::zeros(n);
    for x in prob.equation_vertices() {
        field[x] = lhs[x] - prob.rhs(x, u[x]);
    }
    let dual = space.coords(&field).iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(Residual {
        linf: field.max_abs(),
        dual,
        field,
    })
}
