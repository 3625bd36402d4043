//! Discrete differential operators on a weighted graph.
//!
//! All operators act on fields defined on the whole vertex set; boundary
//! conditions enter only through the function class a field belongs to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DomainDecomposition, VertexField, WeightedGraph};
use crate::variational::AdmissibleSpace;

/// Derivative order `m ≥ 1` and integrability exponent `p > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorOrder {
    m: usize,
    p: f64,
}

impl OperatorOrder {
    pub fn new(m: usize, p: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::BadOrder { min: 1, value: m });
        }
        check_exponent(p)?;
        Ok(Self { m, p })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::BadExponent {
            constraint: "p > 1",
            value: p,
        })
    }
}

/// `Δu(x) = (1/μ(x)) Σ_{y∼x} w_xy (u(y) − u(x))`.
pub fn laplacian(g: &WeightedGraph, u: &VertexField, x: usize) -> Result<f64> {
    g.check(x)?;
    Ok(laplacian_at(g, u, x))
}

fn laplacian_at(g: &WeightedGraph, u: &VertexField, x: usize) -> f64 {
    let ux = u[x];
    g.neighbors(x)
        .iter()
        .map(|&(y, w)| w * (u[y] - ux))
        .sum::<f64>()
        / g.mu(x)
}

/// Δu at every vertex.
pub fn laplacian_field(g: &WeightedGraph, u: &VertexField) -> VertexField {
    (0..g.len()).map(|x| laplacian_at(g, u, x)).collect::<Vec<_>>().into()
}

/// Δᵏu over the whole graph; `k = 0` returns a copy.
pub fn laplacian_power(g: &WeightedGraph, u: &VertexField, k: usize) -> VertexField {
    let mut v = u.clone();
    for _ in 0..k {
        v = laplacian_field(g, &v);
    }
    v
}

/// `Γ(u,v)(x) = (1/(2μ(x))) Σ_{y∼x} w_xy (u(y)−u(x))(v(y)−v(x))`.
pub fn gradient_form(g: &WeightedGraph, u: &VertexField, v: &VertexField, x: usize) -> Result<f64> {
    g.check(x)?;
    Ok(gradient_form_at(g, u, v, x))
}

pub(crate) fn gradient_form_at(g: &WeightedGraph, u: &VertexField, v: &VertexField, x: usize) -> f64 {
    let (ux, vx) = (u[x], v[x]);
    g.neighbors(x)
        .iter()
        .map(|&(y, w)| w * (u[y] - ux) * (v[y] - vx))
        .sum::<f64>()
        / (2.0 * g.mu(x))
}

/// `|∇u|(x) = sqrt(Γ(u,u)(x))`.
pub fn grad_norm(g: &WeightedGraph, u: &VertexField, x: usize) -> Result<f64> {
    Ok(gradient_form(g, u, u, x)?.sqrt())
}

pub fn grad_norm_field(g: &WeightedGraph, u: &VertexField) -> VertexField {
    (0..g.len())
        .map(|x| gradient_form_at(g, u, u, x).sqrt())
        .collect::<Vec<_>>()
        .into()
}

/// `|∇ᵐu|(x)`: `|Δ^{m/2}u(x)|` for even `m`, `|∇Δ^{(m−1)/2}u|(x)` for odd `m`.
pub fn m_grad_norm(g: &WeightedGraph, u: &VertexField, m: usize, x: usize) -> Result<f64> {
    g.check(x)?;
    if m == 0 {
        return Ok(u[x].abs());
    }
    let v = laplacian_power(g, u, m / 2);
    Ok(if m.is_multiple_of(2) {
        v[x].abs()
    } else {
        gradient_form_at(g, &v, &v, x).sqrt()
    })
}

/// `|∇ᵐu|` at every vertex. `m = 0` gives `|u|`.
pub fn m_grad_norm_field(g: &WeightedGraph, u: &VertexField, m: usize) -> VertexField {
    let v = laplacian_power(g, u, m / 2);
    if m.is_multiple_of(2) {
        v.map(f64::abs)
    } else {
        grad_norm_field(g, &v)
    }
}

/// Pointwise p-Laplacian
/// `Δ_p u(x) = (1/(2μ(x))) Σ_{y∼x} (|∇u|^{p−2}(y) + |∇u|^{p−2}(x)) w_xy (u(y)−u(x))`.
///
/// For `p < 2` the factor `|∇u|^{p−2}` is taken as 0 where `|∇u| = 0`.
pub fn p_laplacian(g: &WeightedGraph, u: &VertexField, p: f64, x: usize) -> Result<f64> {
    g.check(x)?;
    check_exponent(p)?;
    let factor = |y: usize| gradient_power(gradient_form_at(g, u, u, y), p).0;
    let fx = factor(x);
    let ux = u[x];
    Ok(g.neighbors(x)
        .iter()
        .map(|&(y, w)| (factor(y) + fx) * w * (u[y] - ux))
        .sum::<f64>()
        / (2.0 * g.mu(x)))
}

/// Δ_p u at every vertex, with a flag set when the `p < 2` zero convention fired.
pub fn p_laplacian_field(g: &WeightedGraph, u: &VertexField, p: f64) -> Result<(VertexField, bool)> {
    check_exponent(p)?;
    let mut degenerate = false;
    let a: Vec<f64> = (0..g.len())
        .map(|y| {
            let (v, d) = gradient_power(gradient_form_at(g, u, u, y), p);
            degenerate |= d;
            v
        })
        .collect();
    Ok((weighted_divergence(g, u, &a).scaled(-1.0), degenerate))
}

/// `|∇u|^{p−2}` from `Γ(u)`; the flag reports the `0^{p−2} := 0` convention.
pub(crate) fn gradient_power(gamma: f64, p: f64) -> (f64, bool) {
    if p == 2.0 {
        (1.0, false)
    } else if gamma <= 0.0 {
        (0.0, p < 2.0)
    } else {
        (gamma.powf(0.5 * (p - 2.0)), false)
    }
}

/// `−(1/(2μ(z))) Σ_{y∼z} w_zy (a(z) + a(y)) (v(y) − v(z))`: the μ-Riesz
/// representative of `v ↦ Σ_x μ(x) a(x) Γ(v, ·)(x)`.
pub(crate) fn weighted_divergence(g: &WeightedGraph, v: &VertexField, a: &[f64]) -> VertexField {
    (0..g.len())
        .map(|z| {
            let vz = v[z];
            -g.neighbors(z)
                .iter()
                .map(|&(y, w)| w * (a[z] + a[y]) * (v[y] - vz))
                .sum::<f64>()
                / (2.0 * g.mu(z))
        })
        .collect::<Vec<_>>()
        .into()
}

/// μ-Riesz representative on the whole vertex set of the first variation of
/// `(1/p) Σ_{x∈R} μ(x) |∇ᵐu|^p(x)`, where `R` is given by `region`.
///
/// Equivalently the field `L` with `Σ_V μ L φ` equal to the weak pairing
/// `∫_R |∇ᵐu|^{p−2} Γ(Δᵏu, Δᵏφ)` (odd `m = 2k+1`) or
/// `∫_R |∇ᵐu|^{p−2} Δᵏu Δᵏφ` (even `m = 2k`) for every φ.
pub(crate) fn poly_pairing_representative(
    g: &WeightedGraph,
    region: &[bool],
    u: &VertexField,
    m: usize,
    p: f64,
) -> (VertexField, bool) {
    let k = m / 2;
    let v = laplacian_power(g, u, k);
    let mut degenerate = false;
    let inner = if m.is_multiple_of(2) {
        (0..g.len())
            .map(|x| {
                if !region[x] {
                    return 0.0;
                }
                let (factor, d) = gradient_power(v[x] * v[x], p);
                degenerate |= d;
                factor * v[x]
            })
            .collect::<Vec<_>>()
            .into()
    } else {
        let a: Vec<f64> = (0..g.len())
            .map(|x| {
                if !region[x] {
                    return 0.0;
                }
                let (factor, d) = gradient_power(gradient_form_at(g, &v, &v, x), p);
                degenerate |= d;
                factor
            })
            .collect();
        weighted_divergence(g, &v, &a)
    };
    (laplacian_power(g, &inner, k), degenerate)
}

/// The distributional operator 𝓛_{m,p} on a Dirichlet domain, identified by
/// testing against the admissible class `C₀ᵐ(Ω)`.
///
/// Returns the field in the admissible subspace whose μ-pairing with every
/// admissible φ equals the weak form; for `m = 1` this is `−Δ_p u` on Ω°, for
/// `p = 2` it is `(−Δ)ᵐu` on the vertices carried by the admissible basis.
pub fn lmp_apply(
    g: &WeightedGraph,
    dom: &DomainDecomposition,
    u: &VertexField,
    order: OperatorOrder,
) -> Result<VertexField> {
    let space = AdmissibleSpace::dirichlet(g, dom, order.m())?;
    space.check_member(u)?;
    let (rep, _) = poly_pairing_representative(g, dom.omega_mask(), u, order.m(), order.p());
    Ok(space.project_field(&rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeSpec, GraphSpec, VertexSpec};
    use approx::assert_relative_eq;

    fn path(n: usize) -> WeightedGraph {
        let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        WeightedGraph::build(&GraphSpec {
            vertices: ids
                .iter()
                .map(|id| VertexSpec {
                    id: id.clone(),
                    mu: 1.0,
                })
                .collect(),
            edges: ids
                .windows(2)
                .map(|w| EdgeSpec {
                    u: w[0].clone(),
                    v: w[1].clone(),
                    w: 1.0,
                })
                .collect(),
        })
        .unwrap()
    }

    #[test]
    fn laplacian_of_bump() {
        let g = path(3);
        let u = VertexField::new(vec![0.0, 1.0, 0.0]);
        assert_eq!(laplacian(&g, &u, 1).unwrap(), -2.0);
        assert_eq!(laplacian(&g, &u, 0).unwrap(), 1.0);
        let c = VertexField::constant(3, 4.2);
        assert!(laplacian_field(&g, &c).values().iter().all(|&v| v == 0.0));
        assert!(laplacian(&g, &u, 3).is_err());
    }

    #[test]
    fn gradient_form_and_norm() {
        let g = path(3);
        let u = VertexField::new(vec![0.0, 1.0, 0.0]);
        assert_eq!(gradient_form(&g, &u, &u, 1).unwrap(), 1.0);
        assert_eq!(
            gradient_form(&g, &u, &VertexField::constant(3, 2.0), 1).unwrap(),
            0.0
        );
        assert_eq!(grad_norm(&g, &u, 1).unwrap(), 1.0);
        assert_relative_eq!(grad_norm(&g, &u, 0).unwrap(), 0.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn higher_order_gradients_of_delta() {
        let g = path(5);
        let u = VertexField::delta(5, 2);
        assert_eq!(m_grad_norm(&g, &u, 2, 2).unwrap(), 2.0);
        assert_relative_eq!(m_grad_norm(&g, &u, 3, 2).unwrap(), 3.0, epsilon = 1e-14);
        assert_eq!(m_grad_norm_field(&g, &u, 3)[2], m_grad_norm(&g, &u, 3, 2).unwrap());
        assert_eq!(
            m_grad_norm(&g, &u, 1, 1).unwrap(),
            grad_norm(&g, &u, 1).unwrap()
        );
    }

    #[test]
    fn p_laplacian_of_bump() {
        let g = path(5);
        let u = VertexField::delta(5, 2);
        assert_relative_eq!(
            p_laplacian(&g, &u, 3.0, 2).unwrap(),
            -(1.0 + 1.0 / 2f64.sqrt()),
            epsilon = 1e-12
        );
        let c = VertexField::constant(5, 1.0);
        assert_eq!(p_laplacian(&g, &c, 3.0, 2).unwrap(), 0.0);
        assert!(p_laplacian(&g, &u, 1.0, 2).is_err());
    }

    #[test]
    fn degenerate_flag_for_small_p() {
        let g = path(5);
        let u = VertexField::delta(5, 2);
        let (_, degenerate) = p_laplacian_field(&g, &u, 1.5).unwrap();
        assert!(degenerate);
        let (_, degenerate) = p_laplacian_field(&g, &u, 3.0).unwrap();
        assert!(!degenerate);
    }

    #[test]
    fn operator_order_validation() {
        assert!(OperatorOrder::new(0, 2.0).is_err());
        assert!(OperatorOrder::new(1, 1.0).is_err());
        assert!(OperatorOrder::new(2, 1.5).is_ok());
    }
}
