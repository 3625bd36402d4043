//! First eigenvalues of the Dirichlet and whole-graph quotients, and best
//! Sobolev constants.
//!
//! For `p = 2` the quotient is a quadratic form on the admissible basis and is
//! solved exactly. Otherwise the quotient is minimized by multi-start gradient
//! descent on the sphere `∫|u|^p dμ = 1`, and the result is an upper bound.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::{check_exponent, m_grad_norm_field, poly_pairing_representative, OperatorOrder};
use crate::error::{Error, Result};
use crate::graph::{DomainDecomposition, VertexField, WeightedGraph};
use crate::variational::AdmissibleSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub value: f64,
    /// Normalized to `∫|u|^p dμ = 1` over the integration region.
    pub minimizer: VertexField,
    /// True only for the exact `p = 2` path.
    pub certified: bool,
    pub restarts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once the coordinate gradient of the quotient is this small.
    pub grad_tol: f64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0,
            max_iter: 20_000,
            grad_tol: 1e-11,
        }
    }
}

pub fn lambda1(g: &WeightedGraph, dom: &DomainDecomposition) -> Result<EigenResult> {
    if dom.interior().is_empty() {
        return Err(Error::EmptyInterior);
    }
    let space = AdmissibleSpace::dirichlet(g, dom, 1)?;
    exact(g, &space, 1)
}

pub fn lambda_p(g: &WeightedGraph, dom: &DomainDecomposition, p: f64) -> Result<EigenResult> {
    lambda_p_with(g, dom, p, &EigenConfig::default())
}

pub fn lambda_p_with(
    g: &WeightedGraph,
    dom: &DomainDecomposition,
    p: f64,
    cfg: &EigenConfig,
) -> Result<EigenResult> {
    check_exponent(p)?;
    if p == 2.0 {
        return lambda1(g, dom);
    }
    if dom.interior().is_empty() {
        return Err(Error::EmptyInterior);
    }
    let space = AdmissibleSpace::dirichlet(g, dom, 1)?;
    multistart(g, &space, 1, p, cfg)
}

pub fn lambda_mp(g: &WeightedGraph, dom: &DomainDecomposition, order: OperatorOrder) -> Result<EigenResult> {
    lambda_mp_with(g, dom, order, &EigenConfig::default())
}

pub fn lambda_mp_with(
    g: &WeightedGraph,
    dom: &DomainDecomposition,
    order: OperatorOrder,
    cfg: &EigenConfig,
) -> Result<EigenResult> {
    if order.m() == 1 {
        return lambda_p_with(g, dom, order.p(), cfg);
    }
    let space = AdmissibleSpace::dirichlet(g, dom, order.m())?;
    if order.p() == 2.0 {
        exact(g, &space, order.m())
    } else {
        multistart(g, &space, order.m(), order.p(), cfg)
    }
}

pub fn lambda_p_v(g: &WeightedGraph, h: &VertexField, p: f64) -> Result<EigenResult> {
    lambda_p_v_with(g, h, p, &EigenConfig::default())
}

pub fn lambda_p_v_with(g: &WeightedGraph, h: &VertexField, p: f64, cfg: &EigenConfig) -> Result<EigenResult> {
    let order = OperatorOrder::new(1, p)?;
    lambda_mp_v_with(g, h, order, cfg)
}

pub fn lambda_mp_v(g: &WeightedGraph, h: &VertexField, order: OperatorOrder) -> Result<EigenResult> {
    lambda_mp_v_with(g, h, order, &EigenConfig::default())
}

pub fn lambda_mp_v_with(
    g: &WeightedGraph,
    h: &VertexField,
    order: OperatorOrder,
    cfg: &EigenConfig,
) -> Result<EigenResult> {
    let space = AdmissibleSpace::whole_graph(g, h)?;
    if order.p() == 2.0 {
        exact(g, &space, order.m())
    } else {
        multistart(g, &space, order.m(), order.p(), cfg)
    }
}

/// `∫_R (|∇ᵐu|^p + h|u|^p) dμ / ∫_R |u|^p dμ`, with `h` taken from the space
/// (zero for Dirichlet spaces).
pub fn rayleigh_quotient(g: &WeightedGraph, space: &AdmissibleSpace, u: &VertexField, order: OperatorOrder) -> f64 {
    let (num, den) = quotient_parts(g, space, u, order.m(), order.p());
    num / den
}

fn quotient_parts(g: &WeightedGraph, space: &AdmissibleSpace, u: &VertexField, m: usize, p: f64) -> (f64, f64) {
    let grad = m_grad_norm_field(g, u, m);
    let h = space.potential();
    let region = space.region();
    let mut num = 0.0;
    let mut den = 0.0;
    for x in (0..g.len()).filter(|&x| region[x]) {
        let up = u[x].abs().powf(p);
        num += g.mu(x) * (grad[x].powf(p) + h.map_or(0.0, |h| h[x]) * up);
        den += g.mu(x) * up;
    }
    (num, den)
}

/// Matrix of the form `∫_R Γ⁽ᵐ⁾(u, v) + h u v` in the μ-orthonormal basis.
fn stiffness(g: &WeightedGraph, space: &AdmissibleSpace, m: usize, with_potential: bool) -> DMatrix<f64> {
    let basis = space.basis();
    let d = basis.len();
    let h = if with_potential { space.potential() } else { None };
    let mut k = DMatrix::zeros(d, d);
    for (j, b) in basis.iter().enumerate() {
        let (mut rep, _) = poly_pairing_representative(g, space.region(), b, m, 2.0);
        if let Some(h) = h {
            for x in 0..g.len() {
                rep[x] += h[x] * b[x];
            }
        }
        for (i, c) in space.coords(&rep).into_iter().enumerate() {
            k[(i, j)] = c;
        }
    }
    (&k + k.transpose()) * 0.5
}

fn normalize(g: &WeightedGraph, space: &AdmissibleSpace, coords: &[f64], p: f64) -> VertexField {
    let u = space.to_field(coords);
    let region = space.region();
    let mass: f64 = (0..g.len())
        .filter(|&x| region[x])
        .map(|x| g.mu(x) * u[x].abs().powf(p))
        .sum();
    let mut u = u.scaled(mass.powf(-1.0 / p));
    let lead = (0..u.len()).fold(0, |best, x| if u[x].abs() > u[best].abs() { x } else { best });
    if u[lead] < 0.0 {
        u = u.scaled(-1.0);
    }
    u
}

fn smallest_eigenpair(k: DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(k);
    let i = eig.eigenvalues.imin();
    (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned())
}

fn exact(g: &WeightedGraph, space: &AdmissibleSpace, m: usize) -> Result<EigenResult> {
    let (value, v) = smallest_eigenpair(stiffness(g, space, m, true));
    Ok(EigenResult {
        value: value.max(0.0),
        minimizer: normalize(g, space, v.as_slice(), 2.0),
        certified: true,
        restarts: 1,
    })
}

/// Numerator `A` and denominator `B` of a quotient homogeneous of degree `p`
/// in the coordinates, each with its coordinate gradient.
type QuotientEval<'a> = dyn Fn(&[f64]) -> (f64, Vec<f64>, f64, Vec<f64>) + 'a;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradient descent with Barzilai–Borwein steps and Armijo backtracking on the
/// 0-homogeneous quotient `A/B`, renormalizing to `B = 1` after every step.
fn descend(eval: &QuotientEval, degree: f64, start: &[f64], cfg: &EigenConfig) -> Option<(f64, Vec<f64>)> {
    let rescale = |c: &[f64], b: f64| -> Vec<f64> {
        let s = b.powf(-1.0 / degree);
        c.iter().map(|v| v * s).collect()
    };
    let (_, _, b0, _) = eval(start);
    if !(b0 > 0.0) || !b0.is_finite() {
        return None;
    }
    let mut c = rescale(start, b0);
    let quotient_grad = |c: &[f64]| {
        let (a, ga, b, gb) = eval(c);
        let q = a / b;
        let grad: Vec<f64> = ga.iter().zip(&gb).map(|(x, y)| (x - q * y) / b).collect();
        (q, grad)
    };
    let (mut q, mut grad) = quotient_grad(&c);
    let mut step = 1.0 / dot(&grad, &grad).sqrt().max(1e-300) * 1e-2;
    let mut stalls = 0;
    for _ in 0..cfg.max_iter {
        let gnorm = dot(&grad, &grad).sqrt();
        if !(gnorm > cfg.grad_tol) {
            break;
        }
        let mut accepted = None;
        let mut alpha = step;
        for _ in 0..60 {
            let trial: Vec<f64> = c.iter().zip(&grad).map(|(x, g)| x - alpha * g).collect();
            let (_, _, b, _) = eval(&trial);
            if b > 0.0 && b.is_finite() {
                let trial = rescale(&trial, b);
                let (qt, gt) = quotient_grad(&trial);
                if qt <= q - 1e-4 * alpha * gnorm * gnorm {
                    accepted = Some((trial, qt, gt));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((next, qn, gn)) = accepted else { break };
        let s: Vec<f64> = next.iter().zip(&c).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        step = if sy > 0.0 { dot(&s, &s) / sy } else { alpha * 2.0 };
        if q - qn < 1e-14 * q.abs().max(1e-300) {
            stalls += 1;
        } else {
            stalls = 0;
        }
        c = next;
        q = qn;
        grad = gn;
        if stalls >= 5 {
            break;
        }
    }
    Some((q, c))
}

/// Evaluator for the eigen-quotient of order `m`, exponent `p`, on `space`.
fn eigen_quotient<'a>(g: &'a WeightedGraph, space: &'a AdmissibleSpace, m: usize, p: f64) -> Box<QuotientEval<'a>> {
    Box::new(move |c: &[f64]| {
        let u = space.to_field(c);
        let (num, den) = quotient_parts(g, space, &u, m, p);
        let region = space.region();
        let h = space.potential();
        let (mut rep_a, _) = poly_pairing_representative(g, region, &u, m, p);
        let mut rep_b = VertexField::zeros(g.len());
        for x in (0..g.len()).filter(|&x| region[x]) {
            let s = signed_power(u[x], p - 1.0);
            rep_b[x] = s;
            rep_a[x] += h.map_or(0.0, |h| h[x]) * s;
        }
        let ga = space.coords(&rep_a).into_iter().map(|v| p * v).collect();
        let gb = space.coords(&rep_b).into_iter().map(|v| p * v).collect();
        (num, ga, den, gb)
    })
}

fn signed_power(t: f64, e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(e)
    }
}

fn random_starts(d: usize, cfg: &EigenConfig, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
            (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
        })
        .collect()
}

fn lexicographic_less(a: &VertexField, b: &VertexField) -> bool {
    for (x, y) in a.values().iter().zip(b.values()) {
        if x != y {
            return x < y;
        }
    }
    false
}

fn multistart(
    g: &WeightedGraph,
    space: &AdmissibleSpace,
    m: usize,
    p: f64,
    cfg: &EigenConfig,
) -> Result<EigenResult> {
    let (_, seed) = smallest_eigenpair(stiffness(g, space, m, true));
    let seed: Vec<f64> = seed.iter().copied().collect();
    let restarts = cfg.restarts.max(1);
    let mut starts = vec![seed.clone()];
    if restarts > 1 {
        starts.push(seed.iter().map(|v| v.abs()).collect());
    }
    starts.extend(random_starts(space.dim(), cfg, restarts.saturating_sub(2)));

    let eval = eigen_quotient(g, space, m, p);
    let mut best: Option<(f64, VertexField)> = None;
    for start in &starts {
        let Some((value, coords)) = descend(&*eval, p, start, cfg) else {
            continue;
        };
        let u = normalize(g, space, &coords, p);
        let better = match &best {
            None => true,
            Some((bv, bu)) => value < *bv || (value == *bv && lexicographic_less(&u, bu)),
        };
        if better {
            best = Some((value, u));
        }
    }
    let (value, minimizer) = best.ok_or_else(|| Error::NonFiniteValue("eigen-quotient descent".into()))?;
    Ok(EigenResult {
        value,
        minimizer,
        certified: false,
        restarts: starts.len(),
    })
}

/// Best constant `C` in `‖u‖_{L^q(Ω)} ≤ C ‖∇ᵐu‖_{L^p(Ω)}` over `C₀ᵐ(Ω)`;
/// `q = f64::INFINITY` selects the sup norm.
///
/// Exact when `p = 2` and `q ∈ {2, ∞}`; otherwise the best of the multi-start
/// maximization, a lower bound on the best constant.
pub fn sobolev_constant(g: &WeightedGraph, dom: &DomainDecomposition, order: OperatorOrder, q: f64) -> Result<f64> {
    sobolev_constant_with(g, dom, order, q, &EigenConfig::default())
}

pub fn sobolev_constant_with(
    g: &WeightedGraph,
    dom: &DomainDecomposition,
    order: OperatorOrder,
    q: f64,
    cfg: &EigenConfig,
) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::BadExponent {
            constraint: "q >= 1",
            value: q,
        });
    }
    let space = AdmissibleSpace::dirichlet(g, dom, order.m())?;
    let (m, p) = (order.m(), order.p());
    let k = stiffness(g, &space, m, false);
    let basis = space.basis();
    let row = |x: usize| -> Vec<f64> { basis.iter().map(|b| b[x]).collect() };

    if p == 2.0 && q == 2.0 {
        let (value, _) = smallest_eigenpair(k);
        return Ok(if value > 0.0 { value.powf(-0.5) } else { f64::INFINITY });
    }
    if p == 2.0 && q.is_infinite() {
        // sup_u u(x)² / ∫|∇ᵐu|² = aₓᵀ K⁻¹ aₓ with aₓ the basis values at x
        let Some(chol) = k.cholesky() else {
            return Ok(f64::INFINITY);
        };
        let best = space
            .support()
            .iter()
            .map(|&x| {
                let a = DVector::from_vec(row(x));
                a.dot(&chol.solve(&a))
            })
            .fold(0.0f64, f64::max);
        return Ok(best.sqrt());
    }

    let region = space.region().to_vec();
    let stiff = {
        let space = &space;
        move |c: &[f64]| -> (f64, Vec<f64>, VertexField) {
            let u = space.to_field(c);
            let grad = m_grad_norm_field(g, &u, m);
            let a: f64 = (0..g.len())
                .filter(|&x| space.region()[x])
                .map(|x| g.mu(x) * grad[x].powf(p))
                .sum();
            let (rep, _) = poly_pairing_representative(g, space.region(), &u, m, p);
            let ga = space.coords(&rep).into_iter().map(|v| p * v).collect();
            (a, ga, u)
        }
    };

    let chol = k.clone().cholesky();
    if q.is_infinite() {
        let mut best = 0.0f64;
        for &x in space.support() {
            let ax = row(x);
            let eval = |c: &[f64]| {
                let (a, ga, u) = stiff(c);
                let b = u[x].abs().powf(p);
                let scale = p * signed_power(u[x], p - 1.0);
                let gb = ax.iter().map(|v| scale * v).collect();
                (a, ga, b, gb)
            };
            let mut starts = Vec::new();
            if let Some(ch) = &chol {
                starts.push(ch.solve(&DVector::from_vec(ax.clone())).iter().copied().collect());
            }
            starts.extend(random_starts(space.dim(), cfg, 2));
            for start in &starts {
                if let Some((value, _)) = descend(&eval, p, start, cfg) {
                    if value > 0.0 {
                        best = best.max(value.powf(-1.0 / p));
                    }
                }
            }
        }
        return Ok(best);
    }

    let eval = |c: &[f64]| {
        let (a, ga, u) = stiff(c);
        let mut s = 0.0;
        let mut rep = VertexField::zeros(g.len());
        for x in (0..g.len()).filter(|&x| region[x]) {
            s += g.mu(x) * u[x].abs().powf(q);
            rep[x] = signed_power(u[x], q - 1.0);
        }
        let b = s.powf(p / q);
        let scale = p * s.powf(p / q - 1.0);
        let gb = space.coords(&rep).into_iter().map(|v| scale * v).collect();
        (a, ga, b, gb)
    };
    let mut starts = Vec::new();
    if chol.is_some() {
        let (_, v) = smallest_eigenpair(k.clone());
        starts.push(v.iter().copied().collect());
    }
    starts.extend(random_starts(space.dim(), cfg, cfg.restarts.max(1)));
    let mut best = 0.0f64;
    for start in &starts {
        if let Some((value, _)) = descend(&eval, p, start, cfg) {
            if value > 0.0 {
                best = best.max(value.powf(-1.0 / p));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeSpec, GraphSpec, VertexSpec};
    use approx::assert_relative_eq;

    fn path(n: usize) -> WeightedGraph {
        WeightedGraph::build(&GraphSpec {
            vertices: (0..n)
                .map(|i| VertexSpec {
                    id: format!("v{i}"),
                    mu: 1.0,
                })
                .collect(),
            edges: (1..n)
                .map(|i| EdgeSpec {
                    u: format!("v{}", i - 1),
                    v: format!("v{i}"),
                    w: 1.0,
                })
                .collect(),
        })
        .unwrap()
    }

    fn middle(g: &WeightedGraph, skip: usize) -> DomainDecomposition {
        let omega: Vec<usize> = (skip..g.len() - skip).collect();
        DomainDecomposition::new(g, &omega).unwrap()
    }

    #[test]
    fn single_interior_vertex() {
        let g = path(5);
        let dom = middle(&g, 1);
        let l1 = lambda1(&g, &dom).unwrap();
        assert_relative_eq!(l1.value, 2.0, epsilon = 1e-12);
        assert!(l1.certified);
        let l3 = lambda_p(&g, &dom, 3.0).unwrap();
        assert_relative_eq!(l3.value, 1.0 + 0.5f64.sqrt(), epsilon = 1e-10);
        assert!(!l3.certified);
        assert_relative_eq!(l3.minimizer[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_interior_vertices() {
        let g = path(6);
        let dom = middle(&g, 1);
        assert_relative_eq!(lambda1(&g, &dom).unwrap().value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn whole_graph_examples() {
        let g = path(1);
        let h = VertexField::constant(1, 3.0);
        for p in [1.5, 2.0, 4.0] {
            assert_relative_eq!(lambda_p_v(&g, &h, p).unwrap().value, 3.0, epsilon = 1e-10);
        }
        let g = path(2);
        let h = VertexField::constant(2, 1.0);
        assert_relative_eq!(lambda_p_v(&g, &h, 2.0).unwrap().value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sobolev_single_interior_vertex() {
        let g = path(5);
        let dom = middle(&g, 1);
        let order = OperatorOrder::new(1, 2.0).unwrap();
        let c = sobolev_constant(&g, &dom, order, 2.0).unwrap();
        assert_relative_eq!(c, 0.5f64.sqrt(), epsilon = 1e-12);
        let c_inf = sobolev_constant(&g, &dom, order, f64::INFINITY).unwrap();
        assert_relative_eq!(c_inf, 0.5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn empty_interior() {
        let g = path(3);
        let dom = DomainDecomposition::new(&g, &[1]).unwrap();
        assert_eq!(lambda1(&g, &dom).unwrap_err(), Error::EmptyInterior);
    }
}
