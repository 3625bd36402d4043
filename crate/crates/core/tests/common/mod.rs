#![allow(dead_code)]

use graph_yamabe::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// path(5) with Ω = {b, c, d}: a single interior vertex `c`.
pub fn toy() -> (WeightedGraph, DomainDecomposition) {
    let g = generate(&Family::Path(5), MeasureRule::Unit, &WeightRule::Unit).unwrap();
    let dom = DomainDecomposition::from_ids(&g, &["b", "c", "d"]).unwrap();
    (g, dom)
}

/// Graphs shared by the smoke instances.
pub struct SmokeGraphs {
    pub grid: WeightedGraph,
    pub dom: DomainDecomposition,
    pub k6: WeightedGraph,
    pub gnp: WeightedGraph,
}

impl SmokeGraphs {
    pub fn new() -> Self {
        let grid = generate(&Family::Grid(4, 4), MeasureRule::Unit, &WeightRule::Unit).unwrap();
        // rows 1..3 of the grid; row 1 is the boundary
        let omega: Vec<usize> = (4..16).collect();
        let dom = DomainDecomposition::new(&grid, &omega).unwrap();
        let k6 = generate(&Family::Complete(6), MeasureRule::Unit, &WeightRule::Unit).unwrap();
        let gnp = generate(
            &Family::Gnp {
                n: 20,
                prob: 0.3,
                seed: 7,
            },
            MeasureRule::Unit,
            &WeightRule::Unit,
        )
        .unwrap();
        Self { grid, dom, k6, gnp }
    }

    /// One instance per variant, in the order thm1, thm2, thm4, thm5, thm6, thm8.
    /// The flag marks a pure-power nonlinearity.
    pub fn instances(&self) -> Vec<(VariantKind, bool, ProblemSpec<'_>)> {
        let power = |q: f64, p: f64, mode| NonlinearitySpec::new(Nonlinearity::Power { q, scale: 1.0 }, p, q, mode).unwrap();
        let l1 = lambda1(&self.grid, &self.dom).unwrap().value;
        let h6 = VertexField::constant(6, 1.0);
        let h20 = VertexField::constant(20, 1.0);
        let exp = NonlinearitySpec::new(Nonlinearity::ExpGrowth { scale: 0.5 }, 2.0, 3.0, Sidedness::OneSided).unwrap();
        let m2 = OperatorOrder::new(2, 2.0).unwrap();
        vec![
            (VariantKind::Thm1, true, ProblemSpec::thm1(&self.grid, &self.dom, 0.5 * l1, 3.0).unwrap()),
            (
                VariantKind::Thm2,
                true,
                ProblemSpec::thm2(&self.grid, &self.dom, power(4.0, 3.0, Sidedness::OneSided)).unwrap(),
            ),
            (
                VariantKind::Thm4,
                true,
                ProblemSpec::thm4(&self.grid, &self.dom, m2, power(3.0, 2.0, Sidedness::TwoSided)).unwrap(),
            ),
            (VariantKind::Thm5, true, ProblemSpec::thm5(&self.k6, &h6, 3.0).unwrap()),
            (VariantKind::Thm6, false, ProblemSpec::thm6(&self.gnp, &h20, exp).unwrap()),
            (
                VariantKind::Thm8,
                true,
                ProblemSpec::thm8(&self.gnp, &h20, m2, power(3.0, 2.0, Sidedness::TwoSided)).unwrap(),
            ),
        ]
    }
}

/// Connected random graph with random weights and measure.
pub fn random_graph(rng: &mut ChaCha8Rng, n_max: usize) -> WeightedGraph {
    let n = rng.random_range(4..=n_max);
    let prob = rng.random_range(0.15..0.6);
    let seed = rng.random::<u64>();
    let mu = if rng.random_bool(0.5) {
        MeasureRule::Unit
    } else {
        MeasureRule::Degree
    };
    let w = WeightRule::Uniform {
        lo: 0.2,
        hi: 3.0,
        seed: rng.random::<u64>(),
    };
    generate(&Family::Gnp { n, prob, seed }, mu, &w).unwrap()
}

/// A BFS ball around a random vertex, grown until it has an interior vertex
/// and leaves at least one vertex outside.
pub fn random_domain(rng: &mut ChaCha8Rng, g: &WeightedGraph) -> Option<DomainDecomposition> {
    for _ in 0..50 {
        let start = rng.random_range(0..g.len());
        let target = rng.random_range(2..g.len());
        let mut inside = vec![false; g.len()];
        let mut order = vec![start];
        inside[start] = true;
        let mut head = 0;
        while head < order.len() && order.len() < target {
            let x = order[head];
            head += 1;
            for &(y, _) in g.neighbors(x) {
                if !inside[y] && order.len() < target {
                    inside[y] = true;
                    order.push(y);
                }
            }
        }
        if let Ok(dom) = DomainDecomposition::new(g, &order) {
            if !dom.interior().is_empty() {
                return Some(dom);
            }
        }
    }
    None
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> VertexField {
    VertexField::new((0..n).map(|_| rng.random_range(-scale..scale)).collect())
}

/// Random field supported on the interior of `dom`.
pub fn random_interior_field(rng: &mut ChaCha8Rng, g: &WeightedGraph, dom: &DomainDecomposition) -> VertexField {
    let mut u = VertexField::zeros(g.len());
    for &x in dom.interior() {
        u[x] = rng.random_range(-1.0..1.0);
    }
    u
}

/// Cyclic Jacobi eigenvalues of a dense symmetric matrix, ascending.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest Dirichlet eigenvalue of `K u = λ M u` on the interior, with
/// `K` the edge Laplacian and `M = diag(μ)`, through `M^{-1/2} K M^{-1/2}`.
pub fn dirichlet_oracle(g: &WeightedGraph, dom: &DomainDecomposition) -> f64 {
    let idx = dom.interior();
    let pos = |x: usize| idx.iter().position(|&y| y == x);
    let n = idx.len();
    let mut k = vec![vec![0.0; n]; n];
    for &(x, y, w) in g.edges() {
        match (pos(x), pos(y)) {
            (Some(i), Some(j)) => {
                k[i][i] += w;
                k[j][j] += w;
                k[i][j] -= w;
                k[j][i] -= w;
            }
            (Some(i), None) => k[i][i] += w,
            (None, Some(j)) => k[j][j] += w,
            (None, None) => {}
        }
    }
    for i in 0..n {
        for j in 0..n {
            k[i][j] /= (g.mu(idx[i]) * g.mu(idx[j])).sqrt();
        }
    }
    jacobi_eigenvalues(k)[0]
}

/// `∫_V |∇u|² dμ` as the edge sum `Σ w (u(x) − u(y))²`.
pub fn dirichlet_energy(g: &WeightedGraph, u: &VertexField) -> f64 {
    g.edges().iter().map(|&(x, y, w)| w * (u[x] - u[y]).powi(2)).sum()
}
