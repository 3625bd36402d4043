use nalgebra::DMatrix;

use crate::calculus::laplacian_power;
use crate::error::{Error, Result};
use crate::graph::{DomainDecomposition, VertexField, WeightedGraph};

/// Which function class a space realizes.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    /// `C₀ᵐ(Ω)`: fields vanishing outside Ω° with `|∇ʲu| = 0` on ∂Ω for `j < m`.
    Dirichlet { m: usize },
    /// All fields on V, with the positive potential `h` carried along for norms.
    WholeGraph { h: VertexField },
}

#[derive(Debug, Clone, PartialEq)]
enum Basis {
    /// `δ_x / sqrt(μ(x))` for each listed vertex.
    Delta(Vec<usize>),
    /// Columns are basis fields restricted to `support`.
    Dense {
        support: Vec<usize>,
        columns: DMatrix<f64>,
    },
}

/// A finite-dimensional admissible class with a basis orthonormal in the
/// measure-weighted pairing `⟨u, v⟩_μ = Σ μ u v`.
///
/// Coordinates with respect to this basis are the unknowns of every solver;
/// because the basis is μ-orthonormal, the Euclidean gradient in coordinates
/// is the μ-Riesz representative projected onto the space.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleSpace {
    kind: SpaceKind,
    n: usize,
    mu: Vec<f64>,
    region: Vec<bool>,
    basis: Basis,
}

const ZERO_ENTRY: f64 = 1e-13;
const RANK_TOL: f64 = 1e-10;

impl AdmissibleSpace {
    /// Kernel of the linearized boundary conditions `u = |∇u| = ⋯ = |∇^{m−1}u| = 0` on ∂Ω.
    pub fn dirichlet(g: &WeightedGraph, dom: &DomainDecomposition, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::BadOrder { min: 1, value: m });
        }
        let unknowns: Vec<usize> = dom.interior().to_vec();
        if unknowns.is_empty() {
            return Err(Error::TrivialAdmissibleSpace);
        }
        let rows = boundary_constraints(g, dom, &unknowns, m);
        let basis = kernel_basis(g, &unknowns, rows)?;
        Ok(Self {
            kind: SpaceKind::Dirichlet { m },
            n: g.len(),
            mu: g.measure().to_vec(),
            region: dom.omega_mask().to_vec(),
            basis,
        })
    }

    /// Every field on V; the basis is the scaled delta functions.
    pub fn whole_graph(g: &WeightedGraph, h: &VertexField) -> Result<Self> {
        h.validate(g)?;
        if let Some(x) = (0..g.len()).find(|&x| !(h[x] > 0.0)) {
            return Err(Error::NonPositivePotential(g.id(x).to_string(), h[x]));
        }
        if g.is_empty() {
            return Err(Error::TrivialAdmissibleSpace);
        }
        Ok(Self {
            kind: SpaceKind::WholeGraph { h: h.clone() },
            n: g.len(),
            mu: g.measure().to_vec(),
            region: vec![true; g.len()],
            basis: Basis::Delta((0..g.len()).collect()),
        })
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.basis {
            Basis::Delta(s) => s.len(),
            Basis::Dense { columns, .. } => columns.ncols(),
        }
    }

    /// Integration region: Ω for Dirichlet spaces, V otherwise.
    pub fn region(&self) -> &[bool] {
        &self.region
    }

    pub fn region_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.region[x]).collect()
    }

    /// Vertices on which some basis field is nonzero.
    pub fn support(&self) -> &[usize] {
        match &self.basis {
            Basis::Delta(s) => s,
            Basis::Dense { support, .. } => support,
        }
    }

    pub fn potential(&self) -> Option<&VertexField> {
        match &self.kind {
            SpaceKind::WholeGraph { h } => Some(h),
            SpaceKind::Dirichlet { .. } => None,
        }
    }

    /// Basis fields, zero-extended to the whole graph.
    pub fn basis(&self) -> Vec<VertexField> {
        (0..self.dim())
            .map(|j| {
                let mut c = vec![0.0; self.dim()];
                c[j] = 1.0;
                self.to_field(&c)
            })
            .collect()
    }

    /// `Σ_j c_j b_j`.
    pub fn to_field(&self, coords: &[f64]) -> VertexField {
        let mut u = VertexField::zeros(self.n);
        match &self.basis {
            Basis::Delta(s) => {
                for (&x, &c) in s.iter().zip(coords) {
                    u[x] = c / self.mu[x].sqrt();
                }
            }
            Basis::Dense { support, columns } => {
                for (i, &x) in support.iter().enumerate() {
                    u[x] = (0..columns.ncols()).map(|j| columns[(i, j)] * coords[j]).sum();
                }
            }
        }
        u
    }

    /// `c_j = ⟨r, b_j⟩_μ`: coordinates of the μ-orthogonal projection of `r`.
    pub fn coords(&self, r: &VertexField) -> Vec<f64> {
        match &self.basis {
            Basis::Delta(s) => s.iter().map(|&x| self.mu[x].sqrt() * r[x]).collect(),
            Basis::Dense { support, columns } => (0..columns.ncols())
                .map(|j| {
                    support
                        .iter()
                        .enumerate()
                        .map(|(i, &x)| self.mu[x] * r[x] * columns[(i, j)])
                        .sum()
                })
                .collect(),
        }
    }

    /// μ-orthogonal projection onto the space.
    pub fn project_field(&self, r: &VertexField) -> VertexField {
        self.to_field(&self.coords(r))
    }

    /// Largest pointwise distance from `u` to its projection.
    pub fn membership_defect(&self, u: &VertexField) -> f64 {
        u.sub(&self.project_field(u)).max_abs()
    }

    pub fn check_member(&self, u: &VertexField) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::FieldLength {
                expected: self.n,
                got: u.len(),
            });
        }
        let defect = self.membership_defect(u);
        if defect <= 1e-9 * (1.0 + u.max_abs()) {
            Ok(())
        } else {
            Err(Error::InadmissibleField(defect))
        }
    }
}

/// Linear functionals (over the unknowns) that must vanish on admissible fields.
fn boundary_constraints(
    g: &WeightedGraph,
    dom: &DomainDecomposition,
    unknowns: &[usize],
    m: usize,
) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    if m < 2 {
        return rows;
    }
    // iterates[k][i] = Δᵏ δ_{unknowns[i]}
    let kmax = (m - 1) / 2;
    let mut iterates: Vec<Vec<VertexField>> = Vec::with_capacity(kmax + 1);
    iterates.push(unknowns.iter().map(|&x| VertexField::delta(g.len(), x)).collect());
    for k in 1..=kmax {
        let next = iterates[k - 1]
            .iter()
            .map(|f| laplacian_power(g, f, 1))
            .collect();
        iterates.push(next);
    }
    for &x in dom.boundary() {
        for j in 1..m {
            let k = j / 2;
            if j % 2 == 0 {
                rows.push(iterates[k].iter().map(|f| f[x]).collect());
            } else {
                for &(y, _) in g.neighbors(x) {
                    rows.push(iterates[k].iter().map(|f| f[y] - f[x]).collect());
                }
            }
        }
    }
    rows
}

fn kernel_basis(g: &WeightedGraph, unknowns: &[usize], mut rows: Vec<Vec<f64>>) -> Result<Basis> {
    // Rows with a single significant entry pin that unknown to zero; peel them
    // off first so that simple conditions keep a delta basis.
    let global = rows
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for v in rows.iter_mut().flatten() {
        if v.abs() <= ZERO_ENTRY * global {
            *v = 0.0;
        }
    }
    let mut free = vec![true; unknowns.len()];
    loop {
        let mut changed = false;
        for row in &rows {
            let mut live = (0..row.len()).filter(|&i| free[i] && row[i] != 0.0);
            if let (Some(i), None) = (live.next(), live.next()) {
                free[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let cols: Vec<usize> = (0..unknowns.len()).filter(|&i| free[i]).collect();
    rows.retain(|row| cols.iter().any(|&i| row[i] != 0.0));
    if cols.is_empty() {
        return Err(Error::TrivialAdmissibleSpace);
    }
    let support: Vec<usize> = cols.iter().map(|&i| unknowns[i]).collect();
    if rows.is_empty() {
        return Ok(Basis::Delta(support));
    }

    // Kernel of C M^{-1/2} in Euclidean coordinates z, then u = M^{-1/2} z.
    let d = cols.len();
    let nrows = rows.len().max(d);
    let mut c = DMatrix::<f64>::zeros(nrows, d);
    for (r, row) in rows.iter().enumerate() {
        for (j, &i) in cols.iter().enumerate() {
            c[(r, j)] = row[i] / g.mu(unknowns[i]).sqrt();
        }
    }
    let svd = c.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let tol = RANK_TOL * smax.max(1.0);
    let kernel: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= tol)
        .collect();
    if kernel.is_empty() {
        return Err(Error::TrivialAdmissibleSpace);
    }
    let mut columns = DMatrix::<f64>::zeros(d, kernel.len());
    for (jj, &k) in kernel.iter().enumerate() {
        // fix sign: first significant entry positive
        let row = v_t.row(k);
        let sign = row
            .iter()
            .find(|v| v.abs() > 1e-12)
            .map_or(1.0, |v| v.signum());
        for i in 0..d {
            columns[(i, jj)] = sign * row[i] / g.mu(support[i]).sqrt();
        }
    }
    Ok(Basis::Dense { support, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generate::{generate, Family, MeasureRule, WeightRule};

    fn path(n: usize) -> WeightedGraph {
        generate(&Family::Path(n), MeasureRule::Unit, &WeightRule::Unit).unwrap()
    }

    fn middle(g: &WeightedGraph) -> DomainDecomposition {
        DomainDecomposition::new(g, &(1..g.len() - 1).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn first_order_space_is_interior_deltas() {
        let g = path(6);
        let dom = middle(&g);
        let s = AdmissibleSpace::dirichlet(&g, &dom, 1).unwrap();
        assert_eq!(s.dim(), dom.interior().len());
        assert_eq!(s.support(), dom.interior());
    }

    #[test]
    fn second_order_on_path_of_seven_keeps_only_center() {
        let g = path(7);
        let dom = middle(&g);
        let s = AdmissibleSpace::dirichlet(&g, &dom, 2).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.support(), &[3]);
    }

    #[test]
    fn empty_interior_is_trivial() {
        let g = path(3);
        let dom = DomainDecomposition::new(&g, &[1]).unwrap();
        assert_eq!(
            AdmissibleSpace::dirichlet(&g, &dom, 1),
            Err(Error::TrivialAdmissibleSpace)
        );
    }

    #[test]
    fn basis_is_measure_orthonormal() {
        let g = generate(
            &Family::Grid(6, 6),
            MeasureRule::Degree,
            &WeightRule::Uniform {
                lo: 0.5,
                hi: 2.0,
                seed: 3,
            },
        )
        .unwrap();
        let omega: Vec<usize> = (0..g.len()).filter(|&x| x >= 6).collect();
        let dom = DomainDecomposition::new(&g, &omega).unwrap();
        for m in 1..=4 {
            let s = AdmissibleSpace::dirichlet(&g, &dom, m).unwrap();
            let b = s.basis();
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let ip: f64 = (0..g.len()).map(|x| g.mu(x) * b[i][x] * b[j][x]).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - expected).abs() < 1e-10, "m={m} ({i},{j}) -> {ip}");
                }
            }
        }
    }

    #[test]
    fn higher_order_basis_satisfies_boundary_conditions() {
        let g = generate(&Family::Grid(7, 7), MeasureRule::Unit, &WeightRule::Unit).unwrap();
        let omega: Vec<usize> = (7..g.len()).collect();
        let dom = DomainDecomposition::new(&g, &omega).unwrap();
        let s = AdmissibleSpace::dirichlet(&g, &dom, 4).unwrap();
        for b in s.basis() {
            for &x in dom.boundary() {
                for j in 0..4 {
                    let v = crate::calculus::m_grad_norm(&g, &b, j, x).unwrap();
                    assert!(v < 1e-10, "|∇^{j} b|({x}) = {v}");
                }
            }
        }
    }

    #[test]
    fn membership() {
        let g = path(5);
        let dom = middle(&g);
        let s = AdmissibleSpace::dirichlet(&g, &dom, 1).unwrap();
        assert!(s.check_member(&VertexField::delta(5, 2)).is_ok());
        assert!(matches!(
            s.check_member(&VertexField::delta(5, 1)),
            Err(Error::InadmissibleField(_))
        ));
    }

    #[test]
    fn whole_graph_rejects_nonpositive_potential() {
        let g = path(3);
        let h = VertexField::new(vec![1.0, 0.0, 1.0]);
        assert!(matches!(
            AdmissibleSpace::whole_graph(&g, &h),
            Err(Error::NonPositivePotential(..))
        ));
    }
}
