//! Weighted graphs with a vertex measure, domains and measure-weighted sums.
//!
//! Vertices are addressed by opaque string ids in files and by dense indices
//! in memory. Indices follow the sorted order of the ids, so every traversal
//! of a graph built from the same description visits vertices identically.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex entry of the canonical graph JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: String,
    pub mu: f64,
}

/// Edge entry of the canonical graph JSON. Undirected: declare each edge once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub u: String,
    pub v: String,
    pub w: f64,
}

/// `{"vertices":[{"id":"a","mu":1.0}],"edges":[{"u":"a","v":"b","w":1.0}]}`
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph spec serializes")
    }
}

/// A finite, undirected graph with symmetric positive weights and a positive
/// vertex measure. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    mu: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Validates a description and builds the graph.
    pub fn build(spec: &GraphSpec) -> Result<Self> {
        let mut sorted: BTreeMap<&str, f64> = BTreeMap::new();
        for v in &spec.vertices {
            if !(v.mu > 0.0) || !v.mu.is_finite() {
                return Err(Error::NonPositiveMeasure(v.id.clone(), v.mu));
            }
            if sorted.insert(v.id.as_str(), v.mu).is_some() {
                return Err(Error::DuplicateVertex(v.id.clone()));
            }
        }
        let ids: Vec<String> = sorted.keys().map(|s| s.to_string()).collect();
        let mu: Vec<f64> = sorted.values().copied().collect();
        let index: HashMap<String, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();

        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut edges = Vec::with_capacity(spec.edges.len());
        for e in &spec.edges {
            let a = *index
                .get(&e.u)
                .ok_or_else(|| Error::UnknownVertexInEdge(e.u.clone()))?;
            let b = *index
                .get(&e.v)
                .ok_or_else(|| Error::UnknownVertexInEdge(e.v.clone()))?;
            if a == b {
                return Err(Error::SelfLoop(e.u.clone()));
            }
            if !(e.w > 0.0) || !e.w.is_finite() {
                return Err(Error::NonPositiveWeight(e.u.clone(), e.v.clone(), e.w));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge(e.u.clone(), e.v.clone()));
            }
            edges.push((key.0, key.1, e.w));
        }
        edges.sort_by_key(|x| (x.0, x.1));

        let mut adjacency = vec![Vec::new(); ids.len()];
        for &(a, b, w) in &edges {
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_by_key(|&(y, _)| y);
        }
        Ok(Self {
            ids,
            index,
            mu,
            adjacency,
            edges,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::build(&GraphSpec::from_json(text)?)
    }

    /// Canonical description: vertices in index order, edges once each.
    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self
                .ids
                .iter()
                .zip(&self.mu)
                .map(|(id, &mu)| VertexSpec { id: id.clone(), mu })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b, w)| EdgeSpec {
                    u: self.ids[a].clone(),
                    v: self.ids[b].clone(),
                    w,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    /// Index of a vertex id.
    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn vertices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter().map(|id| self.vertex(id.as_ref())).collect()
    }

    pub(crate) fn check(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{x}")))
        }
    }

    pub fn mu(&self, x: usize) -> f64 {
        self.mu[x]
    }

    pub fn measure(&self) -> &[f64] {
        &self.mu
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    /// Undirected edges `(a, b, w)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// `deg(x) = Σ_{y∼x} w_xy`.
    pub fn degree(&self, x: usize) -> Result<f64> {
        self.check(x)?;
        Ok(self.adjacency[x].iter().map(|&(_, w)| w).sum())
    }

    /// Connected components of the subgraph induced on `members`.
    pub fn is_connected_on(&self, members: &[bool]) -> bool {
        let start = match members.iter().position(|&m| m) {
            Some(s) => s,
            None => return true,
        };
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if members[y] && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == members.iter().filter(|&&m| m).count()
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_on(&vec![true; self.len()])
    }

    /// Returns a copy with every weight multiplied by `factor`.
    pub fn scale_weights(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.edges {
            e.2 *= factor;
        }
        for nbrs in &mut out.adjacency {
            for e in nbrs {
                e.1 *= factor;
            }
        }
        out
    }

    /// Returns a copy with every measure multiplied by `factor`.
    pub fn scale_measure(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.mu {
            *m *= factor;
        }
        out
    }
}

/// A connected vertex set Ω split into boundary ∂Ω and interior Ω°.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDecomposition {
    omega: Vec<usize>,
    boundary: Vec<usize>,
    interior: Vec<usize>,
    in_omega: Vec<bool>,
    in_interior: Vec<bool>,
}

impl DomainDecomposition {
    /// ∂Ω = {x ∈ Ω : some neighbor lies outside Ω}; Ω° = Ω ∖ ∂Ω.
    pub fn new(g: &WeightedGraph, omega: &[usize]) -> Result<Self> {
        Self::build(g, omega, true)
    }

    /// Same as [`DomainDecomposition::new`] without the connectivity check.
    pub fn new_unchecked_connectivity(g: &WeightedGraph, omega: &[usize]) -> Result<Self> {
        Self::build(g, omega, false)
    }

    pub fn from_ids<S: AsRef<str>>(g: &WeightedGraph, ids: &[S]) -> Result<Self> {
        Self::new(g, &g.vertices_of(ids)?)
    }

    /// The whole vertex set as a domain.
    pub fn whole(g: &WeightedGraph) -> Result<Self> {
        Self::new(g, &(0..g.len()).collect::<Vec<_>>())
    }

    fn build(g: &WeightedGraph, omega: &[usize], require_connected: bool) -> Result<Self> {
        let mut in_omega = vec![false; g.len()];
        for &x in omega {
            g.check(x)?;
            in_omega[x] = true;
        }
        if omega.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if require_connected && !g.is_connected_on(&in_omega) {
            return Err(Error::DisconnectedDomain);
        }
        let omega: Vec<usize> = (0..g.len()).filter(|&x| in_omega[x]).collect();
        let (boundary, interior): (Vec<usize>, Vec<usize>) = omega
            .iter()
            .partition(|&&x| g.neighbors(x).iter().any(|&(y, _)| !in_omega[y]));
        let mut in_interior = vec![false; g.len()];
        for &x in &interior {
            in_interior[x] = true;
        }
        Ok(Self {
            omega,
            boundary,
            interior,
            in_omega,
            in_interior,
        })
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn contains(&self, x: usize) -> bool {
        self.in_omega[x]
    }

    pub fn is_interior(&self, x: usize) -> bool {
        self.in_interior[x]
    }

    pub fn omega_mask(&self) -> &[bool] {
        &self.in_omega
    }
}

/// A real value at every vertex of the ambient graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexField(Vec<f64>);

impl VertexField {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    /// Field taking value 1 at `x` and 0 elsewhere.
    pub fn delta(n: usize, x: usize) -> Self {
        let mut f = Self::zeros(n);
        f.0[x] = 1.0;
        f
    }

    /// Checks length and finiteness against a graph.
    pub fn validate(&self, g: &WeightedGraph) -> Result<()> {
        if self.0.len() != g.len() {
            return Err(Error::FieldLength {
                expected: g.len(),
                got: self.0.len(),
            });
        }
        match self.0.iter().position(|v| !v.is_finite()) {
            Some(x) => Err(Error::NonFiniteValue(g.id(x).to_string())),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// u⁺ = max(u, 0).
    pub fn positive_part(&self) -> Self {
        self.map(|v| v.max(0.0))
    }

    /// u⁻ = min(u, 0).
    pub fn negative_part(&self) -> Self {
        self.map(|v| v.min(0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<usize> for VertexField {
    type Output = f64;
    fn index(&self, x: usize) -> &f64 {
        &self.0[x]
    }
}

impl IndexMut<usize> for VertexField {
    fn index_mut(&mut self, x: usize) -> &mut f64 {
        &mut self.0[x]
    }
}

impl From<Vec<f64>> for VertexField {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// `∫_region u dμ = Σ_{x∈region} μ(x) u(x)`.
pub fn integrate(g: &WeightedGraph, region: &[usize], u: &VertexField) -> Result<f64> {
    for &x in region {
        g.check(x)?;
    }
    Ok(region.iter().map(|&x| g.mu(x) * u[x]).sum())
}

/// `|region| = Σ_{x∈region} μ(x)`.
pub fn volume(g: &WeightedGraph, region: &[usize]) -> Result<f64> {
    for &x in region {
        g.check(x)?;
    }
    Ok(region.iter().map(|&x| g.mu(x)).sum())
}
