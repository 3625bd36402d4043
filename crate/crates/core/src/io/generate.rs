//! Deterministic graph families for experiments and tests.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeSpec, GraphSpec, VertexSpec, WeightedGraph};

const GNP_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Path(usize),
    Cycle(usize),
    Grid(usize, usize),
    Complete(usize),
    Gnp { n: usize, prob: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureRule {
    Unit,
    /// `μ(x) = deg(x)`.
    Degree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightRule {
    Unit,
    Uniform { lo: f64, hi: f64, seed: u64 },
}

fn call_args<'a>(text: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let rest = text.trim().strip_prefix(name)?.trim();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

fn num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
}

impl FromStr for Family {
    type Err = Error;

    /// `path(n)`, `cycle(n)`, `grid(nx,ny)`, `complete(n)`, `gnp(n,prob,seed)`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown graph family `{text}`"));
        for (name, arity) in [("path", 1), ("cycle", 1), ("complete", 1), ("grid", 2), ("gnp", 3)] {
            let Some(args) = call_args(text, name) else { continue };
            if args.len() != arity {
                return Err(bad());
            }
            return Ok(match name {
                "path" => Family::Path(num(args[0], "size")?),
                "cycle" => Family::Cycle(num(args[0], "size")?),
                "complete" => Family::Complete(num(args[0], "size")?),
                "grid" => Family::Grid(num(args[0], "size")?, num(args[1], "size")?),
                _ => Family::Gnp {
                    n: num(args[0], "size")?,
                    prob: num(args[1], "probability")?,
                    seed: num(args[2], "seed")?,
                },
            });
        }
        Err(bad())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Path(n) => write!(f, "path({n})"),
            Family::Cycle(n) => write!(f, "cycle({n})"),
            Family::Grid(nx, ny) => write!(f, "grid({nx},{ny})"),
            Family::Complete(n) => write!(f, "complete({n})"),
            Family::Gnp { n, prob, seed } => write!(f, "gnp({n},{prob},{seed})"),
        }
    }
}

impl FromStr for MeasureRule {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text.trim() {
            "unit" => Ok(Self::Unit),
            "degree" => Ok(Self::Degree),
            other => Err(Error::Parse(format!("unknown measure rule `{other}`"))),
        }
    }
}

impl FromStr for WeightRule {
    type Err = Error;

    /// `unit` or `uniform(a,b,seed)`.
    fn from_str(text: &str) -> Result<Self> {
        if text.trim() == "unit" {
            return Ok(Self::Unit);
        }
        match call_args(text, "uniform").as_deref() {
            Some([a, b, seed]) => Ok(Self::Uniform {
                lo: num(a, "weight bound")?,
                hi: num(b, "weight bound")?,
                seed: num(seed, "seed")?,
            }),
            _ => Err(Error::Parse(format!("unknown weight rule `{text}`"))),
        }
    }
}

/// Vertex labels: letters for up to 26 vertices, zero-padded `v…` otherwise,
/// so that sorted id order equals generation order.
fn labels(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        let width = (n - 1).to_string().len();
        (0..n).map(|i| format!("v{i:0width$}")).collect()
    }
}

fn topology(family: &Family) -> Result<(Vec<String>, Vec<(usize, usize)>)> {
    let positive = |n: usize| {
        if n == 0 {
            Err(Error::BadGenerator("graph needs at least one vertex".into()))
        } else {
            Ok(())
        }
    };
    Ok(match *family {
        Family::Path(n) => {
            positive(n)?;
            (labels(n), (1..n).map(|i| (i - 1, i)).collect())
        }
        Family::Cycle(n) => {
            if n < 3 {
                return Err(Error::BadGenerator(format!("cycle needs n >= 3, got {n}")));
            }
            let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            edges.push((0, n - 1));
            (labels(n), edges)
        }
        Family::Complete(n) => {
            positive(n)?;
            let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            (labels(n), edges)
        }
        Family::Grid(nx, ny) => {
            positive(nx * ny)?;
            let wx = nx.to_string().len();
            let wy = ny.to_string().len();
            let ids = (0..nx)
                .flat_map(|i| (0..ny).map(move |j| format!("{i:0wx$}_{j:0wy$}")))
                .collect();
            let idx = |i: usize, j: usize| i * ny + j;
            let mut edges = Vec::new();
            for i in 0..nx {
                for j in 0..ny {
                    if i + 1 < nx {
                        edges.push((idx(i, j), idx(i + 1, j)));
                    }
                    if j + 1 < ny {
                        edges.push((idx(i, j), idx(i, j + 1)));
                    }
                }
            }
            (ids, edges)
        }
        Family::Gnp { n, prob, seed } => {
            positive(n)?;
            if !(prob > 0.0 && prob <= 1.0) {
                return Err(Error::BadGenerator(format!("gnp probability must lie in (0,1], got {prob}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..GNP_RETRIES {
                let edges: Vec<(usize, usize)> = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|_| rng.random::<f64>() < prob)
                    .collect();
                if connected(n, &edges) {
                    return Ok((labels(n), edges));
                }
            }
            return Err(Error::DisconnectedAfterRetries(GNP_RETRIES));
        }
    })
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Graph description for a family under the given measure and weight rules.
pub fn generate_spec(family: &Family, mu: MeasureRule, w: &WeightRule) -> Result<GraphSpec> {
    let (ids, pairs) = topology(family)?;
    let weights: Vec<f64> = match *w {
        WeightRule::Unit => vec![1.0; pairs.len()],
        WeightRule::Uniform { lo, hi, seed } => {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(Error::BadGenerator(format!("uniform weights need 0 < a <= b, got ({lo}, {hi})")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            pairs
                .iter()
                .map(|_| if hi > lo { rng.random_range(lo..hi) } else { lo })
                .collect()
        }
    };
    let mut degree = vec![0.0; ids.len()];
    for (&(a, b), &wt) in pairs.iter().zip(&weights) {
        degree[a] += wt;
        degree[b] += wt;
    }
    let vertices = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let mu = match mu {
                MeasureRule::Unit => 1.0,
                MeasureRule::Degree if degree[i] > 0.0 => degree[i],
                MeasureRule::Degree => {
                    return Err(Error::BadGenerator(format!(
                        "degree measure is zero at isolated vertex `{id}`"
                    )))
                }
            };
            Ok(VertexSpec { id: id.clone(), mu })
        })
        .collect::<Result<_>>()?;
    let edges = pairs
        .iter()
        .zip(&weights)
        .map(|(&(a, b), &wt)| EdgeSpec {
            u: ids[a].clone(),
            v: ids[b].clone(),
            w: wt,
        })
        .collect();
    Ok(GraphSpec { vertices, edges })
}

pub fn generate(family: &Family, mu: MeasureRule, w: &WeightRule) -> Result<WeightedGraph> {
    WeightedGraph::build(&generate_spec(family, mu, w)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_families() {
        let g = generate(&Family::Path(3), MeasureRule::Unit, &WeightRule::Unit).unwrap();
        assert_eq!(g.ids(), ["a", "b", "c"]);
        assert_eq!(g.edges().len(), 2);
        let g = generate(&Family::Grid(2, 2), MeasureRule::Unit, &WeightRule::Unit).unwrap();
        assert_eq!((g.len(), g.edges().len()), (4, 4));
        let g = generate(&Family::Complete(5), MeasureRule::Degree, &WeightRule::Unit).unwrap();
        assert!(g.measure().iter().all(|&m| m == 4.0));
        let g = generate(&Family::Cycle(30), MeasureRule::Unit, &WeightRule::Unit).unwrap();
        assert_eq!(g.ids()[0], "v00");
        assert!(g.is_connected());
    }

    #[test]
    fn gnp_is_deterministic_and_connected() {
        let fam = Family::Gnp {
            n: 20,
            prob: 0.3,
            seed: 7,
        };
        let a = generate_spec(&fam, MeasureRule::Unit, &WeightRule::Unit).unwrap().to_json();
        let b = generate_spec(&fam, MeasureRule::Unit, &WeightRule::Unit).unwrap().to_json();
        assert_eq!(a, b);
        assert!(WeightedGraph::from_json(&a).unwrap().is_connected());
        let sparse = Family::Gnp {
            n: 50,
            prob: 0.001,
            seed: 1,
        };
        assert_eq!(
            generate(&sparse, MeasureRule::Unit, &WeightRule::Unit).unwrap_err(),
            Error::DisconnectedAfterRetries(GNP_RETRIES)
        );
    }

    #[test]
    fn parse_round_trip() {
        for text in ["path(5)", "cycle(4)", "grid(3,4)", "complete(6)", "gnp(20,0.3,7)"] {
            let fam: Family = text.parse().unwrap();
            assert_eq!(fam.to_string(), text);
        }
        assert!("tree(3)".parse::<Family>().is_err());
        assert_eq!(
            "uniform(0.5,2,3)".parse::<WeightRule>().unwrap(),
            WeightRule::Uniform {
                lo: 0.5,
                hi: 2.0,
                seed: 3
            }
        );
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(
            generate(&Family::Path(1), MeasureRule::Degree, &WeightRule::Unit),
            Err(Error::BadGenerator(_))
        ));
        assert!(matches!(
            generate(&Family::Path(0), MeasureRule::Unit, &WeightRule::Unit),
            Err(Error::BadGenerator(_))
        ));
    }
}
