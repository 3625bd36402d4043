//! Discrete calculus, eigenvalue problems and variational solvers for
//! Yamabe-type equations on weighted finite graphs.
//!
//! The crate covers local problems on a domain Ω with Dirichlet conditions on
//! its boundary and global problems on the whole vertex set with a positive
//! potential `h`:
//!
//! * [`graph`]: the weighted graph, domains and vertex fields;
//! * [`calculus`]: Laplacian, gradient forms, `p`-Laplacian and 𝓛_{m,p};
//! * [`spectrum`]: first eigenvalues and Sobolev constants;
//! * [`variational`]: admissible spaces, energies and hypothesis checks;
//! * [`solvers`]: mountain-pass and Nehari solvers with certificates;
//! * [`io`]: generators and file formats.
//!
//! ```
//! use graph_yamabe::prelude::*;
//!
//! let g = generate(&Family::Path(5), MeasureRule::Unit, &WeightRule::Unit).unwrap();
//! let dom = DomainDecomposition::from_ids(&g, &["b", "c", "d"]).unwrap();
//! let prob = ProblemSpec::thm1(&g, &dom, 0.0, 4.0).unwrap();
//! let report = mountain_pass_solve(&prob, &SolverConfig::default()).unwrap();
//! assert!((report.solution[2] - 2f64.sqrt()).abs() < 1e-8);
//! ```

pub mod calculus;
pub mod error;
pub mod graph;
pub mod io;
pub mod solvers;
pub mod spectrum;
pub mod variational;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::calculus::OperatorOrder;
    pub use crate::error::{Error, Result};
    pub use crate::graph::{DomainDecomposition, GraphSpec, VertexField, WeightedGraph};
    pub use crate::io::generate::{generate, Family, MeasureRule, WeightRule};
    pub use crate::solvers::{mountain_pass_solve, nehari_solve, SolverConfig, SolverReport};
    pub use crate::spectrum::{lambda1, lambda_mp, lambda_p, EigenConfig, EigenResult};
    pub use crate::variational::{Nonlinearity, NonlinearitySpec, ProblemSpec, Sidedness, VariantKind};
}
