//! Admissible function classes, energy functionals and hypothesis checks.

mod functional;
mod hypotheses;
mod nonlinearity;
mod space;

pub use functional::{full_norm, norm, ProblemSpec, Variant, VariantKind};
pub use hypotheses::{
    check_hypotheses, check_hypotheses_on, Evidence, HypothesisCheck, HypothesisReport, SamplingGrid, Witness,
};
pub use nonlinearity::{adaptive_simpson, CustomNonlinearity, Nonlinearity, NonlinearitySpec, Sidedness, VertexFn};
pub use space::{AdmissibleSpace, SpaceKind};
