use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex `{0}` has non-positive measure {1}")]
    NonPositiveMeasure(String, f64),
    #[error("edge {0}-{1} has non-positive weight {2}")]
    NonPositiveWeight(String, String, f64),
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(String, String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("edge references unknown vertex `{0}`")]
    UnknownVertexInEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("domain is empty")]
    EmptyDomain,
    #[error("domain is not connected in the induced subgraph")]
    DisconnectedDomain,
    #[error("domain has empty interior")]
    EmptyInterior,
    #[error("exponent must satisfy {constraint}, got {value}")]
    BadExponent { constraint: &'static str, value: f64 },
    #[error("derivative order must be at least {min}, got {value}")]
    BadOrder { min: usize, value: usize },
    #[error("potential must be positive everywhere; vertex `{0}` has {1}")]
    NonPositivePotential(String, f64),
    #[error("boundary constraints leave no admissible field; enlarge the domain")]
    TrivialAdmissibleSpace,
    #[error("field is not in the admissible class (projection defect {0:.3e})")]
    InadmissibleField(f64),
    #[error("field has {got} values, graph has {expected} vertices")]
    FieldLength { expected: usize, got: usize },
    #[error("non-finite value in field at vertex `{0}`")]
    NonFiniteValue(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("mountain-pass geometry not found: {0}")]
    GeometryNotFound(String),
    #[error("no positive Nehari root along any direction")]
    NoNehariRoot,
    #[error("iteration budget of {0} steps exhausted")]
    MaxIterations(usize),
    #[error("mountain-pass path stalled with gradient norm {0:.3e}")]
    StalledPath(f64),
    #[error("only the trivial solution was found")]
    TrivialSolution,
    #[error("graph is disconnected after {0} retries")]
    DisconnectedAfterRetries(usize),
    #[error("invalid generator parameters: {0}")]
    BadGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("field file does not match the graph: {0}")]
    VertexMismatch(String),
}
