use thiserror::Error;

/// One violated invariant of a tree-map description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("segment {segment} collapses: both endpoints map to {vertex}")]
    CollapsedSegment { segment: String, vertex: String },
    #[error("segment {segment} has endpoint images {from} and {to}, which are not adjacent")]
    NonAdjacentImages {
        segment: String,
        from: String,
        to: String,
    },
    #[error("segment {segment} has non-positive weight {weight}")]
    NonpositiveWeight { segment: String, weight: String },
    #[error("image of {point} is {target}, which is not a vertex")]
    VertexEscapesX0 { point: String, target: String },
    #[error("{0}")]
    Malformed(String),
}

impl Violation {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NotATree(_) => "NOT_A_TREE",
            Violation::CollapsedSegment { .. } => "COLLAPSED_SEGMENT",
            Violation::NonAdjacentImages { .. } => "NON_ADJACENT_IMAGES",
            Violation::NonpositiveWeight { .. } => "NONPOSITIVE_WEIGHT",
            Violation::VertexEscapesX0 { .. } => "VERTEX_ESCAPES_X0",
            Violation::Malformed(_) => "MALFORMED",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tree map: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("resource limit exceeded: {what} (cap {cap})")]
    ResourceLimit { what: String, cap: usize },
    #[error("periodic vertex {0} is untagged")]
    UntaggedCycle(String),
    #[error("spectral certificate search did not converge: {0}")]
    Nonconvergence(String),
    #[error("invalid graft: {0}")]
    InvalidGraft(String),
    #[error("no admissible branch for the orbit")]
    NoAdmissibleBranch,
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "INVALID_TREE_MAP",
            Error::InvalidMatrix(_) => "INVALID_MATRIX",
            Error::ResourceLimit { .. } => "RESOURCE_LIMIT",
            Error::UntaggedCycle(_) => "UNTAGGED_CYCLE",
            Error::Nonconvergence(_) => "NONCONVERGENCE",
            Error::InvalidGraft(_) => "INVALID_GRAFT",
            Error::NoAdmissibleBranch => "NO_ADMISSIBLE_BRANCH",
            Error::Internal(_) => "INTERNAL",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::Parse { .. } => "PARSE_ERROR",
        }
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::Invalid(v) => v,
            _ => &[],
        }
    }

    pub fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
