use thiserror::Error;

use crate::algebra::Atom;
use crate::types::{TypedDistribution, VariableType};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    /// Cross (or collect) was applied to a bare typed distribution.
    #[error("operator is undefined for a typed distribution operand `{0}`")]
    DistributionOperand(String),

    #[error("cross is undefined for two asymmetry mappings")]
    MappingMapping,

    #[error("overlapping variable types: {0}")]
    OverlappingTypes(String),

    #[error("expected a pure brace: {0}")]
    NotABrace(String),

    #[error("malformed element: {0}")]
    Malformed(String),

    #[error("invalid state space for `{variable}`: {reason}")]
    InvalidStateSpace { variable: String, reason: String },

    #[error("invalid distribution `{name}`: {reason}")]
    InvalidDistribution { name: String, reason: String },

    #[error("degenerate distribution `{0}`: total weight is zero")]
    DegenerateDistribution(String),

    #[error("atom limit of {limit} exceeded")]
    AtomLimit { limit: usize },

    #[error("variable sets differ: {0}")]
    VariableSetMismatch(String),

    #[error("no state space declared for `{0}`")]
    UnknownStateSpace(VariableType),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("atom {witness} is covered by two mappings (`{first}` and `{second}`)")]
    Overlap {
        first: String,
        second: String,
        witness: Atom,
    },

    #[error("conflicting distributions for atom {witness}: `{}` vs `{}`", .first.name, .second.name)]
    Conflict {
        witness: Atom,
        first: Box<TypedDistribution>,
        second: Box<TypedDistribution>,
    },

    #[error("{total} parent atom(s) not covered, e.g. {}", fmt_atoms(.uncovered))]
    IncompleteCoverage { uncovered: Vec<Atom>, total: usize },

    #[error("validation failed: {0}")]
    Invalid(String),
}

impl Error {
    /// Stable machine-readable code for the error category.
    pub fn code(&self) -> &'static str {
        match self {
            Error::TypeMismatch(_) => "type-mismatch",
            Error::DistributionOperand(_) => "distribution-operand",
            Error::MappingMapping => "mapping-mapping",
            Error::OverlappingTypes(_) => "overlapping-types",
            Error::NotABrace(_) => "not-a-brace",
            Error::Malformed(_) => "malformed-element",
            Error::InvalidStateSpace { .. } => "invalid-state-space",
            Error::InvalidDistribution { .. } => "invalid-distribution",
            Error::DegenerateDistribution(_) => "degenerate-distribution",
            Error::AtomLimit { .. } => "atom-limit",
            Error::VariableSetMismatch(_) => "variable-set-mismatch",
            Error::UnknownStateSpace(_) => "unknown-state-space",
            Error::Precondition(_) => "precondition",
            Error::Overlap { .. } => "overlap",
            Error::Conflict { .. } => "conflict",
            Error::IncompleteCoverage { .. } => "incomplete-coverage",
            Error::Invalid(_) => "invalid",
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::AtomLimit { .. })
    }
}

fn fmt_atoms(atoms: &[Atom]) -> String {
    atoms
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
