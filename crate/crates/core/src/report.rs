use std::fmt;

use serde::Serialize;

use crate::algebra::Atom;

/// Outcome of validating a partition, network or factored CPT.
///
/// An empty violation list means valid, except that a report whose coverage
/// is [`Coverage::NotChecked`] is never valid: the check hit the atom limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub subject: String,
    pub violations: Vec<Violation>,
    pub coverage: Coverage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Coverage {
    /// Every parent atom is covered.
    Complete { total: usize },
    /// Some parent atoms are uncovered. Only a violation when coverage is required.
    Partial { covered: usize, total: usize },
    /// Hit the atom limit; the report can not be trusted as a pass.
    NotChecked { reason: String },
    /// Not attempted because other violations make it meaningless.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    Overlap {
        first: String,
        second: String,
        witness: Atom,
    },
    Uncovered {
        count: usize,
        sample: Vec<Atom>,
    },
    MissingDistribution {
        element: String,
    },
    TargetMismatch {
        element: String,
        expected: String,
        found: String,
    },
    DependentIsParent {
        dependent: String,
    },
    TypeMismatch {
        element: String,
        detail: String,
    },
    UnknownVariable {
        variable: String,
    },
    UnknownState {
        variable: String,
        state: String,
    },
    InvalidDistribution {
        name: String,
        detail: String,
    },
    ContextOverlap {
        detail: String,
    },
}

impl ValidationReport {
    pub(crate) fn new(subject: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            violations: Vec::new(),
            coverage: Coverage::Skipped,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && !self.limit_exceeded()
    }

    /// True when coverage could not be checked within the atom limit.
    pub fn limit_exceeded(&self) -> bool {
        matches!(self.coverage, Coverage::NotChecked { .. })
    }

    pub fn overlaps(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| matches!(v, Violation::Overlap { .. }))
    }

    /// One-line summary used in error messages.
    pub fn summary(&self) -> String {
        let mut parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        if let Coverage::NotChecked { reason } = &self.coverage {
            parts.push(format!("not checked: {reason}"));
        }
        format!("{}: {}", self.subject, parts.join("; "))
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap {
                first,
                second,
                witness,
            } => write!(f, "elements `{first}` and `{second}` overlap at {witness}"),
            Violation::Uncovered { count, sample } => {
                let sample: Vec<String> = sample.iter().map(|a| a.to_string()).collect();
                write!(f, "{count} uncovered atom(s): {}", sample.join(", "))?;
                if *count > sample.len() {
                    f.write_str(", ...")?;
                }
                Ok(())
            }
            Violation::MissingDistribution { element } => {
                write!(f, "element `{element}` has no distribution")
            }
            Violation::TargetMismatch {
                element,
                expected,
                found,
            } => write!(
                f,
                "element `{element}` maps to a distribution for `{found}`, expected `{expected}`"
            ),
            Violation::DependentIsParent { dependent } => {
                write!(f, "dependent `{dependent}` is also a parent")
            }
            Violation::TypeMismatch { element, detail } => {
                write!(f, "element `{element}`: {detail}")
            }
            Violation::UnknownVariable { variable } => {
                write!(f, "no state space for `{variable}`")
            }
            Violation::UnknownState { variable, state } => {
                write!(f, "`{state}` is not a state of `{variable}`")
            }
            Violation::InvalidDistribution { name, detail } => {
                write!(f, "distribution `{name}`: {detail}")
            }
            Violation::ContextOverlap { detail } => write!(f, "context: {detail}"),
        }
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coverage::Complete { total } => write!(f, "covers all {total} parent atoms"),
            Coverage::Partial { covered, total } => {
                write!(f, "covers {covered} of {total} parent atoms")
            }
            Coverage::NotChecked { reason } => write!(f, "coverage not checked: {reason}"),
            Coverage::Skipped => f.write_str("coverage skipped"),
        }
    }
}
