//! Variable typing, state spaces and typed distributions.
//!
//! A [`VariableType`] is a random-variable name together with its identifying
//! attribute bindings, so `Activity(time=t1)` and `Activity(time=t2)` are two
//! distinct types. Everything the algebra checks for compatibility is checked
//! against these types.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance used by [`distributions_equal`] when the caller has no preference.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableType {
    name: String,
    /// `None` marks an identifying attribute whose value is unspecified.
    attributes: BTreeMap<String, Option<String>>,
}

impl VariableType {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_attribute(mut self, attr: impl Into<String>, value: Option<&str>) -> Self {
        self.attributes
            .insert(attr.into(), value.map(str::to_owned));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &BTreeMap<String, Option<String>> {
        &self.attributes
    }
}

impl fmt::Display for VariableType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.attributes.is_empty() {
            f.write_str("(")?;
            for (i, (attr, value)) in self.attributes.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                match value {
                    Some(v) => write!(f, "{attr}={v}")?,
                    None => write!(f, "{attr}=?")?,
                }
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// The ordered states of one variable. Declaration order is the canonical
/// enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    variable: VariableType,
    states: Vec<String>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(
        variable: VariableType,
        states: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if variable.name().is_empty() {
            return Err(Error::InvalidStateSpace {
                variable: variable.to_string(),
                reason: "variable name is empty".into(),
            });
        }
        if states.is_empty() {
            return Err(Error::InvalidStateSpace {
                variable: variable.to_string(),
                reason: "no states".into(),
            });
        }
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(Error::InvalidStateSpace {
                    variable: variable.to_string(),
                    reason: format!("duplicate state `{s}`"),
                });
            }
        }
        Ok(Self { variable, states })
    }

    pub fn variable(&self) -> &VariableType {
        &self.variable
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &str) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    pub fn contains(&self, state: &str) -> bool {
        self.index_of(state).is_some()
    }
}

/// Lookup table from variable type to its declared state space.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateSpaces(BTreeMap<VariableType, StateSpace>);

impl StateSpaces {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, space: StateSpace) -> Option<StateSpace> {
        self.0.insert(space.variable().clone(), space)
    }

    pub fn get(&self, variable: &VariableType) -> Option<&StateSpace> {
        self.0.get(variable)
    }

    pub fn require(&self, variable: &VariableType) -> Result<&StateSpace> {
        self.get(variable)
            .ok_or_else(|| Error::UnknownStateSpace(variable.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &StateSpace> {
        self.0.values()
    }

    /// Size of the joint state space of `variables`, or `None` on overflow or
    /// when a variable has no declared space.
    pub fn joint_size(&self, variables: &[VariableType]) -> Option<usize> {
        variables.iter().try_fold(1usize, |acc, v| {
            self.get(v).and_then(|s| acc.checked_mul(s.len()))
        })
    }
}

impl FromIterator<StateSpace> for StateSpaces {
    fn from_iter<I: IntoIterator<Item = StateSpace>>(iter: I) -> Self {
        let mut spaces = StateSpaces::new();
        for s in iter {
            spaces.insert(s);
        }
        spaces
    }
}

/// A named weight vector over the states of its target variable.
///
/// Weights are not required to sum to one; ratios and frequencies are
/// accepted and only normalized when a dense table is produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedDistribution {
    pub name: String,
    pub target: VariableType,
    pub weights: Vec<f64>,
}

impl TypedDistribution {
    pub fn new(name: impl Into<String>, target: VariableType, weights: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if weights.is_empty() {
            return Err(Error::InvalidDistribution {
                name,
                reason: "no weights".into(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution {
                name,
                reason: format!("weight {w} is not a finite nonnegative number"),
            });
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::DegenerateDistribution(name));
        }
        Ok(Self {
            name,
            target,
            weights,
        })
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Checks the weight count against the target's state space.
    pub fn check_against(&self, space: &StateSpace) -> Result<()> {
        if space.variable() != &self.target {
            return Err(Error::TypeMismatch(format!(
                "distribution `{}` targets `{}`, not `{}`",
                self.name,
                self.target,
                space.variable()
            )));
        }
        if space.len() != self.weights.len() {
            return Err(Error::InvalidDistribution {
                name: self.name.clone(),
                reason: format!(
                    "{} weights for {} states of `{}`",
                    self.weights.len(),
                    space.len(),
                    self.target
                ),
            });
        }
        Ok(())
    }

    pub(crate) fn normalized_weights(&self) -> Result<Vec<f64>> {
        let total = self.total();
        if total.is_nan() || total <= 0.0 || !total.is_finite() {
            return Err(Error::DegenerateDistribution(self.name.clone()));
        }
        Ok(self.weights.iter().map(|w| w / total).collect())
    }

    /// Total order used for deterministic grouping and sorting.
    pub(crate) fn sort_key_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.name
            .cmp(&other.name)
            .then_with(|| self.target.cmp(&other.target))
            .then_with(|| {
                self.weights
                    .iter()
                    .zip(&other.weights)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or_else(|| self.weights.len().cmp(&other.weights.len()))
            })
    }
}

pub fn variable_types_disjoint(a: &BTreeSet<VariableType>, b: &BTreeSet<VariableType>) -> bool {
    a.is_disjoint(b)
}

pub fn distributions_equal(a: &TypedDistribution, b: &TypedDistribution, tol: f64) -> bool {
    if a.target != b.target || a.weights.len() != b.weights.len() {
        return false;
    }
    match (a.normalized_weights(), b.normalized_weights()) {
        (Ok(x), Ok(y)) => x.iter().zip(&y).all(|(p, q)| (p - q).abs() <= tol),
        _ => false,
    }
}

/// Scales the weights so they sum to one.
///
/// A second normalization leaves the weights bit-identical: once the total is
/// within rounding of one, the weights are returned as they are.
pub fn normalize(d: &TypedDistribution) -> Result<TypedDistribution> {
    let total = d.total();
    if total.is_nan() || total <= 0.0 || !total.is_finite() {
        return Err(Error::DegenerateDistribution(d.name.clone()));
    }
    let weights = if (total - 1.0).abs() <= 4.0 * f64::EPSILON * d.weights.len() as f64 {
        d.weights.clone()
    } else {
        d.weights.iter().map(|w| w / total).collect()
    };
    Ok(TypedDistribution {
        name: d.name.clone(),
        target: d.target.clone(),
        weights,
    })
}
