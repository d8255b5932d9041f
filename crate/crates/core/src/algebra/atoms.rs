//! Atom-set semantics: the fully distributed normal form of an element.
//!
//! An atom is one joint assignment of states to the element's variables.
//! Variables are kept in sorted order, so two elements that differ only in
//! operand order have identical atom sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{element_type_of, Element};
use crate::error::{Error, Result};
use crate::par;
use crate::types::{StateSpaces, TypedDistribution, VariableType};
use crate::Config;

/// One joint assignment, states listed in the owning set's variable order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Atom(pub Vec<String>);

impl Atom {
    pub fn new<S: Into<String>>(states: impl IntoIterator<Item = S>) -> Self {
        Atom(states.into_iter().map(Into::into).collect())
    }

    pub fn states(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomSet {
    variables: Vec<VariableType>,
    entries: BTreeMap<Atom, Option<Arc<TypedDistribution>>>,
    mapped: bool,
}

impl AtomSet {
    pub fn empty() -> Self {
        Self {
            variables: Vec::new(),
            entries: BTreeMap::new(),
            mapped: false,
        }
    }

    fn single(variable: &VariableType, state: &str) -> Self {
        Self {
            variables: vec![variable.clone()],
            entries: BTreeMap::from([(Atom(vec![state.to_owned()]), None)]),
            mapped: false,
        }
    }

    /// Sorted variable list the atom tuples are laid out in.
    pub fn variables(&self) -> &[VariableType] {
        &self.variables
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.entries.keys()
    }

    pub fn atom_set(&self) -> BTreeSet<Atom> {
        self.entries.keys().cloned().collect()
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.entries.contains_key(atom)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether every atom carries a distribution (the set came from a mapping).
    pub fn is_mapped(&self) -> bool {
        self.mapped
    }

    pub fn distribution(&self, atom: &Atom) -> Option<&TypedDistribution> {
        self.entries.get(atom).and_then(|d| d.as_deref())
    }

    /// Atom-to-distribution pairs; `None` distributions for pure braces.
    pub fn entries(&self) -> impl Iterator<Item = (&Atom, Option<&TypedDistribution>)> {
        self.entries.iter().map(|(a, d)| (a, d.as_deref()))
    }

    /// Equality of variables and atoms, ignoring any distributions.
    pub fn same_atoms(&self, other: &AtomSet) -> bool {
        self.variables == other.variables && self.entries.keys().eq(other.entries.keys())
    }

    fn with_distribution(mut self, d: Arc<TypedDistribution>) -> Self {
        for slot in self.entries.values_mut() {
            *slot = Some(d.clone());
        }
        self.mapped = true;
        self
    }

    fn union(mut self, other: AtomSet, cfg: &Config) -> Result<AtomSet> {
        if self.is_empty() && self.variables.is_empty() {
            return Ok(other);
        }
        if other.is_empty() && other.variables.is_empty() {
            return Ok(self);
        }
        if self.variables != other.variables || self.mapped != other.mapped {
            return Err(Error::TypeMismatch(format!(
                "cannot collect atoms over [{}] with atoms over [{}]",
                fmt_vars(&self.variables),
                fmt_vars(&other.variables)
            )));
        }
        for (atom, d) in other.entries {
            match self.entries.get(&atom) {
                Some(Some(prev)) => {
                    let next = d.as_ref().expect("mapped sets carry distributions");
                    if prev != next {
                        return Err(Error::Conflict {
                            witness: atom,
                            first: Box::new((**prev).clone()),
                            second: Box::new((**next).clone()),
                        });
                    }
                }
                Some(None) => {}
                None => {
                    self.entries.insert(atom, d);
                }
            }
        }
        if self.entries.len() > cfg.max_atoms {
            return Err(Error::AtomLimit {
                limit: cfg.max_atoms,
            });
        }
        Ok(self)
    }

    fn product(self, other: AtomSet, cfg: &Config) -> Result<AtomSet> {
        let shared: Vec<String> = self
            .variables
            .iter()
            .filter(|v| other.variables.contains(v))
            .map(|v| v.to_string())
            .collect();
        if !shared.is_empty() {
            return Err(Error::OverlappingTypes(shared.join(", ")));
        }
        if self.mapped && other.mapped {
            return Err(Error::MappingMapping);
        }
        let size = self.len().saturating_mul(other.len());
        if size > cfg.max_atoms {
            return Err(Error::AtomLimit {
                limit: cfg.max_atoms,
            });
        }

        // Merge the two sorted variable lists, remembering where each slot
        // of the merged tuple is read from.
        let mut variables = Vec::with_capacity(self.variables.len() + other.variables.len());
        let mut layout = Vec::with_capacity(variables.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.variables.len() || j < other.variables.len() {
            let take_left = j >= other.variables.len()
                || (i < self.variables.len() && self.variables[i] < other.variables[j]);
            if take_left {
                variables.push(self.variables[i].clone());
                layout.push((true, i));
                i += 1;
            } else {
                variables.push(other.variables[j].clone());
                layout.push((false, j));
                j += 1;
            }
        }

        let left: Vec<_> = self.entries.iter().collect();
        let right: Vec<_> = other.entries.iter().collect();
        let pairs = par::flat_map(cfg.execution, &left, |(la, ld)| {
            right
                .iter()
                .map(|(ra, rd)| {
                    let states = layout
                        .iter()
                        .map(|&(from_left, k)| {
                            if from_left {
                                la.0[k].clone()
                            } else {
                                ra.0[k].clone()
                            }
                        })
                        .collect();
                    (Atom(states), (*ld).clone().or_else(|| (*rd).clone()))
                })
                .collect::<Vec<_>>()
        });
        Ok(AtomSet {
            variables,
            entries: pairs.into_iter().collect(),
            mapped: self.mapped || other.mapped,
        })
    }

    /// Canonical element for this atom set.
    pub fn to_element(&self) -> Element {
        if !self.mapped {
            return brace_from_atoms(&self.variables, self.entries.keys());
        }
        let mut groups: Vec<(Arc<TypedDistribution>, Vec<&Atom>)> = Vec::new();
        for (atom, d) in &self.entries {
            let d = d.as_ref().expect("mapped sets carry distributions");
            match groups.iter_mut().find(|(g, _)| g == d) {
                Some((_, atoms)) => atoms.push(atom),
                None => groups.push((d.clone(), vec![atom])),
            }
        }
        groups.sort_by(|a, b| a.0.sort_key_cmp(&b.0));
        let mut mappings: Vec<Element> = groups
            .into_iter()
            .map(|(d, atoms)| Element::Mapping {
                brace: Box::new(brace_from_atoms(&self.variables, atoms.into_iter())),
                distribution: (*d).clone(),
            })
            .collect();
        match mappings.len() {
            0 => Element::Neutral,
            1 => mappings.pop().unwrap(),
            _ => Element::Collection(mappings),
        }
    }
}

fn fmt_vars(vars: &[VariableType]) -> String {
    vars.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Builds the canonical brace (a collection of crossings of simple braces)
/// for atoms listed over `variables`.
pub(crate) fn brace_from_atoms<'a>(
    variables: &[VariableType],
    atoms: impl Iterator<Item = &'a Atom>,
) -> Element {
    let mut terms: Vec<Element> = atoms
        .map(|atom| {
            let mut simples: Vec<Element> = variables
                .iter()
                .zip(&atom.0)
                .map(|(v, s)| Element::simple(v.clone(), s.clone()))
                .collect();
            if simples.len() == 1 {
                simples.pop().unwrap()
            } else {
                Element::Crossing(simples)
            }
        })
        .collect();
    match terms.len() {
        0 => Element::Neutral,
        1 => terms.pop().unwrap(),
        _ => Element::Collection(terms),
    }
}

pub fn atoms(e: &Element) -> Result<AtomSet> {
    atoms_with(e, &Config::default())
}

/// Computes the atom set of a brace or mapping, failing with
/// [`Error::AtomLimit`] when any intermediate set exceeds `cfg.max_atoms`.
pub fn atoms_with(e: &Element, cfg: &Config) -> Result<AtomSet> {
    match e {
        Element::Neutral => Ok(AtomSet::empty()),
        Element::Simple { variable, state } => Ok(AtomSet::single(variable, state)),
        Element::Distribution(d) => Err(Error::DistributionOperand(d.name.clone())),
        Element::Mapping {
            brace,
            distribution,
        } => {
            let base = atoms_with(brace, cfg)?;
            if base.mapped {
                return Err(Error::Malformed(
                    "asymmetry mapping brace contains a distribution".into(),
                ));
            }
            if base.variables.contains(&distribution.target) {
                return Err(Error::OverlappingTypes(distribution.target.to_string()));
            }
            Ok(base.with_distribution(Arc::new(distribution.clone())))
        }
        Element::Collection(ops) => ops
            .iter()
            .filter(|op| !op.is_neutral())
            .try_fold(None::<AtomSet>, |acc, op| {
                let s = atoms_with(op, cfg)?;
                Ok(Some(match acc {
                    None => s,
                    Some(acc) => acc.union(s, cfg)?,
                }))
            })
            .map(|s| s.unwrap_or_else(AtomSet::empty)),
        Element::Crossing(ops) => ops
            .iter()
            .filter(|op| !op.is_neutral())
            .try_fold(None::<AtomSet>, |acc, op| {
                let s = atoms_with(op, cfg)?;
                Ok(Some(match acc {
                    None => s,
                    Some(acc) => acc.product(s, cfg)?,
                }))
            })
            .map(|s| s.unwrap_or_else(AtomSet::empty)),
    }
}

fn require_brace(e: &Element) -> Result<()> {
    if let Element::Distribution(d) = e {
        return Err(Error::NotABrace(format!("typed distribution `{}`", d.name)));
    }
    let t = element_type_of(e)?;
    if !t.is_brace() {
        return Err(Error::NotABrace(format!("element of type {t}")));
    }
    Ok(())
}

/// Equality of two pure braces: same element type and same atoms.
pub fn braces_equal(a: &Element, b: &Element) -> Result<bool> {
    require_brace(a)?;
    require_brace(b)?;
    if element_type_of(a)? != element_type_of(b)? {
        return Ok(false);
    }
    Ok(atoms(a)?.same_atoms(&atoms(b)?))
}

/// Whether two pure braces over the same variables share no atom.
pub fn braces_disjoint(a: &Element, b: &Element) -> Result<bool> {
    require_brace(a)?;
    require_brace(b)?;
    let (sa, sb) = (atoms(a)?, atoms(b)?);
    if sa.is_empty() || sb.is_empty() {
        return Ok(true);
    }
    if sa.variables != sb.variables {
        return Err(Error::VariableSetMismatch(format!(
            "[{}] vs [{}]",
            fmt_vars(&sa.variables),
            fmt_vars(&sb.variables)
        )));
    }
    Ok(!sa.entries.keys().any(|atom| sb.contains(atom)))
}

pub fn canonicalize(e: &Element) -> Result<Element> {
    canonicalize_with(e, &Config::default())
}

/// Normal form: a collection of crossings of simple braces, sorted, with
/// mappings grouped by distribution.
pub fn canonicalize_with(e: &Element, cfg: &Config) -> Result<Element> {
    if e.is_neutral() {
        return Ok(Element::Neutral);
    }
    Ok(atoms_with(e, cfg)?.to_element())
}

/// Every joint assignment of `variables`, in mixed-radix order over each
/// variable's declared states (the last variable varies fastest).
pub fn enumerate_space(
    variables: &[VariableType],
    spaces: &StateSpaces,
    cfg: &Config,
) -> Result<Vec<Atom>> {
    let spaces: Vec<_> = variables
        .iter()
        .map(|v| spaces.require(v))
        .collect::<Result<_>>()?;
    let total = spaces
        .iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s.len()))
        .filter(|n| *n <= cfg.max_atoms)
        .ok_or(Error::AtomLimit {
            limit: cfg.max_atoms,
        })?;
    Ok(par::map_range(cfg.execution, total, |mut index| {
        let mut states = vec![String::new(); spaces.len()];
        for (slot, space) in states.iter_mut().zip(&spaces).rev() {
            *slot = space.states()[index % space.len()].clone();
            index /= space.len();
        }
        Atom(states)
    }))
}
