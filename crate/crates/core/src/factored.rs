//! Factored CPTs: collections of asymmetry mappings with disjoint braces.
//!
//! A factored CPT need not cover the whole parent space. Coverage is only
//! demanded by [`expand_to_cpt`], which produces the dense table.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::{
    brace_from_atoms, cross, element_type_of, enumerate_space, whole_element, Atom, AtomSet,
    Element,
};
use crate::error::{Error, Result};
use crate::network::check_braces;
use crate::par;
use crate::report::{ValidationReport, Violation};
use crate::types::{distributions_equal, StateSpaces, TypedDistribution, VariableType};
use crate::Config;

const UNCOVERED_SAMPLE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct FactorMapping {
    pub name: String,
    pub brace: Element,
    pub distribution: TypedDistribution,
}

impl FactorMapping {
    pub fn new(name: impl Into<String>, brace: Element, distribution: TypedDistribution) -> Self {
        Self {
            name: name.into(),
            brace,
            distribution,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactoredCpt {
    name: String,
    dependent: VariableType,
    /// Sorted, without duplicates.
    parents: Vec<VariableType>,
    mappings: Vec<FactorMapping>,
}

impl FactoredCpt {
    pub fn new(
        name: impl Into<String>,
        dependent: VariableType,
        parents: impl IntoIterator<Item = VariableType>,
        mappings: Vec<FactorMapping>,
    ) -> Self {
        let parents: BTreeSet<VariableType> = parents.into_iter().collect();
        Self {
            name: name.into(),
            dependent,
            parents: parents.into_iter().collect(),
            mappings,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dependent(&self) -> &VariableType {
        &self.dependent
    }

    pub fn parents(&self) -> &[VariableType] {
        &self.parents
    }

    pub fn mappings(&self) -> &[FactorMapping] {
        &self.mappings
    }

    /// Atom-to-distribution function over the parent space, computed from
    /// the mappings. Fails on conflicting overlaps.
    pub fn atom_map(&self, cfg: &Config) -> Result<BTreeMap<Atom, TypedDistribution>> {
        let mut out = BTreeMap::new();
        for m in &self.mappings {
            for atom in crate::algebra::atoms_with(&m.brace, cfg)?.atoms() {
                if let Some(prev) = out.insert(atom.clone(), m.distribution.clone()) {
                    if prev != m.distribution {
                        return Err(Error::Conflict {
                            witness: atom.clone(),
                            first: Box::new(prev),
                            second: Box::new(m.distribution.clone()),
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn validate_factored(f: &FactoredCpt, spaces: &StateSpaces, cfg: &Config) -> ValidationReport {
    validate_with_atoms(f, spaces, cfg).0
}

fn validate_with_atoms(
    f: &FactoredCpt,
    spaces: &StateSpaces,
    cfg: &Config,
) -> (ValidationReport, Option<Vec<AtomSet>>) {
    let mut report = ValidationReport::new(format!("factored {}", f.name));
    let items: Vec<(&str, &Element)> = f
        .mappings
        .iter()
        .map(|m| (m.name.as_str(), &m.brace))
        .collect();
    let sets = check_braces(&mut report, &f.parents, &items, spaces, false, cfg);

    if f.parents.contains(&f.dependent) {
        report.violations.push(Violation::DependentIsParent {
            dependent: f.dependent.to_string(),
        });
    }
    let dep_space = spaces.get(&f.dependent);
    if dep_space.is_none() {
        report.violations.push(Violation::UnknownVariable {
            variable: f.dependent.to_string(),
        });
    }
    for m in &f.mappings {
        if m.distribution.target != f.dependent {
            report.violations.push(Violation::TargetMismatch {
                element: m.name.clone(),
                expected: f.dependent.to_string(),
                found: m.distribution.target.to_string(),
            });
        } else if let Some(Err(e)) = dep_space.map(|s| m.distribution.check_against(s)) {
            report.violations.push(Violation::InvalidDistribution {
                name: m.distribution.name.clone(),
                detail: e.to_string(),
            });
        }
    }
    (report, sets)
}

/// Validates and returns per-mapping atom sets, converting a failed report
/// into the matching error.
fn checked_atoms(f: &FactoredCpt, spaces: &StateSpaces, cfg: &Config) -> Result<Vec<AtomSet>> {
    let (report, sets) = validate_with_atoms(f, spaces, cfg);
    if report.limit_exceeded() {
        return Err(Error::AtomLimit {
            limit: cfg.max_atoms,
        });
    }
    if let Some(Violation::Overlap {
        first,
        second,
        witness,
    }) = report.overlaps().next()
    {
        return Err(Error::Overlap {
            first: first.clone(),
            second: second.clone(),
            witness: witness.clone(),
        });
    }
    match sets {
        Some(sets) if report.is_valid() => Ok(sets),
        _ => Err(Error::Invalid(report.summary())),
    }
}

/// Crosses every brace with `context`, making the context variables explicit
/// parents. Distributions are unchanged.
pub fn lift_context(f: &FactoredCpt, context: &Element) -> Result<FactoredCpt> {
    if context.is_neutral() {
        return Ok(f.clone());
    }
    let t = element_type_of(context)?;
    if !t.is_brace() || matches!(context, Element::Distribution(_)) {
        return Err(Error::NotABrace(format!("context of type {t}")));
    }
    let clash: Vec<String> = t
        .brace_types
        .iter()
        .filter(|v| f.parents.contains(v) || **v == f.dependent)
        .map(|v| v.to_string())
        .collect();
    if !clash.is_empty() {
        return Err(Error::OverlappingTypes(clash.join(", ")));
    }
    let mappings = f
        .mappings
        .iter()
        .map(|m| {
            Ok(FactorMapping::new(
                m.name.clone(),
                cross(m.brace.clone(), context.clone())?,
                m.distribution.clone(),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(FactoredCpt::new(
        f.name.clone(),
        f.dependent.clone(),
        f.parents.iter().cloned().chain(t.brace_types),
        mappings,
    ))
}

/// Extends the parent set to `target`, crossing each brace with the whole
/// element of every added variable.
pub fn align_parents(
    f: &FactoredCpt,
    target: &[VariableType],
    spaces: &StateSpaces,
) -> Result<FactoredCpt> {
    let target: BTreeSet<VariableType> = target.iter().cloned().collect();
    if let Some(missing) = f.parents.iter().find(|p| !target.contains(p)) {
        return Err(Error::Precondition(format!(
            "target parents omit `{missing}` of `{}`",
            f.name
        )));
    }
    if target.contains(&f.dependent) {
        return Err(Error::Precondition(format!(
            "dependent `{}` can not become a parent",
            f.dependent
        )));
    }
    let added: Vec<Element> = target
        .iter()
        .filter(|v| !f.parents.contains(v))
        .map(|v| spaces.require(v).map(whole_element))
        .collect::<Result<_>>()?;
    if added.is_empty() {
        return Ok(f.clone());
    }
    let mappings = f
        .mappings
        .iter()
        .map(|m| {
            let brace = added
                .iter()
                .try_fold(m.brace.clone(), |acc, w| cross(acc, w.clone()))?;
            Ok(FactorMapping::new(
                m.name.clone(),
                brace,
                m.distribution.clone(),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(FactoredCpt::new(
        f.name.clone(),
        f.dependent.clone(),
        target,
        mappings,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CombinePolicy {
    /// Any atom covered by both inputs is a conflict.
    #[default]
    ErrorOnOverlap,
    /// Shared atoms are accepted when both distributions agree within `tol`.
    MergeIfEqual { tol: f64 },
}

fn unique_name(taken: &mut BTreeSet<String>, name: &str) -> String {
    if taken.insert(name.to_owned()) {
        return name.to_owned();
    }
    (2..)
        .map(|i| format!("{name}-{i}"))
        .find(|candidate| taken.insert(candidate.clone()))
        .expect("unbounded suffixes")
}

/// Combines two factored CPTs for the same dependent variable.
///
/// Both inputs are aligned to the union of their parents first. Mappings of
/// `f2` whose atoms are already covered by `f1` are trimmed to the uncovered
/// remainder (after the policy has accepted the shared atoms).
pub fn combine(
    f1: &FactoredCpt,
    f2: &FactoredCpt,
    policy: CombinePolicy,
    spaces: &StateSpaces,
    cfg: &Config,
) -> Result<FactoredCpt> {
    if f1.dependent != f2.dependent {
        return Err(Error::Precondition(format!(
            "cannot combine CPTs for `{}` and `{}`",
            f1.dependent, f2.dependent
        )));
    }
    let parents: Vec<VariableType> = f1
        .parents
        .iter()
        .chain(&f2.parents)
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let a1 = align_parents(f1, &parents, spaces)?;
    let a2 = align_parents(f2, &parents, spaces)?;
    let sets1 = checked_atoms(&a1, spaces, cfg)?;
    let sets2 = checked_atoms(&a2, spaces, cfg)?;

    let mut owner: BTreeMap<&Atom, usize> = BTreeMap::new();
    for (i, set) in sets1.iter().enumerate() {
        for atom in set.atoms() {
            owner.insert(atom, i);
        }
    }

    let mut taken: BTreeSet<String> = a1.mappings.iter().map(|m| m.name.clone()).collect();
    let mut mappings = a1.mappings.clone();
    for (m, set) in a2.mappings.iter().zip(&sets2) {
        let mut shared = false;
        for atom in set.atoms() {
            let Some(&i) = owner.get(atom) else { continue };
            shared = true;
            let d1 = &a1.mappings[i].distribution;
            let accepted = match policy {
                CombinePolicy::ErrorOnOverlap => false,
                CombinePolicy::MergeIfEqual { tol } => {
                    distributions_equal(d1, &m.distribution, tol)
                }
            };
            if !accepted {
                return Err(Error::Conflict {
                    witness: atom.clone(),
                    first: Box::new(d1.clone()),
                    second: Box::new(m.distribution.clone()),
                });
            }
        }
        let brace = if shared {
            let rest: Vec<&Atom> = set.atoms().filter(|a| !owner.contains_key(a)).collect();
            if rest.is_empty() {
                continue;
            }
            brace_from_atoms(set.variables(), rest.into_iter())
        } else {
            m.brace.clone()
        };
        let name = unique_name(&mut taken, &m.name);
        mappings.push(FactorMapping::new(name, brace, m.distribution.clone()));
    }
    Ok(FactoredCpt::new(
        f1.name.clone(),
        f1.dependent.clone(),
        parents,
        mappings,
    ))
}

/// A fully expanded table: one normalized row per parent atom.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCpt {
    pub dependent: VariableType,
    pub dependent_states: Vec<String>,
    /// Sorted; atom tuples follow this order.
    pub parents: Vec<VariableType>,
    pub rows: BTreeMap<Atom, Vec<f64>>,
}

impl DenseCpt {
    pub fn row(&self, atom: &Atom) -> Option<&[f64]> {
        self.rows.get(atom).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of distinct rows (bitwise comparison).
    pub fn distinct_rows(&self) -> usize {
        self.rows
            .values()
            .map(|r| r.iter().map(|p| p.to_bits()).collect::<Vec<_>>())
            .collect::<BTreeSet<_>>()
            .len()
    }
}

/// Expands an exhaustive factored CPT into a dense table.
pub fn expand_to_cpt(f: &FactoredCpt, spaces: &StateSpaces, cfg: &Config) -> Result<DenseCpt> {
    let sets = checked_atoms(f, spaces, cfg)?;
    let dep_space = spaces.require(&f.dependent)?;
    let normalized: Vec<Vec<f64>> = f
        .mappings
        .iter()
        .map(|m| m.distribution.normalized_weights())
        .collect::<Result<_>>()?;

    let mut owner: BTreeMap<&Atom, usize> = BTreeMap::new();
    for (i, set) in sets.iter().enumerate() {
        for atom in set.atoms() {
            owner.insert(atom, i);
        }
    }
    let all = enumerate_space(&f.parents, spaces, cfg)?;
    let found = par::map(cfg.execution, &all, |atom| owner.get(atom).copied());

    let uncovered: Vec<&Atom> = all
        .iter()
        .zip(&found)
        .filter(|(_, i)| i.is_none())
        .map(|(a, _)| a)
        .collect();
    if !uncovered.is_empty() {
        return Err(Error::IncompleteCoverage {
            total: uncovered.len(),
            uncovered: uncovered
                .into_iter()
                .take(UNCOVERED_SAMPLE)
                .cloned()
                .collect(),
        });
    }
    let rows = all
        .into_iter()
        .zip(found)
        .map(|(atom, i)| {
            let i = i.expect("coverage checked");
            (atom, normalized[i].clone())
        })
        .collect();
    Ok(DenseCpt {
        dependent: f.dependent.clone(),
        dependent_states: dep_space.states().to_vec(),
        parents: f.parents.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionStats {
    pub name: String,
    pub dense_rows: usize,
    pub mappings: usize,
    pub distinct_distributions: usize,
    pub covered_atoms: usize,
    /// `dense_rows / mappings`; absent when there are no mappings.
    pub ratio: Option<f64>,
}

pub fn compression_stats(
    f: &FactoredCpt,
    spaces: &StateSpaces,
    cfg: &Config,
) -> Result<CompressionStats> {
    let sets = checked_atoms(f, spaces, cfg)?;
    let dense_rows = spaces
        .joint_size(&f.parents)
        .ok_or_else(|| Error::Precondition("parent space size overflows".into()))?;
    let distinct: BTreeSet<(VariableType, Vec<u64>)> = f
        .mappings
        .iter()
        .map(|m| {
            let w = m.distribution.normalized_weights()?;
            Ok((
                m.distribution.target.clone(),
                w.iter().map(|p| p.to_bits()).collect(),
            ))
        })
        .collect::<Result<_>>()?;
    let mappings = f.mappings.len();
    Ok(CompressionStats {
        name: f.name.clone(),
        dense_rows,
        mappings,
        distinct_distributions: distinct.len(),
        covered_atoms: sets.iter().map(AtomSet::len).sum(),
        ratio: (mappings > 0).then(|| dense_rows as f64 / mappings as f64),
    })
}
