//! Asymmetry networks and subnetworks.
//!
//! A network pairs a dependent variable with a conditioning partition of its
//! parents' joint state space and assigns one distribution to every
//! partition element. A subnetwork may cover only part of that space and may
//! hold an implicit context (for example `Z=z1`) over variables that are not
//! among its parents.

use std::collections::{btree_map, BTreeMap, BTreeSet};

use crate::algebra::{atoms_with, cross, element_type_of, enumerate_space, Atom, AtomSet, Element};
use crate::error::{Error, Result};
use crate::factored::{lift_context, FactorMapping, FactoredCpt};
use crate::par;
use crate::report::{Coverage, ValidationReport, Violation};
use crate::types::{distributions_equal, StateSpaces, TypedDistribution, VariableType};
use crate::Config;

const UNCOVERED_SAMPLE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionElement {
    pub name: String,
    pub brace: Element,
}

impl PartitionElement {
    pub fn new(name: impl Into<String>, brace: Element) -> Self {
        Self {
            name: name.into(),
            brace,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningPartition {
    pub name: String,
    pub parents: Vec<VariableType>,
    pub elements: Vec<PartitionElement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryNetwork {
    pub name: String,
    pub dependent: VariableType,
    pub partition: ConditioningPartition,
    /// Partition-element index to distribution.
    pub mapping: BTreeMap<usize, TypedDistribution>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetrySubnetwork {
    pub name: String,
    pub dependent: VariableType,
    pub partition: ConditioningPartition,
    pub mapping: BTreeMap<usize, TypedDistribution>,
    /// Implicit context over variables outside the parents, e.g. `Z=z1`.
    pub context: Option<Element>,
}

impl AsymmetryNetwork {
    /// The subnetwork holding only the elements at `indices`.
    pub fn restrict(&self, indices: &[usize]) -> AsymmetrySubnetwork {
        let keep: BTreeSet<usize> = indices.iter().copied().collect();
        let mut elements = Vec::new();
        let mut mapping = BTreeMap::new();
        for (i, el) in self.partition.elements.iter().enumerate() {
            if keep.contains(&i) {
                if let Some(d) = self.mapping.get(&i) {
                    mapping.insert(elements.len(), d.clone());
                }
                elements.push(el.clone());
            }
        }
        AsymmetrySubnetwork {
            name: self.name.clone(),
            dependent: self.dependent.clone(),
            partition: ConditioningPartition {
                name: self.partition.name.clone(),
                parents: self.partition.parents.clone(),
                elements,
            },
            mapping,
            context: None,
        }
    }
}

impl From<AsymmetryNetwork> for AsymmetrySubnetwork {
    fn from(n: AsymmetryNetwork) -> Self {
        AsymmetrySubnetwork {
            name: n.name,
            dependent: n.dependent,
            partition: n.partition,
            mapping: n.mapping,
            context: None,
        }
    }
}

/// Checks named braces against a parent set: types, states, pairwise
/// disjointness and (optionally) coverage of the joint parent space.
///
/// Returns the atom sets of the braces when every brace is well typed.
pub(crate) fn check_braces(
    report: &mut ValidationReport,
    parents: &[VariableType],
    items: &[(&str, &Element)],
    spaces: &StateSpaces,
    require_cover: bool,
    cfg: &Config,
) -> Option<Vec<AtomSet>> {
    let parent_set: BTreeSet<VariableType> = parents.iter().cloned().collect();
    let mut ok = true;
    for p in &parent_set {
        if spaces.get(p).is_none() {
            report.violations.push(Violation::UnknownVariable {
                variable: p.to_string(),
            });
            ok = false;
        }
    }

    let mut unknown_states = BTreeSet::new();
    for (name, brace) in items {
        match element_type_of(brace) {
            Err(e) => {
                report.violations.push(Violation::TypeMismatch {
                    element: name.to_string(),
                    detail: e.to_string(),
                });
                ok = false;
                continue;
            }
            Ok(t) if !t.is_brace() || matches!(brace, Element::Distribution(_)) => {
                report.violations.push(Violation::TypeMismatch {
                    element: name.to_string(),
                    detail: format!("expected a pure brace, found element of type {t}"),
                });
                ok = false;
                continue;
            }
            Ok(t) if t.brace_types != parent_set => {
                report.violations.push(Violation::TypeMismatch {
                    element: name.to_string(),
                    detail: format!(
                        "brace ranges over {t}, expected {}",
                        crate::algebra::ElementType::brace(parent_set.iter().cloned())
                    ),
                });
                ok = false;
                continue;
            }
            Ok(_) => {}
        }
        for (v, s) in brace.simple_braces() {
            if let Some(space) = spaces.get(v) {
                if !space.contains(s) && unknown_states.insert((v.to_string(), s.to_owned())) {
                    report.violations.push(Violation::UnknownState {
                        variable: v.to_string(),
                        state: s.to_owned(),
                    });
                    ok = false;
                }
            }
        }
    }
    if !ok {
        return None;
    }

    let sets = par::map(cfg.execution, items, |(_, brace)| atoms_with(brace, cfg));
    let mut atom_sets = Vec::with_capacity(sets.len());
    for (set, (name, _)) in sets.into_iter().zip(items) {
        match set {
            Ok(s) => atom_sets.push(s),
            Err(e @ Error::AtomLimit { .. }) => {
                report.coverage = Coverage::NotChecked {
                    reason: e.to_string(),
                };
                return None;
            }
            Err(e) => {
                report.violations.push(Violation::TypeMismatch {
                    element: name.to_string(),
                    detail: e.to_string(),
                });
                return None;
            }
        }
    }

    let mut owner: BTreeMap<&Atom, usize> = BTreeMap::new();
    let mut reported = BTreeSet::new();
    for (idx, set) in atom_sets.iter().enumerate() {
        for atom in set.atoms() {
            match owner.entry(atom) {
                btree_map::Entry::Vacant(slot) => {
                    slot.insert(idx);
                }
                btree_map::Entry::Occupied(slot) => {
                    let first = *slot.get();
                    if reported.insert((first, idx)) {
                        report.violations.push(Violation::Overlap {
                            first: items[first].0.to_owned(),
                            second: items[idx].0.to_owned(),
                            witness: atom.clone(),
                        });
                    }
                }
            }
        }
    }

    let covered = owner.len();
    let sorted_parents: Vec<VariableType> = parent_set.into_iter().collect();
    let total = spaces.joint_size(&sorted_parents);
    report.coverage = match total {
        Some(total) if covered == total => Coverage::Complete { total },
        Some(total) if !require_cover => Coverage::Partial { covered, total },
        Some(total) if total <= cfg.max_atoms => {
            let all = enumerate_space(&sorted_parents, spaces, cfg).ok()?;
            let missing: Vec<&Atom> = all.iter().filter(|a| !owner.contains_key(a)).collect();
            report.violations.push(Violation::Uncovered {
                count: missing.len(),
                sample: missing
                    .iter()
                    .take(UNCOVERED_SAMPLE)
                    .map(|a| (*a).clone())
                    .collect(),
            });
            Coverage::Partial { covered, total }
        }
        _ => Coverage::NotChecked {
            reason: format!("parent space exceeds the atom limit of {}", cfg.max_atoms),
        },
    };
    Some(atom_sets)
}

pub fn validate_partition(
    p: &ConditioningPartition,
    spaces: &StateSpaces,
    require_cover: bool,
    cfg: &Config,
) -> ValidationReport {
    let mut report = ValidationReport::new(format!("partition {}", p.name));
    let items: Vec<(&str, &Element)> = p
        .elements
        .iter()
        .map(|e| (e.name.as_str(), &e.brace))
        .collect();
    check_braces(&mut report, &p.parents, &items, spaces, require_cover, cfg);
    report
}

fn check_mapping(
    report: &mut ValidationReport,
    dependent: &VariableType,
    partition: &ConditioningPartition,
    mapping: &BTreeMap<usize, TypedDistribution>,
    spaces: &StateSpaces,
) {
    if partition.parents.contains(dependent) {
        report.violations.push(Violation::DependentIsParent {
            dependent: dependent.to_string(),
        });
    }
    let dep_space = spaces.get(dependent);
    if dep_space.is_none() {
        report.violations.push(Violation::UnknownVariable {
            variable: dependent.to_string(),
        });
    }
    for (idx, el) in partition.elements.iter().enumerate() {
        match mapping.get(&idx) {
            None => report.violations.push(Violation::MissingDistribution {
                element: el.name.clone(),
            }),
            Some(d) if &d.target != dependent => {
                report.violations.push(Violation::TargetMismatch {
                    element: el.name.clone(),
                    expected: dependent.to_string(),
                    found: d.target.to_string(),
                })
            }
            Some(d) => {
                if let Some(Err(e)) = dep_space.map(|s| d.check_against(s)) {
                    report.violations.push(Violation::InvalidDistribution {
                        name: d.name.clone(),
                        detail: e.to_string(),
                    });
                }
            }
        }
    }
    for idx in mapping.keys().filter(|i| **i >= partition.elements.len()) {
        report.violations.push(Violation::TypeMismatch {
            element: format!("#{idx}"),
            detail: "distribution mapped to a nonexistent partition element".into(),
        });
    }
}

pub fn validate_network(
    n: &AsymmetryNetwork,
    spaces: &StateSpaces,
    cfg: &Config,
) -> ValidationReport {
    let mut report = validate_partition(&n.partition, spaces, true, cfg);
    report.subject = format!("network {}", n.name);
    check_mapping(&mut report, &n.dependent, &n.partition, &n.mapping, spaces);
    report
}

pub fn validate_subnetwork(
    sub: &AsymmetrySubnetwork,
    spaces: &StateSpaces,
    cfg: &Config,
) -> ValidationReport {
    let mut report = validate_partition(&sub.partition, spaces, false, cfg);
    report.subject = format!("subnetwork {}", sub.name);
    check_mapping(
        &mut report,
        &sub.dependent,
        &sub.partition,
        &sub.mapping,
        spaces,
    );
    if let Some(ctx) = sub.context.as_ref().filter(|c| !c.is_neutral()) {
        match element_type_of(ctx) {
            Ok(t) if t.is_brace() && !matches!(ctx, Element::Distribution(_)) => {
                let clash: Vec<String> = t
                    .brace_types
                    .iter()
                    .filter(|v| sub.partition.parents.contains(v) || **v == sub.dependent)
                    .map(|v| v.to_string())
                    .collect();
                if !clash.is_empty() {
                    report.violations.push(Violation::ContextOverlap {
                        detail: format!("context ranges over {}", clash.join(", ")),
                    });
                }
                for (v, s) in ctx.simple_braces() {
                    match spaces.get(v) {
                        None => report.violations.push(Violation::UnknownVariable {
                            variable: v.to_string(),
                        }),
                        Some(space) if !space.contains(s) => {
                            report.violations.push(Violation::UnknownState {
                                variable: v.to_string(),
                                state: s.to_owned(),
                            })
                        }
                        Some(_) => {}
                    }
                }
            }
            Ok(t) => report.violations.push(Violation::ContextOverlap {
                detail: format!("context must be a pure brace, found {t}"),
            }),
            Err(e) => report.violations.push(Violation::ContextOverlap {
                detail: e.to_string(),
            }),
        }
    }
    report
}

/// Whether every element of `sub` (lifted into its context, if any) matches
/// an element of `net` by atom set, with distributions equal within `tol`.
pub fn is_subnetwork(
    sub: &AsymmetrySubnetwork,
    net: &AsymmetryNetwork,
    tol: f64,
    cfg: &Config,
) -> Result<bool> {
    if sub.dependent != net.dependent {
        return Ok(false);
    }
    let net_sets: Vec<AtomSet> = net
        .partition
        .elements
        .iter()
        .map(|e| atoms_with(&e.brace, cfg))
        .collect::<Result<_>>()?;
    let context = sub.context.clone().unwrap_or(Element::Neutral);
    for (idx, el) in sub.partition.elements.iter().enumerate() {
        let Some(d_sub) = sub.mapping.get(&idx) else {
            return Ok(false);
        };
        let lifted = atoms_with(&cross(el.brace.clone(), context.clone())?, cfg)?;
        let Some(j) = net_sets.iter().position(|s| s.same_atoms(&lifted)) else {
            return Ok(false);
        };
        match net.mapping.get(&j) {
            Some(d_net) if distributions_equal(d_sub, d_net, tol) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

fn into_factored(
    name: &str,
    dependent: &VariableType,
    partition: &ConditioningPartition,
    mapping: &BTreeMap<usize, TypedDistribution>,
) -> FactoredCpt {
    let mappings = partition
        .elements
        .iter()
        .enumerate()
        .filter_map(|(i, el)| {
            mapping
                .get(&i)
                .map(|d| FactorMapping::new(el.name.clone(), el.brace.clone(), d.clone()))
        })
        .collect();
    FactoredCpt::new(name, dependent.clone(), partition.parents.clone(), mappings)
}

fn reject_invalid(report: ValidationReport, cfg: &Config) -> Result<()> {
    if report.limit_exceeded() {
        return Err(Error::AtomLimit {
            limit: cfg.max_atoms,
        });
    }
    if !report.is_valid() {
        return Err(Error::Invalid(report.summary()));
    }
    Ok(())
}

/// One asymmetry mapping per partition element.
pub fn network_to_factored(
    n: &AsymmetryNetwork,
    spaces: &StateSpaces,
    cfg: &Config,
) -> Result<FactoredCpt> {
    reject_invalid(validate_network(n, spaces, cfg), cfg)?;
    Ok(into_factored(
        &n.name,
        &n.dependent,
        &n.partition,
        &n.mapping,
    ))
}

/// Factored form of a subnetwork. With `lift`, every brace is crossed with
/// the context so the context variables become explicit parents; otherwise
/// the context stays implicit.
pub fn subnetwork_to_factored(
    sub: &AsymmetrySubnetwork,
    lift: bool,
    spaces: &StateSpaces,
    cfg: &Config,
) -> Result<FactoredCpt> {
    reject_invalid(validate_subnetwork(sub, spaces, cfg), cfg)?;
    let f = into_factored(&sub.name, &sub.dependent, &sub.partition, &sub.mapping);
    match (&sub.context, lift) {
        (Some(ctx), true) => lift_context(&f, ctx),
        _ => Ok(f),
    }
}
