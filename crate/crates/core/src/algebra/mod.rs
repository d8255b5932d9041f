//! Braces, typed distributions and asymmetry mappings, with the collect,
//! cross and amap operators.
//!
//! Every element has an [`ElementType`]: the set of variable types its brace
//! ranges over plus, for mappings, the distribution type. Operators check
//! these types before building anything, and the forbidden constructions
//! fail with their own error variant:
//!
//! | construction                       | error                          |
//! |------------------------------------|--------------------------------|
//! | cross with a typed distribution    | [`Error::DistributionOperand`] |
//! | cross of two mappings              | [`Error::MappingMapping`]      |
//! | cross of overlapping types         | [`Error::OverlappingTypes`]    |
//! | amap whose target is in the brace  | [`Error::OverlappingTypes`]    |
//!
//! Equality between elements is decided on their atom sets (see [`atoms`]),
//! never on the shape of the expression tree.

mod atoms;

use std::collections::BTreeSet;
use std::fmt;

pub(crate) use atoms::brace_from_atoms;
pub use atoms::{
    atoms, atoms_with, braces_disjoint, braces_equal, canonicalize, canonicalize_with,
    enumerate_space, Atom, AtomSet,
};

use crate::error::{Error, Result};
use crate::types::{StateSpace, TypedDistribution, VariableType};

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// The identity for both collect and cross.
    Neutral,
    Simple {
        variable: VariableType,
        state: String,
    },
    Collection(Vec<Element>),
    Crossing(Vec<Element>),
    Distribution(TypedDistribution),
    Mapping {
        brace: Box<Element>,
        distribution: TypedDistribution,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementType {
    pub brace_types: BTreeSet<VariableType>,
    pub distribution_type: Option<VariableType>,
}

impl ElementType {
    pub fn brace(types: impl IntoIterator<Item = VariableType>) -> Self {
        Self {
            brace_types: types.into_iter().collect(),
            distribution_type: None,
        }
    }

    pub fn mapping(types: impl IntoIterator<Item = VariableType>, target: VariableType) -> Self {
        Self {
            brace_types: types.into_iter().collect(),
            distribution_type: Some(target),
        }
    }

    pub fn is_brace(&self) -> bool {
        self.distribution_type.is_none()
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let types = self
            .brace_types
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        match &self.distribution_type {
            Some(d) => write!(f, "({{{types}}}, {d})"),
            None => write!(f, "{{{types}}}"),
        }
    }
}

impl Element {
    pub fn simple(variable: VariableType, state: impl Into<String>) -> Self {
        Element::Simple {
            variable,
            state: state.into(),
        }
    }

    pub fn is_neutral(&self) -> bool {
        matches!(self, Element::Neutral)
    }

    /// True when the element is well formed and contains no distribution.
    pub fn is_pure_brace(&self) -> bool {
        !self.carries_distribution() && element_type_of(self).is_ok_and(|t| t.is_brace())
    }

    fn carries_distribution(&self) -> bool {
        match self {
            Element::Distribution(_) | Element::Mapping { .. } => true,
            Element::Collection(ops) | Element::Crossing(ops) => {
                ops.iter().any(Element::carries_distribution)
            }
            Element::Neutral | Element::Simple { .. } => false,
        }
    }

    /// All `(variable, state)` pairs named anywhere in the element.
    pub fn simple_braces(&self) -> Vec<(&VariableType, &str)> {
        let mut out = Vec::new();
        self.walk_simple(&mut out);
        out
    }

    fn walk_simple<'a>(&'a self, out: &mut Vec<(&'a VariableType, &'a str)>) {
        match self {
            Element::Simple { variable, state } => out.push((variable, state)),
            Element::Collection(ops) | Element::Crossing(ops) => {
                ops.iter().for_each(|op| op.walk_simple(out))
            }
            Element::Mapping { brace, .. } => brace.walk_simple(out),
            Element::Neutral | Element::Distribution(_) => {}
        }
    }
}

pub fn element_type_of(e: &Element) -> Result<ElementType> {
    match e {
        Element::Neutral => Ok(ElementType::default()),
        Element::Simple { variable, .. } => Ok(ElementType::brace([variable.clone()])),
        Element::Distribution(d) => Ok(ElementType {
            brace_types: BTreeSet::new(),
            distribution_type: Some(d.target.clone()),
        }),
        Element::Collection(ops) => {
            let mut ty: Option<ElementType> = None;
            for op in ops.iter().filter(|op| !op.is_neutral()) {
                if let Element::Distribution(d) = op {
                    return Err(Error::Malformed(format!(
                        "typed distribution `{}` inside a collection",
                        d.name
                    )));
                }
                let t = element_type_of(op)?;
                match &ty {
                    None => ty = Some(t),
                    Some(prev) if *prev != t => {
                        return Err(Error::Malformed(format!(
                            "collection mixes element types {prev} and {t}"
                        )))
                    }
                    Some(_) => {}
                }
            }
            Ok(ty.unwrap_or_default())
        }
        Element::Crossing(ops) => {
            let mut acc = ElementType::default();
            for op in ops.iter().filter(|op| !op.is_neutral()) {
                if let Element::Distribution(d) = op {
                    return Err(Error::Malformed(format!(
                        "typed distribution `{}` inside a crossing",
                        d.name
                    )));
                }
                let t = element_type_of(op)?;
                if !acc.brace_types.is_disjoint(&t.brace_types) {
                    return Err(Error::Malformed(format!(
                        "crossing operands share types: {acc} and {t}"
                    )));
                }
                if acc.distribution_type.is_some() && t.distribution_type.is_some() {
                    return Err(Error::Malformed(
                        "crossing holds more than one asymmetry mapping".into(),
                    ));
                }
                acc.brace_types.extend(t.brace_types);
                if t.distribution_type.is_some() {
                    acc.distribution_type = t.distribution_type;
                }
            }
            if let Some(d) = &acc.distribution_type {
                if acc.brace_types.contains(d) {
                    return Err(Error::Malformed(format!(
                        "distribution type {d} also appears in the brace"
                    )));
                }
            }
            Ok(acc)
        }
        Element::Mapping {
            brace,
            distribution,
        } => {
            let t = element_type_of(brace)?;
            if !t.is_brace() || brace.carries_distribution() {
                return Err(Error::Malformed(
                    "asymmetry mapping brace contains a distribution".into(),
                ));
            }
            if t.brace_types.contains(&distribution.target) {
                return Err(Error::Malformed(format!(
                    "distribution type {} also appears in the brace",
                    distribution.target
                )));
            }
            Ok(ElementType {
                brace_types: t.brace_types,
                distribution_type: Some(distribution.target.clone()),
            })
        }
    }
}

fn reject_distribution(e: &Element) -> Result<()> {
    match e {
        Element::Distribution(d) => Err(Error::DistributionOperand(d.name.clone())),
        _ => Ok(()),
    }
}

fn push_flat(out: &mut Vec<Element>, e: Element, crossing: bool) {
    match e {
        Element::Neutral => {}
        Element::Collection(ops) if !crossing => {
            ops.into_iter().for_each(|op| push_flat(out, op, false))
        }
        Element::Crossing(ops) if crossing => {
            ops.into_iter().for_each(|op| push_flat(out, op, true))
        }
        other => out.push(other),
    }
}

/// Collect (`+`): union of two elements of the same element type.
pub fn collect(a: Element, b: Element) -> Result<Element> {
    if a.is_neutral() {
        return Ok(b);
    }
    if b.is_neutral() {
        return Ok(a);
    }
    reject_distribution(&a)?;
    reject_distribution(&b)?;
    let (ta, tb) = (element_type_of(&a)?, element_type_of(&b)?);
    if ta != tb {
        return Err(Error::TypeMismatch(format!(
            "cannot collect {ta} with {tb}"
        )));
    }
    let mut ops = Vec::new();
    push_flat(&mut ops, a, false);
    push_flat(&mut ops, b, false);
    Ok(Element::Collection(ops))
}

/// Cross (`x`): product of two elements with disjoint element types.
///
/// Crossing a brace with a mapping yields a mapping over the crossed brace,
/// so a mapping only ever sits at the root of an element (or directly under a
/// root collection of mappings).
pub fn cross(a: Element, b: Element) -> Result<Element> {
    if a.is_neutral() {
        return Ok(b);
    }
    if b.is_neutral() {
        return Ok(a);
    }
    reject_distribution(&a)?;
    reject_distribution(&b)?;
    let (ta, tb) = (element_type_of(&a)?, element_type_of(&b)?);
    if ta.distribution_type.is_some() && tb.distribution_type.is_some() {
        return Err(Error::MappingMapping);
    }
    let shared: Vec<String> = ta
        .brace_types
        .intersection(&tb.brace_types)
        .map(|t| t.to_string())
        .collect();
    if !shared.is_empty() {
        return Err(Error::OverlappingTypes(shared.join(", ")));
    }
    for (m, other) in [(&ta, &tb), (&tb, &ta)] {
        if let Some(d) = &m.distribution_type {
            if other.brace_types.contains(d) {
                return Err(Error::OverlappingTypes(format!(
                    "distribution type {d} crossed with a brace over it"
                )));
            }
        }
    }
    Ok(
        match (
            ta.distribution_type.is_some(),
            tb.distribution_type.is_some(),
        ) {
            (false, false) => cross_braces(a, b),
            (true, false) => cross_into_mapping(hoist(a), b, false),
            (false, true) => cross_into_mapping(hoist(b), a, true),
            (true, true) => unreachable!(),
        },
    )
}

fn cross_braces(a: Element, b: Element) -> Element {
    let mut ops = Vec::new();
    push_flat(&mut ops, a, true);
    push_flat(&mut ops, b, true);
    match ops.len() {
        0 => Element::Neutral,
        1 => ops.pop().unwrap(),
        _ => Element::Crossing(ops),
    }
}

/// Crosses `brace` into a hoisted mapping element (a mapping or a collection
/// of mappings), distributing over the collection.
fn cross_into_mapping(m: Element, brace: Element, brace_first: bool) -> Element {
    match m {
        Element::Mapping {
            brace: inner,
            distribution,
        } => {
            let crossed = if brace_first {
                cross_braces(brace, *inner)
            } else {
                cross_braces(*inner, brace)
            };
            Element::Mapping {
                brace: Box::new(crossed),
                distribution,
            }
        }
        Element::Collection(ops) => Element::Collection(
            ops.into_iter()
                .filter(|op| !op.is_neutral())
                .map(|op| cross_into_mapping(op, brace.clone(), brace_first))
                .collect(),
        ),
        other => other,
    }
}

/// Moves any mapping nested inside a crossing up to the root.
fn hoist(e: Element) -> Element {
    match e {
        Element::Crossing(ops) => {
            let (mut mapped, braces): (Vec<_>, Vec<_>) =
                ops.into_iter().partition(Element::carries_distribution);
            match mapped.pop() {
                Some(m) => {
                    let rest = braces.into_iter().fold(Element::Neutral, cross_braces);
                    cross_into_mapping(hoist(m), rest, true)
                }
                None => Element::Crossing(braces),
            }
        }
        Element::Collection(ops) => Element::Collection(ops.into_iter().map(hoist).collect()),
        other => other,
    }
}

/// AMap: binds a pure brace to a typed distribution.
pub fn amap(brace: Element, d: TypedDistribution) -> Result<Element> {
    reject_distribution(&brace)?;
    let t = element_type_of(&brace)?;
    if !t.is_brace() {
        return Err(Error::NotABrace(format!(
            "amap over an element of type {t}"
        )));
    }
    if t.brace_types.contains(&d.target) {
        return Err(Error::OverlappingTypes(format!(
            "distribution `{}` targets {} which the brace ranges over",
            d.name, d.target
        )));
    }
    Ok(Element::Mapping {
        brace: Box::new(brace),
        distribution: d,
    })
}

/// The collection of every simple brace of one variable.
pub fn whole_element(space: &StateSpace) -> Element {
    let mut ops: Vec<Element> = space
        .states()
        .iter()
        .map(|s| Element::simple(space.variable().clone(), s.clone()))
        .collect();
    if ops.len() == 1 {
        ops.pop().unwrap()
    } else {
        Element::Collection(ops)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Collect,
    Cross,
}

impl Element {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: Prec) -> fmt::Result {
        match self {
            Element::Neutral => f.write_str("∅"),
            Element::Simple { variable, state } => write!(f, "{variable}={state}"),
            Element::Distribution(d) => f.write_str(&d.name),
            Element::Collection(ops) | Element::Crossing(ops) => {
                let crossing = matches!(self, Element::Crossing(_));
                let live: Vec<&Element> = ops.iter().filter(|o| !o.is_neutral()).collect();
                match live.len() {
                    0 => f.write_str("∅"),
                    1 => live[0].fmt_prec(f, prec),
                    _ => {
                        let parens = prec == Prec::Cross;
                        let (sep, inner) = if crossing {
                            (" x ", Prec::Cross)
                        } else {
                            (" + ", Prec::Collect)
                        };
                        if parens {
                            f.write_str("(")?;
                        }
                        for (i, op) in live.iter().enumerate() {
                            if i > 0 {
                                f.write_str(sep)?;
                            }
                            op.fmt_prec(f, inner)?;
                        }
                        if parens {
                            f.write_str(")")?;
                        }
                        Ok(())
                    }
                }
            }
            Element::Mapping {
                brace,
                distribution,
            } => {
                if prec != Prec::Top {
                    f.write_str("(")?;
                }
                brace.fmt_prec(f, Prec::Top)?;
                write!(f, " -> {}", distribution.name)?;
                if prec != Prec::Top {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, Prec::Top)
    }
}
