//! The `.acpt` model format.
//!
//! ```text
//! variable X { x1, x2, x3 }
//! variable Y { y1, y2 }
//! variable W { w1, w2 }
//! distribution D1 for W { w1: 0.7, w2: 0.3 }
//! distribution D2 for W { w1: 1, w2: 1 }
//!
//! network N for W given X, Y {
//!   element E1 = (X=x2 + X=x3) x Y=y2 -> D1
//!   element E2 = X=x1 x (Y=y1 + Y=y2) + (X=x2 + X=x3) x Y=y1 -> D2
//! }
//! ```
//!
//! `+` is collect and `x` is cross; `⊕`, `⊗`, `×` and `Δ` are accepted as
//! aliases. Declarations may appear in any order. A `subnetwork`, or a
//! `network` with a `context` clause, may leave part of the parent space
//! uncovered. A `factored` declaration has the same body and becomes a
//! factored CPT.

mod lexer;
mod parser;
mod serialize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::algebra::{amap, atoms_with, collect, cross, Atom, Element};
use crate::error::{Error, Result};
use crate::factored::{FactorMapping, FactoredCpt};
use crate::network::{
    network_to_factored, subnetwork_to_factored, AsymmetryNetwork, AsymmetrySubnetwork,
    ConditioningPartition, PartitionElement,
};
use crate::types::{
    distributions_equal, StateSpace, StateSpaces, TypedDistribution, VariableType,
    DEFAULT_TOLERANCE,
};
use crate::Config;

use parser::{BraceAst, DeclAst, ElementAst, NetKind, OpKind, VarRef};

pub use serialize::{export_dense, serialize, serialize_with};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    Unresolved,
    Duplicate,
    Semantic,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Lexical => "lexical",
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::Unresolved => "unresolved",
            DiagnosticKind::Duplicate => "duplicate",
            DiagnosticKind::Semantic => "semantic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub pos: Pos,
    pub message: String,
    /// Tokens that would have been accepted; syntax errors only.
    pub expected: Vec<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {} error: {}",
            self.pos.line, self.pos.column, self.kind, self.message
        )?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkDecl {
    Full(AsymmetryNetwork),
    Sub(AsymmetrySubnetwork),
}

impl NetworkDecl {
    pub fn name(&self) -> &str {
        match self {
            NetworkDecl::Full(n) => &n.name,
            NetworkDecl::Sub(s) => &s.name,
        }
    }

    pub fn dependent(&self) -> &VariableType {
        match self {
            NetworkDecl::Full(n) => &n.dependent,
            NetworkDecl::Sub(s) => &s.dependent,
        }
    }

    pub fn partition(&self) -> &ConditioningPartition {
        match self {
            NetworkDecl::Full(n) => &n.partition,
            NetworkDecl::Sub(s) => &s.partition,
        }
    }

    pub fn mapping(&self) -> &BTreeMap<usize, TypedDistribution> {
        match self {
            NetworkDecl::Full(n) => &n.mapping,
            NetworkDecl::Sub(s) => &s.mapping,
        }
    }

    pub fn context(&self) -> Option<&Element> {
        match self {
            NetworkDecl::Full(_) => None,
            NetworkDecl::Sub(s) => s.context.as_ref(),
        }
    }

    /// Validates and converts; subnetwork contexts are lifted when `lift`.
    pub fn to_factored(
        &self,
        lift: bool,
        spaces: &StateSpaces,
        cfg: &Config,
    ) -> Result<FactoredCpt> {
        match self {
            NetworkDecl::Full(n) => network_to_factored(n, spaces, cfg),
            NetworkDecl::Sub(s) => subnetwork_to_factored(s, lift, spaces, cfg),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelDocument {
    pub variables: Vec<StateSpace>,
    pub distributions: Vec<TypedDistribution>,
    pub networks: Vec<NetworkDecl>,
    pub factored: Vec<FactoredCpt>,
}

impl ModelDocument {
    pub fn spaces(&self) -> StateSpaces {
        self.variables.iter().cloned().collect()
    }

    pub fn distribution(&self, name: &str) -> Option<&TypedDistribution> {
        self.distributions.iter().find(|d| d.name == name)
    }

    pub fn network(&self, name: &str) -> Option<&NetworkDecl> {
        self.networks.iter().find(|n| n.name() == name)
    }

    pub fn factored_cpt(&self, name: &str) -> Option<&FactoredCpt> {
        self.factored.iter().find(|f| f.name() == name)
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
            && self.distributions.is_empty()
            && self.networks.is_empty()
            && self.factored.is_empty()
    }
}

pub fn parse(text: &str) -> Result<ModelDocument, Diagnostic> {
    let tokens = lexer::lex(text)?;
    let decls = parser::parse_decls(tokens)?;
    Resolver::default().resolve(decls)
}

fn diag(kind: DiagnosticKind, pos: Pos, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        kind,
        pos,
        message: message.into(),
        expected: Vec::new(),
    }
}

fn var_display(v: &VarRef) -> String {
    if v.attrs.is_empty() {
        return v.name.clone();
    }
    let attrs: Vec<String> = v
        .attrs
        .iter()
        .map(|(a, val, _)| format!("{a}={}", val.as_deref().unwrap_or("?")))
        .collect();
    format!("{}({})", v.name, attrs.join(", "))
}

#[derive(Default)]
struct Resolver {
    spaces: StateSpaces,
    distributions: BTreeMap<String, TypedDistribution>,
}

impl Resolver {
    fn resolve(mut self, decls: Vec<DeclAst>) -> Result<ModelDocument, Diagnostic> {
        let mut doc = ModelDocument::default();

        for d in &decls {
            if let DeclAst::Variable { var, states } = d {
                let vt = self.variable_type(var)?;
                if self.spaces.get(&vt).is_some() {
                    return Err(diag(
                        DiagnosticKind::Duplicate,
                        var.pos,
                        format!("variable `{vt}` is declared twice"),
                    ));
                }
                let mut seen = BTreeSet::new();
                for (s, pos) in states {
                    if !seen.insert(s) {
                        return Err(diag(
                            DiagnosticKind::Duplicate,
                            *pos,
                            format!("state `{s}` appears twice in `{vt}`"),
                        ));
                    }
                }
                let space = StateSpace::new(vt, states.iter().map(|(s, _)| s.clone()))
                    .map_err(|e| diag(DiagnosticKind::Semantic, var.pos, e.to_string()))?;
                doc.variables.push(space.clone());
                self.spaces.insert(space);
            }
        }

        for d in &decls {
            if let DeclAst::Distribution {
                name,
                pos,
                target,
                weights,
            } = d
            {
                if self.distributions.contains_key(name) {
                    return Err(diag(
                        DiagnosticKind::Duplicate,
                        *pos,
                        format!("distribution `{name}` is declared twice"),
                    ));
                }
                let dist = self.distribution(name, *pos, target, weights)?;
                doc.distributions.push(dist.clone());
                self.distributions.insert(name.clone(), dist);
            }
        }

        let mut names = BTreeSet::new();
        for d in &decls {
            if let DeclAst::Network {
                kind,
                name,
                pos,
                dependent,
                parents,
                context,
                elements,
            } = d
            {
                if !names.insert(name.clone()) {
                    return Err(diag(
                        DiagnosticKind::Duplicate,
                        *pos,
                        format!("`{name}` is declared twice"),
                    ));
                }
                let dep = self.lookup_var(dependent)?;
                let mut parent_types = Vec::new();
                for p in parents {
                    let vt = self.lookup_var(p)?;
                    if parent_types.contains(&vt) {
                        return Err(diag(
                            DiagnosticKind::Duplicate,
                            p.pos,
                            format!("parent `{vt}` is listed twice"),
                        ));
                    }
                    parent_types.push(vt);
                }
                let context = context.as_ref().map(|c| self.brace(c)).transpose()?;
                let mut seen = BTreeSet::new();
                let mut resolved = Vec::new();
                for el in elements {
                    if !seen.insert(el.name.as_str()) {
                        return Err(diag(
                            DiagnosticKind::Duplicate,
                            el.name_pos,
                            format!("element `{}` is declared twice in `{name}`", el.name),
                        ));
                    }
                    resolved.push(self.element(el, &dep)?);
                }
                match kind {
                    NetKind::Factored => {
                        let mappings = elements
                            .iter()
                            .zip(resolved)
                            .map(|(el, (brace, d))| FactorMapping::new(el.name.clone(), brace, d))
                            .collect();
                        doc.factored.push(FactoredCpt::new(
                            name.clone(),
                            dep,
                            parent_types,
                            mappings,
                        ));
                    }
                    _ => {
                        let mut part_elements = Vec::new();
                        let mut mapping = BTreeMap::new();
                        for (i, (el, (brace, d))) in elements.iter().zip(resolved).enumerate() {
                            part_elements.push(PartitionElement::new(el.name.clone(), brace));
                            mapping.insert(i, d);
                        }
                        let partition = ConditioningPartition {
                            name: name.clone(),
                            parents: parent_types,
                            elements: part_elements,
                        };
                        doc.networks
                            .push(if *kind == NetKind::Network && context.is_none() {
                                NetworkDecl::Full(AsymmetryNetwork {
                                    name: name.clone(),
                                    dependent: dep,
                                    partition,
                                    mapping,
                                })
                            } else {
                                NetworkDecl::Sub(AsymmetrySubnetwork {
                                    name: name.clone(),
                                    dependent: dep,
                                    partition,
                                    mapping,
                                    context,
                                })
                            });
                    }
                }
            }
        }
        Ok(doc)
    }

    fn variable_type(&self, v: &VarRef) -> Result<VariableType, Diagnostic> {
        let mut vt = VariableType::new(v.name.clone());
        let mut seen = BTreeSet::new();
        for (attr, value, pos) in &v.attrs {
            if !seen.insert(attr) {
                return Err(diag(
                    DiagnosticKind::Duplicate,
                    *pos,
                    format!("attribute `{attr}` is given twice"),
                ));
            }
            vt = vt.with_attribute(attr.clone(), value.as_deref());
        }
        Ok(vt)
    }

    /// Exact match on name and attributes. A bare name also resolves when
    /// exactly one declared variable carries that name.
    fn lookup_var(&self, v: &VarRef) -> Result<VariableType, Diagnostic> {
        let vt = self.variable_type(v)?;
        if self.spaces.get(&vt).is_some() {
            return Ok(vt);
        }
        if v.attrs.is_empty() {
            let candidates: Vec<&VariableType> = self
                .spaces
                .iter()
                .map(|s| s.variable())
                .filter(|t| t.name() == v.name)
                .collect();
            match candidates.len() {
                1 => return Ok(candidates[0].clone()),
                0 => {}
                _ => {
                    return Err(diag(
                        DiagnosticKind::Unresolved,
                        v.pos,
                        format!("`{}` is ambiguous; give its attributes", v.name),
                    ))
                }
            }
        }
        Err(diag(
            DiagnosticKind::Unresolved,
            v.pos,
            format!("unknown variable `{}`", var_display(v)),
        ))
    }

    fn distribution(
        &self,
        name: &str,
        pos: Pos,
        target: &VarRef,
        weights: &[(String, Pos, f64)],
    ) -> Result<TypedDistribution, Diagnostic> {
        let vt = self.lookup_var(target)?;
        let space = self.spaces.get(&vt).expect("resolved variable has a space");
        let mut w = vec![None; space.len()];
        for (state, spos, value) in weights {
            let Some(i) = space.index_of(state) else {
                return Err(diag(
                    DiagnosticKind::Unresolved,
                    *spos,
                    format!("`{vt}` has no state `{state}`"),
                ));
            };
            if w[i].replace(*value).is_some() {
                return Err(diag(
                    DiagnosticKind::Duplicate,
                    *spos,
                    format!("state `{state}` is weighted twice in `{name}`"),
                ));
            }
        }
        if let Some(i) = w.iter().position(Option::is_none) {
            return Err(diag(
                DiagnosticKind::Semantic,
                pos,
                format!("`{name}` gives no weight for state `{}`", space.states()[i]),
            ));
        }
        TypedDistribution::new(name, vt, w.into_iter().flatten().collect())
            .map_err(|e| diag(DiagnosticKind::Semantic, pos, e.to_string()))
    }

    fn brace(&self, b: &BraceAst) -> Result<Element, Diagnostic> {
        match b {
            BraceAst::Atom {
                var,
                state,
                state_pos,
            } => {
                let vt = self.lookup_var(var)?;
                let space = self.spaces.get(&vt).expect("resolved variable has a space");
                if !space.contains(state) {
                    return Err(diag(
                        DiagnosticKind::Unresolved,
                        *state_pos,
                        format!("`{vt}` has no state `{state}`"),
                    ));
                }
                Ok(Element::simple(vt, state.clone()))
            }
            BraceAst::Op {
                kind,
                pos,
                lhs,
                rhs,
            } => {
                let (l, r) = (self.brace(lhs)?, self.brace(rhs)?);
                let out = match kind {
                    OpKind::Collect => collect(l, r),
                    OpKind::Cross => cross(l, r),
                };
                out.map_err(|e| diag(DiagnosticKind::Semantic, *pos, e.to_string()))
            }
        }
    }

    fn element(
        &self,
        el: &ElementAst,
        dependent: &VariableType,
    ) -> Result<(Element, TypedDistribution), Diagnostic> {
        let brace = self.brace(&el.brace)?;
        let Some(d) = self.distributions.get(&el.dist) else {
            return Err(diag(
                DiagnosticKind::Unresolved,
                el.dist_pos,
                format!("unknown distribution `{}`", el.dist),
            ));
        };
        if &d.target != dependent {
            return Err(diag(
                DiagnosticKind::Semantic,
                el.dist_pos,
                format!(
                    "distribution `{}` is over {}, not the dependent {dependent}",
                    d.name, d.target
                ),
            ));
        }
        amap(brace.clone(), d.clone())
            .map_err(|e| diag(DiagnosticKind::Semantic, el.arrow_pos, e.to_string()))?;
        Ok((brace, d.clone()))
    }
}

/// Atom-to-distribution view of a network body, keyed by distribution name
/// and normalized weights.
type AtomMap = BTreeMap<Atom, (String, TypedDistribution)>;

fn atom_map<'a>(
    items: impl Iterator<Item = (&'a Element, &'a TypedDistribution)>,
    cfg: &Config,
) -> Result<AtomMap> {
    let mut out = AtomMap::new();
    for (brace, d) in items {
        for atom in atoms_with(brace, cfg)?.atoms() {
            if let Some((_, prev)) = out.insert(atom.clone(), (d.name.clone(), d.clone())) {
                if prev != *d {
                    return Err(Error::Conflict {
                        witness: atom.clone(),
                        first: Box::new(prev),
                        second: Box::new(d.clone()),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn compare_maps(what: &str, a: &AtomMap, b: &AtomMap, out: &mut Vec<String>) {
    for (atom, (name, d)) in a {
        match b.get(atom) {
            None => out.push(format!("{what}: atom {atom} is mapped only on the left")),
            Some((n2, d2)) if n2 != name || !distributions_equal(d, d2, DEFAULT_TOLERANCE) => out
                .push(format!(
                    "{what}: atom {atom} maps to {name} on the left, {n2} on the right"
                )),
            _ => {}
        }
    }
    for atom in b.keys().filter(|k| !a.contains_key(*k)) {
        out.push(format!("{what}: atom {atom} is mapped only on the right"));
    }
}

fn sorted<T: Ord>(v: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = v.into_iter().collect();
    v.sort();
    v
}

/// Semantic comparison of two documents. Declarations are matched by name
/// and brace expressions by their atom sets. Returns the differences found;
/// an empty list means the documents are equal.
pub fn semantic_diff(a: &ModelDocument, b: &ModelDocument, cfg: &Config) -> Result<Vec<String>> {
    let mut out = Vec::new();

    let vars = |d: &ModelDocument| -> BTreeMap<VariableType, Vec<String>> {
        d.variables
            .iter()
            .map(|s| (s.variable().clone(), s.states().to_vec()))
            .collect()
    };
    let (va, vb) = (vars(a), vars(b));
    for (v, states) in &va {
        match vb.get(v) {
            None => out.push(format!("variable {v} is only on the left")),
            Some(s2) if s2 != states => out.push(format!("variable {v} has different states")),
            _ => {}
        }
    }
    for v in vb.keys().filter(|v| !va.contains_key(*v)) {
        out.push(format!("variable {v} is only on the right"));
    }

    for d in &a.distributions {
        match b.distribution(&d.name) {
            None => out.push(format!("distribution {} is only on the left", d.name)),
            Some(d2) if d2.target != d.target || !distributions_equal(d, d2, DEFAULT_TOLERANCE) => {
                out.push(format!("distribution {} differs", d.name))
            }
            _ => {}
        }
    }
    for d in b
        .distributions
        .iter()
        .filter(|d| a.distribution(&d.name).is_none())
    {
        out.push(format!("distribution {} is only on the right", d.name));
    }

    for n in &a.networks {
        let Some(n2) = b.network(n.name()) else {
            out.push(format!("network {} is only on the left", n.name()));
            continue;
        };
        let what = format!("network {}", n.name());
        if std::mem::discriminant(n) != std::mem::discriminant(n2) {
            out.push(format!("{what}: full on one side, partial on the other"));
        }
        if n.dependent() != n2.dependent() {
            out.push(format!("{what}: dependent differs"));
        }
        if sorted(&n.partition().parents) != sorted(&n2.partition().parents) {
            out.push(format!("{what}: parents differ"));
        }
        let ctx = |c: Option<&Element>| {
            c.map(|e| atoms_with(e, cfg).map(|s| s.atom_set()))
                .transpose()
        };
        if ctx(n.context())? != ctx(n2.context())? {
            out.push(format!("{what}: context differs"));
        }
        let body = |n: &NetworkDecl| {
            let items = n
                .partition()
                .elements
                .iter()
                .enumerate()
                .filter_map(|(i, e)| n.mapping().get(&i).map(|d| (&e.brace, d)));
            atom_map(items, cfg)
        };
        compare_maps(&what, &body(n)?, &body(n2)?, &mut out);
    }
    for n in b.networks.iter().filter(|n| a.network(n.name()).is_none()) {
        out.push(format!("network {} is only on the right", n.name()));
    }

    for f in &a.factored {
        let Some(f2) = b.factored_cpt(f.name()) else {
            out.push(format!("factored {} is only on the left", f.name()));
            continue;
        };
        let what = format!("factored {}", f.name());
        if f.dependent() != f2.dependent() {
            out.push(format!("{what}: dependent differs"));
        }
        if f.parents() != f2.parents() {
            out.push(format!("{what}: parents differ"));
        }
        let body = |f: &FactoredCpt| {
            atom_map(
                f.mappings().iter().map(|m| (&m.brace, &m.distribution)),
                cfg,
            )
        };
        compare_maps(&what, &body(f)?, &body(f2)?, &mut out);
    }
    for f in b
        .factored
        .iter()
        .filter(|f| a.factored_cpt(f.name()).is_none())
    {
        out.push(format!("factored {} is only on the right", f.name()));
    }
    Ok(out)
}
