use std::fmt::Write;

use crate::algebra::{canonicalize_with, Element};
use crate::factored::DenseCpt;
use crate::types::{TypedDistribution, VariableType};
use crate::Config;

use super::{ModelDocument, NetworkDecl};

const HEADER: &str = "# acpt model\n";

/// Canonical text for `doc` under the default configuration.
pub fn serialize(doc: &ModelDocument) -> String {
    serialize_with(doc, &Config::default())
}

/// Canonical text: declarations sorted by kind then name, brace expressions
/// in canonical form. A brace too large to canonicalize under `cfg` is
/// written as declared.
pub fn serialize_with(doc: &ModelDocument, cfg: &Config) -> String {
    let mut out = String::from(HEADER);

    let mut vars: Vec<_> = doc.variables.iter().collect();
    vars.sort_by(|a, b| a.variable().cmp(b.variable()));
    if !vars.is_empty() {
        out.push('\n');
    }
    for v in vars {
        let _ = writeln!(
            out,
            "variable {} {{ {} }}",
            v.variable(),
            v.states().join(", ")
        );
    }

    let mut dists: Vec<_> = doc.distributions.iter().collect();
    dists.sort_by(|a, b| a.name.cmp(&b.name));
    if !dists.is_empty() {
        out.push('\n');
    }
    for d in dists {
        write_distribution(&mut out, d, doc);
    }

    let mut nets: Vec<_> = doc.networks.iter().collect();
    nets.sort_by(|a, b| a.name().cmp(b.name()));
    for n in nets {
        let (keyword, context) = match n {
            NetworkDecl::Full(_) => ("network", None),
            NetworkDecl::Sub(s) => ("subnetwork", s.context.as_ref()),
        };
        let p = n.partition();
        let items: Vec<(&str, &Element, &str)> = p
            .elements
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                n.mapping()
                    .get(&i)
                    .map(|d| (e.name.as_str(), &e.brace, d.name.as_str()))
            })
            .collect();
        write_body(
            &mut out,
            keyword,
            n.name(),
            n.dependent(),
            &p.parents,
            context,
            &items,
            cfg,
        );
    }

    let mut facs: Vec<_> = doc.factored.iter().collect();
    facs.sort_by(|a, b| a.name().cmp(b.name()));
    for f in facs {
        let items: Vec<(&str, &Element, &str)> = f
            .mappings()
            .iter()
            .map(|m| (m.name.as_str(), &m.brace, m.distribution.name.as_str()))
            .collect();
        write_body(
            &mut out,
            "factored",
            f.name(),
            f.dependent(),
            f.parents(),
            None,
            &items,
            cfg,
        );
    }
    out
}

fn write_distribution(out: &mut String, d: &TypedDistribution, doc: &ModelDocument) {
    let states: Vec<String> = doc
        .variables
        .iter()
        .find(|s| s.variable() == &d.target)
        .map(|s| s.states().to_vec())
        .unwrap_or_else(|| (0..d.weights.len()).map(|i| format!("s{i}")).collect());
    let pairs: Vec<String> = states
        .iter()
        .zip(&d.weights)
        .map(|(s, w)| format!("{s}: {w}"))
        .collect();
    let _ = writeln!(
        out,
        "distribution {} for {} {{ {} }}",
        d.name,
        d.target,
        pairs.join(", ")
    );
}

fn brace_text(e: &Element, cfg: &Config) -> String {
    canonicalize_with(e, cfg)
        .map(|c| c.to_string())
        .unwrap_or_else(|_| e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn write_body(
    out: &mut String,
    keyword: &str,
    name: &str,
    dependent: &VariableType,
    parents: &[VariableType],
    context: Option<&Element>,
    items: &[(&str, &Element, &str)],
    cfg: &Config,
) {
    let parents: Vec<String> = parents.iter().map(|p| p.to_string()).collect();
    let _ = write!(
        out,
        "\n{keyword} {name} for {dependent} given {}",
        parents.join(", ")
    );
    if let Some(c) = context.filter(|c| !c.is_neutral()) {
        let _ = write!(out, " context {}", brace_text(c, cfg));
    }
    out.push_str(" {\n");
    for (el, brace, d) in items {
        let _ = writeln!(out, "  element {el} = {} -> {d}", brace_text(brace, cfg));
    }
    out.push_str("}\n");
}

/// Formats like C's `%.12g`.
fn fmt_g12(x: f64) -> String {
    const P: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..P).contains(&exp) {
        trim(format!("{:.*}", (P - 1 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa.to_string()), exp.abs())
    }
}

/// Tab-separated dense table: a header of parent names and `P(dep=state)`
/// columns, then one row per parent atom in lexicographic order.
pub fn export_dense(cpt: &DenseCpt) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = cpt.parents.iter().map(|p| p.to_string()).collect();
    header.extend(
        cpt.dependent_states
            .iter()
            .map(|s| format!("P({}={s})", cpt.dependent)),
    );
    out.push_str(&header.join("\t"));
    out.push('\n');
    for (atom, row) in &cpt.rows {
        let mut cells: Vec<String> = atom.states().to_vec();
        cells.extend(row.iter().map(|p| fmt_g12(*p)));
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}
