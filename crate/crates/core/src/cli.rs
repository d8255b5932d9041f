//! The `acpt` command-line tool.
//!
//! Exit codes: 0 success, 1 validation or semantic failure (including parse
//! errors), 2 usage error, 3 I/O error, 4 atom limit exceeded.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::algebra::{atoms_with, Element};
use crate::dsl::{self, ModelDocument, NetworkDecl};
use crate::error::Error;
use crate::factored::{
    combine, compression_stats, expand_to_cpt, validate_factored, CombinePolicy, FactoredCpt,
};
use crate::network::{subnetwork_to_factored, validate_network, validate_subnetwork};
use crate::types::{StateSpace, StateSpaces, TypedDistribution, VariableType, DEFAULT_TOLERANCE};
use crate::{Config, DEFAULT_MAX_ATOMS};

#[derive(Debug, Parser)]
#[command(
    name = "acpt",
    version,
    about = "Validate, combine and expand asymmetry-network models"
)]
struct Cli {
    /// Cap on atoms produced by any single enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ATOMS, value_name = "N")]
    max_atoms: usize,

    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Policy {
    Error,
    Merge,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate every network and factored CPT in a model.
    Validate { file: PathBuf },
    /// Print the sorted atoms of a named element (`NAME` or `NETWORK:NAME`).
    Atoms {
        file: PathBuf,
        #[arg(long)]
        element: String,
    },
    /// Print the canonical serialization of a model.
    Canon { file: PathBuf },
    /// Combine all factored CPTs (and lifted networks) per dependent variable.
    Combine {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "error")]
        policy: Policy,
        /// Tolerance for `--policy merge`.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lift a context subnetwork into an explicit factored CPT.
    Lift {
        file: PathBuf,
        #[arg(long)]
        network: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a factored CPT or network into a dense table.
    Expand {
        file: PathBuf,
        /// Factored CPT, network, or dependent variable name.
        #[arg(long)]
        cpt: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compression statistics per factored CPT and network.
    Stats { file: PathBuf },
    /// Semantic comparison of two models; exit 0 iff equal.
    Diff { left: PathBuf, right: PathBuf },
}

/// Result of one invocation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Semantic(String),
    Io(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Semantic(_) => 1,
            Failure::Io(_) => 3,
            Failure::Resource(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Semantic(m) | Failure::Io(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource() {
            Failure::Resource(format!("resource error: {e}"))
        } else {
            Failure::Semantic(format!("{} error: {e}", e.code()))
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let cfg = Config::default().with_max_atoms(cli.max_atoms);
    let mut out = Outcome::default();
    match execute(&cli, &cfg, &mut out) {
        Ok(code) => out.code = code,
        Err(f) => {
            out.code = f.code();
            let _ = writeln!(out.stderr, "acpt: {}", f.message());
        }
    }
    out
}

fn read_model(path: &Path) -> CliResult<ModelDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    dsl::parse(&text).map_err(|d| Failure::Semantic(format!("{}:{d}", path.display())))
}

fn write_or_print(out: &mut Outcome, path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            out.stdout.push_str(text);
            Ok(())
        }
    }
}

fn json_line(out: &mut Outcome, value: serde_json::Value) {
    out.stdout
        .push_str(&serde_json::to_string_pretty(&value).expect("json values serialize"));
    out.stdout.push('\n');
}

fn execute(cli: &Cli, cfg: &Config, out: &mut Outcome) -> CliResult<i32> {
    match &cli.command {
        Command::Validate { file } => cmd_validate(&read_model(file)?, cli.json, cfg, out),
        Command::Atoms { file, element } => {
            cmd_atoms(&read_model(file)?, element, cli.json, cfg, out).map(|_| 0)
        }
        Command::Canon { file } => {
            let text = dsl::serialize_with(&read_model(file)?, cfg);
            if cli.json {
                json_line(out, json!({ "canonical": text }));
            } else {
                out.stdout.push_str(&text);
            }
            Ok(0)
        }
        Command::Combine {
            files,
            policy,
            tol,
            out: dest,
        } => {
            let policy = match policy {
                Policy::Error => CombinePolicy::ErrorOnOverlap,
                Policy::Merge => CombinePolicy::MergeIfEqual { tol: *tol },
            };
            let docs = files
                .iter()
                .map(|f| read_model(f))
                .collect::<CliResult<Vec<_>>>()?;
            cmd_combine(&docs, policy, dest.as_ref(), cli.json, cfg, out).map(|_| 0)
        }
        Command::Lift {
            file,
            network,
            out: dest,
        } => {
            let doc = read_model(file)?;
            let Some(n) = doc.network(network) else {
                return Err(Failure::Semantic(format!("no network named `{network}`")));
            };
            let lifted = n.to_factored(true, &doc.spaces(), cfg)?;
            let model = factored_document(&doc.variables, vec![lifted])?;
            emit_model(out, dest.as_ref(), &model, cli.json, cfg).map(|_| 0)
        }
        Command::Expand {
            file,
            cpt,
            out: dest,
        } => {
            let doc = read_model(file)?;
            let f = find_cpt(&doc, cpt, cfg)?;
            let dense = expand_to_cpt(&f, &doc.spaces(), cfg)?;
            let text = if cli.json {
                let rows: Vec<_> = dense
                    .rows
                    .iter()
                    .map(|(a, p)| json!({ "atom": a, "p": p }))
                    .collect();
                let mut s = serde_json::to_string_pretty(&json!({
                    "name": f.name(),
                    "dependent": dense.dependent.to_string(),
                    "states": dense.dependent_states,
                    "parents": dense.parents.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "rows": rows,
                }))
                .expect("json values serialize");
                s.push('\n');
                s
            } else {
                dsl::export_dense(&dense)
            };
            write_or_print(out, dest.as_ref(), &text).map(|_| 0)
        }
        Command::Stats { file } => cmd_stats(&read_model(file)?, cli.json, cfg, out).map(|_| 0),
        Command::Diff { left, right } => {
            let (a, b) = (read_model(left)?, read_model(right)?);
            let diffs = dsl::semantic_diff(&a, &b, cfg)?;
            if cli.json {
                json_line(
                    out,
                    json!({ "equal": diffs.is_empty(), "differences": diffs }),
                );
            } else if diffs.is_empty() {
                out.stdout.push_str("equal\n");
            } else {
                for d in &diffs {
                    let _ = writeln!(out.stdout, "{d}");
                }
            }
            if diffs.is_empty() {
                Ok(0)
            } else {
                Err(Failure::Semantic(format!(
                    "models differ ({} difference(s))",
                    diffs.len()
                )))
            }
        }
    }
}

fn cmd_validate(
    doc: &ModelDocument,
    json: bool,
    cfg: &Config,
    out: &mut Outcome,
) -> CliResult<i32> {
    let spaces = doc.spaces();
    let mut reports = Vec::new();
    for n in &doc.networks {
        reports.push(match n {
            NetworkDecl::Full(n) => validate_network(n, &spaces, cfg),
            NetworkDecl::Sub(s) => validate_subnetwork(s, &spaces, cfg),
        });
    }
    for f in &doc.factored {
        reports.push(validate_factored(f, &spaces, cfg));
    }

    if json {
        json_line(
            out,
            json!({ "valid": reports.iter().all(|r| r.is_valid()), "reports": reports }),
        );
    } else {
        for r in &reports {
            if r.is_valid() {
                let _ = writeln!(out.stdout, "{}: ok ({})", r.subject, r.coverage);
            } else {
                let _ = writeln!(out.stdout, "{}: INVALID ({})", r.subject, r.coverage);
                for v in &r.violations {
                    let _ = writeln!(out.stdout, "  {v}");
                }
            }
        }
        let _ = writeln!(
            out.stdout,
            "{} variable(s), {} distribution(s), {} network(s), {} factored CPT(s)",
            doc.variables.len(),
            doc.distributions.len(),
            doc.networks.len(),
            doc.factored.len()
        );
    }

    let invalid: Vec<&str> = reports
        .iter()
        .filter(|r| !r.is_valid())
        .map(|r| r.subject.as_str())
        .collect();
    if invalid.is_empty() {
        return Ok(0);
    }
    if reports.iter().any(|r| r.limit_exceeded()) {
        return Err(Failure::Resource(format!(
            "resource error: atom limit of {} exceeded during validation",
            cfg.max_atoms
        )));
    }
    Err(Failure::Semantic(format!(
        "validation error: {} invalid: {}",
        invalid.len(),
        invalid.join(", ")
    )))
}

/// Every named brace in the document, qualified by its container.
fn named_braces(doc: &ModelDocument) -> Vec<(String, String, &Element)> {
    let mut out = Vec::new();
    for n in &doc.networks {
        for e in &n.partition().elements {
            out.push((n.name().to_owned(), e.name.clone(), &e.brace));
        }
    }
    for f in &doc.factored {
        for m in f.mappings() {
            out.push((f.name().to_owned(), m.name.clone(), &m.brace));
        }
    }
    out
}

fn cmd_atoms(
    doc: &ModelDocument,
    element: &str,
    json: bool,
    cfg: &Config,
    out: &mut Outcome,
) -> CliResult<()> {
    let all = named_braces(doc);
    let found: Vec<&(String, String, &Element)> = match element.split_once(':') {
        Some((c, e)) => all
            .iter()
            .filter(|(cn, en, _)| cn == c && en == e)
            .collect(),
        None => all.iter().filter(|(_, en, _)| en == element).collect(),
    };
    let (container, name, brace) = match found.as_slice() {
        [one] => *one,
        [] => return Err(Failure::Semantic(format!("no element named `{element}`"))),
        many => {
            let names: Vec<String> = many.iter().map(|(c, e, _)| format!("{c}:{e}")).collect();
            return Err(Failure::Semantic(format!(
                "`{element}` is ambiguous: {}",
                names.join(", ")
            )));
        }
    };
    let set = atoms_with(brace, cfg)?;
    if json {
        json_line(
            out,
            json!({
                "element": format!("{container}:{name}"),
                "variables": set.variables().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "atoms": set.atoms().collect::<Vec<_>>(),
            }),
        );
    } else {
        for a in set.atoms() {
            let _ = writeln!(out.stdout, "{a}");
        }
    }
    Ok(())
}

/// Looks up a factored CPT by name, then a network by name, then either by
/// dependent variable name.
fn find_cpt(doc: &ModelDocument, name: &str, cfg: &Config) -> CliResult<FactoredCpt> {
    let spaces = doc.spaces();
    if let Some(f) = doc.factored_cpt(name) {
        return Ok(f.clone());
    }
    let net_factored = |n: &NetworkDecl| -> CliResult<FactoredCpt> {
        // Coverage is checked by the expansion itself, which names the
        // missing atoms.
        match n {
            NetworkDecl::Full(n) => Ok(subnetwork_to_factored(
                &n.clone().into(),
                false,
                &spaces,
                cfg,
            )?),
            NetworkDecl::Sub(s) => Ok(subnetwork_to_factored(s, true, &spaces, cfg)?),
        }
    };
    if let Some(n) = doc.network(name) {
        return net_factored(n);
    }
    let facs: Vec<&FactoredCpt> = doc
        .factored
        .iter()
        .filter(|f| f.dependent().name() == name)
        .collect();
    let nets: Vec<&NetworkDecl> = doc
        .networks
        .iter()
        .filter(|n| n.dependent().name() == name)
        .collect();
    match (facs.as_slice(), nets.as_slice()) {
        ([f], []) => Ok((*f).clone()),
        ([], [n]) => net_factored(n),
        ([], []) => Err(Failure::Semantic(format!(
            "no factored CPT, network or dependent named `{name}`"
        ))),
        _ => Err(Failure::Semantic(format!(
            "`{name}` names the dependent of several CPTs; pass a CPT name"
        ))),
    }
}

fn merged_spaces<'a>(
    docs: impl IntoIterator<Item = &'a ModelDocument>,
) -> CliResult<Vec<StateSpace>> {
    let mut merged: BTreeMap<VariableType, StateSpace> = BTreeMap::new();
    for doc in docs {
        for s in &doc.variables {
            match merged.get(s.variable()) {
                Some(prev) if prev != s => {
                    return Err(Failure::Semantic(format!(
                        "variable `{}` is declared with different states in different inputs",
                        s.variable()
                    )))
                }
                Some(_) => {}
                None => {
                    merged.insert(s.variable().clone(), s.clone());
                }
            }
        }
    }
    Ok(merged.into_values().collect())
}

/// A document holding the given factored CPTs, the variables and the
/// distributions they use.
fn factored_document(
    variables: &[StateSpace],
    factored: Vec<FactoredCpt>,
) -> CliResult<ModelDocument> {
    let mut dists: BTreeMap<String, TypedDistribution> = BTreeMap::new();
    for f in &factored {
        for m in f.mappings() {
            match dists.get(&m.distribution.name) {
                Some(prev) if prev != &m.distribution => {
                    return Err(Failure::Semantic(format!(
                        "distribution `{}` has different definitions in different inputs",
                        m.distribution.name
                    )))
                }
                _ => {
                    dists.insert(m.distribution.name.clone(), m.distribution.clone());
                }
            }
        }
    }
    Ok(ModelDocument {
        variables: variables.to_vec(),
        distributions: dists.into_values().collect(),
        networks: Vec::new(),
        factored,
    })
}

fn emit_model(
    out: &mut Outcome,
    dest: Option<&PathBuf>,
    model: &ModelDocument,
    json: bool,
    cfg: &Config,
) -> CliResult<()> {
    let text = dsl::serialize_with(model, cfg);
    write_or_print(out, dest, &text)?;
    let names: Vec<&str> = model.factored.iter().map(|f| f.name()).collect();
    if json {
        json_line(
            out,
            json!({
                "out": dest.map(|p| p.display().to_string()),
                "factored": names,
            }),
        );
    } else if let Some(p) = dest {
        let _ = writeln!(out.stdout, "wrote {} to {}", names.join(", "), p.display());
    }
    Ok(())
}

fn cmd_combine(
    docs: &[ModelDocument],
    policy: CombinePolicy,
    dest: Option<&PathBuf>,
    json: bool,
    cfg: &Config,
    out: &mut Outcome,
) -> CliResult<()> {
    let variables = merged_spaces(docs)?;
    let spaces: StateSpaces = variables.iter().cloned().collect();

    let mut groups: BTreeMap<VariableType, Vec<FactoredCpt>> = BTreeMap::new();
    for doc in docs {
        for f in &doc.factored {
            groups
                .entry(f.dependent().clone())
                .or_default()
                .push(f.clone());
        }
        for n in &doc.networks {
            let f = n.to_factored(true, &spaces, cfg)?;
            groups.entry(f.dependent().clone()).or_default().push(f);
        }
    }

    let mut used = BTreeSet::new();
    let mut combined = Vec::new();
    for (dep, parts) in groups {
        let mut iter = parts.into_iter();
        let first = iter.next().expect("groups are non-empty");
        let mut acc = first;
        for next in iter {
            acc = combine(&acc, &next, policy, &spaces, cfg)?;
        }
        let mut name = dep.name().to_owned();
        let mut k = 2;
        while !used.insert(name.clone()) {
            name = format!("{}-{k}", dep.name());
            k += 1;
        }
        combined.push(acc.with_name(name));
    }
    let model = factored_document(&variables, combined)?;
    emit_model(out, dest, &model, json, cfg)
}

fn cmd_stats(doc: &ModelDocument, json: bool, cfg: &Config, out: &mut Outcome) -> CliResult<()> {
    let spaces = doc.spaces();
    let mut cpts: Vec<FactoredCpt> = doc.factored.clone();
    for n in &doc.networks {
        cpts.push(n.to_factored(true, &spaces, cfg)?);
    }
    let stats = cpts
        .iter()
        .map(|f| compression_stats(f, &spaces, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    if json {
        json_line(out, json!(stats));
    } else {
        for s in &stats {
            let ratio = s.ratio.map_or_else(|| "-".to_string(), |r| r.to_string());
            let _ = writeln!(
                out.stdout,
                "{}: dense_rows={} mappings={} distinct_distributions={} covered_atoms={} ratio={ratio}",
                s.name, s.dense_rows, s.mappings, s.distinct_distributions, s.covered_atoms
            );
        }
    }
    Ok(())
}
