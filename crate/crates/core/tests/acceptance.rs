//! Acceptance suite. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use acpt::dsl::{parse, semantic_diff, serialize};
use acpt::{
    align_parents, amap, atoms, braces_equal, canonicalize, collect, combine, compression_stats,
    cross, element_type_of, expand_to_cpt, lift_context, subnetwork_to_factored, validate_factored,
    validate_network, validate_subnetwork, AsymmetrySubnetwork, CombinePolicy, Config, Element,
    ElementType, Error, Execution, StateSpaces, TypedDistribution, VariableType,
};
use common::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const LAW_CASES: usize = 1000;
const NETWORK_CASES: usize = 200;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn atom_set(e: &Element) -> BTreeSet<Vec<String>> {
    atoms(e).unwrap().atoms().map(|a| a.0.clone()).collect()
}

fn oracle_atoms(e: &Element, spaces: &StateSpaces, vars: &[VariableType]) -> BTreeSet<Vec<String>> {
    product(spaces, vars)
        .into_iter()
        .filter(|a| member(e, a))
        .map(|a| tuple(&a))
        .collect()
}

fn mapped(e: &Element) -> BTreeMap<Vec<String>, TypedDistribution> {
    atoms(e)
        .unwrap()
        .entries()
        .map(|(a, d)| {
            (
                a.0.clone(),
                d.expect("mapping atoms carry distributions").clone(),
            )
        })
        .collect()
}

fn brace_type(vars: &[VariableType]) -> ElementType {
    ElementType::brace(vars.iter().cloned())
}

struct LawUniverse {
    spaces: StateSpaces,
    vars: Vec<VariableType>,
    target: VariableType,
}

/// Up to five parent variables with up to five states each, plus a target.
fn law_universe(rng: &mut StdRng) -> LawUniverse {
    let mut spaces = StateSpaces::new();
    let n = rng.random_range(3..=5);
    let vars = (0..n)
        .map(|i| declare(&mut spaces, &format!("V{i}"), rng.random_range(1..=5)))
        .collect();
    let target = declare(&mut spaces, "T", 2);
    LawUniverse {
        spaces,
        vars,
        target,
    }
}

/// Three nonempty, pairwise disjoint variable groups.
fn three_groups(rng: &mut StdRng, vars: &[VariableType]) -> [Vec<VariableType>; 3] {
    let mut v = vars.to_vec();
    v.shuffle(rng);
    let a = rng.random_range(1..=v.len() - 2);
    let b = rng.random_range(a + 1..=v.len() - 1);
    [v[..a].to_vec(), v[a..b].to_vec(), v[b..].to_vec()]
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xA1);
    let mut checked = 0usize;
    for case in 0..LAW_CASES {
        let u = law_universe(&mut rng);
        let sp = &u.spaces;
        let [g1, g2, g3] = three_groups(&mut rng, &u.vars);
        let ctx = |law: &str| format!("case {case}: {law}");

        // Same-typed braces over g1.
        let x = random_brace(&mut rng, sp, &g1, 2);
        let y = random_brace(&mut rng, sp, &g1, 2);
        let z = random_brace(&mut rng, sp, &g1, 2);
        // Oracle agreement for the generated braces.
        check(atom_set(&x) == oracle_atoms(&x, sp, &g1), || {
            ctx("atoms vs oracle")
        })?;

        let xy = collect(x.clone(), y.clone()).unwrap();
        check(element_type_of(&xy).unwrap() == brace_type(&g1), || {
            ctx("collect type")
        })?;
        let union: BTreeSet<_> = atom_set(&x).union(&atom_set(&y)).cloned().collect();
        check(atom_set(&xy) == union, || ctx("collect is union"))?;
        let l = collect(x.clone(), collect(y.clone(), z.clone()).unwrap()).unwrap();
        let r = collect(xy.clone(), z.clone()).unwrap();
        check(atom_set(&l) == atom_set(&r), || ctx("collect associative"))?;
        let yx = collect(y.clone(), x.clone()).unwrap();
        check(atom_set(&xy) == atom_set(&yx), || {
            ctx("collect commutative")
        })?;
        let xx = collect(x.clone(), x.clone()).unwrap();
        check(atom_set(&xx) == atom_set(&x), || ctx("collect idempotent"))?;
        check(collect(x.clone(), Element::Neutral).unwrap() == x, || {
            ctx("collect identity")
        })?;
        check(collect(Element::Neutral, x.clone()).unwrap() == x, || {
            ctx("collect identity")
        })?;
        check(braces_equal(&l, &r).unwrap(), || {
            ctx("braces_equal on associativity")
        })?;

        // Type-disjoint braces a over g1, b over g2, c over g3.
        let (a, b, c) = (
            x.clone(),
            random_brace(&mut rng, sp, &g2, 2),
            random_brace(&mut rng, sp, &g3, 2),
        );
        let ab = cross(a.clone(), b.clone()).unwrap();
        let g12: Vec<VariableType> = g1.iter().chain(&g2).cloned().collect();
        check(element_type_of(&ab).unwrap() == brace_type(&g12), || {
            ctx("cross type is union")
        })?;
        check(atom_set(&ab) == oracle_atoms(&ab, sp, &g12), || {
            ctx("cross atoms vs oracle")
        })?;
        let l = cross(a.clone(), cross(b.clone(), c.clone()).unwrap()).unwrap();
        let r = cross(ab.clone(), c.clone()).unwrap();
        check(atom_set(&l) == atom_set(&r), || ctx("cross associative"))?;
        let ba = cross(b.clone(), a.clone()).unwrap();
        check(atom_set(&ab) == atom_set(&ba), || ctx("cross commutative"))?;
        check(cross(a.clone(), Element::Neutral).unwrap() == a, || {
            ctx("cross identity")
        })?;
        check(cross(Element::Neutral, a.clone()).unwrap() == a, || {
            ctx("cross identity")
        })?;
        let bj = random_brace(&mut rng, sp, &g2, 1);
        let bk = random_brace(&mut rng, sp, &g2, 1);
        let lhs = cross(a.clone(), collect(bj.clone(), bk.clone()).unwrap()).unwrap();
        let rhs = collect(
            cross(a.clone(), bj.clone()).unwrap(),
            cross(a.clone(), bk.clone()).unwrap(),
        )
        .unwrap();
        check(atom_set(&lhs) == atom_set(&rhs), || {
            ctx("cross distributes over collect")
        })?;

        // Map laws.
        let d = random_distribution(&mut rng, "D", &u.target, 2);
        let m = amap(ab.clone(), d.clone()).unwrap();
        check(
            element_type_of(&m).unwrap()
                == ElementType::mapping(g12.iter().cloned(), u.target.clone()),
            || ctx("map type"),
        )?;
        let l = amap(collect(x.clone(), y.clone()).unwrap(), d.clone()).unwrap();
        let r = collect(
            amap(x.clone(), d.clone()).unwrap(),
            amap(y.clone(), d.clone()).unwrap(),
        )
        .unwrap();
        check(mapped(&l) == mapped(&r), || {
            ctx("map distributes over collect")
        })?;
        let l = amap(cross(a.clone(), b.clone()).unwrap(), d.clone()).unwrap();
        let r = cross(a.clone(), amap(b.clone(), d.clone()).unwrap()).unwrap();
        check(mapped(&l) == mapped(&r), || {
            ctx("map associates with cross")
        })?;

        // Forbidden constructions.
        let dist = Element::Distribution(d.clone());
        check(
            matches!(
                cross(dist.clone(), b.clone()),
                Err(Error::DistributionOperand(_))
            ),
            || ctx("D x y"),
        )?;
        check(
            matches!(
                cross(b.clone(), dist.clone()),
                Err(Error::DistributionOperand(_))
            ),
            || ctx("y x D"),
        )?;
        let mb = amap(b.clone(), d.clone()).unwrap();
        let ma = amap(a.clone(), d.clone()).unwrap();
        check(matches!(cross(ma, mb), Err(Error::MappingMapping)), || {
            ctx("mapping x mapping")
        })?;
        check(
            matches!(cross(x.clone(), y.clone()), Err(Error::OverlappingTypes(_))),
            || ctx("overlapping cross"),
        )?;
        let on_own = TypedDistribution::new(
            "DX",
            g1[0].clone(),
            vec![1.0; sp.get(&g1[0]).unwrap().len()],
        )
        .unwrap();
        check(
            matches!(amap(x.clone(), on_own), Err(Error::OverlappingTypes(_))),
            || ctx("x map D_X"),
        )?;

        // Canonical form.
        let canon = canonicalize(&lhs).unwrap();
        check(atom_set(&canon) == atom_set(&lhs), || {
            ctx("canonical atoms")
        })?;
        check(canonicalize(&canon).unwrap() == canon, || {
            ctx("canonical idempotent")
        })?;
        check(canonicalize(&rhs).unwrap() == canon, || {
            ctx("canonical decides equality")
        })?;

        checked += 1;
    }
    Ok(format!(
        "{checked} random cases x 20 laws, 5 forbidden constructions"
    ))
}

fn read_corpus(name: &str) -> acpt::dsl::ModelDocument {
    let text = std::fs::read_to_string(corpus_dir().join(name)).unwrap();
    parse(&text).unwrap()
}

fn sub(doc: &acpt::dsl::ModelDocument, name: &str) -> AsymmetrySubnetwork {
    match doc.network(name).unwrap() {
        acpt::dsl::NetworkDecl::Sub(s) => s.clone(),
        other => panic!("{name} is not a subnetwork: {other:?}"),
    }
}

fn tuples(list: &[(&str, &str)]) -> BTreeSet<Vec<String>> {
    list.iter()
        .map(|(a, b)| vec![a.to_string(), b.to_string()])
        .collect()
}

fn criterion_2() -> Outcome {
    let cfg = Config::default();
    let z1 = read_corpus("z1.acpt");
    let z2 = read_corpus("z2.acpt");
    let mut spaces = z1.spaces();
    for s in z2.variables.iter() {
        spaces.insert(s.clone());
    }
    let s1 = sub(&z1, "XY-1");
    let s2 = sub(&z2, "XY-2");

    let xy11 = atom_set(&s1.partition.elements[0].brace);
    let want11 = tuples(&[("x1", "y1"), ("x2", "y4"), ("x3", "y4")]);
    check(xy11 == want11, || format!("XY-1.1 atoms {xy11:?}"))?;
    let xy21 = atom_set(&s2.partition.elements[0].brace);
    let want21 = tuples(&[("x1", "y2"), ("x1", "y4"), ("x2", "y1"), ("x3", "y1")]);
    check(xy21 == want21, || format!("XY-2.1 atoms {xy21:?}"))?;
    for s in [&s1, &s2] {
        let a = atom_set(&s.partition.elements[0].brace);
        let b = atom_set(&s.partition.elements[1].brace);
        check(a.is_disjoint(&b) && a.len() + b.len() == 12, || {
            format!("{} is not a complement pair", s.name)
        })?;
        let r = validate_subnetwork(s, &spaces, &cfg);
        check(r.is_valid(), || r.summary())?;
    }

    let f1 = subnetwork_to_factored(&s1, true, &spaces, &cfg).unwrap();
    let f2 = subnetwork_to_factored(&s2, true, &spaces, &cfg).unwrap();
    let combined = combine(&f1, &f2, CombinePolicy::ErrorOnOverlap, &spaces, &cfg).unwrap();
    let r = validate_factored(&combined, &spaces, &cfg);
    check(r.is_valid(), || r.summary())?;
    check(combined.mappings().len() == 4, || {
        format!("{} mappings", combined.mappings().len())
    })?;
    let dense = expand_to_cpt(&combined, &spaces, &cfg).unwrap();
    check(dense.len() == 24, || format!("{} rows", dense.len()))?;
    let stats = compression_stats(&combined, &spaces, &cfg).unwrap();
    check(stats.dense_rows == 6 * stats.mappings, || {
        format!("{stats:?}")
    })?;
    check(stats.ratio == Some(6.0), || {
        format!("ratio {:?}", stats.ratio)
    })?;

    // Agrees with the hand-written combined table.
    let fig3 = read_corpus("fig3.acpt");
    check(
        combined.atom_map(&cfg).unwrap() == fig3.factored[0].atom_map(&cfg).unwrap(),
        || "combined table differs from fig3.acpt".into(),
    )?;
    Ok("XY-1.1 and XY-2.1 atoms exact, 4 mappings, 24 rows, ratio 6".into())
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xA3);
    let cfg = Config::default();
    let mut rows = 0usize;
    for case in 0..NETWORK_CASES {
        let mut spaces = StateSpaces::new();
        let n = rng.random_range(1..=4);
        let mut parents: Vec<VariableType> = (0..n)
            .map(|i| declare(&mut spaces, &format!("P{i}"), rng.random_range(1..=4)))
            .collect();
        parents.shuffle(&mut rng);
        let dep = declare(&mut spaces, "W", rng.random_range(2..=4));
        let braces = random_partition(&mut rng, &spaces, &parents);
        let dists = random_distributions(&mut rng, &spaces, &dep, braces.len(), "D");
        let net = network("N", &dep, &parents, braces, dists);
        let report = validate_network(&net, &spaces, &cfg);
        check(report.is_valid(), || {
            format!("case {case}: {}", report.summary())
        })?;

        let f = acpt::network_to_factored(&net, &spaces, &cfg).unwrap();
        let dense = expand_to_cpt(&f, &spaces, &cfg).unwrap();
        let seq = expand_to_cpt(&f, &spaces, &cfg.with_execution(Execution::Sequential)).unwrap();
        check(dense == seq, || {
            format!("case {case}: sequential and parallel expansions differ")
        })?;

        let space = product(&spaces, &parents);
        check(dense.len() == space.len(), || {
            format!("case {case}: row count")
        })?;
        for assign in &space {
            // linear scan of the partition elements
            let hits: Vec<usize> = net
                .partition
                .elements
                .iter()
                .enumerate()
                .filter(|(_, e)| member(&e.brace, assign))
                .map(|(i, _)| i)
                .collect();
            check(hits.len() == 1, || {
                format!("case {case}: {} elements contain {assign:?}", hits.len())
            })?;
            let w = &net.mapping[&hits[0]].weights;
            let total: f64 = w.iter().sum();
            let row = dense.row(&acpt::Atom(tuple(assign))).unwrap();
            for (p, wi) in row.iter().zip(w) {
                check((p - wi / total).abs() <= 1e-12, || {
                    format!("case {case}: row {assign:?}")
                })?;
            }
            rows += 1;
        }
    }
    Ok(format!(
        "{NETWORK_CASES} random networks, {rows} rows match the scan oracle"
    ))
}

fn random_subnetwork(
    rng: &mut StdRng,
    spaces: &StateSpaces,
    parents: &[VariableType],
    dep: &VariableType,
    context: Element,
    name: &str,
) -> AsymmetrySubnetwork {
    let mut braces = random_partition(rng, spaces, parents);
    braces.shuffle(rng);
    let keep = rng.random_range(1..=braces.len());
    braces.truncate(keep);
    let dists = random_distributions(rng, spaces, dep, braces.len(), &format!("{name}-D"));
    let mut s: AsymmetrySubnetwork = network(name, dep, parents, braces, dists).into();
    s.context = Some(context);
    s
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xA4);
    let cfg = Config::default();
    for case in 0..NETWORK_CASES {
        let mut spaces = StateSpaces::new();
        let n = rng.random_range(1..=3);
        let parents: Vec<VariableType> = (0..n)
            .map(|i| declare(&mut spaces, &format!("P{i}"), rng.random_range(1..=4)))
            .collect();
        let z = declare(&mut spaces, "Z", rng.random_range(2..=4));
        let dep = declare(&mut spaces, "W", 2);

        let mut zs = states(&spaces, &z);
        zs.shuffle(&mut rng);
        let cut = rng.random_range(1..zs.len());
        let (c1, c2) = zs.split_at(cut);
        let c2 = nonempty_subset(&mut rng, c2);
        let ctx1 = simple_collection(&mut rng, &z, c1);
        let ctx2 = simple_collection(&mut rng, &z, &c2);

        let s1 = random_subnetwork(&mut rng, &spaces, &parents, &dep, ctx1.clone(), "A");
        let s2 = random_subnetwork(&mut rng, &spaces, &parents, &dep, ctx2.clone(), "B");
        let f1 = subnetwork_to_factored(&s1, false, &spaces, &cfg).unwrap();
        let f2 = subnetwork_to_factored(&s2, false, &spaces, &cfg).unwrap();
        let l1 = lift_context(&f1, &ctx1).unwrap();
        let l2 = lift_context(&f2, &ctx2).unwrap();

        let ab = combine(&l1, &l2, CombinePolicy::ErrorOnOverlap, &spaces, &cfg)
            .map_err(|e| format!("case {case}: combine failed: {e}"))?;
        let report = validate_factored(&ab, &spaces, &cfg);
        check(report.overlaps().count() == 0 && report.is_valid(), || {
            format!("case {case}: {}", report.summary())
        })?;
        let ba = combine(&l2, &l1, CombinePolicy::ErrorOnOverlap, &spaces, &cfg)
            .map_err(|e| format!("case {case}: reversed combine failed: {e}"))?;
        check(
            ab.atom_map(&cfg).unwrap() == ba.atom_map(&cfg).unwrap(),
            || format!("case {case}: combine is not commutative"),
        )?;
    }
    Ok(format!(
        "{NETWORK_CASES} context-disjoint pairs combine without overlap, commutatively"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xA5);
    let cfg = Config::default();
    let mut compared = 0usize;
    for case in 0..NETWORK_CASES {
        let mut spaces = StateSpaces::new();
        let n = rng.random_range(1..=3);
        let parents: Vec<VariableType> = (0..n)
            .map(|i| declare(&mut spaces, &format!("P{i}"), rng.random_range(1..=4)))
            .collect();
        let added = declare(&mut spaces, "Q", rng.random_range(2..=4));
        let dep = declare(&mut spaces, "W", 3);
        let braces = random_partition(&mut rng, &spaces, &parents);
        let dists = random_distributions(&mut rng, &spaces, &dep, braces.len(), "D");
        let net = network("N", &dep, &parents, braces, dists);
        let f = acpt::network_to_factored(&net, &spaces, &cfg).unwrap();

        let mut all = parents.clone();
        all.push(added.clone());
        let aligned = align_parents(&f, &all, &spaces).unwrap();
        let dense = expand_to_cpt(&aligned, &spaces, &cfg).unwrap();
        let qi = dense.parents.iter().position(|p| *p == added).unwrap();
        let q_states = states(&spaces, &added);

        for assign in product(&spaces, &parents) {
            let base = tuple(&assign);
            let row_for = |q: &String| {
                let mut t = base.clone();
                t.insert(qi, q.clone());
                dense.row(&acpt::Atom(t)).unwrap().to_vec()
            };
            let first = row_for(&q_states[0]);
            for q in &q_states[1..] {
                check(row_for(q) == first, || {
                    format!("case {case}: rows differ across {added}")
                })?;
                compared += 1;
            }
        }
        check(aligned.mappings().len() == f.mappings().len(), || {
            format!("case {case}: mapping count changed")
        })?;
    }
    Ok(format!(
        "{NETWORK_CASES} aligned tables, {compared} row pairs exactly equal"
    ))
}

fn expect_header(text: &str) -> Option<(String, i32, Vec<String>)> {
    let line = text.lines().next()?.strip_prefix("# expect:")?;
    let mut parts = line.split_whitespace();
    let category = parts.next()?.to_string();
    let code = parts.next()?.parse().ok()?;
    Some((category, code, parts.map(str::to_string).collect()))
}

fn criterion_6() -> Outcome {
    let cfg = Config::default();
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "acpt"))
        .collect();
    files.sort();
    check(files.len() >= 20, || {
        format!("corpus has only {} files", files.len())
    })?;
    let mut saw_activity = false;
    for f in &files {
        let name = f.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(f).unwrap();
        let doc = parse(&text).map_err(|d| format!("{name}: {d}"))?;
        let canon = serialize(&doc);
        let again = parse(&canon).map_err(|d| format!("{name} (serialized): {d}"))?;
        let diff = semantic_diff(&doc, &again, &cfg).unwrap();
        check(diff.is_empty(), || format!("{name}: {diff:?}"))?;
        check(serialize(&again) == canon, || {
            format!("{name}: serialization is not a fixpoint")
        })?;
        saw_activity |= doc.networks.iter().any(|n| {
            let parents: BTreeSet<&str> = n.partition().parents.iter().map(|p| p.name()).collect();
            parents == BTreeSet::from(["Wind", "Rain", "TimeOfDay"])
        });
    }
    check(saw_activity, || {
        "no Activity model with Wind, Rain, TimeOfDay".into()
    })?;

    let mut errors: Vec<PathBuf> = std::fs::read_dir(corpus_dir().join("errors"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    errors.sort();
    let mut categories = BTreeSet::new();
    for f in &errors {
        let name = f.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(f).unwrap();
        let (category, code, args) =
            expect_header(&text).ok_or_else(|| format!("{name}: missing expect header"))?;
        let (cmd, rest) = match args.split_first() {
            Some((c, r)) => (c.clone(), r.to_vec()),
            None => ("validate".to_string(), Vec::new()),
        };
        let out = Command::new(env!("CARGO_BIN_EXE_acpt"))
            .arg(&cmd)
            .arg(f)
            .args(&rest)
            .output()
            .unwrap();
        let stderr = String::from_utf8_lossy(&out.stderr);
        check(out.status.code() == Some(code), || {
            format!(
                "{name}: exit {:?}, expected {code}; {stderr}",
                out.status.code()
            )
        })?;
        let tag = if category == "usage" {
            "error:".to_string()
        } else {
            format!("{category} error")
        };
        check(stderr.contains(&tag), || {
            format!("{name}: stderr lacks `{tag}`: {stderr}")
        })?;
        categories.insert(category);
    }
    Ok(format!(
        "{} files round-trip; {} error files across {} categories",
        files.len(),
        errors.len(),
        categories.len()
    ))
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("1 algebra laws", criterion_1, Duration::from_secs(10)),
        (
            "2 figure reconstruction",
            criterion_2,
            Duration::from_secs(1),
        ),
        ("3 oracle equivalence", criterion_3, Duration::from_secs(30)),
        (
            "4 combination soundness",
            criterion_4,
            Duration::from_secs(60),
        ),
        (
            "5 context-specific independence",
            criterion_5,
            Duration::from_secs(60),
        ),
        (
            "6 dsl round-trip and diagnostics",
            criterion_6,
            Duration::from_secs(60),
        ),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > budget => {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} ({elapsed:.2?})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
