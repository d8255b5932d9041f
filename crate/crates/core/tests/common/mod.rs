#![allow(dead_code)]

use std::collections::BTreeMap;

use acpt::{
    collect, cross, AsymmetryNetwork, ConditioningPartition, Element, PartitionElement, StateSpace,
    StateSpaces, TypedDistribution, VariableType,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn var(name: &str) -> VariableType {
    VariableType::new(name)
}

/// Declares `name` with states `{lower(name)}0..n`.
pub fn declare(spaces: &mut StateSpaces, name: &str, n: usize) -> VariableType {
    let v = var(name);
    let prefix = name.to_lowercase();
    let states: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    spaces.insert(StateSpace::new(v.clone(), states).unwrap());
    v
}

pub fn states(spaces: &StateSpaces, v: &VariableType) -> Vec<String> {
    spaces.get(v).unwrap().states().to_vec()
}

/// Every assignment to `vars`, in sorted-variable order.
pub fn product(spaces: &StateSpaces, vars: &[VariableType]) -> Vec<BTreeMap<VariableType, String>> {
    let mut sorted = vars.to_vec();
    sorted.sort();
    let mut out = vec![BTreeMap::new()];
    for v in &sorted {
        let mut next = Vec::new();
        for partial in &out {
            for s in states(spaces, v) {
                let mut a = partial.clone();
                a.insert(v.clone(), s);
                next.push(a);
            }
        }
        out = next;
    }
    out
}

pub fn tuple(assign: &BTreeMap<VariableType, String>) -> Vec<String> {
    assign.values().cloned().collect()
}

/// Brute-force membership: a simple brace matches its own variable, a
/// collection matches if any operand does, a crossing if all do.
pub fn member(e: &Element, assign: &BTreeMap<VariableType, String>) -> bool {
    match e {
        Element::Simple { variable, state } => assign.get(variable) == Some(state),
        Element::Collection(ops) => ops.iter().any(|o| member(o, assign)),
        Element::Crossing(ops) => ops.iter().all(|o| member(o, assign)),
        Element::Mapping { brace, .. } => member(brace, assign),
        Element::Neutral | Element::Distribution(_) => panic!("not a brace: {e}"),
    }
}

pub fn nonempty_subset(rng: &mut StdRng, items: &[String]) -> Vec<String> {
    loop {
        let pick: Vec<String> = items
            .iter()
            .filter(|_| rng.random_bool(0.5))
            .cloned()
            .collect();
        if !pick.is_empty() {
            return pick;
        }
    }
}

fn collect_all(mut ops: Vec<Element>) -> Element {
    let first = ops.remove(0);
    ops.into_iter()
        .fold(first, |acc, e| collect(acc, e).unwrap())
}

fn cross_all(mut ops: Vec<Element>) -> Element {
    let first = ops.remove(0);
    ops.into_iter().fold(first, |acc, e| cross(acc, e).unwrap())
}

/// Collection of simple braces, shuffled, occasionally with a repeat.
pub fn simple_collection(rng: &mut StdRng, v: &VariableType, chosen: &[String]) -> Element {
    let mut ops: Vec<Element> = chosen
        .iter()
        .map(|s| Element::simple(v.clone(), s.clone()))
        .collect();
    if rng.random_bool(0.2) {
        let dup = ops[rng.random_range(0..ops.len())].clone();
        ops.push(dup);
    }
    ops.shuffle(rng);
    collect_all(ops)
}

/// A random pure brace ranging over exactly `vars`.
pub fn random_brace(
    rng: &mut StdRng,
    spaces: &StateSpaces,
    vars: &[VariableType],
    depth: u32,
) -> Element {
    if vars.len() == 1 {
        let chosen = nonempty_subset(rng, &states(spaces, &vars[0]));
        return simple_collection(rng, &vars[0], &chosen);
    }
    if depth > 0 && rng.random_bool(0.35) {
        let a = random_brace(rng, spaces, vars, depth - 1);
        let b = random_brace(rng, spaces, vars, depth - 1);
        return collect(a, b).unwrap();
    }
    let mut shuffled = vars.to_vec();
    shuffled.shuffle(rng);
    let cut = rng.random_range(1..shuffled.len());
    let a = random_brace(rng, spaces, &shuffled[..cut], depth.saturating_sub(1));
    let b = random_brace(rng, spaces, &shuffled[cut..], depth.saturating_sub(1));
    cross(a, b).unwrap()
}

type Block = Vec<(VariableType, Vec<String>)>;

fn split_blocks(rng: &mut StdRng, block: Block, depth: u32, out: &mut Vec<Block>) {
    let splittable: Vec<usize> = (0..block.len()).filter(|&i| block[i].1.len() > 1).collect();
    if depth == 0 || splittable.is_empty() || rng.random_bool(0.3) {
        out.push(block);
        return;
    }
    let i = splittable[rng.random_range(0..splittable.len())];
    let mut states = block[i].1.clone();
    states.shuffle(rng);
    let parts = rng.random_range(2..=states.len());
    let mut groups: Vec<Vec<String>> = vec![Vec::new(); parts];
    for (k, s) in states.into_iter().enumerate() {
        let g = if k < parts {
            k
        } else {
            rng.random_range(0..parts)
        };
        groups[g].push(s);
    }
    for g in groups {
        let mut b = block.clone();
        b[i].1 = g;
        split_blocks(rng, b, depth - 1, out);
    }
}

fn block_brace(rng: &mut StdRng, block: &Block) -> Element {
    let mut ops: Vec<Element> = block
        .iter()
        .map(|(v, s)| simple_collection(rng, v, s))
        .collect();
    ops.shuffle(rng);
    cross_all(ops)
}

/// A random partition of the joint space of `vars` into disjoint,
/// exhaustive braces, built from a random splitting tree whose leaves are
/// then grouped.
pub fn random_partition(
    rng: &mut StdRng,
    spaces: &StateSpaces,
    vars: &[VariableType],
) -> Vec<Element> {
    let root: Block = vars
        .iter()
        .map(|v| (v.clone(), states(spaces, v)))
        .collect();
    let mut blocks = Vec::new();
    split_blocks(rng, root, 4, &mut blocks);
    blocks.shuffle(rng);
    let groups = rng.random_range(1..=blocks.len());
    let mut grouped: Vec<Vec<Element>> = vec![Vec::new(); groups];
    for (k, b) in blocks.iter().enumerate() {
        let g = if k < groups {
            k
        } else {
            rng.random_range(0..groups)
        };
        grouped[g].push(block_brace(rng, b));
    }
    grouped.into_iter().map(collect_all).collect()
}

pub fn random_distribution(
    rng: &mut StdRng,
    name: &str,
    target: &VariableType,
    n: usize,
) -> TypedDistribution {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                0.0
            } else {
                rng.random::<f64>() * 10.0
            }
        })
        .collect();
    if w.iter().all(|x| *x == 0.0) {
        w[0] = 1.0;
    }
    TypedDistribution::new(name, target.clone(), w).unwrap()
}

/// Distributions for `count` elements; some are reused across elements.
pub fn random_distributions(
    rng: &mut StdRng,
    spaces: &StateSpaces,
    target: &VariableType,
    count: usize,
    prefix: &str,
) -> Vec<TypedDistribution> {
    let n = spaces.get(target).unwrap().len();
    let mut out: Vec<TypedDistribution> = Vec::new();
    for i in 0..count {
        if !out.is_empty() && rng.random_bool(0.25) {
            let reuse = out[rng.random_range(0..out.len())].clone();
            out.push(reuse);
        } else {
            out.push(random_distribution(rng, &format!("{prefix}{i}"), target, n));
        }
    }
    out
}

pub fn network(
    name: &str,
    dependent: &VariableType,
    parents: &[VariableType],
    braces: Vec<Element>,
    dists: Vec<TypedDistribution>,
) -> AsymmetryNetwork {
    let elements = braces
        .into_iter()
        .enumerate()
        .map(|(i, b)| PartitionElement::new(format!("E{i}"), b))
        .collect();
    AsymmetryNetwork {
        name: name.into(),
        dependent: dependent.clone(),
        partition: ConditioningPartition {
            name: name.into(),
            parents: parents.to_vec(),
            elements,
        },
        mapping: dists.into_iter().enumerate().collect(),
    }
}
