//! Shared helpers for the integration tests: a small evaluator for nested
//! operation expressions and a brute-force census of centered tilings.

#![allow(dead_code)]

use std::collections::BTreeMap;

use tilings_core::algebra::AlgebraElement;
use tilings_core::enumerator::OperationIndex;
use tilings_core::operations::Operations;
use tilings_core::tiling::{slot_kind, CanonicalKey, Direction, Edge, TilingGraph};
use tilings_core::weight::WeightVector;

/// Parses a weight written as `0`, `e1`, `2e3` or `e3+2e4`.
pub fn weight(m: usize, text: &str) -> WeightVector {
    let mut w = vec![0u32; m];
    let text = text.trim();
    if text != "0" && !text.is_empty() {
        for part in text.split('+') {
            let (k, i) = part.trim().split_once('e').expect("weight term");
            let k = if k.is_empty() { 1 } else { k.parse().unwrap() };
            let i: usize = i.parse().unwrap();
            w[i - 1] += k;
        }
    }
    WeightVector::from_vec(w)
}

fn split_top(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(text[start..k].trim());
                start = k + 1;
            }
            _ => {}
        }
    }
    let last = text[start..].trim();
    if !last.is_empty() || !parts.is_empty() {
        parts.push(last);
    }
    parts
}

/// Evaluates expressions such as `mu4[e1](U2,U3,L2,mu0[e1]())`.
///
/// The arity after `mu` is checked against the argument count; anything
/// that is not an operation goes through the element parser.
pub fn eval(ops: &Operations<'_>, text: &str) -> AlgebraElement {
    let text = text.trim();
    let Some(rest) = text.strip_prefix("mu") else {
        return ops
            .ctx()
            .parse(text)
            .unwrap_or_else(|e| panic!("{text}: {e}"));
    };
    let open = rest.find(['[', '(']).expect("operation arguments");
    let arity: usize = rest[..open].parse().expect("operation arity");
    let (w, args) = if rest[open..].starts_with('[') {
        let close = rest.find(']').unwrap();
        (
            weight(ops.ctx().m(), &rest[open + 1..close]),
            &rest[close + 1..],
        )
    } else {
        (WeightVector::zero(ops.ctx().m()), &rest[open..])
    };
    let args = args
        .strip_prefix('(')
        .and_then(|a| a.strip_suffix(')'))
        .unwrap_or_else(|| panic!("malformed operation {text}"));
    let inputs: Vec<AlgebraElement> = split_top(args).into_iter().map(|a| eval(ops, a)).collect();
    assert_eq!(inputs.len(), arity, "arity mismatch in {text}");
    ops.mu(&w, &inputs)
        .unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn index(m: usize, d_max: usize) -> OperationIndex {
    OperationIndex::build(m, d_max).expect("index build")
}

/// Every vertex-labelled centered tiling with `d` vertices, built by
/// choosing, for each label, a partial matching between out-slots and
/// in-slots, and then every choice of root leaf. Invalid configurations
/// are discarded. Each rooted class shows up once per vertex labelling.
pub fn brute_force_census(m: usize, d: usize) -> BTreeMap<CanonicalKey, usize> {
    let deg = 2 * m - 2;
    let mut per_label: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
    for label in 1..m as u8 {
        let outs: Vec<(usize, usize)> = (0..d)
            .map(|v| (v, slot_of(m, Direction::Out, label)))
            .collect();
        let ins: Vec<(usize, usize)> = (0..d)
            .map(|v| (v, slot_of(m, Direction::In, label)))
            .collect();
        let mut matchings = Vec::new();
        partial_matchings(d, 0, &mut vec![None; d], &mut matchings);
        per_label.push(
            matchings
                .into_iter()
                .map(|mt| {
                    mt.iter()
                        .enumerate()
                        .filter_map(|(a, b)| b.map(|b| (a, b)))
                        .map(|(a, b)| (outs[a].0 * deg + outs[a].1, ins[b].0 * deg + ins[b].1))
                        .collect()
                })
                .collect(),
        );
    }
    let mut census = BTreeMap::new();
    let mut choice = vec![0usize; per_label.len()];
    loop {
        let joins: Vec<(usize, usize)> = per_label
            .iter()
            .zip(&choice)
            .flat_map(|(opts, &k)| opts[k].iter().copied())
            .collect();
        for g in rooted_graphs(m, d, &joins) {
            if g.validate().is_valid() {
                *census.entry(g.canonical_form()).or_insert(0) += 1;
            }
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return census;
            }
            choice[k] += 1;
            if choice[k] < per_label[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn slot_of(m: usize, dir: Direction, label: u8) -> usize {
    (0..2 * m - 2)
        .find(|&s| slot_kind(m, s) == (dir, label))
        .unwrap()
}

fn partial_matchings(
    d: usize,
    a: usize,
    current: &mut Vec<Option<usize>>,
    out: &mut Vec<Vec<Option<usize>>>,
) {
    if a == d {
        out.push(current.clone());
        return;
    }
    partial_matchings(d, a + 1, current, out);
    for b in 0..d {
        if current.iter().all(|&x| x != Some(b)) {
            current[a] = Some(b);
            partial_matchings(d, a + 1, current, out);
            current[a] = None;
        }
    }
}

/// Builds the graph for a set of (out, in) slot joins with every choice of
/// root. Leaves are ordered by walking the boundary directly on slots.
fn rooted_graphs(m: usize, d: usize, joins: &[(usize, usize)]) -> Vec<TilingGraph> {
    let deg = 2 * m - 2;
    let slots = d * deg;
    let mut mate = vec![usize::MAX; slots];
    for &(a, b) in joins {
        mate[a] = b;
        mate[b] = a;
    }
    let free: Vec<usize> = (0..slots).filter(|&h| mate[h] == usize::MAX).collect();
    if free.is_empty() {
        return Vec::new();
    }
    // Walk from a free slot: leave through its leaf, turn to the next slot
    // counterclockwise, and follow joined edges until a free slot appears.
    let next_ccw = |h: usize| (h / deg) * deg + (h % deg + 1) % deg;
    let mut order = Vec::new();
    let mut seen = vec![false; slots];
    let mut h = free[0];
    while !seen[h] {
        seen[h] = true;
        order.push(h);
        let mut x = next_ccw(h);
        while mate[x] != usize::MAX {
            x = next_ccw(mate[x]);
        }
        h = x;
    }
    // Leaves missed by the walk lie on other faces; the graph is then not a
    // disk and validation rejects it.
    order.extend(free.iter().copied().filter(|&h| !seen[h]));

    let leaf_id = |p: usize| slots + p;
    let mut edges = Vec::new();
    for &(a, b) in joins {
        edges.push(Edge {
            tail: a,
            head: b,
            label: slot_kind(m, a % deg).1,
        });
    }
    for (p, &h) in order.iter().enumerate() {
        let (dir, label) = slot_kind(m, h % deg);
        let (tail, head) = match dir {
            Direction::Out => (h, leaf_id(p)),
            Direction::In => (leaf_id(p), h),
        };
        edges.push(Edge { tail, head, label });
    }
    let rotations: Vec<Vec<usize>> = (0..d).map(|v| (v * deg..(v + 1) * deg).collect()).collect();
    let boundary: Vec<usize> = (0..order.len()).map(leaf_id).collect();
    (0..boundary.len())
        .filter_map(|root| {
            TilingGraph::new(m, rotations.clone(), edges.clone(), boundary.clone(), root).ok()
        })
        .collect()
}

pub fn factorial(d: usize) -> usize {
    (1..=d).product()
}
