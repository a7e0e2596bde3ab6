//! Brute-force reference counters.
//!
//! Nothing here uses the enumeration or counting-engine code. Subsets are
//! grown directly and every induced subgraph is classified on its own.

use std::collections::BTreeSet;

use crate::engine::{Histogram, MAX_MOTIF, MIN_MOTIF};
use crate::error::{MotifError, Result};
use crate::graph::DirectedGraph;
use crate::iso::{encode_adjacency, IsoCache};

fn undirected_neighbors(g: &DirectedGraph, v: u32) -> BTreeSet<u32> {
    g.out_neighbors(v)
        .iter()
        .chain(g.in_neighbors(v))
        .copied()
        .collect()
}

/// Calls `visit` once for every connected `k`-subset of `g` (sorted).
///
/// Each subset is grown from its smallest vertex; a candidate joins the
/// extension set only when it is larger than the root and not adjacent to any
/// vertex chosen before the one that discovered it.
pub fn for_each_connected_subset(g: &DirectedGraph, k: usize, mut visit: impl FnMut(&[u32])) {
    fn grow(
        g: &DirectedGraph,
        k: usize,
        root: u32,
        subset: &mut Vec<u32>,
        extension: BTreeSet<u32>,
        visit: &mut dyn FnMut(&[u32]),
    ) {
        if subset.len() == k {
            let mut sorted = subset.clone();
            sorted.sort_unstable();
            visit(&sorted);
            return;
        }
        let covered: BTreeSet<u32> = subset
            .iter()
            .flat_map(|&s| undirected_neighbors(g, s))
            .chain(subset.iter().copied())
            .collect();
        let mut remaining = extension;
        while let Some(w) = remaining.pop_first() {
            let mut next = remaining.clone();
            for u in undirected_neighbors(g, w) {
                if u > root && !covered.contains(&u) {
                    next.insert(u);
                }
            }
            subset.push(w);
            grow(g, k, root, subset, next, visit);
            subset.pop();
        }
    }

    for root in 0..g.n() as u32 {
        let extension: BTreeSet<u32> = undirected_neighbors(g, root)
            .into_iter()
            .filter(|&u| u > root)
            .collect();
        let mut subset = vec![root];
        grow(g, k, root, &mut subset, extension, &mut visit);
    }
}

/// H_k by classifying every connected induced `k`-subgraph directly.
pub fn brute_force_histogram(g: &DirectedGraph, k: usize) -> Result<Histogram> {
    if !(MIN_MOTIF..=MAX_MOTIF).contains(&k) {
        return Err(MotifError::SizeOutOfRange {
            size: k,
            min: MIN_MOTIF,
            max: MAX_MOTIF,
        });
    }
    if k > g.n() {
        return Err(MotifError::MotifLargerThanGraph { k, n: g.n() });
    }
    let mut cache = IsoCache::new();
    let mut hist = Histogram::new(k);
    let mut failure = None;
    for_each_connected_subset(g, k, |s| match encode_adjacency(g, s) {
        Ok(code) => hist.add(cache.iso_id(code), 1),
        Err(e) => failure = Some(e),
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(hist),
    }
}

/// Every `k`-subset of `0..n` passing a connectivity check, in lexicographic
/// order. Exponential; meant for `n` up to about 20.
pub fn exhaustive_connected_subsets(g: &DirectedGraph, k: usize) -> Vec<Vec<u32>> {
    let n = g.n();
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let subset: Vec<u32> = idx.iter().map(|&i| i as u32).collect();
        if is_weakly_connected(g, &subset) {
            out.push(subset);
        }
        // next combination
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// Weak connectivity of `G[subset]` by flood fill over pair queries.
pub fn is_weakly_connected(g: &DirectedGraph, subset: &[u32]) -> bool {
    if subset.is_empty() {
        return true;
    }
    let mut reached = vec![false; subset.len()];
    reached[0] = true;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..subset.len() {
            if !reached[j] && g.adjacent(subset[i], subset[j]) {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    reached.into_iter().all(|r| r)
}
