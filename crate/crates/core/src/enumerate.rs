//! Enumeration of connected induced subgraphs of size 1 to 4.
//!
//! Sizes 3 and 4 use ESU-style extension: each connected set is produced
//! exactly once, from its smallest vertex, by only adding vertices larger than
//! the root that are exclusive neighbors of the most recently added vertex.
//! Connectivity ignores edge direction.

use crate::error::{MotifError, Result};
use crate::graph::DirectedGraph;
use crate::VertexSet;

pub const MAX_BASE_SIZE: usize = 4;

/// Calls `visit` with every connected `r`-set whose smallest vertex is `root`.
///
/// The slice handed to `visit` is sorted ascending. Enumerating all roots
/// yields every connected `r`-set exactly once.
pub fn for_each_connected_from(
    g: &DirectedGraph,
    r: usize,
    root: u32,
    visit: &mut impl FnMut(&[u32]),
) {
    match r {
        1 => visit(&[root]),
        2 => {
            for &(u, _) in g.neighbors(root) {
                if u > root {
                    visit(&[root, u]);
                }
            }
        }
        _ => {
            let mut chosen = Vec::with_capacity(r);
            chosen.push(root);
            let ext: Vec<u32> = g
                .neighbors(root)
                .iter()
                .map(|&(u, _)| u)
                .filter(|&u| u > root)
                .collect();
            let mut sorted = [0u32; MAX_BASE_SIZE];
            extend(g, r, root, &mut chosen, ext, &mut sorted, visit);
        }
    }
}

fn extend(
    g: &DirectedGraph,
    r: usize,
    root: u32,
    chosen: &mut Vec<u32>,
    mut ext: Vec<u32>,
    sorted: &mut [u32; MAX_BASE_SIZE],
    visit: &mut impl FnMut(&[u32]),
) {
    if chosen.len() == r {
        let out = &mut sorted[..r];
        out.copy_from_slice(chosen);
        out.sort_unstable();
        visit(out);
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        if chosen.len() + 1 < r {
            for &(u, _) in g.neighbors(w) {
                if u > root
                    && !chosen.contains(&u)
                    && !next.contains(&u)
                    && !chosen.iter().any(|&c| g.adjacent(c, u))
                {
                    next.push(u);
                }
            }
        }
        chosen.push(w);
        extend(g, r, root, chosen, next, sorted, visit);
        chosen.pop();
    }
}

pub fn check_base_size(r: usize) -> Result<()> {
    if (1..=MAX_BASE_SIZE).contains(&r) {
        Ok(())
    } else {
        Err(MotifError::SizeOutOfRange {
            size: r,
            min: 1,
            max: MAX_BASE_SIZE,
        })
    }
}

/// All connected induced `r`-vertex subgraphs, sorted lexicographically.
pub fn enumerate_connected(g: &DirectedGraph, r: usize) -> Result<Vec<VertexSet>> {
    check_base_size(r)?;
    let mut out = Vec::new();
    for root in 0..g.n() as u32 {
        for_each_connected_from(g, r, root, &mut |s| {
            out.push(VertexSet::from_sorted_unchecked(s.to_vec()))
        });
    }
    out.sort_unstable();
    Ok(out)
}

/// Number of connected `r`-sets without materializing them.
pub fn count_connected(g: &DirectedGraph, r: usize) -> Result<u64> {
    check_base_size(r)?;
    let mut count = 0u64;
    for root in 0..g.n() as u32 {
        for_each_connected_from(g, r, root, &mut |_| count += 1);
    }
    Ok(count)
}
