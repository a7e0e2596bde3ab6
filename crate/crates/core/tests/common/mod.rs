#![allow(dead_code)]

use dimotif::DirectedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Directed Erdős–Rényi graph: every ordered pair is an edge with probability `p`.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    DirectedGraph::from_edges(n, edges).unwrap()
}

pub fn bidirected_complete(n: u32) -> DirectedGraph {
    let edges = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)));
    DirectedGraph::from_edges(n as usize, edges).unwrap()
}

pub fn directed_cycle(n: u32) -> DirectedGraph {
    DirectedGraph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

/// `hubs` high-degree vertices plus `n - hubs` leaves of degree at most 3:
/// every leaf hangs off one hub and the leaves form a directed path.
pub fn celebrity_graph(n: u32, hubs: u32) -> DirectedGraph {
    let mut edges = Vec::new();
    for leaf in hubs..n {
        let hub = leaf % hubs;
        if leaf % 2 == 0 {
            edges.push((hub, leaf));
        } else {
            edges.push((leaf, hub));
        }
        if leaf + 1 < n {
            edges.push((leaf, leaf + 1));
        }
    }
    DirectedGraph::from_edges(n as usize, edges).unwrap()
}

/// Parameters of the `i`-th graph of the seeded oracle suite.
pub fn suite_params(i: u64) -> (usize, f64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + i);
    let n = rng.gen_range(6..=30);
    let p = rng.gen_range(0.05..=0.4);
    (n, p, rng.gen())
}
