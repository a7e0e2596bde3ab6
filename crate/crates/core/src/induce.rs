//! Edge extraction for induced subgraphs `G[S]`.
//!
//! Four strategies are available. `Pairwise` queries every ordered pair of
//! `S`; `NeighborScan` walks δ(u) for each `u` in `S`; `Adaptive` picks the
//! cheaper of the two from `|S|` and D(S); `Split` sorts `S` by degree, tests
//! pairs among the high-degree tail and scans neighbors of the rest. `Split`
//! is linear in `|S|` on graphs with a constant number of hubs.

use crate::error::{MotifError, Result};
use crate::graph::DirectedGraph;
use crate::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    Pairwise,
    NeighborScan,
    #[default]
    Adaptive,
    Split,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pairwise" => Ok(Strategy::Pairwise),
            "scan" => Ok(Strategy::NeighborScan),
            "adaptive" => Ok(Strategy::Adaptive),
            "split" => Ok(Strategy::Split),
            other => Err(format!(
                "unknown strategy {other:?} (expected pairwise, scan, adaptive or split)"
            )),
        }
    }
}

/// Directed edges of an induced subgraph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeSet {
    edges: Vec<(u32, u32)>,
}

impl EdgeSet {
    pub fn as_slice(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges in ascending `(source, target)` order.
    pub fn sorted(mut self) -> Vec<(u32, u32)> {
        self.edges.sort_unstable();
        self.edges
    }
}

/// Work performed by the extraction routines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InduceCounters {
    /// `has_edge` queries issued by pairwise loops.
    pub edge_queries: u64,
    /// `v in S` tests issued by neighbor scans.
    pub membership_tests: u64,
}

impl InduceCounters {
    pub fn work(&self) -> u64 {
        self.edge_queries + self.membership_tests
    }

    pub fn add(&mut self, other: &InduceCounters) {
        self.edge_queries += other.edge_queries;
        self.membership_tests += other.membership_tests;
    }
}

/// Degree-ordered split of a vertex set into a low-degree prefix and a
/// high-degree tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CelebritySplit {
    pub p: usize,
    /// The `p` lowest-degree vertices.
    pub low: VertexSet,
    /// The remaining high-degree vertices.
    pub high: VertexSet,
    /// Sum of the low degrees plus `(|S| - p)^2`.
    pub objective: u64,
    /// `S` sorted by ascending degree (ties by id).
    pub order: Vec<u32>,
}

/// Picks the split index minimizing `sum_{i<=p} d(s_i) + (|S| - p)^2`, with
/// ties going to the smaller `p`.
pub fn split_point(g: &DirectedGraph, set: &[u32]) -> Result<CelebritySplit> {
    if set.is_empty() {
        return Err(MotifError::EmptySet);
    }
    for &v in set {
        g.check_vertex(v)?;
    }
    let (p, objective, order) = split_order(g, set);
    let low = VertexSet::new(order[..p].iter().copied())?;
    let high = VertexSet::new(order[p..].iter().copied())?;
    Ok(CelebritySplit {
        p,
        low,
        high,
        objective,
        order,
    })
}

fn split_order(g: &DirectedGraph, set: &[u32]) -> (usize, u64, Vec<u32>) {
    let mut order = set.to_vec();
    order.sort_unstable_by_key(|&v| (g.degree(v), v));
    let s = order.len() as u64;
    let mut best = (0, s * s);
    let mut prefix = 0u64;
    for (i, &v) in order.iter().enumerate() {
        prefix += g.degree(v) as u64;
        let p = i as u64 + 1;
        let value = prefix + (s - p) * (s - p);
        if value < best.1 {
            best = (i + 1, value);
        }
    }
    (best.0, best.1, order)
}

const OUTSIDE: u8 = 0;
const IN_SET: u8 = 1;
const IN_HIGH: u8 = 2;

/// Per-worker extraction state: a vertex mark array and work counters.
#[derive(Clone, Debug)]
pub struct Inducer {
    marks: Vec<u8>,
    counters: InduceCounters,
    scan_weight: u64,
}

impl Inducer {
    pub fn new(n: usize) -> Self {
        Inducer {
            marks: vec![OUTSIDE; n],
            counters: InduceCounters::default(),
            scan_weight: 1,
        }
    }

    /// Weight applied to D(S) when `Adaptive` compares it against `|S|^2`.
    pub fn with_scan_weight(mut self, weight: u64) -> Self {
        self.scan_weight = weight;
        self
    }

    pub fn counters(&self) -> InduceCounters {
        self.counters
    }

    pub fn reset_counters(&mut self) {
        self.counters = InduceCounters::default();
    }

    /// Returns the directed edges of `G[set]`.
    pub fn induced_edges(
        &mut self,
        g: &DirectedGraph,
        set: &[u32],
        strategy: Strategy,
    ) -> Result<EdgeSet> {
        if self.marks.len() < g.n() {
            self.marks.resize(g.n(), OUTSIDE);
        }
        for &v in set {
            g.check_vertex(v)?;
        }
        let mut edges = Vec::new();
        self.extract(g, set, strategy, |u, v| edges.push((u, v)));
        Ok(EdgeSet { edges })
    }

    /// Calls `emit(u, v)` once per directed edge of `G[set]`.
    ///
    /// `set` must hold distinct in-range vertices.
    pub(crate) fn extract(
        &mut self,
        g: &DirectedGraph,
        set: &[u32],
        strategy: Strategy,
        mut emit: impl FnMut(u32, u32),
    ) {
        match strategy {
            Strategy::Pairwise => self.pairwise(g, set, &mut emit),
            Strategy::NeighborScan => self.scan(g, set, &mut emit),
            Strategy::Adaptive => {
                let s = set.len() as u64;
                let d: u64 = set.iter().map(|&v| g.degree(v) as u64).sum();
                if s * s < d * self.scan_weight {
                    self.pairwise(g, set, &mut emit)
                } else {
                    self.scan(g, set, &mut emit)
                }
            }
            Strategy::Split => self.split(g, set, &mut emit),
        }
    }

    fn pairwise(&mut self, g: &DirectedGraph, set: &[u32], emit: &mut impl FnMut(u32, u32)) {
        for &u in set {
            for &v in set {
                if u != v {
                    self.counters.edge_queries += 1;
                    if g.has_edge(u, v) {
                        emit(u, v);
                    }
                }
            }
        }
    }

    fn scan(&mut self, g: &DirectedGraph, set: &[u32], emit: &mut impl FnMut(u32, u32)) {
        for &v in set {
            self.marks[v as usize] = IN_SET;
        }
        for &u in set {
            for &(v, class) in g.neighbors(u) {
                self.counters.membership_tests += 1;
                if self.marks[v as usize] != OUTSIDE && class.has_out() {
                    emit(u, v);
                }
            }
        }
        for &v in set {
            self.marks[v as usize] = OUTSIDE;
        }
    }

    fn split(&mut self, g: &DirectedGraph, set: &[u32], emit: &mut impl FnMut(u32, u32)) {
        if set.is_empty() {
            return;
        }
        let (p, _, order) = split_order(g, set);
        let (low, high) = order.split_at(p);
        self.pairwise(g, high, emit);
        for &v in low {
            self.marks[v as usize] = IN_SET;
        }
        for &v in high {
            self.marks[v as usize] = IN_HIGH;
        }
        // The pair loop owns high-high edges; low-low edges come out once as
        // out-edges of their source, low-high edges in both directions here.
        for &u in low {
            for &(v, class) in g.neighbors(u) {
                self.counters.membership_tests += 1;
                match self.marks[v as usize] {
                    OUTSIDE => {}
                    IN_SET => {
                        if class.has_out() {
                            emit(u, v);
                        }
                    }
                    _ => {
                        if class.has_out() {
                            emit(u, v);
                        }
                        if class.has_in() {
                            emit(v, u);
                        }
                    }
                }
            }
        }
        for &v in set {
            self.marks[v as usize] = OUTSIDE;
        }
    }
}

/// One-shot extraction with a fresh scratch buffer.
pub fn induced_edges(g: &DirectedGraph, set: &VertexSet, strategy: Strategy) -> Result<EdgeSet> {
    Inducer::new(g.n()).induced_edges(g, set.as_slice(), strategy)
}
