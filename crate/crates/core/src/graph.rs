//! Directed graph storage with the per-vertex neighbor classification used by
//! the counting engine.
//!
//! For an ordered pair `(u, v)` with `u != v`, `u` falls in exactly one class
//! relative to `v`:
//!
//! * `A` when both `u -> v` and `v -> u` exist,
//! * `B` when only `v -> u` exists (`u` is an out-neighbor of `v`),
//! * `C` when only `u -> v` exists (`u` is an in-neighbor of `v`),
//! * `N` otherwise.

use std::collections::hash_map::Entry;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use fixedbitset::FixedBitSet;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{MotifError, Result};

/// Graphs up to this many vertices keep a dense `n * n` bit matrix for edge
/// queries; larger graphs fall back to a hashed edge set.
const DENSE_INDEX_LIMIT: usize = 8192;

/// Position of a vertex relative to another one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Class {
    N = 0,
    A = 1,
    B = 2,
    C = 3,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::N, Class::A, Class::B, Class::C];

    pub fn from_digit(d: u8) -> Class {
        match d & 3 {
            0 => Class::N,
            1 => Class::A,
            2 => Class::B,
            _ => Class::C,
        }
    }

    #[inline]
    pub fn digit(self) -> u8 {
        self as u8
    }

    /// Class of `u` relative to `v` given the two edge directions.
    #[inline]
    pub fn from_edges(v_to_u: bool, u_to_v: bool) -> Class {
        match (v_to_u, u_to_v) {
            (true, true) => Class::A,
            (true, false) => Class::B,
            (false, true) => Class::C,
            (false, false) => Class::N,
        }
    }

    /// True when the reference vertex has an edge to the classified vertex.
    #[inline]
    pub fn has_out(self) -> bool {
        matches!(self, Class::A | Class::B)
    }

    /// True when the classified vertex has an edge to the reference vertex.
    #[inline]
    pub fn has_in(self) -> bool {
        matches!(self, Class::A | Class::C)
    }

    pub fn as_char(self) -> char {
        match self {
            Class::N => 'N',
            Class::A => 'A',
            Class::B => 'B',
            Class::C => 'C',
        }
    }

    pub fn from_char(c: char) -> Option<Class> {
        match c {
            'N' => Some(Class::N),
            'A' => Some(Class::A),
            'B' => Some(Class::B),
            'C' => Some(Class::C),
            _ => None,
        }
    }
}

/// Sorted list of distinct vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<u32>);

impl VertexSet {
    pub fn new(ids: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut v: Vec<u32> = ids.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(MotifError::DuplicateVertex(w[0]));
        }
        Ok(VertexSet(v))
    }

    /// Wraps an already sorted, duplicate-free vector.
    pub(crate) fn from_sorted_unchecked(v: Vec<u32>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        VertexSet(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

impl AsRef<[u32]> for VertexSet {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

#[derive(Clone, Debug)]
enum EdgeIndex {
    Dense(FixedBitSet),
    Hashed(FxHashSet<u64>),
}

/// Immutable directed graph on vertices `0..n`.
#[derive(Clone, Debug)]
pub struct DirectedGraph {
    n: usize,
    m: usize,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    /// δ(v): every neighbor of `v` once, sorted, tagged with its class relative to `v`.
    nbrs: Vec<Vec<(u32, Class)>>,
    index: EdgeIndex,
}

impl PartialEq for DirectedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.out_adj == other.out_adj
    }
}

impl Eq for DirectedGraph {}

/// Result of reading an edge list.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

impl DirectedGraph {
    /// Builds a graph on `n` vertices. Self-loops and repeated edges are ignored.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut out_adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(MotifError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u != v {
                out_adj[u as usize].push(v);
            }
        }
        for list in &mut out_adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_sorted_out_adj(out_adj))
    }

    fn from_sorted_out_adj(out_adj: Vec<Vec<u32>>) -> Self {
        let n = out_adj.len();
        let mut in_adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, list) in out_adj.iter().enumerate() {
            m += list.len();
            for &v in list {
                in_adj[v as usize].push(u as u32);
            }
        }

        let index = if n <= DENSE_INDEX_LIMIT {
            let mut bits = FixedBitSet::with_capacity(n * n);
            for (u, list) in out_adj.iter().enumerate() {
                for &v in list {
                    bits.insert(u * n + v as usize);
                }
            }
            EdgeIndex::Dense(bits)
        } else {
            let mut set = FxHashSet::default();
            set.reserve(m);
            for (u, list) in out_adj.iter().enumerate() {
                for &v in list {
                    set.insert(edge_key(u as u32, v));
                }
            }
            EdgeIndex::Hashed(set)
        };

        let nbrs = (0..n)
            .map(|v| merge_neighbors(&out_adj[v], &in_adj[v]))
            .collect();

        DirectedGraph {
            n,
            m,
            out_adj,
            in_adj,
            nbrs,
            index,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of directed edges; a bidirected pair contributes two.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of vertex pairs joined by edges in both directions.
    pub fn bidirected_pairs(&self) -> usize {
        self.nbrs
            .iter()
            .map(|l| l.iter().filter(|(_, c)| *c == Class::A).count())
            .sum::<usize>()
            / 2
    }

    /// Number of unordered adjacent pairs; a bidirected pair counts once.
    pub fn m_pairs(&self) -> usize {
        self.m - self.bidirected_pairs()
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        match &self.index {
            EdgeIndex::Dense(bits) => bits.contains(u as usize * self.n + v as usize),
            EdgeIndex::Hashed(set) => set.contains(&edge_key(u, v)),
        }
    }

    /// Class of `u` relative to `v`.
    #[inline]
    pub fn class(&self, v: u32, u: u32) -> Class {
        Class::from_edges(self.has_edge(v, u), self.has_edge(u, v))
    }

    #[inline]
    pub fn adjacent(&self, u: u32, v: u32) -> bool {
        self.has_edge(u, v) || self.has_edge(v, u)
    }

    pub fn out_neighbors(&self, v: u32) -> &[u32] {
        &self.out_adj[v as usize]
    }

    pub fn in_neighbors(&self, v: u32) -> &[u32] {
        &self.in_adj[v as usize]
    }

    /// δ(v) with the class of each neighbor relative to `v`.
    #[inline]
    pub fn neighbors(&self, v: u32) -> &[(u32, Class)] {
        &self.nbrs[v as usize]
    }

    /// d(v) = |δ(v)|; a bidirected neighbor counts once.
    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        self.nbrs[v as usize].len()
    }

    pub fn out_degree(&self, v: u32) -> usize {
        self.out_adj[v as usize].len()
    }

    pub fn in_degree(&self, v: u32) -> usize {
        self.in_adj[v as usize].len()
    }

    /// Number of bidirected neighbors of `v`, i.e. |A(v)|.
    pub fn bidirected_degree(&self, v: u32) -> usize {
        self.class_members(v, Class::A).len()
    }

    /// Members of A(v), B(v) or C(v), sorted.
    pub fn class_members(&self, v: u32, class: Class) -> Vec<u32> {
        self.nbrs[v as usize]
            .iter()
            .filter(|(_, c)| *c == class)
            .map(|(u, _)| *u)
            .collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().map(move |&v| (u as u32, v)))
    }

    pub fn check_vertex(&self, v: u32) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(MotifError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    /// D(S), the sum of d(v) over `set`.
    pub fn degree_sum(&self, set: &[u32]) -> Result<usize> {
        set.iter().try_fold(0, |acc, &v| {
            self.check_vertex(v)?;
            Ok(acc + self.degree(v))
        })
    }

    /// Serializes to the edge-list format with a `# n=.. m=..` header.
    ///
    /// Lines are ordered so that reading the output back assigns every vertex
    /// its current id, which is always possible for graphs produced by the
    /// loader. Other graphs come back relabeled (isomorphic, same edge count).
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# n={} m={}", self.n, self.m);
        // ids below `appeared` have been written
        let mut appeared = 0u32;
        // target of the last leading edge, already written
        let mut led = None;
        for w in 0..self.n as u32 {
            let has_lower = self.neighbors(w).first().is_some_and(|&(x, _)| x < w);
            // A loaded vertex without lower neighbors first showed up as the
            // source of an edge to the next id.
            let lead = w >= appeared && !has_lower && self.has_edge(w, w + 1);
            if lead {
                let _ = writeln!(out, "{w} {}", w + 1);
                led = Some(w + 1);
                appeared = w + 2;
            }
            for &(x, class) in self.neighbors(w).iter().rev() {
                if x >= w {
                    continue;
                }
                if class.has_in() && !(led == Some(w) && x + 1 == w) {
                    // x -> w
                    let _ = writeln!(out, "{x} {w}");
                }
                if class.has_out() {
                    let _ = writeln!(out, "{w} {x}");
                }
            }
            if has_lower || lead {
                appeared = appeared.max(w + 1);
            }
        }
        out
    }
}

#[inline]
fn edge_key(u: u32, v: u32) -> u64 {
    ((u as u64) << 32) | v as u64
}

fn merge_neighbors(out: &[u32], inc: &[u32]) -> Vec<(u32, Class)> {
    let mut merged = Vec::with_capacity(out.len() + inc.len());
    let (mut i, mut j) = (0, 0);
    while i < out.len() || j < inc.len() {
        match (out.get(i), inc.get(j)) {
            (Some(&a), Some(&b)) if a == b => {
                merged.push((a, Class::A));
                i += 1;
                j += 1;
            }
            (Some(&a), Some(&b)) if a < b => {
                merged.push((a, Class::B));
                i += 1;
            }
            (Some(&a), None) => {
                merged.push((a, Class::B));
                i += 1;
            }
            (_, Some(&b)) => {
                merged.push((b, Class::C));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    merged
}

/// Reads a whitespace-separated edge list.
///
/// Lines starting with `#` or `%` and blank lines are skipped. The first two
/// tokens of every other line are the source and target ids; further columns
/// are ignored. Ids are remapped to `0..n` in order of first appearance.
pub fn parse_edge_list<R: Read>(reader: R) -> Result<LoadedGraph> {
    let reader = BufReader::new(reader);
    let mut ids: FxHashMap<u64, u32> = FxHashMap::default();
    let mut out_adj: Vec<FxHashSet<u32>> = Vec::new();
    let mut order: Vec<Vec<u32>> = Vec::new();
    let mut self_loops = 0;
    let mut duplicates = 0;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_number = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| MotifError::Parse {
                line: line_number,
                message: "expected two vertex ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| MotifError::Parse {
                line: line_number,
                message: format!("invalid vertex id {tok:?}"),
            })
        };
        let src = next_id()?;
        let dst = next_id()?;
        if src == dst {
            self_loops += 1;
            continue;
        }
        let mut intern = |raw: u64| -> u32 {
            let next = ids.len() as u32;
            match ids.entry(raw) {
                Entry::Occupied(e) => *e.get(),
                Entry::Vacant(e) => {
                    e.insert(next);
                    out_adj.push(FxHashSet::default());
                    order.push(Vec::new());
                    next
                }
            }
        };
        let u = intern(src);
        let v = intern(dst);
        if out_adj[u as usize].insert(v) {
            order[u as usize].push(v);
        } else {
            duplicates += 1;
        }
    }

    if ids.is_empty() {
        return Err(MotifError::NoEdges);
    }

    let sorted = order
        .into_iter()
        .map(|mut l| {
            l.sort_unstable();
            l
        })
        .collect();
    Ok(LoadedGraph {
        graph: DirectedGraph::from_sorted_out_adj(sorted),
        self_loops_dropped: self_loops,
        duplicates_dropped: duplicates,
    })
}

pub fn parse_edge_list_str(text: &str) -> Result<LoadedGraph> {
    parse_edge_list(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> LoadedGraph {
        parse_edge_list_str(text).unwrap()
    }

    #[test]
    fn path_classes() {
        let g = load("0 1\n1 2").graph;
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.class_members(1, Class::B), vec![2]);
        assert_eq!(g.class_members(1, Class::C), vec![0]);
        assert!(g.class_members(1, Class::A).is_empty());
    }

    #[test]
    fn bidirected_pair() {
        let g = load("0 1\n1 0").graph;
        assert_eq!((g.n(), g.m()), (2, 2));
        assert_eq!(g.class_members(0, Class::A), vec![1]);
        assert_eq!(g.class_members(1, Class::A), vec![0]);
        assert_eq!(g.bidirected_pairs(), 1);
        assert_eq!(g.m_pairs(), 1);
    }

    #[test]
    fn drops_loops_and_duplicates() {
        let l = load("5 5\n0 1\n0 1");
        assert_eq!((l.graph.n(), l.graph.m()), (2, 1));
        assert_eq!(l.self_loops_dropped, 1);
        assert_eq!(l.duplicates_dropped, 1);
    }

    #[test]
    fn comments_and_extra_columns() {
        let g = load("# header\n% other\n\n10 20 1\n20 30 7\n").graph;
        assert_eq!((g.n(), g.m()), (3, 2));
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
    }

    #[test]
    fn parse_errors_name_the_line() {
        match parse_edge_list_str("0 1\n1 x\n") {
            Err(MotifError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list_str("0 1\n7\n") {
            Err(MotifError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list_str(""), Err(MotifError::NoEdges)));
        assert!(matches!(
            parse_edge_list_str("# only\n3 3\n"),
            Err(MotifError::NoEdges)
        ));
    }

    #[test]
    fn degree_sums() {
        let tri = load("0 1\n1 0\n1 2\n2 1\n0 2\n2 0").graph;
        assert_eq!(tri.degree_sum(&[0, 1, 2]).unwrap(), 6);
        assert_eq!(tri.degree_sum(&[]).unwrap(), 0);
        assert!(matches!(
            tri.degree_sum(&[3]),
            Err(MotifError::VertexOutOfRange { vertex: 3, .. })
        ));

        let star = DirectedGraph::from_edges(6, (1..6).map(|l| (0, l))).unwrap();
        assert_eq!(star.degree_sum(&[0, 1]).unwrap(), 6);
    }

    #[test]
    fn hashed_index_matches_dense() {
        let n = DENSE_INDEX_LIMIT + 10;
        let edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|v| (v, v + 1)).collect();
        let g = DirectedGraph::from_edges(n, edges.iter().copied()).unwrap();
        assert!(matches!(g.index, EdgeIndex::Hashed(_)));
        assert!(g.has_edge(5, 6) && !g.has_edge(6, 5));
        assert_eq!(g.class(6, 5), Class::C);
    }

    #[test]
    fn vertex_set_rejects_duplicates() {
        assert_eq!(VertexSet::new([3, 1, 2]).unwrap().as_slice(), &[1, 2, 3]);
        assert!(matches!(
            VertexSet::new([1, 1]),
            Err(MotifError::DuplicateVertex(1))
        ));
    }

    #[test]
    fn round_trip_keeps_ids() {
        // 2's only neighbor is 3, and 1 first appears after 3.
        let g = load("0 2\n2 3\n3 1\n1 0\n4 0\n0 4").graph;
        let text = g.to_edge_list();
        assert!(text.starts_with("# n=5 m=6\n"));
        assert_eq!(load(&text).graph, g);
    }
}
