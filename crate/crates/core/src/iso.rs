//! Bit-packed adjacency codes for digraphs on at most six vertices and their
//! canonical forms.
//!
//! A code for the ordered vertex list `u_0..u_{k-1}` sets bit
//! `i * (k - 1) + (j - [j > i])` when `u_i -> u_j` is an edge, so a size-6
//! code fits in 30 bits. The canonical form of a code is the smallest bits
//! value over all `k!` relabelings.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rustc_hash::FxHashMap;

use crate::error::{MotifError, Result};
use crate::graph::DirectedGraph;

pub const MAX_K: usize = 6;

#[inline]
pub const fn bit_index(k: usize, i: usize, j: usize) -> usize {
    i * (k - 1) + j - (j > i) as usize
}

#[inline]
pub const fn code_width(k: usize) -> usize {
    k * (k - 1)
}

/// Adjacency matrix of an ordered list of at most six vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjacencyCode {
    k: u8,
    bits: u32,
}

impl AdjacencyCode {
    pub fn new(k: usize, bits: u32) -> Result<Self> {
        if !(1..=MAX_K).contains(&k) {
            return Err(MotifError::SizeOutOfRange {
                size: k,
                min: 1,
                max: MAX_K,
            });
        }
        if (bits as u64) >> code_width(k) != 0 {
            return Err(MotifError::InvalidCode { k, bits });
        }
        Ok(AdjacencyCode { k: k as u8, bits })
    }

    #[inline]
    pub(crate) const fn from_raw(k: usize, bits: u32) -> Self {
        AdjacencyCode { k: k as u8, bits }
    }

    /// Builds a code from `(i, j)` position pairs.
    pub fn from_edges(k: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut code = Self::new(k, 0)?;
        for (i, j) in edges {
            if i >= k || j >= k || i == j {
                return Err(MotifError::InvalidCode { k, bits: code.bits });
            }
            code.bits |= 1 << bit_index(k, i, j);
        }
        Ok(code)
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.bits >> bit_index(self.k(), i, j) & 1 == 1
    }

    pub fn edge_count(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        (0..self.k()).filter(|&j| self.has_edge(i, j)).count()
    }

    pub fn in_degree(&self, j: usize) -> usize {
        (0..self.k()).filter(|&i| self.has_edge(i, j)).count()
    }

    /// Undirected neighbor mask of position `i`.
    pub fn neighbor_mask(&self, i: usize) -> u32 {
        (0..self.k())
            .filter(|&j| self.has_edge(i, j) || self.has_edge(j, i))
            .fold(0, |m, j| m | 1 << j)
    }

    /// Weak connectivity of the vertices selected by `mask`.
    pub fn is_connected_within(&self, mask: u32) -> bool {
        if mask == 0 {
            return true;
        }
        let start = mask.trailing_zeros();
        let mut seen = 1u32 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let i = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.neighbor_mask(i) & mask & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen == mask
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_within((1u32 << self.k()) - 1)
    }

    /// Relabels position `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> AdjacencyCode {
        let k = self.k();
        assert_eq!(perm.len(), k, "permutation length must equal k");
        let mut bits = 0;
        for i in 0..k {
            for j in 0..k {
                if self.has_edge(i, j) {
                    bits |= 1 << bit_index(k, perm[i], perm[j]);
                }
            }
        }
        AdjacencyCode::from_raw(k, bits)
    }

    /// Rows of the adjacency matrix joined by `/`, e.g. `010/001/100`.
    pub fn matrix_string(&self) -> String {
        let k = self.k();
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if self.has_edge(i, j) { '1' } else { '0' })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// Encodes `G[ordered]` in the order given.
pub fn encode_adjacency(g: &DirectedGraph, ordered: &[u32]) -> Result<AdjacencyCode> {
    let k = ordered.len();
    if !(1..=MAX_K).contains(&k) {
        return Err(MotifError::SizeOutOfRange {
            size: k,
            min: 1,
            max: MAX_K,
        });
    }
    for (i, &v) in ordered.iter().enumerate() {
        g.check_vertex(v)?;
        if ordered[..i].contains(&v) {
            return Err(MotifError::DuplicateVertex(v));
        }
    }
    Ok(encode_unchecked(g, ordered))
}

#[inline]
pub(crate) fn encode_unchecked(g: &DirectedGraph, ordered: &[u32]) -> AdjacencyCode {
    let k = ordered.len();
    let mut bits = 0u32;
    for (i, &u) in ordered.iter().enumerate() {
        for (j, &v) in ordered.iter().enumerate() {
            if i != j && g.has_edge(u, v) {
                bits |= 1 << bit_index(k, i, j);
            }
        }
    }
    AdjacencyCode::from_raw(k, bits)
}

/// Canonical isomorphism-class identifier: the minimal code of the class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MotifId(AdjacencyCode);

impl MotifId {
    pub fn k(&self) -> usize {
        self.0.k()
    }

    pub fn bits(&self) -> u32 {
        self.0.bits()
    }

    pub fn code(&self) -> AdjacencyCode {
        self.0
    }

    /// Wraps a code that is already canonical.
    pub(crate) fn from_canonical(code: AdjacencyCode) -> Self {
        MotifId(code)
    }
}

impl fmt::Display for MotifId {
    /// `k:hex`, zero-padded so string order matches numeric order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = code_width(self.k()).div_ceil(4).max(1);
        write!(f, "{}:{:0width$x}", self.k(), self.bits())
    }
}

impl FromStr for MotifId {
    type Err = MotifError;

    /// Parses `k:hex` and canonicalizes the result.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || MotifError::InvalidLabel(s.to_string());
        let (k, hex) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        let bits = u32::from_str_radix(hex, 16).map_err(|_| bad())?;
        Ok(canonical_code(AdjacencyCode::new(k, bits)?))
    }
}

struct PermTable {
    /// `perm[i]` is the new position of vertex `i`.
    perms: Vec<[u8; MAX_K]>,
    /// `maps[p][b]` is where permutation `p` sends bit `b`.
    maps: Vec<[u8; 30]>,
}

fn perm_table(k: usize) -> &'static PermTable {
    static TABLES: [OnceLock<PermTable>; MAX_K + 1] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    TABLES[k].get_or_init(|| build_perm_table(k))
}

fn build_perm_table(k: usize) -> PermTable {
    let mut perms = Vec::new();
    let mut current: Vec<u8> = (0..k as u8).collect();
    heap_permutations(k, &mut current, &mut perms);
    perms.sort_unstable();
    let maps = perms
        .iter()
        .map(|perm| {
            let mut map = [0u8; 30];
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        map[bit_index(k, i, j)] =
                            bit_index(k, perm[i] as usize, perm[j] as usize) as u8;
                    }
                }
            }
            map
        })
        .collect();
    PermTable { perms, maps }
}

fn heap_permutations(len: usize, items: &mut Vec<u8>, out: &mut Vec<[u8; MAX_K]>) {
    if len <= 1 {
        let mut p = [0u8; MAX_K];
        p[..items.len()].copy_from_slice(items);
        out.push(p);
        return;
    }
    for i in 0..len {
        heap_permutations(len - 1, items, out);
        let swap = if len.is_multiple_of(2) { i } else { 0 };
        items.swap(swap, len - 1);
    }
}

#[inline]
fn apply_map(mut bits: u32, map: &[u8; 30]) -> u32 {
    let mut out = 0;
    while bits != 0 {
        let b = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        out |= 1 << map[b];
    }
    out
}

/// Minimal bits value over every relabeling of `code`.
///
/// Rows of the code are ordered by significance from the last position down,
/// and row `i` holds the out-edges of position `i`. Positions are filled from
/// the top: for a candidate vertex, the part of its row pointing at already
/// placed vertices is fixed, and the rest is smallest when its out-neighbors
/// take the lowest free positions of every block of interchangeable vertices.
/// Only candidates reaching the smallest row are expanded, and the blocks are
/// refined by each chosen vertex's out-neighborhood.
pub fn canonical_code(code: AdjacencyCode) -> MotifId {
    let k = code.k();
    if k <= 1 || code.bits == 0 {
        return MotifId(code);
    }
    let mut out = [0u32; MAX_K];
    let row_mask = (1u32 << (k - 1)) - 1;
    for (i, row) in out.iter_mut().enumerate().take(k) {
        let packed = code.bits >> (i * (k - 1)) & row_mask;
        let low = packed & ((1 << i) - 1);
        *row = low | (packed >> i) << (i + 1);
    }
    let mut search = CanonSearch {
        k,
        out,
        pos: [0; MAX_K],
        best: u32::MAX,
    };
    let mut blocks = [0u32; MAX_K];
    blocks[0] = (1 << k) - 1;
    search.fill(&blocks[..1], k - 1, 0);
    MotifId(AdjacencyCode::from_raw(k, search.best))
}

struct CanonSearch {
    k: usize,
    out: [u32; MAX_K],
    /// Position of every placed vertex.
    pos: [u8; MAX_K],
    best: u32,
}

impl CanonSearch {
    /// `blocks` partition the free positions `0..=i`, lowest block first.
    fn fill(&mut self, blocks: &[u32], i: usize, acc: u32) {
        let k = self.k;
        let shift = i * (k - 1);
        let top_index = blocks.len() - 1;
        let top = blocks[top_index];
        let placed = ((1u32 << k) - 1) & !blocks.iter().fold(0, |m, b| m | b);

        let mut rows = [u32::MAX; MAX_K];
        let mut min_row = u32::MAX;
        let mut candidates = top;
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            let nbrs = self.out[v];
            let mut row = 0u32;
            let mut high = nbrs & placed;
            while high != 0 {
                let w = high.trailing_zeros() as usize;
                high &= high - 1;
                row |= 1 << (self.pos[w] as usize - 1);
            }
            let mut start = 0;
            for (bi, &block) in blocks.iter().enumerate() {
                let block = if bi == top_index {
                    block & !(1 << v)
                } else {
                    block
                };
                let c = (nbrs & block).count_ones();
                row |= ((1u32 << c) - 1) << start;
                start += block.count_ones();
            }
            rows[v] = row;
            min_row = min_row.min(row);
        }

        let mut candidates = top;
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            if rows[v] != min_row {
                continue;
            }
            let next_acc = acc | min_row << shift;
            if next_acc >> shift > self.best >> shift {
                continue;
            }
            if i == 0 {
                self.best = self.best.min(next_acc);
                continue;
            }
            let nbrs = self.out[v];
            let mut refined = [0u32; MAX_K];
            let mut len = 0;
            for (bi, &block) in blocks.iter().enumerate() {
                let block = if bi == top_index {
                    block & !(1 << v)
                } else {
                    block
                };
                for part in [block & nbrs, block & !nbrs] {
                    if part != 0 {
                        refined[len] = part;
                        len += 1;
                    }
                }
            }
            self.pos[v] = i as u8;
            self.fill(&refined[..len], i - 1, next_acc);
        }
    }
}

/// Canonical form by scanning all `k!` relabelings with no pruning.
pub fn canonical_code_exhaustive(code: AdjacencyCode) -> MotifId {
    let k = code.k();
    if k <= 1 {
        return MotifId(code);
    }
    let table = perm_table(k);
    let best = table
        .maps
        .iter()
        .map(|map| apply_map(code.bits, map))
        .min()
        .unwrap_or(code.bits);
    MotifId(AdjacencyCode::from_raw(k, best))
}

/// Relabeling of a code on at most four vertices that yields its canonical
/// form: position `i` moves to `order[i]`.
pub fn canonical_order(code: AdjacencyCode) -> [u8; 4] {
    static TABLES: [OnceLock<Vec<[u8; 4]>>; 5] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let k = code.k();
    assert!(k <= 4, "canonical_order supports at most four vertices");
    let table = TABLES[k].get_or_init(|| {
        let perms = perm_table(k);
        (0..1u32 << code_width(k))
            .map(|bits| {
                let best = canonical_code_exhaustive(AdjacencyCode::from_raw(k, bits)).bits();
                let p = perms
                    .maps
                    .iter()
                    .position(|map| apply_map(bits, map) == best)
                    .expect("the minimum is reached by some relabeling");
                let mut order = [0u8; 4];
                order[..k].copy_from_slice(&perms.perms[p][..k]);
                order
            })
            .collect()
    });
    table[code.bits as usize]
}

/// Memoized canonicalization with hit/miss accounting.
///
/// The map is cleared once it holds `capacity` entries, which keeps memory
/// bounded on inputs that touch many distinct adjacency matrices.
#[derive(Clone, Debug)]
pub struct IsoCache {
    map: FxHashMap<u64, u32>,
    capacity: usize,
    /// Dense lookup table for one small `k`, filled up front.
    dense: Option<(usize, Vec<u32>)>,
    hits: u64,
    misses: u64,
    resets: u64,
}

impl Default for IsoCache {
    fn default() -> Self {
        IsoCache {
            map: FxHashMap::default(),
            capacity: Self::DEFAULT_CAPACITY,
            dense: None,
            hits: 0,
            misses: 0,
            resets: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: u64,
    /// Times the map was cleared after reaching capacity.
    pub resets: u64,
}

impl CacheStats {
    pub fn add(&mut self, other: &CacheStats) {
        self.hits += other.hits;
        self.misses += other.misses;
        self.entries += other.entries;
        self.resets += other.resets;
    }
}

impl IsoCache {
    /// About 2^21 entries, a few tens of megabytes.
    pub const DEFAULT_CAPACITY: usize = 1 << 21;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        IsoCache {
            capacity: capacity.max(1),
            ..Self::default()
        }
    }

    /// Fills a complete lookup table for size `k` (at most 4).
    pub fn precomputed(k: usize) -> Result<Self> {
        if !(1..=4).contains(&k) {
            return Err(MotifError::SizeOutOfRange {
                size: k,
                min: 1,
                max: 4,
            });
        }
        let table = (0..1u32 << code_width(k))
            .map(|bits| canonical_code(AdjacencyCode::from_raw(k, bits)).bits())
            .collect();
        Ok(IsoCache {
            dense: Some((k, table)),
            ..Self::default()
        })
    }

    #[inline]
    pub fn iso_id(&mut self, code: AdjacencyCode) -> MotifId {
        let k = code.k();
        if let Some((dk, table)) = &self.dense {
            if *dk == k {
                self.hits += 1;
                return MotifId(AdjacencyCode::from_raw(k, table[code.bits as usize]));
            }
        }
        let key = (k as u64) << 32 | code.bits as u64;
        if let Some(&bits) = self.map.get(&key) {
            self.hits += 1;
            return MotifId(AdjacencyCode::from_raw(k, bits));
        }
        self.misses += 1;
        let id = canonical_code(code);
        if self.map.len() >= self.capacity {
            self.map.clear();
            self.resets += 1;
        }
        self.map.insert(key, id.bits());
        id
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits,
            misses: self.misses,
            entries: self.map.len() as u64 + self.dense.as_ref().map_or(0, |(_, t)| t.len() as u64),
            resets: self.resets,
        }
    }
}

/// Number of isomorphism classes among all `k`-vertex digraphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Census {
    pub k: usize,
    pub total: u64,
    pub connected: u64,
}

/// Counts isomorphism classes of `k`-vertex digraphs by marking orbits over
/// all `2^(k(k-1))` codes. `k = 6` requires `long_run`.
pub fn census(k: usize, long_run: bool) -> Result<Census> {
    if !(2..=MAX_K).contains(&k) {
        return Err(MotifError::SizeOutOfRange {
            size: k,
            min: 2,
            max: MAX_K,
        });
    }
    if k == MAX_K && !long_run {
        return Err(MotifError::LongRunRequired);
    }
    let table = perm_table(k);
    let space = 1usize << code_width(k);
    let mut seen = FixedBitSet::with_capacity(space);
    let mut total = 0;
    let mut connected = 0;
    for bits in 0..space {
        if seen.contains(bits) {
            continue;
        }
        for map in &table.maps {
            seen.insert(apply_map(bits as u32, map) as usize);
        }
        total += 1;
        if AdjacencyCode::from_raw(k, bits as u32).is_connected() {
            connected += 1;
        }
    }
    Ok(Census {
        k,
        total,
        connected,
    })
}

/// Number of distinct classes, optionally restricted to connected ones.
pub fn class_census(k: usize, connected_only: bool, long_run: bool) -> Result<u64> {
    let c = census(k, long_run)?;
    Ok(if connected_only { c.connected } else { c.total })
}
