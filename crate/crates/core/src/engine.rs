//! Motif counting over size-(k-2) base subgraphs.
//!
//! For every connected base `X` the neighborhood adj(X) is split into cells by
//! the class tuple of each external vertex relative to the vertices of `X`.
//! Any two external vertices `y`, `z` that are not adjacent to each other
//! complete `X` to the same pattern whenever they come from the same pair of
//! cells, so every pair of cells is counted in closed form. Adjacent pairs are
//! then moved one by one to the pattern of their true induced subgraph.
//!
//! A size-k subgraph is reached once for every way of writing it as a
//! connected (k-2)-set plus two vertices each attached to that set. Raw
//! counts are divided by that decomposition count at the end.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rustc_hash::FxHashMap;

use crate::enumerate::for_each_connected_from;
use crate::error::{MotifError, Result};
use crate::graph::{Class, DirectedGraph};
use crate::induce::{InduceCounters, Inducer, Strategy};
use crate::iso::{
    bit_index, canonical_order, encode_unchecked, AdjacencyCode, CacheStats, IsoCache, MotifId,
};
use crate::VertexSet;

pub const MIN_MOTIF: usize = 3;
pub const MAX_MOTIF: usize = 6;

/// Class tuple of an external vertex relative to the ordered base vertices.
///
/// Digit `i` (two bits) holds the class relative to the `i`-th base vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel {
    len: u8,
    digits: u8,
}

impl ClassLabel {
    pub fn new(classes: &[Class]) -> Result<Self> {
        let text = || classes.iter().map(|c| c.as_char()).collect::<String>();
        if classes.is_empty() || classes.len() > 4 {
            return Err(MotifError::InvalidLabel(text()));
        }
        let label = Self::from_classes_unchecked(classes);
        if label.digits == 0 {
            return Err(MotifError::InvalidLabel(text()));
        }
        Ok(label)
    }

    fn from_classes_unchecked(classes: &[Class]) -> Self {
        let digits = classes
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, c)| acc | c.digit() << (2 * i));
        ClassLabel {
            len: classes.len() as u8,
            digits,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let classes: Option<Vec<Class>> = text.chars().map(Class::from_char).collect();
        match classes {
            Some(c) => Self::new(&c),
            None => Err(MotifError::InvalidLabel(text.to_string())),
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn class(&self, i: usize) -> Class {
        Class::from_digit(self.digits >> (2 * i))
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", self.class(i).as_char())?;
        }
        Ok(())
    }
}

/// Part(adj(X)): external neighbors of `X` grouped by class label.
pub type AdjacencyPartition = BTreeMap<ClassLabel, VertexSet>;

fn check_base(g: &DirectedGraph, base: &[u32]) -> Result<()> {
    if base.is_empty() || base.len() > 4 {
        return Err(MotifError::SizeOutOfRange {
            size: base.len(),
            min: 1,
            max: 4,
        });
    }
    for (i, &v) in base.iter().enumerate() {
        g.check_vertex(v)?;
        if base[..i].contains(&v) {
            return Err(MotifError::DuplicateVertex(v));
        }
    }
    Ok(())
}

pub fn partition_adjacency(g: &DirectedGraph, base: &VertexSet) -> Result<AdjacencyPartition> {
    let x = base.as_slice();
    check_base(g, x)?;
    let mut cells: BTreeMap<ClassLabel, Vec<u32>> = BTreeMap::new();
    let mut labels: FxHashMap<u32, u8> = FxHashMap::default();
    for (i, &xi) in x.iter().enumerate() {
        for &(u, class) in g.neighbors(xi) {
            if !x.contains(&u) {
                *labels.entry(u).or_default() |= class.digit() << (2 * i);
            }
        }
    }
    for (u, digits) in labels {
        let label = ClassLabel {
            len: x.len() as u8,
            digits,
        };
        cells.entry(label).or_default().push(u);
    }
    cells
        .into_iter()
        .map(|(l, vs)| Ok((l, VertexSet::new(vs)?)))
        .collect()
}

/// Edges of `G[base]` laid out for a size-`k` code at positions `0..base.len()`.
#[inline]
fn base_bits(g: &DirectedGraph, base: &[u32], k: usize) -> u32 {
    let mut bits = 0;
    for (i, &u) in base.iter().enumerate() {
        for (j, &v) in base.iter().enumerate() {
            if i != j && g.has_edge(u, v) {
                bits |= 1 << bit_index(k, i, j);
            }
        }
    }
    bits
}

/// Wires an external vertex at position `pos` to the base per `digits`.
#[inline]
fn attach(mut bits: u32, k: usize, r: usize, pos: usize, digits: u8) -> u32 {
    for i in 0..r {
        let class = Class::from_digit(digits >> (2 * i));
        if class.has_out() {
            bits |= 1 << bit_index(k, i, pos);
        }
        if class.has_in() {
            bits |= 1 << bit_index(k, pos, i);
        }
    }
    bits
}

#[inline]
fn assemble_bits(base: u32, k: usize, y: u8, z: u8) -> u32 {
    let r = k - 2;
    attach(attach(base, k, r, r, y), k, r, r + 1, z)
}

/// motif(X, Y, Z): `G[X]` plus one vertex per label, not joined to each other.
pub fn assemble_motif_code(
    g: &DirectedGraph,
    base: &VertexSet,
    y: ClassLabel,
    z: ClassLabel,
) -> Result<AdjacencyCode> {
    let x = base.as_slice();
    check_base(g, x)?;
    for label in [y, z] {
        if label.len() != x.len() || label.digits == 0 {
            return Err(MotifError::InvalidLabel(label.to_string()));
        }
    }
    let k = x.len() + 2;
    AdjacencyCode::new(k, assemble_bits(base_bits(g, x, k), k, y.digits, z.digits))
}

/// Unnormalized pattern counts keyed by canonical code bits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawCounts {
    k: usize,
    counts: FxHashMap<u32, i64>,
}

impl RawCounts {
    pub fn new(k: usize) -> Self {
        RawCounts {
            k,
            counts: FxHashMap::default(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    fn add(&mut self, id: MotifId, delta: i64) {
        *self.counts.entry(id.bits()).or_insert(0) += delta;
    }

    pub fn get(&self, id: &MotifId) -> i64 {
        self.counts.get(&id.bits()).copied().unwrap_or(0)
    }

    /// Nonzero entries in ascending id order.
    pub fn entries(&self) -> Vec<(MotifId, i64)> {
        let mut v: Vec<(MotifId, i64)> = self
            .counts
            .iter()
            .filter(|(_, &c)| c != 0)
            .map(|(&bits, &c)| {
                (
                    MotifId::from_canonical(AdjacencyCode::from_raw(self.k, bits)),
                    c,
                )
            })
            .collect();
        v.sort_unstable();
        v
    }

    pub fn merge(&mut self, other: &RawCounts) {
        for (&bits, &c) in &other.counts {
            *self.counts.entry(bits).or_insert(0) += c;
        }
    }

    /// Divides each raw count by its pattern's decomposition multiplicity.
    pub fn normalize(&self, table: &mut MultiplicityTable) -> Result<Histogram> {
        let mut hist = Histogram::new(self.k);
        for (id, raw) in self.entries() {
            let mult = table.get(id)?;
            if raw < 0 || !(raw as u64).is_multiple_of(mult) {
                return Err(MotifError::InexactDivision {
                    pattern: id.to_string(),
                    raw,
                    multiplicity: mult,
                });
            }
            hist.add(id, raw as u64 / mult);
        }
        Ok(hist)
    }
}

/// Number of unordered vertex pairs `{a, b}` of the pattern such that the
/// other `k - 2` vertices induce a connected subgraph and both `a` and `b`
/// have a neighbor among them.
pub fn pattern_multiplicity(id: MotifId) -> Result<u64> {
    let code = id.code();
    let k = code.k();
    if !(MIN_MOTIF..=MAX_MOTIF).contains(&k) {
        return Err(MotifError::SizeOutOfRange {
            size: k,
            min: MIN_MOTIF,
            max: MAX_MOTIF,
        });
    }
    if !code.is_connected() {
        return Err(MotifError::DisconnectedPattern(id.to_string()));
    }
    let full = (1u32 << k) - 1;
    let mut count = 0;
    for a in 0..k {
        for b in a + 1..k {
            let rest = full & !(1 << a) & !(1 << b);
            if code.neighbor_mask(a) & rest != 0
                && code.neighbor_mask(b) & rest != 0
                && code.is_connected_within(rest)
            {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Memoized [`pattern_multiplicity`].
#[derive(Clone, Debug, Default)]
pub struct MultiplicityTable {
    memo: FxHashMap<MotifId, u64>,
}

impl MultiplicityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, id: MotifId) -> Result<u64> {
        if let Some(&m) = self.memo.get(&id) {
            return Ok(m);
        }
        let m = pattern_multiplicity(id)?;
        self.memo.insert(id, m);
        Ok(m)
    }
}

/// H_k: count per canonical pattern.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Histogram {
    k: usize,
    counts: BTreeMap<MotifId, u64>,
}

impl Histogram {
    pub fn new(k: usize) -> Self {
        Histogram {
            k,
            counts: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn add(&mut self, id: MotifId, count: u64) {
        if count > 0 {
            *self.counts.entry(id).or_insert(0) += count;
        }
    }

    pub fn get(&self, id: &MotifId) -> u64 {
        self.counts.get(id).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of distinct patterns present.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MotifId, &u64)> {
        self.counts.iter()
    }
}

/// Per-worker counting state.
pub struct BaseCounter<'g> {
    g: &'g DirectedGraph,
    k: usize,
    strategy: Strategy,
    labels: Vec<u8>,
    touched: Vec<u32>,
    cell_sizes: [u64; 256],
    cell_index: [u8; 256],
    cells: Vec<u8>,
    /// Canonical bits of motif(X, Y, Z) for every pair of cells of the current base.
    pair_ids: Vec<u32>,
    edges: Vec<(u32, u32)>,
    inducer: Inducer,
    cache: IsoCache,
    raw: RawCounts,
    bases: u64,
}

impl<'g> BaseCounter<'g> {
    pub fn new(g: &'g DirectedGraph, k: usize, strategy: Strategy) -> Result<Self> {
        check_k(k)?;
        Ok(BaseCounter {
            g,
            k,
            strategy,
            labels: vec![0; g.n()],
            touched: Vec::new(),
            cell_sizes: [0; 256],
            cell_index: [0; 256],
            cells: Vec::new(),
            pair_ids: Vec::new(),
            edges: Vec::new(),
            inducer: Inducer::new(g.n()),
            cache: IsoCache::new(),
            raw: RawCounts::new(k),
            bases: 0,
        })
    }

    /// Adds the raw contributions of one base subgraph of size `k - 2`.
    pub fn count_base(&mut self, base: &VertexSet) -> Result<()> {
        let x = base.as_slice();
        check_base(self.g, x)?;
        if x.len() != self.k - 2 {
            return Err(MotifError::SizeOutOfRange {
                size: x.len(),
                min: self.k - 2,
                max: self.k - 2,
            });
        }
        let code = AdjacencyCode::from_raw(x.len(), base_bits(self.g, x, x.len()));
        if x.len() > 1 && !code.is_connected() {
            return Err(MotifError::DisconnectedBase(x.to_vec()));
        }
        self.count_base_unchecked(x);
        Ok(())
    }

    pub(crate) fn count_base_unchecked(&mut self, x: &[u32]) {
        let g = self.g;
        let k = self.k;
        self.bases += 1;

        // Lay the base out in canonical order so isomorphic bases produce
        // the same raw codes and share cache entries.
        let order = canonical_order(encode_unchecked(g, x));
        for (i, &xi) in x.iter().enumerate() {
            let shift = 2 * order[i];
            for &(u, class) in g.neighbors(xi) {
                if x.contains(&u) {
                    continue;
                }
                let slot = &mut self.labels[u as usize];
                if *slot == 0 {
                    self.touched.push(u);
                }
                *slot |= class.digit() << shift;
            }
        }
        if self.touched.len() < 2 {
            self.clear_labels();
            return;
        }

        let mut base = 0;
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in x.iter().enumerate() {
                if i != j && g.has_edge(u, v) {
                    base |= 1 << bit_index(k, order[i] as usize, order[j] as usize);
                }
            }
        }

        for &u in &self.touched {
            let label = self.labels[u as usize];
            if self.cell_sizes[label as usize] == 0 {
                self.cell_index[label as usize] = self.cells.len() as u8;
                self.cells.push(label);
            }
            self.cell_sizes[label as usize] += 1;
        }
        let c = self.cells.len();
        self.pair_ids.clear();
        self.pair_ids.resize(c * c, 0);
        for a in 0..c {
            let ly = self.cells[a];
            let ny = self.cell_sizes[ly as usize];
            let id = self
                .cache
                .iso_id(AdjacencyCode::from_raw(k, assemble_bits(base, k, ly, ly)));
            self.pair_ids[a * c + a] = id.bits();
            if ny >= 2 {
                self.raw.add(id, (ny * (ny - 1) / 2) as i64);
            }
            for b in a + 1..c {
                let lz = self.cells[b];
                let nz = self.cell_sizes[lz as usize];
                let id = self
                    .cache
                    .iso_id(AdjacencyCode::from_raw(k, assemble_bits(base, k, ly, lz)));
                self.pair_ids[a * c + b] = id.bits();
                self.pair_ids[b * c + a] = id.bits();
                self.raw.add(id, (ny * nz) as i64);
            }
        }
        for &label in &self.cells {
            self.cell_sizes[label as usize] = 0;
        }
        self.cells.clear();

        let mut edges = std::mem::take(&mut self.edges);
        self.inducer
            .extract(g, &self.touched, self.strategy, |u, v| edges.push((u, v)));
        let (py, pz) = (k - 2, k - 1);
        for &(u, v) in &edges {
            let reverse = g.has_edge(v, u);
            if reverse && u > v {
                // bidirected pair, handled from (v, u)
                continue;
            }
            let (lu, lv) = (self.labels[u as usize], self.labels[v as usize]);
            let cu = self.cell_index[lu as usize] as usize;
            let cv = self.cell_index[lv as usize] as usize;
            let wrong =
                MotifId::from_canonical(AdjacencyCode::from_raw(k, self.pair_ids[cu * c + cv]));
            // y takes the smaller label; u -> v always exists
            let (ly, lz, y_to_z, z_to_y) = if lu <= lv {
                (lu, lv, true, reverse)
            } else {
                (lv, lu, reverse, true)
            };
            let mut actual = assemble_bits(base, k, ly, lz);
            if y_to_z {
                actual |= 1 << bit_index(k, py, pz);
            }
            if z_to_y {
                actual |= 1 << bit_index(k, pz, py);
            }
            let right = self.cache.iso_id(AdjacencyCode::from_raw(k, actual));
            self.raw.add(wrong, -1);
            self.raw.add(right, 1);
        }
        edges.clear();
        self.edges = edges;
        self.clear_labels();
    }

    fn clear_labels(&mut self) {
        for &u in &self.touched {
            self.labels[u as usize] = 0;
        }
        self.touched.clear();
    }

    pub fn raw(&self) -> &RawCounts {
        &self.raw
    }

    pub fn bases(&self) -> u64 {
        self.bases
    }

    pub fn cache_stats(&self) -> CacheStats {
        self.cache.stats()
    }

    pub fn induce_counters(&self) -> InduceCounters {
        self.inducer.counters()
    }
}

fn check_k(k: usize) -> Result<()> {
    if (MIN_MOTIF..=MAX_MOTIF).contains(&k) {
        Ok(())
    } else {
        Err(MotifError::SizeOutOfRange {
            size: k,
            min: MIN_MOTIF,
            max: MAX_MOTIF,
        })
    }
}

/// Callback receiving `(roots_done, roots_total)` after each chunk of roots.
pub type ProgressHook = Arc<dyn Fn(u64, u64) + Send + Sync>;

#[derive(Clone)]
pub struct EngineConfig {
    pub workers: usize,
    pub strategy: Strategy,
    /// Number of enumeration roots a worker claims at a time.
    pub chunk_size: usize,
    pub progress: Option<ProgressHook>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            workers: 1,
            strategy: Strategy::Adaptive,
            chunk_size: 16,
            progress: None,
        }
    }
}

impl fmt::Debug for EngineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EngineConfig")
            .field("workers", &self.workers)
            .field("strategy", &self.strategy)
            .field("chunk_size", &self.chunk_size)
            .field("progress", &self.progress.is_some())
            .finish()
    }
}

impl EngineConfig {
    pub fn with_workers(workers: usize) -> Self {
        EngineConfig {
            workers,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct CountReport {
    pub histogram: Histogram,
    pub raw: RawCounts,
    /// Number of base subgraphs processed, i.e. |L_{k-2}|.
    pub bases: u64,
    pub cache: CacheStats,
    pub induce: InduceCounters,
    pub workers: usize,
}

/// Counts all connected induced `k`-vertex subgraphs of `g`, raw.
pub fn count_raw(g: &DirectedGraph, k: usize, config: &EngineConfig) -> Result<CountReport> {
    check_k(k)?;
    if k > g.n() {
        return Err(MotifError::MotifLargerThanGraph { k, n: g.n() });
    }
    let workers = config.workers.max(1);
    let chunk = config.chunk_size.max(1);
    let r = k - 2;
    let n = g.n();
    let next = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(workers));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut counter =
                    BaseCounter::new(g, k, config.strategy).expect("k validated above");
                loop {
                    let start = next.fetch_add(chunk, Ordering::Relaxed);
                    if start >= n {
                        break;
                    }
                    let end = (start + chunk).min(n);
                    for root in start..end {
                        for_each_connected_from(g, r, root as u32, &mut |x| {
                            counter.count_base_unchecked(x)
                        });
                    }
                    let finished = done.fetch_add(end - start, Ordering::Relaxed) + end - start;
                    if let Some(hook) = &config.progress {
                        hook(finished as u64, n as u64);
                    }
                }
                results.lock().unwrap().push((
                    counter.raw,
                    counter.bases,
                    counter.cache.stats(),
                    counter.inducer.counters(),
                ));
            });
        }
    });

    let mut raw = RawCounts::new(k);
    let mut bases = 0;
    let mut cache = CacheStats::default();
    let mut induce = InduceCounters::default();
    for (r, b, c, i) in results.into_inner().unwrap() {
        raw.merge(&r);
        bases += b;
        cache.add(&c);
        induce.add(&i);
    }
    let histogram = raw.normalize(&mut MultiplicityTable::new())?;
    Ok(CountReport {
        histogram,
        raw,
        bases,
        cache,
        induce,
        workers,
    })
}

/// H_k of `g` using `workers` threads.
///
/// # Panics
///
/// Panics if a raw count is not divisible by its pattern multiplicity, which
/// indicates a counting bug.
pub fn count_motifs(g: &DirectedGraph, k: usize, workers: usize) -> Result<Histogram> {
    count_motifs_with(g, k, &EngineConfig::with_workers(workers)).map(|r| r.histogram)
}

/// Like [`count_motifs`] but returns the full report.
pub fn count_motifs_with(
    g: &DirectedGraph,
    k: usize,
    config: &EngineConfig,
) -> Result<CountReport> {
    match count_raw(g, k, config) {
        Err(e @ MotifError::InexactDivision { .. }) => {
            panic!("internal counting inconsistency: {e}")
        }
        other => other,
    }
}
