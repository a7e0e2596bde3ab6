//! Degree-preserving random graphs and per-motif significance statistics.
//!
//! Replicas are produced by edge switching. Single-direction edges
//! `(a -> b), (c -> d)` become `(a -> d), (c -> b)`; bidirected pairs are
//! switched only with other bidirected pairs. A switch is rejected when it
//! would create a self-loop or touch a vertex pair that is already adjacent,
//! so in-degree, out-degree and bidirected degree of every vertex are kept.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use crate::engine::{count_motifs, Histogram};
use crate::error::{MotifError, Result};
use crate::graph::{Class, DirectedGraph};
use crate::iso::MotifId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomizerConfig {
    pub replicas: usize,
    /// Attempted switches per directed edge.
    pub switches_per_edge: f64,
    pub seed: u64,
}

impl Default for RandomizerConfig {
    fn default() -> Self {
        RandomizerConfig {
            replicas: 511,
            switches_per_edge: 3.0,
            seed: 0,
        }
    }
}

impl RandomizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(MotifError::InvalidConfig(
                "replicas must be at least 1".into(),
            ));
        }
        if !(self.switches_per_edge > 0.0 && self.switches_per_edge.is_finite()) {
            return Err(MotifError::InvalidConfig(
                "switches per edge must be a positive number".into(),
            ));
        }
        Ok(())
    }

    pub fn attempts(&self, m: usize) -> u64 {
        (self.switches_per_edge * m as f64).ceil().max(0.0) as u64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SwitchStats {
    pub attempted: u64,
    pub accepted: u64,
}

/// Random generator for one replica, independent of scheduling.
pub fn replica_rng(seed: u64, replica_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica_index);
    rng
}

#[inline]
fn key(u: u32, v: u32) -> u64 {
    (u as u64) << 32 | v as u64
}

pub fn randomize(g: &DirectedGraph, cfg: &RandomizerConfig, replica_index: u64) -> DirectedGraph {
    randomize_with_stats(g, cfg, replica_index).0
}

pub fn randomize_with_stats(
    g: &DirectedGraph,
    cfg: &RandomizerConfig,
    replica_index: u64,
) -> (DirectedGraph, SwitchStats) {
    let mut rng = replica_rng(cfg.seed, replica_index);
    let mut single: Vec<(u32, u32)> = Vec::new();
    let mut mutual: Vec<(u32, u32)> = Vec::new();
    for v in 0..g.n() as u32 {
        for &(u, class) in g.neighbors(v) {
            match class {
                Class::B => single.push((v, u)),
                Class::A if v < u => mutual.push((v, u)),
                _ => {}
            }
        }
    }
    let mut edges: FxHashSet<u64> = g.edges().map(|(u, v)| key(u, v)).collect();
    let adjacent = |edges: &FxHashSet<u64>, u: u32, v: u32| {
        edges.contains(&key(u, v)) || edges.contains(&key(v, u))
    };

    let mut stats = SwitchStats::default();
    let units = single.len() + mutual.len();
    let attempts = cfg.attempts(g.m());
    for _ in 0..attempts {
        stats.attempted += 1;
        if units == 0 {
            continue;
        }
        let pick = rng.gen_range(0..units);
        let (pool, i, is_mutual) = if pick < single.len() {
            (&mut single, pick, false)
        } else {
            let i = pick - single.len();
            (&mut mutual, i, true)
        };
        if pool.len() < 2 {
            continue;
        }
        let mut j = rng.gen_range(0..pool.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = pool[i];
        let (mut c, mut d) = pool[j];
        if is_mutual && rng.gen::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        // (a, b), (c, d) -> (a, d), (c, b)
        if a == d || c == b || a == c || b == d {
            continue;
        }
        if adjacent(&edges, a, d) || adjacent(&edges, c, b) {
            continue;
        }
        edges.remove(&key(a, b));
        edges.remove(&key(c, d));
        edges.insert(key(a, d));
        edges.insert(key(c, b));
        if is_mutual {
            edges.remove(&key(b, a));
            edges.remove(&key(d, c));
            edges.insert(key(d, a));
            edges.insert(key(b, c));
            pool[i] = (a.min(d), a.max(d));
            pool[j] = (c.min(b), c.max(b));
        } else {
            pool[i] = (a, d);
            pool[j] = (c, b);
        }
        stats.accepted += 1;
    }

    let graph = DirectedGraph::from_edges(
        g.n(),
        edges.into_iter().map(|e| ((e >> 32) as u32, e as u32)),
    )
    .expect("switching keeps vertex ids in range");
    (graph, stats)
}

/// Significance summary for one pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct MotifStats {
    pub original: u64,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator; 0 for a single replica).
    pub std: f64,
    /// `None` when the standard deviation is zero.
    pub z: Option<f64>,
    /// Fraction of replicas with a count at least the original.
    pub p_value: f64,
}

impl MotifStats {
    pub fn from_counts(original: u64, replicas: &[u64]) -> Self {
        let n = replicas.len();
        if n == 0 {
            return MotifStats {
                original,
                mean: 0.0,
                std: 0.0,
                z: None,
                p_value: 0.0,
            };
        }
        let mean = replicas.iter().map(|&c| c as f64).sum::<f64>() / n as f64;
        let std = if n > 1 {
            let ss: f64 = replicas
                .iter()
                .map(|&c| {
                    let d = c as f64 - mean;
                    d * d
                })
                .sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let z = (std > 0.0).then(|| (original as f64 - mean) / std);
        let at_least = replicas.iter().filter(|&&c| c >= original).count();
        MotifStats {
            original,
            mean,
            std,
            z,
            p_value: at_least as f64 / n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub k: usize,
    pub replicas: usize,
    pub motifs: BTreeMap<MotifId, MotifStats>,
    pub switches: SwitchStats,
}

/// Counts motifs in `g` and in `cfg.replicas` randomized copies.
pub fn significance(
    g: &DirectedGraph,
    k: usize,
    cfg: &RandomizerConfig,
    workers: usize,
) -> Result<EnsembleStats> {
    cfg.validate()?;
    let original = count_motifs(g, k, workers)?;
    let workers = workers.max(1).min(cfg.replicas);
    let next = AtomicUsize::new(0);
    type Slot = Option<Result<(Histogram, SwitchStats)>>;
    let slots: Mutex<Vec<Slot>> = Mutex::new((0..cfg.replicas).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= cfg.replicas {
                    break;
                }
                let (replica, stats) = randomize_with_stats(g, cfg, idx as u64);
                let result = count_motifs(&replica, k, 1).map(|h| (h, stats));
                slots.lock().unwrap()[idx] = Some(result);
            });
        }
    });

    let mut replicas = Vec::with_capacity(cfg.replicas);
    let mut switches = SwitchStats::default();
    for slot in slots.into_inner().unwrap() {
        let (h, s) = slot.expect("every replica index is claimed")?;
        switches.attempted += s.attempted;
        switches.accepted += s.accepted;
        replicas.push(h);
    }
    Ok(summarize(&original, &replicas, switches))
}

/// Per-pattern statistics from an original histogram and replica histograms,
/// gathered in replica-index order.
pub fn summarize(
    original: &Histogram,
    replicas: &[Histogram],
    switches: SwitchStats,
) -> EnsembleStats {
    let mut ids: Vec<MotifId> = original.iter().map(|(id, _)| *id).collect();
    for h in replicas {
        ids.extend(h.iter().map(|(id, _)| *id));
    }
    ids.sort_unstable();
    ids.dedup();
    let motifs = ids
        .into_iter()
        .map(|id| {
            let counts: Vec<u64> = replicas.iter().map(|h| h.get(&id)).collect();
            (id, MotifStats::from_counts(original.get(&id), &counts))
        })
        .collect();
    EnsembleStats {
        k: original.k(),
        replicas: replicas.len(),
        motifs,
        switches,
    }
}
