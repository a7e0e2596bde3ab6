mod common;

use std::collections::BTreeSet;

use dimotif::engine::{count_motifs, count_raw, BaseCounter, EngineConfig};
use dimotif::enumerate::{count_connected, enumerate_connected};
use dimotif::induce::{induced_edges, split_point, Strategy as Induce};
use dimotif::iso::{canonical_code, AdjacencyCode, IsoCache, MAX_K};
use dimotif::nullmodel::{randomize, RandomizerConfig};
use dimotif::oracle::exhaustive_connected_subsets;
use dimotif::{parse_edge_list_str, Class, DirectedGraph, VertexSet};
use proptest::prelude::*;

use common::random_digraph;

fn graph(max_n: usize) -> impl Strategy<Value = DirectedGraph> {
    (2..=max_n, 0.0..0.5f64, any::<u64>()).prop_map(|(n, p, seed)| random_digraph(n, p, seed))
}

fn graph_and_subset(max_n: usize) -> impl Strategy<Value = (DirectedGraph, VertexSet)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n() as u32;
        (
            Just(g),
            proptest::collection::btree_set(0..n, 0..=n as usize),
        )
            .prop_map(|(g, s)| (g, VertexSet::new(s).unwrap()))
    })
}

fn code(k: usize) -> impl Strategy<Value = AdjacencyCode> {
    let width = k * (k - 1);
    (0..1u64 << width).prop_map(move |bits| AdjacencyCode::new(k, bits as u32).unwrap())
}

fn permutation(k: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..k).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn neighbor_classes_are_consistent(g in graph(20)) {
        for v in 0..g.n() as u32 {
            let mut seen = 0;
            for u in 0..g.n() as u32 {
                if u == v {
                    continue;
                }
                let c = g.class(v, u);
                match c {
                    Class::A => prop_assert_eq!(g.class(u, v), Class::A),
                    Class::B => prop_assert_eq!(g.class(u, v), Class::C),
                    Class::C => prop_assert_eq!(g.class(u, v), Class::B),
                    Class::N => prop_assert_eq!(g.class(u, v), Class::N),
                }
                if c != Class::N {
                    seen += 1;
                }
            }
            prop_assert_eq!(seen, g.degree(v));
            let sizes: usize = [Class::A, Class::B, Class::C]
                .iter()
                .map(|&c| g.class_members(v, c).len())
                .sum();
            prop_assert_eq!(sizes, g.degree(v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn edge_list_round_trip(g in graph(30)) {
        prop_assume!(g.m() > 0);
        let loaded = parse_edge_list_str(&g.to_edge_list()).unwrap().graph;
        prop_assert_eq!(loaded.m(), g.m());
        let again = parse_edge_list_str(&loaded.to_edge_list()).unwrap().graph;
        prop_assert_eq!(again, loaded);
    }

    #[test]
    fn strategies_agree((g, s) in graph_and_subset(100)) {
        let expected: BTreeSet<(u32, u32)> = s
            .iter()
            .flat_map(|u| s.iter().map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && g.has_edge(u, v))
            .collect();
        for strategy in [Induce::Pairwise, Induce::NeighborScan, Induce::Adaptive, Induce::Split] {
            let edges = induced_edges(&g, &s, strategy).unwrap().sorted();
            prop_assert_eq!(edges.len(), expected.len());
            prop_assert_eq!(edges.into_iter().collect::<BTreeSet<_>>(), expected.clone());
        }
    }

    #[test]
    fn split_point_is_a_minimizer((g, s) in graph_and_subset(60)) {
        prop_assume!(!s.is_empty());
        let split = split_point(&g, s.as_slice()).unwrap();
        let mut degrees: Vec<u64> = s.iter().map(|v| g.degree(v) as u64).collect();
        degrees.sort_unstable();
        let len = degrees.len() as u64;
        let objective = |p: usize| degrees[..p].iter().sum::<u64>() + (len - p as u64).pow(2);
        let best = (0..=degrees.len()).map(objective).min().unwrap();
        prop_assert_eq!(split.objective, best);
        prop_assert_eq!(split.p, (0..=degrees.len()).find(|&p| objective(p) == best).unwrap());
    }

    #[test]
    fn canonical_form_is_invariant(c in (3..=MAX_K).prop_flat_map(|k| (code(k), permutation(k)))) {
        let (code, perm) = c;
        let id = canonical_code(code);
        prop_assert_eq!(canonical_code(id.code()), id);
        prop_assert_eq!(canonical_code(code.permuted(&perm)), id);
        prop_assert!(id.code().bits() <= code.bits());
    }

    #[test]
    fn cache_is_transparent(codes in proptest::collection::vec(code(5), 1..200)) {
        let mut cache = IsoCache::with_capacity(16);
        for c in codes {
            prop_assert_eq!(cache.iso_id(c), canonical_code(c));
        }
    }

    #[test]
    fn switching_preserves_degrees(g in graph(40), seed in any::<u64>(), idx in 0..8u64) {
        let cfg = RandomizerConfig { replicas: 1, switches_per_edge: 2.0, seed };
        let r = randomize(&g, &cfg, idx);
        prop_assert_eq!(r.n(), g.n());
        prop_assert_eq!(r.m(), g.m());
        for v in 0..g.n() as u32 {
            prop_assert_eq!(r.in_degree(v), g.in_degree(v));
            prop_assert_eq!(r.out_degree(v), g.out_degree(v));
            prop_assert_eq!(r.bidirected_degree(v), g.bidirected_degree(v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn enumeration_is_complete(g in graph(14), r in 1..=4usize) {
        prop_assume!(r <= g.n());
        let listed: Vec<Vec<u32>> = enumerate_connected(&g, r)
            .unwrap()
            .into_iter()
            .map(VertexSet::into_vec)
            .collect();
        let unique: BTreeSet<_> = listed.iter().cloned().collect();
        prop_assert_eq!(unique.len(), listed.len());
        let exhaustive: BTreeSet<_> = exhaustive_connected_subsets(&g, r).into_iter().collect();
        prop_assert_eq!(unique, exhaustive);
        if r == 2 {
            prop_assert_eq!(count_connected(&g, 2).unwrap() as usize, g.m() - g.bidirected_pairs());
        }
    }

    #[test]
    fn worker_count_is_irrelevant(g in graph(24), k in 3..=5usize, workers in 2..=4usize) {
        prop_assume!(k <= g.n());
        prop_assert_eq!(count_motifs(&g, k, 1).unwrap(), count_motifs(&g, k, workers).unwrap());
    }

    #[test]
    fn base_counter_matches_engine(g in graph(16), k in 3..=5usize) {
        prop_assume!(k <= g.n());
        let mut counter = BaseCounter::new(&g, k, Induce::Adaptive).unwrap();
        for base in enumerate_connected(&g, k - 2).unwrap() {
            counter.count_base(&base).unwrap();
        }
        let report = count_raw(&g, k, &EngineConfig::default()).unwrap();
        prop_assert_eq!(counter.raw(), &report.raw);
        prop_assert_eq!(counter.bases(), report.bases);
    }
}
