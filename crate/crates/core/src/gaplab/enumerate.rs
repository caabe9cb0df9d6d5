//! Graph corpora for exhaustive and randomized checks.

use std::collections::BTreeSet;

use rand::Rng;

use super::graph::{HyperWeights, WeightedGraph};
use super::perm;

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// One unit-weight representative of every isomorphism class of connected
/// simple graphs on `n` vertices (`n <= 6`).
pub fn connected_graphs(n: usize) -> Vec<WeightedGraph> {
    assert!(n <= 6, "exhaustive enumeration is limited to 6 vertices");
    let all_pairs = pairs(n);
    let pair_index = |i: usize, j: usize| all_pairs.iter().position(|&p| p == (i.min(j), i.max(j))).unwrap();
    let relabelings = perm::all(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << all_pairs.len()) {
        let canonical = relabelings
            .iter()
            .map(|p| {
                all_pairs
                    .iter()
                    .enumerate()
                    .filter(|(e, _)| mask >> e & 1 == 1)
                    .fold(0u32, |acc, (_, &(i, j))| acc | 1 << pair_index(p[i] as usize, p[j] as usize))
            })
            .min()
            .unwrap_or(mask);
        if !seen.insert(canonical) {
            continue;
        }
        let edges: Vec<_> =
            all_pairs.iter().enumerate().filter(|(e, _)| canonical >> e & 1 == 1).map(|(_, &(i, j))| (i, j, 1.0)).collect();
        let g = WeightedGraph::from_edges(n, &edges).expect("valid edges");
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

/// Erdős–Rényi skeleton with edge probability `p`, resampled until
/// connected; each edge gets a weight uniform on `(0, 1]`.
pub fn random_connected_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> WeightedGraph {
    loop {
        let mut edges = Vec::new();
        for (i, j) in pairs(n) {
            if rng.gen_bool(p) {
                edges.push((i, j, 1.0 - rng.gen::<f64>()));
            }
        }
        let g = WeightedGraph::from_edges(n, &edges).expect("valid edges");
        if g.is_connected() {
            return g;
        }
    }
}

/// Random subsets of size at least two, each kept with probability `p` and
/// given a rate uniform on `(0, 1]`; resampled until the single-particle walk
/// is irreducible.
pub fn random_hyperweights<R: Rng>(n: usize, p: f64, rng: &mut R) -> HyperWeights {
    loop {
        let mut h = HyperWeights::new(n);
        for mask in 0u32..(1u32 << n) {
            if mask.count_ones() < 2 || !rng.gen_bool(p) {
                continue;
            }
            let set: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            h.add(&set, 1.0 - rng.gen::<f64>()).expect("valid subset");
        }
        if super::generator::alpha_single_particle_rates(&h).is_connected() {
            return h;
        }
    }
}
