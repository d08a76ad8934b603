#![allow(dead_code, clippy::needless_range_loop)]

use qfern::WeightedGraph;
use qfern_testkit::Matrix;

pub fn to_matrix(g: &WeightedGraph) -> Matrix {
    let n = g.node_count();
    (0..n)
        .map(|i| (0..n).map(|j| g.weight(i, j)).collect())
        .collect()
}

pub fn from_matrix(w: &Matrix) -> WeightedGraph {
    let n = w.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if w[i][j] != 0.0 {
                edges.push((i, j, w[i][j]));
            }
        }
    }
    WeightedGraph::from_edges(n, &edges, false).unwrap()
}

/// SplitMix64 step; derives instance parameters from a seed.
pub fn mix(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Connected random graph with `n` uniform in `[min_n, max_n]` and edge
/// probability uniform in `[p_lo, p_hi]`.
pub fn random_instance(
    seed: u64,
    min_n: usize,
    max_n: usize,
    p_lo: f64,
    p_hi: f64,
    weighted: bool,
) -> WeightedGraph {
    let h = mix(seed);
    let n = min_n + (h % (max_n - min_n + 1) as u64) as usize;
    let p = p_lo + (p_hi - p_lo) * ((h >> 32) as f64 / u32::MAX as f64);
    from_matrix(&qfern_testkit::random_connected(n, p, seed, weighted))
}

pub fn write_graph(path: &std::path::Path, g: &WeightedGraph) {
    std::fs::write(path, qfern::graph::format_graph(g)).unwrap();
}
