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
    let m = nalgebra_free(w);
    WeightedGraph::from_edges(n, &m, false).unwrap()
}

fn nalgebra_free(w: &Matrix) -> Vec<(usize, usize, f64)> {
    let n = w.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if w[i][j] != 0.0 {
                edges.push((i, j, w[i][j]));
            }
        }
    }
    edges
}

/// Connected weighted test graph; size and density vary with the seed.
pub fn random_graph(seed: u64, min_n: usize, max_n: usize) -> WeightedGraph {
    let n = min_n + (seed as usize * 7919) % (max_n - min_n + 1);
    let p = 0.25 + 0.5 * ((seed * 37 % 100) as f64 / 100.0);
    from_matrix(&qfern_testkit::random_connected(n, p, seed, true))
}
