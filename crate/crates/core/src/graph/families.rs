//! Standard undirected test and benchmark graphs with unit weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::WeightedGraph;

fn unit(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> WeightedGraph {
    let mut g = WeightedGraph::empty(n, false).expect("n >= 1");
    for (u, v) in edges {
        g.set_weight(u, v, 1.0).expect("valid edge");
    }
    g
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> WeightedGraph {
    unit(n, (1..n).map(|i| (i - 1, i)))
}

/// Cycle on `n >= 3` nodes.
pub fn cycle(n: usize) -> WeightedGraph {
    assert!(n >= 3, "cycle needs at least 3 nodes");
    unit(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn complete(n: usize) -> WeightedGraph {
    unit(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))))
}

/// Star with centre 0 and `n - 1` leaves.
pub fn star(n: usize) -> WeightedGraph {
    unit(n, (1..n).map(|i| (0, i)))
}

/// Two cliques `K_a` (nodes `0..a`) and `K_b` (nodes `a..a+b`) joined by the
/// single bridge `(a-1, a)`.
pub fn barbell(a: usize, b: usize) -> WeightedGraph {
    assert!(a >= 1 && b >= 1);
    let left = (0..a).flat_map(|i| ((i + 1)..a).map(move |j| (i, j)));
    let right = (a..a + b).flat_map(move |i| ((i + 1)..(a + b)).map(move |j| (i, j)));
    unit(a + b, left.chain(right).chain(std::iter::once((a - 1, a))))
}

/// Uniformly random labelled tree on `n` nodes, decoded from a random Prüfer
/// sequence.
pub fn random_tree(n: usize, seed: u64) -> WeightedGraph {
    assert!(n >= 1);
    if n <= 2 {
        return path(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &prufer {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in &prufer {
        let leaf = (0..n).find(|&i| degree[i] == 1).expect("a leaf exists");
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    unit(n, edges)
}

/// Erdős–Rényi `G(n, p)` with unit weights.
pub fn gnp(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    unit(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_connected;

    #[test]
    fn sizes() {
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(cycle(5).edge_count(), 5);
        assert_eq!(complete(5).edge_count(), 10);
        assert_eq!(star(5).edge_count(), 4);
        assert_eq!(barbell(4, 4).edge_count(), 13);
        assert!(barbell(4, 4).has_edge(3, 4));
    }

    #[test]
    fn random_trees_are_spanning_trees() {
        for seed in 0..50 {
            let n = 2 + (seed as usize % 10);
            let t = random_tree(n, seed);
            assert_eq!(t.edge_count(), n - 1);
            assert!(is_connected(&t));
        }
    }
}
