//! Dense weighted graphs shared by every other module.

mod dot;
pub mod families;
mod io;

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dot::{export_dot, render_dot, DotStyle};
pub use io::{format_graph, load_graph, parse_graph, save_graph, MAX_FILE_NODES};

/// A graph on nodes `0..n` stored as a dense, non-negative weight matrix.
///
/// The diagonal is always zero and undirected graphs have an exactly
/// symmetric matrix. Values are immutable once built except through the
/// checked [`WeightedGraph::set_weight`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weights: DMatrix<f64>,
    directed: bool,
}

/// A single weighted edge `u -> v` (or `u -- v` for undirected graphs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Serialization form of a [`WeightedGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeList {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Graph with `n >= 1` nodes and no edges.
    pub fn empty(n: usize, directed: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "graph needs at least one node".into(),
            ));
        }
        Ok(Self {
            weights: DMatrix::zeros(n, n),
            directed,
        })
    }

    /// Wraps a weight matrix after checking the graph invariants.
    pub fn from_matrix(weights: DMatrix<f64>, directed: bool) -> Result<Self> {
        let n = weights.nrows();
        if n == 0 || weights.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "weight matrix must be square and non-empty, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(format!("self-loop at node {i}")));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "weight ({i}, {j}) = {w} must be finite and non-negative"
                    )));
                }
                if !directed && w != weights[(j, i)] {
                    return Err(Error::InvalidParameter(format!(
                        "undirected weight matrix is asymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { weights, directed })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)], directed: bool) -> Result<Self> {
        let mut g = Self::empty(n, directed)?;
        let mut seen = HashSet::new();
        for &(u, v, w) in edges {
            let key = if directed {
                (u, v)
            } else {
                (u.min(v), u.max(v))
            };
            if !seen.insert(key) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({u}, {v})"
                )));
            }
            g.set_weight(u, v, w)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights[(u, v)]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weights[(u, v)] > 0.0 || (!self.directed && self.weights[(v, u)] > 0.0)
    }

    /// Sets the weight of `u -> v`, mirrored for undirected graphs. A weight
    /// of zero removes the edge.
    pub fn set_weight(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        let n = self.node_count();
        for node in [u, v] {
            if node >= n {
                return Err(Error::InvalidNode { node, n });
            }
        }
        if u == v {
            return Err(Error::InvalidParameter(format!("self-loop at node {u}")));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "edge weight {w} must be finite and non-negative"
            )));
        }
        self.weights[(u, v)] = w;
        if !self.directed {
            self.weights[(v, u)] = w;
        }
        Ok(())
    }

    /// Edges with positive weight. Undirected edges are reported once with
    /// `u < v`; order is lexicographic in `(u, v)`.
    pub fn edges(&self) -> Vec<Edge> {
        let n = self.node_count();
        let mut out = Vec::new();
        for u in 0..n {
            let start = if self.directed { 0 } else { u + 1 };
            for v in start..n {
                let w = self.weights[(u, v)];
                if w > 0.0 {
                    out.push(Edge { u, v, w });
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Weighted out-degree (row sum).
    pub fn degree(&self, u: usize) -> f64 {
        self.weights.row(u).sum()
    }

    pub fn max_degree(&self) -> f64 {
        (0..self.node_count())
            .map(|u| self.degree(u))
            .fold(0.0, f64::max)
    }

    /// Copy of the graph with one extra isolated node appended (id `n`).
    pub fn with_extra_node(&self) -> Self {
        let n = self.node_count();
        let mut weights = DMatrix::zeros(n + 1, n + 1);
        weights.view_mut((0, 0), (n, n)).copy_from(&self.weights);
        Self {
            weights,
            directed: self.directed,
        }
    }

    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList {
            n: self.node_count(),
            directed: self.directed,
            edges: self.edges(),
        }
    }
}

impl TryFrom<EdgeList> for WeightedGraph {
    type Error = Error;

    fn try_from(list: EdgeList) -> Result<Self> {
        let edges: Vec<_> = list.edges.iter().map(|e| (e.u, e.v, e.w)).collect();
        Self::from_edges(list.n, &edges, list.directed)
    }
}

impl From<&WeightedGraph> for EdgeList {
    fn from(g: &WeightedGraph) -> Self {
        g.to_edge_list()
    }
}

impl Serialize for WeightedGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_edge_list().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeightedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let list = EdgeList::deserialize(deserializer)?;
        WeightedGraph::try_from(list).map_err(serde::de::Error::custom)
    }
}

/// Random DAG on `n` nodes: every pair `i < j` carries a unit edge `i -> j`
/// with probability `p`. The adjacency matrix is strictly upper triangular,
/// so the result is acyclic by construction. Identical arguments give
/// identical graphs.
pub fn random_dag(n: usize, p: f64, seed: u64) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "node count n = {n} must be >= 2"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability p = {p} must lie in [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::empty(n, true)?;
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                g.weights[(i, j)] = 1.0;
            }
        }
    }
    Ok(g)
}

/// Undirected graph with weights `(W + W^T) / 2`.
pub fn symmetrize(g: &WeightedGraph) -> WeightedGraph {
    let w = &g.weights;
    let sym = (w + w.transpose()) * 0.5;
    WeightedGraph {
        weights: sym,
        directed: false,
    }
}

/// Component label per node of the underlying undirected graph. Labels are
/// assigned in order of the smallest node id in each component.
pub fn component_labels(g: &WeightedGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for (v, lv) in label.iter_mut().enumerate() {
                if *lv == usize::MAX && (g.weights[(u, v)] > 0.0 || g.weights[(v, u)] > 0.0) {
                    *lv = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    label
}

pub fn component_count(g: &WeightedGraph) -> usize {
    component_labels(g).into_iter().max().map_or(0, |m| m + 1)
}

/// True iff the underlying undirected graph has a single component.
pub fn is_connected(g: &WeightedGraph) -> bool {
    component_count(g) == 1
}

/// `Ok(())` for connected graphs, otherwise the component count as an error.
pub fn require_connected(g: &WeightedGraph) -> Result<()> {
    match component_count(g) {
        1 => Ok(()),
        components => Err(Error::DisconnectedGraph { components }),
    }
}
