//! Cheeger constants, Fiedler sweep cuts and spectral bipartitioning.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{require_connected, WeightedGraph};
use crate::spectral::{decompose, SpectralDecomposition};

/// Largest graph accepted by [`cheeger_exact`] (`2^(n-1)` cuts).
pub const MAX_EXACT_NODES: usize = 24;
/// Tolerance used by [`check_cheeger_inequality`].
pub const CHEEGER_TOL: f64 = 1e-9;
const LOW_BITS: usize = 14;
const FIEDLER_ZERO_TOL: f64 = 1e-12;

/// Denominator of the Cheeger ratio.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Normalization {
    /// `min_S |dS| / |S|` over all non-trivial subsets. For a given cut the
    /// minimising `S` is the larger side.
    SizeOnly,
    /// `min_S |dS| / min(|S|, |V \ S|)`.
    #[default]
    MinSide,
}

impl Normalization {
    fn denominator(self, a: usize, b: usize) -> usize {
        match self {
            Normalization::SizeOnly => a.max(b),
            Normalization::MinSide => a.min(b),
        }
    }
}

/// A two-sided vertex cut with its Cheeger ratio. `side_a` always contains
/// node 0 and both sides are sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    pub side_a: Vec<usize>,
    #[serde(skip)]
    pub side_b: Vec<usize>,
    pub ratio: f64,
    pub boundary_weight: f64,
    pub normalization: Normalization,
}

/// Total weight of edges with exactly one endpoint in `side`.
pub fn boundary_weight(g: &WeightedGraph, in_side: &[bool]) -> f64 {
    let n = g.node_count();
    let w = g.weights();
    let mut total = 0.0;
    for u in (0..n).filter(|&u| in_side[u]) {
        for v in (0..n).filter(|&v| !in_side[v]) {
            total += w[(u, v)];
        }
    }
    total
}

/// Evaluates an arbitrary cut given one of its sides.
pub fn evaluate_cut(
    g: &WeightedGraph,
    side: &[usize],
    normalization: Normalization,
) -> Result<CutResult> {
    let n = g.node_count();
    let mut in_side = vec![false; n];
    for &u in side {
        if u >= n {
            return Err(Error::InvalidNode { node: u, n });
        }
        in_side[u] = true;
    }
    if !in_side[0] {
        in_side.iter_mut().for_each(|x| *x = !*x);
    }
    cut_from_membership(g, &in_side, normalization)
}

fn cut_from_membership(
    g: &WeightedGraph,
    in_a: &[bool],
    normalization: Normalization,
) -> Result<CutResult> {
    let side_a: Vec<usize> = (0..in_a.len()).filter(|&u| in_a[u]).collect();
    let side_b: Vec<usize> = (0..in_a.len()).filter(|&u| !in_a[u]).collect();
    if side_a.is_empty() || side_b.is_empty() {
        return Err(Error::InvalidParameter(
            "both sides of a cut must be non-empty".into(),
        ));
    }
    let boundary = boundary_weight(g, in_a);
    let ratio = boundary / normalization.denominator(side_a.len(), side_b.len()) as f64;
    Ok(CutResult {
        side_a,
        side_b,
        ratio,
        boundary_weight: boundary,
        normalization,
    })
}

fn check_undirected_connected(g: &WeightedGraph) -> Result<()> {
    if g.is_directed() {
        return Err(Error::DirectedInput);
    }
    if g.node_count() < 2 {
        return Err(Error::InvalidParameter(
            "a cut needs at least two nodes".into(),
        ));
    }
    require_connected(g)
}

fn ratios_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Lexicographic order of the sorted member lists encoded by two bitmasks.
fn lex_cmp_masks(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let k = (a ^ b).trailing_zeros();
    let above = if k == 63 { 0 } else { !0u64 << (k + 1) };
    let (with_k, without_k) = if a & (1 << k) != 0 { (a, b) } else { (b, a) };
    // The set holding k is smaller unless the other set ends before k.
    let with_k_smaller = without_k & above != 0;
    match (with_k == a, with_k_smaller) {
        (true, true) | (false, false) => Ordering::Less,
        _ => Ordering::Greater,
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    ratio: f64,
    mask: u64,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        if ratios_tie(self.ratio, other.ratio) {
            lex_cmp_masks(self.mask, other.mask) == Ordering::Less
        } else {
            self.ratio < other.ratio
        }
    }
}

fn pick(best: Option<Candidate>, c: Candidate) -> Option<Candidate> {
    match best {
        Some(b) if !c.better_than(&b) => Some(b),
        _ => Some(c),
    }
}

/// Exact Cheeger constant by enumerating every cut once (subsets containing
/// node 0). Ties go to the lexicographically smallest `side_a`.
pub fn cheeger_exact(g: &WeightedGraph, normalization: Normalization) -> Result<CutResult> {
    let n = g.node_count();
    if n > MAX_EXACT_NODES {
        return Err(Error::TooLarge {
            n,
            max: MAX_EXACT_NODES,
        });
    }
    check_undirected_connected(g)?;

    let w = g.weights();
    let degree: Vec<f64> = (0..n).map(|u| g.degree(u)).collect();
    // Bit k of a free mask is node k + 1; node 0 is always in S.
    let free = n - 1;
    let low = free.min(LOW_BITS);
    let high = free - low;
    let all_free = (1u64 << free) - 1;

    let chunk_best = |chunk: u64| -> Option<Candidate> {
        let base = chunk << low;
        let mut in_s = vec![false; n];
        in_s[0] = true;
        for k in 0..free {
            if base & (1 << k) != 0 {
                in_s[k + 1] = true;
            }
        }
        let mut to_s: Vec<f64> = (0..n)
            .map(|u| (0..n).filter(|&v| in_s[v]).map(|v| w[(u, v)]).sum())
            .collect();
        let mut boundary: f64 = (0..n)
            .filter(|&u| in_s[u])
            .map(|u| degree[u] - to_s[u])
            .sum();
        let mut size = 1 + base.count_ones() as usize;
        let mut mask = base;
        let mut best = None;

        let consider = |mask: u64, size: usize, boundary: f64, best: &mut Option<Candidate>| {
            if mask == all_free {
                return;
            }
            let ratio = boundary / normalization.denominator(size, n - size) as f64;
            *best = pick(
                *best,
                Candidate {
                    ratio,
                    mask: (mask << 1) | 1,
                },
            );
        };

        consider(mask, size, boundary, &mut best);
        for i in 1u64..(1u64 << low) {
            let bit = i.trailing_zeros() as usize;
            let x = bit + 1;
            mask ^= 1 << bit;
            if in_s[x] {
                boundary += 2.0 * to_s[x] - degree[x];
                in_s[x] = false;
                size -= 1;
                for u in 0..n {
                    to_s[u] -= w[(u, x)];
                }
            } else {
                boundary += degree[x] - 2.0 * to_s[x];
                in_s[x] = true;
                size += 1;
                for u in 0..n {
                    to_s[u] += w[(u, x)];
                }
            }
            consider(mask, size, boundary, &mut best);
        }
        best
    };

    let per_chunk: Vec<Option<Candidate>> = (0..(1u64 << high))
        .into_par_iter()
        .map(chunk_best)
        .collect();
    let best = per_chunk
        .into_iter()
        .flatten()
        .fold(None, pick)
        .expect("a connected graph with n >= 2 has at least one cut");

    let in_a: Vec<bool> = (0..n).map(|u| best.mask & (1 << u) != 0).collect();
    cut_from_membership(g, &in_a, normalization)
}

/// Best prefix cut of the nodes ordered by Fiedler component.
pub fn fiedler_sweep(
    g: &WeightedGraph,
    decomp: &SpectralDecomposition,
    normalization: Normalization,
) -> Result<CutResult> {
    check_undirected_connected(g)?;
    let n = g.node_count();
    if decomp.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: decomp.len(),
        });
    }
    let f = decomp.fiedler();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));

    let mut best: Option<CutResult> = None;
    let mut in_prefix = vec![false; n];
    for &u in &order[..n - 1] {
        in_prefix[u] = true;
        let in_a: Vec<bool> = if in_prefix[0] {
            in_prefix.clone()
        } else {
            in_prefix.iter().map(|x| !x).collect()
        };
        let cut = cut_from_membership(g, &in_a, normalization)?;
        best = match best {
            None => Some(cut),
            Some(b) => {
                let replace = if ratios_tie(cut.ratio, b.ratio) {
                    cut.side_a < b.side_a
                } else {
                    cut.ratio < b.ratio
                };
                Some(if replace { cut } else { b })
            }
        };
    }
    Ok(best.expect("n >= 2 gives at least one prefix cut"))
}

/// Cheeger constant under `MIN_SIDE`: exact up to [`MAX_EXACT_NODES`],
/// Fiedler sweep beyond.
pub fn cheeger_constant(g: &WeightedGraph) -> Result<CutResult> {
    if g.node_count() <= MAX_EXACT_NODES {
        cheeger_exact(g, Normalization::MinSide)
    } else {
        fiedler_sweep(g, &decompose(g)?, Normalization::MinSide)
    }
}

/// Outcome of checking `h^2 / 2 <= lambda_2 <= 2 h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheegerCheck {
    pub holds: bool,
    pub h: f64,
    pub lambda2: f64,
    /// `lambda_2 - h^2 / 2`; negative means the lower bound is violated.
    pub lower_margin: f64,
    /// `2 h - lambda_2`; negative means the upper bound is violated.
    pub upper_margin: f64,
}

pub fn check_cheeger_inequality(h: f64, lambda2: f64) -> CheegerCheck {
    degree_scaled_check(h, lambda2, 1.0)
}

/// Variant with the maximum-degree scaling `h^2 / (2 d_max) <= lambda_2`,
/// which holds for every graph with the unnormalised Laplacian.
pub fn check_cheeger_inequality_scaled(h: f64, lambda2: f64, max_degree: f64) -> CheegerCheck {
    degree_scaled_check(h, lambda2, max_degree)
}

fn degree_scaled_check(h: f64, lambda2: f64, scale: f64) -> CheegerCheck {
    let lower_margin = lambda2 - h * h / (2.0 * scale);
    let upper_margin = 2.0 * h - lambda2;
    CheegerCheck {
        holds: lower_margin >= -CHEEGER_TOL && upper_margin >= -CHEEGER_TOL,
        h,
        lambda2,
        lower_margin,
        upper_margin,
    }
}

/// Splits nodes by the sign of their Fiedler component (`>= 0` goes to A).
/// Components within `1e-12` of zero count as zero. Falls back to a median
/// split if one side comes out empty.
pub fn fiedler_bipartition(decomp: &SpectralDecomposition) -> (Vec<usize>, Vec<usize>) {
    let f = decomp.fiedler();
    let n = f.len();
    let (a, b): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| f[i] >= -FIEDLER_ZERO_TOL);
    if !a.is_empty() && !b.is_empty() {
        return (a, b);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| f[y].total_cmp(&f[x]).then(x.cmp(&y)));
    let (top, bottom) = order.split_at(n.div_ceil(2));
    let mut a = top.to_vec();
    let mut b = bottom.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    (a, b)
}
