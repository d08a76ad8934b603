//! Fiedler-gradient soft adjacency updates and bottleneck-widening edge swaps.
//!
//! [`qfern_once`] applies a single gradient step `A_soft <- A + alpha * G`
//! with `G[i][j] = -f_i f_j` built from the Fiedler vector, followed by a
//! projection back onto symmetric non-negative matrices. [`rewire_optimize`]
//! is the discrete counterpart: it repeatedly removes a random edge and adds
//! the cross-partition edge that maximises the Cheeger constant, keeping
//! the swap only when the bottleneck widens (or stays equal while total
//! effective resistance drops).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cuts::{cheeger_constant, fiedler_bipartition};
use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::graph::{component_labels, is_connected, require_connected, symmetrize, WeightedGraph};
use crate::spectral::{decompose, resistance_matrix, total_effective_resistance};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GradientMode {
    /// `G[i][j] = -f_i f_j`: positive across the Fiedler cut.
    #[default]
    Signed,
    /// `G[i][j] = -|f_i f_j|`: never positive.
    Abs,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CandidatePolicy {
    /// Absent pairs with one endpoint on each side of the Fiedler bipartition.
    #[default]
    CrossPartition,
    /// Every absent pair.
    AllNonEdges,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewiringConfig {
    pub alpha: f64,
    pub gradient_mode: GradientMode,
    pub max_iterations: usize,
    /// Consecutive rejected swaps tolerated before stopping; 0 disables
    /// early stopping.
    pub patience: usize,
    pub seed: u64,
    pub candidate_policy: CandidatePolicy,
}

impl Default for RewiringConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            gradient_mode: GradientMode::Signed,
            max_iterations: 50,
            patience: 20,
            seed: 0,
            candidate_policy: CandidatePolicy::CrossPartition,
        }
    }
}

impl RewiringConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} must be finite and non-negative",
                self.alpha
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Off-diagonal outer-product gradient of the Fiedler vector.
pub fn fiedler_gradient(fiedler: &[f64], mode: GradientMode) -> DMatrix<f64> {
    let n = fiedler.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return 0.0;
        }
        let p = fiedler[i] * fiedler[j];
        match mode {
            GradientMode::Signed => -p,
            GradientMode::Abs => -p.abs(),
        }
    })
}

/// `a + alpha * gradient`, symmetrized, clamped at zero, zero diagonal.
pub fn asoft_update(a: &DMatrix<f64>, gradient: &DMatrix<f64>, alpha: f64) -> Result<DMatrix<f64>> {
    if a.shape() != gradient.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: gradient.nrows(),
        });
    }
    let stepped = a + gradient * alpha;
    let mut m = (&stepped + stepped.transpose()) * 0.5;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            m[(i, j)] = if i == j { 0.0 } else { m[(i, j)].max(0.0) };
        }
    }
    Ok(m)
}

/// Result of one soft adjacency step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfernStep {
    pub asoft: WeightedGraph,
    pub lambda2_before: f64,
    pub lambda2_after: f64,
}

/// Symmetrizes `g`, then applies one Fiedler-gradient step.
pub fn qfern_once(g: &WeightedGraph, config: &RewiringConfig) -> Result<QfernStep> {
    config.validate()?;
    let sym = symmetrize(g);
    require_connected(&sym)?;
    let before = decompose(&sym)?;
    let gradient = fiedler_gradient(&before.fiedler(), config.gradient_mode);
    let updated = asoft_update(sym.weights(), &gradient, config.alpha)?;
    let asoft = WeightedGraph::from_matrix(updated, false)?;
    let after = decompose(&asoft)?;
    Ok(QfernStep {
        asoft,
        lambda2_before: before.lambda2(),
        lambda2_after: after.lambda2(),
    })
}

/// One iteration of [`rewire_optimize`]. `h`, `lambda2` and `r_total`
/// describe the graph after the step, i.e. the candidate for accepted steps
/// and the unchanged graph otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub step: usize,
    pub removed_edge: (usize, usize),
    pub added_edge: Option<(usize, usize)>,
    pub accepted: bool,
    pub h: f64,
    pub lambda2: f64,
    pub r_total: f64,
    /// Cheeger value of the evaluated swap, if any candidate was admissible.
    pub candidate_h: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StopReason {
    MaxIterations,
    Patience,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewiringReport {
    pub config: RewiringConfig,
    pub initial_graph: WeightedGraph,
    pub final_graph: WeightedGraph,
    pub initial_h: f64,
    pub initial_lambda2: f64,
    pub initial_r_total: f64,
    pub final_h: f64,
    pub final_lambda2: f64,
    pub final_r_total: f64,
    pub iterations: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    /// Soft adjacency of the final graph after one gradient step.
    pub asoft: Vec<Vec<f64>>,
}

impl RewiringReport {
    pub fn accepted_count(&self) -> usize {
        self.iterations.iter().filter(|r| r.accepted).count()
    }

    /// `step,h,lambda2,r_total,accepted`, one row per iteration.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,h,lambda2,r_total,accepted\n");
        for r in &self.iterations {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.step,
                sig12(r.h),
                sig12(r.lambda2),
                sig12(r.r_total),
                r.accepted
            ));
        }
        out
    }

    pub fn asoft_csv(&self) -> String {
        self.asoft
            .iter()
            .map(|row| row.iter().map(|&x| sig12(x)).collect::<Vec<_>>().join(",") + "\n")
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct State {
    h: f64,
    lambda2: f64,
    r_total: f64,
}

fn evaluate(g: &WeightedGraph) -> Result<State> {
    let decomp = decompose(g)?;
    Ok(State {
        h: cheeger_constant(g)?.ratio,
        lambda2: decomp.lambda2(),
        r_total: total_effective_resistance(&resistance_matrix(&decomp)?),
    })
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Sides used to restrict candidate edges. A disconnected trial graph is
/// split into the component of node 0 and everything else.
fn partition(g: &WeightedGraph) -> Result<Vec<bool>> {
    let n = g.node_count();
    if is_connected(g) {
        let (a, _) = fiedler_bipartition(&decompose(g)?);
        let mut in_a = vec![false; n];
        a.into_iter().for_each(|u| in_a[u] = true);
        Ok(in_a)
    } else {
        let labels = component_labels(g);
        Ok(labels.iter().map(|&l| l == labels[0]).collect())
    }
}

fn candidates(g: &WeightedGraph, in_a: &[bool], policy: CandidatePolicy) -> Vec<(usize, usize)> {
    let n = g.node_count();
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !g.has_edge(i, j))
        .filter(|&(i, j)| policy == CandidatePolicy::AllNonEdges || in_a[i] != in_a[j])
        .collect()
}

/// Cheeger/resistance-driven edge swap loop. See the module docs.
pub fn rewire_optimize(g: &WeightedGraph, config: &RewiringConfig) -> Result<RewiringReport> {
    config.validate()?;
    let initial = symmetrize(g);
    require_connected(&initial)?;
    if initial.node_count() < 2 {
        return Err(Error::NoCandidateEdges);
    }
    if candidates(&initial, &partition(&initial)?, config.candidate_policy).is_empty() {
        return Err(Error::NoCandidateEdges);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = evaluate(&initial)?;
    let mut current = initial.clone();
    let mut state = start;
    let mut iterations = Vec::new();
    let mut rejected_run = 0;
    let mut stop_reason = StopReason::MaxIterations;

    for step in 0..config.max_iterations {
        let edges = current.edges();
        let removed = edges[rng.random_range(0..edges.len())];
        let mut trial = current.clone();
        trial.set_weight(removed.u, removed.v, 0.0)?;

        let in_a = partition(&trial)?;
        let pool = candidates(&trial, &in_a, config.candidate_policy);
        let scores: Vec<Option<f64>> = pool
            .par_iter()
            .map(|&(i, j)| {
                let mut cand = trial.clone();
                cand.set_weight(i, j, removed.w).ok()?;
                if !is_connected(&cand) {
                    return None;
                }
                cheeger_constant(&cand).ok().map(|c| c.ratio)
            })
            .collect();
        let best = pool
            .iter()
            .zip(&scores)
            .filter_map(|(&e, s)| s.map(|h| (e, h)))
            .fold(None::<((usize, usize), f64)>, |best, (e, h)| match best {
                Some((_, bh)) if ties(h, bh) || h < bh => best,
                _ => Some((e, h)),
            });

        let mut record = IterationRecord {
            step,
            removed_edge: (removed.u, removed.v),
            added_edge: best.map(|(e, _)| e),
            accepted: false,
            h: state.h,
            lambda2: state.lambda2,
            r_total: state.r_total,
            candidate_h: best.map(|(_, h)| h),
        };

        if let Some(((i, j), _)) = best {
            let mut cand = trial;
            cand.set_weight(i, j, removed.w)?;
            let next = evaluate(&cand)?;
            let better_h = next.h > state.h && !ties(next.h, state.h);
            let lower_r = ties(next.h, state.h)
                && next.r_total < state.r_total
                && !ties(next.r_total, state.r_total);
            if better_h || lower_r {
                current = cand;
                state = next;
                record.accepted = true;
                record.h = next.h;
                record.lambda2 = next.lambda2;
                record.r_total = next.r_total;
            }
        }

        rejected_run = if record.accepted { 0 } else { rejected_run + 1 };
        iterations.push(record);
        if config.patience > 0 && rejected_run >= config.patience {
            stop_reason = StopReason::Patience;
            break;
        }
    }

    let asoft = qfern_once(&current, config)?
        .asoft
        .weights()
        .row_iter()
        .map(|r| r.iter().copied().collect())
        .collect();

    Ok(RewiringReport {
        config: config.clone(),
        initial_graph: initial,
        final_graph: current,
        initial_h: start.h,
        initial_lambda2: start.lambda2,
        initial_r_total: start.r_total,
        final_h: state.h,
        final_lambda2: state.lambda2,
        final_r_total: state.r_total,
        iterations,
        stop_reason,
        asoft,
    })
}
