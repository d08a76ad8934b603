//! Kuramoto synchronization analysis on weighted graphs.
//!
//! The stability test is `||L^+ omega||_{E,inf} < 1`, where the norm is the
//! largest endpoint difference of `x = L^+ omega` over the edges. On trees
//! this is exactly the condition for a phase-locked state with all edge
//! phase differences below pi/2; on general graphs it is sufficient only.

mod kuramoto;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::graph::{require_connected, WeightedGraph, MAX_FILE_NODES};
use crate::spectral::{decompose, resistance_matrix, ResistanceMatrix, SpectralDecomposition};

pub use kuramoto::{kuramoto_simulate, wrap_phase, SimulationConfig, SimulationResult};

/// Largest tolerated `|sum omega|` for [`FrequencyVector::exact`].
pub const CENTERING_TOL: f64 = 1e-9;
const FLAG_TOL: f64 = 1e-9;

/// Natural frequencies, stored centred (zero mean) alongside the raw input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyVector {
    omega: Vec<f64>,
    original: Vec<f64>,
}

impl FrequencyVector {
    /// Centres `raw` by subtracting its mean.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidParameter("frequency vector is empty".into()));
        }
        if let Some(bad) = raw.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite frequency {bad}"
            )));
        }
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let omega = raw.iter().map(|x| x - mean).collect();
        Ok(Self {
            omega,
            original: raw,
        })
    }

    /// Like [`FrequencyVector::new`] but rejects input whose sum exceeds
    /// [`CENTERING_TOL`] in magnitude.
    pub fn exact(raw: Vec<f64>) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if sum.abs() > CENTERING_TOL {
            return Err(Error::UncenteredOmega { sum });
        }
        Self::new(raw)
    }

    /// Uniform draws from `[-1, 1]`, then centred.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
    }

    /// One real per line, node-indexed. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let value: f64 = content
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("invalid frequency `{content}`")))?;
            if !value.is_finite() {
                return Err(Error::parse(
                    idx + 1,
                    format!("non-finite frequency `{content}`"),
                ));
            }
            if raw.len() == MAX_FILE_NODES {
                return Err(Error::parse(
                    idx + 1,
                    format!("more than {MAX_FILE_NODES} frequencies"),
                ));
            }
            raw.push(value);
        }
        if raw.is_empty() {
            return Err(Error::parse(
                text.lines().count() + 1,
                "no frequencies found",
            ));
        }
        Self::new(raw)
    }

    /// Centred frequencies.
    pub fn values(&self) -> &[f64] {
        &self.omega
    }

    pub fn original(&self) -> &[f64] {
        &self.original
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Scales the centred frequencies by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            omega: self.omega.iter().map(|x| x * c).collect(),
            original: self.original.iter().map(|x| x * c).collect(),
        }
    }

    /// Appends a node with frequency equal to the current mean, keeping the
    /// centred vector centred.
    pub fn with_mean_node(&self) -> Self {
        let mean = self.original.iter().sum::<f64>() / self.original.len() as f64;
        let mut omega = self.omega.clone();
        let mut original = self.original.clone();
        omega.push(0.0);
        original.push(mean);
        Self { omega, original }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeDiff {
    pub u: usize,
    pub v: usize,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncAnalysis {
    /// `L^+ omega`.
    pub x: Vec<f64>,
    pub edge_diffs: Vec<EdgeDiff>,
    /// `max_edges |x_u - x_v|`.
    pub einf_norm: f64,
    /// `max_{i>=2} |f_i^T omega| / lambda_2`.
    pub lambda2_bound: f64,
    /// Whether `einf_norm <= lambda2_bound` held on this instance.
    pub bound_holds: bool,
    pub stable: bool,
    pub degenerate_lambda2: bool,
}

/// `L^+ omega` through the spectral sum `V diag(0, 1/l_2, ..) V^T omega`.
pub fn spectral_potential(decomp: &SpectralDecomposition, omega: &[f64]) -> Vec<f64> {
    let n = decomp.len();
    let vecs = decomp.eigenvectors();
    let mut x = vec![0.0; n];
    for i in 1..n {
        let coeff = (0..n).map(|k| vecs[(k, i)] * omega[k]).sum::<f64>() / decomp.eigenvalues()[i];
        for (k, xk) in x.iter_mut().enumerate() {
            *xk += coeff * vecs[(k, i)];
        }
    }
    x
}

fn require_undirected(g: &WeightedGraph) -> Result<()> {
    if g.is_directed() {
        Err(Error::DirectedInput)
    } else {
        Ok(())
    }
}

pub fn einf_norm_condition(g: &WeightedGraph, omega: &FrequencyVector) -> Result<SyncAnalysis> {
    require_undirected(g)?;
    let n = g.node_count();
    omega.check_len(n)?;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "synchronization analysis needs an edge".into(),
        ));
    }
    require_connected(g)?;
    let decomp = decompose(g)?;
    decomp.require_connected()?;

    let w = omega.values();
    let x = spectral_potential(&decomp, w);
    let edge_diffs: Vec<EdgeDiff> = g
        .edges()
        .into_iter()
        .map(|e| EdgeDiff {
            u: e.u,
            v: e.v,
            diff: (x[e.u] - x[e.v]).abs(),
        })
        .collect();
    let einf_norm = edge_diffs.iter().map(|d| d.diff).fold(0.0, f64::max);

    let vecs = decomp.eigenvectors();
    let max_projection = (1..n)
        .map(|i| (0..n).map(|k| vecs[(k, i)] * w[k]).sum::<f64>().abs())
        .fold(0.0, f64::max);
    let lambda2_bound = max_projection / decomp.lambda2();
    let bound_holds = einf_norm <= lambda2_bound + 1e-12 * lambda2_bound.max(1.0);

    Ok(SyncAnalysis {
        x,
        edge_diffs,
        einf_norm,
        lambda2_bound,
        bound_holds,
        stable: einf_norm < 1.0,
        degenerate_lambda2: decomp.degenerate_lambda2(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ThresholdPolicy {
    /// Flag pairs with `R_uv > t`.
    Absolute(f64),
    /// Flag pairs above the `q`-quantile of all off-diagonal resistances.
    Quantile(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlaggedPair {
    pub u: usize,
    pub v: usize,
    pub resistance: f64,
    pub phase_estimate: f64,
}

/// Note attached to phase estimates in serialized reports.
pub const PHASE_ESTIMATE_NOTE: &str =
    "heuristic estimate: R_uv * |omega_u - omega_v| with unit proportionality constant";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesyncReport {
    pub policy: ThresholdPolicy,
    pub threshold: f64,
    pub resistance: ResistanceMatrix,
    pub flagged_pairs: Vec<FlaggedPair>,
    pub flagged_nodes: Vec<usize>,
    pub phase_estimates: Vec<Vec<f64>>,
    pub phase_estimate_note: String,
}

impl DesyncReport {
    pub fn is_empty(&self) -> bool {
        self.flagged_pairs.is_empty()
    }

    /// Largest resistance among the flagged pairs, if any.
    pub fn max_flagged_resistance(&self) -> Option<f64> {
        self.flagged_pairs
            .iter()
            .map(|p| p.resistance)
            .reduce(f64::max)
    }

    /// `u,v,R,phase_estimate` rows with a header line.
    pub fn flagged_csv(&self) -> String {
        let mut out = String::from("u,v,R,phase_estimate\n");
        for p in &self.flagged_pairs {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.u,
                p.v,
                sig12(p.resistance),
                sig12(p.phase_estimate)
            ));
        }
        out
    }
}

/// Linear-interpolation quantile (the common "type 7" definition) of
/// `sorted`, which must be non-empty and ascending.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn detect_desync_regions(
    g: &WeightedGraph,
    omega: &FrequencyVector,
    policy: ThresholdPolicy,
) -> Result<DesyncReport> {
    require_undirected(g)?;
    let n = g.node_count();
    omega.check_len(n)?;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "desync detection needs at least two nodes".into(),
        ));
    }
    require_connected(g)?;
    match policy {
        ThresholdPolicy::Quantile(q) if !(q > 0.0 && q < 1.0) => {
            return Err(Error::InvalidQuantile(q))
        }
        ThresholdPolicy::Absolute(t) if !(t.is_finite() && t >= 0.0) => {
            return Err(Error::InvalidParameter(format!(
                "absolute threshold {t} must be finite and non-negative"
            )))
        }
        _ => {}
    }

    let resistance = resistance_matrix(&decompose(g)?)?;
    let threshold = match policy {
        ThresholdPolicy::Absolute(t) => t,
        ThresholdPolicy::Quantile(q) => {
            let mut values: Vec<f64> = resistance.pairs().map(|(_, _, r)| r).collect();
            values.sort_by(f64::total_cmp);
            quantile(&values, q)
        }
    };

    let w = omega.values();
    let phase_estimates: Vec<Vec<f64>> = (0..n)
        .map(|u| {
            (0..n)
                .map(|v| resistance.get(u, v) * (w[u] - w[v]).abs())
                .collect()
        })
        .collect();
    let cutoff = threshold + FLAG_TOL * threshold.abs().max(1.0);
    let flagged_pairs: Vec<FlaggedPair> = resistance
        .pairs()
        .filter(|&(_, _, r)| r > cutoff)
        .map(|(u, v, r)| FlaggedPair {
            u,
            v,
            resistance: r,
            phase_estimate: phase_estimates[u][v],
        })
        .collect();
    let mut flagged_nodes: Vec<usize> = flagged_pairs.iter().flat_map(|p| [p.u, p.v]).collect();
    flagged_nodes.sort_unstable();
    flagged_nodes.dedup();

    Ok(DesyncReport {
        policy,
        threshold,
        resistance,
        flagged_pairs,
        flagged_nodes,
        phase_estimates,
        phase_estimate_note: PHASE_ESTIMATE_NOTE.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stabilization {
    pub graph: WeightedGraph,
    /// Id of the inserted node (the old node count).
    pub stabilizer: usize,
    pub targets: Vec<usize>,
    pub weight: f64,
    pub lambda2_before: f64,
    pub lambda2_after: f64,
    pub delta_lambda2: f64,
    pub max_flagged_r_before: f64,
    pub max_flagged_r_after: f64,
    /// Change of the largest resistance over the originally flagged pairs;
    /// negative when the stabilizer helps.
    pub delta_max_r: f64,
}

/// Chooses `k` stabilizer targets: the endpoints of the highest-resistance
/// flagged pair, then greedily the flagged node farthest (in summed
/// resistance) from the targets chosen so far. Ties prefer the larger
/// resistance row-sum over flagged nodes, then the lower node id. Non-flagged
/// nodes are only used once the flagged ones run out.
pub fn stabilizer_targets(report: &DesyncReport, k: usize) -> Result<Vec<usize>> {
    let n = report.resistance.len();
    if report.is_empty() {
        return Err(Error::EmptyReport);
    }
    if k < 2 || k > n {
        return Err(Error::InvalidFanOut { k, n });
    }
    let r = &report.resistance;
    let top = report
        .flagged_pairs
        .iter()
        .fold(None::<&FlaggedPair>, |best, p| match best {
            Some(b) if p.resistance <= b.resistance => Some(b),
            _ => Some(p),
        })
        .expect("non-empty report");
    let mut targets = vec![top.u, top.v];

    let flagged_row_sum =
        |u: usize| -> f64 { report.flagged_nodes.iter().map(|&v| r.get(u, v)).sum() };
    let mut pools = [
        report.flagged_nodes.clone(),
        (0..n)
            .filter(|u| !report.flagged_nodes.contains(u))
            .collect(),
    ];
    for pool in &mut pools {
        pool.retain(|u| !targets.contains(u));
        while targets.len() < k && !pool.is_empty() {
            let score = |u: usize| -> (f64, f64) {
                (
                    targets.iter().map(|&t| r.get(u, t)).sum(),
                    flagged_row_sum(u),
                )
            };
            let (pos, _) = pool
                .iter()
                .enumerate()
                .fold(None::<(usize, (f64, f64))>, |best, (i, &u)| {
                    let s = score(u);
                    match best {
                        Some((_, b)) if s.0 < b.0 || (s.0 == b.0 && s.1 <= b.1) => best,
                        _ => Some((i, s)),
                    }
                })
                .expect("pool is non-empty");
            targets.push(pool.remove(pos));
        }
    }
    targets.sort_unstable();
    Ok(targets)
}

/// Adds one stabilizer node wired with `weight` to [`stabilizer_targets`]
/// and reports the spectral and resistance changes.
pub fn place_stabilizer(
    g: &WeightedGraph,
    report: &DesyncReport,
    k: usize,
    weight: f64,
) -> Result<Stabilization> {
    require_undirected(g)?;
    let n = g.node_count();
    if report.resistance.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: report.resistance.len(),
        });
    }
    if !(weight.is_finite() && weight > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "stabilizer weight {weight} must be positive"
        )));
    }
    let targets = stabilizer_targets(report, k)?;

    let mut grown = g.with_extra_node();
    for &t in &targets {
        grown.set_weight(n, t, weight)?;
    }
    let before = decompose(g)?;
    let after = decompose(&grown)?;
    let r_after = resistance_matrix(&after)?;
    let max_flagged_r_before = report.max_flagged_resistance().expect("non-empty report");
    let max_flagged_r_after = report
        .flagged_pairs
        .iter()
        .map(|p| r_after.get(p.u, p.v))
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(Stabilization {
        graph: grown,
        stabilizer: n,
        targets,
        weight,
        lambda2_before: before.lambda2(),
        lambda2_after: after.lambda2(),
        delta_lambda2: after.lambda2() - before.lambda2(),
        max_flagged_r_before,
        max_flagged_r_after,
        delta_max_r: max_flagged_r_after - max_flagged_r_before,
    })
}
