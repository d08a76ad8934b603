//! Laplacians, symmetric eigendecomposition and effective resistance.
//!
//! Effective resistance has a single canonical definition here: the
//! quadratic form `(e_u - e_v)^T L^+ (e_u - e_v)`. It is evaluated either
//! through the pseudoinverse ([`effective_resistance_pinv`]) or through the
//! equivalent spectral sum `sum_{i>=2} (f_u^(i) - f_v^(i))^2 / lambda_i`
//! ([`effective_resistance`]); the two agree to rounding.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::graph::WeightedGraph;

/// Eigenvalues at or below this are treated as zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;
/// Maximum tolerated `|L - L^T|` entry accepted by [`eig_sym`].
pub const SYMMETRY_TOL: f64 = 1e-12;
/// `lambda_3 - lambda_2` at or below this marks a degenerate Fiedler value.
pub const DEGENERACY_TOL: f64 = 1e-9;
const SIGN_TOL: f64 = 1e-12;
const MAX_EIG_ITERATIONS: usize = 100_000;

/// `L = D - W` for an undirected graph.
pub fn laplacian(g: &WeightedGraph) -> Result<DMatrix<f64>> {
    if g.is_directed() {
        return Err(Error::DirectedInput);
    }
    let w = g.weights();
    let n = g.node_count();
    let mut l = -w.clone();
    for i in 0..n {
        l[(i, i)] = w.row(i).sum();
    }
    Ok(l)
}

/// Full eigendecomposition of a symmetric Laplacian.
///
/// Eigenvalues ascend and column `i` of `eigenvectors` is the unit
/// eigenvector for `eigenvalues[i]`. Each column is sign-normalised so that
/// its first component exceeding `1e-12` in magnitude is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    /// Algebraic connectivity.
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn fiedler(&self) -> Vec<f64> {
        self.eigenvector(1)
    }

    /// True when `lambda_3 - lambda_2 <= 1e-9`, in which case the Fiedler
    /// vector is only one choice from a higher-dimensional eigenspace.
    pub fn degenerate_lambda2(&self) -> bool {
        self.len() >= 3 && self.eigenvalues[2] - self.eigenvalues[1] <= DEGENERACY_TOL
    }

    /// Number of eigenvalues at or below [`ZERO_EIGENVALUE_TOL`], i.e. the
    /// number of connected components.
    pub fn zero_eigenvalue_count(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&l| l <= ZERO_EIGENVALUE_TOL)
            .count()
    }

    pub fn require_connected(&self) -> Result<()> {
        match self.zero_eigenvalue_count() {
            1 => Ok(()),
            components => Err(Error::DisconnectedGraph { components }),
        }
    }

    fn check_node(&self, node: usize) -> Result<()> {
        let n = self.len();
        if node >= n {
            return Err(Error::InvalidNode { node, n });
        }
        Ok(())
    }
}

/// Decomposes a symmetric matrix; see [`SpectralDecomposition`].
pub fn eig_sym(l: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let n = l.nrows();
    if n < 2 || l.ncols() != n {
        return Err(Error::InvalidParameter(format!(
            "eigendecomposition needs a square matrix with n >= 2, got {}x{}",
            l.nrows(),
            l.ncols()
        )));
    }
    if l.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "matrix has non-finite entries".into(),
        ));
    }
    let max_asymmetry = (l - l.transpose()).amax();
    if max_asymmetry > SYMMETRY_TOL {
        return Err(Error::NonSymmetric { max_asymmetry });
    }

    let eig = SymmetricEigen::try_new(l.clone(), f64::EPSILON, MAX_EIG_ITERATIONS).ok_or(
        Error::ConvergenceFailure {
            max_iterations: MAX_EIG_ITERATIONS,
        },
    )?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });

    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        let sign = col
            .iter()
            .find(|x| x.abs() > SIGN_TOL)
            .map_or(1.0, |x| x.signum());
        if sign < 0.0 {
            col.neg_mut();
        }
        eigenvectors.set_column(dst, &col);
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Laplacian eigendecomposition of an undirected graph with at least two nodes.
pub fn decompose(g: &WeightedGraph) -> Result<SpectralDecomposition> {
    eig_sym(&laplacian(g)?)
}

/// `L^+ = sum_{i>=2} f^(i) f^(i)^T / lambda_i` for a connected graph.
pub fn pseudoinverse(decomp: &SpectralDecomposition) -> Result<DMatrix<f64>> {
    decomp.require_connected()?;
    let n = decomp.len();
    let v = &decomp.eigenvectors;
    let mut scaled = v.clone();
    scaled.set_column(0, &DVector::zeros(n));
    for i in 1..n {
        let inv = 1.0 / decomp.eigenvalues[i];
        scaled.column_mut(i).scale_mut(inv);
    }
    let pinv = &scaled * v.transpose();
    // Symmetrize away rounding so downstream quadratic forms are exact mirrors.
    Ok((&pinv + pinv.transpose()) * 0.5)
}

/// Spectral-sum effective resistance between `u` and `v`.
pub fn effective_resistance(decomp: &SpectralDecomposition, u: usize, v: usize) -> Result<f64> {
    decomp.check_node(u)?;
    decomp.check_node(v)?;
    decomp.require_connected()?;
    Ok(spectral_sum(decomp, u, v))
}

fn spectral_sum(decomp: &SpectralDecomposition, u: usize, v: usize) -> f64 {
    if u == v {
        return 0.0;
    }
    let vecs = &decomp.eigenvectors;
    (1..decomp.len())
        .map(|i| {
            let d = vecs[(u, i)] - vecs[(v, i)];
            d * d / decomp.eigenvalues[i]
        })
        .sum()
}

/// Effective resistance as the quadratic form `L^+_uu + L^+_vv - 2 L^+_uv`.
pub fn effective_resistance_pinv(pinv: &DMatrix<f64>, u: usize, v: usize) -> Result<f64> {
    let n = pinv.nrows();
    for node in [u, v] {
        if node >= n {
            return Err(Error::InvalidNode { node, n });
        }
    }
    if u == v {
        return Ok(0.0);
    }
    Ok(pinv[(u, u)] + pinv[(v, v)] - pinv[(u, v)] - pinv[(v, u)])
}

/// All-pairs effective resistance. Symmetric with a zero diagonal; a metric
/// on the node set of a connected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceMatrix {
    values: DMatrix<f64>,
}

impl ResistanceMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values[(u, v)]
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `R_uv` for every unordered pair `u < v`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |u| ((u + 1)..n).map(move |v| (u, v, self.values[(u, v)])))
    }

    pub fn row_sum(&self, u: usize) -> f64 {
        self.values.row(u).sum()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// One row per node, comma-separated, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.values.row_iter() {
            let cells: Vec<String> = row.iter().map(|&x| sig12(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(
                "resistance rows must form a square matrix".into(),
            ));
        }
        let values = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Ok(Self { values })
    }
}

impl Serialize for ResistanceMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ResistanceMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        ResistanceMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

pub fn resistance_matrix(decomp: &SpectralDecomposition) -> Result<ResistanceMatrix> {
    decomp.require_connected()?;
    let n = decomp.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|u| ((u + 1)..n).map(|v| spectral_sum(decomp, u, v)).collect())
        .collect();
    let mut values = DMatrix::zeros(n, n);
    for (u, row) in upper.into_iter().enumerate() {
        for (k, r) in row.into_iter().enumerate() {
            let v = u + 1 + k;
            values[(u, v)] = r;
            values[(v, u)] = r;
        }
    }
    Ok(ResistanceMatrix { values })
}

/// Sum of `R_uv` over ordered pairs, so each unordered pair counts twice.
pub fn total_effective_resistance(rm: &ResistanceMatrix) -> f64 {
    2.0 * rm.pairs().map(|(_, _, r)| r).sum::<f64>()
}

/// Convenience: decomposition, connectivity check and total resistance.
pub fn graph_total_resistance(g: &WeightedGraph) -> Result<f64> {
    let decomp = decompose(g)?;
    Ok(total_effective_resistance(&resistance_matrix(&decomp)?))
}
