//! Fixed-step RK4 integration of first-order Kuramoto dynamics
//! `theta_i' = omega_i + sum_j W_ij sin(theta_j - theta_i)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FrequencyVector;
use crate::error::{Error, Result};
use crate::graph::{require_connected, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Frequency spread below which the oscillators count as locked.
    pub lock_tol: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_max: 200.0,
            lock_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub theta_final: Vec<f64>,
    /// Instantaneous frequencies at `t_max`.
    pub frequencies: Vec<f64>,
    /// `max_i |theta_i' - mean(theta')|` at `t_max`.
    pub frequency_spread: f64,
    pub locked: bool,
    /// Largest edge phase difference, wrapped to `(-pi, pi]`, in magnitude.
    pub max_edge_phase_diff: f64,
    pub steps: usize,
}

/// Maps an angle to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

struct Dynamics<'a> {
    omega: &'a [f64],
    edges: Vec<(usize, usize, f64)>,
}

impl Dynamics<'_> {
    fn rate(&self, theta: &[f64], out: &mut [f64]) {
        out.copy_from_slice(self.omega);
        for &(u, v, w) in &self.edges {
            let s = w * (theta[v] - theta[u]).sin();
            out[u] += s;
            out[v] -= s;
        }
    }
}

pub fn kuramoto_simulate(
    g: &WeightedGraph,
    omega: &FrequencyVector,
    theta0: &[f64],
    config: &SimulationConfig,
) -> Result<SimulationResult> {
    if g.is_directed() {
        return Err(Error::DirectedInput);
    }
    let n = g.node_count();
    for len in [omega.len(), theta0.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    if !(config.dt.is_finite() && config.dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt = {} must be positive",
            config.dt
        )));
    }
    if !(config.t_max.is_finite() && config.t_max > config.dt) {
        return Err(Error::InvalidParameter(format!(
            "t_max = {} must exceed dt = {}",
            config.t_max, config.dt
        )));
    }
    require_connected(g)?;

    let dynamics = Dynamics {
        omega: omega.values(),
        edges: g.edges().into_iter().map(|e| (e.u, e.v, e.w)).collect(),
    };
    let steps = (config.t_max / config.dt).round() as usize;
    let dt = config.dt;
    let mut theta = theta0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];

    for step in 0..steps {
        dynamics.rate(&theta, &mut k1);
        for i in 0..n {
            tmp[i] = theta[i] + 0.5 * dt * k1[i];
        }
        dynamics.rate(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = theta[i] + 0.5 * dt * k2[i];
        }
        dynamics.rate(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = theta[i] + dt * k3[i];
        }
        dynamics.rate(&tmp, &mut k4);
        for i in 0..n {
            theta[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState {
                time: (step + 1) as f64 * dt,
            });
        }
    }

    let mut frequencies = vec![0.0; n];
    dynamics.rate(&theta, &mut frequencies);
    let mean = frequencies.iter().sum::<f64>() / n as f64;
    let frequency_spread = frequencies
        .iter()
        .map(|f| (f - mean).abs())
        .fold(0.0, f64::max);
    let max_edge_phase_diff = dynamics
        .edges
        .iter()
        .map(|&(u, v, _)| wrap_phase(theta[u] - theta[v]).abs())
        .fold(0.0, f64::max);

    Ok(SimulationResult {
        theta_final: theta,
        frequencies,
        frequency_spread,
        locked: frequency_spread < config.lock_tol,
        max_edge_phase_diff,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;

    #[test]
    fn wrapping() {
        assert_eq!(wrap_phase(0.0), 0.0);
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_stays_put() {
        let g = families::cycle(5);
        let w = FrequencyVector::new(vec![0.0; 5]).unwrap();
        let r = kuramoto_simulate(&g, &w, &[0.0; 5], &SimulationConfig::default()).unwrap();
        assert!(r.locked);
        assert_eq!(r.max_edge_phase_diff, 0.0);
    }

    #[test]
    fn two_oscillators_lock_at_arcsin() {
        let w = FrequencyVector::new(vec![0.5, -0.5]).unwrap();
        let r = kuramoto_simulate(
            &families::path(2),
            &w,
            &[0.0, 0.0],
            &SimulationConfig::default(),
        )
        .unwrap();
        assert!(r.locked);
        assert!((r.max_edge_phase_diff - 0.5f64.asin()).abs() < 1e-6);
    }

    #[test]
    fn two_oscillators_drift_beyond_capacity() {
        let w = FrequencyVector::new(vec![1.5, -1.5]).unwrap();
        let r = kuramoto_simulate(
            &families::path(2),
            &w,
            &[0.0, 0.0],
            &SimulationConfig::default(),
        )
        .unwrap();
        assert!(!r.locked);
    }

    #[test]
    fn rejects_bad_steps() {
        let w = FrequencyVector::new(vec![0.0, 0.0]).unwrap();
        let g = families::path(2);
        let bad_dt = SimulationConfig {
            dt: 0.0,
            ..SimulationConfig::default()
        };
        assert!(kuramoto_simulate(&g, &w, &[0.0, 0.0], &bad_dt).is_err());
        let bad_t = SimulationConfig {
            t_max: 0.001,
            ..SimulationConfig::default()
        };
        assert!(kuramoto_simulate(&g, &w, &[0.0, 0.0], &bad_t).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let w = FrequencyVector::new(vec![0.0, 0.0]).unwrap();
        let g = WeightedGraph::from_edges(2, &[(0, 1, f64::MAX)], false).unwrap();
        let r = kuramoto_simulate(&g, &w, &[0.0, 1.0], &SimulationConfig::default());
        assert!(matches!(r, Err(Error::NonFiniteState { .. })));
    }
}
