//! Orbit-level numerics: Lyapunov spectra, parameter sweeps and invariant-circle
//! statistics.

use std::f64::consts::PI;

use nalgebra::{SymmetricEigen, Vector3};
use rayon::prelude::*;
use thiserror::Error;

use crate::core_map::{iterate, jacobian, step, Matrix3, ParamPoint, State3, DIVERGENCE_BOUND};

/// Per-step floor on log stretch factors. Structural zero multipliers would
/// otherwise give −∞.
pub const LOG_FLOOR: f64 = -30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("orbit diverged at iteration {0}")]
    Diverged(usize),
    #[error("need at least {need} iterations, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("not a circle: radius spread {ratio} of the mean radius")]
    NotACircle { ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSpectrum {
    /// Descending.
    pub exponents: [f64; 3],
    pub n_iterations: usize,
    pub n_transient: usize,
    /// The running largest exponent moved less than 1e−3 over the last 10%.
    pub converged: bool,
    /// Which exponents hit [`LOG_FLOOR`] on average.
    pub floored: [bool; 3],
}

pub fn lyapunov_spectrum(
    p: &ParamPoint,
    s0: State3,
    n: usize,
    transient: usize,
) -> Result<LyapunovSpectrum, DynamicsError> {
    if n < 1000 {
        return Err(DynamicsError::TooShort { need: 1000, got: n });
    }
    let mut s = s0;
    for i in 0..transient {
        s = step(s, p);
        if !s.is_finite() || s.max_abs() > DIVERGENCE_BOUND {
            return Err(DynamicsError::Diverged(i + 1));
        }
    }
    let mut q = Matrix3::identity();
    let mut sums = [0.0f64; 3];
    let tail_start = n - n / 10;
    let mut tail_lo = f64::INFINITY;
    let mut tail_hi = f64::NEG_INFINITY;
    for i in 0..n {
        let qr = (jacobian(s, p) * q).qr();
        let r = qr.r();
        q = qr.q();
        // Keep the frame orientation fixed so diagonal signs do not flip.
        for k in 0..3 {
            if r[(k, k)] < 0.0 {
                let flipped = -q.column(k);
                q.set_column(k, &flipped);
            }
            sums[k] += r[(k, k)].abs().ln().max(LOG_FLOOR);
        }
        s = step(s, p);
        if !s.is_finite() || s.max_abs() > DIVERGENCE_BOUND {
            return Err(DynamicsError::Diverged(transient + i + 1));
        }
        if i >= tail_start {
            let running = sums.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) / (i + 1) as f64;
            tail_lo = tail_lo.min(running);
            tail_hi = tail_hi.max(running);
        }
    }
    let mut exponents = sums.map(|v| v / n as f64);
    exponents.sort_by(|a, b| b.total_cmp(a));
    Ok(LyapunovSpectrum {
        exponents,
        n_iterations: n,
        n_transient: transient,
        converged: tail_hi - tail_lo < 1e-3,
        floored: exponents.map(|e| e <= LOG_FLOOR + 1e-9),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Lambda,
    Mu,
    Beta,
}

impl Axis {
    pub fn with(self, p: &ParamPoint, v: f64) -> ParamPoint {
        let mut q = *p;
        match self {
            Axis::Lambda => q.lambda = v,
            Axis::Mu => q.mu = v,
            Axis::Beta => q.beta = v,
        }
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub transient: usize,
    /// Iterations for the largest Lyapunov exponent of each row.
    pub lyapunov_iterations: usize,
    /// Start each grid point from the last state of the previous one.
    pub warm_start: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            transient: 20_000,
            lyapunov_iterations: 2_000,
            warm_start: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    /// The last `samples_k` states after the transient.
    pub states: Vec<State3>,
    /// NaN when the orbit diverged.
    pub lyap_max: f64,
    pub diverged: bool,
}

fn sweep_row(p: &ParamPoint, param: f64, s0: State3, k: usize, cfg: &SweepConfig) -> SweepRow {
    let orbit = iterate(s0, p, k, cfg.transient);
    if orbit.is_diverged() {
        return SweepRow {
            param,
            states: orbit.states,
            lyap_max: f64::NAN,
            diverged: true,
        };
    }
    let last = orbit.states.last().copied().unwrap_or(s0);
    let lyap_max = lyapunov_spectrum(p, last, cfg.lyapunov_iterations.max(1000), 0)
        .map(|l| l.exponents[0])
        .unwrap_or(f64::NAN);
    SweepRow {
        param,
        states: orbit.states,
        lyap_max,
        diverged: false,
    }
}

/// One row per grid value on [from, to], in grid order. A degenerate range
/// gives a single row.
pub fn bifurcation_sweep(
    base: &ParamPoint,
    axis: Axis,
    range: (f64, f64),
    grid_n: usize,
    s0: State3,
    samples_k: usize,
    cfg: &SweepConfig,
) -> Vec<SweepRow> {
    let (a, b) = range;
    let n = if a == b { 1 } else { grid_n.max(2) };
    let value = |i: usize| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
    if cfg.warm_start {
        let mut s = s0;
        (0..n)
            .map(|i| {
                let v = value(i);
                let row = sweep_row(&axis.with(base, v), v, s, samples_k, cfg);
                if let Some(last) = row.states.last().filter(|_| !row.diverged) {
                    s = *last;
                }
                row
            })
            .collect()
    } else {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let v = value(i);
                sweep_row(&axis.with(base, v), v, s0, samples_k, cfg)
            })
            .collect()
    }
}

/// Number of clusters among `values` when points closer than `tol` merge.
pub fn distinct_values(values: &[f64], tol: f64) -> usize {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last = f64::NEG_INFINITY;
    for x in v {
        if x - last > tol {
            count += 1;
        }
        last = x;
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleMetrics {
    pub centroid: State3,
    pub mean_radius: f64,
    pub radius_std: f64,
    pub rotation_number: f64,
}

/// Radial statistics in the plane of the two leading principal directions.
pub fn circle_metrics(states: &[State3]) -> Result<CircleMetrics, DynamicsError> {
    if states.len() < 3 {
        return Err(DynamicsError::TooShort {
            need: 3,
            got: states.len(),
        });
    }
    let n = states.len() as f64;
    let c = states
        .iter()
        .fold(Vector3::zeros(), |acc, s| acc + s.to_vector())
        / n;
    let cov = states.iter().fold(Matrix3::zeros(), |acc, s| {
        let d = s.to_vector() - c;
        acc + d * d.transpose()
    }) / n;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let e1 = eig.eigenvectors.column(order[0]).into_owned();
    let e2 = eig.eigenvectors.column(order[1]).into_owned();

    let plane: Vec<(f64, f64)> = states
        .iter()
        .map(|s| {
            let d = s.to_vector() - c;
            (d.dot(&e1), d.dot(&e2))
        })
        .collect();
    let radii: Vec<f64> = plane.iter().map(|(u, v)| u.hypot(*v)).collect();
    let mean_radius = radii.iter().sum::<f64>() / n;
    let radius_std = (radii.iter().map(|r| (r - mean_radius).powi(2)).sum::<f64>() / n).sqrt();
    let ratio = radius_std / mean_radius;
    if !(mean_radius > 1e-9 && ratio <= 0.2) {
        return Err(DynamicsError::NotACircle { ratio });
    }

    let angles: Vec<f64> = plane.iter().map(|(u, v)| v.atan2(*u)).collect();
    let signed: f64 = angles
        .windows(2)
        .map(|w| (w[1] - w[0] + PI).rem_euclid(2.0 * PI) - PI)
        .sum();
    let orient = if signed < 0.0 { -1.0 } else { 1.0 };
    let advance: f64 = angles
        .windows(2)
        .map(|w| (orient * (w[1] - w[0])).rem_euclid(2.0 * PI))
        .sum();
    Ok(CircleMetrics {
        centroid: State3::from_vector(&c),
        mean_radius,
        radius_std,
        rotation_number: advance / (2.0 * PI * (n - 1.0)),
    })
}
