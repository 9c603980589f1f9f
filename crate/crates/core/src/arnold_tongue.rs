//! Weak-resonance Arnold tongues 𝒜_{n/m} of the E₂ Neimark-Sacker circle and
//! the period-m orbit pairs living inside them.
//!
//! The resonance point solves 2cos(2πn/m) = trace/√det of the E₂ plane block on
//! μ = β/(β−2). The tongue boundary is
//!
//! χ₂ = (ρ̃₂/ρ̌₃)χ₁ ± |ς|/|ρ̌₃|^{(m−2)/2} χ₁^{(m−2)/2},
//!
//! with χ₁ = |t₁| − 1 and χ₂ = arg t₁ − 2πn/m.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::codim1::{e2_lower_multiplier, newton_periodic};
use crate::core_map::{jacobian_n, step, step_n, ParamPoint, State3};
use crate::fixed_points::e2_coords;
use crate::normal_form::{e2_plane_complex, normalize, resonant};
use crate::spectra::{eigenvalues, RootTriple};

/// Two period-m points closer than this belong to the same orbit.
const SAME_POINT_TOL: f64 = 1e-7;
/// A candidate with F^k(s) this close to s for a proper divisor k is rejected.
const LOWER_PERIOD_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TongueError {
    #[error("m = {0} is a strong resonance; weak tongues need m >= 5")]
    StrongResonance(usize),
    #[error("{n}/{m} is not a reduced fraction in (0, 1)")]
    BadFraction { n: usize, m: usize },
    #[error("multipliers are real (discriminant {0}); the rotation angle is undefined")]
    ComplexAngleUndefined(f64),
    #[error("μ(β−2)/β = {0} < 1: inside the Neimark-Sacker circle")]
    InsideCircle(f64),
    #[error("no period-{m} orbit found from {seeds} seeds")]
    NoOrbitFound { m: usize, seeds: usize },
    #[error("only one period-{m} orbit found")]
    OnlyOneOrbitFound { m: usize, orbit: Box<PeriodMOrbit> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TongueSpec {
    pub n: usize,
    pub m: usize,
    /// (μ*, β*).
    pub critical: (f64, f64),
    /// ρ̌₃(0) = −μ*³/8.
    pub rho3_0: f64,
    /// ρ̃₂(0) in closed form.
    pub rho2_0: f64,
    /// |ς(0)|, the modulus of the z̄^{m−1} coefficient.
    pub sigma0_abs: f64,
    pub sigma0: Complex64,
    /// Re and Im of ξ̄₀ρ₂₁ from the normalized map, for comparison.
    pub rho3_pipeline: f64,
    pub rho2_pipeline: f64,
}

impl TongueSpec {
    /// |T₊ − T₋|/2 at distance χ₁ from the circle.
    pub fn half_width(&self, chi1: f64) -> f64 {
        let e = (self.m as f64 - 2.0) / 2.0;
        self.sigma0_abs / self.rho3_0.abs().powf(e) * chi1.powf(e)
    }

    /// Slope ρ̃₂(0)/ρ̌₃(0) of the tongue centre line.
    pub fn centre_slope(&self) -> f64 {
        self.rho2_0 / self.rho3_0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TongueMembership {
    pub chi1: f64,
    pub chi2: f64,
    pub t_minus: f64,
    pub t_plus: f64,
    /// T₋ < χ₂ < T₊ with χ₂ measured from the upper-half arctangent.
    pub inside: bool,
    /// The same test with χ₂ measured on the multiplier the normal form was
    /// built from (arg −2πn/m), which flips its sign.
    pub inside_consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMOrbit {
    pub points: Vec<State3>,
    pub multipliers: RootTriple,
    /// Multipliers of D(F^m) restricted to the z = 0 plane that carries the circle.
    pub plane_multipliers: [Complex64; 2],
    /// The product of λy along the orbit, normal to the plane.
    pub transverse_multiplier: f64,
    pub residual: f64,
}

impl PeriodMOrbit {
    pub fn attracting_on_circle(&self) -> bool {
        self.plane_multipliers.iter().all(|t| t.norm() < 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMOrbitPair {
    pub stable_orbit: PeriodMOrbit,
    pub saddle_orbit: PeriodMOrbit,
}

fn check_fraction(n: usize, m: usize) -> Result<(), TongueError> {
    if m <= 4 {
        return Err(TongueError::StrongResonance(m));
    }
    if n == 0 || n >= m || n.gcd(&m) != 1 {
        return Err(TongueError::BadFraction { n, m });
    }
    Ok(())
}

/// (μ*, β*) where the E₂ multiplier t₁ equals exp(2πin/m).
pub fn weak_resonance_point(n: usize, m: usize) -> Result<(f64, f64), TongueError> {
    check_fraction(n, m)?;
    let c = (2.0 * PI * n as f64 / m as f64).cos();
    let beta = (4.0 * c - 5.0) / (2.0 * (c - 1.0));
    Ok((beta / (beta - 2.0), beta))
}

/// The E₂ multiplier whose argument is measured against 2πn/m.
pub fn t1(mu: f64, beta: f64, n: usize, m: usize) -> Complex64 {
    let lower = e2_lower_multiplier(mu, beta);
    if 2 * n < m {
        lower.conj()
    } else {
        lower
    }
}

pub fn rho2_closed_form(beta: f64) -> f64 {
    let b3 = beta.powi(3);
    b3 * (2.0 * b3 - 8.0 * beta * beta + 3.0 * beta + 11.0)
        / (8.0 * (3.0 * beta - 7.0) * (4.0 * beta - 9.0).sqrt() * (beta - 2.0).powi(3))
}

pub fn tongue_coeffs(n: usize, m: usize) -> Result<TongueSpec, TongueError> {
    let (mu, beta) = weak_resonance_point(n, m)?;
    let xi = e2_lower_multiplier(mu, beta);
    let z = e2_plane_complex(mu, beta, xi, m - 1);
    let g = normalize(&z, xi, m - 1, resonant(Some(m)));
    let r = xi.conj() * g.get(2, 1);
    let sigma0 = g.get(0, m - 1);
    Ok(TongueSpec {
        n,
        m,
        critical: (mu, beta),
        rho3_0: -mu.powi(3) / 8.0,
        rho2_0: rho2_closed_form(beta),
        sigma0_abs: sigma0.norm(),
        sigma0,
        rho3_pipeline: r.re,
        rho2_pipeline: r.im,
    })
}

/// Evaluates χ₁, χ₂ and the tongue edges T± at (μ, β).
pub fn tongue_membership(
    spec: &TongueSpec,
    mu: f64,
    beta: f64,
) -> Result<TongueMembership, TongueError> {
    let r2 = mu * (beta - 2.0) / beta;
    if r2 < 1.0 {
        return Err(TongueError::InsideCircle(r2));
    }
    let disc = 4.0 * beta * beta * mu - 4.0 * beta * beta - 4.0 * beta * mu - mu * mu;
    if disc < 0.0 {
        return Err(TongueError::ComplexAngleUndefined(disc));
    }
    let upper = disc.sqrt().atan2(2.0 * beta - mu);
    let target = 2.0 * PI * spec.n as f64 / spec.m as f64;
    let angle = if 2 * spec.n < spec.m { upper } else { 2.0 * PI - upper };
    let chi1 = r2.sqrt() - 1.0;
    let chi2 = angle - target;
    let centre = spec.centre_slope() * chi1;
    let hw = spec.half_width(chi1);
    let (t_minus, t_plus) = (centre - hw, centre + hw);
    Ok(TongueMembership {
        chi1,
        chi2,
        t_minus,
        t_plus,
        inside: t_minus < chi2 && chi2 < t_plus,
        inside_consistent: t_minus < -chi2 && -chi2 < t_plus,
    })
}

/// 8m seeds on the in-plane invariant circle, spaced evenly in phase about E₂.
///
/// Once the circle locks, a long orbit only visits the attracting cycle, so
/// the radius at each seed phase is interpolated between the sampled points.
pub fn circle_seeds(p: &ParamPoint, m: usize) -> Vec<State3> {
    let e2 = e2_coords(p);
    let mut s = State3::new(e2.x + 1e-2, e2.y, 0.0);
    for _ in 0..20_000 {
        s = step(s, p);
    }
    let mut polar: Vec<(f64, f64)> = (0..4000)
        .map(|_| {
            s = step(s, p);
            let (dx, dy) = (s.x - e2.x, s.y - e2.y);
            (dy.atan2(dx), dx.hypot(dy))
        })
        .collect();
    polar.sort_by(|a, b| a.0.total_cmp(&b.0));
    polar.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);

    let count = 8 * m;
    let last = polar.len() - 1;
    (0..count)
        .map(|k| {
            let phase = -PI + 2.0 * PI * (k as f64 + 0.5) / count as f64;
            let i = polar.partition_point(|q| q.0 < phase);
            let (a, b) = match i {
                0 => ((polar[last].0 - 2.0 * PI, polar[last].1), polar[0]),
                i if i > last => (polar[last], (polar[0].0 + 2.0 * PI, polar[0].1)),
                i => (polar[i - 1], polar[i]),
            };
            let w = if b.0 > a.0 { (phase - a.0) / (b.0 - a.0) } else { 0.0 };
            let r = a.1 + w * (b.1 - a.1);
            State3::new(e2.x + r * phase.cos(), e2.y + r * phase.sin(), 0.0)
        })
        .collect()
}

fn has_lower_period(s: State3, p: &ParamPoint, m: usize) -> bool {
    (1..m)
        .filter(|k| m.is_multiple_of(*k))
        .any(|k| step_n(s, p, k).dist_inf(s) <= LOWER_PERIOD_TOL)
}

fn build_orbit(s: State3, p: &ParamPoint, m: usize) -> PeriodMOrbit {
    let mut points = Vec::with_capacity(m);
    let mut cur = s;
    for _ in 0..m {
        points.push(cur);
        cur = step(cur, p);
    }
    let (end, j) = jacobian_n(s, p, m);
    let tr = j[(0, 0)] + j[(1, 1)];
    let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
    let root = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    let half = Complex64::new(tr / 2.0, 0.0);
    PeriodMOrbit {
        transverse_multiplier: points.iter().map(|q| p.lambda * q.y).product(),
        points,
        multipliers: eigenvalues(&j),
        plane_multipliers: [half + root, half - root],
        residual: end.dist_inf(s),
    }
}

fn phase_about(e2: State3, s: &State3) -> f64 {
    (s.y - e2.y).atan2(s.x - e2.x)
}

/// Newton on F^m from every seed, merged into distinct orbits.
///
/// Orbits are stored starting from their point of smallest phase about E₂ and
/// ordered by that phase, so the result does not depend on seed order.
pub fn find_period_m_orbits(
    p: &ParamPoint,
    m: usize,
    seeds: &[State3],
) -> Result<PeriodMOrbitPair, TongueError> {
    let e2 = e2_coords(p);
    let hits: Vec<State3> = seeds
        .par_iter()
        .filter_map(|&g| newton_periodic(p, g, m))
        .filter(|&s| !has_lower_period(s, p, m))
        .collect();

    let mut orbits: Vec<PeriodMOrbit> = Vec::new();
    for s in hits {
        let known = orbits
            .iter()
            .any(|o| o.points.iter().any(|q| q.dist_inf(s) <= SAME_POINT_TOL));
        if known {
            continue;
        }
        let o = build_orbit(s, p, m);
        let start = o
            .points
            .iter()
            .min_by(|a, b| phase_about(e2, a).total_cmp(&phase_about(e2, b)))
            .copied()
            .unwrap_or(s);
        orbits.push(build_orbit(start, p, m));
    }
    orbits.sort_by(|a, b| phase_about(e2, &a.points[0]).total_cmp(&phase_about(e2, &b.points[0])));

    let seeds_used = seeds.len();
    let stable = orbits.iter().position(|o| o.attracting_on_circle());
    let saddle = orbits.iter().position(|o| !o.attracting_on_circle());
    match (stable, saddle) {
        (Some(i), Some(j)) => Ok(PeriodMOrbitPair {
            stable_orbit: orbits[i].clone(),
            saddle_orbit: orbits[j].clone(),
        }),
        _ if orbits.is_empty() => Err(TongueError::NoOrbitFound { m, seeds: seeds_used }),
        _ => Err(TongueError::OnlyOneOrbitFound {
            m,
            orbit: Box::new(orbits.swap_remove(0)),
        }),
    }
}
