//! Closed-form fixed points O, E₁, E₂, E₃ and their existence conditions.
//!
//! | point | coordinates | exists when |
//! |---|---|---|
//! | O  | (0, 0, 0) | always |
//! | E₁ | (1 − 1/μ, 0, 0) | μ > 1 |
//! | E₂ | (1/β, 1 − 1/μ − 1/β, 0) | μ > 1 and β ≥ μ/(μ−1) |
//! | E₃ | (½(1 − 1/μ − 1/λ + 1/β), 1/λ, ½(1 − 1/μ − 1/λ − 1/β)) | μ > 1, λ > μ/(μ−1), β > λμ/(λμ−λ−μ) |

use std::fmt;

use crate::core_map::{jacobian, step, ParamPoint, State3};
use crate::spectra::{eigenvalues, RootTriple};

/// Width of the band in which an existence margin counts as "on the boundary".
pub const EXISTENCE_GRACE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixedPointId {
    O,
    E1,
    E2,
    E3,
}

impl fmt::Display for FixedPointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FixedPointId::O => "O",
            FixedPointId::E1 => "E1",
            FixedPointId::E2 => "E2",
            FixedPointId::E3 => "E3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointRecord {
    pub id: FixedPointId,
    pub coords: State3,
    pub exists: bool,
    /// Smallest signed slack among the existence inequalities. Positive means
    /// strictly inside the existence region.
    pub existence_margin: f64,
    /// |margin| within [`EXISTENCE_GRACE`]: a coincidence with a neighbouring
    /// fixed point.
    pub on_boundary: bool,
    pub eigen: RootTriple,
}

pub fn e1_coords(p: &ParamPoint) -> State3 {
    State3::new(1.0 - 1.0 / p.mu, 0.0, 0.0)
}

pub fn e2_coords(p: &ParamPoint) -> State3 {
    State3::new(1.0 / p.beta, 1.0 - 1.0 / p.mu - 1.0 / p.beta, 0.0)
}

pub fn e3_coords(p: &ParamPoint) -> State3 {
    let s = 1.0 - 1.0 / p.mu - 1.0 / p.lambda;
    State3::new(0.5 * (s + 1.0 / p.beta), 1.0 / p.lambda, 0.5 * (s - 1.0 / p.beta))
}

/// β at which E₁ and E₂ meet: μ/(μ−1).
pub fn e1_e2_threshold(mu: f64) -> f64 {
    mu / (mu - 1.0)
}

/// β at which E₂ and E₃ meet: λμ/(λμ−λ−μ).
pub fn e2_e3_threshold(lambda: f64, mu: f64) -> f64 {
    lambda * mu / (lambda * mu - lambda - mu)
}

fn margin(id: FixedPointId, p: &ParamPoint) -> f64 {
    match id {
        FixedPointId::O => f64::INFINITY,
        FixedPointId::E1 => p.mu - 1.0,
        FixedPointId::E2 => {
            let m = p.mu - 1.0;
            if m <= 0.0 {
                m
            } else {
                m.min(p.beta - e1_e2_threshold(p.mu))
            }
        }
        FixedPointId::E3 => {
            let m = p.mu - 1.0;
            if m <= 0.0 {
                return m;
            }
            let m = m.min(p.lambda - e1_e2_threshold(p.mu));
            if m <= 0.0 {
                return m;
            }
            m.min(p.beta - e2_e3_threshold(p.lambda, p.mu))
        }
    }
}

fn exists(id: FixedPointId, margin: f64) -> bool {
    match id {
        FixedPointId::O => true,
        // β ≥ μ/(μ−1) is the only non-strict condition; μ > 1 stays strict.
        FixedPointId::E2 => margin >= -EXISTENCE_GRACE,
        _ => margin > 0.0,
    }
}

pub fn coords(id: FixedPointId, p: &ParamPoint) -> State3 {
    match id {
        FixedPointId::O => State3::default(),
        FixedPointId::E1 => e1_coords(p),
        FixedPointId::E2 => e2_coords(p),
        FixedPointId::E3 => e3_coords(p),
    }
}

pub fn record(id: FixedPointId, p: &ParamPoint) -> FixedPointRecord {
    let c = coords(id, p);
    let m = margin(id, p);
    let e2_mu_ok = id != FixedPointId::E2 || p.mu > 1.0;
    FixedPointRecord {
        id,
        coords: c,
        exists: exists(id, m) && e2_mu_ok,
        existence_margin: m,
        on_boundary: m.abs() <= EXISTENCE_GRACE,
        eigen: eigenvalues(&jacobian(c, p)),
    }
}

/// All four candidates in the order O, E₁, E₂, E₃, with existence flags set.
pub fn fixed_points(p: &ParamPoint) -> Vec<FixedPointRecord> {
    [FixedPointId::O, FixedPointId::E1, FixedPointId::E2, FixedPointId::E3]
        .into_iter()
        .map(|id| record(id, p))
        .collect()
}

/// ‖F(s) − s‖∞.
pub fn residual(s: State3, p: &ParamPoint) -> f64 {
    step(s, p).dist_inf(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_origin_below_unit_mu() {
        let p = ParamPoint::new(2.0, 0.5, 3.0).unwrap();
        let fps = fixed_points(&p);
        let existing: Vec<_> = fps.iter().filter(|r| r.exists).map(|r| r.id).collect();
        assert_eq!(existing, vec![FixedPointId::O]);
    }

    #[test]
    fn chaos_parameters_e2() {
        let p = ParamPoint::new(9.14, 2.50, 3.36).unwrap();
        let e2 = record(FixedPointId::E2, &p);
        assert!(e2.exists);
        assert!((e2.coords.x - 0.2976190476).abs() < 1e-9);
        assert!((e2.coords.y - 0.3023809524).abs() < 1e-9);
        assert_eq!(e2.coords.z, 0.0);
        assert!(residual(e2.coords, &p) < 1e-12);
    }

    #[test]
    fn e3_at_integer_parameters() {
        let p = ParamPoint::new(4.0, 3.0, 4.0).unwrap();
        let e3 = record(FixedPointId::E3, &p);
        assert!(e3.exists);
        assert!(e3.coords.dist_inf(State3::new(1.0 / 3.0, 0.25, 1.0 / 12.0)) < 1e-15);
        assert!(residual(e3.coords, &p) < 1e-15);
    }

    #[test]
    fn perturbed_point_has_positive_residual() {
        let p = ParamPoint::new(9.14, 2.50, 3.36).unwrap();
        let mut s = e2_coords(&p);
        s.x += 1e-3;
        assert!(residual(s, &p) > 1e-6);
        assert_eq!(residual(State3::default(), &p), 0.0);
    }

    #[test]
    fn e2_exists_on_its_own_boundary() {
        let mu = 3.0;
        let p = ParamPoint::new(2.0, mu, e1_e2_threshold(mu)).unwrap();
        let e2 = record(FixedPointId::E2, &p);
        assert!(e2.exists);
        assert!(e2.on_boundary);
        assert!(e2.coords.dist_inf(e1_coords(&p)) < 1e-12);
    }

    #[test]
    fn e3_meets_e2_on_its_boundary() {
        let (lambda, mu) = (4.0, 3.0);
        let p = ParamPoint::new(lambda, mu, e2_e3_threshold(lambda, mu)).unwrap();
        let e3 = record(FixedPointId::E3, &p);
        assert!(e3.on_boundary);
        assert!(e3.coords.dist_inf(e2_coords(&p)) < 1e-12);
    }
}
