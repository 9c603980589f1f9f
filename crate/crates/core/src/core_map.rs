//! The map F(x, y, z) = (μx(1−x−y−z), βy(x−z), λyz), its Jacobian and orbit iteration.

use nalgebra::{Matrix3 as NaMatrix3, Vector3};
use thiserror::Error;

pub type Matrix3 = NaMatrix3<f64>;

/// Any coordinate beyond this magnitude marks an orbit as diverged.
pub const DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("parameter {name} must be finite and strictly positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
}

/// Growth rates (λ, μ, β) of the top predator, the prey and the predator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub lambda: f64,
    pub mu: f64,
    pub beta: f64,
}

impl ParamPoint {
    pub fn new(lambda: f64, mu: f64, beta: f64) -> Result<Self, ParamError> {
        for (name, value) in [("lambda", lambda), ("mu", mu), ("beta", beta)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ParamError::NotPositive { name, value });
            }
        }
        Ok(Self { lambda, mu, beta })
    }

    /// Builds a point without validation. Useful in inner loops where the
    /// caller already knows the triple is positive.
    pub const fn new_unchecked(lambda: f64, mu: f64, beta: f64) -> Self {
        Self { lambda, mu, beta }
    }
}

/// Population densities (prey x, predator y, top predator z).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl State3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Sup-norm distance.
    pub fn dist_inf(self, other: State3) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    /// Membership in the closed simplex x, y, z ≥ 0, x + y + z ≤ 1.
    pub fn in_simplex(self) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.z >= 0.0 && self.x + self.y + self.z <= 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSeries {
    pub states: Vec<State3>,
    pub transient_skipped: usize,
    /// Step index (counting from the initial state, transient included) at
    /// which the orbit left the divergence bound.
    pub diverged: Option<usize>,
}

impl OrbitSeries {
    pub fn is_diverged(&self) -> bool {
        self.diverged.is_some()
    }
}

#[inline]
pub fn step(s: State3, p: &ParamPoint) -> State3 {
    State3 {
        x: p.mu * s.x * (1.0 - s.x - s.y - s.z),
        y: p.beta * s.y * (s.x - s.z),
        z: p.lambda * s.y * s.z,
    }
}

#[inline]
pub fn jacobian(s: State3, p: &ParamPoint) -> Matrix3 {
    let (x, y, z) = (s.x, s.y, s.z);
    Matrix3::new(
        p.mu * (1.0 - 2.0 * x - y - z),
        -p.mu * x,
        -p.mu * x,
        p.beta * y,
        p.beta * (x - z),
        -p.beta * y,
        0.0,
        p.lambda * z,
        p.lambda * y,
    )
}

/// k-fold composition of `step`.
pub fn step_n(mut s: State3, p: &ParamPoint, k: usize) -> State3 {
    for _ in 0..k {
        s = step(s, p);
    }
    s
}

/// Jacobian of the k-fold composition at `s`, together with F^k(s).
pub fn jacobian_n(s: State3, p: &ParamPoint, k: usize) -> (State3, Matrix3) {
    let mut acc = Matrix3::identity();
    let mut cur = s;
    for _ in 0..k {
        acc = jacobian(cur, p) * acc;
        cur = step(cur, p);
    }
    (cur, acc)
}

fn breaches(s: State3) -> bool {
    !s.is_finite() || s.max_abs() > DIVERGENCE_BOUND
}

/// Runs `transient` unrecorded steps, then records `n` states.
pub fn iterate(s0: State3, p: &ParamPoint, n: usize, transient: usize) -> OrbitSeries {
    let mut s = s0;
    for i in 0..transient {
        s = step(s, p);
        if breaches(s) {
            return OrbitSeries {
                states: Vec::new(),
                transient_skipped: i + 1,
                diverged: Some(i + 1),
            };
        }
    }
    let mut states = Vec::with_capacity(n);
    for i in 0..n {
        s = step(s, p);
        if breaches(s) {
            return OrbitSeries {
                states,
                transient_skipped: transient,
                diverged: Some(transient + i + 1),
            };
        }
        states.push(s);
    }
    OrbitSeries {
        states,
        transient_skipped: transient,
        diverged: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_fixed() {
        let p = ParamPoint::new(3.0, 2.0, 5.0).unwrap();
        assert_eq!(step(State3::default(), &p), State3::default());
    }

    #[test]
    fn hand_evaluated_step() {
        let p = ParamPoint::new(1.0, 2.0, 3.0).unwrap();
        let s = step(State3::new(0.5, 0.2, 0.1), &p);
        assert!((s.x - 0.2).abs() < 1e-15);
        assert!((s.y - 0.24).abs() < 1e-15);
        assert!((s.z - 0.02).abs() < 1e-15);
    }

    #[test]
    fn chaos_parameters_fix_e2() {
        let p = ParamPoint::new(9.14, 2.50, 3.36).unwrap();
        let e2 = State3::new(0.2976190476, 0.3023809524, 0.0);
        assert!(step(e2, &p).dist_inf(e2) < 1e-9);
    }

    #[test]
    fn hand_differentiated_jacobian() {
        let p = ParamPoint::new(1.0, 2.0, 3.0).unwrap();
        let j = jacobian(State3::new(0.5, 0.2, 0.1), &p);
        let want = Matrix3::new(-0.6, -1.0, -1.0, 0.6, 1.2, -0.6, 0.0, 0.1, 0.2);
        assert!((j - want).abs().max() < 1e-14);
    }

    #[test]
    fn jacobian_at_origin_and_e1() {
        let p = ParamPoint::new(2.0, 3.5, 1.7).unwrap();
        let j0 = jacobian(State3::default(), &p);
        assert_eq!(j0, Matrix3::new(3.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        let mu = p.mu;
        let e1 = State3::new(1.0 - 1.0 / mu, 0.0, 0.0);
        let j1 = jacobian(e1, &p);
        let want = Matrix3::new(
            -mu + 2.0,
            -mu + 1.0,
            -mu + 1.0,
            0.0,
            p.beta * (mu - 1.0) / mu,
            0.0,
            0.0,
            0.0,
            0.0,
        );
        assert!((j1 - want).abs().max() < 1e-14);
    }

    #[test]
    fn divergent_orbit_is_flagged() {
        let p = ParamPoint::new(3.0, 8.0, 3.0).unwrap();
        let orbit = iterate(State3::new(5.0, 0.0, 0.0), &p, 100, 0);
        assert!(orbit.is_diverged());
        assert!(orbit.states.len() < 100);
    }

    #[test]
    fn fixed_point_orbit_is_constant() {
        let p = ParamPoint::new(2.0, 2.5, 1.2).unwrap();
        let e1 = State3::new(1.0 - 1.0 / 2.5, 0.0, 0.0);
        let orbit = iterate(e1, &p, 50, 10);
        assert!(orbit.states.iter().all(|s| s.dist_inf(e1) < 1e-15));
    }

    #[test]
    fn chain_rule_for_iterates() {
        let p = ParamPoint::new(2.9, 3.1, 3.03).unwrap();
        let s = State3::new(0.4, 0.2, 0.05);
        let (_, j2) = jacobian_n(s, &p, 2);
        let direct = jacobian(step(s, &p), &p) * jacobian(s, &p);
        assert!((j2 - direct).abs().max() < 1e-14);
    }
}
