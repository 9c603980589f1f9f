//! Transcritical, flip and Neimark-Sacker coefficients, and period-2 cycles.
//!
//! Each coefficient exists twice. The closed forms are the hand-derived
//! expressions. The pipeline restricts F to the center direction numerically:
//! with right/left eigenvectors q, p of the critical multiplier ν (p·q = 1,
//! last nonzero entry of q equal to 1) and B the second derivative of F,
//!
//! * g_uu = p·B(q, q),
//! * (ν²I − A) h₂ = (I − q pᵀ) ½B(q, q) fixes the quadratic part of the center manifold,
//! * g_uuu = 6 p·B(q, h₂) (F is quadratic, so there is no third-derivative term),
//! * the parameter derivative of the critical multiplier is p·(∂A/∂θ) q.
//!
//! The Neimark-Sacker pipeline uses the invariant plane z = 0, which is tangent
//! to the center eigenspace of E₂, and the complex normal form of that plane map.

use nalgebra::{Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use thiserror::Error;

use crate::core_map::{jacobian, jacobian_n, step, step_n, Matrix3, ParamPoint, State3};
use crate::fixed_points::{coords, e1_e2_threshold, e2_e3_threshold, FixedPointId};
use crate::normal_form::{e2_plane_block, e2_plane_complex, normalize, resonant};
use crate::spectra::{eigenvalues, RootTriple};

/// Largest allowed parameter distance to the critical set.
pub const CRITICAL_SET_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BifurcationKind {
    Transcritical,
    Flip,
    NeimarkSacker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    Supercritical,
    Subcritical,
    Degenerate,
}

impl Criticality {
    /// Sign convention shared by the flip quantity and the negated first
    /// Lyapunov quantity: positive means supercritical.
    fn from_flip(v: f64) -> Self {
        if v > 0.0 {
            Criticality::Supercritical
        } else if v < 0.0 {
            Criticality::Subcritical
        } else {
            Criticality::Degenerate
        }
    }

    /// Neimark-Sacker: a negative quantity gives a stable invariant circle.
    pub fn from_first_lyapunov(v: f64) -> Self {
        Self::from_flip(-v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationDiagnostic {
    pub kind: BifurcationKind,
    pub at: FixedPointId,
    /// Signed parameter distance to the critical set.
    pub offset: f64,
    pub coeffs: Vec<(&'static str, f64)>,
    /// `None` for transcritical points.
    pub criticality: Option<Criticality>,
}

impl BifurcationDiagnostic {
    pub fn coeff(&self, label: &str) -> Option<f64> {
        self.coeffs.iter().find(|(l, _)| *l == label).map(|(_, v)| *v)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Codim1Error {
    #[error("parameters are {distance:e} away from the critical set (tolerance {CRITICAL_SET_TOL:e})")]
    WrongCriticalSet { distance: f64 },
    #[error("no {kind:?} bifurcation is defined at {at}")]
    Unsupported { kind: BifurcationKind, at: FixedPointId },
    #[error("β = {0} is excluded (resonant or degenerate)")]
    ExcludedBeta(f64),
    #[error("β = {0} is outside the Neimark-Sacker range β > 9/4")]
    OutOfRange(f64),
    #[error("Newton iteration did not converge")]
    NoConvergence,
    #[error("Newton iteration converged to a fixed point")]
    CollapsedToFixedPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodTwoCycle {
    pub p1: State3,
    pub p2: State3,
    /// Multipliers of D(F²) at p1.
    pub multipliers: RootTriple,
    pub stable: bool,
}

fn on_critical_set(distance: f64) -> Result<(), Codim1Error> {
    if distance.abs() <= CRITICAL_SET_TOL {
        Ok(())
    } else {
        Err(Codim1Error::WrongCriticalSet {
            distance: distance.abs(),
        })
    }
}

/// Second derivative B(u, v) of F. It does not depend on the base point.
pub fn bilinear(u: &Vector3<f64>, v: &Vector3<f64>, p: &ParamPoint) -> Vector3<f64> {
    Vector3::new(
        -2.0 * p.mu * u[0] * v[0]
            - p.mu * (u[0] * v[1] + u[1] * v[0])
            - p.mu * (u[0] * v[2] + u[2] * v[0]),
        p.beta * (u[0] * v[1] + u[1] * v[0]) - p.beta * (u[1] * v[2] + u[2] * v[1]),
        p.lambda * (u[1] * v[2] + u[2] * v[1]),
    )
}

/// Null vector of a 3×3 matrix of rank 2, from the best-conditioned pair of rows.
fn null_vector(m: &Matrix3) -> Vector3<f64> {
    let rows = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
    [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .map(|(i, j)| rows[i].cross(&rows[j]))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("three candidate pairs")
}

/// Right and left eigenvectors for the real multiplier `nu`, scaled so that the
/// last nonzero entry of q is 1 and p·q = 1.
fn eigen_pair(a: &Matrix3, nu: f64) -> (Vector3<f64>, Vector3<f64>) {
    let shifted = a - Matrix3::identity() * nu;
    let mut q = null_vector(&shifted);
    let scale = q.amax();
    let last = (0..3)
        .rev()
        .find(|&i| q[i].abs() > 1e-9 * scale)
        .expect("nonzero null vector");
    q /= q[last];
    let p = null_vector(&shifted.transpose());
    let p = p / p.dot(&q);
    (q, p)
}

struct Reduction {
    g_uu: f64,
    g_uuu: f64,
    dnu: f64,
}

/// Center-direction reduction at the fixed point `id` for the real multiplier `nu`.
/// `perturb(θ)` returns the parameters shifted by θ along the unfolding direction.
fn reduce(
    id: FixedPointId,
    p: &ParamPoint,
    nu: f64,
    perturb: impl Fn(f64) -> ParamPoint,
) -> Reduction {
    let a = jacobian(coords(id, p), p);
    let (q, left) = eigen_pair(&a, nu);
    let bqq = bilinear(&q, &q, p);
    let g_uu = left.dot(&bqq);

    let rhs3 = (Matrix3::identity() - q * left.transpose()) * bqq * 0.5;
    let shifted = Matrix3::identity() * (nu * nu) - a;
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&shifted);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&q);
    m.fixed_view_mut::<1, 3>(3, 0).copy_from(&left.transpose());
    let rhs = Vector4::new(rhs3[0], rhs3[1], rhs3[2], 0.0);
    let sol = m.lu().solve(&rhs).expect("bordered system is regular");
    let h2 = Vector3::new(sol[0], sol[1], sol[2]);
    let g_uuu = 6.0 * left.dot(&bilinear(&q, &h2, p));

    let h = 1e-6;
    let (pp, pm) = (perturb(h), perturb(-h));
    let da = (jacobian(coords(id, &pp), &pp) - jacobian(coords(id, &pm), &pm)) / (2.0 * h);
    let dnu = left.dot(&(da * q));
    Reduction { g_uu, g_uuu, dnu }
}

fn pt(lambda: f64, mu: f64, beta: f64) -> ParamPoint {
    ParamPoint::new_unchecked(lambda, mu, beta)
}

/// Quadratic and cross coefficients at a transcritical point: O at μ = 1,
/// E₁ at β = μ/(μ−1), E₂ at β = λμ/(λμ−λ−μ).
pub fn transcritical_coeffs(
    id: FixedPointId,
    p: &ParamPoint,
) -> Result<BifurcationDiagnostic, Codim1Error> {
    let (lambda, mu, beta) = (p.lambda, p.mu, p.beta);
    let (offset, crit, closed): (f64, ParamPoint, (f64, f64)) = match id {
        FixedPointId::O => (mu - 1.0, pt(lambda, 1.0, beta), (-2.0, 1.0)),
        FixedPointId::E1 => {
            let bc = e1_e2_threshold(mu);
            (
                beta - bc,
                pt(lambda, mu, bc),
                (-2.0 * mu / (mu - 1.0), (mu - 1.0) / mu),
            )
        }
        FixedPointId::E2 => {
            let bc = e2_e3_threshold(lambda, mu);
            let cross = ((mu - 1.0) * lambda - mu).powi(2) / (mu * mu * lambda);
            (beta - bc, pt(lambda, mu, bc), (-4.0 * lambda, cross))
        }
        FixedPointId::E3 => {
            return Err(Codim1Error::Unsupported {
                kind: BifurcationKind::Transcritical,
                at: id,
            })
        }
    };
    on_critical_set(offset)?;
    let red = match id {
        FixedPointId::O => reduce(id, &crit, 1.0, |t| pt(lambda, 1.0 + t, crit.beta)),
        _ => reduce(id, &crit, 1.0, |t| pt(lambda, crit.mu, crit.beta + t)),
    };
    Ok(BifurcationDiagnostic {
        kind: BifurcationKind::Transcritical,
        at: id,
        offset,
        coeffs: vec![
            ("quadratic", closed.0),
            ("cross", closed.1),
            ("pipeline_quadratic", red.g_uu),
            ("pipeline_cross", red.dnu),
        ],
        criticality: None,
    })
}

/// Flip point data from the center-direction reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipReduction {
    /// Parameters projected onto the flip set.
    pub critical: (f64, f64, f64),
    pub g_uu: f64,
    pub g_uuu: f64,
    /// ½ g_uu² + ⅓ g_uuu.
    pub flip_lyapunov: f64,
    /// 2 dν/dμ.
    pub transversality: f64,
    pub criticality: Criticality,
}

/// Flip reduction anywhere on the flip sets: E₁ at μ = 3, E₂ on μ = 3β/(3−β), β < 3.
pub fn flip_pipeline(id: FixedPointId, p: &ParamPoint) -> Result<FlipReduction, Codim1Error> {
    let mu_c = match id {
        FixedPointId::E1 => 3.0,
        FixedPointId::E2 if p.beta < 3.0 => 3.0 * p.beta / (3.0 - p.beta),
        _ => {
            return Err(Codim1Error::Unsupported {
                kind: BifurcationKind::Flip,
                at: id,
            })
        }
    };
    on_critical_set(p.mu - mu_c)?;
    let crit = pt(p.lambda, mu_c, p.beta);
    let red = reduce(id, &crit, -1.0, |t| pt(crit.lambda, mu_c + t, crit.beta));
    let q = 0.5 * red.g_uu * red.g_uu + red.g_uuu / 3.0;
    Ok(FlipReduction {
        critical: (crit.lambda, crit.mu, crit.beta),
        g_uu: red.g_uu,
        g_uuu: red.g_uuu,
        flip_lyapunov: q,
        transversality: 2.0 * red.dnu,
        criticality: Criticality::from_flip(q),
    })
}

/// Flip coefficients: E₁ at μ = 3 gives (−2, 18); E₂ at (μ, β) = (6, 2) gives (−1, −144).
pub fn flip_coeffs(id: FixedPointId, p: &ParamPoint) -> Result<BifurcationDiagnostic, Codim1Error> {
    let (offset, closed) = match id {
        FixedPointId::E1 => (p.mu - 3.0, (-2.0, 18.0)),
        FixedPointId::E2 => {
            on_critical_set(p.beta - 2.0)?;
            (p.mu - 6.0, (-1.0, -144.0))
        }
        _ => {
            return Err(Codim1Error::Unsupported {
                kind: BifurcationKind::Flip,
                at: id,
            })
        }
    };
    on_critical_set(offset)?;
    let pipe = flip_pipeline(id, &pt(p.lambda, p.mu - offset, p.beta))?;
    Ok(BifurcationDiagnostic {
        kind: BifurcationKind::Flip,
        at: id,
        offset,
        coeffs: vec![
            ("transversality", closed.0),
            ("flip_lyapunov", closed.1),
            ("pipeline_transversality", pipe.transversality),
            ("pipeline_flip_lyapunov", pipe.flip_lyapunov),
        ],
        criticality: Some(Criticality::from_flip(closed.1)),
    })
}

/// Flip quantity along the E₂ flip curve at the given β values, with the
/// indices i where the sign differs between samples i and i + 1.
pub fn e2_flip_scan(lambda: f64, betas: &[f64]) -> (Vec<FlipReduction>, Vec<usize>) {
    let rows: Vec<FlipReduction> = betas
        .iter()
        .filter_map(|&b| {
            let p = ParamPoint::new_unchecked(lambda, 3.0 * b / (3.0 - b), b);
            flip_pipeline(FixedPointId::E2, &p).ok()
        })
        .collect();
    let changes = rows
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].flip_lyapunov.signum() != w[1].flip_lyapunov.signum())
        .map(|(i, _)| i)
        .collect();
    (rows, changes)
}

/// β values removed from the Neimark-Sacker statement: the 1:3 and 1:4 points
/// and the zero of β² − 9β + 15.
pub fn ns_excluded_betas() -> [f64; 3] {
    [7.0 / 3.0, 2.5, (9.0 + 21f64.sqrt()) / 2.0]
}

/// β³(β² − 9β + 15) / (16(β−2)³(4β−9)), with no domain checks.
pub fn ns_first_lyapunov_closed_form(beta: f64) -> f64 {
    beta.powi(3) * (beta * beta - 9.0 * beta + 15.0)
        / (16.0 * (beta - 2.0).powi(3) * (4.0 * beta - 9.0))
}

/// Closed-form first Lyapunov quantity on the curve μ = β/(β−2). Only β is read.
pub fn ns_first_lyapunov(p: &ParamPoint) -> Result<f64, Codim1Error> {
    let beta = p.beta;
    if beta <= 2.25 {
        return Err(Codim1Error::OutOfRange(beta));
    }
    if ns_excluded_betas()
        .iter()
        .any(|b| (beta - b).abs() <= CRITICAL_SET_TOL)
    {
        return Err(Codim1Error::ExcludedBeta(beta));
    }
    Ok(ns_first_lyapunov_closed_form(beta))
}

/// Multiplier of the E₂ plane block with negative imaginary part.
pub(crate) fn e2_lower_multiplier(mu: f64, beta: f64) -> Complex64 {
    let a = e2_plane_block(mu, beta);
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = det - tr * tr / 4.0;
    Complex64::new(tr / 2.0, -disc.max(0.0).sqrt())
}

/// Cubic resonant coefficient p₂₁ of the normalized plane map at (μ, β),
/// together with the multiplier ξ₀ it belongs to.
pub(crate) fn e2_cubic_coefficient(mu: f64, beta: f64) -> (Complex64, Complex64) {
    let xi = e2_lower_multiplier(mu, beta);
    let z = e2_plane_complex(mu, beta, xi, 3);
    let g = normalize(&z, xi, 3, resonant(None));
    (xi, g.get(2, 1))
}

/// Re(ξ̄₀ p₂₁) from the normal-form pipeline on μ = β/(β−2).
pub fn ns_first_lyapunov_pipeline(p: &ParamPoint) -> f64 {
    let beta = p.beta;
    let (xi, p21) = e2_cubic_coefficient(beta / (beta - 2.0), beta);
    (xi.conj() * p21).re
}

/// d|t|/dμ on μ = β/(β−2): (β−2)/(2β).
pub fn ns_transversality(p: &ParamPoint) -> f64 {
    (p.beta - 2.0) / (2.0 * p.beta)
}

/// The same derivative by central differences of the multiplier modulus.
pub fn ns_transversality_pipeline(p: &ParamPoint) -> f64 {
    let beta = p.beta;
    let mu = beta / (beta - 2.0);
    let h = 1e-6;
    let m = |mu: f64| e2_lower_multiplier(mu, beta).norm();
    (m(mu + h) - m(mu - h)) / (2.0 * h)
}

pub fn ns_diagnostic(p: &ParamPoint) -> Result<BifurcationDiagnostic, Codim1Error> {
    let value = ns_first_lyapunov(p)?;
    Ok(BifurcationDiagnostic {
        kind: BifurcationKind::NeimarkSacker,
        at: FixedPointId::E2,
        offset: p.mu - p.beta / (p.beta - 2.0),
        coeffs: vec![
            ("first_lyapunov", value),
            ("transversality", ns_transversality(p)),
            ("pipeline_first_lyapunov", ns_first_lyapunov_pipeline(p)),
            ("pipeline_transversality", ns_transversality_pipeline(p)),
        ],
        criticality: Some(Criticality::from_first_lyapunov(value)),
    })
}

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_STEP_TOL: f64 = 1e-12;
const COLLAPSE_TOL: f64 = 1e-8;

/// Newton solve of F^k(s) = s from `guess`. Returns the converged point.
pub(crate) fn newton_periodic(p: &ParamPoint, guess: State3, k: usize) -> Option<State3> {
    let mut s = guess;
    for _ in 0..NEWTON_MAX_ITER {
        let (fs, j) = jacobian_n(s, p, k);
        let r = fs.to_vector() - s.to_vector();
        let delta = (j - Matrix3::identity()).lu().solve(&(-r))?;
        s = State3::from_vector(&(s.to_vector() + delta));
        if !s.is_finite() {
            return None;
        }
        if delta.amax() <= NEWTON_STEP_TOL * (1.0 + s.max_abs()) {
            let res = step_n(s, p, k).dist_inf(s);
            return (res <= 1e-10).then_some(s);
        }
    }
    None
}

pub fn period2_orbit(p: &ParamPoint, guess: State3) -> Result<PeriodTwoCycle, Codim1Error> {
    let p1 = newton_periodic(p, guess, 2).ok_or(Codim1Error::NoConvergence)?;
    let p2 = step(p1, p);
    if p1.dist_inf(p2) <= COLLAPSE_TOL {
        return Err(Codim1Error::CollapsedToFixedPoint);
    }
    let (_, j) = jacobian_n(p1, p, 2);
    let multipliers = eigenvalues(&j);
    Ok(PeriodTwoCycle {
        p1,
        p2,
        stable: multipliers.max_modulus() < 1.0,
        multipliers,
    })
}
