//! Strong resonances 1:2, 1:3, 1:4 of E₂, their normal-form constants, the
//! leading-order bifurcation curves, and RK4 for the approximating planar flows.
//!
//! Resonance points: (μ, β) = (9, 9/4), (7, 7/3), (5, 5/2). The unfolding
//! parameters are the offsets (μ − μ*, β − β*).
//!
//! Pipeline conventions:
//! * 1:2 works in the real basis P₁ = [q, g] with (A + I)q = 0, (A + I)g = q,
//!   q₂ = 1, g₂ = 0, so that the linear part is [[−1, 1], [0, −1]]. The order-2
//!   and order-3 homological equations are solved for (h₂, h₃, C, D) in the least
//!   squares sense, with X³ and X²Y in the second component as the resonant terms.
//! * 1:3 and 1:4 use the complex coordinate of the multiplier with positive
//!   imaginary part and keep the terms with k − l ≡ 1 (mod 3 or 4).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::core_map::{jacobian, ParamPoint};
use crate::fixed_points::{record, FixedPointId};
use crate::normal_form::{e2_plane_block, e2_plane_complex, normalize, resonant, RPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResonanceKind {
    R12,
    R13,
    R14,
}

impl ResonanceKind {
    pub fn critical(self) -> (f64, f64) {
        match self {
            ResonanceKind::R12 => (9.0, 9.0 / 4.0),
            ResonanceKind::R13 => (7.0, 7.0 / 3.0),
            ResonanceKind::R14 => (5.0, 5.0 / 2.0),
        }
    }

    /// The multiplier pair at the critical point.
    pub fn root_of_unity(self) -> [Complex64; 2] {
        match self {
            ResonanceKind::R12 => [Complex64::new(-1.0, 0.0); 2],
            ResonanceKind::R13 => {
                let h = 3f64.sqrt() / 2.0;
                [Complex64::new(-0.5, h), Complex64::new(-0.5, -h)]
            }
            ResonanceKind::R14 => [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub kind: ResonanceKind,
    pub critical: (f64, f64),
    /// The two multipliers of JF(E₂) at the critical point that lie on the unit circle.
    pub eigenpair: [Complex64; 2],
    pub constants: Vec<(&'static str, f64)>,
    pub transversality_det: f64,
}

impl ResonanceReport {
    pub fn constant(&self, label: &str) -> Option<f64> {
        self.constants
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| *v)
    }
}

/// Multipliers of JF(E₂) at (λ, μ, β), without the z-direction multiplier
/// λ(1 − 1/μ − 1/β), matched against `target` by distance.
fn plane_pair(p: &ParamPoint, target: [Complex64; 2]) -> [Complex64; 2] {
    let rec = record(FixedPointId::E2, p);
    let eig = crate::spectra::eigenvalues(&jacobian(rec.coords, p)).roots;
    let mut best = [eig[0], eig[1]];
    let mut best_d = f64::INFINITY;
    for (i, j) in [(0, 1), (0, 2), (1, 2), (1, 0), (2, 0), (2, 1)] {
        let d = (eig[i] - target[0]).norm() + (eig[j] - target[1]).norm();
        if d < best_d {
            best_d = d;
            best = [eig[i], eig[j]];
        }
    }
    best
}

/// Reports a strong resonance when (μ, β) lies within `tol` (sup norm) of one of
/// the three resonance points and E₂ exists.
pub fn detect_strong_resonance(p: &ParamPoint, tol: f64) -> Option<ResonanceReport> {
    if !record(FixedPointId::E2, p).exists {
        return None;
    }
    let kind = [ResonanceKind::R12, ResonanceKind::R13, ResonanceKind::R14]
        .into_iter()
        .find(|k| {
            let (m, b) = k.critical();
            (p.mu - m).abs().max((p.beta - b).abs()) <= tol
        })?;
    let (m, b) = kind.critical();
    let at = ParamPoint::new_unchecked(p.lambda, m, b);
    let eigenpair = plane_pair(&at, kind.root_of_unity());
    let report = match kind {
        ResonanceKind::R12 => {
            let c = r12_constants(0.0, 0.0);
            let pipe = r12_pipeline();
            ResonanceReport {
                kind,
                critical: (m, b),
                eigenpair,
                constants: vec![
                    ("C", c.c),
                    ("D", c.d),
                    ("D+3C", c.d + 3.0 * c.c),
                    ("pipeline_C", pipe.c),
                    ("pipeline_D", pipe.d),
                ],
                transversality_det: c.transversality_det,
            }
        }
        ResonanceKind::R13 => {
            let c = r13_constants(0.0, 0.0);
            let pipe = r13_pipeline(0.0, 0.0);
            ResonanceReport {
                kind,
                critical: (m, b),
                eigenpair,
                constants: vec![
                    ("Re b1", c.b1.re),
                    ("Im b1", c.b1.im),
                    ("Re c1", c.re_c1),
                    ("Rc", c.rc),
                    ("pipeline_Re b1", pipe.b1.re),
                    ("pipeline_Im b1", pipe.b1.im),
                    ("pipeline_Re c1", pipe.c1.re),
                    ("pipeline_Rc", pipe.rc),
                    ("pipeline_Ic", pipe.ic),
                ],
                transversality_det: c.transversality_det,
            }
        }
        ResonanceKind::R14 => {
            let c = r14_constants(0.0, 0.0);
            let pipe = r14_pipeline(0.0, 0.0);
            ResonanceReport {
                kind,
                critical: (m, b),
                eigenpair,
                constants: vec![
                    ("a0", c.a0),
                    ("b0", c.b0),
                    ("pipeline_a0", pipe.a0),
                    ("pipeline_b0", pipe.b0),
                ],
                transversality_det: c.transversality_det,
            }
        }
    };
    Some(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R12Constants {
    pub c: f64,
    pub d: f64,
    pub c1: f64,
    pub d1: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// C(0), which must be nonzero.
    pub c0: f64,
    /// D(0) + 3C(0), which must be nonzero.
    pub d0_plus_3c0: f64,
    pub transversality_det: f64,
}

/// Truncated expansions in the unfolding (ε₁, ε₂) of the block [[−1, 1], [ε₁, −1 + ε₂]].
pub fn r12_constants(eps1: f64, eps2: f64) -> R12Constants {
    R12Constants {
        c: 243.0 / 4.0 + 243.0 / 8.0 * eps2 + 27.0 / 4.0 * eps1,
        d: 2187.0 / 4.0 - 1539.0 / 8.0 * eps2 - 243.0 / 4.0 * eps1,
        c1: 243.0 + 243.0 / 2.0 * eps2 + 27.0 * eps1,
        d1: -1458.0 + 405.0 / 2.0 * eps2 + 81.0 * eps1,
        gamma1: 4.0 * eps1,
        gamma2: -2.0 * eps1 - 2.0 * eps2,
        delta1: 144.0 * eps1,
        delta2: -12.0 * eps1 - 12.0 * eps2,
        c0: 243.0 / 4.0,
        d0_plus_3c0: 2187.0 / 4.0 + 3.0 * 243.0 / 4.0,
        transversality_det: -16.0 / 9.0,
    }
}

/// (ε₁, ε₂) of the E₂ plane block at (μ, β): ε₁ = −1 − tr − det, ε₂ = tr + 2.
pub fn r12_unfolding(mu: f64, beta: f64) -> (f64, f64) {
    let a = e2_plane_block(mu, beta);
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    (-1.0 - tr - det, tr + 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R12Pipeline {
    pub c: f64,
    pub d: f64,
    /// Residual of the least-squares homological solve.
    pub residual: f64,
    /// det ∂(ε₁, ε₂)/∂(μ, β) by central differences.
    pub transversality_det: f64,
}

/// Coefficient of X^i Y^j in component `comp` for every monomial of orders 2 and 3.
fn orders_23(p: &[RPoly; 2]) -> Vec<f64> {
    let mut out = Vec::with_capacity(14);
    for poly in p {
        for ord in 2..=3 {
            for i in (0..=ord).rev() {
                out.push(poly.get(i, ord - i));
            }
        }
    }
    out
}

pub fn r12_pipeline() -> R12Pipeline {
    let (mu, beta) = ResonanceKind::R12.critical();
    let a = e2_plane_block(mu, beta);
    let q = [(-1.0 - a[1][1]) / a[1][0], 1.0];
    let g = [1.0 / a[1][0], 0.0];
    let p1 = [[q[0], g[0]], [q[1], g[1]]];
    let det = p1[0][0] * p1[1][1] - p1[0][1] * p1[1][0];
    let p1i = [
        [p1[1][1] / det, -p1[0][1] / det],
        [-p1[1][0] / det, p1[0][0] / det],
    ];

    let n = 3;
    let x = RPoly::monomial(n, 1, 0, 1.0);
    let y = RPoly::monomial(n, 0, 1, 1.0);
    let u1 = x.scale(p1[0][0]).add(&y.scale(p1[0][1]));
    let u2 = x.scale(p1[1][0]).add(&y.scale(p1[1][1]));
    let f1 = u1
        .scale(a[0][0])
        .add(&u2.scale(a[0][1]))
        .add(&u1.mul(&u1).add(&u1.mul(&u2)).scale(-mu));
    let f2 = u1
        .scale(a[1][0])
        .add(&u2.scale(a[1][1]))
        .add(&u1.mul(&u2).scale(beta));
    let gmap = [
        f1.scale(p1i[0][0]).add(&f2.scale(p1i[0][1])),
        f1.scale(p1i[1][0]).add(&f2.scale(p1i[1][1])),
    ];

    // Unknowns: h₂ (2 × 3), h₃ (2 × 4), C, D.
    let residual = |u: &[f64]| -> Vec<f64> {
        let mut phi = [x.clone(), y.clone()];
        let mut k = 0;
        for comp in phi.iter_mut() {
            for ord in 2..=3 {
                for i in (0..=ord).rev() {
                    *comp = comp.add(&RPoly::monomial(n, i, ord - i, u[k]));
                    k += 1;
                }
            }
        }
        let (c, d) = (u[14], u[15]);
        let nf = [
            x.scale(-1.0).add(&y),
            y.scale(-1.0)
                .add(&RPoly::monomial(n, 3, 0, c))
                .add(&RPoly::monomial(n, 2, 1, d)),
        ];
        let lhs = [
            gmap[0].compose(&phi[0], &phi[1]),
            gmap[1].compose(&phi[0], &phi[1]),
        ];
        let rhs = [
            phi[0].compose(&nf[0], &nf[1]),
            phi[1].compose(&nf[0], &nf[1]),
        ];
        orders_23(&lhs)
            .into_iter()
            .zip(orders_23(&rhs))
            .map(|(l, r)| l - r)
            .collect()
    };

    let nu = 16;
    let r0 = residual(&[0.0; 16]);
    let mut m = DMatrix::zeros(r0.len(), nu);
    for j in 0..nu {
        let mut e = vec![0.0; nu];
        e[j] = 1.0;
        let rj = residual(&e);
        for i in 0..r0.len() {
            m[(i, j)] = rj[i] - r0[i];
        }
    }
    let b = -DVector::from_vec(r0);
    let sol = m
        .clone()
        .svd(true, true)
        .solve(&b, 1e-12)
        .expect("SVD with both factors");
    let res = (&m * &sol - &b).amax();

    let h = 1e-6;
    let d_mu = {
        let (a1, b1) = r12_unfolding(mu + h, beta);
        let (a0, b0) = r12_unfolding(mu - h, beta);
        ((a1 - a0) / (2.0 * h), (b1 - b0) / (2.0 * h))
    };
    let d_beta = {
        let (a1, b1) = r12_unfolding(mu, beta + h);
        let (a0, b0) = r12_unfolding(mu, beta - h);
        ((a1 - a0) / (2.0 * h), (b1 - b0) / (2.0 * h))
    };
    R12Pipeline {
        c: sol[14],
        d: sol[15],
        residual: res,
        transversality_det: d_mu.0 * d_beta.1 - d_beta.0 * d_mu.1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R13Constants {
    pub b1: Complex64,
    pub re_c1: f64,
    pub rc: f64,
    /// Leading-order (β₁, β₂) = ϱ(ε̂).
    pub beta1: f64,
    pub beta2: f64,
    pub transversality_det: f64,
}

/// Values at ε̂ = 0 and the linear ϱ(ε̂) = β₁ + iβ₂.
pub fn r13_constants(eps1: f64, eps2: f64) -> R13Constants {
    let s3 = 3f64.sqrt();
    R13Constants {
        b1: Complex64::new(21.0 / 4.0, 7.0 * s3 / 2.0),
        re_c1: -1715.0 / 16.0,
        rc: -5.0 / 3.0,
        beta1: 3.0 * eps1 / 7.0 + 54.0 * eps2 / 7.0,
        beta2: 2.0 * s3 * eps1 / 7.0 - 27.0 * s3 * eps2 / 7.0,
        transversality_det: -27.0 * s3 / 7.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R13Pipeline {
    pub zeta: Complex64,
    /// Coefficient B of w̄² and A of w²w̄ in the normalized map.
    pub b: Complex64,
    pub a: Complex64,
    pub b1: Complex64,
    pub c1: Complex64,
    pub rc: f64,
    pub ic: f64,
    /// ϱ = 3 log(ζ/ζ₀).
    pub rho: Complex64,
    pub transversality_det: f64,
}

fn upper_multiplier(mu: f64, beta: f64) -> Complex64 {
    crate::codim1::e2_lower_multiplier(mu, beta).conj()
}

/// Jacobian determinant of (μ, β) ↦ (Re f, Im f) at (μ, β) by central differences.
fn complex_det(f: impl Fn(f64, f64) -> Complex64, mu: f64, beta: f64) -> f64 {
    let h = 1e-6;
    let dm = (f(mu + h, beta) - f(mu - h, beta)) / (2.0 * h);
    let db = (f(mu, beta + h) - f(mu, beta - h)) / (2.0 * h);
    dm.re * db.im - db.re * dm.im
}

/// Normal-form pipeline at ε̂ = (μ − 7, β − 7/3).
pub fn r13_pipeline(eps1: f64, eps2: f64) -> R13Pipeline {
    let (m0, b0) = ResonanceKind::R13.critical();
    let (mu, beta) = (m0 + eps1, b0 + eps2);
    let zeta0 = ResonanceKind::R13.root_of_unity()[0];
    let zeta = upper_multiplier(mu, beta);
    let z = e2_plane_complex(mu, beta, zeta, 3);
    let g = normalize(&z, zeta, 3, resonant(Some(3)));
    let (b, a) = (g.get(0, 2), g.get(2, 1));
    let b1 = zeta.conj() * b * 3.0;
    let c1 = -3.0 * b.norm_sqr() + 3.0 * zeta * zeta * a;
    let rho_of = |m: f64, bb: f64| (upper_multiplier(m, bb) / zeta0).ln() * 3.0;
    R13Pipeline {
        zeta,
        b,
        a,
        b1,
        c1,
        rc: c1.re / b1.norm_sqr(),
        ic: c1.im / b1.norm_sqr(),
        rho: rho_of(mu, beta),
        transversality_det: complex_det(rho_of, mu, beta),
    }
}

/// Region of the (a₀, b₀)-plane, split by the unit circle |A₀| = 1 and the sign of a₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R14Region {
    /// |A₀| < 1, a₀ < 0.
    I,
    /// |A₀| < 1, a₀ > 0.
    II,
    /// |A₀| > 1, a₀ < 0.
    III,
    /// |A₀| > 1, a₀ > 0.
    IV,
    Boundary,
}

pub fn r14_region(a0: f64, b0: f64) -> R14Region {
    let r = a0.hypot(b0);
    if (r - 1.0).abs() < 1e-12 || a0 == 0.0 {
        R14Region::Boundary
    } else {
        match (r < 1.0, a0 < 0.0) {
            (true, true) => R14Region::I,
            (true, false) => R14Region::II,
            (false, true) => R14Region::III,
            (false, false) => R14Region::IV,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R14Constants {
    pub a0: f64,
    pub b0: f64,
    pub region: R14Region,
    pub transversality_det: f64,
}

/// Values at ε̃ = 0; the expansions are not continued beyond leading order.
pub fn r14_constants(_eps1: f64, _eps2: f64) -> R14Constants {
    let (a0, b0) = (-8.0 / 325.0, -4.0 / 325.0);
    R14Constants {
        a0,
        b0,
        region: r14_region(a0, b0),
        transversality_det: -1.0 / 5.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R14Pipeline {
    pub zeta: Complex64,
    /// Coefficients of w²w̄ and w̄³ in the normalized map.
    pub c: Complex64,
    pub d: Complex64,
    pub a0: f64,
    pub b0: f64,
    pub region: R14Region,
    /// ω = log(ζ/i).
    pub omega: Complex64,
    pub transversality_det: f64,
}

/// Normal-form pipeline at ε̃ = (μ − 5, β − 5/2).
pub fn r14_pipeline(eps1: f64, eps2: f64) -> R14Pipeline {
    let (m0, b0) = ResonanceKind::R14.critical();
    let (mu, beta) = (m0 + eps1, b0 + eps2);
    let i = Complex64::new(0.0, 1.0);
    let zeta = upper_multiplier(mu, beta);
    let z = e2_plane_complex(mu, beta, zeta, 3);
    let g = normalize(&z, zeta, 3, resonant(Some(4)));
    let (c, d) = (g.get(2, 1), g.get(0, 3));
    let (c1, d1) = (zeta.conj() * c, zeta.conj() * d);
    let abar = (c1 / d1.norm()).conj();
    let omega_of = |m: f64, bb: f64| (upper_multiplier(m, bb) / i).ln();
    R14Pipeline {
        zeta,
        c,
        d,
        a0: abar.re,
        b0: abar.im,
        region: r14_region(abar.re, abar.im),
        omega: omega_of(mu, beta),
        transversality_det: complex_det(omega_of, mu, beta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceCurve {
    /// Flip curve μ = 3β/(3−β).
    FlipPrime,
    /// Neimark-Sacker curve μ = β/(β−2).
    NeimarkSacker,
    /// μ = −41β/(7β − 26), through the 1:2 point.
    H2r,
    /// μ = −9β/4 + 1001/80 − 21√(120β − 279)/80, through the 1:3 point.
    H3r,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("β = {beta} is outside the range of curve {curve:?}")]
    OutOfRange { curve: ResonanceCurve, beta: f64 },
    #[error("curve {curve:?} does not belong to the {kind:?} unfolding")]
    NotInFamily {
        kind: ResonanceKind,
        curve: ResonanceCurve,
    },
}

/// Leading-order μ on a curve of the unfolding of `kind`.
pub fn bifurcation_curve(
    kind: ResonanceKind,
    curve: ResonanceCurve,
    beta: f64,
) -> Result<f64, ResonanceError> {
    use ResonanceCurve::*;
    let allowed = match kind {
        ResonanceKind::R12 => matches!(curve, FlipPrime | NeimarkSacker | H2r),
        ResonanceKind::R13 => matches!(curve, NeimarkSacker | H3r),
        ResonanceKind::R14 => matches!(curve, NeimarkSacker),
    };
    if !allowed {
        return Err(ResonanceError::NotInFamily { kind, curve });
    }
    let in_range = match curve {
        FlipPrime => beta > 0.0 && beta < 3.0,
        NeimarkSacker => beta > 2.0,
        // μ > 0 requires β < 26/7.
        H2r => (2.25..26.0 / 7.0).contains(&beta),
        // The radicand requires β ≥ 279/120.
        H3r => beta >= 279.0 / 120.0,
    };
    if !in_range {
        return Err(ResonanceError::OutOfRange { curve, beta });
    }
    Ok(match curve {
        FlipPrime => 3.0 * beta / (3.0 - beta),
        NeimarkSacker => beta / (beta - 2.0),
        H2r => -41.0 * beta / (7.0 * beta - 26.0),
        H3r => -9.0 * beta / 4.0 + 1001.0 / 80.0 - 21.0 * (120.0 * beta - 279.0).sqrt() / 80.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanarSystem {
    /// ζ̇ = η, η̇ = δ₁ζ + δ₂η + ζ³ − ζ²η. State (ζ, η).
    Eq129 { delta1: f64, delta2: f64 },
    /// ρ̇ = β₁ρ + ρ²cos 3ι + R_c ρ³, ι̇ = β₂ − ρ sin 3ι + I_c ρ². State (ρ, ι).
    Eq1310 { beta1: f64, beta2: f64, rc: f64, ic: f64 },
    /// ρ̇ = ω₁ρ + Re(Ā)ρ³ + ρ³cos 4ν, ν̇ = ω₂ + Im(Ā)ρ² + ρ² sin 4ν. State (ρ, ν).
    Eq1413 { omega1: f64, omega2: f64, a0: f64, b0: f64 },
}

impl PlanarSystem {
    pub fn rhs(&self, s: (f64, f64)) -> (f64, f64) {
        let (u, v) = s;
        match *self {
            PlanarSystem::Eq129 { delta1, delta2 } => {
                (v, delta1 * u + delta2 * v + u * u * u - u * u * v)
            }
            PlanarSystem::Eq1310 { beta1, beta2, rc, ic } => (
                beta1 * u + u * u * (3.0 * v).cos() + rc * u * u * u,
                beta2 - u * (3.0 * v).sin() + ic * u * u,
            ),
            PlanarSystem::Eq1413 {
                omega1,
                omega2,
                a0,
                b0,
            } => (
                omega1 * u + a0 * u.powi(3) + u.powi(3) * (4.0 * v).cos(),
                omega2 + b0 * u * u + u * u * (4.0 * v).sin(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarTrajectory {
    pub system: PlanarSystem,
    pub dt: f64,
    /// State at t = k·dt for k = 0, 1, ….
    pub samples: Vec<(f64, f64)>,
    /// Step at which a component became non-finite or exceeded 1e6.
    pub diverged: Option<usize>,
}

pub const DEFAULT_DT: f64 = 1e-3;

/// Fixed-step RK4 from `init` up to `t_end`.
pub fn integrate_normal_form(
    system: PlanarSystem,
    init: (f64, f64),
    t_end: f64,
    dt: f64,
) -> PlanarTrajectory {
    assert!(dt > 0.0, "step size must be positive");
    let steps = (t_end / dt).round() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut s = init;
    samples.push(s);
    let add = |a: (f64, f64), b: (f64, f64), h: f64| (a.0 + h * b.0, a.1 + h * b.1);
    for k in 1..=steps {
        let k1 = system.rhs(s);
        let k2 = system.rhs(add(s, k1, dt / 2.0));
        let k3 = system.rhs(add(s, k2, dt / 2.0));
        let k4 = system.rhs(add(s, k3, dt));
        s = (
            s.0 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            s.1 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        if !(s.0.is_finite() && s.1.is_finite()) || s.0.abs().max(s.1.abs()) > 1e6 {
            return PlanarTrajectory {
                system,
                dt,
                samples,
                diverged: Some(k),
            };
        }
        samples.push(s);
    }
    PlanarTrajectory {
        system,
        dt,
        samples,
        diverged: None,
    }
}

/// The three nontrivial equilibria (ρ, ι) of the 1:3 polar flow.
///
/// Eliminating ι gives ρ² = (β₁ + R_cρ²)² + (β₂ + I_cρ²)², solved by Newton from
/// ρ = √(β₁² + β₂²); then cos 3ι = −(β₁ + R_cρ²)/ρ and sin 3ι = (β₂ + I_cρ²)/ρ.
pub fn eq1310_equilibria(beta1: f64, beta2: f64, rc: f64, ic: f64) -> Option<[(f64, f64); 3]> {
    let f = |r: f64| {
        let (a, b) = (beta1 + rc * r * r, beta2 + ic * r * r);
        (a * a + b * b - r * r, 4.0 * r * (rc * a + ic * b) - 2.0 * r)
    };
    let mut r = beta1.hypot(beta2);
    if r == 0.0 {
        return None;
    }
    for _ in 0..100 {
        let (v, dv) = f(r);
        let step = v / dv;
        r -= step;
        if step.abs() <= 1e-15 * r {
            break;
        }
    }
    if !(r > 0.0) || f(r).0.abs() > 1e-13 {
        return None;
    }
    let c = -(beta1 + rc * r * r) / r;
    let s = (beta2 + ic * r * r) / r;
    let iota = s.atan2(c) / 3.0;
    let third = std::f64::consts::TAU / 3.0;
    Some([0, 1, 2].map(|k| (r, iota + third * k as f64)))
}
