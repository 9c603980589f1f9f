//! Characteristic cubics of 3×3 matrices and a depressed-cubic root solver.
//!
//! A monic cubic t³ + a t² + b t + c is shifted by t = s − a/3 to the depressed
//! form s³ + p s + q. The sign of Δ̄ = (q/2)² + (p/3)³ separates one real root
//! (Δ̄ > 0) from three (Δ̄ < 0). Within a band |Δ̄| ≤ 1e−14·(1 + M)⁶, with M a
//! bound on the root magnitudes, the repeated-root closed form is used instead
//! of Cardano, because every strong resonance sits exactly there.

use num_complex::Complex64;
use thiserror::Error;

use crate::core_map::Matrix3;

/// Default half-width of the band around |t| = 1 used by [`modulus_class`].
pub const DEFAULT_MODULUS_EPS: f64 = 1e-9;

const DOUBLE_ROOT_BAND: f64 = 1e-14;
const CONJUGATE_SNAP: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("leading coefficient is zero")]
    DegenerateLeadingCoefficient,
}

/// c3·t³ + c2·t² + c1·t + c0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl Cubic {
    pub const fn new(c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Self { c3, c2, c1, c0 }
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        ((t * self.c3 + self.c2) * t + self.c1) * t + self.c0
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c3
            .abs()
            .max(self.c2.abs())
            .max(self.c1.abs())
            .max(self.c0.abs())
    }

    /// Monic coefficients (a, b, c) of t³ + a t² + b t + c.
    pub fn monic(&self) -> Result<(f64, f64, f64), SpectraError> {
        if self.c3 == 0.0 {
            return Err(SpectraError::DegenerateLeadingCoefficient);
        }
        Ok((self.c2 / self.c3, self.c1 / self.c3, self.c0 / self.c3))
    }

    /// Coefficients (p, q) of the depressed form s³ + p s + q.
    pub fn depressed(&self) -> Result<(f64, f64), SpectraError> {
        let (a, b, c) = self.monic()?;
        let p = b - a * a / 3.0;
        let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
        Ok((p, q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootTriple {
    /// Real roots first in descending order, then a conjugate pair with the
    /// positive imaginary part first.
    pub roots: [Complex64; 3],
    /// Δ̄ of the depressed cubic.
    pub discriminant: f64,
    pub real_count: u8,
}

impl RootTriple {
    pub fn moduli(&self) -> [f64; 3] {
        [self.roots[0].norm(), self.roots[1].norm(), self.roots[2].norm()]
    }

    pub fn min_modulus(&self) -> f64 {
        self.moduli().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_modulus(&self) -> f64 {
        self.moduli().into_iter().fold(0.0, f64::max)
    }

    pub fn has_complex_pair(&self) -> bool {
        self.real_count == 1
    }

    /// The root with positive imaginary part, if there is a complex pair.
    pub fn upper_complex(&self) -> Option<Complex64> {
        self.has_complex_pair().then_some(self.roots[1])
    }

    pub fn real_roots(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots
            .iter()
            .filter(|r| r.im == 0.0)
            .map(|r| r.re)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModulusClass {
    pub n_inside: u8,
    pub n_on: u8,
    pub n_outside: u8,
}

/// det(tI − M), leading coefficient +1.
pub fn char_poly(m: &Matrix3) -> Cubic {
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    Cubic::new(1.0, -m.trace(), minors, -m.determinant())
}

fn polish(t: Complex64, a: f64, b: f64, c: f64) -> Complex64 {
    let f = |t: Complex64| ((t + a) * t + b) * t + c;
    let df = |t: Complex64| (t * 3.0 + 2.0 * a) * t + b;
    let mut best = t;
    let mut best_res = f(t).norm();
    for _ in 0..3 {
        let d = df(best);
        if d.norm() == 0.0 {
            break;
        }
        let cand = best - f(best) / d;
        let res = f(cand).norm();
        if res < best_res {
            best = cand;
            best_res = res;
        } else {
            break;
        }
    }
    best
}

pub fn solve_cubic(cubic: &Cubic) -> Result<RootTriple, SpectraError> {
    let (a, b, c) = cubic.monic()?;
    let (p, q) = cubic.depressed()?;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    // Δ̄ is homogeneous of degree 6 in the roots; M bounds their magnitude.
    let m = a.abs().max(b.abs().sqrt()).max(c.abs().cbrt());
    let scale = (1.0 + m).powi(6);
    let shift = a / 3.0;

    let mut roots: [Complex64; 3];
    let repeated = disc.abs() <= DOUBLE_ROOT_BAND * scale;
    if repeated {
        if p.abs() <= 1e-12 * (1.0 + a * a) {
            let r = Complex64::new(-shift, 0.0);
            roots = [r; 3];
        } else {
            let single = 3.0 * q / p - shift;
            let double = -1.5 * q / p - shift;
            roots = [
                Complex64::new(single, 0.0),
                Complex64::new(double, 0.0),
                Complex64::new(double, 0.0),
            ];
        }
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let w = -q / 2.0 - if q >= 0.0 { sq } else { -sq };
        let u = w.cbrt();
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let s1 = u + v;
        let im = (3f64.sqrt() / 2.0 * (u - v)).abs();
        roots = [
            Complex64::new(s1 - shift, 0.0),
            Complex64::new(-s1 / 2.0 - shift, im),
            Complex64::new(-s1 / 2.0 - shift, -im),
        ];
        roots[0] = Complex64::new(polish(roots[0], a, b, c).re, 0.0);
        let z = polish(roots[1], a, b, c);
        roots[1] = Complex64::new(z.re, z.im.abs());
        roots[2] = roots[1].conj();
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let tau = std::f64::consts::TAU;
        roots = [0, 1, 2].map(|k| {
            let s = r * (phi - tau * k as f64 / 3.0).cos();
            Complex64::new(polish(Complex64::new(s - shift, 0.0), a, b, c).re, 0.0)
        });
    }

    let mut real_count = if roots[1].im == 0.0 { 3 } else { 1 };
    if real_count == 1 {
        let root_scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
        if roots[1].im.abs() < CONJUGATE_SNAP * root_scale {
            roots[1].im = 0.0;
            roots[2].im = 0.0;
            real_count = 3;
        }
    }
    if real_count == 3 {
        roots.sort_by(|x, y| y.re.total_cmp(&x.re));
    }
    Ok(RootTriple {
        roots,
        discriminant: disc,
        real_count,
    })
}

/// Eigenvalues of a 3×3 matrix via its characteristic cubic.
pub fn eigenvalues(m: &Matrix3) -> RootTriple {
    solve_cubic(&char_poly(m)).expect("characteristic polynomial is monic")
}

pub fn modulus_class(r: &RootTriple, eps: f64) -> ModulusClass {
    let mut class = ModulusClass {
        n_inside: 0,
        n_on: 0,
        n_outside: 0,
    };
    for m in r.moduli() {
        if m < 1.0 - eps {
            class.n_inside += 1;
        } else if m > 1.0 + eps {
            class.n_outside += 1;
        } else {
            class.n_on += 1;
        }
    }
    class
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn identity_char_poly() {
        assert_eq!(
            char_poly(&Matrix3::identity()),
            Cubic::new(1.0, -3.0, 3.0, -1.0)
        );
    }

    #[test]
    fn origin_jacobian_char_poly() {
        let mu = 2.7;
        let m = Matrix3::from_diagonal(&nalgebra::Vector3::new(mu, 0.0, 0.0));
        assert_eq!(char_poly(&m), Cubic::new(1.0, -mu, 0.0, 0.0));
    }

    #[test]
    fn cube_roots_of_unity() {
        let r = solve_cubic(&Cubic::new(1.0, 0.0, 0.0, -1.0)).unwrap();
        assert!(r.discriminant > 0.0);
        assert_eq!(r.real_count, 1);
        let h = 3f64.sqrt() / 2.0;
        assert!(close(r.roots[0], Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(r.roots[1], Complex64::new(-0.5, h), 1e-15));
        assert!(close(r.roots[2], Complex64::new(-0.5, -h), 1e-15));
    }

    #[test]
    fn exact_double_root() {
        // (t + 1)^2 (t - 0.4)
        let r = solve_cubic(&Cubic::new(1.0, 1.6, 0.2, -0.4)).unwrap();
        assert_eq!(r.real_count, 3);
        assert!(close(r.roots[0], Complex64::new(0.4, 0.0), 1e-14));
        assert!(close(r.roots[1], Complex64::new(-1.0, 0.0), 1e-12));
        assert!(close(r.roots[2], Complex64::new(-1.0, 0.0), 1e-12));
        let mc = modulus_class(&r, 1e-9);
        assert_eq!((mc.n_inside, mc.n_on, mc.n_outside), (1, 2, 0));
    }

    #[test]
    fn triple_root() {
        let r = solve_cubic(&Cubic::new(2.0, -6.0, 6.0, -2.0)).unwrap();
        for z in r.roots {
            assert!(close(z, Complex64::new(1.0, 0.0), 1e-12));
        }
    }

    #[test]
    fn three_real_roots_have_zero_imaginary_part() {
        let r = solve_cubic(&Cubic::new(1.0, -6.0, 11.0, -6.0)).unwrap();
        assert!(r.discriminant < 0.0);
        assert_eq!(r.real_count, 3);
        for (z, want) in r.roots.iter().zip([3.0, 2.0, 1.0]) {
            assert_eq!(z.im, 0.0);
            assert!((z.re - want).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_leading_coefficient_is_rejected() {
        assert_eq!(
            solve_cubic(&Cubic::new(0.0, 1.0, 2.0, 3.0)),
            Err(SpectraError::DegenerateLeadingCoefficient)
        );
    }

    #[test]
    fn stable_diagonal_is_all_inside() {
        let m = Matrix3::from_diagonal_element(0.5);
        let mc = modulus_class(&eigenvalues(&m), DEFAULT_MODULUS_EPS);
        assert_eq!((mc.n_inside, mc.n_on, mc.n_outside), (3, 0, 0));
    }
}
