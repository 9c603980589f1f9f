//! Truncated polynomial maps in (w, w̄) and near-identity normalization.
//!
//! A planar map is written in a complex coordinate as
//! w ↦ Σ g_kl w^k w̄^l. Non-resonant terms of order j are removed by the
//! change w = v + h(v, v̄) with h_kl = g_kl / (ξ^k ξ̄^l − ξ); the map is then
//! conjugated exactly (up to the truncation order) as Φ⁻¹ ∘ G ∘ Φ.
//!
//! Also hosts a small real bivariate polynomial type used by the 1:2 solver,
//! and the E₂ in-plane map, which is exactly quadratic.

use num_complex::Complex64;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CPoly {
    order: usize,
    c: Vec<Complex64>,
}

impl CPoly {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            c: vec![C0; (order + 1) * (order + 1)],
        }
    }

    /// The monomial w.
    pub fn w(order: usize) -> Self {
        let mut p = Self::zero(order);
        p.set(1, 0, C1);
        p
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn idx(&self, k: usize, l: usize) -> usize {
        k * (self.order + 1) + l
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        if k + l > self.order {
            C0
        } else {
            self.c[self.idx(k, l)]
        }
    }

    pub fn set(&mut self, k: usize, l: usize, v: Complex64) {
        if k + l <= self.order {
            let i = self.idx(k, l);
            self.c[i] = v;
        }
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let n = self.order;
        (0..=n).flat_map(move |k| (0..=n - k).map(move |l| (k, l, self.get(k, l))))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (k, l, v) in other.terms() {
            r.set(k, l, r.get(k, l) + v);
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-C1))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            order: self.order,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero(self.order);
        for (k1, l1, a) in self.terms() {
            if a == C0 {
                continue;
            }
            for (k2, l2, b) in other.terms() {
                if k1 + l1 + k2 + l2 <= self.order && b != C0 {
                    let (k, l) = (k1 + k2, l1 + l2);
                    r.set(k, l, r.get(k, l) + a * b);
                }
            }
        }
        r
    }

    /// The polynomial whose value is the complex conjugate of `self`.
    pub fn conj(&self) -> Self {
        let mut r = Self::zero(self.order);
        for (k, l, v) in self.terms() {
            r.set(l, k, v.conj());
        }
        r
    }

    /// self(P, P̄).
    pub fn compose(&self, p: &Self) -> Self {
        let n = self.order;
        let pb = p.conj();
        let mut one = Self::zero(n);
        one.set(0, 0, C1);
        let mut pw = vec![one.clone()];
        let mut pbw = vec![one];
        for i in 1..=n {
            pw.push(pw[i - 1].mul(p));
            pbw.push(pbw[i - 1].mul(&pb));
        }
        let mut r = Self::zero(n);
        for (k, l, v) in self.terms() {
            if v != C0 {
                r = r.add(&pw[k].mul(&pbw[l]).scale(v));
            }
        }
        r
    }

    /// Compositional inverse of a near-identity map w + O(|w|²).
    pub fn inverse(&self) -> Self {
        let id = Self::w(self.order);
        let mut q = id.clone();
        for _ in 0..=self.order {
            let r = self.compose(&q);
            q = q.sub(&r.sub(&id));
        }
        q
    }
}

/// Removes every term of order 2..=`max_order` for which `keep(k, l)` is false.
/// `xi` is the linear multiplier.
pub(crate) fn normalize(
    g: &CPoly,
    xi: Complex64,
    max_order: usize,
    keep: impl Fn(usize, usize) -> bool,
) -> CPoly {
    let mut g = g.clone();
    for j in 2..=max_order.min(g.order()) {
        let mut phi = CPoly::w(g.order());
        let mut any = false;
        for k in 0..=j {
            let l = j - k;
            let c = g.get(k, l);
            if keep(k, l) || c == C0 {
                continue;
            }
            let d = xi.powu(k as u32) * xi.conj().powu(l as u32) - xi;
            phi.set(k, l, c / d);
            any = true;
        }
        if any {
            g = phi.inverse().compose(&g.compose(&phi));
        }
    }
    g
}

/// Resonance set k − l ≡ 1 (mod q) of a multiplier that is a primitive q-th root
/// of unity. `None` keeps only k − l = 1.
pub(crate) fn resonant(q: Option<usize>) -> impl Fn(usize, usize) -> bool {
    move |k, l| {
        let d = k as i64 - l as i64 - 1;
        match q {
            Some(q) => d.rem_euclid(q as i64) == 0,
            None => d == 0,
        }
    }
}

/// Linear part [[a11, a12], [a21, a22]] of the E₂ in-plane map.
pub(crate) fn e2_plane_block(mu: f64, beta: f64) -> [[f64; 2]; 2] {
    let xs = 1.0 / beta;
    let ys = 1.0 - 1.0 / mu - 1.0 / beta;
    [
        [mu * (1.0 - 2.0 * xs - ys), -mu * xs],
        [beta * ys, beta * xs],
    ]
}

/// E₂ in-plane map in the complex coordinate attached to the multiplier `t`.
///
/// With q = ((t − a22)/a21, 1) the real basis is H = [Re q, −Im q], so that the
/// deviation from E₂ is u = Re(q z) and the linear part becomes z ↦ t z.
/// The map (x, y) ↦ (μx(1−x−y), βxy) is quadratic, so the result is exact.
pub(crate) fn e2_plane_complex(mu: f64, beta: f64, t: Complex64, order: usize) -> CPoly {
    let a = e2_plane_block(mu, beta);
    let q1 = (t - a[1][1]) / a[1][0];
    let h = [[q1.re, -q1.im], [1.0, 0.0]];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let hi = [
        [h[1][1] / det, -h[0][1] / det],
        [-h[1][0] / det, h[0][0] / det],
    ];

    // ξ = (z + z̄)/2, ν = (z − z̄)/(2i).
    let mut xi = CPoly::zero(order);
    xi.set(1, 0, Complex64::new(0.5, 0.0));
    xi.set(0, 1, Complex64::new(0.5, 0.0));
    let mut nu = CPoly::zero(order);
    nu.set(1, 0, Complex64::new(0.0, -0.5));
    nu.set(0, 1, Complex64::new(0.0, 0.5));
    let r = |v: f64| Complex64::new(v, 0.0);

    let u1 = xi.scale(r(h[0][0])).add(&nu.scale(r(h[0][1])));
    let u2 = xi.scale(r(h[1][0])).add(&nu.scale(r(h[1][1])));
    let lin1 = u1.scale(r(a[0][0])).add(&u2.scale(r(a[0][1])));
    let lin2 = u1.scale(r(a[1][0])).add(&u2.scale(r(a[1][1])));
    let u1u2 = u1.mul(&u2);
    let f1 = lin1.add(&u1.mul(&u1).add(&u1u2).scale(r(-mu)));
    let f2 = lin2.add(&u1u2.scale(r(beta)));
    let g1 = f1.scale(r(hi[0][0])).add(&f2.scale(r(hi[0][1])));
    let g2 = f1.scale(r(hi[1][0])).add(&f2.scale(r(hi[1][1])));
    g1.add(&g2.scale(Complex64::new(0.0, 1.0)))
}

/// Real polynomial in (X, Y) truncated at total degree `order`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RPoly {
    order: usize,
    c: Vec<f64>,
}

impl RPoly {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            c: vec![0.0; (order + 1) * (order + 1)],
        }
    }

    pub fn monomial(order: usize, i: usize, j: usize, v: f64) -> Self {
        let mut p = Self::zero(order);
        p.set(i, j, v);
        p
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.order + 1) + j
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[self.idx(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        if i + j <= self.order {
            let k = self.idx(i, j);
            self.c[k] = v;
        }
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.order;
        (0..=n).flat_map(move |i| (0..=n - i).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (i, j, v) in other.terms() {
            r.set(i, j, r.get(i, j) + v);
        }
        r
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            order: self.order,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero(self.order);
        for (i1, j1, a) in self.terms() {
            if a == 0.0 {
                continue;
            }
            for (i2, j2, b) in other.terms() {
                if i1 + j1 + i2 + j2 <= self.order && b != 0.0 {
                    r.set(i1 + i2, j1 + j2, r.get(i1 + i2, j1 + j2) + a * b);
                }
            }
        }
        r
    }

    /// self(P, Q).
    pub fn compose(&self, p: &Self, q: &Self) -> Self {
        let n = self.order;
        let mut pp = vec![Self::monomial(n, 0, 0, 1.0)];
        let mut qp = vec![Self::monomial(n, 0, 0, 1.0)];
        for i in 1..=n {
            pp.push(pp[i - 1].mul(p));
            qp.push(qp[i - 1].mul(q));
        }
        let mut r = Self::zero(n);
        for (i, j, v) in self.terms() {
            if v != 0.0 {
                r = r.add(&pp[i].mul(&qp[j]).scale(v));
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn inverse_undoes_composition() {
        let mut p = CPoly::w(4);
        p.set(2, 0, Complex64::new(0.3, -0.1));
        p.set(1, 1, Complex64::new(-0.2, 0.4));
        p.set(0, 3, Complex64::new(1.5, 0.0));
        let id = p.inverse().compose(&p);
        for k in 0..=4 {
            for l in 0..=4 - k {
                let want = if (k, l) == (1, 0) { C1 } else { C0 };
                assert!(close(id.get(k, l), want, 1e-13), "({k},{l}) = {}", id.get(k, l));
            }
        }
    }

    #[test]
    fn linear_part_is_the_multiplier() {
        let (mu, beta) = (7.0, 7.0 / 3.0);
        let t = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        let z = e2_plane_complex(mu, beta, t, 3);
        assert!(close(z.get(1, 0), t, 1e-14));
        assert!(z.get(0, 1).norm() < 1e-14);
        for (k, l) in [(3, 0), (2, 1), (1, 2), (0, 3)] {
            assert_eq!(z.get(k, l), C0);
        }
    }

    #[test]
    fn normalization_keeps_only_resonant_terms() {
        let (mu, beta) = (5.0, 2.5);
        let t = Complex64::new(0.0, 1.0);
        let z = e2_plane_complex(mu, beta, t, 3);
        let g = normalize(&z, t, 3, resonant(Some(4)));
        for k in 0..=3 {
            for l in 0..=3 - k {
                if k + l >= 2 && !resonant(Some(4))(k, l) {
                    assert!(g.get(k, l).norm() < 1e-12, "({k},{l})");
                }
            }
        }
        assert!(g.get(2, 1).norm() > 1.0);
        assert!(g.get(0, 3).norm() > 1.0);
    }

    #[test]
    fn real_composition() {
        let x = RPoly::monomial(3, 1, 0, 1.0);
        let y = RPoly::monomial(3, 0, 1, 1.0);
        // f = X Y, composed with (X + Y, X − Y) gives X² − Y².
        let f = x.mul(&y);
        let g = f.compose(&x.add(&y), &x.add(&y.scale(-1.0)));
        assert_eq!(g.get(2, 0), 1.0);
        assert_eq!(g.get(0, 2), -1.0);
        assert_eq!(g.get(1, 1), 0.0);
    }
}
