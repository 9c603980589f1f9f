//! Snap-back repeller certificates at E₂.
//!
//! E₂ is expanding when every root of det(tI − J(E₂)) = t³ + 𝓜t² + 𝓝t + 𝓦
//! has modulus above 1. A snap-back point is some E′ ≠ E₂ in an expanding box
//! around E₂ with F^M(E′) = E₂ and det DF^M(E′) ≠ 0.

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use thiserror::Error;

use crate::core_map::{jacobian, jacobian_n, step, step_n, ParamPoint, State3};
use crate::spectra::{char_poly, eigenvalues};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarottoError {
    #[error("fixed point is not expanding (smallest multiplier modulus {0})")]
    NotExpandingAtCenter(f64),
    #[error("no point maps onto the fixed point in {chain} steps ({seeds} seeds, {converged} Newton runs converged)")]
    NoSnapBackFound {
        chain: usize,
        seeds: usize,
        converged: usize,
    },
}

/// Cardano radicals of the depressed cubic, evaluated only when Δ̄ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadicalTest {
    /// Δ̄ > 0.
    pub d1: bool,
    /// Real root above 1 and the complex pair outside the unit circle.
    pub d2: bool,
    /// Real root below −1 and the complex pair outside the unit circle.
    pub d3: bool,
}

impl RadicalTest {
    pub fn expanding(&self) -> bool {
        self.d1 && (self.d2 || self.d3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpandingReport {
    pub point: State3,
    /// (𝓜, 𝓝, 𝓦) of t³ + 𝓜t² + 𝓝t + 𝓦.
    pub mnw: (f64, f64, f64),
    /// (𝓂, 𝓃) of the depressed cubic 𝒵³ + 𝓂𝒵 + 𝓃.
    pub depressed: (f64, f64),
    pub delta_bar: f64,
    pub min_modulus: f64,
    pub expanding: bool,
    pub radical: RadicalTest,
}

impl ExpandingReport {
    /// Whether the radical inequalities and the root moduli give the same answer.
    /// The radical form says nothing when Δ̄ ≤ 0, so it only claims agreement there
    /// if the point is not in D₁.
    pub fn radical_agrees(&self) -> bool {
        if self.radical.d1 {
            self.radical.expanding() == self.expanding
        } else {
            !self.radical.expanding()
        }
    }
}

pub fn radical_test(m: f64, n: f64, w: f64) -> RadicalTest {
    let p = n - m * m / 3.0;
    let q = 2.0 * m.powi(3) / 27.0 - m * n / 3.0 + w;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc <= 0.0 {
        return RadicalTest {
            d1: false,
            d2: false,
            d3: false,
        };
    }
    let u = (-q / 2.0 + disc.sqrt()).cbrt();
    let v = (-q / 2.0 - disc.sqrt()).cbrt();
    let real = u + v - m / 3.0;
    let re = -(u + v) / 2.0 - m / 3.0;
    let im = 3f64.sqrt() / 2.0 * (u - v);
    let pair_out = re * re + im * im > 1.0;
    RadicalTest {
        d1: true,
        d2: real > 1.0 && pair_out,
        d3: real < -1.0 && pair_out,
    }
}

pub fn expanding_at(s: State3, p: &ParamPoint, tol: f64) -> ExpandingReport {
    let j = jacobian(s, p);
    let cubic = char_poly(&j);
    let (m, n, w) = (cubic.c2, cubic.c1, cubic.c0);
    let (dp, dq) = cubic.depressed().expect("characteristic polynomial is monic");
    let roots = eigenvalues(&j);
    let min_modulus = roots.min_modulus();
    ExpandingReport {
        point: s,
        mnw: (m, n, w),
        depressed: (dp, dq),
        delta_bar: (dq / 2.0).powi(2) + (dp / 3.0).powi(3),
        min_modulus,
        expanding: min_modulus > 1.0 + tol,
        radical: radical_test(m, n, w),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionW {
    pub in_region: bool,
    /// β − 9/4, distance of μ to the nearer end of its window, and
    /// λ − μβ/(μβ − μ − β).
    pub margins: [f64; 3],
}

pub fn region_w(p: &ParamPoint) -> RegionW {
    let (l, mu, b) = (p.lambda, p.mu, p.beta);
    let m_beta = b - 2.25;
    let m_mu = if b > 2.0 {
        let upper = 2.0 * b * b - 2.0 * b + 2.0 * (b.powi(4) - 2.0 * b.powi(3)).sqrt();
        (mu - b / (b - 2.0)).min(upper - mu)
    } else {
        f64::NEG_INFINITY
    };
    let denom = mu * b - mu - b;
    let m_lambda = if denom > 0.0 {
        l - mu * b / denom
    } else {
        f64::NEG_INFINITY
    };
    let margins = [m_beta, m_mu, m_lambda];
    RegionW {
        in_region: margins.iter().all(|&m| m > 0.0),
        margins,
    }
}

/// Axis-aligned box [lo, hi], clipped to the nonnegative orthant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpandingBox {
    pub lo: State3,
    pub hi: State3,
}

impl ExpandingBox {
    pub fn contains(&self, s: State3) -> bool {
        (self.lo.x..=self.hi.x).contains(&s.x)
            && (self.lo.y..=self.hi.y).contains(&s.y)
            && (self.lo.z..=self.hi.z).contains(&s.z)
    }

    /// `n` points per axis, corners included.
    pub fn grid(&self, n: usize) -> Vec<State3> {
        let t = |k: usize| if n > 1 { k as f64 / (n - 1) as f64 } else { 0.5 };
        let lerp = |a: f64, b: f64, k: usize| a + (b - a) * t(k);
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.push(State3::new(
                        lerp(self.lo.x, self.hi.x, i),
                        lerp(self.lo.y, self.hi.y, j),
                        lerp(self.lo.z, self.hi.z, k),
                    ));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxConfig {
    /// Sample points per axis when validating a candidate box.
    pub grid: usize,
    pub tol: f64,
    pub max_half_width: f64,
    pub bisection_steps: usize,
}

impl Default for BoxConfig {
    fn default() -> Self {
        Self {
            grid: 9,
            tol: 0.0,
            max_half_width: 1.0,
            bisection_steps: 40,
        }
    }
}

fn box_expanding(b: &ExpandingBox, p: &ParamPoint, cfg: &BoxConfig) -> bool {
    b.grid(cfg.grid.max(2))
        .par_iter()
        .all(|&s| expanding_at(s, p, cfg.tol).expanding)
}

fn clipped(fp: State3, lo: [f64; 3], hi: [f64; 3]) -> ExpandingBox {
    ExpandingBox {
        lo: State3::new(
            (fp.x - lo[0]).max(0.0),
            (fp.y - lo[1]).max(0.0),
            (fp.z - lo[2]).max(0.0),
        ),
        hi: State3::new(fp.x + hi[0], fp.y + hi[1], fp.z + hi[2]),
    }
}

/// Largest admissible t in [0, hi] by bisection, assuming admissibility is
/// monotone along the search direction.
fn bisect(ok: impl Fn(f64) -> bool, hi: f64, steps: usize) -> f64 {
    if ok(hi) {
        return hi;
    }
    let (mut a, mut b) = (0.0, hi);
    for _ in 0..steps {
        let mid = 0.5 * (a + b);
        if ok(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// Grows a cube around `fp` while every sample stays expanding, then pushes
/// each of the six faces outward on its own.
pub fn expanding_box(
    p: &ParamPoint,
    fp: State3,
    cfg: &BoxConfig,
) -> Result<ExpandingBox, MarottoError> {
    let centre = expanding_at(fp, p, cfg.tol);
    if !centre.expanding {
        return Err(MarottoError::NotExpandingAtCenter(centre.min_modulus));
    }
    let h = bisect(
        |h| box_expanding(&clipped(fp, [h; 3], [h; 3]), p, cfg),
        cfg.max_half_width,
        cfg.bisection_steps,
    );
    let (mut lo, mut hi) = ([h; 3], [h; 3]);
    for axis in 0..3 {
        for upper in [false, true] {
            let base = if upper { hi[axis] } else { lo[axis] };
            let grow = bisect(
                |d| {
                    let (mut l, mut u) = (lo, hi);
                    if upper {
                        u[axis] = base + d;
                    } else {
                        l[axis] = base + d;
                    }
                    box_expanding(&clipped(fp, l, u), p, cfg)
                },
                cfg.max_half_width,
                cfg.bisection_steps,
            );
            if upper {
                hi[axis] = base + grow;
            } else {
                lo[axis] = base + grow;
            }
        }
    }
    Ok(clipped(fp, lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapBackConfig {
    /// Chain length M in F^M(E′) = E₂.
    pub chain: usize,
    /// Newton seeds per axis.
    pub grid: usize,
}

impl Default for SnapBackConfig {
    fn default() -> Self {
        Self { chain: 2, grid: 24 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapBackCertificate {
    pub fixed_point: State3,
    pub expanding_box: ExpandingBox,
    pub chain: usize,
    /// E′ and its images F(E′), …, F^{M−1}(E′).
    pub preimage_chain: Vec<State3>,
    /// ‖F^M(E′) − E₂‖∞.
    pub residual: f64,
    /// det DF^M(E′).
    pub det_df: f64,
    pub in_box: bool,
    pub valid: bool,
}

impl SnapBackCertificate {
    pub fn e_prime(&self) -> State3 {
        self.preimage_chain[0]
    }

    pub fn e_double_prime(&self) -> Option<State3> {
        self.preimage_chain.get(1).copied()
    }
}

const NEWTON_ITER: usize = 60;
const DISTINCT_TOL: f64 = 1e-8;

/// Newton on the plane map, F^M(x, y, 0) = target.
fn plane_newton(p: &ParamPoint, seed: State3, target: State3, chain: usize) -> Option<State3> {
    let mut s = State3::new(seed.x, seed.y, 0.0);
    for _ in 0..NEWTON_ITER {
        let (f, j) = jacobian_n(s, p, chain);
        let r = Vector2::new(f.x - target.x, f.y - target.y);
        let a = Matrix2::new(j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)]);
        let d = a.lu().solve(&(-r))?;
        s = State3::new(s.x + d[0], s.y + d[1], 0.0);
        if !s.is_finite() || s.max_abs() > 1e3 {
            return None;
        }
        if d.amax() < 1e-14 * (1.0 + s.max_abs()) {
            break;
        }
    }
    (step_n(s, p, chain).dist_inf(target) < 1e-10).then_some(s)
}

fn full_newton(p: &ParamPoint, seed: State3, target: State3, chain: usize) -> Option<State3> {
    let mut s = seed;
    for _ in 0..NEWTON_ITER {
        let (f, j) = jacobian_n(s, p, chain);
        let d = j.lu().solve(&(target.to_vector() - f.to_vector()))?;
        s = State3::from_vector(&(s.to_vector() + d));
        if !s.is_finite() || s.max_abs() > 1e3 {
            return None;
        }
        if d.amax() < 1e-14 * (1.0 + s.max_abs()) {
            break;
        }
    }
    (step_n(s, p, chain).dist_inf(target) < 1e-10).then_some(s)
}

fn plane_grid(lo: (f64, f64), hi: (f64, f64), n: usize) -> Vec<State3> {
    let t = |k: usize| (k as f64 + 0.5) / n as f64;
    (0..n)
        .flat_map(|i| {
            (0..n).map(move |j| {
                State3::new(lo.0 + (hi.0 - lo.0) * t(i), lo.1 + (hi.1 - lo.1) * t(j), 0.0)
            })
        })
        .collect()
}

fn certify(
    p: &ParamPoint,
    fp: State3,
    bx: &ExpandingBox,
    chain: usize,
    e: State3,
) -> SnapBackCertificate {
    let mut preimage_chain = Vec::with_capacity(chain);
    let mut cur = e;
    for _ in 0..chain {
        preimage_chain.push(cur);
        cur = step(cur, p);
    }
    let residual = cur.dist_inf(fp);
    let det_df = jacobian_n(e, p, chain).1.determinant();
    let in_box = bx.contains(e);
    SnapBackCertificate {
        fixed_point: fp,
        expanding_box: *bx,
        chain,
        preimage_chain,
        residual,
        det_df,
        in_box,
        valid: in_box && e.dist_inf(fp) > DISTINCT_TOL && residual < 1e-10 && det_df.abs() > 1e-12,
    }
}

/// Looks for E′ with F^M(E′) = `fp`. Seeds cover the box within z = 0, then the
/// whole unit square of the plane, then the full box in three dimensions. The
/// best candidate is returned even when it lies outside the box, with
/// `valid` false; candidates inside the box are preferred, then smaller
/// residual, then lexicographic coordinates.
pub fn snapback_search(
    p: &ParamPoint,
    fp: State3,
    bx: &ExpandingBox,
    cfg: &SnapBackConfig,
) -> Result<SnapBackCertificate, MarottoError> {
    let n = cfg.grid.max(2);
    let target = fp;
    let chain = cfg.chain.max(1);

    let mut seeds = plane_grid((bx.lo.x, bx.lo.y), (bx.hi.x, bx.hi.y), n);
    seeds.extend(plane_grid((0.0, 0.0), (1.0, 1.0), n));
    let plane_count = seeds.len();
    seeds.extend(bx.grid(n.min(12)));
    let total = seeds.len();

    let found: Vec<State3> = seeds
        .par_iter()
        .enumerate()
        .filter_map(|(i, &s)| {
            if i < plane_count {
                plane_newton(p, s, target, chain)
            } else {
                full_newton(p, s, target, chain)
            }
        })
        .collect();
    let converged = found.len();

    let mut certs: Vec<SnapBackCertificate> = Vec::new();
    for e in found {
        if e.dist_inf(fp) <= DISTINCT_TOL || certs.iter().any(|c| c.e_prime().dist_inf(e) < 1e-9) {
            continue;
        }
        certs.push(certify(p, fp, bx, chain, e));
    }
    certs.sort_by(|a, b| {
        (!a.valid, !a.in_box)
            .cmp(&(!b.valid, !b.in_box))
            .then(a.residual.total_cmp(&b.residual))
            .then(a.e_prime().x.total_cmp(&b.e_prime().x))
            .then(a.e_prime().y.total_cmp(&b.e_prime().y))
            .then(a.e_prime().z.total_cmp(&b.e_prime().z))
    });
    certs.into_iter().next().ok_or(MarottoError::NoSnapBackFound {
        chain,
        seeds: total,
        converged,
    })
}

/// Real preimages of (a, b, 0) under the plane map, from
/// y = b/(βx) and μx² − μx + a + μb/β = 0.
pub fn plane_preimages(p: &ParamPoint, a: f64, b: f64) -> Vec<State3> {
    let (mu, beta) = (p.mu, p.beta);
    let c = a + mu * b / beta;
    let disc = mu * mu - 4.0 * mu * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let r = disc.sqrt();
    [(mu + r) / (2.0 * mu), (mu - r) / (2.0 * mu)]
        .into_iter()
        .filter(|&x| x != 0.0)
        .map(|x| State3::new(x, b / (beta * x), 0.0))
        .collect()
}
