//! Topological type of O, E₁, E₂ and the sink test for E₃.
//!
//! Every classification is computed twice: once from the explicit parameter
//! inequalities of the classification tables, once from the multipliers. The
//! two must agree; a mismatch is reported as [`ClassifyError::InternalDisagreement`]
//! so that a mistyped threshold surfaces immediately.
//!
//! Conventions worth knowing:
//! * For E₁ the third multiplier is identically zero (the z-row of the
//!   Jacobian vanishes on the x-axis). The E₁ table types are read from the two
//!   multipliers that vary, 2 − μ and β(μ−1)/μ. For O the two zero multipliers
//!   count as contracting, which is what makes μ > 1 a saddle.
//! * The flip curve of E₂ is μ = 3β/(3−β) for β < 3.
//! * The E₃ triple is evaluated on the coefficients of the true characteristic
//!   polynomial of JF(E₃); [`paper_e3_coefficients`] keeps the printed closed
//!   forms for comparison.

use std::fmt;

use thiserror::Error;

use crate::core_map::{jacobian, ParamPoint};
use crate::fixed_points::{e1_e2_threshold, record, FixedPointId};
use crate::spectra::{char_poly, eigenvalues, modulus_class, ModulusClass, RootTriple};

/// Band around |t| = 1 (and around table equalities) treated as non-hyperbolic.
pub const NONHYPERBOLIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopoKind {
    StableNode,
    UnstableNode,
    Saddle,
    StableFocusNode,
    UnstableFocusNode,
    SaddleFocus,
    NonHyperbolic,
}

impl fmt::Display for TopoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TopoKind::StableNode => "stable node",
            TopoKind::UnstableNode => "unstable node",
            TopoKind::Saddle => "saddle point",
            TopoKind::StableFocusNode => "stable focus-node",
            TopoKind::UnstableFocusNode => "unstable focus-node",
            TopoKind::SaddleFocus => "saddle-focus",
            TopoKind::NonHyperbolic => "non-hyperbolic",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSummary {
    pub modulus: ModulusClass,
    pub complex_pair: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoType {
    pub kind: TopoKind,
    pub table_case: String,
    /// Summary of the numerically computed multipliers of the full 3×3 Jacobian.
    pub eigen_summary: EigenSummary,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("fixed point {0} does not exist at these parameters")]
    NotExisting(FixedPointId),
    #[error("table case {case} gives {table} but the multipliers give {eigen}")]
    InternalDisagreement {
        case: String,
        table: TopoKind,
        eigen: TopoKind,
    },
}

/// Thresholds of the E₂ classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E2Thresholds {
    /// 2β² − 2β − 2√(β⁴ − 2β³); NaN for β < 2.
    pub gamma1: f64,
    /// 2β² − 2β + 2√(β⁴ − 2β³); NaN for β < 2.
    pub gamma2: f64,
    /// Axis of symmetry (2β − μ)/(2β) of the in-plane quadratic.
    pub t_star: f64,
    /// Discriminant μ² + 4βμ − 4β²μ + 4β² of β t² − (2β−μ) t + μ(β−2).
    pub disc: f64,
}

pub fn e2_thresholds(mu: f64, beta: f64) -> E2Thresholds {
    let rad = beta.powi(4) - 2.0 * beta.powi(3);
    let root = if rad >= 0.0 { rad.sqrt() } else { f64::NAN };
    E2Thresholds {
        gamma1: 2.0 * beta * beta - 2.0 * beta - 2.0 * root,
        gamma2: 2.0 * beta * beta - 2.0 * beta + 2.0 * root,
        t_star: (2.0 * beta - mu) / (2.0 * beta),
        disc: mu * mu + 4.0 * beta * mu - 4.0 * beta * beta * mu + 4.0 * beta * beta,
    }
}

/// μ on the E₂ flip curve, 3β/(3−β), for β < 3.
pub fn e2_flip_mu(beta: f64) -> f64 {
    3.0 * beta / (3.0 - beta)
}

/// μ on the E₂ Neimark-Sacker curve, β/(β−2), for β > 2.
pub fn e2_ns_mu(beta: f64) -> f64 {
    beta / (beta - 2.0)
}

fn kind_from_moduli(moduli: &[f64], complex_pair: bool) -> TopoKind {
    let on = moduli
        .iter()
        .any(|m| (m - 1.0).abs() <= NONHYPERBOLIC_TOL);
    if on {
        return TopoKind::NonHyperbolic;
    }
    let inside = moduli.iter().filter(|m| **m < 1.0).count();
    let all_in = inside == moduli.len();
    let all_out = inside == 0;
    match (complex_pair, all_in, all_out) {
        (false, true, _) => TopoKind::StableNode,
        (false, _, true) => TopoKind::UnstableNode,
        (false, _, _) => TopoKind::Saddle,
        (true, true, _) => TopoKind::StableFocusNode,
        (true, _, true) => TopoKind::UnstableFocusNode,
        (true, _, _) => TopoKind::SaddleFocus,
    }
}

fn summary(r: &RootTriple) -> EigenSummary {
    EigenSummary {
        modulus: modulus_class(r, NONHYPERBOLIC_TOL),
        complex_pair: r.has_complex_pair(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Below,
    On,
    Above,
}

fn side(value: f64, threshold: f64) -> Side {
    if (value - threshold).abs() <= NONHYPERBOLIC_TOL * threshold.abs().max(1.0) {
        Side::On
    } else if value < threshold {
        Side::Below
    } else {
        Side::Above
    }
}

fn check(case: &str, table: TopoKind, eigen: TopoKind) -> Result<(), ClassifyError> {
    if table == eigen {
        Ok(())
    } else {
        Err(ClassifyError::InternalDisagreement {
            case: case.to_string(),
            table,
            eigen,
        })
    }
}

pub fn classify_o(p: &ParamPoint) -> TopoType {
    let (case, kind) = match side(p.mu, 1.0) {
        Side::Below => ("𝐃₁", TopoKind::StableNode),
        Side::On => ("𝐋₁", TopoKind::NonHyperbolic),
        Side::Above => ("𝐃₂", TopoKind::Saddle),
    };
    let r = eigenvalues(&jacobian(record(FixedPointId::O, p).coords, p));
    debug_assert_eq!(kind, kind_from_moduli(&[p.mu, 0.0, 0.0], false));
    TopoType {
        kind,
        table_case: case.to_string(),
        eigen_summary: summary(&r),
    }
}

fn e1_table(p: &ParamPoint) -> (&'static str, TopoKind) {
    let beta_side = side(p.beta, e1_e2_threshold(p.mu));
    match side(p.mu, 3.0) {
        Side::On => ("𝓛₂", TopoKind::NonHyperbolic),
        Side::Below => match beta_side {
            Side::Below => ("𝒟₁", TopoKind::StableNode),
            Side::On => ("𝓛₁", TopoKind::NonHyperbolic),
            Side::Above => ("𝒟₃₁", TopoKind::Saddle),
        },
        Side::Above => match beta_side {
            Side::Below => ("𝒟₃₂", TopoKind::Saddle),
            Side::On => ("𝓛₃", TopoKind::NonHyperbolic),
            Side::Above => ("𝒟₂", TopoKind::UnstableNode),
        },
    }
}

pub fn classify_e1(p: &ParamPoint) -> Result<TopoType, ClassifyError> {
    let rec = record(FixedPointId::E1, p);
    if !rec.exists {
        return Err(ClassifyError::NotExisting(FixedPointId::E1));
    }
    let (case, kind) = e1_table(p);
    let varying = [(2.0 - p.mu).abs(), (p.beta * (p.mu - 1.0) / p.mu).abs()];
    check(case, kind, kind_from_moduli(&varying, false))?;
    Ok(TopoType {
        kind,
        table_case: case.to_string(),
        eigen_summary: summary(&rec.eigen),
    })
}

type Row = (&'static str, TopoKind);

/// One μ-band of the E₂ table: the case below, on and above the λ threshold.
fn by_lambda(lambda_side: Side, below: Row, on: &'static str, above: Row) -> Row {
    match lambda_side {
        Side::Below => below,
        Side::On => (on, TopoKind::NonHyperbolic),
        Side::Above => above,
    }
}

/// Table lookup for E₂. Returns the case label and the listed type.
pub fn e2_table_case(p: &ParamPoint) -> (&'static str, TopoKind) {
    use TopoKind::*;
    let (mu, beta) = (p.mu, p.beta);
    if side(mu, beta / (beta - 1.0)) == Side::On {
        return ("𝔏(E₁=E₂)", NonHyperbolic);
    }
    let th = e2_thresholds(mu, beta);
    let ls = side(p.lambda, mu * beta / (mu * beta - mu - beta));
    let flip = e2_flip_mu(beta);
    let ns = e2_ns_mu(beta);

    if beta <= 1.5 {
        return by_lambda(ls, ("𝔇₃₁", Saddle), "𝔏₁₁", ("𝔇₃₂", Saddle));
    }
    if beta <= 2.0 {
        return match side(mu, flip) {
            Side::Below => by_lambda(ls, ("𝔇₁₁", StableNode), "𝔏₂₁", ("𝔇₃₃", Saddle)),
            Side::On => ("𝔏₂₂", NonHyperbolic),
            Side::Above => by_lambda(ls, ("𝔇₃₄", Saddle), "𝔏₁₃", ("𝔇₃₅", Saddle)),
        };
    }
    let beta_94 = side(beta, 2.25);
    if beta_94 == Side::Below {
        if mu <= th.gamma1 {
            return by_lambda(ls, ("𝔇₁₂", StableNode), "𝔏₁₄", ("𝔇₃₆", Saddle));
        }
        if mu < th.gamma2 {
            return by_lambda(ls, ("𝔇₅₁", StableFocusNode), "𝔏₁₅", ("𝔇₆₁", SaddleFocus));
        }
        return match side(mu, flip) {
            Side::Below => by_lambda(ls, ("𝔇₁₃", StableNode), "𝔏₁₆", ("𝔇₃₇", Saddle)),
            Side::On => ("𝔏₂₃", NonHyperbolic),
            Side::Above => by_lambda(ls, ("𝔇₃₈", Saddle), "𝔏₁₇", ("𝔇₃₉", Saddle)),
        };
    }
    if beta_94 == Side::On {
        if mu <= th.gamma1 {
            return by_lambda(ls, ("𝔇₁₄", StableNode), "𝔏₁₈", ("𝔇₄₁", Saddle));
        }
        return match side(mu, 9.0) {
            Side::Below => by_lambda(ls, ("𝔇₅₂", StableFocusNode), "𝔏₁₉", ("𝔇₆₂", SaddleFocus)),
            Side::On => ("𝔏₂₄", NonHyperbolic),
            Side::Above => by_lambda(ls, ("𝔇₄₂", Saddle), "𝔏₁₋₁₀", ("𝔇₄₃", Saddle)),
        };
    }
    if beta < 3.0 {
        if mu <= th.gamma1 {
            return by_lambda(ls, ("𝔇₁₅", StableNode), "𝔏₁₋₁₁", ("𝔇₄₄", Saddle));
        }
        match side(mu, ns) {
            Side::Below => {
                return by_lambda(ls, ("𝔇₅₃", StableFocusNode), "𝔏₁₋₁₂", ("𝔇₆₃", SaddleFocus))
            }
            Side::On => return ("𝔏₃₁", NonHyperbolic),
            Side::Above => {}
        }
        if mu < th.gamma2 {
            return by_lambda(ls, ("𝔇₆₄", SaddleFocus), "𝔏₁₋₁₃", ("𝔇₇₁", UnstableFocusNode));
        }
        return match side(mu, flip) {
            Side::Below => by_lambda(ls, ("𝔇₄₅", Saddle), "𝔏₁₋₁₄", ("𝔇₂₁", UnstableNode)),
            Side::On => ("𝔏₂₅", NonHyperbolic),
            Side::Above => by_lambda(ls, ("𝔇₄₆", Saddle), "𝔏₁₋₁₅", ("𝔇₄₇", Saddle)),
        };
    }
    if mu <= th.gamma1 {
        return by_lambda(ls, ("𝔇₁₆", StableNode), "𝔏₁₋₁₆", ("𝔇₄₈", Saddle));
    }
    match side(mu, ns) {
        Side::Below => by_lambda(ls, ("𝔇₅₄", StableFocusNode), "𝔏₁₋₁₇", ("𝔇₆₅", SaddleFocus)),
        Side::On => ("𝔏₃₂", NonHyperbolic),
        Side::Above if mu < th.gamma2 => {
            by_lambda(ls, ("𝔇₆₆", SaddleFocus), "𝔏₁₋₁₈", ("𝔇₇₂", UnstableFocusNode))
        }
        Side::Above => by_lambda(ls, ("𝔇₄₉", Saddle), "𝔏₁₋₁₉", ("𝔇₂₂", UnstableNode)),
    }
}

/// Type of E₂ read directly from the multipliers: λ(βμ−β−μ)/(βμ) and the
/// roots t₁,₂ = (2β − μ ± √Δ)/(2β) of the in-plane quadratic.
pub fn e2_eigen_kind(p: &ParamPoint) -> TopoKind {
    let (lambda, mu, beta) = (p.lambda, p.mu, p.beta);
    let nu3 = lambda * (beta * mu - beta - mu) / (beta * mu);
    let th = e2_thresholds(mu, beta);
    if th.disc < 0.0 {
        let modulus = (mu * (beta - 2.0) / beta).sqrt();
        kind_from_moduli(&[nu3.abs(), modulus, modulus], true)
    } else {
        let s = th.disc.sqrt();
        let t1 = (2.0 * beta - mu + s) / (2.0 * beta);
        let t2 = (2.0 * beta - mu - s) / (2.0 * beta);
        kind_from_moduli(&[nu3.abs(), t1.abs(), t2.abs()], false)
    }
}

pub fn classify_e2(p: &ParamPoint) -> Result<TopoType, ClassifyError> {
    let rec = record(FixedPointId::E2, p);
    if !rec.exists {
        return Err(ClassifyError::NotExisting(FixedPointId::E2));
    }
    let (case, kind) = e2_table_case(p);
    check(case, kind, e2_eigen_kind(p))?;
    Ok(TopoType {
        kind,
        table_case: case.to_string(),
        eigen_summary: summary(&rec.eigen),
    })
}

/// Sink test for E₃ in the form −t³ + D₁t² + D₂t + D₃.
#[derive(Debug, Clone, PartialEq)]
pub struct E3SinkReport {
    pub sink: bool,
    /// (D₁, D₂, D₃) of the characteristic polynomial of JF(E₃).
    pub d: (f64, f64, f64),
    /// The three inequalities evaluated on `d`.
    pub jury: bool,
    /// Direct test: every multiplier strictly inside the unit circle.
    pub all_inside: bool,
    pub non_hyperbolic: bool,
    pub eigen: RootTriple,
    /// Printed closed forms of (D₁, D₂, D₃) and the printed triple on them.
    pub paper_d: (f64, f64, f64),
    pub paper_triple: bool,
}

/// All roots of −t³ + D₁t² + D₂t + D₃ lie strictly inside the unit circle.
///
/// Written for the monic t³ + a t² + b t + c with (a, b, c) = (−D₁, −D₂, −D₃):
/// |a + c| < 1 + b, |a − 3c| < 3 − b, c² − ac + b < 1.
pub fn jury_inside(d1: f64, d2: f64, d3: f64) -> bool {
    (d1 + d3).abs() < 1.0 - d2 && (d1 - 3.0 * d3).abs() < 3.0 + d2 && d3 * d3 - d1 * d3 - d2 < 1.0
}

/// The printed triple |D₁+D₃| < 1+D₂, |D₁−3D₃| < 3−D₂, D₃² + D₂ − D₃D₂ < 1.
pub fn paper_jury_triple(d1: f64, d2: f64, d3: f64) -> bool {
    (d1 + d3).abs() < 1.0 + d2 && (d1 - 3.0 * d3).abs() < 3.0 - d2 && d3 * d3 + d2 - d3 * d2 < 1.0
}

/// Printed closed forms of D₁, D₂, D₃ in terms of a₁ = −μx₃ and a₂ = λz₃.
pub fn paper_e3_coefficients(p: &ParamPoint) -> (f64, f64, f64) {
    let (lambda, mu, beta) = (p.lambda, p.mu, p.beta);
    let a1 = -mu / 2.0 * (1.0 - 1.0 / lambda - 1.0 / mu + 1.0 / beta);
    let a2 = lambda / 2.0 * (1.0 - 1.0 / lambda - 1.0 / mu - 1.0 / beta);
    let d1 = 1.0 + a1;
    let d2 = 1.0 - 2.0 * a1 + beta * (a1 - a2) / lambda;
    let d3 = -1.0 + a1 - beta * a2 / lambda + (2.0 * a2 - 1.0) * beta * a1 / lambda;
    (d1, d2, d3)
}

pub fn classify_e3_sink(p: &ParamPoint) -> Result<E3SinkReport, ClassifyError> {
    let rec = record(FixedPointId::E3, p);
    if !rec.exists {
        return Err(ClassifyError::NotExisting(FixedPointId::E3));
    }
    let cubic = char_poly(&jacobian(rec.coords, p));
    // det(tI − J) = t³ − D₁t² − D₂t − D₃.
    let d = (-cubic.c2, -cubic.c1, -cubic.c0);
    let jury = jury_inside(d.0, d.1, d.2);
    let moduli = rec.eigen.moduli();
    let non_hyperbolic = moduli
        .iter()
        .any(|m| (m - 1.0).abs() <= NONHYPERBOLIC_TOL);
    let all_inside = moduli.iter().all(|m| *m < 1.0);
    if !non_hyperbolic && jury != all_inside {
        return Err(ClassifyError::InternalDisagreement {
            case: "E3 sink".to_string(),
            table: if jury { TopoKind::StableNode } else { TopoKind::Saddle },
            eigen: if all_inside { TopoKind::StableNode } else { TopoKind::Saddle },
        });
    }
    let paper_d = paper_e3_coefficients(p);
    Ok(E3SinkReport {
        sink: jury && !non_hyperbolic,
        d,
        jury,
        all_inside,
        non_hyperbolic,
        eigen: rec.eigen,
        paper_d,
        paper_triple: paper_jury_triple(paper_d.0, paper_d.1, paper_d.2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(lambda: f64, mu: f64, beta: f64) -> ParamPoint {
        ParamPoint::new(lambda, mu, beta).unwrap()
    }

    #[test]
    fn origin_table() {
        assert_eq!(classify_o(&pp(1.0, 0.5, 1.0)).table_case, "𝐃₁");
        assert_eq!(classify_o(&pp(1.0, 1.0, 1.0)).kind, TopoKind::NonHyperbolic);
        let o = classify_o(&pp(1.0, 2.0, 1.0));
        assert_eq!((o.kind, o.table_case.as_str()), (TopoKind::Saddle, "𝐃₂"));
    }

    #[test]
    fn e1_table_examples() {
        let a = classify_e1(&pp(1.0, 2.0, 1.0)).unwrap();
        assert_eq!((a.kind, a.table_case.as_str()), (TopoKind::StableNode, "𝒟₁"));
        for beta in [0.3, 1.5, 7.0] {
            let b = classify_e1(&pp(1.0, 3.0, beta)).unwrap();
            assert_eq!((b.kind, b.table_case.as_str()), (TopoKind::NonHyperbolic, "𝓛₂"));
        }
        let c = classify_e1(&pp(1.0, 4.0, 2.0)).unwrap();
        assert_eq!((c.kind, c.table_case.as_str()), (TopoKind::UnstableNode, "𝒟₂"));
        assert_eq!(
            classify_e1(&pp(1.0, 0.9, 2.0)),
            Err(ClassifyError::NotExisting(FixedPointId::E1))
        );
    }

    #[test]
    fn e2_table_examples() {
        let a = classify_e2(&pp(2.0, 4.0, 1.4)).unwrap();
        assert_eq!((a.kind, a.table_case.as_str()), (TopoKind::Saddle, "𝔇₃₁"));
        let b = classify_e2(&pp(2.0, 3.0, 1.8)).unwrap();
        assert_eq!((b.kind, b.table_case.as_str()), (TopoKind::StableNode, "𝔇₁₁"));
        let beta = 2.734;
        let c = classify_e2(&pp(4.444, e2_ns_mu(beta), beta)).unwrap();
        assert_eq!((c.kind, c.table_case.as_str()), (TopoKind::NonHyperbolic, "𝔏₃₁"));
    }

    #[test]
    fn flip_curve_reading_hits_the_flip_point() {
        // (μ, β) = (6, 2) lies on μ = 3β/(3−β).
        assert!((e2_flip_mu(2.0) - 6.0).abs() < 1e-15);
        let t = classify_e2(&pp(1.0, 6.0, 2.0)).unwrap();
        assert_eq!(t.table_case, "𝔏₂₂");
    }

    #[test]
    fn chaos_parameters_are_an_unstable_focus_node() {
        let t = classify_e2(&pp(9.14, 2.5, 3.36)).unwrap();
        assert_eq!(t.kind, TopoKind::UnstableFocusNode);
        assert_eq!(t.eigen_summary.modulus.n_outside, 3);
    }

    #[test]
    fn gamma_window_ordering() {
        let mut beta = 2.2501;
        while beta < 12.0 {
            let th = e2_thresholds(1.0, beta);
            assert!(th.gamma1 < e2_ns_mu(beta) && e2_ns_mu(beta) < th.gamma2, "β = {beta}");
            beta += 0.01;
        }
    }

    #[test]
    fn e3_sink_agrees_with_multipliers() {
        let r = classify_e3_sink(&pp(4.0, 3.0, 3.0)).unwrap();
        assert!(r.sink && r.all_inside);
        let r = classify_e3_sink(&pp(4.0, 3.0, 4.0)).unwrap();
        assert!(!r.sink && !r.all_inside);
        assert!(matches!(
            classify_e3_sink(&pp(1.5, 3.0, 4.0)),
            Err(ClassifyError::NotExisting(FixedPointId::E3))
        ));
    }

    #[test]
    fn e3_boundary_by_bisection_is_non_hyperbolic() {
        let (mu, beta) = (3.0, 3.0);
        let max_modulus = |lambda: f64| classify_e3_sink(&pp(lambda, mu, beta)).unwrap().eigen.max_modulus();
        let (mut lo, mut hi) = (4.0, 40.0);
        assert!(max_modulus(lo) < 1.0 && max_modulus(hi) > 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if max_modulus(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = classify_e3_sink(&pp(lo, mu, beta)).unwrap();
        assert!(r.non_hyperbolic);
        assert!(!r.sink);
    }
}
