use nalgebra::Matrix3 as NMatrix3;
use num_complex::Complex64;
use proptest::prelude::*;
use tritrophic::classification::{classify_e1, classify_e2, classify_o, jury_inside, TopoKind};
use tritrophic::core_map::{jacobian_n, step_n};
use tritrophic::fixed_points::{e2_coords, record, residual};
use tritrophic::marotto_chaos::{expanding_at, expanding_box, BoxConfig};
use tritrophic::spectra::{solve_cubic, Cubic};
use tritrophic::{fixed_points, jacobian, step, FixedPointId, ParamPoint, State3};

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

fn params() -> impl Strategy<Value = ParamPoint> {
    (log_uniform(0.1, 10.0), log_uniform(0.1, 10.0), log_uniform(0.1, 10.0))
        .prop_map(|(l, m, b)| ParamPoint::new(l, m, b).unwrap())
}

/// Points where E₂ exists: β > 10/9 and β/(β−1) ≤ μ ≤ 10.
fn e2_params() -> impl Strategy<Value = ParamPoint> {
    (log_uniform(0.1, 10.0), log_uniform(1.12, 10.0), 0.0f64..1.0).prop_map(|(l, b, u)| {
        let lo = (b / (b - 1.0)).ln();
        let mu = (lo + u * (10f64.ln() - lo)).exp();
        ParamPoint::new(l, mu, b).unwrap()
    })
}

fn unit_state() -> impl Strategy<Value = State3> {
    (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(x, y, z)| State3::new(x, y, z))
}

/// Eigenvalues of the companion matrix of t³ + a t² + b t + c.
fn companion_roots(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    let m = NMatrix3::new(0.0, 0.0, -c, 1.0, 0.0, -b, 0.0, 1.0, -a);
    m.complex_eigenvalues().iter().copied().collect()
}

fn oracle_moduli(j: &tritrophic::Matrix3) -> Vec<Complex64> {
    let m = NMatrix3::from_fn(|r, c| j[(r, c)]);
    m.complex_eigenvalues().iter().copied().collect()
}

/// Largest distance from a root in `a` to its nearest partner in `b`, both ways.
fn set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |u: &[Complex64], v: &[Complex64]| {
        u.iter()
            .map(|x| v.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

fn kind_of(multipliers: &[Complex64]) -> Option<TopoKind> {
    if multipliers.iter().any(|t| (t.norm() - 1.0).abs() < 1e-6) {
        return None;
    }
    let complex = multipliers.iter().any(|t| t.im.abs() > 1e-9);
    let inside = multipliers.iter().filter(|t| t.norm() < 1.0).count();
    let kind = match (complex, inside) {
        (false, n) if n == multipliers.len() => TopoKind::StableNode,
        (false, 0) => TopoKind::UnstableNode,
        (false, _) => TopoKind::Saddle,
        (true, n) if n == multipliers.len() => TopoKind::StableFocusNode,
        (true, 0) => TopoKind::UnstableFocusNode,
        (true, _) => TopoKind::SaddleFocus,
    };
    Some(kind)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jacobian_matches_central_differences(s in unit_state(), p in params()) {
        let j = jacobian(s, &p);
        let h = 1e-6;
        for k in 0..3 {
            let mut up = s.to_vector();
            let mut dn = s.to_vector();
            up[k] += h;
            dn[k] -= h;
            let d = (step(State3::from_vector(&up), &p).to_vector()
                - step(State3::from_vector(&dn), &p).to_vector())
                / (2.0 * h);
            for r in 0..3 {
                let exact = j[(r, k)];
                prop_assert!((d[r] - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                    "J[{r},{k}] = {exact}, difference quotient {}", d[r]);
            }
        }
    }

    #[test]
    fn plane_z0_is_invariant_and_origin_fixed(s in unit_state(), p in params()) {
        prop_assert_eq!(step(State3::new(s.x, s.y, 0.0), &p).z, 0.0);
        prop_assert_eq!(step(State3::default(), &p), State3::default());
    }

    #[test]
    fn existing_fixed_points_are_fixed(p in params()) {
        for r in fixed_points(&p).into_iter().filter(|r| r.exists) {
            prop_assert!(residual(r.coords, &p) < 1e-12, "{:?} residual {}", r.id, residual(r.coords, &p));
        }
    }

    #[test]
    fn det_of_two_step_jacobian_is_product(s in unit_state(), p in params()) {
        let (_, j2) = jacobian_n(s, &p, 2);
        let product = jacobian(step(s, &p), &p).determinant() * jacobian(s, &p).determinant();
        prop_assert!((j2.determinant() - product).abs() <= 1e-9 * product.abs().max(1.0));
        prop_assert_eq!(step_n(s, &p, 2), step(step(s, &p), &p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn cubic_roots_match_companion_oracle(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
        let r = solve_cubic(&Cubic::new(1.0, a, b, c)).unwrap();
        let oracle = companion_roots(a, b, c);
        // Root error grows like eps/separation; skip the rare near-coincident triples.
        let sep = (0..3)
            .flat_map(|i| (i + 1..3).map(move |k| (i, k)))
            .map(|(i, k)| (oracle[i] - oracle[k]).norm())
            .fold(f64::INFINITY, f64::min);
        prop_assume!(sep > 1e-4);
        let d = set_distance(&r.roots, &oracle);
        prop_assert!(d < 1e-10, "roots {:?} vs oracle {:?}: {d:e}", r.roots, oracle);
    }

    #[test]
    fn vieta_relations(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0, k in 0.1f64..5.0) {
        let r = solve_cubic(&Cubic::new(k, k * a, k * b, k * c)).unwrap();
        let [t1, t2, t3] = r.roots;
        let scale = 1.0 + a.abs().max(b.abs()).max(c.abs());
        prop_assert!(((t1 + t2 + t3).re + a).abs() <= 1e-9 * scale);
        prop_assert!(((t1 * t2 + t1 * t3 + t2 * t3).re - b).abs() <= 1e-9 * scale * scale);
        prop_assert!(((t1 * t2 * t3).re + c).abs() <= 1e-9 * scale * scale);
        prop_assert!((t1 + t2 + t3).im.abs() <= 1e-9 * scale);
        if r.discriminant < 0.0 {
            prop_assert!(r.roots.iter().all(|t| t.im == 0.0));
        }
    }

    #[test]
    fn jury_triple_iff_roots_inside(
        ts in prop_oneof![
            // Roots spread over the disc of radius 1.5, so both answers are common.
            (-1.5f64..1.5, 0.0f64..1.5, 0.0f64..std::f64::consts::PI).prop_map(|(r, rho, th)| {
                vec![Complex64::new(r, 0.0), Complex64::from_polar(rho, th), Complex64::from_polar(rho, -th)]
            }),
            (-1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b, c)| {
                vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0), Complex64::new(c, 0.0)]
            }),
        ]
    ) {
        let s1 = ts[0] + ts[1] + ts[2];
        let s2 = ts[0] * ts[1] + ts[0] * ts[2] + ts[1] * ts[2];
        let s3 = ts[0] * ts[1] * ts[2];
        // t³ − s1 t² + s2 t − s3 = −(−t³ + D₁t² + D₂t + D₃) with D = (s1, −s2, s3).
        let (d1, d2, d3) = (s1.re, -s2.re, s3.re);
        let max_mod = ts.iter().map(|t| t.norm()).fold(0.0, f64::max);
        prop_assume!((max_mod - 1.0).abs() > 1e-9);
        prop_assert_eq!(jury_inside(d1, d2, d3), max_mod < 1.0, "roots {:?}", ts);
    }

    #[test]
    fn classification_tables_agree_with_multipliers(p in params(), q in e2_params()) {
        let o = classify_o(&p);
        let rec = record(FixedPointId::O, &p);
        if let Some(k) = kind_of(&oracle_moduli(&jacobian(rec.coords, &p))) {
            prop_assert_eq!(o.kind, k);
        }
        let rec = record(FixedPointId::E1, &p);
        if rec.exists {
            // The table types E₁ by its two non-structural multipliers; the z
            // multiplier λ·y* vanishes identically there.
            let ts: Vec<Complex64> = oracle_moduli(&jacobian(rec.coords, &p))
                .into_iter()
                .filter(|t| t.norm() > 1e-12)
                .collect();
            let got = classify_e1(&p);
            if let Some(k) = (ts.len() == 2).then(|| kind_of(&ts)).flatten() {
                prop_assert_eq!(got.expect("E1 classification").kind, k);
            }
        }
        for pt in [p, q] {
            let rec = record(FixedPointId::E2, &pt);
            if !rec.exists {
                continue;
            }
            let got = classify_e2(&pt);
            if let Some(k) = kind_of(&oracle_moduli(&jacobian(rec.coords, &pt))) {
                prop_assert_eq!(got.expect("E2 classification").kind, k, "at {:?}", pt);
            }
        }
    }

    #[test]
    fn radical_characterization_matches_moduli(s in unit_state(), p in params()) {
        let r = expanding_at(s, &p, 0.0);
        prop_assume!(r.delta_bar.abs() > 1e-10 && (r.min_modulus - 1.0).abs() > 1e-9);
        if r.delta_bar > 0.0 {
            prop_assert_eq!(r.radical.expanding(), r.expanding, "Δ̄ = {}, min |t| = {}", r.delta_bar, r.min_modulus);
        } else {
            // Three real roots: the radical form does not apply and must not claim expansion.
            prop_assert!(!r.radical.expanding());
        }
        prop_assert!(r.radical_agrees() || r.delta_bar < 0.0);
    }
}

#[test]
fn expanding_box_revalidates_on_random_samples() {
    use rand::{Rng, SeedableRng};
    let p = ParamPoint::new(9.14, 2.5, 3.36).unwrap();
    let bx = expanding_box(&p, e2_coords(&p), &BoxConfig::default()).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let s = State3::new(
            rng.gen_range(bx.lo.x..=bx.hi.x),
            rng.gen_range(bx.lo.y..=bx.hi.y),
            rng.gen_range(bx.lo.z..=bx.hi.z),
        );
        let r = expanding_at(s, &p, 0.0);
        worst = worst.min(r.min_modulus);
        assert!(r.expanding, "not expanding at {s:?}: min |t| = {}", r.min_modulus);
    }
    assert!(worst > 1.0);
}
