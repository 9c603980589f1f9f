use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, Result};
use tritrophic::arnold_tongue::{
    circle_seeds, find_period_m_orbits, tongue_coeffs, tongue_membership, PeriodMOrbit,
};
use tritrophic::classification::{classify_e1, classify_e2, classify_e3_sink, classify_o};
use tritrophic::codim1::{flip_coeffs, ns_diagnostic, transcritical_coeffs};
use tritrophic::dynamics_lab::{bifurcation_sweep, lyapunov_spectrum, Axis, SweepConfig};
use tritrophic::fixed_points::{e2_coords, FixedPointId};
use tritrophic::marotto_chaos::{
    expanding_at, expanding_box, region_w, snapback_search, BoxConfig, SnapBackConfig,
};
use tritrophic::resonance::{
    detect_strong_resonance, integrate_normal_form, r12_constants, r12_pipeline, r13_constants,
    r13_pipeline, r14_constants, r14_pipeline, PlanarSystem,
};
use tritrophic::{fixed_points, iterate, ParamPoint, State3};

use crate::output::{emit, Cell, RunConfig, Table};
use crate::{AxisArg, Codim1Kind, Command, Init, OdeSystem, Out, Params, PointArg, ResonanceArg};

/// Invalid combination of otherwise well-formed flags; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn point(p: &Params) -> Result<ParamPoint> {
    ParamPoint::new(p.lambda, p.mu, p.beta).map_err(|e| usage(e.to_string()))
}

fn state(i: &Init) -> State3 {
    State3::new(i.x0, i.y0, i.z0)
}

fn id_of(a: PointArg) -> FixedPointId {
    match a {
        PointArg::O => FixedPointId::O,
        PointArg::E1 => FixedPointId::E1,
        PointArg::E2 => FixedPointId::E2,
    }
}

fn write(table: Table, config: RunConfig, out: &Out, summary: &mut String) -> Result<()> {
    let path = out
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", config.command, out.format.extension())));
    emit(table, config, out.format, &path)?;
    let _ = writeln!(summary, "wrote {}", path.display());
    Ok(())
}

fn kv(k: &str, v: impl Into<Cell>) -> (String, Cell) {
    (k.to_string(), v.into())
}

pub fn run(command: Command, config: RunConfig) -> Result<String> {
    let mut s = String::new();
    match command {
        Command::FixedPoints { params, out } => {
            let p = point(&params)?;
            let mut t = Table::new(["point", "exists", "x", "y", "z", "mod1", "mod2", "mod3"]);
            for r in fixed_points(&p) {
                let m = r.eigen.moduli();
                let c = r.coords;
                let _ = writeln!(
                    s,
                    "{:<3} exists={:<5} ({:.10}, {:.10}, {:.10})  |t| = {:.6}, {:.6}, {:.6}",
                    r.id, r.exists, c.x, c.y, c.z, m[0], m[1], m[2]
                );
                t.push(vec![
                    r.id.to_string().into(),
                    r.exists.into(),
                    c.x.into(),
                    c.y.into(),
                    c.z.into(),
                    m[0].into(),
                    m[1].into(),
                    m[2].into(),
                ]);
            }
            write(t, config, &out, &mut s)?;
        }
        Command::Classify { params, out } => {
            let p = point(&params)?;
            let mut t = Table::new(["point", "kind", "case", "mod1", "mod2", "mod3"]);
            let records = fixed_points(&p);
            for r in records.iter().filter(|r| r.exists) {
                let m = r.eigen.moduli();
                let (kind, case) = match r.id {
                    FixedPointId::O => {
                        let c = classify_o(&p);
                        (c.kind.to_string(), c.table_case)
                    }
                    FixedPointId::E1 => {
                        let c = classify_e1(&p)?;
                        (c.kind.to_string(), c.table_case)
                    }
                    FixedPointId::E2 => {
                        let c = classify_e2(&p)?;
                        (c.kind.to_string(), c.table_case)
                    }
                    FixedPointId::E3 => {
                        let c = classify_e3_sink(&p)?;
                        let kind = if c.sink { "sink" } else { "not a sink" };
                        (kind.to_string(), "Jury".to_string())
                    }
                };
                let _ = writeln!(
                    s,
                    "{:<3} {kind} [{case}]  |t| = {:.6}, {:.6}, {:.6}",
                    r.id, m[0], m[1], m[2]
                );
                t.push(vec![
                    r.id.to_string().into(),
                    kind.into(),
                    case.into(),
                    m[0].into(),
                    m[1].into(),
                    m[2].into(),
                ]);
            }
            write(t, config, &out, &mut s)?;
        }
        Command::Codim1 {
            params,
            kind,
            at,
            out,
        } => {
            let p = point(&params)?;
            let d = match kind {
                Codim1Kind::Transcritical => {
                    transcritical_coeffs(id_of(at.unwrap_or(PointArg::O)), &p)?
                }
                Codim1Kind::Flip => flip_coeffs(id_of(at.unwrap_or(PointArg::E1)), &p)?,
                Codim1Kind::Ns => {
                    if at.is_some_and(|a| a != PointArg::E2) {
                        return Err(usage("the Neimark-Sacker diagnostic lives at E2"));
                    }
                    ns_diagnostic(&p)?
                }
            };
            let _ = writeln!(s, "{:?} at {} (offset {:+.3e})", d.kind, d.at, d.offset);
            for (label, v) in &d.coeffs {
                let _ = writeln!(s, "  {label:<26} {v:.12}");
            }
            if let Some(c) = d.criticality {
                let _ = writeln!(s, "  criticality: {c:?}");
            }
            let mut rows: Vec<(String, Cell)> = d.coeffs.iter().map(|(l, v)| kv(l, *v)).collect();
            rows.push(kv("offset", d.offset));
            if let Some(c) = d.criticality {
                rows.push(kv("criticality", format!("{c:?}")));
            }
            write(Table::pairs(rows), config, &out, &mut s)?;
        }
        Command::Resonance {
            lambda,
            mu,
            beta,
            kind,
            tol,
            out,
        } => {
            let mut rows = Vec::new();
            match (kind, lambda, mu, beta) {
                (Some(kind), _, _, _) => resonance_constants(kind, &mut rows, &mut s),
                (None, Some(l), Some(m), Some(b)) => {
                    let p = ParamPoint::new(l, m, b).map_err(|e| usage(e.to_string()))?;
                    match detect_strong_resonance(&p, tol) {
                        Some(r) => {
                            let _ = writeln!(s, "{:?} at (μ, β) = {:?}", r.kind, r.critical);
                            for (i, t) in r.eigenpair.iter().enumerate() {
                                let _ = writeln!(s, "  t{} = {:.12} {:+.12}i", i + 1, t.re, t.im);
                                rows.push(kv(&format!("t{}_re", i + 1), t.re));
                                rows.push(kv(&format!("t{}_im", i + 1), t.im));
                            }
                            rows.insert(0, kv("kind", format!("{:?}", r.kind)));
                            for (l, v) in &r.constants {
                                let _ = writeln!(s, "  {l:<20} {v:.12}");
                                rows.push(kv(l, *v));
                            }
                            rows.push(kv("transversality_det", r.transversality_det));
                        }
                        None => {
                            let _ = writeln!(s, "no strong resonance within {tol:e}");
                            rows.push(kv("kind", "none"));
                        }
                    }
                }
                _ => return Err(usage("give --kind, or all of --lambda --mu --beta")),
            }
            write(Table::pairs(rows), config, &out, &mut s)?;
        }
        Command::Tongue {
            n,
            m,
            mu,
            beta,
            lambda,
            out,
        } => {
            let spec = tongue_coeffs(n, m)?;
            let (ms, bs) = spec.critical;
            let e = (m as f64 - 2.0) / 2.0;
            let _ = writeln!(s, "β* = {bs:.9}, μ* = {ms:.9}");
            let _ = writeln!(s, "ρ̌₃(0) = {:.9}, ρ̃₂(0) = {:.10}, |ς(0)| = {:.8}", spec.rho3_0, spec.rho2_0, spec.sigma0_abs);
            let _ = writeln!(
                s,
                "T± ≈ {:.10}·χ₁ ± {:.8}·χ₁^{e},  χ₁ = √(μ(β−2)/β) − 1",
                spec.centre_slope(),
                spec.half_width(1.0)
            );
            let mut rows = vec![
                kv("beta_star", bs),
                kv("mu_star", ms),
                kv("rho3_0", spec.rho3_0),
                kv("rho2_0", spec.rho2_0),
                kv("sigma0_abs", spec.sigma0_abs),
                kv("rho3_pipeline", spec.rho3_pipeline),
                kv("rho2_pipeline", spec.rho2_pipeline),
                kv("centre_slope", spec.centre_slope()),
                kv("half_width_coefficient", spec.half_width(1.0)),
            ];
            if let (Some(mu), Some(beta)) = (mu, beta) {
                let t = tongue_membership(&spec, mu, beta)?;
                let _ = writeln!(
                    s,
                    "at (μ, β) = ({mu}, {beta}): χ₁ = {:.6e}, χ₂ = {:.6e}, T₋ = {:.6e}, T₊ = {:.6e}, inside = {}, inside (consistent χ₂ sign) = {}",
                    t.chi1, t.chi2, t.t_minus, t.t_plus, t.inside, t.inside_consistent
                );
                rows.extend([
                    kv("chi1", t.chi1),
                    kv("chi2", t.chi2),
                    kv("t_minus", t.t_minus),
                    kv("t_plus", t.t_plus),
                    kv("inside", t.inside),
                    kv("inside_consistent", t.inside_consistent),
                ]);
                if let Some(lambda) = lambda {
                    let p = ParamPoint::new(lambda, mu, beta).map_err(|e| usage(e.to_string()))?;
                    let pair = find_period_m_orbits(&p, m, &circle_seeds(&p, m))?;
                    for (name, o) in [("stable", &pair.stable_orbit), ("saddle", &pair.saddle_orbit)] {
                        describe_orbit(name, o, &mut rows, &mut s);
                    }
                }
            }
            write(Table::pairs(rows), config, &out, &mut s)?;
        }
        Command::Marotto {
            params,
            box_grid,
            chain,
            out,
        } => {
            let p = point(&params)?;
            let e2 = e2_coords(&p);
            let ex = expanding_at(e2, &p, 0.0);
            let w = region_w(&p);
            let _ = writeln!(s, "E2 = ({:.10}, {:.10}, {:.10})", e2.x, e2.y, e2.z);
            let _ = writeln!(s, "expanding = {} (smallest |t| = {:.8})", ex.expanding, ex.min_modulus);
            let _ = writeln!(s, "region W = {} (margins {:?})", w.in_region, w.margins);
            let bx = expanding_box(
                &p,
                e2,
                &BoxConfig {
                    grid: box_grid,
                    ..BoxConfig::default()
                },
            )?;
            let c = snapback_search(&p, e2, &bx, &SnapBackConfig { chain, ..SnapBackConfig::default() })?;
            let ep = c.e_prime();
            let epp = c.e_double_prime().unwrap_or(ep);
            let _ = writeln!(
                s,
                "box x∈[{:.6}, {:.6}] y∈[{:.6}, {:.6}] z∈[{:.6}, {:.6}]",
                bx.lo.x, bx.hi.x, bx.lo.y, bx.hi.y, bx.lo.z, bx.hi.z
            );
            let _ = writeln!(s, "E′ = ({:.10}, {:.10}, {:.10}), E″ = ({:.10}, {:.10}, {:.10})", ep.x, ep.y, ep.z, epp.x, epp.y, epp.z);
            let _ = writeln!(
                s,
                "residual = {:.3e}, det DF^{} = {:.8}, in box = {}, valid = {}",
                c.residual, c.chain, c.det_df, c.in_box, c.valid
            );
            let cols = [
                "e_prime_x", "e_prime_y", "e_prime_z", "e_dd_x", "e_dd_y", "e_dd_z", "residual",
                "det_df2", "in_box", "valid", "box_lo_x", "box_lo_y", "box_lo_z", "box_hi_x",
                "box_hi_y", "box_hi_z", "expanding", "region_w",
            ];
            let mut t = Table::new(cols);
            t.push(vec![
                ep.x.into(),
                ep.y.into(),
                ep.z.into(),
                epp.x.into(),
                epp.y.into(),
                epp.z.into(),
                c.residual.into(),
                c.det_df.into(),
                c.in_box.into(),
                c.valid.into(),
                bx.lo.x.into(),
                bx.lo.y.into(),
                bx.lo.z.into(),
                bx.hi.x.into(),
                bx.hi.y.into(),
                bx.hi.z.into(),
                ex.expanding.into(),
                w.in_region.into(),
            ]);
            write(t, config, &out, &mut s)?;
        }
        Command::Orbit {
            params,
            init,
            n,
            transient,
            out,
        } => {
            let p = point(&params)?;
            let orbit = iterate(state(&init), &p, n, transient);
            let mut t = Table::new(["n", "x", "y", "z"]);
            for (i, st) in orbit.states.iter().enumerate() {
                t.push(vec![((transient + i + 1) as f64).into(), st.x.into(), st.y.into(), st.z.into()]);
            }
            if let Some(k) = orbit.diverged {
                let _ = writeln!(s, "orbit diverged at iteration {k}");
            }
            if let Some(last) = orbit.states.last() {
                let _ = writeln!(s, "{} states, last ({:.10}, {:.10}, {:.10})", orbit.states.len(), last.x, last.y, last.z);
            }
            if t.rows.is_empty() {
                return Err(anyhow!("no states recorded"));
            }
            write(t, config, &out, &mut s)?;
        }
        Command::Lyapunov {
            params,
            init,
            n,
            transient,
            out,
        } => {
            let p = point(&params)?;
            let l = lyapunov_spectrum(&p, state(&init), n, transient)?;
            let _ = writeln!(
                s,
                "exponents {:.8} {:.8} {:.8} (converged = {}, floored = {:?})",
                l.exponents[0], l.exponents[1], l.exponents[2], l.converged, l.floored
            );
            let rows = vec![
                kv("l1", l.exponents[0]),
                kv("l2", l.exponents[1]),
                kv("l3", l.exponents[2]),
                kv("converged", l.converged),
            ];
            write(Table::pairs(rows), config, &out, &mut s)?;
        }
        Command::Sweep {
            axis,
            from,
            to,
            grid,
            lambda,
            mu,
            beta,
            init,
            samples,
            transient,
            lyapunov_iterations,
            warm_start,
            out,
        } => {
            let (axis, placeholder) = match axis {
                AxisArg::Lambda => (Axis::Lambda, (Some(from), mu, beta)),
                AxisArg::Mu => (Axis::Mu, (lambda, Some(from), beta)),
                AxisArg::Beta => (Axis::Beta, (lambda, mu, Some(from))),
            };
            let fixed = |v: Option<f64>, name: &str| v.ok_or_else(|| usage(format!("--{name} is required")));
            let lambda = if axis == Axis::Lambda { placeholder.0.unwrap() } else { fixed(lambda, "lambda")? };
            let mu = if axis == Axis::Mu { placeholder.1.unwrap() } else { fixed(mu, "mu")? };
            let beta = if axis == Axis::Beta { placeholder.2.unwrap() } else { fixed(beta, "beta")? };
            if grid < 2 && from != to {
                return Err(usage("--grid must be at least 2"));
            }
            let base = ParamPoint::new(lambda, mu, beta).map_err(|e| usage(e.to_string()))?;
            let cfg = SweepConfig {
                transient,
                lyapunov_iterations,
                warm_start,
            };
            let rows = bifurcation_sweep(&base, axis, (from, to), grid, state(&init), samples, &cfg);
            let mut cols = vec!["param".to_string()];
            for c in ["x", "y", "z"] {
                cols.extend((1..=samples).map(|k| format!("{c}{k}")));
            }
            cols.push("lyap_max".into());
            let mut t = Table::new(cols);
            let mut diverged = 0;
            for r in &rows {
                let mut row: Vec<Cell> = vec![r.param.into()];
                for pick in [|s: &State3| s.x, |s: &State3| s.y, |s: &State3| s.z] {
                    row.extend((0..samples).map(|k| r.states.get(k).map_or(f64::NAN, pick).into()));
                }
                row.push(r.lyap_max.into());
                diverged += usize::from(r.diverged);
                t.push(row);
            }
            let _ = writeln!(s, "{} rows, {} diverged", rows.len(), diverged);
            write(t, config, &out, &mut s)?;
        }
        Command::NormalFormOde {
            system,
            p1,
            p2,
            c1,
            c2,
            u0,
            v0,
            t_end,
            dt,
            stride,
            out,
        } => {
            if !(dt > 0.0) || stride == 0 {
                return Err(usage("--dt must be positive and --stride at least 1"));
            }
            let sys = match system {
                OdeSystem::R12 => PlanarSystem::Eq129 { delta1: p1, delta2: p2 },
                OdeSystem::R13 => PlanarSystem::Eq1310 {
                    beta1: p1,
                    beta2: p2,
                    rc: c1,
                    ic: c2,
                },
                OdeSystem::R14 => PlanarSystem::Eq1413 {
                    omega1: p1,
                    omega2: p2,
                    a0: c1,
                    b0: c2,
                },
            };
            let traj = integrate_normal_form(sys, (u0, v0), t_end, dt);
            let mut t = Table::new(["t", "u", "v"]);
            for (k, (u, v)) in traj.samples.iter().enumerate().step_by(stride) {
                t.push(vec![(k as f64 * dt).into(), (*u).into(), (*v).into()]);
            }
            match traj.diverged {
                Some(k) => {
                    let _ = writeln!(s, "diverged at t = {}", k as f64 * dt);
                }
                None => {
                    let (u, v) = traj.samples.last().copied().unwrap_or((u0, v0));
                    let _ = writeln!(s, "t = {t_end}: (u, v) = ({u:.10}, {v:.10})");
                }
            }
            write(t, config, &out, &mut s)?;
        }
    }
    Ok(s)
}

fn describe_orbit(name: &str, o: &PeriodMOrbit, rows: &mut Vec<(String, Cell)>, s: &mut String) {
    let mods: Vec<f64> = o.plane_multipliers.iter().map(|t| t.norm()).collect();
    let _ = writeln!(
        s,
        "{name} orbit: residual {:.2e}, in-plane |t| = {:.6}, {:.6}, transverse {:.6}",
        o.residual, mods[0], mods[1], o.transverse_multiplier
    );
    for (k, q) in o.points.iter().enumerate() {
        let _ = writeln!(s, "  {}{} = ({:.10}, {:.10}, {:.10})", &name[..2], k + 1, q.x, q.y, q.z);
        rows.push(kv(&format!("{name}.{}.x", k + 1), q.x));
        rows.push(kv(&format!("{name}.{}.y", k + 1), q.y));
        rows.push(kv(&format!("{name}.{}.z", k + 1), q.z));
    }
    rows.push(kv(&format!("{name}.residual"), o.residual));
    rows.push(kv(&format!("{name}.transverse_multiplier"), o.transverse_multiplier));
}

fn resonance_constants(kind: ResonanceArg, rows: &mut Vec<(String, Cell)>, s: &mut String) {
    let mut both = |label: &str, closed: f64, pipeline: f64| {
        let _ = writeln!(s, "{label:<20} closed form {closed:>16.10}   pipeline {pipeline:>16.10}");
        rows.push(kv(label, closed));
        rows.push(kv(&format!("{label}_pipeline"), pipeline));
    };
    match kind {
        ResonanceArg::R12 => {
            let c = r12_constants(0.0, 0.0);
            let p = r12_pipeline();
            both("C0", c.c0, p.c);
            both("D0", c.d, p.d);
            both("transversality_det", c.transversality_det, p.transversality_det);
        }
        ResonanceArg::R13 => {
            let c = r13_constants(0.0, 0.0);
            let p = r13_pipeline(0.0, 0.0);
            both("b1_re", c.b1.re, p.b1.re);
            both("b1_im", c.b1.im, p.b1.im);
            both("re_c1", c.re_c1, p.c1.re);
            both("rc", c.rc, p.rc);
            both("transversality_det", c.transversality_det, p.transversality_det);
            rows.push(kv("ic_pipeline", p.ic));
        }
        ResonanceArg::R14 => {
            let c = r14_constants(0.0, 0.0);
            let p = r14_pipeline(0.0, 0.0);
            both("a0", c.a0, p.a0);
            both("b0", c.b0, p.b0);
            both("transversality_det", c.transversality_det, p.transversality_det);
            let _ = writeln!(s, "region: closed form {:?}, pipeline {:?}", c.region, p.region);
            rows.push(kv("region", format!("{:?}", c.region)));
            rows.push(kv("region_pipeline", format!("{:?}", p.region)));
        }
    }
}
