//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::f64::consts::{SQRT_2, TAU};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use responsum::bifurcation::{solve_zeta, sweep_epsilon};
use responsum::exec::Exec;
use responsum::linalg::inverse_norm;
use responsum::mode::Mode;
use responsum::model::Problem;
use responsum::propagator::{assemble_d, norm_bound, small_divisor_scan, spectral_data};
use responsum::series::{compute_orders, evaluate, picard_solve, sum_series, SeriesParams};
use responsum::systems;
use responsum::trees::{check_counting, enumerate_topologies, oracle_order, Family};
use responsum::verify::{attractor_compare, integrate_reference, ode_residual, transient_time};
use responsum::C64;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn zeros(m: usize) -> DVector<f64> {
    DVector::zeros(m)
}

fn linear_closed_form() -> Outcome {
    let p = Problem::new(systems::linear()).map_err(e)?;
    let mut worst = (0.0_f64, 0.0_f64, 0.0_f64);
    for eps in [0.1, 0.01] {
        let sol = solve_zeta(eps, &p, &SeriesParams::new(4), &zeros(1), 1e-12, 10).map_err(e)?;
        let u1 = sol.u.at(&Mode::from_slice(&[1]))[0];
        let um1 = sol.u.at(&Mode::from_slice(&[-1]))[0];
        let coeff = (u1 - C64::new(0.0, -eps)).norm().max((um1 - C64::new(0.0, eps)).norm());
        check(coeff <= 1e-15 && sol.zeta[0] == 0.0, format!("eps={eps}: coefficient error {coeff:e}, zeta {}", sol.zeta[0]))?;
        let mut pointwise = 0.0_f64;
        for j in 0..100 {
            let t = TAU * j as f64 / 100.0;
            let x = evaluate(&sol.u, &sol.zeta, &p.center, &[t]).map_err(e)?[0];
            pointwise = pointwise.max((x - 2.0 * eps * t.sin()).abs());
        }
        let res = ode_residual(&sol.u, &sol.zeta, eps, &p, Exec::Sequential).sup_norm;
        check(pointwise <= 1e-12, format!("eps={eps}: pointwise {pointwise:e}"))?;
        check(res <= 1e-13, format!("eps={eps}: residual {res:e}"))?;
        worst = (worst.0.max(coeff), worst.1.max(pointwise), worst.2.max(res));
    }
    Ok(format!("coeff err {:.1e}, pointwise {:.1e}, residual {:.1e}", worst.0, worst.1, worst.2))
}

fn second_order_vanishes() -> Outcome {
    let specs = [
        ("linear", systems::linear()),
        ("cubic", systems::cubic()),
        ("asymmetric", systems::asymmetric_cubic()),
        ("coupled", systems::coupled()),
        ("near-resonant", systems::near_resonant()),
    ];
    for (name, spec) in specs {
        let p = Problem::new(spec).map_err(e)?;
        for z in [0.0, 0.07] {
            let zeta = DVector::from_element(p.m(), z);
            let s = compute_orders(0.05, &p, &zeta, &SeriesParams::new(3)).map_err(e)?;
            check(s.order(2).is_empty(), format!("{name}, zeta={z}: u^(2) has {} entries", s.order(2).len()))?;
        }
    }
    Ok("5 systems, 2 values of zeta".into())
}

fn tree_oracle() -> Outcome {
    let mut worst = 0.0_f64;
    let mut trees = 0;
    let cases = [("cubic", systems::cubic(), 0.1), ("coupled", systems::coupled(), 0.1), ("forced", systems::forced_potential(), 0.05)];
    for (name, spec, eps) in cases {
        let p = Problem::new(spec).map_err(e)?;
        let zeta = DVector::from_element(p.m(), 0.05);
        let series = compute_orders(eps, &p, &zeta, &SeriesParams::new(4)).map_err(e)?;
        for k in 1..=4 {
            let (oracle, count) = oracle_order(k, eps, &zeta, &p, Exec::default()).map_err(e)?;
            trees += count;
            let rec = series.order(k);
            let scale = rec.coeff_sup().max(oracle.coeff_sup());
            let diff = oracle.max_abs_diff(rec);
            let rel = if scale > 0.0 { diff / scale } else { diff };
            check(rel <= 1e-10, format!("{name}, k={k}: relative error {rel:e}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("{trees} labelled trees, worst relative error {worst:.1e}"))
}

fn counting_lemmas() -> Outcome {
    let mut n = 0;
    for (family, kmax) in [(Family::Theorem1, 6), (Family::Theorem2, 5)] {
        for k in 1..=kmax {
            for t in enumerate_topologies(k, family).map_err(e)? {
                let r = check_counting(&t, family);
                check(r.holds, format!("{family:?} tree {} fails: {} < {}", t.canonical(), r.lhs, r.rhs))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} topologies checked"))
}

fn propagator_bound() -> Outcome {
    let diag = |v: &[f64]| DMatrix::from_diagonal(&DVector::from_column_slice(v));
    let families = [
        ("coupled damping", DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]), diag(&[1.0, 1.0]), diag(&[1.0, 3.0])),
        ("M=diag(1,2)", DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 1.5]), diag(&[1.0, 2.0]), DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])),
        ("3x3", DMatrix::from_row_slice(3, 3, &[3.0, 1.0, 0.0, 1.0, 2.0, 0.5, 0.0, 0.5, 1.0]), diag(&[1.0, 0.5, 4.0]), diag(&[1.0, 2.0, 5.0])),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for (name, gamma, mass, a) in &families {
        let sd = spectral_data(gamma, a, mass).map_err(e)?;
        let eps1 = sd.eps1();
        for i in 0..10_000 {
            let eps = if i % 2 == 0 { rng.random_range(0.0..1.0) * eps1 } else { eps1 * 10f64.powf(rng.random_range(-6.0..0.0)) };
            let s = if i % 3 == 0 { rng.random_range(-0.1..0.1) } else { rng.random_range(-20.0..20.0) };
            if eps <= 0.0 || eps >= eps1 {
                continue;
            }
            let bound = norm_bound(eps, s, &sd).map_err(e)?;
            let actual = inverse_norm(&assemble_d(eps, s, mass, gamma, a));
            if actual > bound {
                violations += 1;
            }
            tightest = tightest.min(bound / actual);
        }
        check(violations == 0, format!("{name}: {violations} violations"))?;
    }
    Ok(format!("30000 samples, 0 violations, min bound/actual {tightest:.3}"))
}

fn solver_cross_validation() -> Outcome {
    let p = Problem::new(systems::cubic()).map_err(e)?;
    let eps = 0.01;
    let params = SeriesParams::new(8);
    let sol = solve_zeta(eps, &p, &params, &zeros(1), 1e-10, 20).map_err(e)?;
    let (u, _) = sum_series(&sol.series, 1.0);
    let pic = picard_solve(eps, &p, &sol.zeta, 1e-15, 200, sol.series.n_trunc, Exec::default()).map_err(e)?;
    let diff = pic.u.max_abs_diff(&u);
    check(diff <= 1e-10, format!("picard vs series {diff:e}"))?;
    check(sol.record.h_residual <= 1e-10, format!("|H| = {:e}", sol.record.h_residual))?;
    Ok(format!("sup diff {diff:.1e}, |H| {:.1e}, {} picard iterations", sol.record.h_residual, pic.iterations))
}

fn attractor_agreement() -> Outcome {
    let spec = systems::cubic();
    let p = Problem::new(spec.clone()).map_err(e)?;
    let eps = 0.01;
    let sol = solve_zeta(eps, &p, &SeriesParams::new(8), &zeros(1), 1e-12, 20).map_err(e)?;
    let sd = spectral_data(&spec.damping, &p.a, &spec.mass).map_err(e)?;
    let t_end = transient_time(eps, *sd.kappa.last().unwrap(), sd.b[0]);
    let traj = integrate_reference(eps, &spec, &p.center, &zeros(1), t_end, 1e-8, 0.1).map_err(e)?;
    let dev = attractor_compare(&traj, &sol.u, &sol.zeta, &p.center, &spec.omega, 0.75).map_err(e)?;
    let wrong = &sol.zeta + DVector::from_element(1, 0.1);
    let dev_wrong = attractor_compare(&traj, &sol.u, &wrong, &p.center, &spec.omega, 0.75).map_err(e)?;
    check(dev <= 1e-5, format!("deviation {dev:e}"))?;
    check(dev_wrong >= 0.05, format!("perturbed deviation {dev_wrong:e}"))?;
    Ok(format!("t_end {t_end}, deviation {dev:.1e}, with zeta+0.1 {dev_wrong:.3}, {} steps", traj.steps))
}

fn epsilon_continuity() -> Outcome {
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let mut summary = Vec::new();
    for (name, spec) in [("cubic", systems::cubic()), ("asymmetric", systems::asymmetric_cubic())] {
        let p = Problem::new(spec).map_err(e)?;
        let recs = sweep_epsilon(&eps, &p, &SeriesParams::new(10), 1e-12, 30)
            .into_iter()
            .map(|r| r.outcome.map_err(|err| format!("{name} eps={}: {err}", r.epsilon)))
            .collect::<Result<Vec<_>, _>>()?;
        for w in recs.windows(2) {
            check(w[1].u_sup_norm < w[0].u_sup_norm, format!("{name}: u_sup_norm not decreasing at eps={}", w[1].epsilon))?;
            let (z0, z1) = (w[0].zeta[0].abs(), w[1].zeta[0].abs());
            check(z1 <= z0, format!("{name}: |zeta| not decreasing at eps={}", w[1].epsilon))?;
        }
        let last = recs.last().unwrap();
        check(last.u_sup_norm < 1e-3 && last.zeta[0].abs() < 1e-7, format!("{name}: not approaching 0"))?;
        summary.push(format!("{name} |zeta(1e-4)| {:.1e}", last.zeta[0].abs()));
    }
    let p = Problem::new(systems::linear()).map_err(e)?;
    for r in sweep_epsilon(&eps, &p, &SeriesParams::new(4), 1e-12, 10) {
        let r = r.outcome.map_err(e)?;
        let err = (r.u_sup_norm - 2.0 * r.epsilon).abs();
        check(err <= 1e-12, format!("linear eps={}: |u| - 2 eps = {err:e}", r.epsilon))?;
    }
    Ok(summary.join(", "))
}

fn small_divisors() -> Outcome {
    let r = small_divisor_scan(&[1.0, SQRT_2], 2, 1.0, f64::INFINITY);
    check((r.s_n - (SQRT_2 - 1.0)).abs() <= 1e-12, format!("sqrt2: s_N = {}", r.s_n))?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let g = small_divisor_scan(&[1.0, phi], 3, 1.0, f64::INFINITY);
    check((g.s_n - (2.0 - phi)).abs() <= 1e-12, format!("golden: s_N = {}", g.s_n))?;
    let p = Problem::new(systems::near_resonant()).map_err(e)?;
    let eps = 1e-3;
    let sol = solve_zeta(eps, &p, &SeriesParams::new(8), &zeros(1), 1e-10, 20).map_err(e)?;
    let res = ode_residual(&sol.u, &sol.zeta, eps, &p, Exec::default()).sup_norm;
    check(res <= 1e-8, format!("near-resonant residual {res:e}"))?;
    Ok(format!("s_N {:.15} / {:.6}, near-resonant residual {res:.1e}", r.s_n, g.s_n))
}

fn forced_potential() -> Outcome {
    let p = Problem::new(systems::forced_potential()).map_err(e)?;
    let eps = 1e-3;
    let sol = solve_zeta(eps, &p, &SeriesParams::new(6), &zeros(2), 1e-10, 20).map_err(e)?;
    let res = ode_residual(&sol.u, &sol.zeta, eps, &p, Exec::default()).sup_norm;
    check(res <= 1e-8, format!("residual {res:e}"))?;
    let mut worst = 0.0_f64;
    for k in 1..=3 {
        let (oracle, _) = oracle_order(k, eps, &sol.zeta, &p, Exec::default()).map_err(e)?;
        let rec = sol.series.order(k);
        let rel = oracle.max_abs_diff(rec) / rec.coeff_sup().max(f64::MIN_POSITIVE);
        check(rel <= 1e-10, format!("k={k}: relative error {rel:e}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("residual {res:.1e}, oracle k<=3 worst relative error {worst:.1e}"))
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "linear closed form", limit: Some(Duration::from_secs(1)), run: linear_closed_form },
        Criterion { id: 2, name: "second order vanishes", limit: Some(Duration::from_secs(1)), run: second_order_vanishes },
        Criterion { id: 3, name: "tree oracle equals recursion", limit: Some(Duration::from_secs(60)), run: tree_oracle },
        Criterion { id: 4, name: "counting lemmas", limit: Some(Duration::from_secs(30)), run: counting_lemmas },
        Criterion { id: 5, name: "propagator bound", limit: Some(Duration::from_secs(10)), run: propagator_bound },
        Criterion { id: 6, name: "picard vs series", limit: Some(Duration::from_secs(10)), run: solver_cross_validation },
        Criterion { id: 7, name: "attractor agreement", limit: Some(Duration::from_secs(120)), run: attractor_agreement },
        Criterion { id: 8, name: "epsilon continuity", limit: None, run: epsilon_continuity },
        Criterion { id: 9, name: "small divisors", limit: None, run: small_divisors },
        Criterion { id: 10, name: "phase-dependent potential", limit: None, run: forced_potential },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if took > limit => Err(format!("took {took:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {:<30} {:>9.3?}  {detail}", c.id, c.name, took),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {:<30} {:>9.3?}  {why}", c.id, c.name, took);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
