use nalgebra::DVector;

use super::*;
use crate::error::Error;
use crate::exec::Exec;
use crate::mode::Mode;
use crate::model::Problem;
use crate::systems;
use crate::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn nu(v: &[i32]) -> Mode {
    Mode::from_slice(v)
}

fn zeta(m: usize) -> DVector<f64> {
    DVector::zeros(m)
}

#[test]
fn first_order_linear() {
    let p = Problem::new(systems::linear()).unwrap();
    let u1 = first_order(0.1, &p, &zeta(1), &SeriesParams::new(4)).unwrap();
    assert!((u1.at(&nu(&[1]))[0] - c(0.0, -0.1)).norm() < 1e-16);
    assert!((u1.at(&nu(&[-1]))[0] - c(0.0, 0.1)).norm() < 1e-16);
    assert!(u1.get(&nu(&[0])).is_none());
}

#[test]
fn first_order_carries_zeta() {
    let p = Problem::new(systems::cubic()).unwrap();
    let u1 = first_order(0.1, &p, &DVector::from_element(1, 0.3), &SeriesParams::new(4)).unwrap();
    assert_eq!(u1.at(&nu(&[0]))[0], c(0.3, 0.0));
}

#[test]
fn zero_forcing_has_only_zeta() {
    let p = Problem::new(systems::forced_potential()).unwrap();
    let mut spec = p.spec.clone();
    if let crate::model::SystemKind::GradientForced { potential } = &mut spec.kind {
        let avg = potential.average();
        *potential = crate::model::TrigPolynomialFamily::new(
            2,
            2,
            vec![(nu(&[0, 0]), crate::model::ComplexPoly::real(avg))],
        )
        .unwrap();
    }
    let p = Problem::new(spec).unwrap();
    let u1 = first_order(0.1, &p, &zeta(2), &SeriesParams::new(3)).unwrap();
    assert!(u1.is_empty());
}

#[test]
fn second_order_vanishes_for_autonomous_systems() {
    for spec in [systems::linear(), systems::cubic(), systems::asymmetric_cubic(), systems::coupled(), systems::near_resonant()] {
        let p = Problem::new(spec).unwrap();
        for z in [0.0, 0.05] {
            let s = compute_orders(0.1, &p, &DVector::from_element(p.m(), z), &SeriesParams::new(3)).unwrap();
            assert!(s.order(2).is_empty());
        }
    }
}

#[test]
fn cubic_third_and_fourth_orders() {
    let p = Problem::new(systems::cubic()).unwrap();
    let s = compute_orders(0.1, &p, &zeta(1), &SeriesParams::new(4)).unwrap();
    assert!(s.order(3).is_empty());
    let u4 = s.order(4);
    let expect = c(-0.1, 0.0) * c(0.0, 1e-3) / c(-0.8, 3.0);
    assert!((u4.at(&nu(&[3]))[0] - expect).norm() < 1e-18);
    let modes: Vec<&Mode> = u4.modes().collect();
    assert_eq!(modes, vec![&nu(&[-3]), &nu(&[-1]), &nu(&[1]), &nu(&[3])]);
}

#[test]
fn compose_matches_hand_convolution() {
    let p = Problem::new(systems::cubic()).unwrap();
    let params = SeriesParams::new(4);
    let s = compute_orders(0.1, &p, &zeta(1), &params).unwrap();
    let comp = compose_nonlinearity(&s.orders[..3], &p, &params);
    let u1 = |k: i32| s.order(1).at(&nu(&[k]))[0];
    let c1 = 3.0 * u1(1) * u1(1) * u1(-1);
    assert!((comp.at(&nu(&[1]))[0] - c1).norm() < 1e-18);
    assert!((comp.at(&nu(&[3]))[0] - u1(1).powi(3)).norm() < 1e-18);
    let direct = next_order(4, &s.orders[..3], 0.1, &p, &params).unwrap();
    assert_eq!(&direct, s.order(4));
}

#[test]
fn orders_are_hermitian() {
    for spec in [systems::cubic(), systems::asymmetric_cubic(), systems::coupled(), systems::forced_potential()] {
        let p = Problem::new(spec).unwrap();
        let s = compute_orders(0.05, &p, &DVector::from_element(p.m(), 0.01), &SeriesParams::new(6)).unwrap();
        for (k, o) in s.orders.iter().enumerate() {
            assert!(o.hermitian_defect() <= 1e-15 * o.coeff_sup().max(1e-300), "order {}", k + 1);
        }
    }
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let p = Problem::new(systems::forced_potential()).unwrap();
    let a = compute_orders(0.05, &p, &zeta(2), &SeriesParams::new(6).with_exec(Exec::Sequential)).unwrap();
    let b = compute_orders(0.05, &p, &zeta(2), &SeriesParams::new(6).with_exec(Exec::Parallel)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn support_grows_linearly() {
    let p = Problem::new(systems::asymmetric_cubic()).unwrap();
    let s = compute_orders(0.05, &p, &zeta(1), &SeriesParams::new(8)).unwrap();
    for (k, o) in s.orders.iter().enumerate() {
        assert!(o.support_radius() <= k + 1);
    }
}

#[test]
fn sum_series_linear_and_mu_zero() {
    let p = Problem::new(systems::linear()).unwrap();
    let s = compute_orders(0.1, &p, &zeta(1), &SeriesParams::new(5)).unwrap();
    let (u, diag) = sum_series(&s, 1.0);
    assert_eq!(&u, &s.order(1).without_zero_mode().with_truncation(Some(s.n_trunc)));
    assert_eq!(diag.per_order_norms[1..], [0.0; 4]);
    assert_eq!(diag.ratio, None);
    let (u0, _) = sum_series(&s, 0.0);
    assert!(u0.is_empty());
}

#[test]
fn cubic_ratio_diagnostics() {
    let p = Problem::new(systems::cubic()).unwrap();
    let s = compute_orders(0.1, &p, &zeta(1), &SeriesParams::new(7)).unwrap();
    let (_, diag) = sum_series(&s, 1.0);
    let a = &diag.per_order_norms;
    assert!(a[3] > 0.0 && a[1] == 0.0 && a[2] == 0.0);
    let r = diag.ratio.unwrap();
    assert!((r - a[6] / a[3]).abs() < 1e-15 * r);
    assert!(diag.flags.is_empty());
}

#[test]
fn picard_linear_one_step() {
    let p = Problem::new(systems::linear()).unwrap();
    let r = picard_solve(0.1, &p, &zeta(1), 1e-14, 10, 4, Exec::default()).unwrap();
    assert_eq!(r.iterations, 1);
    assert!((r.u.at(&nu(&[1]))[0] - c(0.0, -0.1)).norm() < 1e-16);
}

#[test]
fn picard_matches_series_on_cubic() {
    let p = Problem::new(systems::cubic()).unwrap();
    let params = SeriesParams::new(8);
    let s = compute_orders(0.01, &p, &zeta(1), &params).unwrap();
    let (u, _) = sum_series(&s, 1.0);
    let r = picard_solve(0.01, &p, &zeta(1), 1e-14, 100, s.n_trunc, Exec::default()).unwrap();
    assert!(u.max_abs_diff(&r.u) <= 1e-10);
}

#[test]
fn picard_matches_series_on_forced_potential() {
    let p = Problem::new(systems::forced_potential()).unwrap();
    let params = SeriesParams::new(8);
    let z = DVector::from_vec(vec![0.001, -0.002]);
    let s = compute_orders(0.01, &p, &z, &params).unwrap();
    let (u, _) = sum_series(&s, 1.0);
    let r = picard_solve(0.01, &p, &z, 1e-14, 100, s.n_trunc, Exec::default()).unwrap();
    assert!(u.max_abs_diff(&r.u) <= 1e-10, "{}", u.max_abs_diff(&r.u));
}

#[test]
fn picard_diverges_for_huge_epsilon() {
    let p = Problem::new(systems::cubic()).unwrap();
    let r = picard_solve(1e3, &p, &zeta(1), 1e-12, 200, 8, Exec::default());
    assert!(matches!(r, Err(Error::NonConvergence { .. })), "{r:?}");
}

#[test]
fn evaluate_linear_closed_form() {
    let p = Problem::new(systems::linear()).unwrap();
    let s = compute_orders(0.1, &p, &zeta(1), &SeriesParams::new(2)).unwrap();
    let (u, _) = sum_series(&s, 1.0);
    let x = evaluate(&u, &zeta(1), &p.center, &[std::f64::consts::FRAC_PI_2]).unwrap();
    assert!((x[0] - 0.2).abs() < 1e-15);
    let a = evaluate(&u, &zeta(1), &p.center, &[0.7]).unwrap();
    let b = evaluate(&u, &zeta(1), &p.center, &[0.7 + std::f64::consts::TAU]).unwrap();
    assert!((a[0] - b[0]).abs() < 1e-15);
    let empty = crate::fourier::FourierMap::new(1, 1, None);
    let z = DVector::from_element(1, 0.25);
    assert_eq!(evaluate(&empty, &z, &p.center, &[1.0]).unwrap()[0], 0.25);
}

#[test]
fn evaluate_detects_leak() {
    let mut u = crate::fourier::FourierMap::new(1, 1, None);
    u.insert(nu(&[1]), DVector::from_element(1, c(0.0, -0.1)));
    assert!(matches!(evaluate(&u, &zeta(1), &zeta(1), &[0.0]), Err(Error::ComplexLeak { .. })));
}

#[test]
fn sup_norm_linear() {
    let p = Problem::new(systems::linear()).unwrap();
    for eps in [0.1, 0.01, 0.001] {
        let s = compute_orders(eps, &p, &zeta(1), &SeriesParams::new(2)).unwrap();
        let (u, _) = sum_series(&s, 1.0);
        assert!((u_sup_norm(&u, Exec::default()) - 2.0 * eps).abs() < 1e-15);
    }
}

#[test]
fn modes_decay_beyond_support() {
    let p = Problem::new(systems::cubic()).unwrap();
    let s = compute_orders(0.1, &p, &zeta(1), &SeriesParams::new(10)).unwrap();
    let (u, _) = sum_series(&s, 1.0);
    let mags: Vec<f64> = (1..=9).step_by(2).map(|k| u.at(&nu(&[k])).norm()).collect();
    for w in mags.windows(2) {
        assert!(w[1] < w[0] * 0.1);
    }
}

#[test]
fn sup_norm_decreases_with_epsilon() {
    for spec in [systems::cubic(), systems::coupled()] {
        let p = Problem::new(spec).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
            let s = compute_orders(eps, &p, &zeta(p.m()), &SeriesParams::new(6)).unwrap();
            let n = u_sup_norm(&sum_series(&s, 1.0).0, Exec::default());
            assert!(n < prev);
            prev = n;
        }
    }
}
