//! The zero-mode balance `𝓗(ζ, ε) = Aζ + [P(ζ + u)]₀ = 0` fixing the free
//! constant ζ, its Newton solution and warm-started continuation in ε.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierMap;
use crate::mode::Mode;
use crate::model::Problem;
use crate::exec::Exec;
use crate::series::{
    compute_orders, picard_solve, sum_series, u_sup_norm, Composite, FourierForce, OrderSeries, RatioDiagnostics, SeriesParams,
};
use crate::C64;

/// Bifurcation residual together with the series it was computed from.
#[derive(Debug, Clone)]
pub struct HEvaluation {
    pub h: DVector<f64>,
    pub series: OrderSeries,
    pub u: FourierMap,
    pub diagnostics: RatioDiagnostics,
}

/// `𝓗(ζ, ε)` with the factor ε divided out.
///
/// `[P]₀` is obtained by one exact convolution of the summed series, so it
/// includes the (round-off sized) offset `g(c) − f₀` or `h₀(c)`.
pub fn evaluate_h(zeta: &DVector<f64>, eps: f64, problem: &Problem, params: &SeriesParams) -> Result<HEvaluation> {
    let series = compute_orders(eps, problem, zeta, params)?;
    let (u, diagnostics) = sum_series(&series, 1.0);
    if !diagnostics.flags.is_empty() || !u.coeff_sup().is_finite() {
        return Err(Error::NonConvergence {
            context: "bifurcation: perturbation series",
            iterations: params.k_max,
            residual: diagnostics.ratio.unwrap_or(f64::NAN),
        });
    }
    let comp = Composite::new(problem);
    let p0 = zero_mode_of_composite(&comp, zeta, &u, params);
    let h = &problem.a * zeta + p0.map(|z| z.re);
    Ok(HEvaluation { h, series, u, diagnostics })
}

pub(crate) fn summed_w(zeta: &DVector<f64>, u: &FourierMap) -> FourierMap {
    let mut w = u.with_truncation(None);
    w.accumulate(&Mode::zero(u.d()), &zeta.map(|x| C64::new(x, 0.0)));
    w
}

fn zero_mode_of_composite(comp: &Composite, zeta: &DVector<f64>, u: &FourierMap, params: &SeriesParams) -> DVector<C64> {
    let w = summed_w(zeta, u);
    comp.evaluate_full(&w, params.exec).at(&Mode::zero(u.d()))
}

/// `𝓗(ζ, ε)` only.
pub fn residual_h(zeta: &DVector<f64>, eps: f64, problem: &Problem, params: &SeriesParams) -> Result<DVector<f64>> {
    Ok(evaluate_h(zeta, eps, problem, params)?.h)
}

/// Central-difference Jacobian `∂𝓗/∂ζ` with step `1e-6 (1 + |ζ_j|)`.
pub fn jacobian_h(zeta: &DVector<f64>, eps: f64, problem: &Problem, params: &SeriesParams) -> Result<DMatrix<f64>> {
    let m = zeta.len();
    let mut j = DMatrix::zeros(m, m);
    for c in 0..m {
        let h = 1e-6 * (1.0 + zeta[c].abs());
        let mut zp = zeta.clone();
        let mut zm = zeta.clone();
        zp[c] += h;
        zm[c] -= h;
        let col = (residual_h(&zp, eps, problem, params)? - residual_h(&zm, eps, problem, params)?) / (2.0 * h);
        j.set_column(c, &col);
    }
    Ok(j)
}

/// One solved point of the ε continuation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationSolveRecord {
    pub epsilon: f64,
    pub zeta: Vec<f64>,
    #[serde(rename = "H_residual")]
    pub h_residual: f64,
    pub newton_iters: usize,
    pub u_sup_norm: f64,
}

/// Converged solve: the record plus the series at the root.
#[derive(Debug, Clone)]
pub struct BifurcationSolution {
    pub record: BifurcationSolveRecord,
    pub zeta: DVector<f64>,
    pub series: OrderSeries,
    pub u: FourierMap,
    pub diagnostics: RatioDiagnostics,
}

const MAX_HALVINGS: usize = 20;

/// Damped Newton on `f`, with a central-difference Jacobian. Returns the root,
/// the payload of the last evaluation and the iteration count.
fn newton<T>(
    guess: &DVector<f64>,
    f: impl Fn(&DVector<f64>) -> Result<(DVector<f64>, T)>,
    tol: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, DVector<f64>, T, usize)> {
    let fail = |iterations, residual| Error::NonConvergence { context: "bifurcation::solve_zeta", iterations, residual };
    let m = guess.len();
    let mut zeta = guess.clone();
    let (mut h, mut payload) = f(&zeta)?;
    let mut iters = 0;
    while h.norm() > tol {
        if iters == max_iter {
            return Err(fail(iters, h.norm()));
        }
        let mut jac = DMatrix::zeros(m, m);
        for c in 0..m {
            let step = 1e-6 * (1.0 + zeta[c].abs());
            let mut zp = zeta.clone();
            let mut zm = zeta.clone();
            zp[c] += step;
            zm[c] -= step;
            jac.set_column(c, &((f(&zp)?.0 - f(&zm)?.0) / (2.0 * step)));
        }
        let step = jac.lu().solve(&h).ok_or_else(|| fail(iters, h.norm()))?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = &zeta - &step * lambda;
            if let Ok((ht, pt)) = f(&trial) {
                if ht.norm() < h.norm() {
                    accepted = Some((trial, ht, pt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let (z, ht, pt) = accepted.ok_or_else(|| fail(iters, h.norm()))?;
        zeta = z;
        h = ht;
        payload = pt;
        iters += 1;
    }
    Ok((zeta, h, payload, iters))
}

/// Damped Newton iteration on `𝓗(·, ε)` from `guess`.
pub fn solve_zeta(
    eps: f64,
    problem: &Problem,
    params: &SeriesParams,
    guess: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<BifurcationSolution> {
    let eval = |z: &DVector<f64>| evaluate_h(z, eps, problem, params).map(|ev| (ev.h.clone(), ev));
    let (zeta, h, ev, iters) = newton(guess, eval, tol, max_iter)?;
    let record = BifurcationSolveRecord {
        epsilon: eps,
        zeta: zeta.iter().copied().collect(),
        h_residual: h.norm(),
        newton_iters: iters,
        u_sup_norm: u_sup_norm(&ev.u, params.exec),
    };
    Ok(BifurcationSolution { record, zeta, series: ev.series, u: ev.u, diagnostics: ev.diagnostics })
}

/// Settings for the fixed-point variant of the bifurcation solve.
#[derive(Debug, Clone, Copy)]
pub struct PicardParams {
    pub tol: f64,
    pub max_iter: usize,
    pub n_trunc: usize,
    pub exec: Exec,
}

/// `𝓗(ζ, ε) = [F(c+ζ+u)]₀` with `u` from [`picard_solve`] instead of the series.
pub fn residual_h_picard(zeta: &DVector<f64>, eps: f64, problem: &Problem, pp: &PicardParams) -> Result<(DVector<f64>, FourierMap)> {
    let sol = picard_solve(eps, problem, zeta, pp.tol, pp.max_iter, pp.n_trunc, pp.exec)?;
    let mut x = sol.u.with_truncation(None);
    x.accumulate(&Mode::zero(problem.d()), &(&problem.center + zeta).map(|v| C64::new(v, 0.0)));
    let f0 = FourierForce::new(problem).evaluate(&x, pp.exec).at(&Mode::zero(problem.d()));
    Ok((f0.map(|z| z.re), sol.u))
}

/// Newton on the fixed-point `𝓗`; an independent route to ζ(ε).
pub fn solve_zeta_picard(
    eps: f64,
    problem: &Problem,
    pp: &PicardParams,
    guess: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, FourierMap, usize)> {
    let (zeta, _, u, iters) = newton(guess, |z| residual_h_picard(z, eps, problem, pp), tol, max_iter)?;
    Ok((zeta, u, iters))
}

/// One entry of a sweep: the record or the error that stopped it.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub epsilon: f64,
    pub outcome: Result<BifurcationSolveRecord>,
}

/// Solves at every ε in order, seeding each Newton run with the previous ζ.
/// Failures are recorded and the sweep continues from the last good ζ.
pub fn sweep_epsilon(
    eps_list: &[f64],
    problem: &Problem,
    params: &SeriesParams,
    tol: f64,
    max_iter: usize,
) -> Vec<SweepEntry> {
    let mut seed = DVector::zeros(problem.m());
    eps_list
        .iter()
        .map(|&eps| {
            let outcome = solve_zeta(eps, problem, params, &seed, tol, max_iter).map(|s| {
                seed = s.zeta.clone();
                s.record
            });
            SweepEntry { epsilon: eps, outcome }
        })
        .collect()
}
