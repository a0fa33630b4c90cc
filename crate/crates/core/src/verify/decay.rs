use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Problem;
use crate::propagator::{small_divisor_scan, spectral_data};
use crate::series::{sum_series, Composite, OrderSeries};
use crate::trees::{family_of, Family};

/// Analytic-strip constants computed from the inputs for a chosen `ρ`, `ξ`, `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticConstants {
    pub rho: f64,
    pub xi: f64,
    /// `Σ_{ν≠0} |f_ν| e^{ξ|ν|}` (or the same sum over `h_ν(c)`).
    #[serde(rename = "Phi")]
    pub phi: f64,
    /// `max_{p,ν} max|H_{p,ν}| ρ^p e^{ξ|ν|}`.
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub kappa1: f64,
    pub b1: f64,
    /// `m² ρ⁻¹ max{Φ, 1, 2Δ/(κ₁²b₁)}`.
    pub c0_tree: f64,
    /// `m² ρ⁻¹ max{2Δ/(κ₁²b₁), 1}`.
    pub c0_chain: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "rN")]
    pub r_n: f64,
    #[serde(rename = "deltaN")]
    pub delta_n: f64,
    /// `max{δ_N, 2εb₁/r_N}`.
    pub beta: f64,
}

pub fn diagnostic_constants(problem: &Problem, rho: f64, xi: f64, n: usize, eps: f64) -> Result<DiagnosticConstants> {
    if !(rho > 0.0) || !(xi > 0.0) {
        return Err(Error::validation("rho and xi must be positive"));
    }
    let comp = Composite::new(problem);
    let phi: f64 = comp
        .constants()
        .iter()
        .filter(|(nu, _)| !nu.is_zero())
        .map(|(nu, v)| v.camax() * (xi * nu.l1() as f64).exp())
        .sum();
    let t = &problem.tensors;
    let mut delta = 0.0_f64;
    for (nu, _) in t.modes() {
        let p_min = if nu.is_zero() { 2 } else { 1 };
        for p in p_min..=t.p_max {
            if let Some(h) = t.tensor(nu, p) {
                delta = delta.max(h.max_abs() * rho.powi(p as i32) * (xi * nu.l1() as f64).exp());
            }
        }
    }
    let sd = spectral_data(&problem.spec.damping, &problem.a, &problem.spec.mass)?;
    let kappa1 = sd.kappa[0];
    let b1 = sd.b[0];
    let m2 = (problem.m() * problem.m()) as f64;
    let ratio = 2.0 * delta / (kappa1 * kappa1 * b1);
    let scan = small_divisor_scan(&problem.spec.omega, n, xi, sd.alpha);
    Ok(DiagnosticConstants {
        rho,
        xi,
        phi,
        delta,
        kappa1,
        b1,
        c0_tree: m2 / rho * phi.max(1.0).max(ratio),
        c0_chain: m2 / rho * ratio.max(1.0),
        n,
        r_n: scan.r_n,
        delta_n: scan.delta_n,
        beta: scan.delta_n.max(2.0 * eps * b1 / scan.r_n),
    })
}

/// Empirical decay of a computed series next to the analytic constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    /// Decay rate from a least-squares fit of `log max_{|ν|₁=n} |u_ν|` against `n`.
    pub xi_fit: f64,
    pub per_order_norms: Vec<f64>,
    /// `exp` of the slope of `log a_k` against `k` over the nonzero orders.
    pub ratio: f64,
    /// Largest `|ν|₁` present in each order.
    pub support_radii: Vec<usize>,
    #[serde(rename = "Phi")]
    pub phi: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub c0_diag: f64,
}

/// Slope of the least-squares line through `(x, y)`.
fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn decay_report(series: &OrderSeries, problem: &Problem, rho: f64, xi: f64) -> Result<DecayReport> {
    let (u, diag) = sum_series(series, 1.0);
    let order_pts: Vec<(f64, f64)> = diag
        .per_order_norms
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > 0.0)
        .map(|(k, a)| ((k + 1) as f64, a.ln()))
        .collect();
    if order_pts.len() < 2 {
        return Err(Error::InsufficientData(format!("{} nonzero order(s); at least two are needed", order_pts.len())));
    }
    let mut shells: std::collections::BTreeMap<usize, f64> = Default::default();
    for (nu, v) in u.iter() {
        let e = shells.entry(nu.l1()).or_insert(0.0);
        *e = e.max(v.norm());
    }
    let mode_pts: Vec<(f64, f64)> = shells.into_iter().filter(|(_, a)| *a > 0.0).map(|(n, a)| (n as f64, a.ln())).collect();
    if mode_pts.len() < 2 {
        return Err(Error::InsufficientData("fewer than two occupied mode shells".into()));
    }
    let consts = diagnostic_constants(problem, rho, xi, series.n_trunc.max(1), series.epsilon)?;
    let c0_diag = match family_of(problem) {
        Family::Theorem1 => consts.c0_tree,
        Family::Theorem2 => consts.c0_chain,
    };
    Ok(DecayReport {
        xi_fit: -slope(&mode_pts),
        per_order_norms: diag.per_order_norms,
        ratio: slope(&order_pts).exp(),
        support_radii: series.orders.iter().map(|o| o.support_radius()).collect(),
        phi: consts.phi,
        delta: consts.delta,
        c0_diag,
    })
}
