//! Frequency-domain matrices `D(ε,s) = −εs²M + isΓ + εA`, their inverses, the
//! spectral constants of the norm bound, and the small-divisor scan.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, LU};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{spd_sqrt, sym_eigenvalues};
use crate::mode::{ball, Mode};
use crate::model::Problem;
use crate::C64;

/// Spectral data entering the propagator bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// `K = Γ^{1/2}`.
    pub k: DMatrix<f64>,
    /// Eigenvalues of `K`, ascending.
    pub kappa: Vec<f64>,
    /// Eigenvalues of `K⁻¹AK⁻¹`, ascending.
    pub b: Vec<f64>,
    pub alpha: f64,
}

impl SpectralData {
    /// `ε₁ = α / b₁`.
    pub fn eps1(&self) -> f64 {
        self.alpha / self.b[0]
    }
}

/// Computes `K`, `κ`, `b` and the α estimate for mass matrix `mass`.
pub fn spectral_data(gamma: &DMatrix<f64>, a: &DMatrix<f64>, mass: &DMatrix<f64>) -> Result<SpectralData> {
    spd_sqrt(a, "propagator::spectral_data (A)")?;
    let k = spd_sqrt(gamma, "propagator::spectral_data (damping)")?;
    let kappa = sym_eigenvalues(&k);
    let k_inv = k.clone().try_inverse().ok_or(Error::NotPositiveDefinite { context: "propagator::spectral_data" })?;
    let b = sym_eigenvalues(&(&k_inv * a * &k_inv));
    if b[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite { context: "propagator::spectral_data (K⁻¹AK⁻¹)" });
    }
    let alpha = estimate_alpha(&k_inv, a, mass, &b);
    Ok(SpectralData { k, kappa, b, alpha })
}

/// Largest α such that every eigenvalue of `K⁻¹AK⁻¹ − s²K⁻¹MK⁻¹` stays within
/// `b₁/2` of its value at `s = 0` for `|s| ≤ α`, times a 0.9 safety factor.
///
/// The ε factor cancels out of the condition. The eigenvalues decrease
/// monotonically in `s²`, so the threshold is the first violation, bracketed on
/// a grid and refined by bisection. Weyl's inequality brackets it between
/// `sqrt(b₁ / 2λ_max(N))` and `sqrt(b₁ / 2λ_min(N))` with `N = K⁻¹MK⁻¹`.
pub fn estimate_alpha(k_inv: &DMatrix<f64>, a: &DMatrix<f64>, mass: &DMatrix<f64>, b: &[f64]) -> f64 {
    let t0 = k_inv * a * k_inv;
    let n = k_inv * mass * k_inv;
    let nu = sym_eigenvalues(&n);
    let half = b[0] / 2.0;
    let lo = (half / nu[nu.len() - 1]).sqrt();
    let hi = (half / nu[0]).sqrt();
    let violates = |s: f64| {
        let lam = sym_eigenvalues(&(&t0 - &n * (s * s)));
        lam.iter().zip(b).any(|(l, bk)| (l - bk).abs() > half)
    };
    let threshold = if hi - lo <= 1e-15 * hi {
        lo
    } else {
        const GRID: usize = 400;
        let mut prev = lo;
        let mut first_bad = hi;
        for j in 1..=GRID {
            let s = lo + (hi - lo) * j as f64 / GRID as f64;
            if violates(s) {
                first_bad = s;
                break;
            }
            prev = s;
        }
        let (mut a_s, mut b_s) = (prev, first_bad);
        for _ in 0..60 {
            let mid = 0.5 * (a_s + b_s);
            if violates(mid) {
                b_s = mid;
            } else {
                a_s = mid;
            }
        }
        a_s
    };
    if threshold.is_finite() && threshold > 0.0 {
        0.9 * threshold
    } else {
        0.5 * b[0].sqrt()
    }
}

/// `D(ε,s) = −εs²M + isΓ + εA`.
pub fn assemble_d(eps: f64, s: f64, mass: &DMatrix<f64>, damping: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<C64> {
    let re = (a - mass * (s * s)) * eps;
    let im = damping * s;
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

/// Solves `D u = v` by LU.
pub fn apply_d_inverse(d: &DMatrix<C64>, v: &DVector<C64>) -> Result<DVector<C64>> {
    solve_lu(&d.clone().lu(), d, v).ok_or(Error::SingularMatrix { s: f64::NAN })
}

fn solve_lu(
    lu: &LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    d: &DMatrix<C64>,
    v: &DVector<C64>,
) -> Option<DVector<C64>> {
    let u = lu.solve(v)?;
    if !u.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return None;
    }
    let res = (d * &u - v).norm();
    (res <= 1e-10 * v.norm().max(f64::MIN_POSITIVE) || v.norm() == 0.0).then_some(u)
}

/// Right-hand side of `‖D⁻¹‖ ≤ κ₁⁻² min{2/(b₁ε), max{1/α, 1/|s|}}`.
pub fn norm_bound(eps: f64, s: f64, sd: &SpectralData) -> Result<f64> {
    let eps1 = sd.eps1();
    if eps >= eps1 {
        return Err(Error::EpsilonTooLarge { eps, eps1 });
    }
    let k1 = sd.kappa[0];
    let inner = (2.0 / (sd.b[0] * eps)).min((1.0 / sd.alpha).max(1.0 / s.abs()));
    Ok(inner / (k1 * k1))
}

/// Factorised `D(ε, ω·ν)` for a fixed ε, one LU per mode.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub eps: f64,
    omega: Vec<f64>,
    mass: DMatrix<f64>,
    damping: DMatrix<f64>,
    a: DMatrix<f64>,
    cache: BTreeMap<Mode, (DMatrix<C64>, LU<C64, nalgebra::Dyn, nalgebra::Dyn>)>,
}

impl Propagator {
    pub fn new(eps: f64, problem: &Problem) -> Self {
        Self {
            eps,
            omega: problem.spec.omega.clone(),
            mass: problem.spec.mass.clone(),
            damping: problem.spec.damping.clone(),
            a: problem.a.clone(),
            cache: BTreeMap::new(),
        }
    }

    /// Pre-factorises `D` for every mode in `modes` not yet cached.
    pub fn prefactor<'a, I>(&mut self, modes: I, exec: Exec)
    where
        I: IntoIterator<Item = &'a Mode>,
    {
        let todo: Vec<Mode> = modes.into_iter().filter(|nu| !self.cache.contains_key(*nu)).cloned().collect();
        let facts = exec.map(&todo, |nu| {
            let d = self.matrix(nu);
            let lu = d.clone().lu();
            (d, lu)
        });
        self.cache.extend(todo.into_iter().zip(facts));
    }

    pub fn matrix(&self, nu: &Mode) -> DMatrix<C64> {
        assemble_d(self.eps, nu.dot(&self.omega), &self.mass, &self.damping, &self.a)
    }

    /// `D(ε, ω·ν)⁻¹ v`; uses the cached factorisation when available.
    pub fn solve(&self, nu: &Mode, v: &DVector<C64>) -> Result<DVector<C64>> {
        let s = nu.dot(&self.omega);
        let out = match self.cache.get(nu) {
            Some((d, lu)) => solve_lu(lu, d, v),
            None => {
                let d = self.matrix(nu);
                solve_lu(&d.clone().lu(), &d, v)
            }
        };
        out.ok_or(Error::SingularMatrix { s })
    }

    /// `D(ε, ω·ν) v`.
    pub fn apply(&self, nu: &Mode, v: &DVector<C64>) -> DVector<C64> {
        match self.cache.get(nu) {
            Some((d, _)) => d * v,
            None => self.matrix(nu) * v,
        }
    }
}

/// Result of the small-divisor scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallDivisorReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "sN")]
    pub s_n: f64,
    pub argmin: Mode,
    #[serde(rename = "rN")]
    pub r_n: f64,
    #[serde(rename = "deltaN")]
    pub delta_n: f64,
}

/// Exhaustive `s_N = min{|ω·ν| : 0 < |ν|₁ ≤ N}`.
///
/// Among ties the reported ν has its first nonzero entry positive and is the
/// lexicographically smallest such mode. `r_N = min(s_N, α)`.
pub fn small_divisor_scan(omega: &[f64], n: usize, xi: f64, alpha: f64) -> SmallDivisorReport {
    let n = n.max(1);
    let mut best: Option<(f64, Mode)> = None;
    for nu in ball(omega.len(), n) {
        if nu.is_zero() || !nu.is_positive_half() {
            continue;
        }
        let v = nu.dot(omega).abs();
        match &best {
            Some((b, m)) if v > *b || (v == *b && nu >= *m) => {}
            _ => best = Some((v, nu)),
        }
    }
    let (s_n, argmin) = best.expect("ball of radius >= 1 has nonzero modes");
    SmallDivisorReport { n, s_n, argmin, r_n: s_n.min(alpha), delta_n: (-xi * n as f64 / 4.0).exp() }
}
