use nalgebra::DVector;
use serde::Serialize;

use super::engine::{Composite, GradedEngine};
use crate::error::Result;
use crate::exec::Exec;
use crate::fourier::FourierMap;
use crate::mode::Mode;
use crate::model::Problem;
use crate::propagator::Propagator;
use crate::C64;

/// Truncation parameters of the perturbation series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    pub k_max: usize,
    /// Mode cutoff; `None` means `k_max` times the forcing radius.
    pub n_trunc: Option<usize>,
    pub exec: Exec,
}

impl SeriesParams {
    pub fn new(k_max: usize) -> Self {
        Self { k_max, n_trunc: None, exec: Exec::default() }
    }

    pub fn with_n_trunc(mut self, n: Option<usize>) -> Self {
        self.n_trunc = n;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// The cutoff actually applied to `problem`.
    pub fn resolved_n_trunc(&self, problem: &Problem) -> usize {
        self.n_trunc.unwrap_or(self.k_max.max(1) * problem.spec.forcing_radius())
    }
}

/// The coefficients `u^(k)_ν`, `k = 1..K_max`. Order 1 carries `ζ` at the zero
/// mode; every higher order has no zero-mode entry.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSeries {
    pub orders: Vec<FourierMap>,
    pub zeta: DVector<f64>,
    pub epsilon: f64,
    pub k_max: usize,
    pub n_trunc: usize,
}

impl OrderSeries {
    /// `u^(k)`, 1-based.
    pub fn order(&self, k: usize) -> &FourierMap {
        &self.orders[k - 1]
    }
}

/// Recursion state: propagator factorisations and the monomial cache.
pub struct Recursion<'a> {
    problem: &'a Problem,
    eps: f64,
    zeta: DVector<f64>,
    engine: GradedEngine<'a>,
    prop: Propagator,
    n_trunc: usize,
    exec: Exec,
    orders: Vec<FourierMap>,
}

impl<'a> Recursion<'a> {
    pub fn new(problem: &'a Problem, comp: &'a Composite, eps: f64, zeta: &DVector<f64>, params: &SeriesParams) -> Self {
        let n_trunc = params.resolved_n_trunc(problem);
        Self {
            problem,
            eps,
            zeta: zeta.clone(),
            engine: GradedEngine::new(comp, Some(n_trunc), params.exec),
            prop: Propagator::new(eps, problem),
            n_trunc,
            exec: params.exec,
            orders: Vec::new(),
        }
    }

    pub fn orders(&self) -> &[FourierMap] {
        &self.orders
    }

    /// `u_ν = −D⁻¹(ε, ω·ν) ε P_ν` for every `ν ≠ 0` in the support of `p`.
    fn solve_range(&mut self, p: &FourierMap) -> Result<FourierMap> {
        let modes: Vec<Mode> = p.modes().filter(|nu| !nu.is_zero()).cloned().collect();
        self.prop.prefactor(&modes, self.exec);
        let scale = C64::new(-self.eps, 0.0);
        let prop = &self.prop;
        let sols = self.exec.map(&modes, |nu| prop.solve(nu, &(p.at(nu) * scale)));
        let mut out = FourierMap::new(self.problem.m(), self.problem.d(), Some(self.n_trunc));
        for (nu, u) in modes.into_iter().zip(sols) {
            out.insert(nu, u?);
        }
        Ok(out)
    }

    /// Computes and stores the next order.
    pub fn advance(&mut self) -> Result<&FourierMap> {
        let k = self.orders.len() + 1;
        let p = self.engine.composite(k - 1);
        let mut u = self.solve_range(&p)?;
        if k == 1 {
            u.insert(Mode::zero(self.problem.d()), self.zeta.map(|x| C64::new(x, 0.0)));
        }
        self.engine.push_grade(&u);
        self.orders.push(u);
        Ok(self.orders.last().expect("just pushed"))
    }

    /// Feeds an externally computed order into the cache.
    pub fn push_known(&mut self, u: FourierMap) {
        self.engine.push_grade(&u);
        self.orders.push(u);
    }

    /// Grade-`n` composite for the orders pushed so far.
    pub fn composite(&self, n: usize) -> FourierMap {
        self.engine.composite(n)
    }

    pub fn into_series(self, k_max: usize) -> OrderSeries {
        OrderSeries { orders: self.orders, zeta: self.zeta, epsilon: self.eps, k_max, n_trunc: self.n_trunc }
    }
}

/// `u^(1)`: the forcing response plus `ζ` at the zero mode.
pub fn first_order(eps: f64, problem: &Problem, zeta: &DVector<f64>, params: &SeriesParams) -> Result<FourierMap> {
    let comp = Composite::new(problem);
    let mut rec = Recursion::new(problem, &comp, eps, zeta, params);
    Ok(rec.advance()?.clone())
}

/// Grade-`(k−1)` composite given orders `1..k−1`.
pub fn compose_nonlinearity(orders: &[FourierMap], problem: &Problem, params: &SeriesParams) -> FourierMap {
    let comp = Composite::new(problem);
    let zeta = DVector::zeros(problem.m());
    let mut rec = Recursion::new(problem, &comp, 1.0, &zeta, params);
    for u in orders {
        rec.push_known(u.clone());
    }
    rec.composite(orders.len())
}

/// `u^(k)` from orders `1..k−1`.
pub fn next_order(k: usize, orders: &[FourierMap], eps: f64, problem: &Problem, params: &SeriesParams) -> Result<FourierMap> {
    assert!(k >= 2 && orders.len() >= k - 1, "next_order needs orders 1..k-1");
    let comp = Composite::new(problem);
    let zeta = DVector::zeros(problem.m());
    let mut rec = Recursion::new(problem, &comp, eps, &zeta, params);
    for u in &orders[..k - 1] {
        rec.push_known(u.clone());
    }
    Ok(rec.advance()?.clone())
}

/// All orders `1..=k_max`.
pub fn compute_orders(eps: f64, problem: &Problem, zeta: &DVector<f64>, params: &SeriesParams) -> Result<OrderSeries> {
    let comp = Composite::new(problem);
    let mut rec = Recursion::new(problem, &comp, eps, zeta, params);
    for _ in 0..params.k_max {
        rec.advance()?;
    }
    Ok(rec.into_series(params.k_max))
}

/// Convergence diagnostics of the order sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioDiagnostics {
    /// `a_k = max_{ν≠0} |u^(k)_ν|`.
    pub per_order_norms: Vec<f64>,
    /// `a_K / a_{K'}` over the last two nonzero orders.
    pub ratio: Option<f64>,
    pub flags: Vec<String>,
}

pub const NON_CONVERGENT: &str = "NON_CONVERGENT";

/// `u_ν = Σ_k μ^k u^(k)_ν` over `ν ≠ 0`.
pub fn sum_series(series: &OrderSeries, mu: f64) -> (FourierMap, RatioDiagnostics) {
    let first = &series.orders[0];
    let mut u = FourierMap::new(first.m(), first.d(), Some(series.n_trunc));
    let mut norms = Vec::with_capacity(series.orders.len());
    let mut w = 1.0;
    for ord in &series.orders {
        w *= mu;
        let nz = ord.without_zero_mode();
        norms.push(nz.coeff_sup());
        if w != 0.0 {
            for (nu, v) in nz.iter() {
                u.accumulate(nu, &(v * C64::new(w, 0.0)));
            }
        }
    }
    let nonzero: Vec<f64> = norms.iter().copied().filter(|a| *a > 0.0).collect();
    let ratio = (nonzero.len() >= 2).then(|| nonzero[nonzero.len() - 1] / nonzero[nonzero.len() - 2]);
    let mut flags = Vec::new();
    if ratio.is_some_and(|r| r >= 1.0) {
        flags.push(NON_CONVERGENT.to_string());
    }
    (u, RatioDiagnostics { per_order_norms: norms, ratio, flags })
}
