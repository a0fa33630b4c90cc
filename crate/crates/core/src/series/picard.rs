use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fourier::{convolve, FourierMap, ScalarMap};
use crate::linalg::to_complex;
use crate::mode::Mode;
use crate::model::{gradient, Polynomial, Problem, SystemKind};
use crate::propagator::Propagator;
use crate::C64;

/// Exact Fourier coefficients of `F(x(ψ), ψ)` (`g(x) − f(ψ)` or `h(x, ψ)`),
/// evaluated from the raw polynomials rather than the Taylor tensors.
#[derive(Debug, Clone)]
pub struct FourierForce {
    m: usize,
    d: usize,
    /// Per component: `(ν₀, exponent, coefficient)`.
    terms: Vec<Vec<(Mode, Vec<u32>, C64)>>,
    forcing: FourierMap,
}

impl FourierForce {
    pub fn new(problem: &Problem) -> Self {
        let (m, d) = (problem.m(), problem.d());
        let mut terms = vec![Vec::new(); m];
        let mut forcing = FourierMap::new(m, d, None);
        let push = |terms: &mut Vec<Vec<(Mode, Vec<u32>, C64)>>, i: usize, nu: &Mode, p: &Polynomial, unit: C64| {
            for (e, c) in p.terms() {
                terms[i].push((nu.clone(), e.clone(), unit * c));
            }
        };
        match &problem.spec.kind {
            SystemKind::GradientAutonomous { potential, forcing: f } => {
                let zero = Mode::zero(d);
                for (i, g) in gradient(potential).iter().enumerate() {
                    push(&mut terms, i, &zero, g, C64::new(1.0, 0.0));
                }
                for (nu, v) in f.modes() {
                    forcing.insert(nu.clone(), -v);
                }
            }
            SystemKind::GradientForced { potential } => {
                for (nu, grads) in potential.gradient_modes() {
                    for (i, g) in grads.iter().enumerate() {
                        push(&mut terms, i, &nu, &g.re, C64::new(1.0, 0.0));
                        push(&mut terms, i, &nu, &g.im, C64::new(0.0, 1.0));
                    }
                }
            }
        }
        Self { m, d, terms, forcing }
    }

    /// `[F(x(·), ·)]_ν` for all ν, untruncated.
    pub fn evaluate(&self, x: &FourierMap, exec: Exec) -> FourierMap {
        let comps: Vec<ScalarMap> = (0..self.m).map(|j| x.component(j)).collect();
        let mut cache: BTreeMap<Vec<u32>, ScalarMap> = BTreeMap::new();
        let mut out = self.forcing.clone();
        for (i, terms) in self.terms.iter().enumerate() {
            let mut acc: BTreeMap<Mode, C64> = BTreeMap::new();
            for (shift, e, c) in terms {
                let mono = monomial(e, &comps, &mut cache, self.d, exec);
                for (nu, v) in mono {
                    *acc.entry(nu + shift).or_default() += c * v;
                }
            }
            for (nu, v) in acc {
                let mut vec = DVector::zeros(self.m);
                vec[i] = v;
                out.accumulate(&nu, &vec);
            }
        }
        out
    }
}

fn monomial<'c>(
    e: &[u32],
    comps: &[ScalarMap],
    cache: &'c mut BTreeMap<Vec<u32>, ScalarMap>,
    d: usize,
    exec: Exec,
) -> &'c ScalarMap {
    if !cache.contains_key(e) {
        let value = match e.iter().rposition(|&a| a > 0) {
            None => ScalarMap::from([(Mode::zero(d), C64::new(1.0, 0.0))]),
            Some(j) => {
                let mut beta = e.to_vec();
                beta[j] -= 1;
                let prev = monomial(&beta, comps, cache, d, exec).clone();
                convolve(&prev, &comps[j], None, exec)
            }
        };
        cache.insert(e.to_vec(), value);
    }
    &cache[e]
}

/// Outcome of the fixed-point iteration. `iterations` counts the map
/// applications that changed `u` by more than the tolerance.
#[derive(Debug, Clone)]
pub struct PicardResult {
    pub u: FourierMap,
    pub iterations: usize,
    pub last_diff: f64,
}

const BLOW_UP: f64 = 1e100;

/// Direct fixed-point iteration on the range equation,
/// `u_ν ← D⁻¹(ε, ω·ν)(εA u_ν − ε[F(c+ζ+u, ·)]_ν)` for `ν ≠ 0`, from `u = 0`.
pub fn picard_solve(
    eps: f64,
    problem: &Problem,
    zeta: &DVector<f64>,
    tol: f64,
    max_iter: usize,
    n_trunc: usize,
    exec: Exec,
) -> Result<PicardResult> {
    let (m, d) = (problem.m(), problem.d());
    let force = FourierForce::new(problem);
    let mut prop = Propagator::new(eps, problem);
    let a = to_complex(&problem.a);
    let zero = Mode::zero(d);
    let x0 = (&problem.center + zeta).map(|v| C64::new(v, 0.0));
    let epsc = C64::new(eps, 0.0);

    let mut u = FourierMap::new(m, d, Some(n_trunc));
    let mut diff = f64::INFINITY;
    for it in 1..=max_iter {
        let mut x = u.with_truncation(None);
        x.accumulate(&zero, &x0);
        let f = force.evaluate(&x, exec);
        let mut modes: Vec<Mode> = f.modes().chain(u.modes()).filter(|nu| !nu.is_zero() && nu.l1() <= n_trunc).cloned().collect();
        modes.sort();
        modes.dedup();
        prop.prefactor(&modes, exec);
        let prop_ref = &prop;
        let sols = exec.map(&modes, |nu| prop_ref.solve(nu, &((&a * u.at(nu) - f.at(nu)) * epsc)));
        let mut next = FourierMap::new(m, d, Some(n_trunc));
        for (nu, s) in modes.into_iter().zip(sols) {
            next.insert(nu, s?);
        }
        diff = next.max_abs_diff(&u);
        u = next;
        if !diff.is_finite() || u.coeff_sup() > BLOW_UP {
            return Err(Error::NonConvergence { context: "series::picard_solve", iterations: it, residual: diff });
        }
        if diff <= tol {
            return Ok(PicardResult { u, iterations: it - 1, last_diff: diff });
        }
    }
    Err(Error::NonConvergence { context: "series::picard_solve", iterations: max_iter, residual: diff })
}
