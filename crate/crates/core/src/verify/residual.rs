use nalgebra::DVector;
use serde::Serialize;

use crate::exec::Exec;
use crate::fourier::FourierMap;
use crate::linalg::to_complex;
use crate::mode::Mode;
use crate::model::Problem;
use crate::propagator::Propagator;
use crate::series::FourierForce;
use crate::C64;

/// Fourier-space residual of the equation of motion under the response ansatz.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub per_mode: FourierMap,
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub dominant_mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub sup: f64,
    pub l2: f64,
    pub dominant_mode: Mode,
}

impl ResidualReport {
    pub fn summary(&self) -> ResidualSummary {
        ResidualSummary { sup: self.sup_norm, l2: self.l2_norm, dominant_mode: self.dominant_mode.clone() }
    }
}

/// `R_ν = D(ε, ω·ν)u_ν − εAu_ν + ε[F(c+ζ+u)]_ν` for `ν ≠ 0`, `R₀ = ε[F(c+ζ+u)]₀`.
///
/// The nonlinearity is convolved exactly from the raw polynomials, so modes
/// beyond the truncation of `u` show up in the report.
pub fn ode_residual(u: &FourierMap, zeta: &DVector<f64>, eps: f64, problem: &Problem, exec: Exec) -> ResidualReport {
    let (m, d) = (problem.m(), problem.d());
    let zero = Mode::zero(d);
    let mut x = u.without_zero_mode().with_truncation(None);
    x.accumulate(&zero, &(&problem.center + zeta).map(|v| C64::new(v, 0.0)));
    let force = FourierForce::new(problem).evaluate(&x, exec);

    let mut modes: Vec<Mode> = force.modes().chain(x.modes()).cloned().collect();
    modes.sort();
    modes.dedup();
    let prop = Propagator::new(eps, problem);
    let a = to_complex(&problem.a);
    let epsc = C64::new(eps, 0.0);
    let rows = exec.map(&modes, |nu| {
        let f = force.at(nu) * epsc;
        if nu.is_zero() {
            f
        } else {
            let un = x.at(nu);
            prop.apply(nu, &un) - &a * &un * epsc + f
        }
    });

    let mut per_mode = FourierMap::new(m, d, None);
    let mut sup = 0.0_f64;
    let mut l2 = 0.0;
    let mut dominant = zero;
    for (nu, r) in modes.into_iter().zip(rows) {
        let n = r.norm();
        l2 += r.norm_squared();
        if n > sup {
            sup = n;
            dominant = nu.clone();
        }
        per_mode.insert(nu, r);
    }
    ResidualReport { per_mode, sup_norm: sup, l2_norm: l2.sqrt(), dominant_mode: dominant }
}
