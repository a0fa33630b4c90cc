use nalgebra::{DMatrix, DVector};

use super::polynomial::{build_u, gradient, hessian, Polynomial};
use super::trig::{ComplexPoly, TrigPolynomialFamily, TrigVectorField};
use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, sym_eigenvalues};
use crate::mode::Mode;
use crate::C64;

/// Which of the two equation families the instance belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    /// `εMẍ + Γẋ + ε∇V(x) = εf(ωt)`.
    GradientAutonomous { potential: Polynomial, forcing: TrigVectorField },
    /// `εMẍ + Γẋ + ε∇ₓṼ(x, ωt) = 0`.
    GradientForced { potential: TrigPolynomialFamily },
}

/// A validated problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub m: usize,
    pub d: usize,
    pub omega: Vec<f64>,
    pub mass: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub kind: SystemKind,
}

impl SystemSpec {
    pub fn new(
        omega: Vec<f64>,
        mass: DMatrix<f64>,
        damping: DMatrix<f64>,
        kind: SystemKind,
    ) -> Result<Self> {
        let d = omega.len();
        let m = damping.nrows();
        if m == 0 || d == 0 {
            return Err(Error::validation("dimensions m and d must be at least 1"));
        }
        if omega.iter().any(|w| *w == 0.0 || !w.is_finite()) {
            return Err(Error::validation("all frequency components must be finite and nonzero"));
        }
        check_spd(&mass, m, "mass")?;
        check_spd(&damping, m, "damping")?;
        match &kind {
            SystemKind::GradientAutonomous { potential, forcing } => {
                if potential.nvars() != m {
                    return Err(Error::validation("potential has the wrong number of variables"));
                }
                if forcing.m() != m || forcing.d() != d {
                    return Err(Error::validation("forcing has the wrong dimensions"));
                }
            }
            SystemKind::GradientForced { potential } => {
                if potential.m() != m || potential.d() != d {
                    return Err(Error::validation("phase-dependent potential has the wrong dimensions"));
                }
            }
        }
        Ok(Self { m, d, omega, mass, damping, kind })
    }

    pub fn is_autonomous(&self) -> bool {
        matches!(self.kind, SystemKind::GradientAutonomous { .. })
    }

    /// The function whose strict local minimum is the expansion point:
    /// `U = V − ⟨f₀, x⟩` or `Ṽ₀`.
    pub fn effective_potential(&self) -> Polynomial {
        match &self.kind {
            SystemKind::GradientAutonomous { potential, forcing } => {
                build_u(potential, forcing.mean().as_slice())
            }
            SystemKind::GradientForced { potential } => potential.average(),
        }
    }

    /// Nonzero modes carrying forcing (or phase dependence of the potential).
    pub fn mode_support(&self) -> Vec<Mode> {
        match &self.kind {
            SystemKind::GradientAutonomous { forcing, .. } => {
                forcing.modes().map(|(k, _)| k.clone()).filter(|k| !k.is_zero()).collect()
            }
            SystemKind::GradientForced { potential } => {
                potential.modes().map(|(k, _)| k.clone()).filter(|k| !k.is_zero()).collect()
            }
        }
    }

    /// Largest `|ν|₁` among the forcing modes, at least 1.
    pub fn forcing_radius(&self) -> usize {
        let r = match &self.kind {
            SystemKind::GradientAutonomous { forcing, .. } => forcing.max_mode_l1(),
            SystemKind::GradientForced { potential } => potential.max_mode_l1(),
        };
        r.max(1)
    }

    pub fn mode_dot(&self, nu: &Mode) -> f64 {
        nu.dot(&self.omega)
    }
}

fn check_spd(a: &DMatrix<f64>, m: usize, name: &str) -> Result<()> {
    if a.nrows() != m || a.ncols() != m {
        return Err(Error::validation(format!("{name} matrix must be {m}x{m}")));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::validation(format!("{name} matrix has non-finite entries")));
    }
    if !is_symmetric(a, 1e-14) {
        return Err(Error::validation(format!("{name} not symmetric")));
    }
    if sym_eigenvalues(a)[0] <= 0.0 {
        return Err(Error::validation(format!("{name} not positive definite")));
    }
    Ok(())
}

/// Time-domain right-hand side data: the generalised force `F(x, ψ)` such that
/// the equation of motion reads `εMẍ + Γẋ + εF(x, ωt) = 0`.
#[derive(Debug, Clone)]
pub struct ForceField {
    m: usize,
    kind: ForceKind,
}

#[derive(Debug, Clone)]
enum ForceKind {
    Autonomous {
        potential: Polynomial,
        grad: Vec<Polynomial>,
        hess: Vec<Vec<Polynomial>>,
        forcing: TrigVectorField,
    },
    Forced {
        family: TrigPolynomialFamily,
        modes: Vec<(Mode, Vec<ComplexPoly>, Vec<Vec<ComplexPoly>>)>,
    },
}

impl ForceField {
    pub fn new(spec: &SystemSpec) -> Self {
        let kind = match &spec.kind {
            SystemKind::GradientAutonomous { potential, forcing } => ForceKind::Autonomous {
                potential: potential.clone(),
                grad: gradient(potential),
                hess: hessian(potential),
                forcing: forcing.clone(),
            },
            SystemKind::GradientForced { potential } => ForceKind::Forced {
                family: potential.clone(),
                modes: potential
                    .gradient_modes()
                    .into_iter()
                    .map(|(nu, g)| {
                        let h = g.iter().map(|gi| (0..spec.m).map(|j| gi.derivative(j)).collect()).collect();
                        (nu, g, h)
                    })
                    .collect(),
            },
        };
        Self { m: spec.m, kind }
    }

    /// `g(x) − f(ψ)` or `h(x, ψ)`.
    pub fn force(&self, x: &[f64], psi: &[f64]) -> DVector<f64> {
        match &self.kind {
            ForceKind::Autonomous { grad, forcing, .. } => {
                let f = forcing.eval_real(psi);
                DVector::from_iterator(self.m, grad.iter().enumerate().map(|(i, g)| g.eval(x) - f[i]))
            }
            ForceKind::Forced { modes, .. } => {
                let mut out = DVector::<f64>::zeros(self.m);
                for (nu, g, _) in modes {
                    let ph = C64::from_polar(1.0, nu.phase(psi));
                    for (i, gi) in g.iter().enumerate() {
                        out[i] += (gi.eval(x) * ph).re;
                    }
                }
                out
            }
        }
    }

    /// `∂F/∂x`.
    pub fn jacobian(&self, x: &[f64], psi: &[f64]) -> DMatrix<f64> {
        match &self.kind {
            ForceKind::Autonomous { hess, .. } => DMatrix::from_fn(self.m, self.m, |i, j| hess[i][j].eval(x)),
            ForceKind::Forced { modes, .. } => {
                let mut out = DMatrix::<f64>::zeros(self.m, self.m);
                for (nu, _, h) in modes {
                    let ph = C64::from_polar(1.0, nu.phase(psi));
                    for i in 0..self.m {
                        for j in 0..self.m {
                            out[(i, j)] += (h[i][j].eval(x) * ph).re;
                        }
                    }
                }
                out
            }
        }
    }

    /// Potential energy `V(x)` or `Ṽ(x, ψ)`.
    pub fn potential(&self, x: &[f64], psi: &[f64]) -> f64 {
        match &self.kind {
            ForceKind::Autonomous { potential, .. } => potential.eval(x),
            ForceKind::Forced { family, .. } => family.eval(x, psi),
        }
    }
}
