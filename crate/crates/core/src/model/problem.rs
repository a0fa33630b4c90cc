use nalgebra::{DMatrix, DVector};

use super::minimum::find_minimum;
use super::system::{ForceField, SystemKind, SystemSpec};
use super::tensors::{taylor_tensors, TaylorTensors};
use crate::error::Result;
use crate::mode::Mode;

/// A system together with its expansion point and Taylor data.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: SystemSpec,
    pub center: DVector<f64>,
    pub tensors: TaylorTensors,
    /// `A = G₁(c)` or `H_{1,0}(c)`.
    pub a: DMatrix<f64>,
    /// Zero-mode constant of the nonlinearity: `g(c) − f₀` or `h₀(c)`.
    /// Vanishes up to the minimiser's tolerance.
    pub offset: DVector<f64>,
    pub force: ForceField,
}

impl Problem {
    /// Locates the expansion point from the origin.
    pub fn new(spec: SystemSpec) -> Result<Self> {
        let guess = DVector::zeros(spec.m);
        Self::with_guess(spec, &guess)
    }

    pub fn with_guess(spec: SystemSpec, guess: &DVector<f64>) -> Result<Self> {
        let u = spec.effective_potential();
        let tol = 1e-12 * u.coeff_scale().max(1.0);
        let c = find_minimum(&u, guess, tol)?;
        Self::with_center(spec, c)
    }

    /// Uses a caller-supplied expansion point; the Hessian check still runs.
    pub fn with_center(spec: SystemSpec, center: DVector<f64>) -> Result<Self> {
        let tensors = taylor_tensors(&spec, &center)?;
        let a = tensors.a();
        let zero = Mode::zero(spec.d);
        let mut offset = tensors.tensor(&zero, 0).map(|t| t.contract(&[]).map(|z| z.re)).unwrap_or_else(|| DVector::zeros(spec.m));
        if let SystemKind::GradientAutonomous { forcing, .. } = &spec.kind {
            offset -= forcing.mean();
        }
        let force = ForceField::new(&spec);
        Ok(Self { spec, center, tensors, a, offset, force })
    }

    pub fn m(&self) -> usize {
        self.spec.m
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }
}
