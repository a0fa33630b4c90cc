use std::collections::BTreeMap;

use nalgebra::DVector;

use super::polynomial::{gradient, Polynomial};
use crate::error::{Error, Result};
use crate::mode::Mode;
use crate::C64;

const HERMITIAN_TOL: f64 = 1e-14;

/// Real vector field on the torus, `f(ψ) = Σ_ν e^{iν·ψ} f_ν`.
///
/// Coefficients satisfy `f_{−ν} = conj(f_ν)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigVectorField {
    m: usize,
    d: usize,
    modes: BTreeMap<Mode, DVector<C64>>,
}

impl TrigVectorField {
    pub fn zero(m: usize, d: usize) -> Self {
        Self { m, d, modes: BTreeMap::new() }
    }

    /// Builds the field from a complete, Hermitian-symmetric list of modes.
    pub fn new(m: usize, d: usize, modes: Vec<(Mode, DVector<C64>)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (nu, v) in modes {
            if nu.dim() != d || v.len() != m {
                return Err(Error::validation(format!("forcing mode {nu} has wrong dimensions")));
            }
            if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::validation(format!("forcing coefficient at {nu} is not finite")));
            }
            if map.insert(nu.clone(), v).is_some() {
                return Err(Error::validation(format!("duplicate forcing mode {nu}")));
            }
        }
        map.retain(|_, v: &mut DVector<C64>| v.iter().any(|c| c.norm() > 0.0));
        let scale = map.values().map(|v| v.camax()).fold(0.0, f64::max).max(1.0);
        for (nu, v) in &map {
            let partner = map.get(&-nu).cloned().unwrap_or_else(|| DVector::zeros(m));
            let defect = (v.map(|c| c.conj()) - partner).camax();
            if defect > HERMITIAN_TOL * scale {
                return Err(Error::validation(format!("forcing is not Hermitian-symmetric at mode {nu}")));
            }
        }
        Ok(Self { m, d, modes: map })
    }

    /// Completes the given modes with their conjugate partners.
    ///
    /// Returns a warning for every mode whose partner was supplied with an
    /// inconsistent value; the first-listed mode wins.
    pub fn from_half(m: usize, d: usize, modes: Vec<(Mode, DVector<C64>)>) -> Result<(Self, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut map: BTreeMap<Mode, DVector<C64>> = BTreeMap::new();
        for (nu, mut v) in modes {
            if nu.dim() != d || v.len() != m {
                return Err(Error::validation(format!("forcing mode {nu} has wrong dimensions")));
            }
            if nu.is_zero() && v.iter().any(|c| c.im != 0.0) {
                warnings.push("forcing zero mode has an imaginary part; it was dropped".to_string());
                v = v.map(|c| C64::new(c.re, 0.0));
            }
            if let Some(existing) = map.get(&nu) {
                let scale = existing.camax().max(v.camax()).max(1.0);
                if (existing - &v).camax() > HERMITIAN_TOL * scale {
                    warnings.push(format!("forcing mode {nu} given twice with inconsistent values; kept the first"));
                }
                continue;
            }
            let partner = -&nu;
            let conj = v.map(|c| c.conj());
            map.insert(nu, v);
            if !partner.is_zero() {
                map.entry(partner).or_insert(conj);
            }
        }
        let field = Self::new(m, d, map.into_iter().collect())?;
        Ok((field, warnings))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Mode, &DVector<C64>)> {
        self.modes.iter()
    }

    pub fn coeff(&self, nu: &Mode) -> Option<&DVector<C64>> {
        self.modes.get(nu)
    }

    /// Real average `f₀`.
    pub fn mean(&self) -> DVector<f64> {
        self.modes
            .get(&Mode::zero(self.d))
            .map(|v| v.map(|c| c.re))
            .unwrap_or_else(|| DVector::zeros(self.m))
    }

    pub fn eval(&self, psi: &[f64]) -> DVector<C64> {
        let mut out = DVector::zeros(self.m);
        for (nu, v) in &self.modes {
            out += v * C64::from_polar(1.0, nu.phase(psi));
        }
        out
    }

    pub fn eval_real(&self, psi: &[f64]) -> DVector<f64> {
        self.eval(psi).map(|c| c.re)
    }

    pub fn max_mode_l1(&self) -> usize {
        self.modes.keys().map(Mode::l1).max().unwrap_or(0)
    }
}

/// Complex polynomial coefficient `Ṽ_ν(x) = re(x) + i·im(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    pub re: Polynomial,
    pub im: Polynomial,
}

impl ComplexPoly {
    pub fn real(re: Polynomial) -> Self {
        let n = re.nvars();
        Self { re, im: Polynomial::zero(n) }
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        C64::new(self.re.eval(x), self.im.eval(x))
    }

    pub fn derivative(&self, var: usize) -> Self {
        Self { re: self.re.derivative(var), im: self.im.derivative(var) }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: self.im.scaled(-1.0) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.re.degree().max(self.im.degree())
    }
}

/// Phase-dependent potential `Ṽ(x, ψ) = Σ_ν e^{iν·ψ} Ṽ_ν(x)`, real-valued.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomialFamily {
    m: usize,
    d: usize,
    modes: BTreeMap<Mode, ComplexPoly>,
}

impl TrigPolynomialFamily {
    pub fn new(m: usize, d: usize, modes: Vec<(Mode, ComplexPoly)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (nu, p) in modes {
            if nu.dim() != d || p.re.nvars() != m || p.im.nvars() != m {
                return Err(Error::validation(format!("potential mode {nu} has wrong dimensions")));
            }
            if map.insert(nu.clone(), p).is_some() {
                return Err(Error::validation(format!("duplicate potential mode {nu}")));
            }
        }
        map.retain(|_, p: &mut ComplexPoly| !p.is_zero());
        for (nu, p) in &map {
            let partner = map.get(&-nu);
            let ok = match partner {
                Some(q) => poly_close(&q.re, &p.re) && poly_close(&q.im, &p.im.scaled(-1.0)),
                None => false,
            };
            if !ok {
                return Err(Error::validation(format!(
                    "phase-dependent potential is not Hermitian-symmetric at mode {nu}"
                )));
            }
        }
        Ok(Self { m, d, modes: map })
    }

    /// Completes the given modes with their conjugate partners.
    pub fn from_half(m: usize, d: usize, modes: Vec<(Mode, ComplexPoly)>) -> Result<(Self, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut map: BTreeMap<Mode, ComplexPoly> = BTreeMap::new();
        for (nu, mut p) in modes {
            if nu.is_zero() && !p.im.is_zero() {
                warnings.push("potential zero mode has an imaginary part; it was dropped".to_string());
                p.im = Polynomial::zero(p.re.nvars());
            }
            if let Some(existing) = map.get(&nu) {
                if !(poly_close(&existing.re, &p.re) && poly_close(&existing.im, &p.im)) {
                    warnings.push(format!("potential mode {nu} given twice with inconsistent values; kept the first"));
                }
                continue;
            }
            let partner = -&nu;
            let conj = p.conj();
            map.insert(nu, p);
            if !partner.is_zero() {
                map.entry(partner).or_insert(conj);
            }
        }
        Ok((Self::new(m, d, map.into_iter().collect())?, warnings))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Mode, &ComplexPoly)> {
        self.modes.iter()
    }

    pub fn coeff(&self, nu: &Mode) -> Option<&ComplexPoly> {
        self.modes.get(nu)
    }

    /// `Ṽ₀`, whose minimum is the expansion point.
    pub fn average(&self) -> Polynomial {
        self.modes.get(&Mode::zero(self.d)).map(|p| p.re.clone()).unwrap_or_else(|| Polynomial::zero(self.m))
    }

    /// `h_ν = ∂Ṽ_ν/∂x` for every stored mode.
    pub fn gradient_modes(&self) -> Vec<(Mode, Vec<ComplexPoly>)> {
        self.modes
            .iter()
            .map(|(nu, p)| {
                let g = gradient(&p.re)
                    .into_iter()
                    .zip(gradient(&p.im))
                    .map(|(re, im)| ComplexPoly { re, im })
                    .collect();
                (nu.clone(), g)
            })
            .collect()
    }

    pub fn eval(&self, x: &[f64], psi: &[f64]) -> f64 {
        self.modes.iter().map(|(nu, p)| (p.eval(x) * C64::from_polar(1.0, nu.phase(psi))).re).sum()
    }

    pub fn max_mode_l1(&self) -> usize {
        self.modes.keys().map(Mode::l1).max().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.modes.values().map(ComplexPoly::degree).max().unwrap_or(0)
    }
}

fn poly_close(a: &Polynomial, b: &Polynomial) -> bool {
    let diff = a.minus(b);
    let scale = a.coeff_scale().max(b.coeff_scale()).max(1.0);
    diff.coeff_scale() <= HERMITIAN_TOL * scale
}
