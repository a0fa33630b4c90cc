use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Exponent multi-index of a monomial, one entry per variable.
pub type Exponent = Vec<u32>;

/// Real multivariate polynomial stored as a sparse term map.
///
/// Exponents are unique and zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// `Σ aᵢ xᵢ`.
    pub fn linear(coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, &a) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, a);
        }
        p
    }

    /// Builds a polynomial from terms; repeated exponents are summed.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, f64)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::validation(format!(
                    "polynomial term exponent has {} entries, expected {nvars}",
                    e.len()
                )));
            }
            if !c.is_finite() {
                return Err(Error::validation("polynomial coefficient is not finite"));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, e: Exponent, c: f64) {
        debug_assert_eq!(e.len(), self.nvars);
        let v = self.terms.get(&e).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, f64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[var] > 0 {
                let mut de = e.clone();
                de[var] -= 1;
                out.add_term(de, c * e[var] as f64);
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn plus(&self, other: &Polynomial) -> Self {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn minus(&self, other: &Polynomial) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    /// Largest coefficient magnitude.
    pub fn coeff_scale(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

/// `∂V/∂xᵢ` for every variable.
pub fn gradient(poly: &Polynomial) -> Vec<Polynomial> {
    (0..poly.nvars()).map(|i| poly.derivative(i)).collect()
}

/// Hessian as a row-major grid of polynomials.
pub fn hessian(poly: &Polynomial) -> Vec<Vec<Polynomial>> {
    gradient(poly).iter().map(gradient).collect()
}

/// Effective potential `U(x) = V(x) − ⟨f₀, x⟩`.
pub fn build_u(v: &Polynomial, f0: &[f64]) -> Polynomial {
    v.minus(&Polynomial::linear(f0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(nvars: usize, terms: &[(&[u32], f64)]) -> Polynomial {
        Polynomial::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap()
    }

    #[test]
    fn gradient_of_half_square() {
        let v = p(1, &[(&[2], 0.5)]);
        assert_eq!(gradient(&v), vec![p(1, &[(&[1], 1.0)])]);
    }

    #[test]
    fn gradient_of_coupled_potential() {
        // V = x1²/2 + x2²/2 + x1²x2
        let v = p(2, &[(&[2, 0], 0.5), (&[0, 2], 0.5), (&[2, 1], 1.0)]);
        let g = gradient(&v);
        assert_eq!(g[0], p(2, &[(&[1, 0], 1.0), (&[1, 1], 2.0)]));
        assert_eq!(g[1], p(2, &[(&[0, 1], 1.0), (&[2, 0], 1.0)]));
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let v = Polynomial::constant(3, 4.2);
        assert!(gradient(&v).iter().all(Polynomial::is_zero));
    }

    #[test]
    fn build_u_examples() {
        let v = p(1, &[(&[2], 0.5)]);
        assert_eq!(build_u(&v, &[0.0]), v);
        assert_eq!(build_u(&v, &[1.0]), p(1, &[(&[2], 0.5), (&[1], -1.0)]));
        let q = p(1, &[(&[4], 0.25)]);
        assert_eq!(build_u(&q, &[0.0]), q);
    }

    #[test]
    fn duplicates_merge_and_zeros_drop() {
        let q = p(1, &[(&[2], 0.5), (&[2], 0.5), (&[1], 1.0), (&[1], -1.0)]);
        assert_eq!(q.num_terms(), 1);
        assert_eq!(q.eval(&[3.0]), 9.0);
        assert!(Polynomial::from_terms(2, vec![(vec![1], 1.0)]).is_err());
    }

    #[test]
    fn degree_and_eval() {
        let v = p(2, &[(&[2, 0], 0.5), (&[2, 1], 1.0)]);
        assert_eq!(v.degree(), 3);
        assert!((v.eval(&[2.0, 3.0]) - (2.0 + 12.0)).abs() < 1e-15);
    }
}
