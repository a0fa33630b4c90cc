//! Reference instances used by the tests, the benchmarks and the README.

use nalgebra::{DMatrix, DVector};

use crate::mode::Mode;
use crate::model::{ComplexPoly, Polynomial, SystemKind, SystemSpec, TrigPolynomialFamily, TrigVectorField};
use crate::C64;

fn poly(m: usize, terms: &[(&[u32], f64)]) -> Polynomial {
    Polynomial::from_terms(m, terms.iter().map(|(e, c)| (e.to_vec(), *c))).expect("valid reference polynomial")
}

/// Real cosine forcing `Σ 2 a_ν cos(ν·ψ)` from `(ν, a_ν)` pairs.
fn cosines(m: usize, d: usize, modes: &[(&[i32], &[f64])]) -> TrigVectorField {
    let half = modes
        .iter()
        .map(|(nu, a)| (Mode::from_slice(nu), DVector::from_iterator(m, a.iter().map(|&x| C64::new(x, 0.0)))))
        .collect();
    TrigVectorField::from_half(m, d, half).expect("valid reference forcing").0
}

fn autonomous(omega: Vec<f64>, damping: DMatrix<f64>, potential: Polynomial, forcing: TrigVectorField) -> SystemSpec {
    let m = damping.nrows();
    SystemSpec::new(omega, DMatrix::identity(m, m), damping, SystemKind::GradientAutonomous { potential, forcing })
        .expect("valid reference system")
}

/// `g = x`, `f = 2 cos ψ`, `Γ = 1`; response `x(t) = 2ε sin t`.
pub fn linear() -> SystemSpec {
    autonomous(vec![1.0], DMatrix::identity(1, 1), poly(1, &[(&[2], 0.5)]), cosines(1, 1, &[(&[1], &[1.0])]))
}

/// `g = x + x³`, `f = 2 cos ψ`.
pub fn cubic() -> SystemSpec {
    autonomous(
        vec![1.0],
        DMatrix::identity(1, 1),
        poly(1, &[(&[2], 0.5), (&[4], 0.25)]),
        cosines(1, 1, &[(&[1], &[1.0])]),
    )
}

/// `g = x + x² + x³`, `f = 2 cos ψ`.
pub fn asymmetric_cubic() -> SystemSpec {
    autonomous(
        vec![1.0],
        DMatrix::identity(1, 1),
        poly(1, &[(&[2], 0.5), (&[3], 1.0 / 3.0), (&[4], 0.25)]),
        cosines(1, 1, &[(&[1], &[1.0])]),
    )
}

/// `V = (x₁² + x₂²)/2 + x₁²x₂`, `f = (2, 1) cos ψ`, non-diagonal damping.
pub fn coupled() -> SystemSpec {
    autonomous(
        vec![1.0],
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]),
        poly(2, &[(&[2, 0], 0.5), (&[0, 2], 0.5), (&[2, 1], 1.0)]),
        cosines(2, 1, &[(&[1], &[1.0, 0.5])]),
    )
}

/// Cubic oscillator driven at two nearly equal frequencies `ω = (1, 1.0001)`.
pub fn near_resonant() -> SystemSpec {
    autonomous(
        vec![1.0, 1.0001],
        DMatrix::identity(1, 1),
        poly(1, &[(&[2], 0.5), (&[4], 0.25)]),
        cosines(1, 2, &[(&[1, 0], &[1.0]), (&[0, 1], &[1.0])]),
    )
}

/// Phase-dependent potential with `ω = (1, √2)`, `M = diag(1, 2)`:
/// `Ṽ = x₁²/2 + x₂²/2 + x₁⁴/4 + cos ψ₁ (x₁ + x₁²x₂) + cos ψ₂ (x₂ + x₁x₂)`.
pub fn forced_potential() -> SystemSpec {
    let half = vec![
        (Mode::from_slice(&[0, 0]), ComplexPoly::real(poly(2, &[(&[2, 0], 0.5), (&[0, 2], 0.5), (&[4, 0], 0.25)]))),
        (Mode::from_slice(&[1, 0]), ComplexPoly::real(poly(2, &[(&[1, 0], 0.5), (&[2, 1], 0.5)]))),
        (Mode::from_slice(&[0, 1]), ComplexPoly::real(poly(2, &[(&[0, 1], 0.5), (&[1, 1], 0.5)]))),
    ];
    let family = TrigPolynomialFamily::from_half(2, 2, half).expect("valid reference potential").0;
    SystemSpec::new(
        vec![1.0, 2f64.sqrt()],
        DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])),
        DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 1.5]),
        SystemKind::GradientForced { potential: family },
    )
    .expect("valid reference system")
}
