//! Quasi-periodic response solutions of strongly dissipative, quasi-periodically
//! forced mechanical systems
//!
//! ```text
//!     ε M ẍ + Γ ẋ + ε g(x) = ε f(ωt)        (gradient-autonomous)
//!     ε M ẍ + Γ ẋ + ε h(x, ωt) = 0           (gradient-forced)
//! ```
//!
//! The solution is written as `x(t) = c + ζ + u(ωt)` with `c` the minimum of the
//! averaged effective potential. The zero-average part `u` is computed order by
//! order in Fourier space ([`series`]), cross-checked against a brute-force tree
//! expansion ([`trees`]), and the free constant `ζ` is fixed by solving the
//! zero-mode balance ([`bifurcation`]). [`verify`] substitutes the result back
//! into the equation of motion and compares it with a stiff time integration.
//!
//! Nonlinearities are polynomials in `x` and forcings are trigonometric
//! polynomials in the phase, so every Taylor tensor and Fourier product is exact.
//! Rational independence of ω is not checked; [`propagator::small_divisor_scan`]
//! reports near-resonances instead.

pub mod bifurcation;
pub mod cli;
pub mod error;
pub mod exec;
pub mod fourier;
pub mod linalg;
pub mod mode;
pub mod model;
pub mod propagator;
pub mod series;
pub mod systems;
pub mod trees;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
pub use fourier::FourierMap;
pub use mode::Mode;
pub use model::{Polynomial, Problem, SystemKind, SystemSpec, TaylorTensors, TrigPolynomialFamily, TrigVectorField};

pub use nalgebra::{DMatrix, DVector};
pub use nalgebra::Complex;

/// Complex double used for all Fourier coefficients.
pub type C64 = Complex<f64>;
