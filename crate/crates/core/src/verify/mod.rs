//! Checks that do not trust the series solver: the exact Fourier residual of
//! the equation of motion, a stiff time-domain reference integration, and
//! decay diagnostics.

mod decay;
mod integrate;
mod residual;

pub use decay::{decay_report, diagnostic_constants, DecayReport, DiagnosticConstants};
pub use integrate::{attractor_compare, dft_amplitude, energy, integrate_reference, Trajectory};
pub use residual::{ode_residual, ResidualReport, ResidualSummary};

/// Transient length `20 κ_m² / (ε b₁)` set by the slowest relaxation rate.
pub fn transient_time(eps: f64, kappa_max: f64, b1: f64) -> f64 {
    20.0 * kappa_max * kappa_max / (eps * b1)
}
