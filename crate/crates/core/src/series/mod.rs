//! Order-by-order perturbation series in Fourier space, its summation, and an
//! independent fixed-point solver for cross-checking.

mod engine;
mod eval;
mod orders;
mod picard;

pub use engine::{Composite, GradedEngine};
pub use eval::{evaluate, sup_grid, u_sup_norm, LEAK_TOL};
pub use orders::{
    compose_nonlinearity, compute_orders, first_order, next_order, sum_series, OrderSeries, RatioDiagnostics,
    Recursion, SeriesParams, NON_CONVERGENT,
};
pub use picard::{picard_solve, FourierForce, PicardResult};

#[cfg(test)]
mod tests;
