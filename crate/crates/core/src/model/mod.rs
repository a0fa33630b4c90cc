//! Problem instances: polynomial potentials, trigonometric forcings, the
//! expansion point and the Taylor tensors of the nonlinearity there.

mod minimum;
mod polynomial;
mod problem;
mod system;
mod tensors;
mod trig;

pub use minimum::find_minimum;
pub use polynomial::{build_u, gradient, hessian, Exponent, Polynomial};
pub use problem::Problem;
pub use system::{ForceField, SystemKind, SystemSpec};
pub use tensors::{taylor_tensors, SymTensor, TaylorTensors};
pub use trig::{ComplexPoly, TrigPolynomialFamily, TrigVectorField};
