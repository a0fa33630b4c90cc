use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fourier::FourierMap;

/// Imaginary parts above this signal broken Hermitian symmetry.
pub const LEAK_TOL: f64 = 1e-9;

/// `x(ψ) = c + ζ + Σ_ν e^{iν·ψ} u_ν`.
pub fn evaluate(u: &FourierMap, zeta: &DVector<f64>, c: &DVector<f64>, psi: &[f64]) -> Result<DVector<f64>> {
    let z = u.evaluate(psi);
    let imag = z.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if imag > LEAK_TOL {
        return Err(Error::ComplexLeak { imag });
    }
    Ok(c + zeta + z.map(|v| v.re))
}

/// Grid points per torus direction used for sup norms.
pub fn sup_grid(d: usize) -> usize {
    match d {
        1 | 2 => 64,
        3 => 32,
        _ => 12,
    }
}

/// `sup_ψ |u(ψ)|` (Euclidean norm in `R^m`) on a uniform grid of the torus.
///
/// The grid size is a multiple of 4, so quarter-period phases are sampled.
pub fn u_sup_norm(u: &FourierMap, exec: Exec) -> f64 {
    let d = u.d();
    let n = sup_grid(d);
    let total = n.pow(d as u32);
    let idx: Vec<usize> = (0..total).collect();
    let h = std::f64::consts::TAU / n as f64;
    let vals = exec.map(&idx, |&flat| {
        let mut r = flat;
        let psi: Vec<f64> = (0..d)
            .map(|_| {
                let k = r % n;
                r /= n;
                k as f64 * h
            })
            .collect();
        u.evaluate(&psi).map(|v| v.re).norm()
    });
    vals.into_iter().fold(0.0, f64::max)
}
