use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fourier::FourierMap;
use crate::model::{ForceField, SystemSpec};
use crate::series::evaluate;

/// Sampled time-domain solution.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<DVector<f64>>,
    pub v: Vec<DVector<f64>>,
    pub steps: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.t.last().copied().unwrap_or(0.0)
    }

    /// Indices of the samples with `t ≥ fraction · t_end`.
    pub fn retained(&self, fraction: f64) -> impl Iterator<Item = usize> + '_ {
        let t0 = fraction * self.t_end();
        (0..self.t.len()).filter(move |&i| self.t[i] >= t0)
    }
}

const GAMMA: f64 = 2.0 - std::f64::consts::SQRT_2;
const MAX_NEWTON: usize = 8;

/// First-order form `y = (x, ẋ)`, `ẏ = (ẋ, −M⁻¹(Γẋ/ε + F(x, ωt)))`.
struct Rhs {
    m: usize,
    omega: Vec<f64>,
    m_inv: DMatrix<f64>,
    damp: DMatrix<f64>,
    force: ForceField,
}

impl Rhs {
    fn phase(&self, t: f64) -> Vec<f64> {
        self.omega.iter().map(|w| w * t).collect()
    }

    fn eval(&self, t: f64, y: &DVector<f64>) -> DVector<f64> {
        let m = self.m;
        let x = y.rows(0, m);
        let v = y.rows(m, m).into_owned();
        let f = self.force.force(x.as_slice(), &self.phase(t));
        let acc = -(&self.damp * &v) - &self.m_inv * f;
        let mut out = DVector::zeros(2 * m);
        out.rows_mut(0, m).copy_from(&v);
        out.rows_mut(m, m).copy_from(&acc);
        out
    }

    fn jacobian(&self, t: f64, y: &DVector<f64>) -> DMatrix<f64> {
        let m = self.m;
        let x = y.rows(0, m);
        let jf = self.force.jacobian(x.as_slice(), &self.phase(t));
        let mut j = DMatrix::zeros(2 * m, 2 * m);
        j.view_mut((0, m), (m, m)).fill_with_identity();
        j.view_mut((m, 0), (m, m)).copy_from(&(-&self.m_inv * jf));
        j.view_mut((m, m), (m, m)).copy_from(&(-&self.damp));
        j
    }
}

fn scaled_norm(e: &DVector<f64>, y: &DVector<f64>, tol: f64) -> f64 {
    e.iter().zip(y.iter()).map(|(ei, yi)| ei.abs() / (tol * (1.0 + yi.abs()))).fold(0.0, f64::max)
}

/// Solves `z − c·h·f(t, z) = rhs` by simplified Newton with the LU of `I − c·h·J`.
fn implicit_stage(
    rhs_fn: &Rhs,
    lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    t: f64,
    ch: f64,
    rhs: &DVector<f64>,
    mut z: DVector<f64>,
    tol: f64,
) -> Option<(DVector<f64>, DVector<f64>)> {
    let mut prev = f64::INFINITY;
    for _ in 0..MAX_NEWTON {
        let fz = rhs_fn.eval(t, &z);
        let r = &z - &fz * ch - rhs;
        let delta = lu.solve(&r)?;
        z -= &delta;
        let n = scaled_norm(&delta, &z, tol);
        if !n.is_finite() || n > 2.0 * prev {
            return None;
        }
        if n <= 1e-2 {
            let fz = rhs_fn.eval(t, &z);
            return Some((z, fz));
        }
        prev = n;
    }
    None
}

fn hermite(t0: f64, h: f64, y0: &DVector<f64>, f0: &DVector<f64>, y1: &DVector<f64>, f1: &DVector<f64>, t: f64) -> DVector<f64> {
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    y0 * h00 + f0 * (h10 * h) + y1 * h01 + f1 * (h11 * h)
}

/// Integrates `εMẍ + Γẋ + εF(x, ωt) = 0` from `(x0, v0)` with the L-stable
/// TR-BDF2 scheme and adaptive steps, sampling every `sample_dt`.
///
/// The local error estimate is filtered through `(I − γh/2·J)⁻¹` so stiff
/// components do not force tiny steps.
pub fn integrate_reference(
    eps: f64,
    spec: &SystemSpec,
    x0: &DVector<f64>,
    v0: &DVector<f64>,
    t_end: f64,
    step_tol: f64,
    sample_dt: f64,
) -> Result<Trajectory> {
    if !(eps > 0.0) || !(t_end > 0.0) || !(step_tol > 0.0) || !(sample_dt > 0.0) {
        return Err(Error::validation("integrate_reference: eps, t_end, step_tol and sample_dt must be positive"));
    }
    let m = spec.m;
    let m_inv = spec.mass.clone().try_inverse().ok_or(Error::NotPositiveDefinite { context: "verify::integrate_reference" })?;
    let rhs = Rhs { m, omega: spec.omega.clone(), damp: &m_inv * &spec.damping / eps, m_inv, force: ForceField::new(spec) };
    let n = 2 * m;
    let c = GAMMA / 2.0;
    let err_k = (-3.0 * GAMMA * GAMMA + 4.0 * GAMMA - 2.0) / (12.0 * (2.0 - GAMMA));
    let a_z = 1.0 / (GAMMA * (2.0 - GAMMA));
    let a_y = (1.0 - GAMMA).powi(2) / (GAMMA * (2.0 - GAMMA));

    let mut y = DVector::zeros(n);
    y.rows_mut(0, m).copy_from(x0);
    y.rows_mut(m, m).copy_from(v0);
    let mut t = 0.0;
    let mut fy = rhs.eval(t, &y);
    let mut h = (1e-3 * eps).min(sample_dt).min(t_end);
    let mut out = Trajectory::default();
    let mut next_sample = 0usize;
    let push = |out: &mut Trajectory, t: f64, yy: &DVector<f64>| {
        out.t.push(t);
        out.x.push(yy.rows(0, m).into_owned());
        out.v.push(yy.rows(m, m).into_owned());
    };
    push(&mut out, 0.0, &y);
    next_sample += 1;

    while t < t_end {
        h = h.min(t_end - t);
        if h < 1e-12 * t.max(1.0) {
            return Err(Error::StepFailure { t, h });
        }
        let jac = rhs.jacobian(t, &y);
        let lu = (DMatrix::identity(n, n) - jac * (c * h)).lu();

        let tg = t + GAMMA * h;
        let stage1 = implicit_stage(&rhs, &lu, tg, c * h, &(&y + &fy * (c * h)), &y + &fy * (GAMMA * h), step_tol);
        let Some((z, fz)) = stage1 else {
            out.rejected += 1;
            h *= 0.25;
            continue;
        };
        let t1 = t + h;
        let guess = &z + &fz * ((1.0 - GAMMA) * h);
        let stage2 = implicit_stage(&rhs, &lu, t1, c * h, &(&z * a_z - &y * a_y), guess, step_tol);
        let Some((y1, f1)) = stage2 else {
            out.rejected += 1;
            h *= 0.25;
            continue;
        };

        let est = (&fy / GAMMA - &fz / (GAMMA * (1.0 - GAMMA)) + &f1 / (1.0 - GAMMA)) * (2.0 * err_k * h);
        let err = lu.solve(&est).unwrap_or(est);
        let scale = y.zip_map(&y1, |a, b| a.abs().max(b.abs()));
        let errn = scaled_norm(&err, &scale, step_tol);
        let factor = if errn > 0.0 { (0.9 * errn.powf(-1.0 / 3.0)).clamp(0.2, 5.0) } else { 5.0 };
        if errn > 1.0 {
            out.rejected += 1;
            h *= factor.min(0.9);
            continue;
        }

        loop {
            let ts = next_sample as f64 * sample_dt;
            if ts > t1 * (1.0 + 1e-14) || ts > t_end * (1.0 + 1e-14) {
                break;
            }
            let ys = hermite(t, h, &y, &fy, &y1, &f1, ts);
            push(&mut out, ts, &ys);
            next_sample += 1;
        }
        out.steps += 1;
        t = t1;
        y = y1;
        fy = f1;
        h *= factor;
    }
    Ok(out)
}

/// `max ‖x(t) − (c + ζ + u(ωt))‖` over samples with `t ≥ transient_fraction · t_end`.
pub fn attractor_compare(
    traj: &Trajectory,
    u: &FourierMap,
    zeta: &DVector<f64>,
    c: &DVector<f64>,
    omega: &[f64],
    transient_fraction: f64,
) -> Result<f64> {
    let mut dev = 0.0_f64;
    for i in traj.retained(transient_fraction) {
        let psi: Vec<f64> = omega.iter().map(|w| w * traj.t[i]).collect();
        let pred = evaluate(u, zeta, c, &psi)?;
        dev = dev.max((&traj.x[i] - pred).norm());
    }
    Ok(dev)
}

/// `(ε/2) ẋ·Mẋ + ε V(x, ωt)`.
pub fn energy(spec: &SystemSpec, force: &ForceField, eps: f64, t: f64, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let psi: Vec<f64> = spec.omega.iter().map(|w| w * t).collect();
    0.5 * eps * v.dot(&(&spec.mass * v)) + eps * force.potential(x.as_slice(), &psi)
}

/// `|N⁻¹ Σ_j s_j e^{−i f t_j}|`, the single-frequency DFT amplitude.
pub fn dft_amplitude(t: &[f64], s: &[f64], freq: f64) -> f64 {
    let (re, im) = t.iter().zip(s).fold((0.0, 0.0), |(re, im), (tj, sj)| {
        let (sn, cs) = (freq * tj).sin_cos();
        (re + sj * cs, im - sj * sn)
    });
    (re * re + im * im).sqrt() / t.len() as f64
}
