//! Command-line front end: configuration, pipelines and artifacts.

mod config;
mod notation;
mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;

pub use config::{
    parse_config, BoundsConfig, FamilyEntry, KindConfig, ModeVector, OracleConfig, PolyInput, PotentialInput, RunConfig,
    SolveConfig, SweepConfig, SystemConfig, Term, VerifyConfig,
};
pub use notation::parse_notation;
pub use output::{fmt_f64, to_json, write_csv, write_json};

use crate::bifurcation::{solve_zeta, sweep_epsilon, BifurcationSolution};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fourier::FourierMap;
use crate::mode::Mode;
use crate::model::Problem;
use crate::propagator::{small_divisor_scan, spectral_data, SmallDivisorReport};
use crate::series::{compute_orders, picard_solve, SeriesParams};
use crate::trees::{check_counting, enumerate_topologies, family_of, oracle_coefficient, Family};
use crate::verify::{
    attractor_compare, decay_report, diagnostic_constants, integrate_reference, ode_residual, transient_time, DecayReport,
    DiagnosticConstants, ResidualSummary, Trajectory,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Solve for ζ(ε) and the Fourier coefficients; writes solution.json.
    Solve,
    /// Solve, then check residual, attractor and decay; writes report.json.
    Verify,
    /// Compare the tree expansion with the recursion; writes oracle.json.
    Oracle,
    /// Continuation in ε; writes sweep.csv.
    Sweep,
    /// Small-divisor scan and analytic constants; writes bounds.json.
    Bounds,
    /// Reference time integration; writes trajectory.csv and integrate.json.
    Integrate,
}

#[derive(Debug, Parser)]
#[command(name = "responsum", version, about = "Quasi-periodic response solutions of strongly dissipative forced systems")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long)]
    pub ntrunc: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated mode, e.g. `1,-2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nu: Option<Vec<i32>>,
    #[arg(long = "N")]
    pub n: Option<usize>,
}

impl Args {
    /// Applies the command-line overrides to `cfg`.
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if let Some(e) = self.epsilon {
            cfg.solve.epsilon = e;
        }
        if let Some(k) = self.kmax {
            cfg.solve.k_max = k;
        }
        if let Some(n) = self.ntrunc {
            cfg.solve.n_trunc = Some(n);
        }
        if let Some(k) = self.k {
            cfg.oracle.k = k;
        }
        if let Some(nu) = &self.nu {
            cfg.oracle.nu = Some(nu.clone());
        }
        if let Some(n) = self.n {
            cfg.bounds.n = n;
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NON_CONVERGENCE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Maps an error to the process exit status.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::EpsilonTooLarge { .. } => EXIT_NON_CONVERGENCE,
        Error::Validation(_)
        | Error::Parse(_)
        | Error::HypothesisViolation(_)
        | Error::DegenerateMinimum { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::OrderTooLarge { .. } => EXIT_VALIDATION,
        _ => EXIT_FAILURE,
    }
}

/// Parses, overrides, validates and runs; returns the exit status.
pub fn main_with(args: &Args) -> i32 {
    let outcome = parse_config(&args.config).and_then(|mut cfg| {
        args.apply(&mut cfg);
        cfg.validate()?;
        run(args.command, &cfg)
    });
    match outcome {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for f in &out.artifacts {
                println!("{}", f.display());
            }
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub status: i32,
}

/// Runs `command` on a validated configuration.
pub fn run(command: Command, cfg: &RunConfig) -> Result<RunOutcome> {
    let (problem, warnings) = cfg.system.to_problem()?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut status = EXIT_OK;
    let artifacts = match command {
        Command::Solve => {
            let path = dir.join("solution.json");
            write_json(&path, &solution_report(cfg, &problem)?)?;
            vec![path]
        }
        Command::Verify => {
            let path = dir.join("report.json");
            write_json(&path, &verify_report(cfg, &problem)?)?;
            vec![path]
        }
        Command::Oracle => {
            let path = dir.join("oracle.json");
            write_json(&path, &oracle_report(cfg, &problem)?)?;
            vec![path]
        }
        Command::Sweep => {
            let path = dir.join("sweep.csv");
            if !write_sweep(&path, cfg, &problem)? {
                status = EXIT_NON_CONVERGENCE;
            }
            vec![path]
        }
        Command::Bounds => {
            let path = dir.join("bounds.json");
            write_json(&path, &bounds_report(cfg, &problem)?)?;
            vec![path]
        }
        Command::Integrate => integrate(cfg, &problem, dir)?,
    };
    Ok(RunOutcome { artifacts, warnings, status })
}

fn series_params(cfg: &RunConfig) -> SeriesParams {
    SeriesParams::new(cfg.solve.k_max).with_n_trunc(cfg.solve.n_trunc)
}

fn solve(cfg: &RunConfig, problem: &Problem) -> Result<BifurcationSolution> {
    let s = &cfg.solve;
    solve_zeta(s.epsilon, problem, &series_params(cfg), &DVector::zeros(problem.m()), s.tol_newton, s.max_iter)
}

#[derive(Debug, Serialize)]
pub struct CoefficientEntry {
    pub nu: Mode,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

fn coefficients(u: &FourierMap) -> Vec<CoefficientEntry> {
    u.iter()
        .map(|(nu, v)| CoefficientEntry { nu: nu.clone(), re: v.iter().map(|c| c.re).collect(), im: v.iter().map(|c| c.im).collect() })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct PicardCheck {
    pub iterations: usize,
    pub sup_diff: f64,
}

#[derive(Debug, Serialize)]
pub struct SolutionReport {
    pub epsilon: f64,
    pub k_max: usize,
    pub n_trunc: usize,
    pub center: Vec<f64>,
    pub zeta: Vec<f64>,
    #[serde(rename = "H_residual")]
    pub h_residual: f64,
    pub newton_iters: usize,
    pub u_sup_norm: f64,
    pub order_norms: Vec<f64>,
    pub ratio: Option<f64>,
    pub flags: Vec<String>,
    pub residual: ResidualSummary,
    /// Fixed-point cross-check; absent when the iteration does not converge.
    pub picard: Option<PicardCheck>,
    pub modes: Vec<CoefficientEntry>,
}

pub fn solution_report(cfg: &RunConfig, problem: &Problem) -> Result<SolutionReport> {
    let eps = cfg.solve.epsilon;
    let exec = Exec::default();
    let sol = solve(cfg, problem)?;
    let residual = ode_residual(&sol.u, &sol.zeta, eps, problem, exec).summary();
    let picard = picard_solve(eps, problem, &sol.zeta, cfg.solve.tol_picard, 1000, sol.series.n_trunc, exec)
        .ok()
        .map(|p| PicardCheck { iterations: p.iterations, sup_diff: p.u.max_abs_diff(&sol.u) });
    Ok(SolutionReport {
        epsilon: eps,
        k_max: sol.series.k_max,
        n_trunc: sol.series.n_trunc,
        center: problem.center.iter().copied().collect(),
        zeta: sol.record.zeta.clone(),
        h_residual: sol.record.h_residual,
        newton_iters: sol.record.newton_iters,
        u_sup_norm: sol.record.u_sup_norm,
        order_norms: sol.diagnostics.per_order_norms.clone(),
        ratio: sol.diagnostics.ratio,
        flags: sol.diagnostics.flags.clone(),
        residual,
        picard,
        modes: coefficients(&sol.u),
    })
}

#[derive(Debug, Serialize)]
pub struct IntegratorSummary {
    pub t_end: f64,
    pub steps: usize,
    pub rejected: usize,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub epsilon: f64,
    pub zeta: Vec<f64>,
    #[serde(rename = "H_residual")]
    pub h_residual: f64,
    pub residual: ResidualSummary,
    pub attractor_deviation: f64,
    /// Absent when fewer than two orders are nonzero.
    pub decay: Option<DecayReport>,
    pub integrator: IntegratorSummary,
}

fn default_t_end(cfg: &RunConfig, problem: &Problem) -> Result<f64> {
    match cfg.verify.t_end {
        Some(t) => Ok(t),
        None => {
            let sd = spectral_data(&problem.spec.damping, &problem.a, &problem.spec.mass)?;
            Ok(transient_time(cfg.solve.epsilon, *sd.kappa.last().expect("m >= 1"), sd.b[0]))
        }
    }
}

fn default_xi(cfg: &RunConfig, problem: &Problem) -> f64 {
    cfg.bounds.xi.unwrap_or_else(|| std::f64::consts::LN_10 / problem.spec.forcing_radius().max(1) as f64)
}

fn reference_run(cfg: &RunConfig, problem: &Problem) -> Result<Trajectory> {
    let v = &cfg.verify;
    let t_end = default_t_end(cfg, problem)?;
    let zero = DVector::zeros(problem.m());
    integrate_reference(cfg.solve.epsilon, &problem.spec, &problem.center, &zero, t_end, v.step_tol, v.sample_dt)
}

pub fn verify_report(cfg: &RunConfig, problem: &Problem) -> Result<VerifyReport> {
    let eps = cfg.solve.epsilon;
    let sol = solve(cfg, problem)?;
    let residual = ode_residual(&sol.u, &sol.zeta, eps, problem, Exec::default()).summary();
    let traj = reference_run(cfg, problem)?;
    let deviation =
        attractor_compare(&traj, &sol.u, &sol.zeta, &problem.center, &problem.spec.omega, cfg.verify.transient_fraction)?;
    let decay = match decay_report(&sol.series, problem, cfg.bounds.rho, default_xi(cfg, problem)) {
        Ok(r) => Some(r),
        Err(Error::InsufficientData(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(VerifyReport {
        epsilon: eps,
        zeta: sol.record.zeta,
        h_residual: sol.record.h_residual,
        residual,
        attractor_deviation: deviation,
        decay,
        integrator: IntegratorSummary { t_end: traj.t_end(), steps: traj.steps, rejected: traj.rejected },
    })
}

#[derive(Debug, Serialize)]
pub struct ComplexVector {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&DVector<crate::C64>> for ComplexVector {
    fn from(v: &DVector<crate::C64>) -> Self {
        Self { re: v.iter().map(|c| c.re).collect(), im: v.iter().map(|c| c.im).collect() }
    }
}

#[derive(Debug, Serialize)]
pub struct CountingSummary {
    pub family: Family,
    pub topologies: usize,
    pub holding: usize,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub k: usize,
    pub nu: Mode,
    pub epsilon: f64,
    pub oracle_value: ComplexVector,
    pub recursion_value: ComplexVector,
    pub abs_diff: f64,
    pub tree_count: usize,
    pub counting_checks: CountingSummary,
}

pub fn oracle_report(cfg: &RunConfig, problem: &Problem) -> Result<OracleReport> {
    let (m, d) = (problem.m(), problem.d());
    let k = cfg.oracle.k;
    let eps = cfg.solve.epsilon;
    let nu = cfg.oracle.nu.as_deref().map(Mode::from_slice).unwrap_or_else(|| Mode::unit(d, 0));
    let zeta = cfg.oracle.zeta.as_ref().map(|z| DVector::from_column_slice(z)).unwrap_or_else(|| DVector::zeros(m));
    let exec = Exec::default();
    let oracle = oracle_coefficient(k, &nu, eps, &zeta, problem, exec)?;
    let params = SeriesParams::new(k).with_exec(exec);
    let recursion = compute_orders(eps, problem, &zeta, &params)?.order(k).at(&nu);
    let family = family_of(problem);
    let topologies = enumerate_topologies(k, family)?;
    let holding = topologies.iter().filter(|t| check_counting(t, family).holds).count();
    Ok(OracleReport {
        k,
        nu,
        epsilon: eps,
        abs_diff: (&oracle.value - &recursion).camax(),
        oracle_value: (&oracle.value).into(),
        recursion_value: (&recursion).into(),
        tree_count: oracle.tree_count,
        counting_checks: CountingSummary { family, topologies: topologies.len(), holding },
    })
}

/// Writes the sweep table; returns whether every entry converged.
fn write_sweep(path: &Path, cfg: &RunConfig, problem: &Problem) -> Result<bool> {
    let list = &cfg.sweep.epsilon_list;
    if list.is_empty() {
        return Err(Error::validation("sweep.epsilon_list is empty"));
    }
    let m = problem.m();
    let entries = sweep_epsilon(list, problem, &series_params(cfg), cfg.solve.tol_newton, cfg.solve.max_iter);
    let mut header = vec!["epsilon".to_string()];
    header.extend((1..=m).map(|i| format!("zeta_{i}")));
    header.extend(["H_residual", "u_sup_norm", "newton_iters", "status"].map(String::from));
    let mut all_ok = true;
    let rows = entries
        .iter()
        .map(|e| {
            let mut row = vec![fmt_f64(e.epsilon)];
            match &e.outcome {
                Ok(r) => {
                    row.extend(r.zeta.iter().map(|z| fmt_f64(*z)));
                    row.extend([fmt_f64(r.h_residual), fmt_f64(r.u_sup_norm), r.newton_iters.to_string(), "ok".into()]);
                }
                Err(err) => {
                    all_ok = false;
                    row.extend((0..m + 2).map(|_| "NaN".to_string()));
                    row.extend([String::new(), err.to_string()]);
                }
            }
            row
        })
        .collect::<Vec<_>>();
    write_csv(path, &header, &rows)?;
    Ok(all_ok)
}

#[derive(Debug, Serialize)]
pub struct BoundsReport {
    pub small_divisors: SmallDivisorReport,
    pub alpha: f64,
    pub eps1: f64,
    pub kappa: Vec<f64>,
    pub b: Vec<f64>,
    pub constants: DiagnosticConstants,
}

pub fn bounds_report(cfg: &RunConfig, problem: &Problem) -> Result<BoundsReport> {
    let sd = spectral_data(&problem.spec.damping, &problem.a, &problem.spec.mass)?;
    let xi = default_xi(cfg, problem);
    let n = cfg.bounds.n;
    Ok(BoundsReport {
        small_divisors: small_divisor_scan(&problem.spec.omega, n, xi, sd.alpha),
        alpha: sd.alpha,
        eps1: sd.eps1(),
        constants: diagnostic_constants(problem, cfg.bounds.rho, xi, n, cfg.solve.epsilon)?,
        kappa: sd.kappa,
        b: sd.b,
    })
}

#[derive(Debug, Serialize)]
struct IntegrateReport {
    epsilon: f64,
    samples: usize,
    #[serde(flatten)]
    integrator: IntegratorSummary,
}

fn integrate(cfg: &RunConfig, problem: &Problem, dir: &Path) -> Result<Vec<PathBuf>> {
    let traj = reference_run(cfg, problem)?;
    let m = problem.m();
    let mut header = vec!["t".to_string()];
    header.extend((1..=m).map(|i| format!("x_{i}")));
    header.extend((1..=m).map(|i| format!("v_{i}")));
    let rows: Vec<Vec<String>> = (0..traj.t.len())
        .map(|i| std::iter::once(traj.t[i]).chain(traj.x[i].iter().copied()).chain(traj.v[i].iter().copied()).map(fmt_f64).collect())
        .collect();
    let csv_path = dir.join("trajectory.csv");
    write_csv(&csv_path, &header, &rows)?;
    let json_path = dir.join("integrate.json");
    let report = IntegrateReport {
        epsilon: cfg.solve.epsilon,
        samples: traj.t.len(),
        integrator: IntegratorSummary { t_end: traj.t_end(), steps: traj.steps, rejected: traj.rejected },
    };
    write_json(&json_path, &report)?;
    Ok(vec![csv_path, json_path])
}
