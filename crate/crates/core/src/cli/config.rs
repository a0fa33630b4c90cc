//! Run configuration: JSON schema, defaults, validation and conversion to a
//! [`SystemSpec`].

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::notation::parse_notation;
use crate::error::{Error, Result};
use crate::mode::Mode;
use crate::model::{ComplexPoly, Polynomial, Problem, SystemKind, SystemSpec, TrigPolynomialFamily, TrigVectorField};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindConfig {
    /// `εMẍ + Γẋ + ε∇V(x) = εf(ωt)`.
    #[default]
    Autonomous,
    /// `εMẍ + Γẋ + ε∇ₓṼ(x, ωt) = 0`.
    Forced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exp: Vec<u32>,
    pub coeff: f64,
}

/// A real polynomial, as notation or as an explicit term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyInput {
    Notation(String),
    Terms(Vec<Term>),
}

/// One Fourier coefficient `Ṽ_ν(x) = re(x) + i·im(x)` of a phase-dependent potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyEntry {
    pub nu: Vec<i32>,
    pub re: PolyInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<PolyInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialInput {
    Poly(PolyInput),
    Family(Vec<FamilyEntry>),
}

/// Forcing coefficient `f_ν = re + i·im`; `f_{−ν}` is completed by conjugation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeVector {
    pub nu: Vec<i32>,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub m: usize,
    pub d: usize,
    pub omega: Vec<f64>,
    /// Defaults to the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<Vec<Vec<f64>>>,
    pub damping: Vec<Vec<f64>>,
    #[serde(default)]
    pub kind: KindConfig,
    pub potential: PotentialInput,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forcing: Vec<ModeVector>,
    /// Equilibrium `c`; located by Newton from `guess` (or 0) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guess: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub epsilon: f64,
    #[serde(alias = "K_max")]
    pub k_max: usize,
    /// Defaults to `k_max` times the forcing radius.
    #[serde(default, alias = "N_trunc", skip_serializing_if = "Option::is_none")]
    pub n_trunc: Option<usize>,
    pub tol_newton: f64,
    pub tol_picard: f64,
    pub max_iter: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { epsilon: 0.01, k_max: 8, n_trunc: None, tol_newton: 1e-10, tol_picard: 1e-12, max_iter: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Defaults to the transient heuristic `20 κ_m² / (ε b₁)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    pub step_tol: f64,
    pub transient_fraction: f64,
    pub sample_dt: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { t_end: None, step_tol: 1e-8, transient_fraction: 0.75, sample_dt: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub k: usize,
    /// Defaults to `e₁`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<i32>>,
    /// Defaults to 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Vec<f64>>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { k: 1, nu: None, zeta: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub epsilon_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsConfig {
    #[serde(rename = "N")]
    pub n: usize,
    /// Defaults to `ln 10 / (largest forcing mode)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    pub rho: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { n: 4, xi: None, rho: 1.0 }
    }
}

fn matrix(rows: &[Vec<f64>], m: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(Error::validation(format!("{name} matrix must be {m}x{m}")));
    }
    Ok(DMatrix::from_fn(m, m, |i, j| rows[i][j]))
}

fn mode(nu: &[i32], d: usize, what: &str) -> Result<Mode> {
    if nu.len() != d {
        return Err(Error::validation(format!("{what} mode {nu:?} must have {d} components")));
    }
    Ok(Mode::from_slice(nu))
}

fn vector(v: &[f64], m: usize, what: &str) -> Result<DVector<f64>> {
    if v.len() != m {
        return Err(Error::validation(format!("{what} must have {m} components")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::validation(format!("{what} has non-finite entries")));
    }
    Ok(DVector::from_column_slice(v))
}

impl PolyInput {
    pub fn to_polynomial(&self, m: usize) -> Result<Polynomial> {
        match self {
            PolyInput::Notation(s) => parse_notation(s, m),
            PolyInput::Terms(ts) => Polynomial::from_terms(m, ts.iter().map(|t| (t.exp.clone(), t.coeff))),
        }
    }
}

impl SystemConfig {
    /// Builds the validated system; also returns Hermitian-completion warnings.
    pub fn to_spec(&self) -> Result<(SystemSpec, Vec<String>)> {
        let (m, d) = (self.m, self.d);
        if m == 0 || d == 0 {
            return Err(Error::validation("m and d must be at least 1"));
        }
        if self.omega.len() != d {
            return Err(Error::validation(format!("omega must have d = {d} components")));
        }
        let mass = match &self.mass {
            Some(rows) => matrix(rows, m, "mass")?,
            None => DMatrix::identity(m, m),
        };
        let damping = matrix(&self.damping, m, "damping")?;
        let (kind, warnings) = match (self.kind, &self.potential) {
            (KindConfig::Autonomous, PotentialInput::Poly(p)) => {
                let potential = p.to_polynomial(m)?;
                let half = self
                    .forcing
                    .iter()
                    .map(|f| {
                        let nu = mode(&f.nu, d, "forcing")?;
                        let re = vector(&f.re, m, "forcing re")?;
                        let im = match &f.im {
                            Some(im) => vector(im, m, "forcing im")?,
                            None => DVector::zeros(m),
                        };
                        Ok((nu, re.zip_map(&im, C64::new)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (forcing, w) = TrigVectorField::from_half(m, d, half)?;
                (SystemKind::GradientAutonomous { potential, forcing }, w)
            }
            (KindConfig::Forced, PotentialInput::Family(entries)) => {
                if !self.forcing.is_empty() {
                    return Err(Error::validation("forced kind takes no separate forcing; put it in the potential"));
                }
                let half = entries
                    .iter()
                    .map(|e| {
                        let nu = mode(&e.nu, d, "potential")?;
                        let re = e.re.to_polynomial(m)?;
                        let im = match &e.im {
                            Some(im) => im.to_polynomial(m)?,
                            None => Polynomial::zero(m),
                        };
                        Ok((nu, ComplexPoly { re, im }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (family, w) = TrigPolynomialFamily::from_half(m, d, half)?;
                (SystemKind::GradientForced { potential: family }, w)
            }
            (KindConfig::Autonomous, PotentialInput::Family(_)) => {
                return Err(Error::validation("autonomous kind needs a single polynomial potential"))
            }
            (KindConfig::Forced, PotentialInput::Poly(_)) => {
                return Err(Error::validation("forced kind needs a list of potential modes"))
            }
        };
        Ok((SystemSpec::new(self.omega.clone(), mass, damping, kind)?, warnings))
    }

    /// Spec plus equilibrium and Taylor data.
    pub fn to_problem(&self) -> Result<(Problem, Vec<String>)> {
        let (spec, warnings) = self.to_spec()?;
        let problem = match (&self.center, &self.guess) {
            (Some(c), _) => Problem::with_center(spec, vector(c, self.m, "center")?)?,
            (None, Some(g)) => Problem::with_guess(spec, &vector(g, self.m, "guess")?)?,
            (None, None) => Problem::new(spec)?,
        };
        Ok((problem, warnings))
    }
}

impl RunConfig {
    /// Checks every scalar invariant and that the system builds.
    pub fn validate(&self) -> Result<()> {
        let s = &self.solve;
        let positive = |x: f64, name: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(format!("{name} must be positive (got {x})")))
            }
        };
        positive(s.epsilon, "solve.epsilon")?;
        positive(s.tol_newton, "solve.tol_newton")?;
        positive(s.tol_picard, "solve.tol_picard")?;
        if s.k_max < 1 {
            return Err(Error::validation("solve.k_max must be at least 1"));
        }
        if s.max_iter < 1 {
            return Err(Error::validation("solve.max_iter must be at least 1"));
        }
        if s.n_trunc == Some(0) {
            return Err(Error::validation("solve.n_trunc must be at least 1"));
        }
        let v = &self.verify;
        positive(v.step_tol, "verify.step_tol")?;
        positive(v.sample_dt, "verify.sample_dt")?;
        if let Some(t) = v.t_end {
            positive(t, "verify.t_end")?;
        }
        if !(0.0..1.0).contains(&v.transient_fraction) {
            return Err(Error::validation("verify.transient_fraction must lie in [0, 1)"));
        }
        if self.oracle.k < 1 {
            return Err(Error::validation("oracle.k must be at least 1"));
        }
        if let Some(nu) = &self.oracle.nu {
            mode(nu, self.system.d, "oracle")?;
        }
        if let Some(z) = &self.oracle.zeta {
            vector(z, self.system.m, "oracle.zeta")?;
        }
        for &e in &self.sweep.epsilon_list {
            positive(e, "sweep.epsilon_list entry")?;
        }
        positive(self.bounds.rho, "bounds.rho")?;
        if let Some(xi) = self.bounds.xi {
            positive(xi, "bounds.xi")?;
        }
        if self.bounds.n < 1 {
            return Err(Error::validation("bounds.N must be at least 1"));
        }
        self.system.to_spec().map(|_| ())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    RunConfig::from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = r#"{
        "system": {
            "m": 1, "d": 1, "omega": [1.0], "damping": [[1.0]],
            "potential": "0.5 x1^2",
            "forcing": [{"nu": [1], "re": [1.0], "im": [0.0]}]
        }
    }"#;

    #[test]
    fn minimal_linear_config() {
        let cfg = RunConfig::from_json(LINEAR).unwrap();
        assert_eq!(cfg.solve, SolveConfig::default());
        let (spec, warnings) = cfg.system.to_spec().unwrap();
        assert!(warnings.is_empty());
        assert_eq!(spec.mode_support().len(), 2);
    }

    #[test]
    fn asymmetric_damping_rejected() {
        let text = LINEAR.replace(r#""m": 1, "d": 1, "omega": [1.0], "damping": [[1.0]]"#, r#""m": 2, "d": 1, "omega": [1.0], "damping": [[1.0, 2.0], [0.0, 1.0]]"#)
            .replace("0.5 x1^2", "0.5 x1^2 + 0.5 x2^2")
            .replace(r#""re": [1.0], "im": [0.0]"#, r#""re": [1.0, 0.0]"#);
        match RunConfig::from_json(&text) {
            Err(Error::Validation(msg)) => assert!(msg.contains("damping not symmetric"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_epsilon_rejected() {
        let text = LINEAR.replace("\"system\"", "\"solve\": {\"epsilon\": -0.1, \"k_max\": 8, \"tol_newton\": 1e-10, \"tol_picard\": 1e-12, \"max_iter\": 10}, \"system\"");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match RunConfig::from_json("{\n \"system\": [}") {
            Err(Error::Parse(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inconsistent_conjugate_pair_warns() {
        let text = LINEAR.replace(r#"[{"nu": [1], "re": [1.0], "im": [0.0]}]"#, r#"[{"nu": [1], "re": [1.0]}, {"nu": [-1], "re": [2.0]}]"#);
        let (_, warnings) = RunConfig::from_json(&text).unwrap().system.to_spec().unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn forced_family_with_term_lists() {
        let text = r#"{
            "system": {
                "m": 2, "d": 2, "omega": [1.0, 1.4142135623730951],
                "mass": [[1, 0], [0, 2]], "damping": [[1, 0.2], [0.2, 1.5]],
                "kind": "forced",
                "potential": [
                    {"nu": [0, 0], "re": "0.5 x1^2 + 0.5 x2^2 + 0.25 x1^4"},
                    {"nu": [1, 0], "re": [{"exp": [1, 0], "coeff": 0.5}, {"exp": [2, 1], "coeff": 0.5}]},
                    {"nu": [0, 1], "re": "0.5 x2 + 0.5 x1 x2"}
                ]
            },
            "solve": {"epsilon": 0.001, "k_max": 6, "tol_newton": 1e-10, "tol_picard": 1e-12, "max_iter": 20}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        let (p, _) = cfg.system.to_problem().unwrap();
        let reference = Problem::new(crate::systems::forced_potential()).unwrap();
        assert!((&p.a - &reference.a).amax() < 1e-14);
        assert!((&p.center - &reference.center).amax() < 1e-14);
    }

    #[test]
    fn round_trip_is_identity() {
        let cfg = RunConfig::from_json(LINEAR).unwrap();
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}
