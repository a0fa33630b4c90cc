use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::polynomial::gradient;
use super::system::{SystemKind, SystemSpec};
use super::trig::ComplexPoly;
use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, sym_eigenvalues};
use crate::mode::Mode;
use crate::C64;

/// Rank-(p+1) tensor `T[i, i₁, …, i_p]`, symmetric in the trailing p indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    m: usize,
    p: usize,
    data: Vec<C64>,
}

impl SymTensor {
    pub fn zeros(m: usize, p: usize) -> Self {
        Self { m, p, data: vec![C64::new(0.0, 0.0); m.pow(p as u32 + 1)] }
    }

    /// Number of trailing (contracted) indices.
    pub fn order(&self) -> usize {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn flat(&self, i: usize, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.p);
        idx.iter().fold(i, |acc, &j| acc * self.m + j)
    }

    pub fn get(&self, i: usize, idx: &[usize]) -> C64 {
        self.data[self.flat(i, idx)]
    }

    fn set(&mut self, i: usize, idx: &[usize], v: C64) {
        let k = self.flat(i, idx);
        self.data[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.norm() == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Contracts the trailing indices with one vector each:
    /// `out_i = Σ T[i, i₁..i_p] v₁[i₁] ⋯ v_p[i_p]`.
    pub fn contract(&self, vecs: &[&DVector<C64>]) -> DVector<C64> {
        assert_eq!(vecs.len(), self.p);
        let stride = self.m.pow(self.p as u32);
        let mut idx = vec![0usize; self.p];
        let mut out = DVector::zeros(self.m);
        for i in 0..self.m {
            idx.iter_mut().for_each(|x| *x = 0);
            for t in 0..stride {
                let w = self.data[i * stride + t];
                if w.norm() != 0.0 {
                    let prod: C64 = idx.iter().zip(vecs).map(|(&j, v)| v[j]).product();
                    out[i] += w * prod;
                }
                advance(&mut idx, self.m);
            }
        }
        out
    }

    /// The `p = 1` tensor as an m×m matrix.
    pub fn as_matrix(&self) -> DMatrix<C64> {
        assert_eq!(self.p, 1);
        DMatrix::from_fn(self.m, self.m, |i, j| self.get(i, &[j]))
    }
}

/// Odometer increment over `{0..m}^len` (last index fastest).
fn advance(idx: &mut [usize], m: usize) {
    for pos in (0..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < m {
            return;
        }
        idx[pos] = 0;
    }
}

/// Taylor tensors of the nonlinearity at the expansion point.
///
/// For the autonomous kind only mode 0 is populated and holds `G_p(c)`; for the
/// forced kind every Fourier mode of `h` holds `H_{p,ν}(c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorTensors {
    pub center: DVector<f64>,
    pub m: usize,
    pub p_max: usize,
    by_mode: BTreeMap<Mode, Vec<SymTensor>>,
}

impl TaylorTensors {
    pub fn modes(&self) -> impl Iterator<Item = (&Mode, &Vec<SymTensor>)> {
        self.by_mode.iter()
    }

    pub fn tensor(&self, nu: &Mode, p: usize) -> Option<&SymTensor> {
        self.by_mode.get(nu).and_then(|v| v.get(p))
    }

    /// `A = G₁(c)` (or `H_{1,0}(c)`).
    pub fn a(&self) -> DMatrix<f64> {
        let d = self.by_mode.keys().next().map(Mode::dim).unwrap_or(1);
        match self.tensor(&Mode::zero(d), 1) {
            Some(t) => t.as_matrix().map(|c| c.re),
            None => DMatrix::zeros(self.m, self.m),
        }
    }

    /// `Σ_p T_p(c)(x − c)^p` for one mode.
    pub fn reconstruct(&self, nu: &Mode, x: &[f64]) -> DVector<C64> {
        let dx = DVector::from_iterator(self.m, x.iter().zip(self.center.iter()).map(|(a, b)| C64::new(a - b, 0.0)));
        let mut out = DVector::zeros(self.m);
        if let Some(ts) = self.by_mode.get(nu) {
            for t in ts {
                let refs: Vec<&DVector<C64>> = (0..t.order()).map(|_| &dx).collect();
                out += t.contract(&refs);
            }
        }
        out
    }
}

/// Extracts the exact Taylor tensors at `c` and checks that `A` is symmetric
/// positive definite.
pub fn taylor_tensors(spec: &SystemSpec, c: &DVector<f64>) -> Result<TaylorTensors> {
    let m = spec.m;
    let fields: Vec<(Mode, Vec<ComplexPoly>)> = match &spec.kind {
        SystemKind::GradientAutonomous { potential, .. } => {
            vec![(Mode::zero(spec.d), gradient(potential).into_iter().map(ComplexPoly::real).collect())]
        }
        SystemKind::GradientForced { potential } => potential.gradient_modes(),
    };
    let p_max = fields
        .iter()
        .flat_map(|(_, g)| g.iter().map(|q| q.degree() as usize))
        .max()
        .unwrap_or(0);
    let mut by_mode = BTreeMap::new();
    for (nu, field) in fields {
        let ts = (0..=p_max).map(|p| tensor_of(&field, c.as_slice(), p)).collect();
        by_mode.insert(nu, ts);
    }
    by_mode.entry(Mode::zero(spec.d)).or_insert_with(|| (0..=p_max).map(|p| SymTensor::zeros(m, p)).collect());
    let tt = TaylorTensors { center: c.clone(), m, p_max, by_mode };
    check_hypothesis(&tt.a())?;
    Ok(tt)
}

fn check_hypothesis(a: &DMatrix<f64>) -> Result<()> {
    if !is_symmetric(a, 1e-12) {
        return Err(Error::HypothesisViolation("A is not symmetric".into()));
    }
    let eig = sym_eigenvalues(a);
    if eig[0] <= 0.0 {
        return Err(Error::HypothesisViolation(format!(
            "A is not positive definite (smallest eigenvalue {:e})",
            eig[0]
        )));
    }
    Ok(())
}

/// `[T_p]_{i,i₁..i_p} = (1/p!) ∂^p q_i / ∂x_{i₁}⋯∂x_{i_p} (c)`.
fn tensor_of(field: &[ComplexPoly], c: &[f64], p: usize) -> SymTensor {
    let m = field.len();
    let mut t = SymTensor::zeros(m, p);
    let fact: f64 = (1..=p).map(|k| k as f64).product();
    let mut cache: BTreeMap<Vec<usize>, Vec<C64>> = BTreeMap::new();
    let mut idx = vec![0usize; p];
    for _ in 0..m.pow(p as u32) {
        let mut key = idx.clone();
        key.sort_unstable();
        let vals = cache.entry(key.clone()).or_insert_with(|| {
            field
                .iter()
                .map(|q| {
                    let d = key.iter().fold(q.clone(), |acc, &j| acc.derivative(j));
                    d.eval(c) / fact
                })
                .collect()
        });
        for (i, v) in vals.iter().enumerate() {
            t.set(i, &idx, *v);
        }
        advance(&mut idx, m);
    }
    t
}
