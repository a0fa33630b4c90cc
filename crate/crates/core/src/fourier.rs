//! Sparse Fourier maps and the convolution primitive shared by the solvers.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DVector;

use crate::exec::Exec;
use crate::mode::Mode;
use crate::C64;

/// Entries whose components are all below this magnitude are not stored.
pub const PRUNE_THRESHOLD: f64 = 1e-300;

/// Scalar-valued sparse Fourier series.
pub type ScalarMap = BTreeMap<Mode, C64>;

fn in_trunc(nu: &Mode, n_trunc: Option<usize>) -> bool {
    n_trunc.is_none_or(|n| nu.l1() <= n)
}

/// Sum of `a * b` over all pairs, restricted to `|ν|₁ ≤ n_trunc`.
///
/// Each output mode is accumulated independently, visiting the pairs in slice
/// order and the modes of the left factor in sorted order.
pub fn convolve_pairs(pairs: &[(&ScalarMap, &ScalarMap)], n_trunc: Option<usize>, exec: Exec) -> ScalarMap {
    let mut support = BTreeSet::new();
    for (a, b) in pairs {
        for p in a.keys() {
            for q in b.keys() {
                let nu = p + q;
                if in_trunc(&nu, n_trunc) {
                    support.insert(nu);
                }
            }
        }
    }
    let support: Vec<Mode> = support.into_iter().collect();
    let values = exec.map(&support, |nu| {
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in pairs {
            for (p, av) in a.iter() {
                if let Some(bv) = b.get(&(nu - p)) {
                    acc += av * bv;
                }
            }
        }
        acc
    });
    support
        .into_iter()
        .zip(values)
        .filter(|(_, v)| v.norm() >= PRUNE_THRESHOLD)
        .collect()
}

pub fn convolve(a: &ScalarMap, b: &ScalarMap, n_trunc: Option<usize>, exec: Exec) -> ScalarMap {
    convolve_pairs(&[(a, b)], n_trunc, exec)
}

/// Multiplies by `e^{i ν₀·ψ}`.
pub fn shift(a: &ScalarMap, by: &Mode) -> ScalarMap {
    a.iter().map(|(k, v)| (k + by, *v)).collect()
}

/// Sparse map from modes to complex m-vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMap {
    m: usize,
    d: usize,
    n_trunc: Option<usize>,
    entries: BTreeMap<Mode, DVector<C64>>,
}

impl FourierMap {
    pub fn new(m: usize, d: usize, n_trunc: Option<usize>) -> Self {
        Self { m, d, n_trunc, entries: BTreeMap::new() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_trunc(&self) -> Option<usize> {
        self.n_trunc
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stores `v` at `nu` unless the mode is truncated or the vector is
    /// negligible. Returns whether the entry was kept.
    pub fn insert(&mut self, nu: Mode, v: DVector<C64>) -> bool {
        debug_assert_eq!(v.len(), self.m);
        debug_assert_eq!(nu.dim(), self.d);
        if !in_trunc(&nu, self.n_trunc) || v.iter().all(|c| c.norm() < PRUNE_THRESHOLD) {
            self.entries.remove(&nu);
            return false;
        }
        self.entries.insert(nu, v);
        true
    }

    /// Adds `v` to the entry at `nu`.
    pub fn accumulate(&mut self, nu: &Mode, v: &DVector<C64>) {
        let sum = match self.entries.get(nu) {
            Some(cur) => cur + v,
            None => v.clone(),
        };
        self.insert(nu.clone(), sum);
    }

    pub fn get(&self, nu: &Mode) -> Option<&DVector<C64>> {
        self.entries.get(nu)
    }

    /// Entry at `nu`, or the zero vector.
    pub fn at(&self, nu: &Mode) -> DVector<C64> {
        self.entries.get(nu).cloned().unwrap_or_else(|| DVector::zeros(self.m))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &DVector<C64>)> {
        self.entries.iter()
    }

    pub fn modes(&self) -> impl Iterator<Item = &Mode> {
        self.entries.keys()
    }

    pub fn remove(&mut self, nu: &Mode) -> Option<DVector<C64>> {
        self.entries.remove(nu)
    }

    /// Copy without the zero mode.
    pub fn without_zero_mode(&self) -> Self {
        let mut out = self.clone();
        out.entries.retain(|k, _| !k.is_zero());
        out
    }

    pub fn with_truncation(&self, n_trunc: Option<usize>) -> Self {
        let mut out = Self::new(self.m, self.d, n_trunc);
        for (k, v) in &self.entries {
            out.insert(k.clone(), v.clone());
        }
        out
    }

    /// `max_ν |u_ν|` with the Euclidean norm on C^m; zero for an empty map.
    pub fn coeff_sup(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_ν max_i |a_ν,i − b_ν,i|` over the union of both supports.
    pub fn max_abs_diff(&self, other: &FourierMap) -> f64 {
        let keys: BTreeSet<&Mode> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|k| {
                let a = self.at(k);
                let b = other.at(k);
                (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `max_ν max_i |u_{−ν,i} − conj(u_ν,i)|`: zero for the coefficients of a real field.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|(k, v)| {
                let w = self.at(&-k);
                v.iter().zip(w.iter()).map(|(a, b)| (a.conj() - b).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `Σ_ν e^{iν·ψ} u_ν`.
    pub fn evaluate(&self, psi: &[f64]) -> DVector<C64> {
        let mut out = DVector::zeros(self.m);
        for (k, v) in &self.entries {
            let ph = C64::from_polar(1.0, k.phase(psi));
            out += v * ph;
        }
        out
    }

    /// Largest `|ν|₁` present.
    pub fn support_radius(&self) -> usize {
        self.entries.keys().map(Mode::l1).max().unwrap_or(0)
    }

    pub fn component(&self, j: usize) -> ScalarMap {
        self.entries
            .iter()
            .filter(|(_, v)| v[j].norm() >= PRUNE_THRESHOLD)
            .map(|(k, v)| (k.clone(), v[j]))
            .collect()
    }

    pub fn from_components(comps: &[ScalarMap], d: usize, n_trunc: Option<usize>) -> Self {
        let m = comps.len();
        let mut out = Self::new(m, d, n_trunc);
        let keys: BTreeSet<&Mode> = comps.iter().flat_map(|c| c.keys()).collect();
        for k in keys {
            let v = DVector::from_iterator(m, comps.iter().map(|c| c.get(k).copied().unwrap_or_default()));
            out.insert(k.clone(), v);
        }
        out
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = Self::new(self.m, self.d, self.n_trunc);
        for (k, v) in &self.entries {
            out.insert(k.clone(), v * s);
        }
        out
    }

    pub fn add(&self, other: &FourierMap) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.accumulate(k, v);
        }
        out
    }
}
