//! The graded composite `P(W)`: constant terms plus every nonlinear tensor
//! contraction of `W = ζ + u` that enters the recursion, evaluated either one
//! perturbative grade at a time or in one shot on a summed series.

use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::exec::Exec;
use crate::fourier::{convolve_pairs, FourierMap, ScalarMap};
use crate::mode::Mode;
use crate::model::{Problem, SystemKind};
use crate::C64;

/// One monomial contribution `coeff · e^{iν₀·ψ} Π_j W_j^{α_j}`.
#[derive(Debug, Clone)]
struct Term {
    shift: Mode,
    alpha: Vec<u32>,
    coeff: DVector<C64>,
}

/// Compiled nonlinearity around the expansion point.
///
/// Autonomous kind: `P(W) = (g(c) − f₀) − Σ_{ν≠0} f_ν e^{iν·ψ} + Σ_{p≥2} G_p W^p`.
/// Forced kind: `P(W) = Σ_ν h_ν(c) e^{iν·ψ} + Σ_{(p,ν₀)} H_{p,ν₀} W^p e^{iν₀·ψ}`
/// with `p ≥ 2` at `ν₀ = 0` and `p ≥ 1` otherwise. The `A W` term lives in `D`.
#[derive(Debug, Clone)]
pub struct Composite {
    m: usize,
    d: usize,
    constants: FourierMap,
    terms: Vec<Term>,
    max_degree: usize,
}

impl Composite {
    pub fn new(problem: &Problem) -> Self {
        let (m, d) = (problem.m(), problem.d());
        let zero = Mode::zero(d);
        let mut constants = FourierMap::new(m, d, None);
        match &problem.spec.kind {
            SystemKind::GradientAutonomous { forcing, .. } => {
                for (nu, f) in forcing.modes() {
                    if !nu.is_zero() {
                        constants.insert(nu.clone(), -f);
                    }
                }
            }
            SystemKind::GradientForced { .. } => {
                for (nu, ts) in problem.tensors.modes() {
                    if !nu.is_zero() {
                        constants.insert(nu.clone(), ts[0].contract(&[]));
                    }
                }
            }
        }
        constants.insert(zero, problem.offset.map(|x| C64::new(x, 0.0)));

        let mut terms = Vec::new();
        let mut max_degree = 0;
        for (nu0, ts) in problem.tensors.modes() {
            let p_min = if nu0.is_zero() { 2 } else { 1 };
            for (p, t) in ts.iter().enumerate().skip(p_min) {
                if t.is_zero() {
                    continue;
                }
                for alpha in exponents(m, p) {
                    let idx: Vec<usize> = alpha.iter().enumerate().flat_map(|(j, &a)| std::iter::repeat_n(j, a as usize)).collect();
                    let mult = multinomial(&alpha);
                    let coeff = DVector::from_fn(m, |i, _| t.get(i, &idx) * mult);
                    if coeff.iter().any(|c| c.norm() != 0.0) {
                        max_degree = max_degree.max(p);
                        terms.push(Term { shift: nu0.clone(), alpha, coeff });
                    }
                }
            }
        }
        Self { m, d, constants, terms, max_degree }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Grade-0 part: the forcing (or `h_ν(c)`) and the zero-mode offset.
    pub fn constants(&self) -> &FourierMap {
        &self.constants
    }

    /// Highest power of `W` that appears.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn assemble<'w>(&self, n_trunc: Option<usize>, mono: impl Fn(&[u32]) -> Option<&'w ScalarMap>) -> FourierMap {
        let mut out = FourierMap::new(self.m, self.d, n_trunc);
        let mut acc: BTreeMap<Mode, DVector<C64>> = BTreeMap::new();
        for t in &self.terms {
            let Some(w) = mono(&t.alpha) else { continue };
            for (nu, v) in w {
                let key = nu + &t.shift;
                let e = acc.entry(key).or_insert_with(|| DVector::zeros(self.m));
                *e += &t.coeff * *v;
            }
        }
        for (nu, v) in acc {
            out.insert(nu, v);
        }
        out
    }

    /// `P(W)` for a summed `W`, untruncated and exact.
    pub fn evaluate_full(&self, w: &FourierMap, exec: Exec) -> FourierMap {
        let comps: Vec<ScalarMap> = (0..self.m).map(|j| w.component(j)).collect();
        let mut cache: BTreeMap<Vec<u32>, ScalarMap> = BTreeMap::new();
        for p in 2..=self.max_degree {
            for alpha in exponents(self.m, p) {
                let (beta, j) = split(&alpha);
                let prev = if p == 2 { &comps[first_nonzero(&beta)] } else { &cache[&beta] };
                let prod = convolve_pairs(&[(prev, &comps[j])], None, exec);
                cache.insert(alpha, prod);
            }
        }
        let mut out = self.assemble(None, |alpha| {
            if alpha.iter().sum::<u32>() == 1 {
                Some(&comps[first_nonzero(alpha)])
            } else {
                cache.get(alpha)
            }
        });
        for (nu, v) in self.constants.iter() {
            out.accumulate(nu, v);
        }
        out
    }
}

/// Grade-by-grade evaluation of `P(W)` with `W = Σ_k μ^k U^(k)`.
///
/// The monomial cache holds `[W^α]_n` for `2 ≤ |α| ≤ max_degree`, extended as
/// each new grade of `W` is pushed:
/// `[W^α]_n = Σ_a [W^{α−e_j}]_{n−a} · [W_j]_a`.
#[derive(Debug, Clone)]
pub struct GradedEngine<'a> {
    comp: &'a Composite,
    n_trunc: Option<usize>,
    exec: Exec,
    /// `w[j][n]`, index 0 empty.
    w: Vec<Vec<ScalarMap>>,
    cache: BTreeMap<Vec<u32>, Vec<ScalarMap>>,
    grades: usize,
}

impl<'a> GradedEngine<'a> {
    pub fn new(comp: &'a Composite, n_trunc: Option<usize>, exec: Exec) -> Self {
        let w = vec![vec![ScalarMap::new()]; comp.m];
        let mut cache = BTreeMap::new();
        for p in 2..=comp.max_degree {
            for alpha in exponents(comp.m, p) {
                cache.insert(alpha, vec![ScalarMap::new()]);
            }
        }
        Self { comp, n_trunc, exec, w, cache, grades: 0 }
    }

    /// Number of grades of `W` pushed so far.
    pub fn grades(&self) -> usize {
        self.grades
    }

    fn mono(&self, alpha: &[u32], n: usize) -> Option<&ScalarMap> {
        if alpha.iter().sum::<u32>() == 1 {
            self.w[first_nonzero(alpha)].get(n)
        } else {
            self.cache.get(alpha).and_then(|v| v.get(n))
        }
    }

    /// Appends grade `n = grades + 1` of `W` and extends the cache.
    pub fn push_grade(&mut self, u: &FourierMap) {
        let n = self.grades + 1;
        for j in 0..self.comp.m {
            self.w[j].push(u.component(j));
        }
        let alphas: Vec<Vec<u32>> = self.cache.keys().cloned().collect();
        let mut fresh = Vec::with_capacity(alphas.len());
        for alpha in &alphas {
            let p = alpha.iter().sum::<u32>() as usize;
            let (beta, j) = split(alpha);
            let pairs: Vec<(&ScalarMap, &ScalarMap)> = if n < p {
                Vec::new()
            } else {
                (1..=n + 1 - p)
                    .filter_map(|a| Some((self.mono(&beta, n - a)?, &self.w[j][a])))
                    .collect()
            };
            fresh.push(convolve_pairs(&pairs, self.n_trunc, self.exec));
        }
        for (alpha, v) in alphas.into_iter().zip(fresh) {
            self.cache.get_mut(&alpha).expect("cached").push(v);
        }
        self.grades = n;
    }

    /// Grade-`n` coefficient of `P(W)`; grade 0 gives the constants.
    pub fn composite(&self, n: usize) -> FourierMap {
        assert!(n <= self.grades, "grade {n} not yet available");
        if n == 0 {
            return self.comp.constants.with_truncation(self.n_trunc);
        }
        self.comp.assemble(self.n_trunc, |alpha| self.mono(alpha, n))
    }
}

/// `α − e_j` and `j`, with `j` the last nonzero index.
fn split(alpha: &[u32]) -> (Vec<u32>, usize) {
    let j = alpha.iter().rposition(|&a| a > 0).expect("nonzero multi-index");
    let mut beta = alpha.to_vec();
    beta[j] -= 1;
    (beta, j)
}

fn first_nonzero(alpha: &[u32]) -> usize {
    alpha.iter().position(|&a| a > 0).expect("nonzero multi-index")
}

/// All exponent vectors in `m` variables with total degree `p`, lexicographic.
pub(crate) fn exponents(m: usize, p: usize) -> Vec<Vec<u32>> {
    fn rec(m: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == m - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a);
            rec(m, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, p as u32, &mut Vec::with_capacity(m), &mut out);
    out
}

/// `p! / Π α_j!`.
fn multinomial(alpha: &[u32]) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    fact(alpha.iter().sum()) / alpha.iter().map(|&a| fact(a)).product::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_enumeration() {
        assert_eq!(exponents(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(exponents(3, 3).len(), 10);
        assert_eq!(exponents(1, 4), vec![vec![4]]);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[1, 1]), 2.0);
        assert_eq!(multinomial(&[2, 1]), 3.0);
        assert_eq!(multinomial(&[1, 1, 1]), 6.0);
        assert_eq!(multinomial(&[3]), 1.0);
    }

    #[test]
    fn split_takes_last_index() {
        assert_eq!(split(&[2, 1]), (vec![2, 0], 1));
        assert_eq!(split(&[1, 0]), (vec![0, 0], 0));
    }
}
