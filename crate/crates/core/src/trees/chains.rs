use nalgebra::DMatrix;
use serde::Serialize;

use super::labelled::LabelledTree;
use super::topology::{Family, TreeTopology};
use crate::error::Result;
use crate::model::Problem;
use crate::propagator::Propagator;
use crate::C64;

/// Maximal run of unary internal nodes, top to bottom. Line `ℓ_i` is the one
/// exiting `nodes[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub nodes: Vec<usize>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `𝔠(θ)`: all maximal chains.
pub fn find_chains(t: &TreeTopology) -> Vec<Chain> {
    let unary = |v: usize| t.p(v) == 1;
    let mut out = Vec::new();
    for v in 0..t.order() {
        if !unary(v) || t.parent(v).is_some_and(unary) {
            continue;
        }
        let mut nodes = vec![v];
        let mut cur = v;
        while let [c] = t.children(cur) {
            if !unary(*c) {
                break;
            }
            nodes.push(*c);
            cur = *c;
        }
        out.push(Chain { nodes });
    }
    out
}

/// `Val(C) = 𝒢_{ℓ₁} F_{v₁} 𝒢_{ℓ₂} F_{v₂} ⋯ 𝒢_{ℓ_p} F_{v_p}` with `F_v = −εH_{1,ν_v}`.
pub fn chain_value(tree: &LabelledTree, chain: &Chain, eps: f64, problem: &Problem, prop: &Propagator) -> Result<DMatrix<C64>> {
    let m = problem.m();
    let mut out = DMatrix::<C64>::identity(m, m);
    for &v in &chain.nodes {
        let f = match problem.tensors.tensor(&tree.modes[v], 1) {
            Some(t) => t.as_matrix() * C64::new(-eps, 0.0),
            None => DMatrix::zeros(m, m),
        };
        let mom = &tree.momenta[v];
        let mut g = DMatrix::zeros(m, m);
        for j in 0..m {
            let col = prop.solve(mom, &f.column(j).into_owned())?;
            g.set_column(j, &col);
        }
        out *= g;
    }
    Ok(out)
}

/// Outcome of the counting inequality for one tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountingReport {
    pub family: Family,
    pub order: usize,
    pub end_nodes: usize,
    pub unary_nodes: usize,
    pub chains: usize,
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
}

/// `2|E| ≥ k + 1` (autonomous family) or `4|E| + 2|V₁| − 2|𝔠| ≥ k + 2` (forced).
pub fn check_counting(t: &TreeTopology, family: Family) -> CountingReport {
    let k = t.order();
    let e = t.end_nodes();
    let v1 = t.unary_nodes().len();
    let c = find_chains(t).len();
    let (lhs, rhs) = match family {
        Family::Theorem1 => (2 * e, k + 1),
        Family::Theorem2 => (4 * e + 2 * v1 - 2 * c, k + 2),
    };
    CountingReport { family, order: k, end_nodes: e, unary_nodes: v1, chains: c, lhs, rhs, holds: lhs >= rhs }
}
