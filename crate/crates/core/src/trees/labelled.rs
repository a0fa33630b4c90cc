use std::collections::BTreeMap;

use nalgebra::DVector;

use super::topology::{enumerate_topologies, Family, TreeTopology};
use crate::error::Result;
use crate::exec::Exec;
use crate::fourier::FourierMap;
use crate::mode::Mode;
use crate::model::Problem;
use crate::propagator::Propagator;
use crate::series::Composite;
use crate::C64;

/// Admissible mode labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSupport {
    /// Nonzero labels of `E₁` end nodes.
    pub end: Vec<Mode>,
    /// Labels of internal nodes with `p_v = p`, keyed by `p`.
    pub node: BTreeMap<usize, Vec<Mode>>,
    pub family: Family,
}

impl LabelSupport {
    /// Labels with a nonzero node factor for `problem`.
    pub fn from_problem(problem: &Problem) -> Self {
        let family = family_of(problem);
        let comp = Composite::new(problem);
        let end = comp.constants().modes().filter(|nu| !nu.is_zero()).cloned().collect();
        let mut node: BTreeMap<usize, Vec<Mode>> = BTreeMap::new();
        for (nu, ts) in problem.tensors.modes() {
            for (p, t) in ts.iter().enumerate().skip(1) {
                let allowed = match family {
                    Family::Theorem1 => p >= 2,
                    Family::Theorem2 => p >= 2 || !nu.is_zero(),
                };
                if allowed && !t.is_zero() {
                    node.entry(p).or_default().push(nu.clone());
                }
            }
        }
        Self { end, node, family }
    }

    fn node_labels(&self, p: usize) -> &[Mode] {
        self.node.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }
}

pub fn family_of(problem: &Problem) -> Family {
    if problem.spec.is_autonomous() {
        Family::Theorem1
    } else {
        Family::Theorem2
    }
}

/// A tree with node modes and line momenta. The line exiting node `v` is
/// identified with `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledTree {
    pub topology: TreeTopology,
    pub family: Family,
    /// `ν_v`; zero on internal nodes of the autonomous family.
    pub modes: Vec<Mode>,
    /// `ν_ℓ = Σ_{w ≼ ℓ} ν_w`.
    pub momenta: Vec<Mode>,
}

impl LabelledTree {
    pub fn root_momentum(&self) -> &Mode {
        &self.momenta[0]
    }

    /// End nodes labelled 0 stand for `ζ`.
    pub fn is_zeta_node(&self, v: usize) -> bool {
        self.topology.is_end(v) && self.modes[v].is_zero()
    }
}

/// All admissible labellings of `topology`.
///
/// End nodes take labels from `support.end`, plus 0 (a `ζ` node) when
/// `zeta_allowed`. Lines leaving internal nodes must carry nonzero momentum, and
/// unary nodes nonzero labels.
pub fn enumerate_labelled(topology: &TreeTopology, support: &LabelSupport, zeta_allowed: bool, d: usize) -> Vec<LabelledTree> {
    let k = topology.order();
    let zero = Mode::zero(d);
    let options: Vec<Vec<Mode>> = (0..k)
        .map(|v| {
            if topology.is_end(v) {
                let mut o = support.end.clone();
                if zeta_allowed {
                    o.push(zero.clone());
                }
                o.sort();
                o
            } else {
                let p = topology.p(v);
                support.node_labels(p).iter().filter(|nu| p >= 2 || !nu.is_zero()).cloned().collect()
            }
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let modes: Vec<Mode> = idx.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
        let mut momenta = modes.clone();
        for v in (0..k).rev() {
            for &c in topology.children(v) {
                momenta[v] = &momenta[v] + &momenta[c];
            }
        }
        let ok = (0..k).all(|v| topology.is_end(v) || !momenta[v].is_zero());
        if ok {
            out.push(LabelledTree { topology: topology.clone(), family: support.family, modes, momenta });
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < options[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `Val(θ)`: node factors and propagators contracted from the leaves up.
///
/// Node factors are `−εG_p` / `−εH_{p,ν}` on internal nodes, `εf_ν` / `−εh_ν(c)`
/// on `E₁` end nodes and `ζ` on `E₀` end nodes; propagators are `D⁻¹(ε, ω·ν_ℓ)`,
/// or the identity when `ν_ℓ = 0`.
pub fn tree_value(
    tree: &LabelledTree,
    eps: f64,
    zeta: &DVector<f64>,
    problem: &Problem,
    comp: &Composite,
    prop: &Propagator,
) -> Result<DVector<C64>> {
    let t = &tree.topology;
    let k = t.order();
    let neg_eps = C64::new(-eps, 0.0);
    let mut vals: Vec<Option<DVector<C64>>> = vec![None; k];
    for v in (0..k).rev() {
        let factor = if t.is_end(v) {
            if tree.modes[v].is_zero() {
                zeta.map(|x| C64::new(x, 0.0))
            } else {
                comp.constants().at(&tree.modes[v]) * neg_eps
            }
        } else {
            let args: Vec<DVector<C64>> = t.children(v).iter().map(|&c| vals[c].take().expect("child valued")).collect();
            let refs: Vec<&DVector<C64>> = args.iter().collect();
            match problem.tensors.tensor(&tree.modes[v], t.p(v)) {
                Some(tensor) => tensor.contract(&refs) * neg_eps,
                None => DVector::zeros(problem.m()),
            }
        };
        let mom = &tree.momenta[v];
        vals[v] = Some(if mom.is_zero() { factor } else { prop.solve(mom, &factor)? });
    }
    Ok(vals[0].take().expect("root valued"))
}

/// Sum of tree values of one order and root momentum.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: DVector<C64>,
    pub tree_count: usize,
}

/// Every labelled tree of order `k` for `problem`.
pub fn labelled_trees(k: usize, problem: &Problem) -> Result<Vec<LabelledTree>> {
    let support = LabelSupport::from_problem(problem);
    let tops = enumerate_topologies(k, support.family)?;
    Ok(tops.iter().flat_map(|t| enumerate_labelled(t, &support, true, problem.d())).collect())
}

/// `u^(k)_ν = Σ_{θ ∈ T_{k,ν}} Val(θ)`.
pub fn oracle_coefficient(k: usize, nu: &Mode, eps: f64, zeta: &DVector<f64>, problem: &Problem, exec: Exec) -> Result<OracleResult> {
    let trees: Vec<LabelledTree> = labelled_trees(k, problem)?.into_iter().filter(|t| t.root_momentum() == nu).collect();
    let comp = Composite::new(problem);
    let prop = Propagator::new(eps, problem);
    let vals = exec.map(&trees, |t| tree_value(t, eps, zeta, problem, &comp, &prop));
    let mut value = DVector::zeros(problem.m());
    for v in vals {
        value += v?;
    }
    Ok(OracleResult { value, tree_count: trees.len() })
}

/// All coefficients of order `k` at once, with the number of trees summed.
pub fn oracle_order(k: usize, eps: f64, zeta: &DVector<f64>, problem: &Problem, exec: Exec) -> Result<(FourierMap, usize)> {
    let trees = labelled_trees(k, problem)?;
    let comp = Composite::new(problem);
    let mut prop = Propagator::new(eps, problem);
    let moms: Vec<Mode> = trees.iter().flat_map(|t| t.momenta.iter().filter(|m| !m.is_zero()).cloned()).collect();
    prop.prefactor(&moms, exec);
    let vals = exec.map(&trees, |t| tree_value(t, eps, zeta, problem, &comp, &prop));
    let mut acc: BTreeMap<Mode, DVector<C64>> = BTreeMap::new();
    for (t, v) in trees.iter().zip(vals) {
        let e = acc.entry(t.root_momentum().clone()).or_insert_with(|| DVector::zeros(problem.m()));
        *e += v?;
    }
    let mut out = FourierMap::new(problem.m(), problem.d(), None);
    for (nu, v) in acc {
        out.insert(nu, v);
    }
    Ok((out, trees.len()))
}
