use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// Which family of diagrams: internal nodes need two or more children in the
/// autonomous family, one or more in the forced family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Theorem1,
    Theorem2,
}

impl Family {
    pub fn ceiling(self) -> usize {
        match self {
            Family::Theorem1 => 6,
            Family::Theorem2 => 5,
        }
    }

    fn min_children(self) -> usize {
        match self {
            Family::Theorem1 => 2,
            Family::Theorem2 => 1,
        }
    }
}

/// Rooted plane tree in preorder: node 0 is the root (the node the root line
/// exits), and children are kept in their drawn left-to-right order.
///
/// Two trees are equivalent when one can be deformed into the other without
/// crossing lines, which preserves the child order; the bracket string returned
/// by [`TreeTopology::canonical`] is therefore a complete invariant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeTopology {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl TreeTopology {
    pub fn leaf() -> Self {
        Self { parent: vec![None], children: vec![Vec::new()] }
    }

    /// New root whose subtrees are `subs`, left to right.
    pub fn join(subs: &[&TreeTopology]) -> Self {
        let mut t = Self::leaf();
        for s in subs {
            let off = t.parent.len();
            t.children[0].push(off);
            for v in 0..s.parent.len() {
                t.parent.push(Some(s.parent[v].map_or(0, |p| p + off)));
                t.children.push(s.children[v].iter().map(|c| c + off).collect());
            }
        }
        t
    }

    /// `k(θ) = |N(θ)|`.
    pub fn order(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// `p_v`.
    pub fn p(&self, v: usize) -> usize {
        self.children[v].len()
    }

    pub fn is_end(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    /// `|E(θ)|`.
    pub fn end_nodes(&self) -> usize {
        (0..self.order()).filter(|&v| self.is_end(v)).count()
    }

    /// `V₁(θ)`: internal nodes with exactly one child.
    pub fn unary_nodes(&self) -> Vec<usize> {
        (0..self.order()).filter(|&v| self.p(v) == 1).collect()
    }

    pub fn canonical(&self) -> String {
        fn rec(t: &TreeTopology, v: usize, out: &mut String) {
            out.push('(');
            for &c in &t.children[v] {
                rec(t, c, out);
            }
            out.push(')');
        }
        let mut s = String::with_capacity(2 * self.order());
        rec(self, 0, &mut s);
        s
    }
}

/// All non-equivalent trees of order `k` in `family`.
pub fn enumerate_topologies(k: usize, family: Family) -> Result<Vec<TreeTopology>> {
    if k > family.ceiling() {
        return Err(Error::OrderTooLarge { k, ceiling: family.ceiling() });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut by_order: Vec<Vec<TreeTopology>> = vec![Vec::new(), vec![TreeTopology::leaf()]];
    for n in 2..=k {
        let mut out = Vec::new();
        for p in family.min_children()..n {
            for parts in compositions(n - 1, p) {
                let mut acc: Vec<Vec<&TreeTopology>> = vec![Vec::new()];
                for &part in &parts {
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            by_order[part].iter().map(move |t| {
                                let mut v = prefix.clone();
                                v.push(t);
                                v
                            })
                        })
                        .collect();
                }
                out.extend(acc.iter().map(|subs| TreeTopology::join(subs)));
            }
        }
        let mut seen = BTreeSet::new();
        out.retain(|t| seen.insert(t.canonical()));
        by_order.push(out);
    }
    Ok(by_order.swap_remove(k))
}

/// Ordered ways to write `n` as a sum of `p` positive integers.
fn compositions(n: usize, p: usize) -> Vec<Vec<usize>> {
    if p == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if n < p {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 1..=n - (p - 1) {
        for mut rest in compositions(n - first, p - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
