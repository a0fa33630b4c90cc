//! Brute-force tree expansion of the perturbation coefficients, used as an
//! oracle for the recursion, plus chain detection and the counting checks.

mod chains;
mod labelled;
mod topology;

pub use chains::{chain_value, check_counting, find_chains, Chain, CountingReport};
pub use labelled::{
    enumerate_labelled, family_of, labelled_trees, oracle_coefficient, oracle_order, tree_value, LabelSupport,
    LabelledTree, OracleResult,
};
pub use topology::{enumerate_topologies, Family, TreeTopology};
