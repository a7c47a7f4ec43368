//! Budget-constrained prize-collecting out-trees in directed graphs.
//!
//! The crate solves three closely related problems over a node-weighted
//! digraph `D = (V, A)` with a monotone submodular prize function `p`:
//!
//! * **rooted** ([`solver::solve_drso`]): find an out-tree rooted at `r` of cost
//!   at most `B` maximizing `p`; the returned tree may exceed the budget by a
//!   factor of `1 + ε` and collects an `O(√B / ε³)` fraction of the optimum;
//! * **rooted additive** ([`solver::solve_drao`]): the same with an additive
//!   prize and a sharper trimming step;
//! * **unrooted** ([`solver::solve_dso_unrooted`]): any root, no budget violation.
//!
//! Around the pipelines live the pieces they are built from: node-weighted
//! shortest paths and out-tree algebra ([`graph`]), prize oracles and the seeded
//! greedy ([`submodular`]), the covering decomposition of out-trees
//! ([`decompose`]), the three trimming procedures ([`trimming`]), problem
//! reductions ([`reductions`]) and brute-force optimizers for small instances
//! ([`oracle`]). Every guarantee the pipelines promise is exposed as a
//! [`certify::Factor`] that can be checked exactly against a known optimum.

pub mod certify;
pub mod decompose;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod reductions;
pub mod solver;
pub mod submodular;
pub mod trimming;

pub use error::{Error, Result};
pub use graph::{Digraph, DistanceTable, NodeId, NodeMap, OutTree};
pub use solver::{Instance, SolveReport, Variant};
pub use submodular::PrizeOracle;

/// Node cost. Native instances use costs `>= 1`; reduction-produced ones may use `0`.
pub type Cost = u64;

/// Prize value. Weights are integers, so every prize is an exact integer.
pub type Prize = u64;

/// Exact rational used for ε, thresholds and prize-to-cost ratios.
pub type Rational = num_rational::Ratio<i128>;

/// Integer square root, `⌊√b⌋`.
pub fn isqrt(b: u64) -> u64 {
    num_integer::Roots::sqrt(&b)
}
