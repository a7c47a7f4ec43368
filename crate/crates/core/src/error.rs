use crate::{Cost, NodeId};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("node {node} is not a valid id (graph has {len} nodes)")]
    InvalidNode { node: NodeId, len: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("root {root} costs {cost}, more than the budget {budget}")]
    InfeasibleRoot {
        root: NodeId,
        cost: Cost,
        budget: u64,
    },

    #[error("no path from {from} to {to}")]
    NoPath { from: NodeId, to: NodeId },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("exact search refused: {0}")]
    SizeCap(String),

    #[error("no feasible solution: {0}")]
    Infeasible(String),

    /// A self-check on an intermediate or final result failed. This always
    /// indicates a bug (or an oracle that is not monotone submodular).
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
