//! Finite permutation groups with decreasing subgroup chains, their coset
//! actions and orbit-tree ranks.

mod build;
mod chain;
mod gset;
mod perm;
mod tsi;

pub use build::{interleave_chains, Interleaving};
pub use chain::{closure, closure_with_budget, ChainGroup, CosetSpace, GroupConfig, DEFAULT_MAX_GROUP_ORDER};
pub use gset::{gset_rank, stabilizer, GSet, Stabilizer};
pub use perm::{parse_cycles, Perm};
pub use tsi::{tsi_check, TsiReport, TsiWitness};

use thiserror::Error;

use crate::eqseq::EqSeqError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("group closure exceeds the element budget of {budget}")]
    BudgetExceeded { budget: usize },
    #[error("chain member {0} is not a subgroup of its predecessor")]
    NotASubgroup(usize),
    #[error("chain does not end at the trivial group")]
    ChainNotTrivialAtEnd,
    #[error("index {k} out of range for a chain of length {len}")]
    IndexOutOfRange { k: usize, len: usize },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("chains admit no common refinement at level {0}")]
    NoInterleaving(usize),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    EqSeq(#[from] EqSeqError),
}
