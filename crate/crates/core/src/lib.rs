//! Orbit-tree ranks of decreasing subgroup chains, with a symbolic rank
//! calculus for the transfinite cases.

pub mod eqseq;
pub mod ordinal;
pub mod wftree;
pub mod par;
pub mod permgroup;
pub mod symrank;
pub mod gen;
pub mod verify;
