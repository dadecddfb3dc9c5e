//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group factor list must be nonempty")]
    EmptyFactorList,
    #[error("group factors must all be >= 1")]
    BadFactor,
    #[error("group order {order} exceeds cap {cap}")]
    OrderCap { order: u64, cap: u64 },
    #[error("operands belong to different groups")]
    GroupMismatch,
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("element index {idx} out of range for group of order {order}")]
    IndexRange { idx: u32, order: u32 },
    #[error("mask is not a subgroup (missing 0 or not closed under addition)")]
    NotASubgroup,
    #[error("{0} requires 0 to be a member of S")]
    ZeroNotInSet(&'static str),
    #[error("S does not generate the group")]
    NotGenerating,
    #[error("group order {order} too small for k={k} (need order >= 2k-1)")]
    OrderTooSmallForK { order: u32, k: u32 },
    #[error("exact scan supports order <= {max}, got {order}; use seeded mode")]
    ExactScanTooLarge { order: u32, max: u32 },
    #[error("set is not 2-separable")]
    NotSeparable,
    #[error("set is not degenerate (no subgroup is a 2-fragment)")]
    NotDegenerate,
    #[error("set has no super-atom (it generates the group and is non-degenerate)")]
    NoSuperAtom,
    #[error("matching precondition failed: {0}")]
    Matching(String),
    #[error("hypothesis of {theorem} violated: {clause}")]
    Hypothesis { theorem: &'static str, clause: String },
    #[error("no case of {theorem} matched (counterexample): {details}")]
    NoCase { theorem: &'static str, details: String },
    #[error("estimated cost {estimate} sumset evaluations exceeds budget {budget}")]
    Budget { estimate: u64, budget: u64 },
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
    #[error("stored counterexample does not reproduce: {0}")]
    NotReproducible(String),
    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
