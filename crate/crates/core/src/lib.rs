//! Weighted shift operators on ℓ² sequence spaces, together with the
//! machinery needed to study their orbits relative to basis-spanned
//! subspaces: residue-class index sets, power invariance, log-domain
//! product traces with finite-horizon verdicts, and constructive orbit
//! experiments on truncated windows.
//!
//! Everything here is exact in the sense that weight products are
//! accumulated as sums of natural logs (never as raw products), index
//! arithmetic is integer arithmetic, and every verdict records the data
//! needed to reproduce it.

pub mod constructors;
pub mod criteria;
pub mod error;
pub mod index_set;
pub mod invariance;
pub mod operator;
pub mod orbit;
pub mod schedule;
pub mod shift_ops;
pub mod vector;
pub mod verdict;
pub mod weights;

pub use error::Error;
pub use index_set::IndexSet;
pub use operator::{DirectSumSpec, OperatorKind, OperatorSpec};
pub use schedule::PowerSchedule;
pub use shift_ops::{LogMagnitude, PowerCoefficient};
pub use vector::{Component, SparseVector};
pub use verdict::{Verdict, VerdictStatus};
pub use weights::{Domain, WeightRule, WeightSequence};
