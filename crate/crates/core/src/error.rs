//! One error type for the whole crate. Variants are grouped roughly by the
//! layer that raises them: type construction, operator algebra, criteria
//! evaluation, orbit experiments.

use crate::verdict::Verdict;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} is outside the unilateral domain")]
    IndexOutsideDomain { index: i64 },

    #[error("weight values must be positive and finite, got {value}")]
    NonPositiveWeight { value: f64 },

    #[error("coefficients must be finite, got {value}")]
    NonFiniteCoefficient { value: f64 },

    #[error("{what} must not be empty")]
    Empty { what: &'static str },

    #[error("block lengths must be positive and strictly increasing")]
    BadBlockLengths,

    #[error("modulus must be at least 1")]
    ZeroModulus,

    #[error("residue {residue} is outside 0..{modulus}")]
    ResidueOutOfRange { residue: u32, modulus: u32 },

    #[error("includes and excludes overlap at {index}")]
    OverlappingAdjustment { index: i64 },

    #[error("adjustment index {index} is outside the unilateral domain")]
    AdjustmentOutsideDomain { index: i64 },

    #[error("a {kind} operator needs {expected} weights")]
    LateralityMismatch {
        kind: &'static str,
        expected: &'static str,
    },

    #[error("operator and index set live on different domains")]
    DomainMismatch,

    #[error("expected a {expected} operator, got {got}")]
    WrongOperatorKind {
        expected: &'static str,
        got: &'static str,
    },

    #[error("{index} is not a member of the index set")]
    NotAMember { index: i64 },

    #[error("power {n} does not leave the subspace invariant")]
    InadmissiblePower { n: u64 },

    #[error("power must be at least 1")]
    ZeroPower,

    #[error("the index set is degenerate (finite span), criteria do not apply")]
    DegenerateSubspace,

    #[error("no right inverse: stepping {n} down from index {m} exits the unilateral domain")]
    NoRightInverse { m: i64, n: u64 },

    #[error("vector entry tagged '{found}' where '{expected}' was expected")]
    ComponentMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("schedule powers must be positive and strictly increasing")]
    BadSchedule,

    #[error("thresholds must satisfy satisfy_log < 0 < violate_log and window >= 1")]
    BadThresholds,

    #[error("weights are not invertible over the probed window (inf {inf}, sup {sup})")]
    NotInvertible { inf: f64, sup: f64 },

    #[error("delta must be positive and finite, got {0}")]
    BadDelta(f64),

    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),

    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),

    #[error("truncation window [{lo}, {hi}] is invalid for the operator domain")]
    BadWindow { lo: i64, hi: i64 },

    #[error("support index {index} lies outside the truncation window")]
    SupportOutsideWindow { index: i64 },

    #[error("target {target} has support outside the subspace or the window")]
    BadTarget { target: usize },

    #[error("decay condition not satisfied at the horizon; construction refused")]
    ConditionNotSatisfied { verdict: Box<Verdict> },

    #[error("schedule exhausted before a placement was found for target {target}")]
    ScheduleExhausted { target: usize },

    #[error("construction failed self-verification")]
    ConstructionFailed {
        forward: Box<Verdict>,
        backward: Box<Verdict>,
    },

    #[error("invalid construction: {0}")]
    BadConstruction(String),
}
