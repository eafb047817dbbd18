//! Ready-made weight sequences and verified example bundles.
//!
//! The centerpiece is [`herrero_construction`]: a block-interleaved weight
//! sequence together with two residue-class subspaces and two power
//! schedules, arranged so the forward decay condition holds on the first
//! subspace while the backward decay condition holds on the second for the
//! adjoint. The construction never trusts its own arithmetic: it runs both
//! criteria evaluators before returning, and a bundle that fails either one
//! is an error, not a value.

use serde::{Deserialize, Serialize};

use crate::criteria::{backward_condition, eq65_forward, CriterionThresholds};
use crate::error::Error;
use crate::index_set::IndexSet;
use crate::operator::{OperatorKind, OperatorSpec};
use crate::schedule::PowerSchedule;
use crate::shift_ops::adjoint;
use crate::verdict::Verdict;
use crate::weights::{Domain, WeightRule, WeightSequence};

/// The four named weight families. A family is just a validated rule
/// without the table escape hatch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Constant { value: f64 },
    Step { pos: f64, neg: f64 },
    Periodic { values: Vec<f64> },
    BlockInterleaved {
        low: f64,
        high: f64,
        block_lengths: Vec<u64>,
    },
}

/// Builds the weight sequence for a named family on the given domain.
pub fn make_family(family: &Family, domain: Domain) -> Result<WeightSequence, Error> {
    let rule = match family.clone() {
        Family::Constant { value } => WeightRule::Constant { value },
        Family::Step { pos, neg } => WeightRule::Step { pos, neg },
        Family::Periodic { values } => WeightRule::Periodic { values },
        Family::BlockInterleaved {
            low,
            high,
            block_lengths,
        } => WeightRule::BlockInterleaved {
            low,
            high,
            block_lengths,
        },
    };
    WeightSequence::new(rule, domain)
}

/// A verified two-subspace witness: the forward condition holds on `m1`
/// for the weights, and the backward condition holds on `m2` for the
/// adjoint operator. Both verdicts are embedded so consumers can audit
/// exactly what was checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HerreroBundle {
    pub weights: WeightSequence,
    pub m1: IndexSet,
    pub m2: IndexSet,
    pub sched_fwd: PowerSchedule,
    pub sched_bwd: PowerSchedule,
    /// Base member of `m1` the forward condition was evaluated at.
    pub forward_base: i64,
    /// Base member of `m2` the backward condition was evaluated at.
    pub backward_base: i64,
    pub forward_verdict: Verdict,
    pub backward_verdict: Verdict,
}

impl HerreroBundle {
    /// The constructed operator itself (forward shift on the weights).
    pub fn operator(&self) -> OperatorSpec {
        OperatorSpec::new(OperatorKind::BilateralForward, self.weights.clone())
            .expect("bundle weights are bilateral")
    }
}

/// Cumulative block boundaries c_1..c_count of the interleaved layout,
/// with the listed lengths followed by perpetual doubling of the last.
/// Must agree with how the block rule itself lays out values.
fn block_boundaries(lengths: &[u64], count: usize) -> Result<Vec<u128>, Error> {
    let last = *lengths.last().expect("validated non-empty");
    let mut ends = Vec::with_capacity(count);
    let mut cum: u128 = 0;
    for b in 0..count {
        let len: u128 = if b < lengths.len() {
            lengths[b] as u128
        } else {
            let extra = (b - lengths.len() + 1) as u32;
            if extra >= 64 {
                return Err(Error::BadConstruction(
                    "block layout overflows the index range".into(),
                ));
            }
            (last as u128) << extra
        };
        cum += len;
        ends.push(cum);
    }
    Ok(ends)
}

fn round_up_to_multiple(value: u128, p: u128) -> u128 {
    value.div_ceil(p) * p
}

/// Builds the block-interleaved witness.
///
/// Layout: blocks of `low` weights alternate with blocks of `high` weights
/// ascending from index 0 (negative indices mirror the layout with the
/// roles swapped, which is what lets both conditions hold at once). The
/// forward schedule samples the ends of the `low` blocks, where the forward
/// products have just finished shrinking; the backward schedule samples the
/// ends of the `high` blocks, where the reflected products have. Both are
/// rounded up to multiples of `p` to stay admissible for the residue-class
/// subspaces `{0 mod p}` and `{p-1 mod p}`.
pub fn herrero_construction(
    low: f64,
    high: f64,
    lengths: &[u64],
    p: u32,
) -> Result<HerreroBundle, Error> {
    if !(low < 1.0 && 1.0 < high) {
        return Err(Error::BadConstruction(
            "need low < 1 < high for the products to swing".into(),
        ));
    }
    if p < 2 {
        return Err(Error::BadConstruction(
            "need p >= 2 so the two subspaces are distinct".into(),
        ));
    }
    let weights = WeightSequence::new(
        WeightRule::BlockInterleaved {
            low,
            high,
            block_lengths: lengths.to_vec(),
        },
        Domain::Bilateral,
    )?;
    let op = OperatorSpec::new(OperatorKind::BilateralForward, weights.clone())?;

    let k = lengths.len();
    let ends = block_boundaries(lengths, 2 * k)?;
    let mut fwd = Vec::with_capacity(k);
    let mut bwd = Vec::with_capacity(k);
    for i in 0..k {
        fwd.push(round_up_to_multiple(ends[2 * i], u128::from(p)));
        bwd.push(round_up_to_multiple(ends[2 * i + 1], u128::from(p)));
    }
    for sched in [&fwd, &bwd] {
        if !sched.windows(2).all(|w| w[0] < w[1]) || sched.iter().any(|&n| n > u64::MAX as u128) {
            return Err(Error::BadConstruction(
                "block ends collapsed after rounding to multiples of p".into(),
            ));
        }
    }
    let sched_fwd = PowerSchedule::explicit(fwd.iter().map(|&n| n as u64).collect())?;
    let sched_bwd = PowerSchedule::explicit(bwd.iter().map(|&n| n as u64).collect())?;

    let m1 = IndexSet::residue_class(p, 0, Domain::Bilateral)?;
    let m2 = IndexSet::residue_class(p, p - 1, Domain::Bilateral)?;
    let forward_base = m1.canonical_member().expect("residue classes are infinite");
    let backward_base = m2.canonical_member().expect("residue classes are infinite");

    let th = CriterionThresholds::default();
    let forward_verdict = eq65_forward(&op, &m1, forward_base, &sched_fwd, &th)?;
    let backward_verdict = backward_condition(&adjoint(&op), &m2, backward_base, &sched_bwd, &th)?;
    if !(forward_verdict.is_satisfied() && backward_verdict.is_satisfied()) {
        return Err(Error::ConstructionFailed {
            forward: Box::new(forward_verdict),
            backward: Box::new(backward_verdict),
        });
    }

    Ok(HerreroBundle {
        weights,
        m1,
        m2,
        sched_fwd,
        sched_bwd,
        forward_base,
        backward_base,
        forward_verdict,
        backward_verdict,
    })
}

/// The doubling backward shift on the nonnegative lattice with the
/// odd-index subspace (coordinates at even indices vanish).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingBackwardBundle {
    pub op: OperatorSpec,
    pub space: IndexSet,
}

pub fn doubling_backward_bundle() -> DoublingBackwardBundle {
    let weights =
        WeightSequence::constant(2.0, Domain::Unilateral).expect("2 is a valid weight");
    DoublingBackwardBundle {
        op: OperatorSpec::new(OperatorKind::UnilateralBackward, weights)
            .expect("domains match"),
        space: IndexSet::residue_class(2, 1, Domain::Unilateral).expect("valid residue class"),
    }
}
