//! The weight-product conditions behind every dynamical statement in the
//! crate, each evaluated to a horizon-bounded [`Verdict`] or report.
//!
//! A limit like "the products tend to zero" is undecidable from finitely
//! many terms, so each evaluator samples log-products along an admissible
//! power schedule and hands them to the decision rules in [`crate::verdict`].
//! Structural facts that *are* decidable (periodic tails, rule-level infima)
//! are computed exactly and allowed to override the finite-horizon reading.
//!
//! All evaluators share two accumulation routines, one for bilateral decay
//! traces and one for unilateral running sums. Direct-sum combinators take
//! pointwise max/min of those shared accumulations, which is what makes the
//! "combined trace equals componentwise combination, bit for bit" property
//! hold by construction.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::index_set::IndexSet;
use crate::invariance::{admissible_powers, is_power_invariant};
use crate::operator::{DirectSumSpec, OperatorKind, OperatorSpec};
use crate::schedule::PowerSchedule;
use crate::shift_ops::{power_product, PowerCoefficient};
use crate::verdict::{DecisionRule, Trace, TracePoint, Verdict};
use crate::weights::{Side, WeightSequence};

/// Decision parameters shared by the limit evaluators.
///
/// `satisfy_log` and `violate_log` are natural logs of the product
/// thresholds; `window` is how many trailing schedule points must agree on
/// a trend before it counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawThresholds")]
pub struct CriterionThresholds {
    satisfy_log: f64,
    violate_log: f64,
    window: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    #[serde(default = "default_satisfy_log")]
    satisfy_log: f64,
    #[serde(default = "default_violate_log")]
    violate_log: f64,
    #[serde(default = "default_window")]
    window: usize,
}

fn default_satisfy_log() -> f64 {
    1e-6_f64.ln()
}

fn default_violate_log() -> f64 {
    1e6_f64.ln()
}

fn default_window() -> usize {
    5
}

impl TryFrom<RawThresholds> for CriterionThresholds {
    type Error = Error;

    fn try_from(raw: RawThresholds) -> Result<Self, Error> {
        CriterionThresholds::new(raw.satisfy_log, raw.violate_log, raw.window)
    }
}

impl Default for CriterionThresholds {
    fn default() -> Self {
        CriterionThresholds {
            satisfy_log: default_satisfy_log(),
            violate_log: default_violate_log(),
            window: default_window(),
        }
    }
}

impl CriterionThresholds {
    pub fn new(satisfy_log: f64, violate_log: f64, window: usize) -> Result<Self, Error> {
        if !(satisfy_log < 0.0 && 0.0 < violate_log) || window == 0 {
            return Err(Error::BadThresholds);
        }
        Ok(CriterionThresholds {
            satisfy_log,
            violate_log,
            window,
        })
    }

    pub fn satisfy_log(&self) -> f64 {
        self.satisfy_log
    }

    pub fn violate_log(&self) -> f64 {
        self.violate_log
    }

    pub fn window(&self) -> usize {
        self.window
    }

    fn decay_rule(&self) -> DecisionRule {
        DecisionRule::DecayWindow {
            satisfy_log: self.satisfy_log,
            violate_log: self.violate_log,
            window: self.window,
        }
    }
}

/// Weight bounds over the probed range; `invertible` means bounded away
/// from zero and infinity, which the decay-propagation probe requires and
/// the other evaluators merely report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityReport {
    pub lower: f64,
    pub upper: f64,
    /// Whether the bounds came from the rule structure (exact on the whole
    /// domain) rather than from sampling a window.
    pub exact: bool,
    pub invertible: bool,
}

/// Reports weight bounds for `op` over (at least) `[-probe, probe]`.
pub fn invertibility_report(op: &OperatorSpec, probe: i64) -> InvertibilityReport {
    let (lower, upper, exact) = op.weights().invertibility_bounds(probe.max(1));
    InvertibilityReport {
        lower,
        upper,
        exact,
        invertible: lower > 0.0 && upper.is_finite(),
    }
}

fn require_usable(op: &OperatorSpec, set: &IndexSet) -> Result<(), Error> {
    if op.domain() != set.domain() {
        return Err(Error::DomainMismatch);
    }
    if set.is_degenerate() {
        return Err(Error::DegenerateSubspace);
    }
    Ok(())
}

fn require_member(set: &IndexSet, m: i64) -> Result<(), Error> {
    if set.is_member(m) {
        Ok(())
    } else {
        Err(Error::NotAMember { index: m })
    }
}

fn require_admissible(op: &OperatorSpec, set: &IndexSet, powers: &[u64]) -> Result<(), Error> {
    for &n in powers {
        if !is_power_invariant(op, set, n)? {
            return Err(Error::InadmissiblePower { n });
        }
    }
    Ok(())
}

/// Running log-products of an operator power acting on `e_base`, snapshotted
/// at each schedule power.
///
/// The "plus" sum walks with the shift (up for forward kinds, down for
/// backward kinds) and is the log coefficient of opⁿ e_base; the "minus" sum
/// walks the opposite way with negated logs and is the log coefficient of
/// the right-inverse power. Accumulation order is fixed (one addend per
/// step, plus before minus) so that every evaluator built on this routine
/// produces bit-identical sums for identical weights.
fn accumulate_traces(op: &OperatorSpec, base: i64, powers: &[u64]) -> (Vec<f64>, Vec<f64>) {
    let w = op.weights();
    let forward = op.kind().is_forward();
    let mut plus = Vec::with_capacity(powers.len());
    let mut minus = Vec::with_capacity(powers.len());
    let mut sum_plus = 0.0_f64;
    let mut sum_minus = 0.0_f64;
    let mut t: i64 = 0;
    for &n in powers {
        while t < n as i64 {
            if forward {
                sum_plus += w.ln_raw(base + t);
                sum_minus -= w.ln_raw(base - 1 - t);
            } else {
                sum_plus += w.ln_raw(base - t);
                sum_minus -= w.ln_raw(base + 1 + t);
            }
            t += 1;
        }
        plus.push(sum_plus);
        minus.push(sum_minus);
    }
    (plus, minus)
}

fn trace_from(label: &str, powers: &[u64], values: Vec<f64>) -> Trace {
    Trace::new(
        label,
        values
            .into_iter()
            .zip(powers)
            .enumerate()
            .map(|(i, (log_value, &power))| TracePoint {
                k: i + 1,
                power,
                log_value,
            })
            .collect(),
    )
}

fn decay_condition(
    op: &OperatorSpec,
    set: &IndexSet,
    m_i: i64,
    base: i64,
    sched: &PowerSchedule,
    th: &CriterionThresholds,
) -> Result<Verdict, Error> {
    require_usable(op, set)?;
    require_member(set, m_i)?;
    let powers = sched.powers();
    require_admissible(op, set, &powers)?;
    let (plus, minus) = accumulate_traces(op, base, &powers);
    Ok(Verdict::decide(
        th.decay_rule(),
        vec![
            trace_from("plus", &powers, plus),
            trace_from("minus", &powers, minus),
        ],
    ))
}

/// Forward decay condition: both the forward products from `m_i` and the
/// reciprocal products below `m_i` must fall along the schedule.
pub fn eq65_forward(
    op: &OperatorSpec,
    set: &IndexSet,
    m_i: i64,
    sched: &PowerSchedule,
    th: &CriterionThresholds,
) -> Result<Verdict, Error> {
    op.expect_kind(OperatorKind::BilateralForward)?;
    decay_condition(op, set, m_i, m_i, sched, th)
}

/// Backward decay condition. The products quoted in the statement run over
/// reflected indices (w at -j), which is precisely the backward power
/// product based at `-m_i`, so the evaluator reuses the same accumulation
/// with a reflected base.
pub fn backward_condition(
    op: &OperatorSpec,
    set: &IndexSet,
    m_i: i64,
    sched: &PowerSchedule,
    th: &CriterionThresholds,
) -> Result<Verdict, Error> {
    op.expect_kind(OperatorKind::BilateralBackward)?;
    decay_condition(op, set, m_i, -m_i, sched, th)
}

/// How a finite product check came out overall.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Thm19Outcome {
    Pass,
    Fail,
    /// No member of the set had magnitude within the bound; nothing was
    /// checked, which is reported rather than silently passed.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm19Entry {
    pub index: i64,
    pub log_plus: f64,
    pub log_minus: f64,
    /// Worse of the two log-products minus ln(delta); negative passes.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm19Report {
    pub delta_log: f64,
    pub power: u64,
    pub bound_radius: u32,
    pub entries: Vec<Thm19Entry>,
    pub outcome: Thm19Outcome,
}

/// Finite product check at a single power: every member within magnitude
/// `q` must have both its forward product and its reciprocal backward
/// product strictly below `delta`.
pub fn thm19_finite_check(
    op: &OperatorSpec,
    set: &IndexSet,
    delta: f64,
    q: u32,
    n: u64,
) -> Result<Thm19Report, Error> {
    op.expect_kind(OperatorKind::BilateralForward)?;
    require_usable(op, set)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::BadDelta(delta));
    }
    if n == 0 {
        return Err(Error::ZeroPower);
    }
    if !is_power_invariant(op, set, n)? {
        return Err(Error::InadmissiblePower { n });
    }
    let delta_log = delta.ln();
    let mut entries = Vec::new();
    for index in set.enumerate(-i64::from(q), i64::from(q)) {
        let (plus, minus) = accumulate_traces(op, index, &[n]);
        let (log_plus, log_minus) = (plus[0], minus[0]);
        let margin = log_plus.max(log_minus) - delta_log;
        entries.push(Thm19Entry {
            index,
            log_plus,
            log_minus,
            margin,
            pass: log_plus < delta_log && log_minus < delta_log,
        });
    }
    let outcome = if entries.is_empty() {
        Thm19Outcome::Vacuous
    } else if entries.iter().all(|e| e.pass) {
        Thm19Outcome::Pass
    } else {
        Thm19Outcome::Fail
    };
    Ok(Thm19Report {
        delta_log,
        power: n,
        bound_radius: q,
        entries,
        outcome,
    })
}

/// Whether a bounded-below hypothesis holds: weights on one side of zero
/// bounded away from zero, plus a nonnegative member to anchor the argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm84Report {
    pub applicable: bool,
    /// Infimum of the weights over the probed side.
    pub lower_bound: f64,
    /// True when the infimum came from the rule structure (whole half-line),
    /// false when it was sampled out to the probe window.
    pub exact: bool,
    /// Smallest member of the set that is >= 0, within the probe window.
    pub witness: Option<i64>,
    pub note: String,
}

fn bounded_side_report(
    op: &OperatorSpec,
    set: &IndexSet,
    probe_window: i64,
    side: Side,
) -> Result<Thm84Report, Error> {
    if probe_window < 1 {
        return Err(Error::Empty {
            what: "probe window",
        });
    }
    let side_name = match side {
        Side::Negative => "negative",
        Side::Positive => "positive",
    };
    let (lower_bound, exact) = match op.weights().structural_side_inf(side) {
        Some(b) => (b, true),
        None => (op.weights().sampled_side_inf(side, probe_window), false),
    };
    let witness = (0..=probe_window).find(|&m| set.is_member(m));
    let applicable = lower_bound > 0.0 && witness.is_some();
    let note = if witness.is_none() {
        format!("witness not found <= window {probe_window}")
    } else if !applicable {
        format!("weights not bounded below on the {side_name} side")
    } else {
        format!(
            "weights bounded below by {lower_bound} on the {side_name} side ({})",
            if exact { "exact" } else { "sampled" }
        )
    };
    Ok(Thm84Report {
        applicable,
        lower_bound,
        exact,
        witness,
        note,
    })
}

/// Applicability of the bounded-below forward variant: infimum over the
/// negative side plus a nonnegative member of the set.
pub fn thm84_applicability(
    op: &OperatorSpec,
    set: &IndexSet,
    probe_window: i64,
) -> Result<Thm84Report, Error> {
    op.expect_kind(OperatorKind::BilateralForward)?;
    bounded_side_report(op, set, probe_window, Side::Negative)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop85Report {
    pub applicability: Thm84Report,
    /// Present only when the hypothesis held and the decay condition ran.
    pub verdict: Option<Verdict>,
}

/// Bounded-below backward variant: the mirrored hypothesis (weights bounded
/// below on the *positive* side) gates the backward decay condition.
pub fn prop85(
    op: &OperatorSpec,
    set: &IndexSet,
    m_i: i64,
    sched: &PowerSchedule,
    th: &CriterionThresholds,
    probe_window: i64,
) -> Result<Prop85Report, Error> {
    op.expect_kind(OperatorKind::BilateralBackward)?;
    let applicability = bounded_side_report(op, set, probe_window, Side::Positive)?;
    let verdict = if applicability.applicable {
        Some(backward_condition(op, set, m_i, sched, th)?)
    } else {
        None
    };
    Ok(Prop85Report {
        applicability,
        verdict,
    })
}

/// Forward decay condition on a direct sum: at every schedule power the
/// worse (larger) of the two component log-products must still decay, on
/// both the plus and minus sides.
pub fn direct_sum_condition(
    ds: &DirectSumSpec,
    m_i: i64,
    h_p: i64,
    sched: &PowerSchedule,
    th: &CriterionThresholds,
) -> Result<Verdict, Error> {
    ds.left().expect_kind(OperatorKind::BilateralForward)?;
    ds.right().expect_kind(OperatorKind::BilateralForward)?;
    require_usable(ds.left(), ds.left_space())?;
    require_usable(ds.right(), ds.right_space())?;
    require_member(ds.left_space(), m_i)?;
    require_member(ds.right_space(), h_p)?;
    let powers = sched.powers();
    require_admissible(ds.left(), ds.left_space(), &powers)?;
    require_admissible(ds.right(), ds.right_space(), &powers)?;
    let (left_plus, left_minus) = accumulate_traces(ds.left(), m_i, &powers);
    let (right_plus, right_minus) = accumulate_traces(ds.right(), h_p, &powers);
    let max_plus = left_plus
        .iter()
        .zip(&right_plus)
        .map(|(&a, &b)| a.max(b))
        .collect();
    let max_minus = left_minus
        .iter()
        .zip(&right_minus)
        .map(|(&a, &b)| a.max(b))
        .collect();
    Ok(Verdict::decide(
        th.decay_rule(),
        vec![
            trace_from("plus", &powers, max_plus),
            trace_from("minus", &powers, max_minus),
        ],
    ))
}

/// Partial log-sums Σ_{j=1..n} ln w(base + j) for n = 1..=horizon, the one
/// accumulation both unilateral evaluators are built on.
fn running_log_sums(w: &WeightSequence, base: i64, horizon: u64) -> Vec<f64> {
    let mut sums = Vec::with_capacity(horizon as usize);
    let mut sum = 0.0_f64;
    for j in 1..=horizon as i64 {
        sum += w.ln_raw(base + j);
        sums.push(sum);
    }
    sums
}

/// Exact supremum of the running log-sums above `base`, when the rule's
/// eventually-periodic tail with non-positive period sum proves one exists.
/// `None` means no structural bound is available (including genuinely
/// divergent products).
fn structural_running_sup(w: &WeightSequence, base: i64) -> Option<f64> {
    let tail = w.ray_tail(base + 1)?;
    let period = tail.period.max(1);
    let period_sum: f64 = (0..period)
        .map(|t| w.ln_raw(base + 1 + (tail.transient + t) as i64))
        .sum();
    if period_sum > 0.0 {
        return None;
    }
    // Adding a full period never increases the sum, so the sup over all n
    // is attained within the transient plus one period.
    let sums = running_log_sums(w, base, tail.transient + period);
    Some(sums.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn running_trace(powers_base: u64) -> Vec<u64> {
    (1..=powers_base).collect()
}

/// Blow-up condition for the unilateral backward shift: the running maximum
/// of the log-products above `m_i` must exceed the violate threshold
/// (blow-up is what the statement demands). A periodic tail with
/// non-positive period sum proves the products bounded and decides
/// Violated outright; a missing invariant power leaves the hypothesis
/// unmet and the result Inconclusive.
pub fn unilateral_limsup(
    op: &OperatorSpec,
    set: &IndexSet,
    m_i: i64,
    horizon: u64,
    th: &CriterionThresholds,
) -> Result<Verdict, Error> {
    op.expect_kind(OperatorKind::UnilateralBackward)?;
    require_usable(op, set)?;
    require_member(set, m_i)?;
    if horizon == 0 {
        return Err(Error::Empty {
            what: "power horizon",
        });
    }
    let schedule_ok = !admissible_powers(op, set, horizon)?.is_empty();
    let sums = running_log_sums(op.weights(), m_i, horizon);
    let powers = running_trace(horizon);
    let structural_sup = structural_running_sup(op.weights(), m_i);
    Ok(Verdict::decide(
        DecisionRule::RunningMax {
            violate_log: th.violate_log(),
            structural_sup,
            schedule_ok,
        },
        vec![trace_from("running", &powers, sums)],
    ))
}

/// Blow-up condition for a direct sum of unilateral backward shifts: the
/// pointwise *min* of the two running log-sums must blow up. Bounding
/// either component bounds the min, so a structural bound on one side
/// already decides Violated.
pub fn direct_sum_unilateral(
    ds: &DirectSumSpec,
    m_i: i64,
    h_p: i64,
    horizon: u64,
    th: &CriterionThresholds,
) -> Result<Verdict, Error> {
    ds.left().expect_kind(OperatorKind::UnilateralBackward)?;
    ds.right().expect_kind(OperatorKind::UnilateralBackward)?;
    require_usable(ds.left(), ds.left_space())?;
    require_usable(ds.right(), ds.right_space())?;
    require_member(ds.left_space(), m_i)?;
    require_member(ds.right_space(), h_p)?;
    if horizon == 0 {
        return Err(Error::Empty {
            what: "power horizon",
        });
    }
    let mut schedule_ok = false;
    for n in 1..=horizon {
        if is_power_invariant(ds.left(), ds.left_space(), n)?
            && is_power_invariant(ds.right(), ds.right_space(), n)?
        {
            schedule_ok = true;
            break;
        }
    }
    let left_sums = running_log_sums(ds.left().weights(), m_i, horizon);
    let right_sums = running_log_sums(ds.right().weights(), h_p, horizon);
    let min_sums = left_sums
        .iter()
        .zip(&right_sums)
        .map(|(&a, &b)| a.min(b))
        .collect();
    // min(s_L, s_R) <= either structural sup, so the tighter available
    // one is an exact upper bound (not necessarily attained).
    let structural_sup = match (
        structural_running_sup(ds.left().weights(), m_i),
        structural_running_sup(ds.right().weights(), h_p),
    ) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (one, other) => one.or(other),
    };
    let powers = running_trace(horizon);
    Ok(Verdict::decide(
        DecisionRule::RunningMax {
            violate_log: th.violate_log(),
            structural_sup,
            schedule_ok,
        },
        vec![trace_from("running", &powers, min_sums)],
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma35Entry {
    pub index: i64,
    /// Sum of |ln w| over the index gap between this index's products and
    /// the base index's products, maximized over the checked powers.
    pub distortion_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma35Report {
    pub base_index: i64,
    /// True when the base trace never fell below the tolerance, so the
    /// implication was never put to the test.
    pub vacuous: bool,
    pub entries: Vec<Lemma35Entry>,
    pub all_pass: bool,
}

/// The index range whose weights make up opⁿ e_base.
fn product_range(op: &OperatorSpec, base: i64, n: u64) -> (i64, i64) {
    if op.kind().is_forward() {
        (base, base + n as i64 - 1)
    } else {
        (base - n as i64 + 1, base)
    }
}

/// Σ |ln w| over the symmetric difference of the two product ranges at
/// power `n`: the exact log-distortion between the two traces.
fn gap_bound(op: &OperatorSpec, base: i64, other: i64, n: u64) -> f64 {
    let (lo_a, hi_a) = product_range(op, base, n);
    let (lo_b, hi_b) = product_range(op, other, n);
    let w = op.weights();
    let head: f64 = (lo_a.min(lo_b)..lo_a.max(lo_b))
        .map(|j| w.ln_raw(j).abs())
        .sum();
    let tail: f64 = (hi_a.min(hi_b) + 1..=hi_a.max(hi_b))
        .map(|j| w.ln_raw(j).abs())
        .sum();
    head + tail
}

/// Decay propagation probe: once the products at the base index fall below
/// `tol` over the final window, the products at every other listed index
/// must fall below `tol` shifted by the distortion bound for that index.
/// The shift is exact, so this can only fail if the premise itself is
/// misread -- the probe is a verification harness, not a conjecture test.
pub fn lemma35_probe(
    op: &OperatorSpec,
    set: &IndexSet,
    sched: &PowerSchedule,
    m_i: i64,
    others: &[i64],
    tol: f64,
) -> Result<Lemma35Report, Error> {
    require_usable(op, set)?;
    require_member(set, m_i)?;
    for &m_r in others {
        require_member(set, m_r)?;
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::BadTolerance(tol));
    }
    let powers = sched.powers();
    require_admissible(op, set, &powers)?;

    let last_power = *powers.last().expect("schedules are never empty") as i64;
    let reach = others
        .iter()
        .chain(std::iter::once(&m_i))
        .map(|&m| m.abs())
        .max()
        .unwrap_or(0)
        + last_power
        + 1;
    let bounds = invertibility_report(op, reach);
    if !bounds.invertible {
        return Err(Error::NotInvertible {
            inf: bounds.lower,
            sup: bounds.upper,
        });
    }

    // Log product of opⁿ e_m; None encodes an exactly-zero image, which is
    // below any tolerance.
    let log_at = |m: i64, n: u64| -> Result<Option<f64>, Error> {
        Ok(match power_product(op, m, n)? {
            PowerCoefficient::Annihilated => None,
            PowerCoefficient::Log(lm) => Some(lm.log()),
        })
    };
    let below = |value: Option<f64>, threshold: f64| value.is_none_or(|v| v < threshold);

    let tol_log = tol.ln();
    let window_start = powers.len().saturating_sub(default_window());
    let window = &powers[window_start..];
    let mut vacuous = false;
    for &n in window {
        if !below(log_at(m_i, n)?, tol_log) {
            vacuous = true;
            break;
        }
    }

    let mut entries = Vec::new();
    for &m_r in others {
        let distortion_bound = window
            .iter()
            .map(|&n| gap_bound(op, m_i, m_r, n))
            .fold(0.0_f64, f64::max);
        let mut pass = true;
        if !vacuous {
            for &n in window {
                if !below(log_at(m_r, n)?, tol_log + distortion_bound) {
                    pass = false;
                    break;
                }
            }
        }
        entries.push(Lemma35Entry {
            index: m_r,
            distortion_bound,
            pass,
        });
    }
    let all_pass = entries.iter().all(|e| e.pass);
    Ok(Lemma35Report {
        base_index: m_i,
        vacuous,
        entries,
        all_pass,
    })
}
