//! Constructive and empirical orbit experiments.
//!
//! [`build_criterion_vector`] assembles a candidate vector whose orbit
//! visits a list of targets, following the constructive recipe: place
//! right-inverse images of the targets at well-separated powers, with
//! budgets tight enough that every cross term stays small. The bound it
//! reports is then validated — not assumed — by [`density_experiment`],
//! which runs the actual orbit in a truncated window and measures
//! distances. [`transitivity_probe`] and [`perp_question_probe`] are
//! exploratory: they search finite grids and report evidence only.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::criteria::{backward_condition, eq65_forward, unilateral_limsup, CriterionThresholds};
use crate::error::Error;
use crate::index_set::IndexSet;
use crate::invariance::{admissible_powers, perp};
use crate::operator::{OperatorKind, OperatorSpec};
use crate::schedule::PowerSchedule;
use crate::shift_ops::{adjoint, apply, apply_power, right_inverse_apply};
use crate::vector::{Component, SparseVector};
use crate::verdict::Verdict;
use crate::weights::Domain;

/// Coefficients this small outside the subspace are treated as rounding
/// residue, not genuine support. Shifts permute supports exactly, so in
/// practice the slack is never consumed.
const SUPPORT_TOLERANCE: f64 = 1e-12;

/// A finite index window standing in for the full sequence space during
/// simulation. Mass shifted past an edge is tallied, never silently lost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow", deny_unknown_fields)]
pub struct TruncationWindow {
    lo: i64,
    hi: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    lo: i64,
    hi: i64,
}

impl TryFrom<RawWindow> for TruncationWindow {
    type Error = Error;
    fn try_from(raw: RawWindow) -> Result<Self, Error> {
        TruncationWindow::new(raw.lo, raw.hi)
    }
}

impl TruncationWindow {
    /// A window must straddle the origin so every residue class meets it.
    pub fn new(lo: i64, hi: i64) -> Result<Self, Error> {
        if lo <= 0 && 0 <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::BadWindow { lo, hi })
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn contains(&self, index: i64) -> bool {
        self.lo <= index && index <= self.hi
    }

    /// Half-lattice simulations must not pretend to have negative slots.
    fn check_domain(&self, domain: Domain) -> Result<(), Error> {
        if domain == Domain::Unilateral && self.lo != 0 {
            return Err(Error::BadWindow {
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(())
    }
}

/// Output of the constructive recipe: the vector, where each target was
/// placed along the schedule, and the worst-case distance between an
/// orbit point and its target accounted from the cross terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionVector {
    pub vector: SparseVector,
    pub placements: Vec<u64>,
    pub tail_bound: f64,
}

fn check_epsilon(epsilon: f64) -> Result<(), Error> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::BadEpsilon(epsilon));
    }
    Ok(())
}

fn check_targets_in(set: &IndexSet, targets: &[SparseVector]) -> Result<(), Error> {
    for (j, target) in targets.iter().enumerate() {
        for ((component, index), _) in target.iter() {
            if component != Component::Single {
                return Err(Error::ComponentMismatch {
                    expected: "single",
                    found: component.name(),
                });
            }
            if !set.is_member(index) {
                return Err(Error::BadTarget { target: j });
            }
        }
    }
    Ok(())
}

/// Evaluates whichever decay condition matches the operator's kind, at the
/// subspace's canonical base point. The constructive recipe is only valid
/// under a satisfied condition, so anything else is a refusal.
fn condition_precheck(
    op: &OperatorSpec,
    set: &IndexSet,
    sched: &PowerSchedule,
) -> Result<(), Error> {
    let base = set.canonical_member().ok_or(Error::DegenerateSubspace)?;
    let th = CriterionThresholds::default();
    let verdict = match op.kind() {
        OperatorKind::BilateralForward => eq65_forward(op, set, base, sched, &th)?,
        OperatorKind::BilateralBackward => backward_condition(op, set, base, sched, &th)?,
        _ => unilateral_limsup(op, set, base, sched.last_power(), &th)?,
    };
    if !verdict.is_satisfied() {
        return Err(Error::ConditionNotSatisfied {
            verdict: Box::new(verdict),
        });
    }
    Ok(())
}

/// Builds x = Σ_j S^{n_j} y_j greedily along the schedule.
///
/// Target j gets the budget ε·2^{-(j+1)}; a power n is accepted once the
/// new piece S^n y_j, its images under the earlier gaps S^{n-n_i} y_j, and
/// the earlier targets' forward images T^{n-n_i} y_i all fit under that
/// budget. The reported tail bound sums, for each j, every cross term that
/// survives in T^{n_j} x - y_j, and the geometric budgets keep the total
/// at or below ε.
pub fn build_criterion_vector(
    op: &OperatorSpec,
    set: &IndexSet,
    targets: &[SparseVector],
    epsilon: f64,
    sched: &PowerSchedule,
) -> Result<CriterionVector, Error> {
    check_epsilon(epsilon)?;
    check_targets_in(set, targets)?;
    condition_precheck(op, set, sched)?;

    let mut placements: Vec<u64> = Vec::with_capacity(targets.len());
    for (j, target) in targets.iter().enumerate() {
        let budget = epsilon * 0.5_f64.powi(j as i32 + 1);
        let mut chosen = None;
        'candidates: for n in sched.powers() {
            if placements.last().is_some_and(|&last| n <= last) {
                continue;
            }
            if right_inverse_apply(op, target, n)?.norm() > budget {
                continue;
            }
            for (i, &n_i) in placements.iter().enumerate() {
                if right_inverse_apply(op, target, n - n_i)?.norm() > budget {
                    continue 'candidates;
                }
                if apply_power(op, &targets[i], n - n_i)?.norm() > budget {
                    continue 'candidates;
                }
            }
            chosen = Some(n);
            break;
        }
        placements.push(chosen.ok_or(Error::ScheduleExhausted { target: j })?);
    }

    let mut vector = SparseVector::zero();
    for (j, target) in targets.iter().enumerate() {
        vector = vector.add(&right_inverse_apply(op, target, placements[j])?);
    }

    // T^{n_j} x = y_j + Σ_{l<j} T^{n_j-n_l} y_l + Σ_{l>j} S^{n_l-n_j} y_l,
    // so the worst distance to any target is the largest cross-term sum.
    let mut tail_bound: f64 = 0.0;
    for j in 0..targets.len() {
        let mut cross = 0.0;
        for (l, target) in targets.iter().enumerate() {
            if l < j {
                cross += apply_power(op, target, placements[j] - placements[l])?.norm();
            } else if l > j {
                cross += right_inverse_apply(op, target, placements[l] - placements[j])?.norm();
            }
        }
        tail_bound = tail_bound.max(cross);
    }

    Ok(CriterionVector {
        vector,
        placements,
        tail_bound,
    })
}

/// Per-target outcome of a density run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetOutcome {
    /// Position of the target in the input grid.
    pub target: usize,
    pub hit: bool,
    pub first_hit_power: Option<u64>,
    /// Distance recorded at the first hit.
    pub achieved_distance: Option<f64>,
    /// Smallest distance seen at any sampled power, hit or not.
    pub best_distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub targets: Vec<TargetOutcome>,
    pub hit_rate: f64,
    pub leaked_norm_max: f64,
}

/// Runs the truncated orbit of `x` and reports how close it comes to each
/// grid target.
///
/// Distances are sampled only at powers that leave the subspace invariant
/// (starting from the smallest such n ≥ 1 — the power 0 self-hit is
/// excluded by convention), and a hit additionally requires the iterate's
/// support to lie in the subspace up to rounding residue. Mass leaving the
/// window accumulates into `leaked_norm_max`.
pub fn density_experiment(
    op: &OperatorSpec,
    set: &IndexSet,
    x: &SparseVector,
    grid: &[SparseVector],
    epsilon: f64,
    n_iter: u64,
    win: &TruncationWindow,
) -> Result<DensityReport, Error> {
    check_epsilon(epsilon)?;
    win.check_domain(op.domain())?;
    check_targets_in(set, grid)?;
    for ((component, index), _) in x.iter() {
        if component != Component::Single {
            return Err(Error::ComponentMismatch {
                expected: "single",
                found: component.name(),
            });
        }
        if !win.contains(index) {
            return Err(Error::SupportOutsideWindow { index });
        }
    }
    for target in grid {
        for ((_, index), _) in target.iter() {
            if !win.contains(index) {
                return Err(Error::SupportOutsideWindow { index });
            }
        }
    }

    let admissible = admissible_powers(op, set, n_iter)?;
    let mut outcomes: Vec<TargetOutcome> = (0..grid.len())
        .map(|t| TargetOutcome {
            target: t,
            hit: false,
            first_hit_power: None,
            achieved_distance: None,
            best_distance: None,
        })
        .collect();

    let mut v = x.clone();
    let mut leaked_sq = 0.0_f64;
    for n in 1..=n_iter {
        v = apply(op, &v)?;
        let mut kept = SparseVector::zero();
        for (key, coef) in v.iter() {
            if win.contains(key.1) {
                kept.add_to(key, coef);
            } else {
                leaked_sq += coef * coef;
            }
        }
        v = kept;

        if !admissible.contains(n) {
            continue;
        }
        let support_ok = v
            .iter()
            .all(|((_, m), coef)| set.is_member(m) || coef.abs() <= SUPPORT_TOLERANCE);
        for (t, target) in grid.iter().enumerate() {
            let d = v.distance(target);
            let outcome = &mut outcomes[t];
            if outcome.best_distance.is_none_or(|best| d < best) {
                outcome.best_distance = Some(d);
            }
            if !outcome.hit && support_ok && d < epsilon {
                outcome.hit = true;
                outcome.first_hit_power = Some(n);
                outcome.achieved_distance = Some(d);
            }
        }
    }

    let hit_rate = if grid.is_empty() {
        1.0
    } else {
        outcomes.iter().filter(|o| o.hit).count() as f64 / grid.len() as f64
    };
    Ok(DensityReport {
        targets: outcomes,
        hit_rate,
        leaked_norm_max: leaked_sq.sqrt(),
    })
}

/// Default target grid: ±e_m for the first `count` members of the set
/// inside the window, plus the normalized two-point combinations of each
/// consecutive pair. Small, but it spans every sampled direction.
pub fn default_target_grid(
    set: &IndexSet,
    win: &TruncationWindow,
    count: usize,
) -> Vec<SparseVector> {
    let members: Vec<i64> = set.enumerate(win.lo, win.hi).into_iter().take(count).collect();
    let mut grid = Vec::new();
    for &m in &members {
        grid.push(SparseVector::unit(m));
        grid.push(SparseVector::unit(m).scale(-1.0));
    }
    let half = 0.5_f64.sqrt();
    for pair in members.windows(2) {
        let combo = SparseVector::unit(pair[0]).add(&SparseVector::unit(pair[1]));
        grid.push(combo.scale(half));
        grid.push(combo.scale(-half));
    }
    grid
}

/// A point whose orbit passes from near one target to near another.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitivityWitness {
    pub z: SparseVector,
    pub power: u64,
    pub dist_x: f64,
    pub dist_y: f64,
}

/// Searches for z close to `x_target` with T^n z close to `y_target`.
///
/// Candidates follow the constructive proof shape z = a·x + S^n(b·y): the
/// scales a and b range over a five-point grid of the given resolution
/// around 1 (with b = 0 also tried), n runs along the schedule, and only
/// candidates supported inside the subspace are considered. A miss is a
/// statement about this grid, nothing more.
pub fn transitivity_probe(
    op: &OperatorSpec,
    set: &IndexSet,
    x_target: &SparseVector,
    y_target: &SparseVector,
    epsilon: f64,
    sched: &PowerSchedule,
    grid_resolution: f64,
) -> Result<Option<TransitivityWitness>, Error> {
    check_epsilon(epsilon)?;
    if !grid_resolution.is_finite() || grid_resolution <= 0.0 {
        return Err(Error::BadTolerance(grid_resolution));
    }
    check_targets_in(set, std::slice::from_ref(x_target))?;
    check_targets_in(set, std::slice::from_ref(y_target))
        .map_err(|_| Error::BadTarget { target: 1 })?;

    // Center-out order: the unperturbed candidate is tried first, so the
    // witness returned is the least-perturbed one that works.
    let scales: Vec<f64> = [0, 1, -1, 2, -2]
        .map(|s| 1.0 + f64::from(s) * grid_resolution)
        .to_vec();
    let mut pullback_scales = vec![0.0];
    pullback_scales.extend_from_slice(&scales);

    for n in sched.powers() {
        for &a in &scales {
            for &b in &pullback_scales {
                let mut z = x_target.scale(a);
                if b != 0.0 {
                    match right_inverse_apply(op, &y_target.scale(b), n) {
                        Ok(piece) => z = z.add(&piece),
                        Err(Error::NoRightInverse { .. }) => continue,
                        Err(e) => return Err(e),
                    }
                }
                if z.iter().any(|((_, m), _)| !set.is_member(m)) {
                    continue;
                }
                let dist_x = x_target.distance(&z);
                if dist_x >= epsilon {
                    continue;
                }
                let dist_y = apply_power(op, &z, n)?.distance(y_target);
                if dist_y < epsilon {
                    return Ok(Some(TransitivityWitness {
                        z,
                        power: n,
                        dist_x,
                        dist_y,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// How two residue-class sets sit relative to each other, decided on the
/// periodic residue parts only (membership corrections are visible in the
/// sets themselves and are not folded into the tag).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetRelation {
    Equal,
    /// The second set's classes are contained in the first complement's.
    Subset,
    Disjoint,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerpQuestionReport {
    /// Forward condition on (op, m1).
    pub forward: Verdict,
    /// Backward condition on (adjoint, m2).
    pub backward: Verdict,
    /// True when m1's complement has no residue classes left to test.
    pub perp_degenerate: bool,
    /// Backward condition on (adjoint, perp(m1)), when non-degenerate.
    pub perp_backward: Option<Verdict>,
    /// Relation of m2 to perp(m1), when non-degenerate.
    pub relation: Option<SetRelation>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn residue_relation(a: &IndexSet, b: &IndexSet) -> SetRelation {
    let pa = u64::from(a.modulus());
    let pb = u64::from(b.modulus());
    let l = pa / gcd(pa, pb) * pb;
    let expand = |set: &IndexSet, p: u64| -> BTreeSet<u64> {
        (0..l)
            .filter(|r| set.residues().contains(&((r % p) as u32)))
            .collect()
    };
    let in_a = expand(a, pa);
    let in_b = expand(b, pb);
    if in_a == in_b {
        SetRelation::Equal
    } else if in_a.is_subset(&in_b) {
        SetRelation::Subset
    } else if in_a.is_disjoint(&in_b) {
        SetRelation::Disjoint
    } else {
        SetRelation::Other
    }
}

/// Side-by-side evidence for the open question of how the second subspace
/// relates to the first one's complement. Three verdicts and a set
/// relation, no conclusion: the question is open and this is a probe.
pub fn perp_question_probe(
    op: &OperatorSpec,
    m1: &IndexSet,
    m2: &IndexSet,
    sched: &PowerSchedule,
    th: &CriterionThresholds,
) -> Result<PerpQuestionReport, Error> {
    let base1 = m1.canonical_member().ok_or(Error::DegenerateSubspace)?;
    let base2 = m2.canonical_member().ok_or(Error::DegenerateSubspace)?;
    let forward = eq65_forward(op, m1, base1, sched, th)?;
    let adj = adjoint(op);
    let backward = backward_condition(&adj, m2, base2, sched, th)?;

    let complement = perp(m1);
    if complement.is_degenerate() {
        return Ok(PerpQuestionReport {
            forward,
            backward,
            perp_degenerate: true,
            perp_backward: None,
            relation: None,
        });
    }
    let base_c = complement
        .canonical_member()
        .expect("non-degenerate residue sets have members");
    let perp_backward = backward_condition(&adj, &complement, base_c, sched, th)?;
    let relation = residue_relation(m2, &complement);
    Ok(PerpQuestionReport {
        forward,
        backward,
        perp_degenerate: false,
        perp_backward: Some(perp_backward),
        relation: Some(relation),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::herrero_construction;
    use crate::weights::{WeightRule, WeightSequence};
    use approx::assert_abs_diff_eq;

    fn step_forward() -> OperatorSpec {
        let w = WeightSequence::new(
            WeightRule::Step { pos: 0.5, neg: 2.0 },
            Domain::Bilateral,
        )
        .unwrap();
        OperatorSpec::new(OperatorKind::BilateralForward, w).unwrap()
    }

    fn evens() -> IndexSet {
        IndexSet::residue_class(2, 0, Domain::Bilateral).unwrap()
    }

    #[test]
    fn window_validation() {
        assert!(TruncationWindow::new(-8, 8).is_ok());
        assert!(TruncationWindow::new(0, 0).is_ok());
        assert!(matches!(
            TruncationWindow::new(2, 8),
            Err(Error::BadWindow { lo: 2, hi: 8 })
        ));
        assert!(matches!(
            TruncationWindow::new(-4, -1),
            Err(Error::BadWindow { .. })
        ));
        // Unilateral simulations must start the window at zero.
        let w = TruncationWindow::new(-4, 8).unwrap();
        assert!(w.check_domain(Domain::Unilateral).is_err());
        assert!(w.check_domain(Domain::Bilateral).is_ok());
    }

    #[test]
    fn single_target_placement_and_exact_return() {
        let op = step_forward();
        let sched = PowerSchedule::arithmetic(2, 16).unwrap();
        let built =
            build_criterion_vector(&op, &evens(), &[SparseVector::unit(0)], 0.1, &sched).unwrap();
        // First even power with 2^{-n} under the budget 0.05 is six.
        assert_eq!(built.placements, vec![6]);
        assert_eq!(built.tail_bound, 0.0);
        assert_abs_diff_eq!(
            built.vector.get((Component::Single, -6)),
            0.5_f64.powi(6),
            epsilon = 1e-15
        );
        // One target means no cross terms: the orbit returns exactly.
        let returned = apply_power(&op, &built.vector, 6).unwrap();
        assert!(returned.distance(&SparseVector::unit(0)) < 1e-12);
    }

    #[test]
    fn three_targets_space_out_and_bound_the_cross_terms() {
        let op = step_forward();
        let sched = PowerSchedule::arithmetic(2, 32).unwrap();
        let targets = [
            SparseVector::unit(0),
            SparseVector::unit(2),
            SparseVector::unit(0).scale(-1.0),
        ];
        let built = build_criterion_vector(&op, &evens(), &targets, 0.1, &sched).unwrap();
        assert_eq!(built.placements, vec![6, 16, 24]);
        // Worst cross-term sum is at the first target: the later pieces
        // pulled back by the gaps, 2^-6 + 2^-18.
        assert_abs_diff_eq!(
            built.tail_bound,
            0.5_f64.powi(6) + 0.5_f64.powi(18),
            epsilon = 1e-12
        );
        assert!(built.tail_bound <= 0.1);
        for (j, target) in targets.iter().enumerate() {
            let reached = apply_power(&op, &built.vector, built.placements[j]).unwrap();
            assert!(reached.distance(target) <= built.tail_bound + 1e-12);
        }
    }

    #[test]
    fn empty_targets_give_the_zero_vector() {
        let op = step_forward();
        let sched = PowerSchedule::arithmetic(2, 16).unwrap();
        let built = build_criterion_vector(&op, &evens(), &[], 0.1, &sched).unwrap();
        assert!(built.vector.is_zero());
        assert!(built.placements.is_empty());
        assert_eq!(built.tail_bound, 0.0);
    }

    #[test]
    fn unit_weights_are_refused_with_the_verdict_attached() {
        let w = WeightSequence::constant(1.0, Domain::Bilateral).unwrap();
        let op = OperatorSpec::new(OperatorKind::BilateralForward, w).unwrap();
        let sched = PowerSchedule::arithmetic(2, 8).unwrap();
        match build_criterion_vector(&op, &evens(), &[SparseVector::unit(0)], 0.1, &sched) {
            Err(Error::ConditionNotSatisfied { verdict }) => {
                assert!(!verdict.is_satisfied());
            }
            other => panic!("expected a refusal, got {other:?}"),
        }
    }

    #[test]
    fn short_schedules_and_foreign_targets_are_rejected() {
        let op = step_forward();
        // Ten points reach -20 ln 2, just enough to satisfy the condition,
        // but a budget of 5e-8 needs power 26 — off the end.
        let short = PowerSchedule::arithmetic(2, 10).unwrap();
        assert!(matches!(
            build_criterion_vector(&op, &evens(), &[SparseVector::unit(0)], 1e-7, &short),
            Err(Error::ScheduleExhausted { target: 0 })
        ));
        let sched = PowerSchedule::arithmetic(2, 16).unwrap();
        assert!(matches!(
            build_criterion_vector(&op, &evens(), &[SparseVector::unit(1)], 0.1, &sched),
            Err(Error::BadTarget { target: 0 })
        ));
        assert!(matches!(
            build_criterion_vector(&op, &evens(), &[], 0.0, &sched),
            Err(Error::BadEpsilon(_))
        ));
    }

    #[test]
    fn orbit_hits_the_target_the_vector_was_built_for() {
        let op = step_forward();
        let sched = PowerSchedule::arithmetic(2, 16).unwrap();
        let grid = [SparseVector::unit(0)];
        let built = build_criterion_vector(&op, &evens(), &grid, 0.1, &sched).unwrap();
        let win = TruncationWindow::new(-64, 64).unwrap();
        let report =
            density_experiment(&op, &evens(), &built.vector, &grid, 0.1, 100, &win).unwrap();
        assert_eq!(report.hit_rate, 1.0);
        assert_eq!(report.targets[0].first_hit_power, Some(6));
        assert!(report.targets[0].achieved_distance.unwrap() <= built.tail_bound + 1e-9);
        // The orbit keeps marching right and eventually dribbles a tiny
        // coefficient over the window edge; it is tallied, not dropped.
        assert!(report.leaked_norm_max > 0.0);
        assert!(report.leaked_norm_max < 1e-15);
    }

    #[test]
    fn power_zero_is_never_sampled() {
        let w = WeightSequence::constant(1.0, Domain::Bilateral).unwrap();
        let op = OperatorSpec::new(OperatorKind::BilateralForward, w).unwrap();
        let x = SparseVector::unit(0);
        let win = TruncationWindow::new(-64, 64).unwrap();
        // At power zero the orbit is exactly on the target; from the first
        // sampled power on, an isometry keeps distance √2 forever.
        let report =
            density_experiment(&op, &evens(), &x, std::slice::from_ref(&x), 0.5, 40, &win)
                .unwrap();
        assert_eq!(report.hit_rate, 0.0);
        assert!(report.targets[0].best_distance.unwrap() > 1.0);
    }

    #[test]
    fn half_lattice_forward_orbits_never_come_back() {
        let w = WeightSequence::constant(2.0, Domain::Unilateral).unwrap();
        let op = OperatorSpec::new(OperatorKind::UnilateralForward, w).unwrap();
        let set = IndexSet::residue_class(2, 0, Domain::Unilateral).unwrap();
        let win = TruncationWindow::new(0, 64).unwrap();
        let grid = [SparseVector::unit(0), SparseVector::unit(2)];
        let report =
            density_experiment(&op, &set, &SparseVector::unit(0), &grid, 0.5, 50, &win).unwrap();
        assert_eq!(report.hit_rate, 0.0);
        assert!(report.targets.iter().all(|t| !t.hit));
    }

    #[test]
    fn simulation_input_validation() {
        let op = step_forward();
        let win = TruncationWindow::new(-8, 8).unwrap();
        assert!(matches!(
            density_experiment(
                &op,
                &evens(),
                &SparseVector::unit(12),
                &[],
                0.1,
                10,
                &win
            ),
            Err(Error::SupportOutsideWindow { index: 12 })
        ));
        assert!(matches!(
            density_experiment(
                &op,
                &evens(),
                &SparseVector::unit(0),
                &[SparseVector::unit(-12)],
                0.1,
                10,
                &win
            ),
            Err(Error::SupportOutsideWindow { index: -12 })
        ));
    }

    #[test]
    fn default_grid_shape() {
        let win = TruncationWindow::new(-8, 8).unwrap();
        let grid = default_target_grid(&evens(), &win, 3);
        // Members -8, -6, -4: three ± singles and two ± pair combinations.
        assert_eq!(grid.len(), 10);
        assert_abs_diff_eq!(grid[0].norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(grid[6].norm(), 1.0, epsilon = 1e-12);
        assert_eq!(grid[6].support_len(), 2);
    }

    #[test]
    fn transitivity_witness_on_the_step_shift() {
        let op = step_forward();
        let sched = PowerSchedule::arithmetic(2, 16).unwrap();
        let e0 = SparseVector::unit(0);
        let found = transitivity_probe(&op, &evens(), &e0, &e0, 0.1, &sched, 0.05)
            .unwrap()
            .expect("witness exists");
        // First power where the pulled-back copy fits inside ε on both
        // ends: 2^{-4} = 0.0625 < 0.1.
        assert_eq!(found.power, 4);
        assert!(found.dist_x < 0.1 && found.dist_y < 0.1);
        assert_abs_diff_eq!(found.dist_x, 0.5_f64.powi(4), epsilon = 1e-12);

        // The hand-built witness z = e0 + S^6 e0 at power 6 also works.
        let z = e0.add(&right_inverse_apply(&op, &e0, 6).unwrap());
        assert!(e0.distance(&z) < 0.1);
        assert!(apply_power(&op, &z, 6).unwrap().distance(&e0) < 0.1);
    }

    #[test]
    fn transitivity_to_zero_needs_no_pullback_piece() {
        let op = step_forward();
        let sched = PowerSchedule::arithmetic(2, 16).unwrap();
        let found = transitivity_probe(
            &op,
            &evens(),
            &SparseVector::unit(0),
            &SparseVector::zero(),
            0.1,
            &sched,
            0.05,
        )
        .unwrap()
        .expect("forward decay alone suffices");
        assert_eq!(found.z, SparseVector::unit(0));
        assert_eq!(found.power, 4);
        assert_eq!(found.dist_x, 0.0);
    }

    #[test]
    fn isometric_weights_defeat_the_probe() {
        let w = WeightSequence::constant(1.0, Domain::Bilateral).unwrap();
        let op = OperatorSpec::new(OperatorKind::BilateralForward, w).unwrap();
        let sched = PowerSchedule::arithmetic(2, 16).unwrap();
        let found = transitivity_probe(
            &op,
            &evens(),
            &SparseVector::unit(0),
            &SparseVector::unit(0).scale(2.0),
            0.1,
            &sched,
            0.25,
        )
        .unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn perp_probe_on_the_constructed_witness() {
        let bundle = herrero_construction(0.5, 2.0, &[2, 4, 8, 16, 32], 2).unwrap();
        let report = perp_question_probe(
            &bundle.operator(),
            &bundle.m1,
            &bundle.m2,
            &bundle.sched_fwd,
            &CriterionThresholds::default(),
        )
        .unwrap();
        assert!(report.forward.is_satisfied());
        assert!(!report.perp_degenerate);
        assert!(report.perp_backward.is_some());
        // The second subspace was built as exactly the complement classes.
        assert_eq!(report.relation, Some(SetRelation::Equal));
    }

    #[test]
    fn perp_probe_relation_tags() {
        let op = step_forward();
        let sched = PowerSchedule::arithmetic(4, 5).unwrap();
        let th = CriterionThresholds::default();
        let m1 = IndexSet::residue_class(4, 0, Domain::Bilateral).unwrap();
        let cases = [
            (IndexSet::new(4, [1, 2, 3], Domain::Bilateral).unwrap(), SetRelation::Equal),
            (IndexSet::residue_class(4, 1, Domain::Bilateral).unwrap(), SetRelation::Subset),
            (IndexSet::residue_class(4, 0, Domain::Bilateral).unwrap(), SetRelation::Disjoint),
            (IndexSet::new(4, [0, 1], Domain::Bilateral).unwrap(), SetRelation::Other),
        ];
        for (m2, expected) in cases {
            let report = perp_question_probe(&op, &m1, &m2, &sched, &th).unwrap();
            assert_eq!(report.relation, Some(expected), "m2 = {m2:?}");
        }
    }

    #[test]
    fn perp_of_everything_is_flagged_degenerate() {
        let op = step_forward();
        let sched = PowerSchedule::arithmetic(2, 5).unwrap();
        let report = perp_question_probe(
            &op,
            &IndexSet::full(Domain::Bilateral),
            &evens(),
            &sched,
            &CriterionThresholds::default(),
        )
        .unwrap();
        assert!(report.perp_degenerate);
        assert!(report.perp_backward.is_none());
        assert!(report.relation.is_none());
    }
}
