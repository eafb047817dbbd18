//! The shift actions themselves: single application, n-th power coefficients
//! in the log domain, right inverses, adjoints, and the direct-sum action.
//!
//! No weight product is ever formed by multiplying raw values; products live
//! as sums of natural logs inside [`LogMagnitude`]. The unilateral backward
//! shift annihilating a basis vector is a distinguished outcome, not a log of
//! zero, so callers are forced to treat "the product collapsed" differently
//! from "the product is tiny".

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::operator::{DirectSumSpec, OperatorKind, OperatorSpec};
use crate::vector::{Component, SparseVector};
use crate::weights::Domain;

/// A positive magnitude stored as its natural log.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogMagnitude(pub f64);

impl LogMagnitude {
    pub fn from_value(value: f64) -> Self {
        LogMagnitude(value.ln())
    }

    pub fn log(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn recip(self) -> Self {
        LogMagnitude(-self.0)
    }
}

/// Product of magnitudes is addition of logs.
impl Mul for LogMagnitude {
    type Output = LogMagnitude;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: LogMagnitude) -> LogMagnitude {
        LogMagnitude(self.0 + rhs.0)
    }
}

/// Coefficient produced by an n-th shift power on a basis vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PowerCoefficient {
    /// The unilateral backward shift ran off the end of the domain.
    Annihilated,
    Log(LogMagnitude),
}

impl PowerCoefficient {
    pub fn log(self) -> Option<f64> {
        match self {
            PowerCoefficient::Annihilated => None,
            PowerCoefficient::Log(lm) => Some(lm.log()),
        }
    }
}

fn check_unilateral_index(op: &OperatorSpec, m: i64) -> Result<(), Error> {
    if op.domain() == Domain::Unilateral && m < 0 {
        return Err(Error::IndexOutsideDomain { index: m });
    }
    Ok(())
}

/// Where T^n sends e_m (meaningful even for an annihilated coefficient).
pub fn power_landing(op: &OperatorSpec, m: i64, n: u64) -> i64 {
    if op.kind().is_forward() {
        m + n as i64
    } else {
        m - n as i64
    }
}

/// Log coefficient of T^n e_m. For forward shifts this is
/// sum of ln w_j over j in [m, m+n), for backward shifts over (m-n, m].
pub fn power_product(op: &OperatorSpec, m: i64, n: u64) -> Result<PowerCoefficient, Error> {
    if n == 0 {
        return Err(Error::ZeroPower);
    }
    check_unilateral_index(op, m)?;
    let w = op.weights();
    let n_i = n as i64;
    let log = match op.kind() {
        OperatorKind::BilateralForward | OperatorKind::UnilateralForward => {
            (m..m + n_i).map(|j| w.ln_raw(j)).sum::<f64>()
        }
        OperatorKind::BilateralBackward => (m - n_i + 1..=m).map(|j| w.ln_raw(j)).sum::<f64>(),
        OperatorKind::UnilateralBackward => {
            if m < n_i {
                return Ok(PowerCoefficient::Annihilated);
            }
            (m - n_i + 1..=m).map(|j| w.ln_raw(j)).sum::<f64>()
        }
    };
    Ok(PowerCoefficient::Log(LogMagnitude(log)))
}

/// Where S^n sends e_m, for S the canonical right inverse of the operator.
pub fn right_inverse_landing(op: &OperatorSpec, m: i64, n: u64) -> i64 {
    if op.kind().is_forward() {
        m - n as i64
    } else {
        m + n as i64
    }
}

/// Log coefficient of S^n e_m, where T S = identity: S steps against the
/// shift direction, dividing by the weights the shift will multiply back.
pub fn right_inverse_power(op: &OperatorSpec, m: i64, n: u64) -> Result<LogMagnitude, Error> {
    if n == 0 {
        return Err(Error::ZeroPower);
    }
    check_unilateral_index(op, m)?;
    let w = op.weights();
    let n_i = n as i64;
    let log = match op.kind() {
        OperatorKind::BilateralForward => -(m - n_i..m).map(|j| w.ln_raw(j)).sum::<f64>(),
        OperatorKind::UnilateralForward => {
            if m - n_i < 0 {
                return Err(Error::NoRightInverse { m, n });
            }
            -(m - n_i..m).map(|j| w.ln_raw(j)).sum::<f64>()
        }
        OperatorKind::BilateralBackward | OperatorKind::UnilateralBackward => {
            -(m + 1..=m + n_i).map(|j| w.ln_raw(j)).sum::<f64>()
        }
    };
    Ok(LogMagnitude(log))
}

/// One application of the shift to one (index, coefficient) entry.
/// `None` means the entry was annihilated.
fn shift_entry(op: &OperatorSpec, r: i64, c: f64) -> Result<Option<(i64, f64)>, Error> {
    check_unilateral_index(op, r)?;
    let w = op.weights();
    Ok(match op.kind() {
        OperatorKind::BilateralForward | OperatorKind::UnilateralForward => {
            Some((r + 1, c * w.raw(r)))
        }
        OperatorKind::BilateralBackward => Some((r - 1, c * w.raw(r))),
        OperatorKind::UnilateralBackward => {
            if r == 0 {
                None
            } else {
                Some((r - 1, c * w.raw(r)))
            }
        }
    })
}

/// Applies the shift once to a plain (untagged) vector.
pub fn apply(op: &OperatorSpec, v: &SparseVector) -> Result<SparseVector, Error> {
    let mut out = SparseVector::zero();
    for ((part, r), c) in v.iter() {
        if part != Component::Single {
            return Err(Error::ComponentMismatch {
                expected: "single",
                found: part.name(),
            });
        }
        if let Some((idx, coef)) = shift_entry(op, r, c)? {
            out.add_to((Component::Single, idx), coef);
        }
    }
    Ok(out)
}

/// Applies `(T1 (+) T2)` once to a tagged vector.
pub fn apply_direct_sum(ds: &DirectSumSpec, v: &SparseVector) -> Result<SparseVector, Error> {
    let mut out = SparseVector::zero();
    for ((part, r), c) in v.iter() {
        let op = match part {
            Component::Left => ds.left(),
            Component::Right => ds.right(),
            Component::Single => {
                return Err(Error::ComponentMismatch {
                    expected: "left or right",
                    found: part.name(),
                })
            }
        };
        if let Some((idx, coef)) = shift_entry(op, r, c)? {
            out.add_to((part, idx), coef);
        }
    }
    Ok(out)
}

/// T^n applied exactly, entry by entry, through the log-domain coefficients.
pub fn apply_power(op: &OperatorSpec, v: &SparseVector, n: u64) -> Result<SparseVector, Error> {
    let mut out = SparseVector::zero();
    for ((part, r), c) in v.iter() {
        if part != Component::Single {
            return Err(Error::ComponentMismatch {
                expected: "single",
                found: part.name(),
            });
        }
        match power_product(op, r, n)? {
            PowerCoefficient::Annihilated => {}
            PowerCoefficient::Log(lm) => {
                out.add_to((Component::Single, power_landing(op, r, n)), c * lm.value());
            }
        }
    }
    Ok(out)
}

/// S^n applied exactly, entry by entry.
pub fn right_inverse_apply(
    op: &OperatorSpec,
    v: &SparseVector,
    n: u64,
) -> Result<SparseVector, Error> {
    let mut out = SparseVector::zero();
    for ((part, r), c) in v.iter() {
        if part != Component::Single {
            return Err(Error::ComponentMismatch {
                expected: "single",
                found: part.name(),
            });
        }
        let lm = right_inverse_power(op, r, n)?;
        out.add_to(
            (Component::Single, right_inverse_landing(op, r, n)),
            c * lm.value(),
        );
    }
    Ok(out)
}

/// The Hilbert-space adjoint, expressed back in shift form: direction flips
/// and the weight index shifts by one, so that `<T e_r, e_s> == <e_r, T* e_s>`
/// holds as computed values, not merely up to rounding.
pub fn adjoint(op: &OperatorSpec) -> OperatorSpec {
    let (kind, weights) = match op.kind() {
        OperatorKind::BilateralForward => (
            OperatorKind::BilateralBackward,
            op.weights().clone().reindexed(1),
        ),
        OperatorKind::BilateralBackward => (
            OperatorKind::BilateralForward,
            op.weights().clone().reindexed(-1),
        ),
        OperatorKind::UnilateralForward => (
            OperatorKind::UnilateralBackward,
            op.weights().clone().reindexed(1),
        ),
        OperatorKind::UnilateralBackward => (
            OperatorKind::UnilateralForward,
            op.weights().clone().reindexed(-1),
        ),
    };
    OperatorSpec::new(kind, weights).expect("adjoint preserves the domain")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{WeightRule, WeightSequence};
    use approx::assert_abs_diff_eq;

    fn op(kind: OperatorKind, rule: WeightRule) -> OperatorSpec {
        let w = WeightSequence::new(rule, kind.domain()).unwrap();
        OperatorSpec::new(kind, w).unwrap()
    }

    fn step_forward() -> OperatorSpec {
        op(
            OperatorKind::BilateralForward,
            WeightRule::Step { pos: 0.5, neg: 2.0 },
        )
    }

    #[test]
    fn forward_application_moves_up_one() {
        let t = op(
            OperatorKind::BilateralForward,
            WeightRule::Constant { value: 2.0 },
        );
        let image = apply(&t, &SparseVector::unit(0)).unwrap();
        assert_eq!(image, SparseVector::unit(1).scale(2.0));
    }

    #[test]
    fn unilateral_backward_annihilates_the_origin() {
        let b = op(
            OperatorKind::UnilateralBackward,
            WeightRule::Constant { value: 2.0 },
        );
        assert!(apply(&b, &SparseVector::unit(0)).unwrap().is_zero());
        let image = apply(&b, &SparseVector::unit(3)).unwrap();
        assert_eq!(image, SparseVector::unit(2).scale(2.0));
    }

    #[test]
    fn application_respects_each_entry_weight() {
        let t = step_forward();
        let v = SparseVector::unit(-1).add(&SparseVector::unit(0));
        let image = apply(&t, &v).unwrap();
        assert_eq!(image.get((Component::Single, 0)), 2.0);
        assert_eq!(image.get((Component::Single, 1)), 0.5);
    }

    /// Direct-product oracle: multiply the raw weights one by one.
    fn oracle_product(op: &OperatorSpec, indices: impl Iterator<Item = i64>) -> f64 {
        indices
            .map(|j| op.weights().weight_at(j).unwrap())
            .product()
    }

    #[test]
    fn power_product_matches_direct_products() {
        let c2 = op(
            OperatorKind::BilateralForward,
            WeightRule::Constant { value: 2.0 },
        );
        let coef = power_product(&c2, 0, 3).unwrap().log().unwrap();
        assert_abs_diff_eq!(coef, 8.0_f64.ln(), epsilon = 1e-12);

        // Step weights cancel exactly over a window straddling zero.
        let coef = power_product(&step_forward(), -2, 4).unwrap().log().unwrap();
        assert_abs_diff_eq!(coef, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            coef,
            oracle_product(&step_forward(), -2..2).ln(),
            epsilon = 1e-12
        );

        let periodic = op(
            OperatorKind::BilateralForward,
            WeightRule::Periodic {
                values: vec![1.0, 2.0, 3.0],
            },
        );
        let coef = power_product(&periodic, 1, 3).unwrap().log().unwrap();
        assert_abs_diff_eq!(coef, 6.0_f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(coef, oracle_product(&periodic, 1..4).ln(), epsilon = 1e-12);
    }

    #[test]
    fn backward_powers_collapse_short_vectors() {
        let b = op(
            OperatorKind::UnilateralBackward,
            WeightRule::Constant { value: 2.0 },
        );
        assert_eq!(
            power_product(&b, 1, 2).unwrap(),
            PowerCoefficient::Annihilated
        );
        // At m == n the product just barely survives, landing on e_0.
        let coef = power_product(&b, 2, 2).unwrap().log().unwrap();
        assert_abs_diff_eq!(coef, 4.0_f64.ln(), epsilon = 1e-12);
        assert_eq!(power_landing(&b, 2, 2), 0);
    }

    #[test]
    fn right_inverse_steps_against_the_shift() {
        let c2 = op(
            OperatorKind::BilateralForward,
            WeightRule::Constant { value: 2.0 },
        );
        assert_abs_diff_eq!(
            right_inverse_power(&c2, 0, 2).unwrap().log(),
            0.25_f64.ln(),
            epsilon = 1e-12
        );
        // S^3 e_0 for the step weights divides by w_{-3} w_{-2} w_{-1} = 8.
        assert_abs_diff_eq!(
            right_inverse_power(&step_forward(), 0, 3).unwrap().log(),
            -3.0 * 2.0_f64.ln(),
            epsilon = 1e-12
        );

        let uf = op(
            OperatorKind::UnilateralForward,
            WeightRule::Constant { value: 2.0 },
        );
        assert!(matches!(
            right_inverse_power(&uf, 2, 3),
            Err(Error::NoRightInverse { m: 2, n: 3 })
        ));
    }

    #[test]
    fn shift_after_right_inverse_is_identity() {
        for kind in [
            OperatorKind::BilateralForward,
            OperatorKind::BilateralBackward,
            OperatorKind::UnilateralBackward,
        ] {
            let t = op(kind, WeightRule::Periodic {
                values: vec![0.7, 1.3, 2.9],
            });
            let v = SparseVector::unit(5).scale(1.5).add(&SparseVector::unit(8));
            let s_v = right_inverse_apply(&t, &v, 4).unwrap();
            let mut round_trip = s_v;
            for _ in 0..4 {
                round_trip = apply(&t, &round_trip).unwrap();
            }
            assert!(
                round_trip.distance(&v) < 1e-12,
                "kind {kind:?}: got {round_trip:?}"
            );
        }
    }

    #[test]
    fn adjoint_of_doubling_backward_is_doubling_forward() {
        let b2 = op(
            OperatorKind::UnilateralBackward,
            WeightRule::Constant { value: 2.0 },
        );
        let f2 = adjoint(&b2);
        assert_eq!(f2.kind(), OperatorKind::UnilateralForward);
        for n in 0..200 {
            assert_eq!(f2.weights().weight_at(n).unwrap(), 2.0);
        }
    }

    #[test]
    fn adjoint_is_an_involution_extensionally() {
        let t = step_forward();
        let back = adjoint(&adjoint(&t));
        assert_eq!(back.kind(), t.kind());
        for n in -500..500 {
            assert_eq!(
                back.weights().weight_at(n).unwrap(),
                t.weights().weight_at(n).unwrap()
            );
        }
    }

    #[test]
    fn adjoint_matches_inner_products_exactly() {
        let pairs = vec![
            op(
                OperatorKind::BilateralForward,
                WeightRule::Periodic {
                    values: vec![0.7, 1.3],
                },
            ),
            op(
                OperatorKind::BilateralBackward,
                WeightRule::Step { pos: 0.5, neg: 2.0 },
            ),
            op(
                OperatorKind::UnilateralForward,
                WeightRule::Periodic {
                    values: vec![2.0, 3.0, 0.4],
                },
            ),
            op(
                OperatorKind::UnilateralBackward,
                WeightRule::Constant { value: 2.0 },
            ),
        ];
        for t in pairs {
            let t_star = adjoint(&t);
            let lo = if t.domain() == Domain::Unilateral { 0 } else { -20 };
            for r in lo..20 {
                for s in lo..20 {
                    let lhs = apply(&t, &SparseVector::unit(r))
                        .unwrap()
                        .dot(&SparseVector::unit(s));
                    let rhs = apply(&t_star, &SparseVector::unit(s))
                        .unwrap()
                        .dot(&SparseVector::unit(r));
                    assert_eq!(lhs, rhs, "kind {:?}, r={r}, s={s}", t.kind());
                }
            }
        }
    }

    #[test]
    fn direct_sum_acts_componentwise() {
        use crate::index_set::IndexSet;
        let left = op(
            OperatorKind::BilateralForward,
            WeightRule::Constant { value: 2.0 },
        );
        let right = op(
            OperatorKind::BilateralForward,
            WeightRule::Constant { value: 3.0 },
        );
        let space = IndexSet::full(Domain::Bilateral);
        let ds = DirectSumSpec::new(left, right, space.clone(), space).unwrap();

        let v = SparseVector::tagged_unit(Component::Left, 0)
            .add(&SparseVector::tagged_unit(Component::Right, 1));
        let image = apply_direct_sum(&ds, &v).unwrap();
        assert_eq!(image.get((Component::Left, 1)), 2.0);
        assert_eq!(image.get((Component::Right, 2)), 3.0);

        // Norm adds in quadrature across components.
        assert_abs_diff_eq!(image.norm(), 13.0_f64.sqrt(), epsilon = 1e-12);

        assert!(matches!(
            apply_direct_sum(&ds, &SparseVector::unit(0)),
            Err(Error::ComponentMismatch { .. })
        ));
        assert!(matches!(
            apply(&op(OperatorKind::BilateralForward, WeightRule::Constant { value: 1.0 }), &v),
            Err(Error::ComponentMismatch { .. })
        ));
    }

    #[test]
    fn log_magnitude_multiplies_by_adding_logs() {
        let a = LogMagnitude::from_value(8.0);
        let b = LogMagnitude::from_value(0.25);
        assert_abs_diff_eq!((a * b).value(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.recip().value(), 0.125, epsilon = 1e-12);
    }
}
