//! Operator descriptions. A shift is a direction (forward raises indices,
//! backward lowers them) plus a weight sequence on a matching domain; the
//! unilateral backward shift annihilates e_0. Direct sums pair two operators
//! with one subspace each.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::index_set::IndexSet;
use crate::weights::{Domain, WeightSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    /// T e_r = w_r e_{r+1} on the integers.
    BilateralForward,
    /// B e_n = w_n e_{n-1} on the integers.
    BilateralBackward,
    /// F e_n = w_n e_{n+1} on the naturals.
    UnilateralForward,
    /// B e_0 = 0, B e_n = w_n e_{n-1} on the naturals.
    UnilateralBackward,
}

impl OperatorKind {
    pub fn domain(self) -> Domain {
        match self {
            OperatorKind::BilateralForward | OperatorKind::BilateralBackward => Domain::Bilateral,
            OperatorKind::UnilateralForward | OperatorKind::UnilateralBackward => {
                Domain::Unilateral
            }
        }
    }

    pub fn is_forward(self) -> bool {
        matches!(
            self,
            OperatorKind::BilateralForward | OperatorKind::UnilateralForward
        )
    }

    pub(crate) fn name(self) -> &'static str {
        match self {
            OperatorKind::BilateralForward => "bilateral-forward",
            OperatorKind::BilateralBackward => "bilateral-backward",
            OperatorKind::UnilateralForward => "unilateral-forward",
            OperatorKind::UnilateralBackward => "unilateral-backward",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperatorSpec")]
pub struct OperatorSpec {
    kind: OperatorKind,
    weights: WeightSequence,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperatorSpec {
    kind: OperatorKind,
    weights: WeightSequence,
}

impl TryFrom<RawOperatorSpec> for OperatorSpec {
    type Error = Error;

    fn try_from(raw: RawOperatorSpec) -> Result<Self, Error> {
        OperatorSpec::new(raw.kind, raw.weights)
    }
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, weights: WeightSequence) -> Result<Self, Error> {
        if weights.domain() != kind.domain() {
            return Err(Error::LateralityMismatch {
                kind: kind.name(),
                expected: match kind.domain() {
                    Domain::Bilateral => "bilateral",
                    Domain::Unilateral => "unilateral",
                },
            });
        }
        Ok(OperatorSpec { kind, weights })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    pub fn domain(&self) -> Domain {
        self.kind.domain()
    }

    /// Errors unless the operator is exactly `expected`.
    pub(crate) fn expect_kind(&self, expected: OperatorKind) -> Result<(), Error> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(Error::WrongOperatorKind {
                expected: expected.name(),
                got: self.kind.name(),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDirectSumSpec")]
pub struct DirectSumSpec {
    left: OperatorSpec,
    right: OperatorSpec,
    left_space: IndexSet,
    right_space: IndexSet,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDirectSumSpec {
    left: OperatorSpec,
    right: OperatorSpec,
    left_space: IndexSet,
    right_space: IndexSet,
}

impl TryFrom<RawDirectSumSpec> for DirectSumSpec {
    type Error = Error;

    fn try_from(raw: RawDirectSumSpec) -> Result<Self, Error> {
        DirectSumSpec::new(raw.left, raw.right, raw.left_space, raw.right_space)
    }
}

impl DirectSumSpec {
    pub fn new(
        left: OperatorSpec,
        right: OperatorSpec,
        left_space: IndexSet,
        right_space: IndexSet,
    ) -> Result<Self, Error> {
        if left.domain() != left_space.domain() || right.domain() != right_space.domain() {
            return Err(Error::DomainMismatch);
        }
        Ok(DirectSumSpec {
            left,
            right,
            left_space,
            right_space,
        })
    }

    pub fn left(&self) -> &OperatorSpec {
        &self.left
    }

    pub fn right(&self) -> &OperatorSpec {
        &self.right
    }

    pub fn left_space(&self) -> &IndexSet {
        &self.left_space
    }

    pub fn right_space(&self) -> &IndexSet {
        &self.right_space
    }
}
