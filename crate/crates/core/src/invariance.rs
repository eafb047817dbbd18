//! Deciding whether a shift power maps a residue-patterned subspace into
//! itself, enumerating the powers that do, and forming the orthogonal
//! complement of such a subspace.
//!
//! Everything here is exact integer arithmetic on residues and the finite
//! include/exclude corrections -- no sampling, no tolerance.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::index_set::IndexSet;
use crate::operator::{OperatorKind, OperatorSpec};

/// True iff T^n sends every basis vector of the subspace back into it.
///
/// The bulk of the subspace is a union of residue classes, and a shift power
/// translates classes by +-n, so the classes must translate onto themselves.
/// The finite corrections are then checked individually: every explicitly
/// included index must land on a member, and no member may land on an
/// explicitly excluded index. The unilateral backward shift annihilates
/// indices below n, and the zero vector lies in every subspace.
pub fn is_power_invariant(op: &OperatorSpec, set: &IndexSet, n: u64) -> Result<bool, Error> {
    if n == 0 {
        return Err(Error::ZeroPower);
    }
    if op.domain() != set.domain() {
        return Err(Error::DomainMismatch);
    }
    let delta = if op.kind().is_forward() {
        n as i64
    } else {
        -(n as i64)
    };
    if !set.residues_translate_onto_self(delta) {
        return Ok(false);
    }
    let annihilates = op.kind() == OperatorKind::UnilateralBackward;
    for &m in set.includes() {
        if annihilates && m < n as i64 {
            continue; // T^n e_m = 0, which is in the subspace.
        }
        if !set.is_member(m + delta) {
            return Ok(false);
        }
    }
    for &x in set.excludes() {
        // A member at x - delta would be carried onto the excluded index.
        if set.is_member(x - delta) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The invariant powers of one operator-subspace pair up to a horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissiblePowers {
    pub powers: Vec<u64>,
    /// Set when the powers are exactly the multiples of the smallest one,
    /// which is the common case and lets schedules be described compactly.
    pub stride: Option<u64>,
}

impl AdmissiblePowers {
    pub fn contains(&self, n: u64) -> bool {
        match self.stride {
            Some(s) => n >= s && n.is_multiple_of(s) && n <= *self.powers.last().unwrap_or(&0),
            None => self.powers.binary_search(&n).is_ok(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }
}

/// All powers in `1..=n_max` under which the subspace is invariant.
pub fn admissible_powers(
    op: &OperatorSpec,
    set: &IndexSet,
    n_max: u64,
) -> Result<AdmissiblePowers, Error> {
    let mut powers = Vec::new();
    for n in 1..=n_max {
        if is_power_invariant(op, set, n)? {
            powers.push(n);
        }
    }
    let stride = powers.first().copied().filter(|&s| {
        powers.len() as u64 == n_max / s && powers.iter().all(|&n| n % s == 0)
    });
    Ok(AdmissiblePowers { powers, stride })
}

/// The index set spanning the orthogonal complement of the subspace.
///
/// Residue classes complement within 0..p, and the two finite correction
/// lists swap roles. The complement of a full residue set is degenerate
/// (finitely many members at most); callers must check before feeding it
/// to a limit criterion.
pub fn perp(set: &IndexSet) -> IndexSet {
    let complement = (0..set.modulus())
        .filter(|r| !set.residues().contains(r))
        .collect();
    IndexSet::from_parts(
        set.modulus(),
        complement,
        set.domain(),
        set.excludes().clone(),
        set.includes().clone(),
    )
}
