//! Residue-class index sets with finite adjustments.
//!
//! A set is: a full union of residue classes mod `p`, minus finitely many
//! excluded indices, plus finitely many included ones. Includes win, excludes
//! lose, the residue test decides the rest; includes and excludes are kept
//! disjoint so the order never matters. Negative indices are classified with
//! mathematical modulo, so -4 is even and -3 ≡ 1 (mod 2).
//!
//! These sets index the basis vectors spanning a closed subspace, which is
//! why the empty-residue case (a merely finite span) is flagged degenerate:
//! it can show up as an orthogonal complement but the decay criteria refuse
//! it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::weights::Domain;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawIndexSet")]
pub struct IndexSet {
    modulus: u32,
    residues: BTreeSet<u32>,
    domain: Domain,
    #[serde(skip_serializing_if = "BTreeSet::is_empty")]
    includes: BTreeSet<i64>,
    #[serde(skip_serializing_if = "BTreeSet::is_empty")]
    excludes: BTreeSet<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIndexSet {
    modulus: u32,
    residues: Vec<u32>,
    domain: Domain,
    #[serde(default)]
    includes: Vec<i64>,
    #[serde(default)]
    excludes: Vec<i64>,
}

impl TryFrom<RawIndexSet> for IndexSet {
    type Error = Error;

    fn try_from(raw: RawIndexSet) -> Result<Self, Error> {
        IndexSet::new(raw.modulus, raw.residues, raw.domain)?
            .with_includes(raw.includes)?
            .with_excludes(raw.excludes)
    }
}

impl IndexSet {
    pub fn new(
        modulus: u32,
        residues: impl IntoIterator<Item = u32>,
        domain: Domain,
    ) -> Result<Self, Error> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        let residues: BTreeSet<u32> = residues.into_iter().collect();
        if residues.is_empty() {
            return Err(Error::Empty { what: "residues" });
        }
        for &r in &residues {
            if r >= modulus {
                return Err(Error::ResidueOutOfRange {
                    residue: r,
                    modulus,
                });
            }
        }
        Ok(IndexSet {
            modulus,
            residues,
            domain,
            includes: BTreeSet::new(),
            excludes: BTreeSet::new(),
        })
    }

    /// Single residue class r mod p.
    pub fn residue_class(modulus: u32, residue: u32, domain: Domain) -> Result<Self, Error> {
        Self::new(modulus, [residue], domain)
    }

    /// The whole index lattice of the domain.
    pub fn full(domain: Domain) -> Self {
        Self::new(1, [0], domain).expect("1 mod 1 is valid")
    }

    pub fn with_includes(mut self, includes: impl IntoIterator<Item = i64>) -> Result<Self, Error> {
        for m in includes {
            if !self.domain.contains(m) {
                return Err(Error::AdjustmentOutsideDomain { index: m });
            }
            if self.excludes.contains(&m) {
                return Err(Error::OverlappingAdjustment { index: m });
            }
            self.includes.insert(m);
        }
        Ok(self)
    }

    pub fn with_excludes(mut self, excludes: impl IntoIterator<Item = i64>) -> Result<Self, Error> {
        for m in excludes {
            if !self.domain.contains(m) {
                return Err(Error::AdjustmentOutsideDomain { index: m });
            }
            if self.includes.contains(&m) {
                return Err(Error::OverlappingAdjustment { index: m });
            }
            self.excludes.insert(m);
        }
        Ok(self)
    }

    /// Used by `perp`, which may legitimately produce an empty residue set.
    pub(crate) fn from_parts(
        modulus: u32,
        residues: BTreeSet<u32>,
        domain: Domain,
        includes: BTreeSet<i64>,
        excludes: BTreeSet<i64>,
    ) -> Self {
        IndexSet {
            modulus,
            residues,
            domain,
            includes,
            excludes,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn residues(&self) -> &BTreeSet<u32> {
        &self.residues
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn includes(&self) -> &BTreeSet<i64> {
        &self.includes
    }

    pub fn excludes(&self) -> &BTreeSet<i64> {
        &self.excludes
    }

    /// A set whose residue part vanished spans only finitely many basis
    /// vectors; the limit criteria reject such sets.
    pub fn is_degenerate(&self) -> bool {
        self.residues.is_empty()
    }

    /// Whether shifting every residue class by `by` lands back inside the
    /// residue set. Translation is a bijection mod p, so landing inside
    /// means landing *onto*.
    pub(crate) fn residues_translate_onto_self(&self, by: i64) -> bool {
        let p = i64::from(self.modulus);
        self.residues.iter().all(|&r| {
            let shifted = (i64::from(r) + by).rem_euclid(p) as u32;
            self.residues.contains(&shifted)
        })
    }

    pub fn is_member(&self, m: i64) -> bool {
        if !self.domain.contains(m) {
            return false;
        }
        if self.includes.contains(&m) {
            return true;
        }
        if self.excludes.contains(&m) {
            return false;
        }
        self.residues
            .contains(&(m.rem_euclid(self.modulus as i64) as u32))
    }

    /// Members inside `[lo, hi]`, in increasing order, clipped to the domain.
    pub fn enumerate(&self, lo: i64, hi: i64) -> Vec<i64> {
        let lo = match self.domain {
            Domain::Bilateral => lo,
            Domain::Unilateral => lo.max(0),
        };
        (lo..=hi).filter(|&m| self.is_member(m)).collect()
    }

    /// The member closest to zero, preferring the nonnegative one on ties.
    /// `None` only for sets with no members at all.
    pub fn canonical_member(&self) -> Option<i64> {
        if self.residues.is_empty() {
            return self
                .includes
                .iter()
                .copied()
                .min_by_key(|m| (m.unsigned_abs(), *m < 0));
        }
        // A base member of some class survives within this many steps even
        // if every exclude lands on the same class.
        let bound = (self.modulus as i64) * (self.excludes.len() as i64 + 2);
        for k in 0..=bound {
            if self.is_member(k) {
                return Some(k);
            }
            if self.domain == Domain::Bilateral && k > 0 && self.is_member(-k) {
                return Some(-k);
            }
        }
        None
    }

    /// First `count` members at or above `from`, walking upward.
    pub fn first_members_from(&self, from: i64, count: usize) -> Vec<i64> {
        let start = match self.domain {
            Domain::Bilateral => from,
            Domain::Unilateral => from.max(0),
        };
        (start..)
            .filter(|&m| self.is_member(m))
            .take(count)
            .collect()
    }
}
