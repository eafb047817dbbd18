//! Finitely supported vectors over a basis indexed by integers, with an
//! optional component tag so direct-sum experiments can keep both summands
//! in one container. Zero coefficients are never stored.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which summand a basis index belongs to. Plain (non-direct-sum) vectors
/// use `Single` throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Single,
    Left,
    Right,
}

impl Component {
    pub(crate) fn name(self) -> &'static str {
        match self {
            Component::Single => "single",
            Component::Left => "left",
            Component::Right => "right",
        }
    }
}

/// A sparse vector: finite map from (component, basis index) to coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<SparseEntry>", try_from = "Vec<SparseEntry>")]
pub struct SparseVector {
    entries: BTreeMap<(Component, i64), f64>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SparseEntry {
    #[serde(default = "default_part", skip_serializing_if = "is_single")]
    part: Component,
    index: i64,
    coef: f64,
}

fn default_part() -> Component {
    Component::Single
}

fn is_single(part: &Component) -> bool {
    *part == Component::Single
}

impl From<SparseVector> for Vec<SparseEntry> {
    fn from(v: SparseVector) -> Self {
        v.entries
            .into_iter()
            .map(|((part, index), coef)| SparseEntry { part, index, coef })
            .collect()
    }
}

impl TryFrom<Vec<SparseEntry>> for SparseVector {
    type Error = Error;

    fn try_from(entries: Vec<SparseEntry>) -> Result<Self, Error> {
        let mut v = SparseVector::zero();
        for e in entries {
            if !e.coef.is_finite() {
                return Err(Error::NonFiniteCoefficient { value: e.coef });
            }
            v.add_to((e.part, e.index), e.coef);
        }
        Ok(v)
    }
}

impl SparseVector {
    pub fn zero() -> Self {
        SparseVector {
            entries: BTreeMap::new(),
        }
    }

    /// The basis vector e_m (untagged).
    pub fn unit(m: i64) -> Self {
        Self::tagged_unit(Component::Single, m)
    }

    pub fn tagged_unit(component: Component, m: i64) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert((component, m), 1.0);
        SparseVector { entries }
    }

    pub fn from_entries<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = ((Component, i64), f64)>,
    {
        let mut v = Self::zero();
        for (key, coef) in iter {
            v.add_to(key, coef);
        }
        v
    }

    /// Adds `coef` at `key`, dropping the entry if it cancels to zero.
    pub fn add_to(&mut self, key: (Component, i64), coef: f64) {
        let slot = self.entries.entry(key).or_insert(0.0);
        *slot += coef;
        if *slot == 0.0 {
            self.entries.remove(&key);
        }
    }

    pub fn get(&self, key: (Component, i64)) -> f64 {
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((Component, i64), f64)> + '_ {
        self.entries.iter().map(|(&k, &c)| (k, c))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .values()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (key, coef) in other.iter() {
            out.add_to(key, coef);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (key, coef) in other.iter() {
            out.add_to(key, -coef);
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        if factor == 0.0 {
            return Self::zero();
        }
        SparseVector {
            entries: self.entries.iter().map(|(&k, &c)| (k, c * factor)).collect(),
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.iter().map(|(key, c)| c * other.get(key)).sum()
    }
}
