//! Positive weight sequences over the integers or the naturals.
//!
//! A sequence is a closed-form rule plus a domain. Rules are total on all of
//! the integers; the domain only gates which indices callers may query. Every
//! value is validated positive and finite at construction, so downstream code
//! can take logs freely.
//!
//! A sequence also carries an integer reindexing offset: `weight_at(n)`
//! evaluates the rule at `n - offset`. The offset is how adjoints reindex
//! weights by one without leaving the rule family, and it round-trips through
//! serialization (omitted when zero).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which index line the sequence (and anything built on it) lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// All of the integers.
    Bilateral,
    /// The naturals, 0 included.
    Unilateral,
}

impl Domain {
    pub fn contains(self, n: i64) -> bool {
        match self {
            Domain::Bilateral => true,
            Domain::Unilateral => n >= 0,
        }
    }
}

/// Closed-form weight rule, total on the integers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightRule {
    /// The same value everywhere.
    Constant { value: f64 },
    /// `pos` at indices >= 0, `neg` below.
    Step { pos: f64, neg: f64 },
    /// `values[n mod p]` with mathematical modulo; the period is the length.
    Periodic { values: Vec<f64> },
    /// Alternating blocks of `low` (first block) and `high` laid out from
    /// index 0 upward with the given lengths; past the listed blocks the last
    /// length keeps doubling, so the alternation never stops. Negative
    /// indices mirror the layout with `low` and `high` swapped: the weight at
    /// `-k` is the swapped value at `k - 1`.
    BlockInterleaved {
        low: f64,
        high: f64,
        block_lengths: Vec<u64>,
    },
    /// Finite overrides on top of another rule.
    Table {
        entries: BTreeMap<i64, f64>,
        default: Box<WeightRule>,
    },
}

fn check_value(value: f64) -> Result<(), Error> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveWeight { value })
    }
}

fn validate_rule(rule: &WeightRule) -> Result<(), Error> {
    match rule {
        WeightRule::Constant { value } => check_value(*value),
        WeightRule::Step { pos, neg } => {
            check_value(*pos)?;
            check_value(*neg)
        }
        WeightRule::Periodic { values } => {
            if values.is_empty() {
                return Err(Error::Empty {
                    what: "periodic values",
                });
            }
            values.iter().try_for_each(|v| check_value(*v))
        }
        WeightRule::BlockInterleaved {
            low,
            high,
            block_lengths,
        } => {
            check_value(*low)?;
            check_value(*high)?;
            if block_lengths.is_empty() {
                return Err(Error::Empty {
                    what: "block lengths",
                });
            }
            let increasing = block_lengths.windows(2).all(|w| w[0] < w[1]);
            if block_lengths[0] == 0 || !increasing {
                return Err(Error::BadBlockLengths);
            }
            Ok(())
        }
        WeightRule::Table { entries, default } => {
            entries.values().try_for_each(|v| check_value(*v))?;
            validate_rule(default)
        }
    }
}

/// Looks up the block value at nonnegative layout position `k`.
/// Block positions count from zero; even positions carry `low`.
fn block_value(low: f64, high: f64, lengths: &[u64], k: u64) -> f64 {
    let k = k as u128;
    let mut cum: u128 = 0;
    let mut b = 0usize;
    loop {
        let len = if b < lengths.len() {
            lengths[b] as u128
        } else {
            // Past the schedule: keep doubling the last listed length.
            let extra = (b - lengths.len() + 1) as u32;
            (*lengths.last().expect("validated non-empty") as u128) << extra.min(100)
        };
        if k < cum + len {
            return if b.is_multiple_of(2) { low } else { high };
        }
        cum += len;
        b += 1;
    }
}

fn rule_value(rule: &WeightRule, k: i64) -> f64 {
    match rule {
        WeightRule::Constant { value } => *value,
        WeightRule::Step { pos, neg } => {
            if k >= 0 {
                *pos
            } else {
                *neg
            }
        }
        WeightRule::Periodic { values } => {
            let p = values.len() as i64;
            values[k.rem_euclid(p) as usize]
        }
        WeightRule::BlockInterleaved {
            low,
            high,
            block_lengths,
        } => {
            if k >= 0 {
                block_value(*low, *high, block_lengths, k as u64)
            } else {
                // Mirror position with low/high swapped.
                block_value(*high, *low, block_lengths, (-k - 1) as u64)
            }
        }
        WeightRule::Table { entries, default } => entries
            .get(&k)
            .copied()
            .unwrap_or_else(|| rule_value(default, k)),
    }
}

/// Half-lines of the index axis, used for structural bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Side {
    /// Indices <= -1.
    Negative,
    /// Indices >= 1.
    Positive,
}

/// Regions of the rule's argument axis.
#[derive(Clone, Copy)]
enum Region {
    All,
    ArgsAbove(i64),
    ArgsBelow(i64),
}

/// (inf, sup) of the rule over a region, or None when only sampling can tell
/// (finite table overrides can mask a branch).
fn rule_bounds(rule: &WeightRule, region: Region) -> Option<(f64, f64)> {
    match rule {
        WeightRule::Constant { value } => Some((*value, *value)),
        WeightRule::Step { pos, neg } => {
            let both = Some((pos.min(*neg), pos.max(*neg)));
            match region {
                Region::All => both,
                Region::ArgsAbove(a) => {
                    if a <= -1 {
                        both
                    } else {
                        Some((*pos, *pos))
                    }
                }
                Region::ArgsBelow(b) => {
                    if b >= 0 {
                        both
                    } else {
                        Some((*neg, *neg))
                    }
                }
            }
        }
        WeightRule::Periodic { values } => {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Some((lo, hi))
        }
        WeightRule::BlockInterleaved { low, high, .. } => {
            Some((low.min(*high), low.max(*high)))
        }
        WeightRule::Table { .. } => None,
    }
}

/// Eventually-periodic structure of a rule walked upward along a ray:
/// after `transient` steps the values repeat with period `period`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RayTail {
    pub transient: u64,
    pub period: u64,
}

fn rule_ray_tail(rule: &WeightRule, start_arg: i64) -> Option<RayTail> {
    match rule {
        WeightRule::Constant { .. } => Some(RayTail {
            transient: 0,
            period: 1,
        }),
        WeightRule::Step { .. } => Some(RayTail {
            // Arguments below zero are the transient.
            transient: (-start_arg).max(0) as u64,
            period: 1,
        }),
        WeightRule::Periodic { values } => Some(RayTail {
            transient: 0,
            period: values.len() as u64,
        }),
        WeightRule::BlockInterleaved { .. } => None,
        WeightRule::Table { entries, default } => {
            let inner = rule_ray_tail(default, start_arg)?;
            let masked = match entries.keys().next_back() {
                Some(&max_key) => (max_key.saturating_add(1) - start_arg).max(0) as u64,
                None => 0,
            };
            Some(RayTail {
                transient: inner.transient.max(masked),
                period: inner.period,
            })
        }
    }
}

/// A validated weight sequence: rule, domain, reindexing offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeightSequence")]
pub struct WeightSequence {
    rule: WeightRule,
    domain: Domain,
    #[serde(default, skip_serializing_if = "offset_is_zero")]
    offset: i64,
}

fn offset_is_zero(offset: &i64) -> bool {
    *offset == 0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeightSequence {
    rule: WeightRule,
    domain: Domain,
    #[serde(default)]
    offset: i64,
}

impl TryFrom<RawWeightSequence> for WeightSequence {
    type Error = Error;

    fn try_from(raw: RawWeightSequence) -> Result<Self, Error> {
        validate_rule(&raw.rule)?;
        Ok(WeightSequence {
            rule: raw.rule,
            domain: raw.domain,
            offset: raw.offset,
        })
    }
}

impl WeightSequence {
    pub fn new(rule: WeightRule, domain: Domain) -> Result<Self, Error> {
        validate_rule(&rule)?;
        Ok(WeightSequence {
            rule,
            domain,
            offset: 0,
        })
    }

    /// Shorthand for a constant sequence.
    pub fn constant(value: f64, domain: Domain) -> Result<Self, Error> {
        Self::new(WeightRule::Constant { value }, domain)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// The same rule read at shifted indices: the result's `weight_at(n)`
    /// equals this sequence's rule evaluated at `n - by` further. Adjoints
    /// are the one caller.
    pub fn reindexed(mut self, by: i64) -> Self {
        self.offset += by;
        self
    }

    /// Weight at `n`, rejecting indices outside the declared domain.
    pub fn weight_at(&self, n: i64) -> Result<f64, Error> {
        if !self.domain.contains(n) {
            return Err(Error::IndexOutsideDomain { index: n });
        }
        Ok(self.raw(n))
    }

    /// Rule value without the domain gate; total on the integers.
    pub(crate) fn raw(&self, n: i64) -> f64 {
        rule_value(&self.rule, n - self.offset)
    }

    pub(crate) fn ln_raw(&self, n: i64) -> f64 {
        self.raw(n).ln()
    }

    /// Exact inf over one strict half-line, when the rule structure alone
    /// determines it. `None` means a table override could mask a branch and
    /// the caller should sample.
    pub(crate) fn structural_side_inf(&self, side: Side) -> Option<f64> {
        let region = match side {
            Side::Negative => Region::ArgsBelow(-1 - self.offset),
            Side::Positive => Region::ArgsAbove(1 - self.offset),
        };
        rule_bounds(&self.rule, region).map(|(lo, _)| lo)
    }

    /// Min over the sampled half-line out to `window` (>= 1).
    pub(crate) fn sampled_side_inf(&self, side: Side, window: i64) -> f64 {
        let indices: Box<dyn Iterator<Item = i64>> = match side {
            Side::Negative => Box::new((-window..=-1).rev()),
            Side::Positive => Box::new(1..=window),
        };
        indices.map(|n| self.raw(n)).fold(f64::INFINITY, f64::min)
    }

    /// (inf, sup, exact) over the whole declared domain; falls back to
    /// sampling `[-probe, probe]` (clipped to the domain) for table rules.
    pub(crate) fn invertibility_bounds(&self, probe: i64) -> (f64, f64, bool) {
        let region = match self.domain {
            Domain::Bilateral => Region::All,
            Domain::Unilateral => Region::ArgsAbove(-self.offset),
        };
        if let Some((lo, hi)) = rule_bounds(&self.rule, region) {
            return (lo, hi, true);
        }
        let start = match self.domain {
            Domain::Bilateral => -probe,
            Domain::Unilateral => 0,
        };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for n in start..=probe.max(start) {
            let v = self.raw(n);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi, false)
    }

    /// Eventually-periodic description of the values walked upward from
    /// `start`, when the rule admits one.
    pub(crate) fn ray_tail(&self, start: i64) -> Option<RayTail> {
        rule_ray_tail(&self.rule, start - self.offset)
    }
}
