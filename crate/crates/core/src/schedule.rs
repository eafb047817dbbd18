//! Strictly increasing schedules of positive powers, either an arithmetic
//! progression n_k = g·k or an explicit list.

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPowerSchedule", tag = "form", rename_all = "snake_case")]
pub enum PowerSchedule {
    Arithmetic { stride: u64, count: usize },
    Explicit { powers: Vec<u64> },
}

#[derive(Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
enum RawPowerSchedule {
    Arithmetic { stride: u64, count: usize },
    Explicit { powers: Vec<u64> },
}

impl TryFrom<RawPowerSchedule> for PowerSchedule {
    type Error = Error;

    fn try_from(raw: RawPowerSchedule) -> Result<Self, Error> {
        match raw {
            RawPowerSchedule::Arithmetic { stride, count } => Self::arithmetic(stride, count),
            RawPowerSchedule::Explicit { powers } => Self::explicit(powers),
        }
    }
}

impl PowerSchedule {
    pub fn arithmetic(stride: u64, count: usize) -> Result<Self, Error> {
        if stride == 0 || count == 0 {
            return Err(Error::BadSchedule);
        }
        Ok(PowerSchedule::Arithmetic { stride, count })
    }

    pub fn explicit(powers: Vec<u64>) -> Result<Self, Error> {
        let increasing = powers.windows(2).all(|w| w[0] < w[1]);
        if powers.is_empty() || powers[0] == 0 || !increasing {
            return Err(Error::BadSchedule);
        }
        Ok(PowerSchedule::Explicit { powers })
    }

    pub fn len(&self) -> usize {
        match self {
            PowerSchedule::Arithmetic { count, .. } => *count,
            PowerSchedule::Explicit { powers } => powers.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false // construction forbids empty schedules
    }

    /// The powers n_1 < n_2 < ... in order.
    pub fn powers(&self) -> Vec<u64> {
        match self {
            PowerSchedule::Arithmetic { stride, count } => {
                (1..=*count as u64).map(|k| stride * k).collect()
            }
            PowerSchedule::Explicit { powers } => powers.clone(),
        }
    }

    pub fn last_power(&self) -> u64 {
        match self {
            PowerSchedule::Arithmetic { stride, count } => stride * *count as u64,
            PowerSchedule::Explicit { powers } => *powers.last().expect("non-empty"),
        }
    }
}
