//! Finite-horizon verdicts over log-domain traces.
//!
//! A verdict never claims more than the horizon supports: `SatisfiedAtHorizon`
//! and `ViolatedAtHorizon` summarize the sampled trace under a recorded
//! decision rule, and `Inconclusive` is an honest answer. The rule parameters
//! travel inside the verdict, so the status can always be recomputed from the
//! traces alone — serialization cannot detach a conclusion from its evidence.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    SatisfiedAtHorizon,
    ViolatedAtHorizon,
    Inconclusive,
}

/// One sampled point: the k-th schedule entry, its power, and the log value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub k: usize,
    pub power: u64,
    pub log_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub label: String,
    pub points: Vec<TracePoint>,
}

impl Trace {
    pub fn new(label: impl Into<String>, points: Vec<TracePoint>) -> Self {
        Trace {
            label: label.into(),
            points,
        }
    }

    pub fn last_value(&self) -> f64 {
        self.points.last().expect("traces are never empty").log_value
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.log_value).collect()
    }
}

/// How a status is read off the traces. The parameters are stored verbatim
/// so a verdict is self-contained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DecisionRule {
    /// Satisfied when every trace ends below `satisfy_log` with a
    /// non-increasing tail window; violated when any trace ends above
    /// `violate_log`, or trends non-decreasing through the tail window while
    /// ending at or above zero. Trend checks need at least two window points.
    /// Margin: the worst final value minus `satisfy_log`.
    DecayWindow {
        satisfy_log: f64,
        violate_log: f64,
        window: usize,
    },
    /// Satisfied when the running maximum over all points exceeds
    /// `violate_log` (blow-up is success here); violated when a structural
    /// bound proves the trace bounded above; inconclusive when the invariance
    /// hypothesis failed (`schedule_ok` false) or nothing is provable at this
    /// horizon. Margin: running maximum minus `violate_log`.
    RunningMax {
        violate_log: f64,
        structural_sup: Option<f64>,
        schedule_ok: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Number of sampled schedule entries backing the status.
    pub horizon: usize,
    /// Log-domain distance to the decision threshold; see `DecisionRule`.
    pub margin: f64,
    pub rule: DecisionRule,
    pub traces: Vec<Trace>,
}

fn tail_window(values: &[f64], window: usize) -> &[f64] {
    let start = values.len().saturating_sub(window);
    &values[start..]
}

fn non_increasing(values: &[f64]) -> bool {
    values.len() >= 2 && values.windows(2).all(|w| w[1] <= w[0])
}

fn non_decreasing(values: &[f64]) -> bool {
    values.len() >= 2 && values.windows(2).all(|w| w[1] >= w[0])
}

fn decide(rule: &DecisionRule, traces: &[Trace]) -> (VerdictStatus, f64) {
    match rule {
        DecisionRule::DecayWindow {
            satisfy_log,
            violate_log,
            window,
        } => {
            let mut satisfied = true;
            let mut violated = false;
            let mut margin = f64::NEG_INFINITY;
            for trace in traces {
                let values = trace.values();
                let tail = tail_window(&values, *window);
                let last = *values.last().expect("traces are never empty");
                margin = margin.max(last - satisfy_log);
                satisfied &= last < *satisfy_log && non_increasing(tail);
                violated |= last > *violate_log || (non_decreasing(tail) && last >= 0.0);
            }
            let status = if violated {
                VerdictStatus::ViolatedAtHorizon
            } else if satisfied {
                VerdictStatus::SatisfiedAtHorizon
            } else {
                VerdictStatus::Inconclusive
            };
            (status, margin)
        }
        DecisionRule::RunningMax {
            violate_log,
            structural_sup,
            schedule_ok,
        } => {
            let running_max = traces
                .iter()
                .flat_map(|t| t.points.iter().map(|p| p.log_value))
                .fold(f64::NEG_INFINITY, f64::max);
            let margin = running_max - violate_log;
            let status = if !schedule_ok {
                VerdictStatus::Inconclusive
            } else if structural_sup.is_some() {
                // Bounded partial sums: the limsup is finite, full stop.
                VerdictStatus::ViolatedAtHorizon
            } else if running_max > *violate_log {
                VerdictStatus::SatisfiedAtHorizon
            } else {
                VerdictStatus::Inconclusive
            };
            (status, margin)
        }
    }
}

impl Verdict {
    /// Builds the verdict by applying `rule` to `traces`.
    pub fn decide(rule: DecisionRule, traces: Vec<Trace>) -> Self {
        let (status, margin) = decide(&rule, &traces);
        let horizon = traces.iter().map(|t| t.points.len()).max().unwrap_or(0);
        Verdict {
            status,
            horizon,
            margin,
            rule,
            traces,
        }
    }

    /// Re-derives the status from the recorded traces and rule. Always equals
    /// `self.status` for verdicts built by this crate.
    pub fn recompute_status(&self) -> VerdictStatus {
        decide(&self.rule, &self.traces).0
    }

    pub fn trace(&self, label: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.label == label)
    }

    pub fn is_satisfied(&self) -> bool {
        self.status == VerdictStatus::SatisfiedAtHorizon
    }
}
