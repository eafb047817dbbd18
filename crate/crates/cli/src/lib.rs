//! Batch front end: parse a config, dispatch to the evaluators, emit a
//! report and an exit code.
//!
//! Exit codes: 0 the check passed (satisfied / pass / all hits), 2 it
//! decisively failed (violated / fail / misses), 3 it could not be decided
//! at this horizon (inconclusive / vacuous / not applicable), 1 the config
//! or input was invalid. Reports print as short human lines by default or
//! as a single JSON document with `--json`; either way the exit code is a
//! pure function of the report content.

pub mod config;

use serde::Serialize;
use serde_json::json;

use subshift::criteria::{
    backward_condition, direct_sum_condition, eq65_forward, invertibility_report, lemma35_probe,
    prop85, thm19_finite_check, thm84_applicability, unilateral_limsup, InvertibilityReport,
    Lemma35Report, Thm19Outcome, Thm19Report, Thm84Report,
};
use subshift::constructors::{herrero_construction, make_family, Family, HerreroBundle};
use subshift::orbit::{build_criterion_vector, default_target_grid, density_experiment, DensityReport};
use subshift::shift_ops::adjoint;
use subshift::{Error, Verdict, VerdictStatus, WeightSequence};

use config::{
    CheckCommand, CheckConfig, ConstructCommand, ConstructConfig, SimulateConfig, SCHEMA_VERSION,
};

/// What a command run produces: the report text for standard output, an
/// optional CSV body, and the process exit code.
pub struct Outcome {
    pub stdout: String,
    pub csv: Option<String>,
    pub exit_code: i32,
}

fn status_exit(status: VerdictStatus) -> i32 {
    match status {
        VerdictStatus::SatisfiedAtHorizon => 0,
        VerdictStatus::ViolatedAtHorizon => 2,
        VerdictStatus::Inconclusive => 3,
    }
}

fn status_name(status: VerdictStatus) -> &'static str {
    match status {
        VerdictStatus::SatisfiedAtHorizon => "satisfied-at-horizon",
        VerdictStatus::ViolatedAtHorizon => "violated-at-horizon",
        VerdictStatus::Inconclusive => "inconclusive",
    }
}

/// Evaluation errors that embed a verdict are decisive failures (exit 2);
/// everything else is input the evaluators refused (exit 1).
fn error_exit(e: &Error) -> i32 {
    match e {
        Error::ConditionNotSatisfied { .. } | Error::ConstructionFailed { .. } => 2,
        _ => 1,
    }
}

fn failure(e: &Error, json_output: bool) -> Outcome {
    let exit_code = error_exit(e);
    let stdout = if json_output {
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "exit_code": exit_code,
            "error": e.to_string(),
        });
        match e {
            Error::ConditionNotSatisfied { verdict } => {
                doc["verdict"] = serde_json::to_value(verdict).expect("verdicts serialize");
            }
            Error::ConstructionFailed { forward, backward } => {
                doc["forward_verdict"] = serde_json::to_value(forward).expect("serialize");
                doc["backward_verdict"] = serde_json::to_value(backward).expect("serialize");
            }
            _ => {}
        }
        pretty(&doc)
    } else {
        format!("error: {e}")
    };
    Outcome {
        stdout,
        csv: None,
        exit_code,
    }
}

fn config_failure(message: String, json_output: bool) -> Outcome {
    let stdout = if json_output {
        pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "exit_code": 1,
            "error": message,
        }))
    } else {
        format!("config error: {message}")
    };
    Outcome {
        stdout,
        csv: None,
        exit_code: 1,
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn check_version(found: u32) -> Result<(), String> {
    if found == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(format!(
            "schema_version {found} not supported (expected {SCHEMA_VERSION})"
        ))
    }
}

#[derive(Serialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub kind: &'static str,
    pub status: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invertibility: Option<InvertibilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_check: Option<Thm19Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub applicability: Option<Thm84Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_propagation: Option<Lemma35Report>,
}

impl CheckReport {
    fn bare(kind: &'static str, status: String, exit_code: i32) -> Self {
        CheckReport {
            schema_version: SCHEMA_VERSION,
            kind,
            status,
            exit_code,
            verdict: None,
            invertibility: None,
            finite_check: None,
            applicability: None,
            decay_propagation: None,
        }
    }

    fn from_verdict(kind: &'static str, verdict: Verdict) -> Self {
        let mut report = CheckReport::bare(
            kind,
            status_name(verdict.status).to_string(),
            status_exit(verdict.status),
        );
        report.verdict = Some(verdict);
        report
    }

    fn human(&self) -> String {
        let mut lines = vec![match &self.verdict {
            Some(v) => format!(
                "{}: {} (horizon {}, margin {:+.6})",
                self.kind, self.status, v.horizon, v.margin
            ),
            None => format!("{}: {}", self.kind, self.status),
        }];
        if let Some(inv) = &self.invertibility {
            lines.push(format!(
                "invertibility: {} (weights in [{:.6}, {:.6}]{})",
                if inv.invertible { "ok" } else { "NOT invertible" },
                inv.lower,
                inv.upper,
                if inv.exact { "" } else { ", sampled" },
            ));
        }
        if let Some(fc) = &self.finite_check {
            lines.push(format!(
                "checked {} members within radius {} at power {}",
                fc.entries.len(),
                fc.bound_radius,
                fc.power
            ));
        }
        if let Some(ap) = &self.applicability {
            lines.push(format!("applicability: {}", ap.note));
        }
        if let Some(lp) = &self.decay_propagation {
            lines.push(format!(
                "propagation from {}: {}/{} indices pass",
                lp.base_index,
                lp.entries.iter().filter(|e| e.pass).count(),
                lp.entries.len()
            ));
        }
        lines.join("\n")
    }
}

/// Trace CSV: one row per schedule point. Single-trace verdicts leave the
/// minus column empty.
fn verdict_trace_csv(verdict: &Verdict) -> Option<String> {
    let plus = verdict.trace("plus").or_else(|| verdict.trace("running"))?;
    let minus = verdict.trace("minus");
    let mut out = String::from("k,n_k,trace_plus,trace_minus\n");
    for (i, point) in plus.points.iter().enumerate() {
        let minus_cell = minus
            .map(|t| t.points[i].log_value.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            point.k, point.power, point.log_value, minus_cell
        ));
    }
    Some(out)
}

/// Probe far enough to cover every index either product range can touch.
fn invertibility_probe(base: i64, last_power: u64) -> i64 {
    base.abs() + last_power as i64 + 1
}

pub fn run_check(config_text: &str, json_output: bool) -> Outcome {
    let parsed: CheckConfig = match serde_json::from_str(config_text) {
        Ok(c) => c,
        Err(e) => return config_failure(e.to_string(), json_output),
    };
    if let Err(msg) = check_version(parsed.schema_version) {
        return config_failure(msg, json_output);
    }
    let kind = parsed.check.kind_name();
    let report = match parsed.check {
        CheckCommand::Eq65(p) => {
            eq65_forward(&p.operator, &p.space, p.base, &p.schedule, &p.thresholds).map(|v| {
                let mut r = CheckReport::from_verdict(kind, v);
                r.invertibility = Some(invertibility_report(
                    &p.operator,
                    invertibility_probe(p.base, p.schedule.last_power()),
                ));
                r
            })
        }
        CheckCommand::Bac(p) => {
            backward_condition(&p.operator, &p.space, p.base, &p.schedule, &p.thresholds).map(
                |v| {
                    let mut r = CheckReport::from_verdict(kind, v);
                    r.invertibility = Some(invertibility_report(
                        &p.operator,
                        invertibility_probe(p.base, p.schedule.last_power()),
                    ));
                    r
                },
            )
        }
        CheckCommand::Thm19(p) => {
            thm19_finite_check(&p.operator, &p.space, p.delta, p.q, p.power).map(|fc| {
                let (status, exit_code) = match fc.outcome {
                    Thm19Outcome::Pass => ("pass", 0),
                    Thm19Outcome::Fail => ("fail", 2),
                    Thm19Outcome::Vacuous => ("vacuous", 3),
                };
                let mut r = CheckReport::bare(kind, status.to_string(), exit_code);
                r.finite_check = Some(fc);
                r
            })
        }
        CheckCommand::Thm84(p) => {
            thm84_applicability(&p.operator, &p.space, p.probe_window).map(|ap| {
                let (status, exit_code) = if ap.applicable {
                    ("applicable", 0)
                } else {
                    ("not-applicable", 3)
                };
                let mut r = CheckReport::bare(kind, status.to_string(), exit_code);
                r.applicability = Some(ap);
                r
            })
        }
        CheckCommand::Prop85(p) => prop85(
            &p.operator,
            &p.space,
            p.base,
            &p.schedule,
            &p.thresholds,
            p.probe_window,
        )
        .map(|rep| {
            let mut r = match &rep.verdict {
                Some(v) => CheckReport::from_verdict(kind, v.clone()),
                None => CheckReport::bare(kind, "not-applicable".to_string(), 3),
            };
            r.applicability = Some(rep.applicability);
            r
        }),
        CheckCommand::Thm28(p) => direct_sum_condition(
            &p.operators,
            p.left_base,
            p.right_base,
            &p.schedule,
            &p.thresholds,
        )
        .map(|v| CheckReport::from_verdict(kind, v)),
        CheckCommand::Corollary(p) => subshift::criteria::direct_sum_unilateral(
            &p.operators,
            p.left_base,
            p.right_base,
            p.horizon,
            &p.thresholds,
        )
        .map(|v| CheckReport::from_verdict(kind, v)),
        CheckCommand::Unilateral(p) => {
            unilateral_limsup(&p.operator, &p.space, p.base, p.horizon, &p.thresholds)
                .map(|v| CheckReport::from_verdict(kind, v))
        }
        CheckCommand::Lemma35(p) => lemma35_probe(
            &p.operator,
            &p.space,
            &p.schedule,
            p.base,
            &p.others,
            p.tolerance,
        )
        .map(|lp| {
            let (status, exit_code) = if lp.vacuous {
                ("vacuous", 3)
            } else if lp.all_pass {
                ("pass", 0)
            } else {
                ("fail", 2)
            };
            let mut r = CheckReport::bare(kind, status.to_string(), exit_code);
            r.decay_propagation = Some(lp);
            r
        }),
    };
    match report {
        Ok(report) => Outcome {
            csv: report.verdict.as_ref().and_then(verdict_trace_csv),
            stdout: if json_output {
                pretty(&report)
            } else {
                report.human()
            },
            exit_code: report.exit_code,
        },
        Err(e) => failure(&e, json_output),
    }
}

#[derive(Serialize)]
pub struct SimulateReport {
    pub schema_version: u32,
    pub exit_code: i32,
    /// Present when the starting vector was built here rather than given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub placements: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    pub density: DensityReport,
}

fn density_csv(report: &DensityReport) -> String {
    let mut out = String::from("target,hit,first_hit_power,achieved_distance,best_distance\n");
    for t in &report.targets {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t.target,
            t.hit,
            t.first_hit_power.map(|n| n.to_string()).unwrap_or_default(),
            t.achieved_distance
                .map(|d| d.to_string())
                .unwrap_or_default(),
            t.best_distance.map(|d| d.to_string()).unwrap_or_default(),
        ));
    }
    out
}

pub fn run_simulate(config_text: &str, json_output: bool) -> Outcome {
    let parsed: SimulateConfig = match serde_json::from_str(config_text) {
        Ok(c) => c,
        Err(e) => return config_failure(e.to_string(), json_output),
    };
    if let Err(msg) = check_version(parsed.schema_version) {
        return config_failure(msg, json_output);
    }
    let p = parsed.simulate;
    let grid = p
        .grid
        .unwrap_or_else(|| default_target_grid(&p.space, &p.window, p.grid_count));

    let (vector, placements, tail_bound) = match p.vector {
        Some(v) => (v, None, None),
        None => {
            let Some(schedule) = p.schedule.as_ref() else {
                return config_failure(
                    "either a starting vector or a schedule to build one is required".to_string(),
                    json_output,
                );
            };
            match build_criterion_vector(&p.operator, &p.space, &grid, p.epsilon, schedule) {
                Ok(built) => (
                    built.vector,
                    Some(built.placements),
                    Some(built.tail_bound),
                ),
                Err(e) => return failure(&e, json_output),
            }
        }
    };

    let density = match density_experiment(
        &p.operator,
        &p.space,
        &vector,
        &grid,
        p.epsilon,
        p.n_iter,
        &p.window,
    ) {
        Ok(d) => d,
        Err(e) => return failure(&e, json_output),
    };

    let exit_code = if density.hit_rate == 1.0 { 0 } else { 2 };
    let report = SimulateReport {
        schema_version: SCHEMA_VERSION,
        exit_code,
        placements,
        tail_bound,
        density,
    };
    let stdout = if json_output {
        pretty(&report)
    } else {
        let d = &report.density;
        let mut lines = vec![format!(
            "hit rate {:.1}% ({}/{}), max leaked norm {:e}",
            d.hit_rate * 100.0,
            d.targets.iter().filter(|t| t.hit).count(),
            d.targets.len(),
            d.leaked_norm_max,
        )];
        if let Some(placements) = &report.placements {
            lines.push(format!("built vector with placements {placements:?}"));
        }
        for t in &d.targets {
            lines.push(match (t.hit, t.first_hit_power) {
                (true, Some(n)) => format!(
                    "target {}: hit at power {} (distance {:.3e})",
                    t.target,
                    n,
                    t.achieved_distance.unwrap_or(f64::NAN)
                ),
                _ => format!(
                    "target {}: miss (best distance {})",
                    t.target,
                    t.best_distance
                        .map(|d| format!("{d:.3e}"))
                        .unwrap_or_else(|| "never sampled".to_string())
                ),
            });
        }
        lines.join("\n")
    };
    Outcome {
        stdout,
        csv: Some(density_csv(&report.density)),
        exit_code,
    }
}

#[derive(Serialize)]
pub struct ConstructReport {
    pub schema_version: u32,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightSequence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle: Option<HerreroBundle>,
    /// Ready-to-run check configs that reproduce the embedded verdicts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forward_check: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backward_check: Option<serde_json::Value>,
}

pub fn run_construct(config_text: &str, json_output: bool) -> Outcome {
    let parsed: ConstructConfig = match serde_json::from_str(config_text) {
        Ok(c) => c,
        Err(e) => return config_failure(e.to_string(), json_output),
    };
    if let Err(msg) = check_version(parsed.schema_version) {
        return config_failure(msg, json_output);
    }
    let family_result = match parsed.construct {
        ConstructCommand::Constant(p) => {
            Some(make_family(&Family::Constant { value: p.value }, p.domain))
        }
        ConstructCommand::Step(p) => Some(make_family(
            &Family::Step {
                pos: p.pos,
                neg: p.neg,
            },
            p.domain,
        )),
        ConstructCommand::Periodic(p) => {
            Some(make_family(&Family::Periodic { values: p.values }, p.domain))
        }
        ConstructCommand::BlockInterleaved(p) => Some(make_family(
            &Family::BlockInterleaved {
                low: p.low,
                high: p.high,
                block_lengths: p.block_lengths,
            },
            p.domain,
        )),
        ConstructCommand::Herrero(p) => {
            return match herrero_construction(p.low, p.high, &p.lengths, p.p) {
                Ok(bundle) => {
                    let forward_check = json!({
                        "schema_version": SCHEMA_VERSION,
                        "check": {
                            "kind": "eq65",
                            "params": {
                                "operator": bundle.operator(),
                                "space": bundle.m1,
                                "base": bundle.forward_base,
                                "schedule": bundle.sched_fwd,
                            },
                        },
                    });
                    let backward_check = json!({
                        "schema_version": SCHEMA_VERSION,
                        "check": {
                            "kind": "bac",
                            "params": {
                                "operator": adjoint(&bundle.operator()),
                                "space": bundle.m2,
                                "base": bundle.backward_base,
                                "schedule": bundle.sched_bwd,
                            },
                        },
                    });
                    let report = ConstructReport {
                        schema_version: SCHEMA_VERSION,
                        exit_code: 0,
                        weights: None,
                        bundle: Some(bundle),
                        forward_check: Some(forward_check),
                        backward_check: Some(backward_check),
                    };
                    let stdout = if json_output {
                        pretty(&report)
                    } else {
                        let b = report.bundle.as_ref().expect("just set");
                        format!(
                            "construction verified: forward {} at powers {:?}, backward {} at powers {:?}",
                            status_name(b.forward_verdict.status),
                            b.sched_fwd.powers(),
                            status_name(b.backward_verdict.status),
                            b.sched_bwd.powers(),
                        )
                    };
                    Outcome {
                        stdout,
                        csv: None,
                        exit_code: 0,
                    }
                }
                Err(e) => failure(&e, json_output),
            };
        }
    };
    match family_result.expect("non-herrero families handled above") {
        Ok(weights) => {
            let report = ConstructReport {
                schema_version: SCHEMA_VERSION,
                exit_code: 0,
                weights: Some(weights),
                bundle: None,
                forward_check: None,
                backward_check: None,
            };
            let stdout = if json_output {
                pretty(&report)
            } else {
                "weight family validated".to_string()
            };
            Outcome {
                stdout,
                csv: None,
                exit_code: 0,
            }
        }
        Err(e) => failure(&e, json_output),
    }
}
