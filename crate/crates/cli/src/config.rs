//! Experiment config schema. Every config carries a schema version and is
//! rejected on any unknown field, so a trace produced today is reproducible
//! from its config file later or not accepted at all.

use serde::Deserialize;

use subshift::criteria::CriterionThresholds;
use subshift::orbit::TruncationWindow;
use subshift::{Domain, DirectSumSpec, IndexSet, OperatorSpec, PowerSchedule, SparseVector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub schema_version: u32,
    pub check: CheckCommand,
}

/// The nine named checks. Params live in their own structs so unknown
/// fields inside them are rejected too.
#[derive(Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CheckCommand {
    Eq65(DecayParams),
    Bac(DecayParams),
    Thm19(FiniteCheckParams),
    Thm84(ApplicabilityParams),
    Prop85(GatedDecayParams),
    Thm28(DirectSumParams),
    Corollary(DirectSumLimsupParams),
    Unilateral(LimsupParams),
    Lemma35(PropagationParams),
}

impl CheckCommand {
    pub fn kind_name(&self) -> &'static str {
        match self {
            CheckCommand::Eq65(_) => "eq65",
            CheckCommand::Bac(_) => "bac",
            CheckCommand::Thm19(_) => "thm19",
            CheckCommand::Thm84(_) => "thm84",
            CheckCommand::Prop85(_) => "prop85",
            CheckCommand::Thm28(_) => "thm28",
            CheckCommand::Corollary(_) => "corollary",
            CheckCommand::Unilateral(_) => "unilateral",
            CheckCommand::Lemma35(_) => "lemma35",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayParams {
    pub operator: OperatorSpec,
    pub space: IndexSet,
    pub base: i64,
    pub schedule: PowerSchedule,
    #[serde(default)]
    pub thresholds: CriterionThresholds,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteCheckParams {
    pub operator: OperatorSpec,
    pub space: IndexSet,
    pub delta: f64,
    pub q: u32,
    pub power: u64,
}

fn default_probe_window() -> i64 {
    64
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplicabilityParams {
    pub operator: OperatorSpec,
    pub space: IndexSet,
    #[serde(default = "default_probe_window")]
    pub probe_window: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatedDecayParams {
    pub operator: OperatorSpec,
    pub space: IndexSet,
    pub base: i64,
    pub schedule: PowerSchedule,
    #[serde(default)]
    pub thresholds: CriterionThresholds,
    #[serde(default = "default_probe_window")]
    pub probe_window: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectSumParams {
    pub operators: DirectSumSpec,
    pub left_base: i64,
    pub right_base: i64,
    pub schedule: PowerSchedule,
    #[serde(default)]
    pub thresholds: CriterionThresholds,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectSumLimsupParams {
    pub operators: DirectSumSpec,
    pub left_base: i64,
    pub right_base: i64,
    pub horizon: u64,
    #[serde(default)]
    pub thresholds: CriterionThresholds,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimsupParams {
    pub operator: OperatorSpec,
    pub space: IndexSet,
    pub base: i64,
    pub horizon: u64,
    #[serde(default)]
    pub thresholds: CriterionThresholds,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationParams {
    pub operator: OperatorSpec,
    pub space: IndexSet,
    pub base: i64,
    pub schedule: PowerSchedule,
    pub others: Vec<i64>,
    pub tolerance: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub schema_version: u32,
    pub simulate: SimulateParams,
}

fn default_grid_count() -> usize {
    4
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    pub operator: OperatorSpec,
    pub space: IndexSet,
    pub epsilon: f64,
    pub n_iter: u64,
    pub window: TruncationWindow,
    /// Starting vector; when absent one is built from the grid targets,
    /// which requires `schedule`.
    #[serde(default)]
    pub vector: Option<SparseVector>,
    /// Explicit target grid; when absent a default grid over the first
    /// `grid_count` subspace members in the window is used.
    #[serde(default)]
    pub grid: Option<Vec<SparseVector>>,
    #[serde(default = "default_grid_count")]
    pub grid_count: usize,
    #[serde(default)]
    pub schedule: Option<PowerSchedule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructConfig {
    pub schema_version: u32,
    pub construct: ConstructCommand,
}

#[derive(Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ConstructCommand {
    Constant(ConstantParams),
    Step(StepParams),
    Periodic(PeriodicParams),
    BlockInterleaved(BlockInterleavedParams),
    Herrero(HerreroParams),
}

fn default_domain() -> Domain {
    Domain::Bilateral
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantParams {
    pub value: f64,
    #[serde(default = "default_domain")]
    pub domain: Domain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepParams {
    pub pos: f64,
    pub neg: f64,
    #[serde(default = "default_domain")]
    pub domain: Domain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicParams {
    pub values: Vec<f64>,
    #[serde(default = "default_domain")]
    pub domain: Domain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockInterleavedParams {
    pub low: f64,
    pub high: f64,
    pub block_lengths: Vec<u64>,
    #[serde(default = "default_domain")]
    pub domain: Domain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HerreroParams {
    pub low: f64,
    pub high: f64,
    pub lengths: Vec<u64>,
    pub p: u32,
}
