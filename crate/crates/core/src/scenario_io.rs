//! Scenario documents, the built-in case study, and result persistence.
//!
//! A scenario document is a single JSON object:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "label": "case-study-full-access",
//!   "horizon_hours": 48.0,
//!   "params": { "omega1": 0.5, "omega2": 0.5, "dt_hours": 0.1,
//!               "rate_floor": 0.0, "report_every_hours": 1.0 },
//!   "agents": { "count": 9, "groups": [0, 0, 0, 1, 1, 1, 2, 2, 2],
//!               "initial_dissatisfaction": 0.5 },
//!   "network": { "kind": "full_within_groups", "weight": 1.0 },
//!   "schedules": {
//!     "electricity": { "broadcast": [[0.0, 1.0], [17.0, 0.5], [34.0, 1.0]] },
//!     "media_access": { "broadcast": [[0.0, 1.0]] }
//!   }
//! }
//! ```
//!
//! `initial_dissatisfaction` is a number (same for everyone) or a list.
//! `network` is either the shorthand above or `{"kind": "dense", "weights": [[..], ..]}`.
//! Schedules are `{"broadcast": [...]}` or `{"per_agent": [[...], ...]}` with
//! `[start_hour, value]` pairs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result, ValidationError, Violation};
use crate::types::{
    collect_network_violations, collect_schedule_violations, collect_state_violations,
    full_within_groups_matrix, AgentState, Breakpoint, ContagionNetwork, ModelParams,
    ParamsBuilder, PiecewiseSchedule, Scenario, SimulationResult, WeightMatrix, DEFAULT_DT_HOURS,
    DEFAULT_OMEGA, DEFAULT_REPORT_EVERY_HOURS,
};

pub const SCHEMA_VERSION: u32 = 1;

pub const AGENTS_CSV: &str = "agents.csv";
pub const AGGREGATES_CSV: &str = "aggregates.csv";
pub const MANIFEST_JSON: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub label: String,
    pub horizon_hours: f64,
    #[serde(default)]
    pub params: ParamsBlock,
    pub agents: AgentsBlock,
    pub network: NetworkBlock,
    pub schedules: SchedulesBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsBlock {
    pub omega1: f64,
    pub omega2: f64,
    pub dt_hours: f64,
    pub rate_floor: f64,
    pub report_every_hours: f64,
}

impl Default for ParamsBlock {
    fn default() -> Self {
        Self {
            omega1: DEFAULT_OMEGA,
            omega2: DEFAULT_OMEGA,
            dt_hours: DEFAULT_DT_HOURS,
            rate_floor: 0.0,
            report_every_hours: DEFAULT_REPORT_EVERY_HOURS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentsBlock {
    pub count: usize,
    pub groups: Vec<usize>,
    pub initial_dissatisfaction: PerAgent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerAgent {
    Uniform(f64),
    Each(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkBlock {
    FullWithinGroups {
        #[serde(default = "unit_weight")]
        weight: f64,
    },
    Dense {
        weights: Vec<Vec<f64>>,
    },
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulesBlock {
    pub electricity: ScheduleSpec,
    pub media_access: ScheduleSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Broadcast(Vec<[f64; 2]>),
    PerAgent(Vec<Vec<[f64; 2]>>),
}

fn to_breakpoints(pairs: &[[f64; 2]]) -> Vec<Breakpoint> {
    pairs
        .iter()
        .map(|&[start_hour, value]| Breakpoint { start_hour, value })
        .collect()
}

fn to_pairs(schedule: &PiecewiseSchedule) -> Vec<[f64; 2]> {
    schedule
        .breakpoints()
        .iter()
        .map(|b| [b.start_hour, b.value])
        .collect()
}

impl ScheduleSpec {
    fn collect(&self, field: &str, n: usize, horizon: f64, out: &mut Vec<Violation>) {
        match self {
            ScheduleSpec::Broadcast(pairs) => collect_schedule_violations(
                &format!("{field}.broadcast"),
                &to_breakpoints(pairs),
                horizon,
                out,
            ),
            ScheduleSpec::PerAgent(lists) => {
                if lists.len() != n {
                    out.push(Violation::new(
                        format!("{field}.per_agent"),
                        format!("has {} schedules but there are {n} agents", lists.len()),
                    ));
                }
                for (i, pairs) in lists.iter().enumerate() {
                    collect_schedule_violations(
                        &format!("{field}.per_agent[{i}]"),
                        &to_breakpoints(pairs),
                        horizon,
                        out,
                    );
                }
            }
        }
    }

    fn expand(&self, n: usize, horizon: f64) -> Result<Vec<PiecewiseSchedule>, ValidationError> {
        match self {
            ScheduleSpec::Broadcast(pairs) => {
                let schedule = PiecewiseSchedule::new(pairs.iter().map(|&[s, v]| (s, v)), horizon)?;
                Ok(vec![schedule; n])
            }
            ScheduleSpec::PerAgent(lists) => lists
                .iter()
                .map(|pairs| PiecewiseSchedule::new(pairs.iter().map(|&[s, v]| (s, v)), horizon))
                .collect(),
        }
    }

    fn compress(schedules: &[PiecewiseSchedule]) -> Self {
        match schedules.first() {
            Some(first) if schedules.iter().all(|s| s == first) => {
                ScheduleSpec::Broadcast(to_pairs(first))
            }
            _ => ScheduleSpec::PerAgent(schedules.iter().map(to_pairs).collect()),
        }
    }
}

impl ScenarioFile {
    /// Validates the whole document, reporting every violated invariant.
    pub fn into_scenario(self) -> Result<Scenario, ValidationError> {
        let mut violations = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            violations.push(Violation::new(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }

        let builder = ParamsBuilder {
            omega1: self.params.omega1,
            omega2: self.params.omega2,
            dt_hours: self.params.dt_hours,
            rate_floor: self.params.rate_floor,
            horizon_hours: self.horizon_hours,
            report_every_hours: self.params.report_every_hours,
        };
        builder.collect_violations("params", &mut violations);

        let n = self.agents.count;
        if n == 0 {
            violations.push(Violation::new("agents.count", "must be at least 1"));
        }
        if self.agents.groups.len() != n {
            violations.push(Violation::new(
                "agents.groups",
                format!(
                    "has {} entries but agents.count is {n}",
                    self.agents.groups.len()
                ),
            ));
        }
        let initial = match &self.agents.initial_dissatisfaction {
            PerAgent::Uniform(d) => vec![*d; n],
            PerAgent::Each(values) => {
                if values.len() != n {
                    violations.push(Violation::new(
                        "agents.initial_dissatisfaction",
                        format!("has {} entries but agents.count is {n}", values.len()),
                    ));
                }
                values.clone()
            }
        };
        collect_state_violations("agents.initial_dissatisfaction", &initial, &mut violations);

        let base = match &self.network {
            NetworkBlock::FullWithinGroups { weight } => {
                if !(weight.is_finite() && *weight >= 0.0) {
                    violations.push(Violation::new(
                        "network.weight",
                        format!("{weight} must be a finite weight >= 0"),
                    ));
                }
                Some(full_within_groups_matrix(&self.agents.groups, *weight))
            }
            NetworkBlock::Dense { weights } => match WeightMatrix::from_rows(weights) {
                Ok(m) => Some(m),
                Err(_) => {
                    violations.push(Violation::new(
                        "network.weights",
                        "must be a square matrix (every row as long as the number of rows)",
                    ));
                    None
                }
            },
        };
        if let Some(base) = &base {
            collect_network_violations(base, &self.agents.groups, &mut violations);
        }

        self.schedules.electricity.collect(
            "schedules.electricity",
            n,
            self.horizon_hours,
            &mut violations,
        );
        self.schedules.media_access.collect(
            "schedules.media_access",
            n,
            self.horizon_hours,
            &mut violations,
        );

        ValidationError::check(violations)?;

        let params = builder.build()?;
        let network = ContagionNetwork::new(base.expect("checked above"), self.agents.groups)?;
        let electricity = self.schedules.electricity.expand(n, self.horizon_hours)?;
        let media_access = self.schedules.media_access.expand(n, self.horizon_hours)?;
        Scenario::new(
            self.label,
            params,
            network,
            electricity,
            media_access,
            AgentState::new(initial)?,
        )
    }

    /// Compact document for `scenario`: broadcast schedules, the network
    /// shorthand and a scalar initial level are used wherever they are exact.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let params = scenario.params();
        let initial = scenario.initial().dissatisfaction();
        let initial_dissatisfaction = match initial.first() {
            Some(&first) if initial.iter().all(|&d| d == first) => PerAgent::Uniform(first),
            _ => PerAgent::Each(initial.to_vec()),
        };
        let network = match scenario.network().uniform_within_group_weight() {
            Some(weight) => NetworkBlock::FullWithinGroups { weight },
            None => NetworkBlock::Dense {
                weights: scenario.network().base_weights().to_rows(),
            },
        };
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            label: scenario.label().to_string(),
            horizon_hours: params.horizon_hours(),
            params: ParamsBlock {
                omega1: params.omega1(),
                omega2: params.omega2(),
                dt_hours: params.dt_hours(),
                rate_floor: params.rate_floor(),
                report_every_hours: params.report_every_hours(),
            },
            agents: AgentsBlock {
                count: scenario.n_agents(),
                groups: scenario.network().group_of().to_vec(),
                initial_dissatisfaction,
            },
            network,
            schedules: SchedulesBlock {
                electricity: ScheduleSpec::compress(scenario.electricity()),
                media_access: ScheduleSpec::compress(scenario.media_access()),
            },
        }
    }
}

/// Parses a scenario document held in memory; `origin` is only used in
/// error messages.
pub fn parse_scenario(text: &str, origin: &Path) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(file.into_scenario()?)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text, path)
}

pub fn scenario_to_json(scenario: &Scenario) -> String {
    let mut text = serde_json::to_string_pretty(&ScenarioFile::from_scenario(scenario))
        .expect("scenario documents always serialize");
    text.push('\n');
    text
}

pub fn write_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, scenario_to_json(scenario)).map_err(|e| Error::io(path, e))
}

/// SHA-256 of the compact scenario document, hex encoded.
pub fn scenario_digest(scenario: &Scenario) -> String {
    let bytes = serde_json::to_vec(&ScenarioFile::from_scenario(scenario))
        .expect("scenario documents always serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseStudyVariant {
    FullAccess,
    LimitedAccess,
}

impl CaseStudyVariant {
    pub fn slug(self) -> &'static str {
        match self {
            CaseStudyVariant::FullAccess => "full",
            CaseStudyVariant::LimitedAccess => "limited",
        }
    }

    pub fn media_access(self) -> f64 {
        match self {
            CaseStudyVariant::FullAccess => 1.0,
            CaseStudyVariant::LimitedAccess => 0.5,
        }
    }
}

/// Hour at which the reference shedding window opens.
pub const CASE_STUDY_SHED_START: f64 = 17.0;
/// Hour at which it closes.
pub const CASE_STUDY_SHED_END: f64 = 34.0;
/// Shedding level inside the window (availability drops to `1 - level`).
pub const CASE_STUDY_SHED_LEVEL: f64 = 0.5;

/// The 48-hour reference scenario: nine end-users in three areas of three,
/// everyone neutral (`D = 0.5`) at the start, half the load shed between
/// hours 17 and 34, and media access either full or fixed at 0.5.
pub fn builtin_case_study(variant: CaseStudyVariant) -> Scenario {
    let params = ModelParams::default();
    let horizon = params.horizon_hours();
    let groups = vec![0, 0, 0, 1, 1, 1, 2, 2, 2];
    let n = groups.len();
    let network = ContagionNetwork::full_within_groups(groups, 1.0).expect("valid network");
    let electricity = PiecewiseSchedule::new(
        [
            (0.0, 1.0),
            (CASE_STUDY_SHED_START, 1.0 - CASE_STUDY_SHED_LEVEL),
            (CASE_STUDY_SHED_END, 1.0),
        ],
        horizon,
    )
    .expect("valid schedule");
    let access =
        PiecewiseSchedule::constant(variant.media_access(), horizon).expect("valid schedule");
    Scenario::new(
        format!("case-study-{}-access", variant.slug()),
        params,
        network,
        vec![electricity; n],
        vec![access; n],
        AgentState::uniform(n, 0.5).expect("valid state"),
    )
    .expect("built-in scenario is valid")
}

/// Number formatting used in every CSV: 9 significant digits, `%g` style.
pub fn format_sig9(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{value:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        return format!("{}e{exp}", trim_fraction(mantissa));
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_fraction(&format!("{value:.decimals$}")).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Paths of the files written by [`write_results`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultFiles {
    pub agents_csv: PathBuf,
    pub aggregates_csv: PathBuf,
    pub manifest: PathBuf,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes per-agent and aggregate CSVs plus the manifest into `out_dir`.
pub fn write_results(result: &SimulationResult, out_dir: impl AsRef<Path>) -> Result<ResultFiles> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = ResultFiles {
        agents_csv: out_dir.join(AGENTS_CSV),
        aggregates_csv: out_dir.join(AGGREGATES_CSV),
        manifest: out_dir.join(MANIFEST_JSON),
    };

    let per_agent = result.times().iter().enumerate().flat_map(|(k, &t)| {
        (0..result.n_agents()).map(move |n| {
            let d = result.trajectory(n)[k];
            vec![
                format_sig9(t),
                n.to_string(),
                result.group_of()[n].to_string(),
                format_sig9(d),
                format_sig9(1.0 - d),
            ]
        })
    });
    write_rows(
        &files.agents_csv,
        &[
            "t_hours",
            "agent_id",
            "group",
            "dissatisfaction",
            "satisfaction",
        ],
        per_agent,
    )?;

    let aggregates = result.aggregates().iter().map(|row| {
        vec![
            format_sig9(row.time),
            row.scope.to_string(),
            format_sig9(row.mean_satisfaction),
            format_sig9(row.min_satisfaction),
            format_sig9(row.max_satisfaction),
            format_sig9(row.std_satisfaction),
        ]
    });
    write_rows(
        &files.aggregates_csv,
        &["t_hours", "scope", "mean_s", "min_s", "max_s", "std_s"],
        aggregates,
    )?;

    write_json(&files.manifest, &result.manifest)?;
    Ok(files)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::io(path, e.into()))?;
    text.push('\n');
    file.write_all(text.as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Side-by-side global mean satisfaction, one column per labelled run.
/// Runs must share report times.
pub fn write_comparison(path: impl AsRef<Path>, runs: &[(&str, &SimulationResult)]) -> Result<()> {
    let path = path.as_ref();
    let Some((_, first)) = runs.first() else {
        return write_rows(path, &["t_hours"], std::iter::empty::<Vec<String>>());
    };
    for (label, run) in runs {
        if run.times() != first.times() {
            return Err(ValidationError::single(
                format!("comparison.{label}"),
                "runs in a comparison must share report times",
            )
            .into());
        }
    }
    let header: Vec<String> = std::iter::once("t_hours".to_string())
        .chain(runs.iter().map(|(label, _)| format!("mean_s_{label}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let series: Vec<Vec<f64>> = runs.iter().map(|(_, r)| r.mean_satisfaction()).collect();
    let rows = first.times().iter().enumerate().map(|(k, &t)| {
        std::iter::once(format_sig9(t))
            .chain(series.iter().map(|s| format_sig9(s[k])))
            .collect::<Vec<_>>()
    });
    write_rows(path, &header, rows)
}
