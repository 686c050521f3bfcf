use std::collections::BTreeMap;

use serde::Serialize;

use super::params::ModelParams;
use crate::metrics::{AggregateRow, Scope};

pub const TOOL_NAME: &str = "socio-grid-sim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reproducibility record written next to every result set.
///
/// Carries no wall-clock timestamp so identical runs give identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub label: String,
    pub input_digest: String,
    pub n_agents: usize,
    pub group_sizes: Vec<usize>,
    pub params: ModelParams,
    pub rate_floor_active: bool,
    pub integrator: String,
    pub schedule_sampling: String,
    pub std_convention: String,
    pub report_times: usize,
    pub clamp_events: u64,
    /// Command-line overrides applied on top of the scenario file.
    pub overrides: BTreeMap<String, f64>,
    /// Anything extra a caller wants recorded (planner settings, variant, ...).
    pub extra: BTreeMap<String, String>,
}

/// Trajectories and aggregate statistics at each report time.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    times: Vec<f64>,
    group_of: Vec<usize>,
    n_groups: usize,
    per_agent: Vec<Vec<f64>>,
    aggregates: Vec<AggregateRow>,
    pub manifest: Manifest,
}

impl SimulationResult {
    /// `per_agent[n][k]` is agent `n`'s dissatisfaction at `times[k]`;
    /// `aggregates` holds, for each time, one row per group followed by
    /// the global row.
    pub fn from_parts(
        times: Vec<f64>,
        group_of: Vec<usize>,
        per_agent: Vec<Vec<f64>>,
        aggregates: Vec<AggregateRow>,
        manifest: Manifest,
    ) -> Self {
        let n_groups = group_of.iter().max().map_or(0, |g| g + 1);
        debug_assert!(per_agent.iter().all(|traj| traj.len() == times.len()));
        debug_assert_eq!(aggregates.len(), times.len() * (n_groups + 1));
        Self {
            times,
            group_of,
            n_groups,
            per_agent,
            aggregates,
            manifest,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn group_of(&self) -> &[usize] {
        &self.group_of
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn n_agents(&self) -> usize {
        self.per_agent.len()
    }

    /// Dissatisfaction trajectory of one agent.
    pub fn trajectory(&self, agent: usize) -> &[f64] {
        &self.per_agent[agent]
    }

    pub fn trajectories(&self) -> &[Vec<f64>] {
        &self.per_agent
    }

    /// Dissatisfaction of every agent at report index `k`.
    pub fn state_at(&self, k: usize) -> Vec<f64> {
        self.per_agent.iter().map(|traj| traj[k]).collect()
    }

    pub fn aggregates(&self) -> &[AggregateRow] {
        &self.aggregates
    }

    /// Rows (groups then global) at report index `k`.
    pub fn rows_at(&self, k: usize) -> &[AggregateRow] {
        let width = self.n_groups + 1;
        &self.aggregates[k * width..(k + 1) * width]
    }

    pub fn global_rows(&self) -> impl Iterator<Item = &AggregateRow> {
        self.aggregates
            .iter()
            .filter(|row| row.scope == Scope::Global)
    }

    pub fn group_rows(&self, group: usize) -> impl Iterator<Item = &AggregateRow> {
        self.aggregates
            .iter()
            .filter(move |row| row.scope == Scope::Group(group))
    }

    /// Global mean satisfaction at each report time.
    pub fn mean_satisfaction(&self) -> Vec<f64> {
        self.global_rows()
            .map(|row| row.mean_satisfaction)
            .collect()
    }

    /// Global mean satisfaction at hour `t`, if `t` is a report time.
    pub fn mean_satisfaction_at(&self, t: f64) -> Option<f64> {
        let k = self.times.iter().position(|&x| (x - t).abs() < 1e-9)?;
        Some(self.rows_at(k)[self.n_groups].mean_satisfaction)
    }
}
