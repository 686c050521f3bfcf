use std::fmt;

use serde::Serialize;

use super::network::ContagionNetwork;
use super::params::ModelParams;
use super::schedule::PiecewiseSchedule;
use crate::error::{ValidationError, Violation};

/// Dense agent index `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AgentId(pub usize);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Per-agent dissatisfaction levels, each in `[0, 1]`.
///
/// Satisfaction is always derived as `1 - D`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState(Vec<f64>);

impl AgentState {
    pub fn new(dissatisfaction: Vec<f64>) -> Result<Self, ValidationError> {
        let mut violations = Vec::new();
        collect_state_violations("dissatisfaction", &dissatisfaction, &mut violations);
        ValidationError::check(violations)?;
        Ok(Self(dissatisfaction))
    }

    pub fn uniform(n: usize, level: f64) -> Result<Self, ValidationError> {
        Self::new(vec![level; n])
    }

    pub fn dissatisfaction(&self) -> &[f64] {
        &self.0
    }

    pub fn satisfaction(&self, agent: AgentId) -> f64 {
        1.0 - self.0[agent.0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn collect_state_violations(field: &str, values: &[f64], out: &mut Vec<Violation>) {
    for (n, &d) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&d) {
            out.push(Violation::new(
                format!("{field}[{n}]"),
                format!("agent {n}: {d} is outside [0, 1]"),
            ));
        }
    }
}

/// Everything a simulation run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    label: String,
    params: ModelParams,
    network: ContagionNetwork,
    electricity: Vec<PiecewiseSchedule>,
    media_access: Vec<PiecewiseSchedule>,
    initial: AgentState,
}

impl Scenario {
    pub fn new(
        label: impl Into<String>,
        params: ModelParams,
        network: ContagionNetwork,
        electricity: Vec<PiecewiseSchedule>,
        media_access: Vec<PiecewiseSchedule>,
        initial: AgentState,
    ) -> Result<Self, ValidationError> {
        let mut violations = Vec::new();
        let n = network.n_agents();
        if n == 0 {
            violations.push(Violation::new(
                "agents.count",
                "a scenario needs at least one agent",
            ));
        }
        for (field, len) in [
            ("schedules.electricity", electricity.len()),
            ("schedules.media_access", media_access.len()),
            ("agents.initial_dissatisfaction", initial.len()),
        ] {
            if len != n {
                violations.push(Violation::new(
                    field,
                    format!("has {len} entries but there are {n} agents"),
                ));
            }
        }
        let horizon = params.horizon_hours();
        for (field, schedules) in [
            ("schedules.electricity", &electricity),
            ("schedules.media_access", &media_access),
        ] {
            for (i, s) in schedules.iter().enumerate() {
                if s.horizon_hours() != horizon {
                    violations.push(Violation::new(
                        format!("{field}[{i}]"),
                        format!(
                            "schedule horizon {} differs from the scenario horizon {horizon}",
                            s.horizon_hours()
                        ),
                    ));
                }
            }
        }
        ValidationError::check(violations)?;
        Ok(Self {
            label: label.into(),
            params,
            network,
            electricity,
            media_access,
            initial,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn network(&self) -> &ContagionNetwork {
        &self.network
    }

    pub fn electricity(&self) -> &[PiecewiseSchedule] {
        &self.electricity
    }

    pub fn media_access(&self) -> &[PiecewiseSchedule] {
        &self.media_access
    }

    pub fn initial(&self) -> &AgentState {
        &self.initial
    }

    pub fn n_agents(&self) -> usize {
        self.network.n_agents()
    }

    /// Same scenario with the electricity schedules replaced.
    pub fn with_electricity(
        &self,
        electricity: Vec<PiecewiseSchedule>,
    ) -> Result<Scenario, ValidationError> {
        Scenario::new(
            self.label.clone(),
            self.params,
            self.network.clone(),
            electricity,
            self.media_access.clone(),
            self.initial.clone(),
        )
    }

    /// Same scenario with different parameters.
    pub fn with_params(&self, params: ModelParams) -> Result<Scenario, ValidationError> {
        Scenario::new(
            self.label.clone(),
            params,
            self.network.clone(),
            self.electricity.clone(),
            self.media_access.clone(),
            self.initial.clone(),
        )
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Scenario {
        self.label = label.into();
        self
    }
}
