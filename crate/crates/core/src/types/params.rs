use serde::Serialize;

use crate::error::{ValidationError, Violation};

/// Slack used for "dt divides the reporting interval" style checks.
pub const DIVISIBILITY_TOLERANCE: f64 = 1e-9;

/// Resolved model parameters. Only obtainable through [`ParamsBuilder`],
/// so every instance satisfies the invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    omega1: f64,
    omega2: f64,
    dt_hours: f64,
    rate_floor: f64,
    horizon_hours: f64,
    report_every_hours: f64,
}

impl ModelParams {
    pub fn builder() -> ParamsBuilder {
        ParamsBuilder::default()
    }

    /// Weight of the local electricity term.
    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    /// Weight of the social contagion term.
    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn dt_hours(&self) -> f64 {
        self.dt_hours
    }

    /// Lower bound on the per-agent update rate. Zero leaves the
    /// all-satisfied state absorbing.
    pub fn rate_floor(&self) -> f64 {
        self.rate_floor
    }

    pub fn horizon_hours(&self) -> f64 {
        self.horizon_hours
    }

    pub fn report_every_hours(&self) -> f64 {
        self.report_every_hours
    }

    /// Euler steps between two reports.
    pub fn steps_per_report(&self) -> usize {
        (self.report_every_hours / self.dt_hours).round() as usize
    }

    /// Total Euler steps over the horizon.
    pub fn total_steps(&self) -> usize {
        (self.horizon_hours / self.dt_hours + DIVISIBILITY_TOLERANCE).floor() as usize
    }

    pub fn to_builder(&self) -> ParamsBuilder {
        ParamsBuilder {
            omega1: self.omega1,
            omega2: self.omega2,
            dt_hours: self.dt_hours,
            rate_floor: self.rate_floor,
            horizon_hours: self.horizon_hours,
            report_every_hours: self.report_every_hours,
        }
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ParamsBuilder::default()
            .build()
            .expect("default parameters are valid")
    }
}

/// Raw, unvalidated parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamsBuilder {
    pub omega1: f64,
    pub omega2: f64,
    pub dt_hours: f64,
    pub rate_floor: f64,
    pub horizon_hours: f64,
    pub report_every_hours: f64,
}

pub const DEFAULT_OMEGA: f64 = 0.5;
pub const DEFAULT_DT_HOURS: f64 = 0.1;
pub const DEFAULT_HORIZON_HOURS: f64 = 48.0;
pub const DEFAULT_REPORT_EVERY_HOURS: f64 = 1.0;

impl Default for ParamsBuilder {
    fn default() -> Self {
        Self {
            omega1: DEFAULT_OMEGA,
            omega2: DEFAULT_OMEGA,
            dt_hours: DEFAULT_DT_HOURS,
            rate_floor: 0.0,
            horizon_hours: DEFAULT_HORIZON_HOURS,
            report_every_hours: DEFAULT_REPORT_EVERY_HOURS,
        }
    }
}

impl ParamsBuilder {
    pub fn omega1(mut self, v: f64) -> Self {
        self.omega1 = v;
        self
    }

    pub fn omega2(mut self, v: f64) -> Self {
        self.omega2 = v;
        self
    }

    pub fn dt_hours(mut self, v: f64) -> Self {
        self.dt_hours = v;
        self
    }

    pub fn rate_floor(mut self, v: f64) -> Self {
        self.rate_floor = v;
        self
    }

    pub fn horizon_hours(mut self, v: f64) -> Self {
        self.horizon_hours = v;
        self
    }

    pub fn report_every_hours(mut self, v: f64) -> Self {
        self.report_every_hours = v;
        self
    }

    pub fn build(self) -> Result<ModelParams, ValidationError> {
        let mut violations = Vec::new();
        self.collect_violations("params", &mut violations);
        ValidationError::check(violations)?;
        Ok(ModelParams {
            omega1: self.omega1,
            omega2: self.omega2,
            dt_hours: self.dt_hours,
            rate_floor: self.rate_floor,
            horizon_hours: self.horizon_hours,
            report_every_hours: self.report_every_hours,
        })
    }

    pub(crate) fn collect_violations(&self, field: &str, out: &mut Vec<Violation>) {
        let unit = 0.0..=1.0;
        for (name, v) in [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("rate_floor", self.rate_floor),
        ] {
            if !unit.contains(&v) {
                out.push(Violation::new(
                    format!("{field}.{name}"),
                    format!("{v} is outside [0, 1]"),
                ));
            }
        }
        if self.omega1 + self.omega2 > 1.0 {
            out.push(Violation::new(
                format!("{field}.omega1+omega2"),
                format!(
                    "omega1 + omega2 must be ≤ 1 (got {} + {} = {})",
                    self.omega1,
                    self.omega2,
                    self.omega1 + self.omega2
                ),
            ));
        }
        let dt_ok = self.dt_hours > 0.0 && self.dt_hours <= 1.0;
        if !dt_ok {
            out.push(Violation::new(
                format!("{field}.dt_hours"),
                format!("{} is outside (0, 1]", self.dt_hours),
            ));
        }
        if !(self.horizon_hours.is_finite() && self.horizon_hours > 0.0) {
            out.push(Violation::new(
                format!("{field}.horizon_hours"),
                format!(
                    "{} must be a positive finite number of hours",
                    self.horizon_hours
                ),
            ));
        }
        if !(self.report_every_hours.is_finite() && self.report_every_hours > 0.0) {
            out.push(Violation::new(
                format!("{field}.report_every_hours"),
                format!(
                    "{} must be a positive finite number of hours",
                    self.report_every_hours
                ),
            ));
        } else if dt_ok {
            let ratio = self.report_every_hours / self.dt_hours;
            if (ratio - ratio.round()).abs() * self.dt_hours > DIVISIBILITY_TOLERANCE
                || ratio.round() < 1.0
            {
                out.push(Violation::new(
                    format!("{field}.dt_hours"),
                    format!(
                        "dt_hours {} must divide report_every_hours {}",
                        self.dt_hours, self.report_every_hours
                    ),
                ));
            }
        }
    }
}
