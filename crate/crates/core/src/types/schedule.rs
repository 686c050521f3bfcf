use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError, Violation};

/// Start of a constant segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub start_hour: f64,
    pub value: f64,
}

/// A `[0, 1]` signal held constant on left-closed, right-open segments.
///
/// Used for electricity availability `E` and media access `I`. The first
/// breakpoint is always at hour 0 and the last segment runs to the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSchedule {
    breakpoints: Vec<Breakpoint>,
    horizon_hours: f64,
}

impl PiecewiseSchedule {
    pub fn new(
        breakpoints: impl IntoIterator<Item = (f64, f64)>,
        horizon_hours: f64,
    ) -> Result<Self, ValidationError> {
        let breakpoints: Vec<Breakpoint> = breakpoints
            .into_iter()
            .map(|(start_hour, value)| Breakpoint { start_hour, value })
            .collect();
        let mut violations = Vec::new();
        collect_violations("schedule", &breakpoints, horizon_hours, &mut violations);
        ValidationError::check(violations)?;
        Ok(Self {
            breakpoints,
            horizon_hours,
        })
    }

    pub fn constant(value: f64, horizon_hours: f64) -> Result<Self, ValidationError> {
        Self::new([(0.0, value)], horizon_hours)
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn horizon_hours(&self) -> f64 {
        self.horizon_hours
    }

    /// Value of the unique segment containing `t`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if !(0.0..self.horizon_hours).contains(&t) {
            return Err(Error::OutOfRange {
                t,
                horizon: self.horizon_hours,
            });
        }
        // breakpoints[0] sits at 0, so the partition point is at least 1
        let idx = self.breakpoints.partition_point(|b| b.start_hour <= t);
        Ok(self.breakpoints[idx - 1].value)
    }

    /// Pointwise combination of two schedules over the same horizon.
    ///
    /// Segments are split at the union of both breakpoint sets and adjacent
    /// segments with equal values are merged, so the result is canonical.
    /// `combine` must map `[0, 1]` pairs into `[0, 1]`.
    pub fn zip_with(
        &self,
        other: &PiecewiseSchedule,
        combine: impl Fn(f64, f64) -> f64,
    ) -> Result<PiecewiseSchedule> {
        if self.horizon_hours != other.horizon_hours {
            return Err(ValidationError::single(
                "schedule.horizon_hours",
                format!(
                    "cannot combine schedules with horizons {} and {}",
                    self.horizon_hours, other.horizon_hours
                ),
            )
            .into());
        }
        let mut starts: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .map(|b| b.start_hour)
            .collect();
        starts.sort_by(f64::total_cmp);
        starts.dedup();

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(starts.len());
        for start in starts {
            let value = combine(self.value_at(start)?, other.value_at(start)?);
            if merged.last().is_some_and(|&(_, v)| v == value) {
                continue;
            }
            merged.push((start, value));
        }
        Ok(PiecewiseSchedule::new(merged, self.horizon_hours)?)
    }
}

/// Pushes one violation per broken schedule invariant, prefixed by `field`.
pub(crate) fn collect_violations(
    field: &str,
    breakpoints: &[Breakpoint],
    horizon_hours: f64,
    out: &mut Vec<Violation>,
) {
    if !(horizon_hours.is_finite() && horizon_hours > 0.0) {
        out.push(Violation::new(
            format!("{field}.horizon_hours"),
            format!("{horizon_hours} must be a positive finite number of hours"),
        ));
    }
    let Some(first) = breakpoints.first() else {
        out.push(Violation::new(
            field,
            "needs at least one breakpoint (starting at hour 0)",
        ));
        return;
    };
    if first.start_hour != 0.0 {
        out.push(Violation::new(
            format!("{field}[0].start_hour"),
            format!(
                "first breakpoint must start at hour 0, found {}",
                first.start_hour
            ),
        ));
    }
    for (i, b) in breakpoints.iter().enumerate() {
        if !(0.0..=1.0).contains(&b.value) {
            out.push(Violation::new(
                format!("{field}[{i}].value"),
                format!("{} is outside [0, 1]", b.value),
            ));
        }
        if !b.start_hour.is_finite() || b.start_hour < 0.0 {
            out.push(Violation::new(
                format!("{field}[{i}].start_hour"),
                format!("{} must be a finite hour >= 0", b.start_hour),
            ));
        } else if horizon_hours.is_finite() && b.start_hour >= horizon_hours {
            out.push(Violation::new(
                format!("{field}[{i}].start_hour"),
                format!("{} must be below the horizon {horizon_hours}", b.start_hour),
            ));
        }
        if i > 0
            && b.start_hour.partial_cmp(&breakpoints[i - 1].start_hour)
                != Some(std::cmp::Ordering::Greater)
        {
            out.push(Violation::new(
                format!("{field}[{i}].start_hour"),
                format!(
                    "breakpoints must be strictly increasing: {} follows {}",
                    b.start_hour,
                    breakpoints[i - 1].start_hour
                ),
            ));
        }
    }
}
