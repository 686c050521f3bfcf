//! Group-level summaries of agent states: mean, extremes and heterogeneity
//! of satisfaction, per group and for the whole population.
//!
//! Spread is the population standard deviation (divide by `n`, not `n - 1`);
//! groups in the reference scenario have three members, where the two
//! conventions differ noticeably.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Scope {
    Group(usize),
    Global,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Group(g) => write!(f, "group_{g}"),
            Scope::Global => f.write_str("global"),
        }
    }
}

/// Satisfaction statistics for one scope at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregateRow {
    pub time: f64,
    pub scope: Scope,
    pub mean_satisfaction: f64,
    pub min_satisfaction: f64,
    pub max_satisfaction: f64,
    pub std_satisfaction: f64,
}

impl AggregateRow {
    /// Statistics of `1 - d` over `dissatisfaction`, which must be nonempty.
    pub fn over(
        time: f64,
        scope: Scope,
        dissatisfaction: impl Iterator<Item = f64> + Clone,
    ) -> Self {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for d in dissatisfaction.clone() {
            let s = 1.0 - d;
            count += 1;
            sum += s;
            min = min.min(s);
            max = max.max(s);
        }
        debug_assert!(count > 0);
        let mean = sum / count as f64;
        let var = dissatisfaction
            .map(|d| {
                let dev = (1.0 - d) - mean;
                dev * dev
            })
            .sum::<f64>()
            / count as f64;
        // rounding can put the mean a hair outside [min, max] for
        // near-constant inputs
        let mean = mean.clamp(min, max);
        Self {
            time,
            scope,
            mean_satisfaction: mean,
            min_satisfaction: min,
            max_satisfaction: max,
            std_satisfaction: var.sqrt(),
        }
    }
}

/// One row per group (in index order) followed by one global row.
pub fn aggregate(
    time: f64,
    dissatisfaction: &[f64],
    group_of: &[usize],
) -> Result<Vec<AggregateRow>> {
    if dissatisfaction.len() != group_of.len() {
        return Err(Error::Dimension {
            what: "group assignment",
            expected: dissatisfaction.len(),
            found: group_of.len(),
        });
    }
    if dissatisfaction.is_empty() {
        return Err(Error::EmptyGroup(0));
    }
    let n_groups = group_of.iter().max().map_or(0, |g| g + 1);
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); n_groups];
    for (&d, &g) in dissatisfaction.iter().zip(group_of) {
        members[g].push(d);
    }
    let mut rows = Vec::with_capacity(n_groups + 1);
    for (g, values) in members.iter().enumerate() {
        if values.is_empty() {
            return Err(Error::EmptyGroup(g));
        }
        rows.push(AggregateRow::over(
            time,
            Scope::Group(g),
            values.iter().copied(),
        ));
    }
    rows.push(AggregateRow::over(
        time,
        Scope::Global,
        dissatisfaction.iter().copied(),
    ));
    Ok(rows)
}
