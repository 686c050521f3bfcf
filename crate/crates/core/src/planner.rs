//! Fair rolling-blackout planning.
//!
//! A plan sheds load from whole groups during time slots. Its cost is read
//! off a full simulation of the base scenario with the plan applied:
//!
//! * `peak_mean_dissatisfaction`: the highest population-mean `D` over all
//!   report times;
//! * `unfairness`: the spread (max minus min) across groups of each group's
//!   time-averaged mean `D`;
//! * `combined = peak + lambda * unfairness`.
//!
//! Search runs over a discrete lattice: the horizon is cut into slots of
//! `granularity_hours` and every (group, slot) cell picks a level from the
//! configured set (0 is always allowed). Equal objectives (within
//! [`TIE_TOLERANCE`]) are broken by the lexicographically smallest plan
//! encoding, so results do not depend on evaluation order or thread count.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::simulate;
use crate::error::{Error, Result, ValidationError};
use crate::scenario_io::{format_sig9, scenario_digest, write_json};
use crate::types::{PiecewiseSchedule, Scenario, SimulationResult, DIVISIBILITY_TOLERANCE};

pub const PLAN_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_LAMBDA: f64 = 1.0;
pub const DEFAULT_RESTARTS: usize = 8;
/// Objectives closer than this are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Largest lattice the exhaustive strategy will enumerate.
pub const EXHAUSTIVE_LIMIT: usize = 1 << 20;
/// Slack on the shed-energy requirement, absorbing float summation error.
const ENERGY_TOLERANCE: f64 = 1e-9;
const MAX_LOCAL_PASSES: usize = 64;

fn snap_hours(t: f64) -> f64 {
    (t * 1e9).round() / 1e9
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShedSlot {
    pub group: usize,
    pub start_hour: f64,
    pub duration_hours: f64,
    pub level: f64,
}

impl ShedSlot {
    pub fn end_hour(&self) -> f64 {
        self.start_hour + self.duration_hours
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        self.group
            .cmp(&other.group)
            .then(self.start_hour.total_cmp(&other.start_hour))
            .then(self.duration_hours.total_cmp(&other.duration_hours))
            .then(self.level.total_cmp(&other.level))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheddingPlan {
    #[serde(default = "plan_schema_version")]
    pub schema_version: u32,
    pub granularity_hours: f64,
    pub slots: Vec<ShedSlot>,
}

fn plan_schema_version() -> u32 {
    PLAN_SCHEMA_VERSION
}

impl SheddingPlan {
    pub fn empty(granularity_hours: f64) -> Self {
        Self {
            schema_version: PLAN_SCHEMA_VERSION,
            granularity_hours,
            slots: Vec::new(),
        }
    }

    pub fn new(granularity_hours: f64, slots: Vec<ShedSlot>) -> Self {
        Self {
            schema_version: PLAN_SCHEMA_VERSION,
            granularity_hours,
            slots,
        }
        .canonical()
    }

    /// Slots sorted by (group, start) with zero-level slots dropped.
    pub fn canonical(mut self) -> Self {
        self.slots.retain(|s| s.level != 0.0);
        self.slots.sort_by(ShedSlot::cmp_key);
        self
    }

    /// Total shed energy: `sum level * duration * group size`.
    pub fn shed_energy(&self, group_sizes: &[usize]) -> f64 {
        self.slots
            .iter()
            .map(|s| {
                s.level * s.duration_hours * group_sizes.get(s.group).copied().unwrap_or(0) as f64
            })
            .sum()
    }

    /// Human-readable encoding, e.g. `g0@0+6:0.5;g2@6+6:0.5`.
    pub fn encoding(&self) -> String {
        self.slots
            .iter()
            .map(|s| {
                format!(
                    "g{}@{}+{}:{}",
                    s.group,
                    format_sig9(s.start_hour),
                    format_sig9(s.duration_hours),
                    format_sig9(s.level)
                )
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Lexicographic order over the canonical slot lists; shorter prefixes
    /// first, so the empty plan is the smallest.
    pub fn cmp_encoding(&self, other: &Self) -> Ordering {
        for (a, b) in self.slots.iter().zip(&other.slots) {
            match a.cmp_key(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.slots.len().cmp(&other.slots.len())
    }

    /// Checks the plan against a scenario's groups and horizon.
    pub fn check(&self, n_groups: usize, horizon_hours: f64) -> Result<()> {
        let mut problems = Vec::new();
        for (i, s) in self.slots.iter().enumerate() {
            if s.group >= n_groups {
                problems.push(format!(
                    "slot {i}: group {} does not exist ({n_groups} groups)",
                    s.group
                ));
            }
            if !(0.0..=1.0).contains(&s.level) {
                problems.push(format!("slot {i}: level {} is outside [0, 1]", s.level));
            }
            if !(s.start_hour.is_finite() && s.start_hour >= 0.0) {
                problems.push(format!("slot {i}: start {} must be >= 0", s.start_hour));
            }
            if !(s.duration_hours.is_finite() && s.duration_hours > 0.0) {
                problems.push(format!(
                    "slot {i}: duration {} must be > 0",
                    s.duration_hours
                ));
            }
            if s.end_hour() > horizon_hours + DIVISIBILITY_TOLERANCE {
                problems.push(format!(
                    "slot {i}: ends at hour {} past the horizon {horizon_hours}",
                    s.end_hour()
                ));
            }
        }
        let mut sorted = self.slots.clone();
        sorted.sort_by(ShedSlot::cmp_key);
        for pair in sorted.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.group == b.group && b.start_hour < a.end_hour() - DIVISIBILITY_TOLERANCE {
                problems.push(format!(
                    "group {}: slots starting at {} and {} overlap",
                    a.group, a.start_hour, b.start_hour
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InfeasiblePlan(problems.join("; ")))
        }
    }
}

/// Builds the base scenario with each group's availability reduced by its
/// shed level, floored at 0.
pub fn apply_plan(plan: &SheddingPlan, base: &Scenario) -> Result<Scenario> {
    let network = base.network();
    let horizon = base.params().horizon_hours();
    plan.check(network.n_groups(), horizon)?;

    let shed_by_group: Vec<PiecewiseSchedule> = (0..network.n_groups())
        .map(|g| {
            let mut slots: Vec<&ShedSlot> = plan.slots.iter().filter(|s| s.group == g).collect();
            slots.sort_by(|a, b| a.start_hour.total_cmp(&b.start_hour));
            shed_schedule(&slots, horizon)
        })
        .collect::<Result<_>>()?;

    let electricity = base
        .electricity()
        .iter()
        .zip(network.group_of())
        .map(|(avail, &g)| avail.zip_with(&shed_by_group[g], |e, shed| (e - shed).max(0.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(base.with_electricity(electricity)?)
}

fn shed_schedule(slots: &[&ShedSlot], horizon: f64) -> Result<PiecewiseSchedule> {
    let mut points: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let mut push = |t: f64, v: f64| {
        let t = snap_hours(t);
        match points.last_mut() {
            Some(last) if (last.0 - t).abs() <= DIVISIBILITY_TOLERANCE => last.1 = v,
            _ => points.push((t, v)),
        }
    };
    for s in slots {
        push(s.start_hour, s.level);
        let end = s.end_hour();
        if end < horizon - DIVISIBILITY_TOLERANCE {
            push(end, 0.0);
        }
    }
    points.dedup_by(|b, a| a.1 == b.1);
    Ok(PiecewiseSchedule::new(points, horizon)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanObjective {
    pub peak_mean_dissatisfaction: f64,
    pub unfairness: f64,
    pub lambda: f64,
    pub combined: f64,
}

impl PlanObjective {
    pub fn from_result(result: &SimulationResult, lambda: f64) -> Self {
        let n = result.n_agents() as f64;
        let n_times = result.times().len();
        let trajectories = result.trajectories();

        let peak = (0..n_times)
            .map(|k| trajectories.iter().map(|traj| traj[k]).sum::<f64>() / n)
            .fold(f64::NEG_INFINITY, f64::max);

        let mut group_time_means = vec![0.0; result.n_groups()];
        let mut sizes = vec![0usize; result.n_groups()];
        for &g in result.group_of() {
            sizes[g] += 1;
        }
        for k in 0..n_times {
            let mut sums = vec![0.0; result.n_groups()];
            for (traj, &g) in trajectories.iter().zip(result.group_of()) {
                sums[g] += traj[k];
            }
            for g in 0..sums.len() {
                group_time_means[g] += sums[g] / sizes[g] as f64;
            }
        }
        for m in &mut group_time_means {
            *m /= n_times as f64;
        }
        let hi = group_time_means
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let lo = group_time_means
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let unfairness = (hi - lo).max(0.0);

        Self {
            peak_mean_dissatisfaction: peak,
            unfairness,
            lambda,
            combined: peak + lambda * unfairness,
        }
    }
}

/// Simulates `base` under `plan` and scores the outcome.
pub fn evaluate_plan(plan: &SheddingPlan, base: &Scenario, lambda: f64) -> Result<PlanObjective> {
    check_lambda(lambda)?;
    let scenario = apply_plan(plan, base)?;
    Ok(PlanObjective::from_result(&simulate(&scenario)?, lambda))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(
            ValidationError::single("lambda", format!("{lambda} must be a finite value >= 0"))
                .into(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    GreedyRestarts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub required_energy: f64,
    pub granularity_hours: f64,
    pub shed_levels: Vec<f64>,
    pub strategy: Strategy,
    pub seed: u64,
    pub lambda: f64,
    /// Randomised restarts on top of the deterministic greedy pass.
    pub restarts: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            required_energy: 0.0,
            granularity_hours: 1.0,
            shed_levels: vec![0.0, 0.5],
            strategy: Strategy::GreedyRestarts,
            seed: 0,
            lambda: DEFAULT_LAMBDA,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub plan: SheddingPlan,
    pub objective: PlanObjective,
    /// Simulations run during the search.
    pub evaluations: usize,
}

/// The (group, slot) grid a search walks over.
#[derive(Debug, Clone)]
struct Lattice<'a> {
    base: &'a Scenario,
    granularity: f64,
    n_slots: usize,
    n_groups: usize,
    levels: Vec<f64>,
    group_sizes: Vec<usize>,
    required: f64,
    lambda: f64,
}

#[derive(Debug, Clone)]
struct Candidate {
    cells: Vec<usize>,
    plan: SheddingPlan,
    objective: PlanObjective,
}

impl Candidate {
    /// Strictly better objective, or tied and smaller encoding.
    fn beats(&self, other: &Candidate) -> bool {
        let diff = self.objective.combined - other.objective.combined;
        if diff < -TIE_TOLERANCE {
            true
        } else if diff > TIE_TOLERANCE {
            false
        } else {
            self.plan.cmp_encoding(&other.plan) == Ordering::Less
        }
    }
}

fn pick_best(candidates: impl IntoIterator<Item = Candidate>) -> Option<Candidate> {
    candidates.into_iter().fold(None, |best, c| match best {
        Some(b) if !c.beats(&b) => Some(b),
        _ => Some(c),
    })
}

impl<'a> Lattice<'a> {
    fn new(base: &'a Scenario, config: &PlannerConfig) -> Result<Self> {
        check_lambda(config.lambda)?;
        let horizon = base.params().horizon_hours();
        let g = config.granularity_hours;
        let mut problems = Vec::new();
        let mut n_slots = 0;
        if !(g.is_finite() && g > 0.0) {
            problems.push(format!("granularity {g} must be > 0"));
        } else {
            let ratio = horizon / g;
            if (ratio - ratio.round()).abs() * g > DIVISIBILITY_TOLERANCE || ratio.round() < 1.0 {
                problems.push(format!(
                    "granularity {g} h must divide the horizon {horizon} h"
                ));
            } else {
                n_slots = ratio.round() as usize;
            }
        }
        if config.shed_levels.iter().any(|l| !(0.0..=1.0).contains(l)) {
            problems.push(format!(
                "shed levels {:?} must lie in [0, 1]",
                config.shed_levels
            ));
        }
        if !(config.required_energy.is_finite() && config.required_energy >= 0.0) {
            problems.push(format!(
                "required energy {} must be >= 0",
                config.required_energy
            ));
        }
        if !problems.is_empty() {
            return Err(ValidationError::single("planner", problems.join("; ")).into());
        }

        let mut levels = config.shed_levels.clone();
        levels.push(0.0);
        levels.sort_by(f64::total_cmp);
        levels.dedup();

        Ok(Self {
            base,
            granularity: g,
            n_slots,
            n_groups: base.network().n_groups(),
            levels,
            group_sizes: base.network().group_sizes(),
            required: config.required_energy,
            lambda: config.lambda,
        })
    }

    fn n_cells(&self) -> usize {
        self.n_groups * self.n_slots
    }

    fn max_energy(&self) -> f64 {
        let top = self.levels.last().copied().unwrap_or(0.0);
        self.group_sizes
            .iter()
            .map(|&size| top * self.granularity * self.n_slots as f64 * size as f64)
            .sum()
    }

    fn cell_energy(&self, cell: usize, level_idx: usize) -> f64 {
        let group = cell / self.n_slots;
        self.levels[level_idx] * self.granularity * self.group_sizes[group] as f64
    }

    fn energy(&self, cells: &[usize]) -> f64 {
        cells
            .iter()
            .enumerate()
            .map(|(cell, &l)| self.cell_energy(cell, l))
            .sum()
    }

    fn feasible(&self, cells: &[usize]) -> bool {
        self.energy(cells) >= self.required - ENERGY_TOLERANCE
    }

    fn plan(&self, cells: &[usize]) -> SheddingPlan {
        let slots = cells
            .iter()
            .enumerate()
            .filter(|&(_, &l)| self.levels[l] > 0.0)
            .map(|(cell, &l)| ShedSlot {
                group: cell / self.n_slots,
                start_hour: snap_hours((cell % self.n_slots) as f64 * self.granularity),
                duration_hours: self.granularity,
                level: self.levels[l],
            })
            .collect();
        SheddingPlan::new(self.granularity, slots)
    }

    fn evaluate(&self, cells: Vec<usize>) -> Result<Candidate> {
        let plan = self.plan(&cells);
        let objective = evaluate_plan(&plan, self.base, self.lambda)?;
        Ok(Candidate {
            cells,
            plan,
            objective,
        })
    }

    fn evaluate_all(&self, batch: Vec<Vec<usize>>) -> Result<Vec<Candidate>> {
        batch
            .into_par_iter()
            .map(|cells| self.evaluate(cells))
            .collect()
    }
}

/// Largest shed energy the lattice allows: every cell at the top level.
pub fn max_achievable_energy(base: &Scenario, config: &PlannerConfig) -> Result<f64> {
    Ok(Lattice::new(base, config)?.max_energy())
}

/// Finds a plan shedding at least `required_energy` at minimum combined
/// objective.
pub fn plan_shedding(base: &Scenario, config: &PlannerConfig) -> Result<PlanOutcome> {
    let lattice = Lattice::new(base, config)?;
    let max_energy = lattice.max_energy();
    if config.required_energy > max_energy + ENERGY_TOLERANCE {
        return Err(Error::InfeasibleRequirement {
            required: config.required_energy,
            max_achievable: max_energy,
        });
    }
    if config.required_energy <= 0.0 {
        let plan = SheddingPlan::empty(lattice.granularity);
        let objective = evaluate_plan(&plan, base, config.lambda)?;
        return Ok(PlanOutcome {
            plan,
            objective,
            evaluations: 1,
        });
    }
    match config.strategy {
        Strategy::Exhaustive => exhaustive(&lattice),
        Strategy::GreedyRestarts => greedy_restarts(&lattice, config.seed, config.restarts),
    }
}

fn exhaustive(lattice: &Lattice) -> Result<PlanOutcome> {
    let n_levels = lattice.levels.len();
    let n_cells = lattice.n_cells();
    let total = (n_levels as f64).powi(n_cells as i32);
    if total > EXHAUSTIVE_LIMIT as f64 {
        return Err(Error::LatticeTooLarge {
            candidates: total,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let total = total as usize;

    // odometer order, cell 0 most significant
    let mut feasible = Vec::new();
    let mut cells = vec![0usize; n_cells];
    for _ in 0..total {
        if lattice.feasible(&cells) {
            feasible.push(cells.clone());
        }
        for digit in cells.iter_mut().rev() {
            *digit += 1;
            if *digit < n_levels {
                break;
            }
            *digit = 0;
        }
    }
    let evaluations = feasible.len();
    let best = pick_best(lattice.evaluate_all(feasible)?)
        .expect("maximal shedding is feasible once the requirement check passed");
    Ok(PlanOutcome {
        plan: best.plan,
        objective: best.objective,
        evaluations,
    })
}

/// Raises one cell at a time, always taking the best single-level increase,
/// until the requirement is met.
fn greedy_fill(
    lattice: &Lattice,
    start: Vec<usize>,
    order: &[usize],
    evals: &mut usize,
) -> Result<Candidate> {
    let top = lattice.levels.len() - 1;
    let mut current = start;
    loop {
        if lattice.feasible(&current) {
            *evals += 1;
            return lattice.evaluate(current);
        }
        let moves: Vec<Vec<usize>> = order
            .iter()
            .filter(|&&cell| current[cell] < top)
            .map(|&cell| {
                let mut next = current.clone();
                next[cell] += 1;
                next
            })
            .collect();
        *evals += moves.len();
        current = pick_best(lattice.evaluate_all(moves)?)
            .expect("an unfinished assignment always has a raisable cell")
            .cells;
    }
}

/// First-improvement search over single-level changes and
/// decrease-one-raise-another swaps that keep the plan feasible.
fn local_improve(
    lattice: &Lattice,
    mut best: Candidate,
    order: &[usize],
    evals: &mut usize,
) -> Result<Candidate> {
    let top = lattice.levels.len() - 1;
    for _ in 0..MAX_LOCAL_PASSES {
        let mut neighbours = Vec::new();
        for &up in order {
            if best.cells[up] < top {
                let mut raised = best.cells.clone();
                raised[up] += 1;
                neighbours.push(raised);
            }
        }
        for &down in order {
            if best.cells[down] == 0 {
                continue;
            }
            let mut lowered = best.cells.clone();
            lowered[down] -= 1;
            if lattice.feasible(&lowered) {
                neighbours.push(lowered.clone());
            }
            for &up in order {
                if up != down && lowered[up] < top {
                    let mut swapped = lowered.clone();
                    swapped[up] += 1;
                    if lattice.feasible(&swapped) {
                        neighbours.push(swapped);
                    }
                }
            }
        }
        *evals += neighbours.len();
        let improved = lattice
            .evaluate_all(neighbours)?
            .into_iter()
            .find(|c| c.beats(&best));
        match improved {
            Some(c) => best = c,
            None => break,
        }
    }
    Ok(best)
}

fn greedy_restarts(lattice: &Lattice, seed: u64, restarts: usize) -> Result<PlanOutcome> {
    let n_cells = lattice.n_cells();
    let natural: Vec<usize> = (0..n_cells).collect();
    let mut evals = 0;

    let baseline = greedy_fill(lattice, vec![0; n_cells], &natural, &mut evals)?;
    let mut best = local_improve(lattice, baseline, &natural, &mut evals)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = lattice.levels.len() - 1;
    for _ in 0..restarts {
        let mut order = natural.clone();
        order.shuffle(&mut rng);
        let mut start = vec![0; n_cells];
        if top > 0 {
            start[rng.random_range(0..n_cells)] = rng.random_range(1..=top);
        }
        let filled = greedy_fill(lattice, start, &order, &mut evals)?;
        let improved = local_improve(lattice, filled, &order, &mut evals)?;
        if improved.beats(&best) {
            best = improved;
        }
    }
    Ok(PlanOutcome {
        plan: best.plan,
        objective: best.objective,
        evaluations: evals,
    })
}

/// Summary written next to a plan file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanReport {
    pub schema_version: u32,
    pub base_label: String,
    pub base_digest: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub restarts: usize,
    pub required_energy: f64,
    pub max_achievable_energy: f64,
    pub shed_energy: f64,
    pub granularity_hours: f64,
    pub shed_levels: Vec<f64>,
    pub objective: PlanObjective,
    pub encoding: String,
    pub evaluations: usize,
}

impl PlanReport {
    pub fn new(base: &Scenario, config: &PlannerConfig, outcome: &PlanOutcome) -> Result<Self> {
        Ok(Self {
            schema_version: PLAN_SCHEMA_VERSION,
            base_label: base.label().to_string(),
            base_digest: scenario_digest(base),
            strategy: config.strategy,
            seed: config.seed,
            restarts: config.restarts,
            required_energy: config.required_energy,
            max_achievable_energy: max_achievable_energy(base, config)?,
            shed_energy: outcome.plan.shed_energy(&base.network().group_sizes()),
            granularity_hours: config.granularity_hours,
            shed_levels: config.shed_levels.clone(),
            objective: outcome.objective,
            encoding: outcome.plan.encoding(),
            evaluations: outcome.evaluations,
        })
    }
}

pub fn write_plan(plan: &SheddingPlan, path: impl AsRef<Path>) -> Result<()> {
    write_json(path.as_ref(), plan)
}

pub fn load_plan(path: impl AsRef<Path>) -> Result<SheddingPlan> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let plan: SheddingPlan = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if plan.schema_version != PLAN_SCHEMA_VERSION {
        return Err(ValidationError::single(
            "schema_version",
            format!(
                "unsupported plan version {}, expected {PLAN_SCHEMA_VERSION}",
                plan.schema_version
            ),
        )
        .into());
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario_io::{builtin_case_study, CaseStudyVariant};
    use crate::types::{AgentState, ContagionNetwork, ModelParams};

    fn always_on(variant: CaseStudyVariant) -> Scenario {
        let base = builtin_case_study(variant);
        let on = PiecewiseSchedule::constant(1.0, 48.0).unwrap();
        base.with_electricity(vec![on; 9]).unwrap()
    }

    fn small_base(groups: Vec<usize>, horizon: f64) -> Scenario {
        let params = ModelParams::builder()
            .horizon_hours(horizon)
            .build()
            .unwrap();
        let n = groups.len();
        let on = PiecewiseSchedule::constant(1.0, horizon).unwrap();
        Scenario::new(
            "small",
            params,
            ContagionNetwork::full_within_groups(groups, 1.0).unwrap(),
            vec![on.clone(); n],
            vec![on; n],
            AgentState::uniform(n, 0.3).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn empty_plan_matches_unshed_baseline() {
        let base = always_on(CaseStudyVariant::FullAccess);
        let obj = evaluate_plan(&SheddingPlan::empty(1.0), &base, 1.0).unwrap();
        let baseline = simulate(&base).unwrap();
        let peak = baseline
            .mean_satisfaction()
            .iter()
            .map(|s| 1.0 - s)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((obj.peak_mean_dissatisfaction - peak).abs() < 1e-12);
        assert_eq!(obj.unfairness, 0.0);
    }

    #[test]
    fn replicating_the_case_study_window_gives_identical_objective() {
        for variant in [
            CaseStudyVariant::FullAccess,
            CaseStudyVariant::LimitedAccess,
        ] {
            let base = always_on(variant);
            let slots = (0..3)
                .map(|group| ShedSlot {
                    group,
                    start_hour: 17.0,
                    duration_hours: 17.0,
                    level: 0.5,
                })
                .collect();
            let plan = SheddingPlan::new(17.0, slots);
            let via_plan = evaluate_plan(&plan, &base, 1.0).unwrap();
            let direct =
                PlanObjective::from_result(&simulate(&builtin_case_study(variant)).unwrap(), 1.0);
            assert_eq!(via_plan, direct);
            assert_eq!(
                apply_plan(&plan, &base).unwrap().electricity(),
                builtin_case_study(variant).electricity()
            );
        }
    }

    #[test]
    fn symmetric_plan_is_fair() {
        let base = always_on(CaseStudyVariant::FullAccess);
        let slots = (0..3)
            .map(|group| ShedSlot {
                group,
                start_hour: 6.0,
                duration_hours: 12.0,
                level: 0.7,
            })
            .collect();
        let obj = evaluate_plan(&SheddingPlan::new(6.0, slots), &base, 1.0).unwrap();
        assert_eq!(obj.unfairness, 0.0);
    }

    #[test]
    fn infeasible_plans_rejected() {
        let base = always_on(CaseStudyVariant::FullAccess);
        let overlap = SheddingPlan::new(
            1.0,
            vec![
                ShedSlot {
                    group: 0,
                    start_hour: 0.0,
                    duration_hours: 5.0,
                    level: 0.5,
                },
                ShedSlot {
                    group: 0,
                    start_hour: 4.0,
                    duration_hours: 2.0,
                    level: 0.5,
                },
            ],
        );
        assert!(matches!(
            evaluate_plan(&overlap, &base, 1.0),
            Err(Error::InfeasiblePlan(_))
        ));
        let overflow = SheddingPlan::new(
            1.0,
            vec![ShedSlot {
                group: 1,
                start_hour: 40.0,
                duration_hours: 10.0,
                level: 0.5,
            }],
        );
        assert!(matches!(
            evaluate_plan(&overflow, &base, 1.0),
            Err(Error::InfeasiblePlan(_))
        ));
        let no_group = SheddingPlan::new(
            1.0,
            vec![ShedSlot {
                group: 3,
                start_hour: 0.0,
                duration_hours: 1.0,
                level: 0.5,
            }],
        );
        assert!(evaluate_plan(&no_group, &base, 1.0).is_err());
    }

    #[test]
    fn adjacent_slots_do_not_overlap() {
        let base = always_on(CaseStudyVariant::FullAccess);
        let plan = SheddingPlan::new(
            0.1,
            (0..5)
                .map(|s| ShedSlot {
                    group: 0,
                    start_hour: snap_hours(s as f64 * 0.1),
                    duration_hours: 0.1,
                    level: 0.5,
                })
                .collect(),
        );
        let scenario = apply_plan(&plan, &base).unwrap();
        let bps = scenario.electricity()[0].breakpoints();
        assert_eq!(bps.len(), 2);
        assert_eq!((bps[1].start_hour, bps[1].value), (0.5, 1.0));
    }

    #[test]
    fn zero_requirement_gives_empty_plan() {
        let base = always_on(CaseStudyVariant::FullAccess);
        for strategy in [Strategy::Exhaustive, Strategy::GreedyRestarts] {
            let config = PlannerConfig {
                required_energy: 0.0,
                granularity_hours: 12.0,
                strategy,
                ..PlannerConfig::default()
            };
            let out = plan_shedding(&base, &config).unwrap();
            assert!(out.plan.slots.is_empty());
            assert_eq!(
                out.objective,
                evaluate_plan(&SheddingPlan::empty(12.0), &base, 1.0).unwrap()
            );
        }
    }

    #[test]
    fn infeasible_requirement_reports_maximum() {
        let base = small_base(vec![0, 0], 12.0);
        let config = PlannerConfig {
            required_energy: 100.0,
            granularity_hours: 6.0,
            shed_levels: vec![0.5],
            ..PlannerConfig::default()
        };
        match plan_shedding(&base, &config) {
            Err(Error::InfeasibleRequirement { max_achievable, .. }) => {
                assert_eq!(max_achievable, 0.5 * 12.0 * 2.0)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn forced_solution_for_full_capacity() {
        let base = small_base(vec![0, 0, 0], 12.0);
        for strategy in [Strategy::Exhaustive, Strategy::GreedyRestarts] {
            let config = PlannerConfig {
                required_energy: 0.5 * 12.0 * 3.0,
                granularity_hours: 4.0,
                shed_levels: vec![0.0, 0.5],
                strategy,
                ..PlannerConfig::default()
            };
            let out = plan_shedding(&base, &config).unwrap();
            assert_eq!(out.plan.slots.len(), 3);
            assert!(out
                .plan
                .slots
                .iter()
                .all(|s| s.level == 0.5 && s.group == 0));
        }
    }

    #[test]
    fn granularity_must_divide_horizon() {
        let base = small_base(vec![0], 12.0);
        let config = PlannerConfig {
            required_energy: 1.0,
            granularity_hours: 5.0,
            ..PlannerConfig::default()
        };
        assert!(matches!(
            plan_shedding(&base, &config),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn oversized_lattice_is_refused() {
        let base = always_on(CaseStudyVariant::FullAccess);
        let config = PlannerConfig {
            required_energy: 1.0,
            granularity_hours: 1.0,
            strategy: Strategy::Exhaustive,
            ..PlannerConfig::default()
        };
        assert!(matches!(
            plan_shedding(&base, &config),
            Err(Error::LatticeTooLarge { .. })
        ));
    }

    #[test]
    fn encoding_order_puts_empty_first() {
        let a = SheddingPlan::empty(1.0);
        let b = SheddingPlan::new(
            1.0,
            vec![ShedSlot {
                group: 0,
                start_hour: 0.0,
                duration_hours: 1.0,
                level: 0.5,
            }],
        );
        let c = SheddingPlan::new(
            1.0,
            vec![ShedSlot {
                group: 1,
                start_hour: 0.0,
                duration_hours: 1.0,
                level: 0.5,
            }],
        );
        assert_eq!(a.cmp_encoding(&b), Ordering::Less);
        assert_eq!(b.cmp_encoding(&c), Ordering::Less);
        assert_eq!(b.encoding(), "g0@0+1:0.5");
    }
}
