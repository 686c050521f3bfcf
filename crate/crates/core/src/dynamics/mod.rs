//! Dissatisfaction dynamics under electricity shortage and media contagion.
//!
//! Each agent `n` carries a dissatisfaction level `D_n` in `[0, 1]`. At
//! every step the engine
//!
//! 1. gates the base weights by media access, `gamma_nm = alpha_nm * I_n * I_m`;
//! 2. forms the contagion term `g_n = omega2 * sum_m gamma_nm D_m / sum_m alpha_nm`;
//! 3. forms the target `D^_n = omega1 * (1 - E_n) + g_n`;
//! 4. moves toward it at rate `r_n = max(g_n / omega2, rate_floor)`:
//!    `D_n <- D_n + r_n * (D^_n - D_n) * dt`.
//!
//! Normalising by `sum alpha` rather than `sum gamma` is what lets reduced
//! media access weaken both the pull toward neighbours and the rate of
//! change. With full access the two coincide.
//!
//! With `omega1 + omega2 <= 1` and `dt <= 1` the update is a convex
//! combination of values in `[0, 1]`, so the final clamp never fires. Runs
//! count clamp activations anyway and record them in the manifest.

mod feature;

pub use feature::{step_feature, DissatisfactionFeature, FeatureModel, FnFeatureModel};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metrics::aggregate;
use crate::scenario_io::scenario_digest;
use crate::types::{
    ContagionNetwork, Manifest, ModelParams, Scenario, SimulationResult, WeightMatrix, TOOL_NAME,
    TOOL_VERSION,
};

/// Contagion quantities for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct ContagionSnapshot {
    pub gamma: WeightMatrix,
    pub social_term: Vec<f64>,
    pub rate: Vec<f64>,
}

impl ContagionSnapshot {
    pub fn compute(
        network: &ContagionNetwork,
        access: &[f64],
        dissatisfaction: &[f64],
        params: &ModelParams,
    ) -> Result<Self> {
        let gamma = compute_contagion_weights(network, access)?;
        let social_term = social_diffusion(
            &gamma,
            network.base_weights(),
            dissatisfaction,
            params.omega2(),
        )?;
        let rate = social_term
            .iter()
            .map(|&g| update_rate(g, params.omega2(), params.rate_floor()))
            .collect();
        Ok(Self {
            gamma,
            social_term,
            rate,
        })
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            found,
        })
    }
}

/// Access-gated contagion weights `gamma_nm = alpha_nm * I_n * I_m`.
pub fn compute_contagion_weights(
    network: &ContagionNetwork,
    access: &[f64],
) -> Result<WeightMatrix> {
    let n = network.n_agents();
    check_len("media access", n, access.len())?;
    let alpha = network.base_weights();
    let mut gamma = WeightMatrix::zeros(n);
    for row in 0..n {
        for col in 0..n {
            if row != col {
                gamma.set(row, col, alpha.get(row, col) * access[row] * access[col]);
            }
        }
    }
    Ok(gamma)
}

/// Contagion term `g_n`: the `gamma`-weighted neighbour dissatisfaction,
/// normalised by the ungated weight mass `sum_m alpha_nm` and scaled by
/// `omega2`. Agents without neighbours get 0.
pub fn social_diffusion(
    gamma: &WeightMatrix,
    base: &WeightMatrix,
    dissatisfaction: &[f64],
    omega2: f64,
) -> Result<Vec<f64>> {
    let n = dissatisfaction.len();
    check_len("contagion weights", n, gamma.dim())?;
    check_len("base weights", n, base.dim())?;
    Ok((0..n)
        .map(|row| {
            let mass: f64 = base.row(row).iter().sum();
            if mass > 0.0 {
                let weighted: f64 = gamma
                    .row(row)
                    .iter()
                    .zip(dissatisfaction)
                    .map(|(w, d)| w * d)
                    .sum();
                omega2 * (weighted / mass)
            } else {
                0.0
            }
        })
        .collect())
}

/// Target level `D^_n = omega1 * (1 - E_n) + g_n`.
pub fn compute_target(electricity: &[f64], social_term: &[f64], omega1: f64) -> Result<Vec<f64>> {
    check_len("contagion term", electricity.len(), social_term.len())?;
    Ok(electricity
        .iter()
        .zip(social_term)
        .map(|(e, g)| omega1 * (1.0 - e) + g)
        .collect())
}

/// Per-agent adjustment rate `max(g / omega2, floor)`, capped at 1.
pub fn update_rate(social_term: f64, omega2: f64, rate_floor: f64) -> f64 {
    let rate = if omega2 > 0.0 {
        (social_term / omega2).max(rate_floor)
    } else {
        rate_floor
    };
    rate.min(1.0)
}

/// Explicit Euler update without the final clamp.
pub fn step_unclamped(
    dissatisfaction: &[f64],
    snapshot: &ContagionSnapshot,
    target: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    let n = dissatisfaction.len();
    check_len("update rates", n, snapshot.rate.len())?;
    check_len("targets", n, target.len())?;
    Ok(dissatisfaction
        .iter()
        .zip(&snapshot.rate)
        .zip(target)
        .map(|((&d, &r), &goal)| d + r * (goal - d) * dt)
        .collect())
}

/// One Euler step, clamped into `[0, 1]`.
pub fn step(
    dissatisfaction: &[f64],
    snapshot: &ContagionSnapshot,
    target: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    let mut next = step_unclamped(dissatisfaction, snapshot, target, dt)?;
    for d in &mut next {
        *d = d.clamp(0.0, 1.0);
    }
    Ok(next)
}

/// Start time of Euler step `k`, snapped to a 1e-9 h grid so that
/// `k * dt` lands exactly on hour-valued schedule breakpoints.
pub fn step_time(k: usize, dt: f64) -> f64 {
    ((k as f64) * dt * 1e9).round() / 1e9
}

/// Runs the scenario from hour 0 to its horizon.
///
/// Schedules are sampled at the start of each step. The state is recorded
/// at hour 0 and every `report_every_hours` after that.
pub fn simulate(scenario: &Scenario) -> Result<SimulationResult> {
    let params = scenario.params();
    let network = scenario.network();
    let n = scenario.n_agents();
    let dt = params.dt_hours();
    let steps_per_report = params.steps_per_report();
    let group_of = network.group_of().to_vec();

    let mut state = scenario.initial().dissatisfaction().to_vec();
    let mut times = vec![0.0];
    let mut per_agent: Vec<Vec<f64>> = state.iter().map(|&d| vec![d]).collect();
    let mut aggregates = aggregate(0.0, &state, &group_of)?;
    let mut clamp_events = 0u64;

    let mut electricity = vec![0.0; n];
    let mut access = vec![0.0; n];
    for k in 0..params.total_steps() {
        let t = step_time(k, dt);
        for agent in 0..n {
            electricity[agent] = scenario.electricity()[agent].value_at(t)?;
            access[agent] = scenario.media_access()[agent].value_at(t)?;
        }
        let snapshot = ContagionSnapshot::compute(network, &access, &state, params)?;
        let target = compute_target(&electricity, &snapshot.social_term, params.omega1())?;
        state = step_unclamped(&state, &snapshot, &target, dt)?;
        for d in &mut state {
            if !(0.0..=1.0).contains(d) {
                clamp_events += 1;
                *d = d.clamp(0.0, 1.0);
            }
        }

        if (k + 1) % steps_per_report == 0 {
            let t_report = step_time(k + 1, dt);
            times.push(t_report);
            for (traj, &d) in per_agent.iter_mut().zip(&state) {
                traj.push(d);
            }
            aggregates.extend(aggregate(t_report, &state, &group_of)?);
        }
    }

    let manifest = Manifest {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        label: scenario.label().to_string(),
        input_digest: scenario_digest(scenario),
        n_agents: n,
        group_sizes: network.group_sizes(),
        params: *params,
        rate_floor_active: params.rate_floor() > 0.0,
        integrator: "explicit-euler".to_string(),
        schedule_sampling: "step-start".to_string(),
        std_convention: "population".to_string(),
        report_times: times.len(),
        clamp_events,
        overrides: BTreeMap::new(),
        extra: BTreeMap::new(),
    };
    Ok(SimulationResult::from_parts(
        times, group_of, per_agent, aggregates, manifest,
    ))
}
