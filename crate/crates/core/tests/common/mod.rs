//! Test-only oracles and scenario generators.
//!
//! The ODE oracles integrate the model from scratch. The planner oracle
//! reuses the simulator but builds its own schedules, objective and
//! tie-breaking.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use socio_grid_sim::{
    AgentState, ContagionNetwork, ModelParams, PiecewiseSchedule, Scenario, SimulationResult,
    WeightMatrix,
};

/// Hourly mean satisfaction of the reference case study, integrated by an
/// explicit Euler loop written independently of the engine. Schedules are
/// looked up by integer hour, so `dt` must divide one hour.
pub fn case_study_euler_oracle(access: f64, dt: f64) -> Vec<f64> {
    let steps_per_hour = (1.0 / dt).round() as usize;
    assert!(((steps_per_hour as f64) * dt - 1.0).abs() < 1e-12);
    let omega1 = 0.5;
    let omega2 = 0.5;
    let groups = [[0usize, 1, 2], [3, 4, 5], [6, 7, 8]];
    let mut d = [0.5f64; 9];
    let mut hourly = vec![mean_satisfaction(&d)];
    for hour in 0..48 {
        let e = if (17..34).contains(&hour) { 0.5 } else { 1.0 };
        for _ in 0..steps_per_hour {
            let mut next = d;
            for group in &groups {
                for &n in group {
                    let mut weighted = 0.0;
                    let mut mass = 0.0;
                    for &m in group {
                        if m != n {
                            weighted += access * access * d[m];
                            mass += 1.0;
                        }
                    }
                    let g = omega2 * weighted / mass;
                    let target = omega1 * (1.0 - e) + g;
                    let rate = g / omega2;
                    next[n] = d[n] + rate * (target - d[n]) * dt;
                }
            }
            d = next;
        }
        hourly.push(mean_satisfaction(&d));
    }
    hourly
}

/// Classical RK4 on the continuous-time limit of the case study (every
/// agent in a group shares one state, so each group is one scalar ODE).
pub fn case_study_rk4_oracle(access: f64, h: f64) -> Vec<f64> {
    let steps_per_hour = (1.0 / h).round() as usize;
    let rhs = |d: f64, e: f64| {
        let g = 0.5 * access * access * d;
        let target = 0.5 * (1.0 - e) + g;
        (g / 0.5) * (target - d)
    };
    let mut d = 0.5f64;
    let mut hourly = vec![1.0 - d];
    for hour in 0..48 {
        let e = if (17..34).contains(&hour) { 0.5 } else { 1.0 };
        for _ in 0..steps_per_hour {
            let k1 = rhs(d, e);
            let k2 = rhs(d + 0.5 * h * k1, e);
            let k3 = rhs(d + 0.5 * h * k2, e);
            let k4 = rhs(d + h * k3, e);
            d += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        hourly.push(1.0 - d);
    }
    hourly
}

/// RK4 for one homogeneous, fully connected group under constant
/// availability `e`; returns `D` at the end of `hours`.
pub fn homogeneous_group_rk4(d0: f64, e: f64, omega1: f64, omega2: f64, hours: f64, h: f64) -> f64 {
    let rhs = |d: f64| {
        let g = omega2 * d;
        let target = omega1 * (1.0 - e) + g;
        (g / omega2) * (target - d)
    };
    let steps = (hours / h).round() as usize;
    let mut d = d0;
    for _ in 0..steps {
        let k1 = rhs(d);
        let k2 = rhs(d + 0.5 * h * k1);
        let k3 = rhs(d + 0.5 * h * k2);
        let k4 = rhs(d + h * k3);
        d += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    d
}

fn mean_satisfaction(d: &[f64]) -> f64 {
    d.iter().map(|x| 1.0 - x).sum::<f64>() / d.len() as f64
}

pub fn sup_norm(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// One group, fully connected with unit weights.
pub fn homogeneous_group(
    n: usize,
    d0: f64,
    availability: f64,
    omega1: f64,
    omega2: f64,
    horizon: f64,
) -> Scenario {
    let params = ModelParams::builder()
        .omega1(omega1)
        .omega2(omega2)
        .horizon_hours(horizon)
        .build()
        .unwrap();
    let e = PiecewiseSchedule::constant(availability, horizon).unwrap();
    let i = PiecewiseSchedule::constant(1.0, horizon).unwrap();
    Scenario::new(
        "homogeneous",
        params,
        ContagionNetwork::full_within_groups(vec![0; n], 1.0).unwrap(),
        vec![e; n],
        vec![i; n],
        AgentState::uniform(n, d0).unwrap(),
    )
    .unwrap()
}

/// Knobs for [`random_scenario`].
#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    pub max_agents: usize,
    pub max_horizon: u32,
    /// Zero all cross-group weights.
    pub isolated_groups: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            max_agents: 20,
            max_horizon: 100,
            isolated_groups: false,
        }
    }
}

const DTS: [f64; 5] = [0.1, 0.2, 0.25, 0.5, 1.0];

fn random_schedule(rng: &mut ChaCha8Rng, horizon: u32) -> PiecewiseSchedule {
    let mut starts: Vec<u32> = (1..horizon).collect();
    starts.shuffle(rng);
    let extra = rng.random_range(0..=3usize).min(starts.len());
    let mut starts: Vec<u32> = starts.into_iter().take(extra).collect();
    starts.push(0);
    starts.sort_unstable();
    let points: Vec<(f64, f64)> = starts
        .into_iter()
        .map(|s| {
            let v = match rng.random_range(0..4) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random::<f64>(),
            };
            (s as f64, v)
        })
        .collect();
    PiecewiseSchedule::new(points, horizon as f64).unwrap()
}

/// A valid random scenario: up to `max_agents` agents in up to four dense
/// groups, random directed weights, random schedules and parameters with
/// `omega1 + omega2 <= 1`.
pub fn random_scenario(seed: u64, opts: GenOptions) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=opts.max_agents);
    let n_groups = rng.random_range(1..=n.min(4));
    let mut group_of: Vec<usize> = (0..n)
        .map(|i| {
            if i < n_groups {
                i
            } else {
                rng.random_range(0..n_groups)
            }
        })
        .collect();
    group_of.shuffle(&mut rng);

    let mut base = WeightMatrix::zeros(n);
    let uniform = rng.random_bool(0.3);
    let w_uniform = rng.random_range(0.1..5.0);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let same = group_of[i] == group_of[j];
            let w = if uniform {
                if same {
                    w_uniform
                } else {
                    0.0
                }
            } else if same || (!opts.isolated_groups && rng.random_bool(0.2)) {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    rng.random_range(0.0..3.0)
                }
            } else {
                0.0
            };
            base.set(i, j, w);
        }
    }
    let network = ContagionNetwork::new(base, group_of).unwrap();

    let omega1: f64 = rng.random();
    let omega2 = if rng.random_bool(0.3) {
        1.0 - omega1
    } else {
        rng.random::<f64>() * (1.0 - omega1)
    };
    let horizon = rng.random_range(1..=opts.max_horizon);
    let rate_floor = if rng.random_bool(0.7) {
        0.0
    } else {
        rng.random()
    };
    let params = ModelParams::builder()
        .omega1(omega1)
        .omega2(omega2)
        .dt_hours(DTS[rng.random_range(0..DTS.len())])
        .rate_floor(rate_floor)
        .horizon_hours(horizon as f64)
        .build()
        .unwrap();

    let electricity = (0..n).map(|_| random_schedule(&mut rng, horizon)).collect();
    let access = (0..n).map(|_| random_schedule(&mut rng, horizon)).collect();
    let initial = (0..n)
        .map(|_| match rng.random_range(0..5) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random(),
        })
        .collect();
    Scenario::new(
        format!("random-{seed}"),
        params,
        network,
        electricity,
        access,
        AgentState::new(initial).unwrap(),
    )
    .unwrap()
}

/// Scenario with every base weight multiplied by `factor`.
pub fn with_scaled_weights(s: &Scenario, factor: f64) -> Scenario {
    let network = ContagionNetwork::new(
        s.network().base_weights().scaled(factor),
        s.network().group_of().to_vec(),
    )
    .unwrap();
    Scenario::new(
        s.label(),
        *s.params(),
        network,
        s.electricity().to_vec(),
        s.media_access().to_vec(),
        s.initial().clone(),
    )
    .unwrap()
}

/// Scenario where new agent `k` is old agent `perm[k]`.
pub fn permuted(s: &Scenario, perm: &[usize]) -> Scenario {
    let n = perm.len();
    let old = s.network().base_weights();
    let mut base = WeightMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            base.set(i, j, old.get(perm[i], perm[j]));
        }
    }
    let group_of = perm.iter().map(|&p| s.network().group_of()[p]).collect();
    Scenario::new(
        s.label(),
        *s.params(),
        ContagionNetwork::new(base, group_of).unwrap(),
        perm.iter().map(|&p| s.electricity()[p].clone()).collect(),
        perm.iter().map(|&p| s.media_access()[p].clone()).collect(),
        AgentState::new(
            perm.iter()
                .map(|&p| s.initial().dissatisfaction()[p])
                .collect(),
        )
        .unwrap(),
    )
    .unwrap()
}

/// The sub-scenario made of one group's members, in their original order.
pub fn group_only(s: &Scenario, group: usize) -> Scenario {
    let members = s.network().members(group);
    let old = s.network().base_weights();
    let k = members.len();
    let mut base = WeightMatrix::zeros(k);
    for (i, &a) in members.iter().enumerate() {
        for (j, &b) in members.iter().enumerate() {
            base.set(i, j, old.get(a, b));
        }
    }
    Scenario::new(
        s.label(),
        *s.params(),
        ContagionNetwork::new(base, vec![0; k]).unwrap(),
        members
            .iter()
            .map(|&p| s.electricity()[p].clone())
            .collect(),
        members
            .iter()
            .map(|&p| s.media_access()[p].clone())
            .collect(),
        AgentState::new(
            members
                .iter()
                .map(|&p| s.initial().dissatisfaction()[p])
                .collect(),
        )
        .unwrap(),
    )
    .unwrap()
}

/// Same scenario with the given group's initial dissatisfaction zeroed and
/// no rate floor.
pub fn with_zero_group(s: &Scenario, group: usize) -> Scenario {
    let params = s.params().to_builder().rate_floor(0.0).build().unwrap();
    let initial = s
        .initial()
        .dissatisfaction()
        .iter()
        .zip(s.network().group_of())
        .map(|(&d, &g)| if g == group { 0.0 } else { d })
        .collect();
    Scenario::new(
        s.label(),
        params,
        s.network().clone(),
        s.electricity().to_vec(),
        s.media_access().to_vec(),
        AgentState::new(initial).unwrap(),
    )
    .unwrap()
}

pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

pub fn max_abs_diff(a: &SimulationResult, b: &SimulationResult) -> f64 {
    a.trajectories()
        .iter()
        .zip(b.trajectories())
        .map(|(x, y)| sup_norm(x, y))
        .fold(0.0, f64::max)
}

/// Result of [`brute_force_plan`].
#[derive(Debug, Clone, PartialEq)]
pub struct OraclePlan {
    /// Non-zero cells as `(group, start_hour, duration_hours, level)`, sorted.
    pub slots: Vec<(usize, f64, f64, f64)>,
    pub peak: f64,
    pub unfairness: f64,
    pub combined: f64,
}

fn oracle_objective(result: &SimulationResult, lambda: f64) -> (f64, f64, f64) {
    let traj = result.trajectories();
    let group_of = result.group_of();
    let n_groups = group_of.iter().max().unwrap() + 1;
    let n_times = result.times().len();
    let mut peak = f64::NEG_INFINITY;
    let mut time_mean = vec![0.0; n_groups];
    for k in 0..n_times {
        let all: f64 = traj.iter().map(|t| t[k]).sum::<f64>() / traj.len() as f64;
        peak = peak.max(all);
        for (g, acc) in time_mean.iter_mut().enumerate() {
            let members: Vec<f64> = traj
                .iter()
                .zip(group_of)
                .filter(|(_, &gg)| gg == g)
                .map(|(t, _)| t[k])
                .collect();
            *acc += members.iter().sum::<f64>() / members.len() as f64 / n_times as f64;
        }
    }
    let spread = time_mean.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - time_mean.iter().cloned().fold(f64::INFINITY, f64::min);
    (peak, spread, peak + lambda * spread)
}

fn slot_list_less(a: &[(usize, f64, f64, f64)], b: &[(usize, f64, f64, f64)]) -> bool {
    for (x, y) in a.iter().zip(b) {
        let ord =
            x.0.cmp(&y.0)
                .then(x.1.total_cmp(&y.1))
                .then(x.2.total_cmp(&y.2))
                .then(x.3.total_cmp(&y.3));
        if ord != std::cmp::Ordering::Equal {
            return ord == std::cmp::Ordering::Less;
        }
    }
    a.len() < b.len()
}

/// Enumerates every (group, slot) level assignment meeting `required`
/// energy, simulates each one and keeps the best combined objective; ties
/// within 1e-12 go to the lexicographically smaller slot list.
pub fn brute_force_plan(
    base: &Scenario,
    granularity: f64,
    levels: &[f64],
    required: f64,
    lambda: f64,
) -> OraclePlan {
    let mut levels = levels.to_vec();
    if !levels.contains(&0.0) {
        levels.push(0.0);
    }
    levels.sort_by(f64::total_cmp);
    let horizon = base.params().horizon_hours();
    let n_slots = (horizon / granularity).round() as usize;
    let group_of = base.network().group_of().to_vec();
    let n_groups = group_of.iter().max().unwrap() + 1;
    let sizes: Vec<f64> = (0..n_groups)
        .map(|g| group_of.iter().filter(|&&x| x == g).count() as f64)
        .collect();
    let n_cells = n_groups * n_slots;
    let total = levels.len().pow(n_cells as u32);

    let mut best: Option<OraclePlan> = None;
    for code in 0..total {
        // cell 0 is the most significant digit
        let mut cells = vec![0usize; n_cells];
        let mut rest = code;
        for c in (0..n_cells).rev() {
            cells[c] = rest % levels.len();
            rest /= levels.len();
        }
        let energy: f64 = cells
            .iter()
            .enumerate()
            .map(|(c, &l)| levels[l] * granularity * sizes[c / n_slots])
            .sum();
        if energy < required - 1e-9 {
            continue;
        }
        let shed = |g: usize, t: f64| {
            let slot = ((t / granularity).floor() as usize).min(n_slots - 1);
            levels[cells[g * n_slots + slot]]
        };
        let electricity: Vec<PiecewiseSchedule> = base
            .electricity()
            .iter()
            .zip(&group_of)
            .map(|(sched, &g)| {
                let mut starts: Vec<f64> =
                    sched.breakpoints().iter().map(|b| b.start_hour).collect();
                starts.extend((0..n_slots).map(|s| s as f64 * granularity));
                starts.sort_by(f64::total_cmp);
                starts.dedup();
                let points: Vec<(f64, f64)> = starts
                    .into_iter()
                    .map(|t| (t, (sched.value_at(t).unwrap() - shed(g, t)).max(0.0)))
                    .collect();
                PiecewiseSchedule::new(points, horizon).unwrap()
            })
            .collect();
        let scenario = base.with_electricity(electricity).unwrap();
        let result = socio_grid_sim::simulate(&scenario).unwrap();
        let (peak, unfairness, combined) = oracle_objective(&result, lambda);
        let slots: Vec<(usize, f64, f64, f64)> = cells
            .iter()
            .enumerate()
            .filter(|(_, &l)| levels[l] > 0.0)
            .map(|(c, &l)| {
                (
                    c / n_slots,
                    (c % n_slots) as f64 * granularity,
                    granularity,
                    levels[l],
                )
            })
            .collect();
        let candidate = OraclePlan {
            slots,
            peak,
            unfairness,
            combined,
        };
        let better = match &best {
            None => true,
            Some(b) => {
                let diff = candidate.combined - b.combined;
                diff < -1e-12 || (diff.abs() <= 1e-12 && slot_list_less(&candidate.slots, &b.slots))
            }
        };
        if better {
            best = Some(candidate);
        }
    }
    best.expect("requirement above the lattice maximum")
}

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

// Property checks shared by the proptest suite and the acceptance runner.

/// No raw Euler update leaves `[0, 1]`, and every recorded state is inside.
pub fn check_bounded(s: &Scenario) -> Result<(), String> {
    let r = socio_grid_sim::simulate(s).map_err(|e| e.to_string())?;
    if r.manifest.clamp_events != 0 {
        return Err(format!("{} clamp events", r.manifest.clamp_events));
    }
    if r.trajectories()
        .iter()
        .flatten()
        .any(|d| !(0.0..=1.0).contains(d))
    {
        return Err("state outside [0, 1]".into());
    }
    Ok(())
}

/// Scaling every weight by a power of two leaves trajectories bit-identical;
/// any other positive factor moves them by at most 1e-12.
pub fn check_scale_invariance(s: &Scenario, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reference = socio_grid_sim::simulate(s).map_err(|e| e.to_string())?;
    let pow2 = 2f64.powi(rng.random_range(-8..=8));
    let scaled =
        socio_grid_sim::simulate(&with_scaled_weights(s, pow2)).map_err(|e| e.to_string())?;
    if scaled.trajectories() != reference.trajectories() {
        return Err(format!("factor {pow2}: trajectories differ"));
    }
    let c = rng.random_range(0.01..100.0);
    let scaled = socio_grid_sim::simulate(&with_scaled_weights(s, c)).map_err(|e| e.to_string())?;
    let diff = max_abs_diff(&reference, &scaled);
    if diff > 1e-12 {
        return Err(format!("factor {c}: max difference {diff}"));
    }
    Ok(())
}

/// With no cross-group weights, each group evolves exactly as it would alone.
pub fn check_group_isolation(s: &Scenario) -> Result<(), String> {
    let whole = socio_grid_sim::simulate(s).map_err(|e| e.to_string())?;
    for g in 0..s.network().n_groups() {
        let alone = socio_grid_sim::simulate(&group_only(s, g)).map_err(|e| e.to_string())?;
        for (i, &agent) in s.network().members(g).iter().enumerate() {
            if whole.trajectory(agent) != alone.trajectory(i) {
                return Err(format!(
                    "group {g}, agent {agent} differs when simulated alone"
                ));
            }
        }
    }
    Ok(())
}

/// Relabelling agents relabels trajectories.
pub fn check_permutation(s: &Scenario, seed: u64) -> Result<(), String> {
    let perm = random_permutation(s.n_agents(), seed);
    let a = socio_grid_sim::simulate(s).map_err(|e| e.to_string())?;
    let b = socio_grid_sim::simulate(&permuted(s, &perm)).map_err(|e| e.to_string())?;
    for (new, &old) in perm.iter().enumerate() {
        let diff = sup_norm(a.trajectory(old), b.trajectory(new));
        if diff > 1e-12 {
            return Err(format!("agent {old} -> {new}: difference {diff}"));
        }
    }
    Ok(())
}

/// The target falls as availability rises and rises with neighbour
/// dissatisfaction, checked on the scenario's initial state.
pub fn check_target_monotonicity(s: &Scenario, seed: u64) -> Result<(), String> {
    use socio_grid_sim::dynamics::{compute_target, ContagionSnapshot};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = s.n_agents();
    let access: Vec<f64> = s
        .media_access()
        .iter()
        .map(|x| x.value_at(0.0).unwrap())
        .collect();
    let e: Vec<f64> = s
        .electricity()
        .iter()
        .map(|x| x.value_at(0.0).unwrap())
        .collect();
    let d = s.initial().dissatisfaction().to_vec();
    let target = |e: &[f64], d: &[f64]| {
        let snap = ContagionSnapshot::compute(s.network(), &access, d, s.params()).unwrap();
        compute_target(e, &snap.social_term, s.params().omega1()).unwrap()
    };
    let before = target(&e, &d);

    let k = rng.random_range(0..n);
    let mut e_up = e.clone();
    e_up[k] = rng.random_range(e[k]..=1.0);
    let after = target(&e_up, &d);
    if after[k] > before[k] {
        return Err(format!("raising E[{k}] raised the target"));
    }
    let mut d_up = d.clone();
    d_up[k] = rng.random_range(d[k]..=1.0);
    let after = target(&e, &d_up);
    if let Some(m) = (0..n).find(|&m| after[m] < before[m]) {
        return Err(format!("raising D[{k}] lowered the target of agent {m}"));
    }
    Ok(())
}

/// A group starting at zero with no rate floor stays at zero. Only holds
/// when nothing outside the group feeds into it.
pub fn check_absorbing_zero(s: &Scenario, seed: u64) -> Result<(), String> {
    let g = (seed as usize) % s.network().n_groups();
    let r = socio_grid_sim::simulate(&with_zero_group(s, g)).map_err(|e| e.to_string())?;
    for agent in s.network().members(g) {
        if r.trajectory(agent).iter().any(|&d| d != 0.0) {
            return Err(format!("agent {agent} in zeroed group {g} left 0"));
        }
    }
    Ok(())
}
