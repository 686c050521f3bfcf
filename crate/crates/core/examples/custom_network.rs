//! A directed network with one influential agent and Internet outages.
//!
//! Agent 0 is a local news account: everyone listens to it, it listens to
//! no one. Cutting media access mutes its influence.

use socio_grid_sim::{
    simulate, AgentState, ContagionNetwork, ModelParams, PiecewiseSchedule, Scenario, WeightMatrix,
};

fn scenario(access_level: f64) -> socio_grid_sim::Result<Scenario> {
    let n = 6;
    let horizon = 36.0;
    let mut alpha = WeightMatrix::zeros(n);
    for listener in 1..n {
        alpha.set(listener, 0, 4.0);
        for other in 1..n {
            if other != listener {
                alpha.set(listener, other, 1.0);
            }
        }
    }
    let outage = PiecewiseSchedule::new([(0.0, 1.0), (6.0, 0.3), (18.0, 1.0)], horizon)?;
    let access = PiecewiseSchedule::constant(access_level, horizon)?;
    let mut initial = vec![0.1; n];
    initial[0] = 0.9;
    Ok(Scenario::new(
        format!("influencer-access-{access_level}"),
        ModelParams::builder().horizon_hours(horizon).build()?,
        ContagionNetwork::new(alpha, vec![0; n])?,
        vec![outage; n],
        vec![access; n],
        AgentState::new(initial)?,
    )?)
}

fn main() -> socio_grid_sim::Result<()> {
    for level in [1.0, 0.6, 0.2] {
        let result = simulate(&scenario(level)?)?;
        let listeners: Vec<String> = [0, 6, 12, 18, 24, 36]
            .iter()
            .map(|&k| format!("{:.3}", result.trajectory(1)[k]))
            .collect();
        println!(
            "access {level:.1}: listener D at 0/6/12/18/24/36 h = {}",
            listeners.join(" ")
        );
    }
    Ok(())
}
