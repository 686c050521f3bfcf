//! A homogeneous group under constant availability `E` settles at
//! `D* = omega1 * (1 - E) / (1 - omega2)` from any positive start.

use socio_grid_sim::{
    simulate, AgentState, ContagionNetwork, ModelParams, PiecewiseSchedule, Scenario,
};

fn run(d0: f64, e: f64, omega1: f64, omega2: f64) -> socio_grid_sim::Result<f64> {
    let horizon = 500.0;
    let params = ModelParams::builder()
        .omega1(omega1)
        .omega2(omega2)
        .report_every_hours(100.0)
        .horizon_hours(horizon)
        .build()?;
    let scenario = Scenario::new(
        "fixed-point",
        params,
        ContagionNetwork::full_within_groups(vec![0; 3], 1.0)?,
        vec![PiecewiseSchedule::constant(e, horizon)?; 3],
        vec![PiecewiseSchedule::constant(1.0, horizon)?; 3],
        AgentState::uniform(3, d0)?,
    )?;
    let result = simulate(&scenario)?;
    Ok(*result.trajectory(0).last().unwrap())
}

fn main() -> socio_grid_sim::Result<()> {
    println!("  E   w1   w2   D0     D(500)   predicted");
    for (e, w1, w2) in [(0.5, 0.5, 0.5), (0.2, 0.3, 0.6), (0.0, 0.4, 0.4)] {
        let predicted = w1 * (1.0 - e) / (1.0 - w2);
        for d0 in [0.05, 0.5, 1.0] {
            let d = run(d0, e, w1, w2)?;
            println!("{e:.1}  {w1:.1}  {w2:.1}  {d0:.2}  {d:.6}  {predicted:.6}");
        }
    }
    Ok(())
}
