//! Plan a rolling blackout over three areas that sheds a required amount of
//! energy while keeping peak and between-area unfairness low.

use socio_grid_sim::planner::{
    evaluate_plan, plan_shedding, PlannerConfig, ShedSlot, SheddingPlan, Strategy,
};
use socio_grid_sim::scenario_io::{builtin_case_study, CaseStudyVariant};

fn main() -> socio_grid_sim::Result<()> {
    let base = builtin_case_study(CaseStudyVariant::FullAccess);
    // as much energy as the case study's own 17 h at 50% in every area
    let energy: f64 = 3.0 * 0.5 * 17.0 * 3.0;

    let slot = |group, start_hour, duration_hours| ShedSlot {
        group,
        start_hour,
        duration_hours,
        level: 0.5,
    };
    let naive = SheddingPlan::new(
        12.0,
        vec![slot(0, 0.0, 24.0), slot(1, 12.0, 12.0), slot(2, 24.0, 24.0)],
    );
    let naive_score = evaluate_plan(&naive, &base, 1.0)?;
    println!(
        "hand-made: {}  -> {:.4} (sheds {} of the required {energy})",
        naive.encoding(),
        naive_score.combined,
        naive.shed_energy(&base.network().group_sizes())
    );

    for strategy in [Strategy::GreedyRestarts, Strategy::Exhaustive] {
        let config = PlannerConfig {
            required_energy: energy,
            granularity_hours: 12.0,
            shed_levels: vec![0.5],
            strategy,
            seed: 42,
            ..PlannerConfig::default()
        };
        let outcome = plan_shedding(&base, &config)?;
        println!(
            "{strategy:?}: {}  -> {:.4} (peak {:.4}, unfairness {:.4}, {} simulations)",
            outcome.plan.encoding(),
            outcome.objective.combined,
            outcome.objective.peak_mean_dissatisfaction,
            outcome.objective.unfairness,
            outcome.evaluations
        );
    }
    Ok(())
}
