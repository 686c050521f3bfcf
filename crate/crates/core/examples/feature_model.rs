//! The generic social-feature update, with the built-in dissatisfaction
//! rule and a hand-rolled "trust in the utility" feature.

use socio_grid_sim::dynamics::{
    compute_contagion_weights, step_feature, DissatisfactionFeature, FnFeatureModel,
};
use socio_grid_sim::{ContagionNetwork, WeightMatrix};

fn main() -> socio_grid_sim::Result<()> {
    let network = ContagionNetwork::full_within_groups(vec![0, 0, 0, 0], 1.0)?;
    let access = [1.0, 1.0, 0.5, 0.0];
    let gamma = compute_contagion_weights(&network, &access)?;
    let power = [1.0, 0.5, 0.5, 0.0];

    let dissatisfaction = DissatisfactionFeature::new(&network);
    let mut d = vec![0.2, 0.2, 0.6, 0.9];
    for hour in 0..5 {
        println!("hour {hour}: dissatisfaction {d:.3?}");
        d = step_feature(&dissatisfaction, &d, &access, &power, &gamma, 0.5, 0.5, 1.0)?;
    }

    // trust grows with power and media reach, and follows the most trusted neighbour
    let trust_model = FnFeatureModel::new(
        |cyber: f64, physical: f64, _own: f64| 0.5 * (cyber + physical),
        |agent: usize, trust: &[f64], w: &WeightMatrix| {
            (0..trust.len())
                .filter(|&m| m != agent && w.get(agent, m) > 0.0)
                .map(|m| trust[m])
                .fold(0.0, f64::max)
        },
    );
    let mut trust = vec![0.5; 4];
    for hour in 0..5 {
        println!("hour {hour}: trust {trust:.3?}");
        trust = step_feature(&trust_model, &trust, &access, &power, &gamma, 0.6, 0.4, 0.5)?;
    }
    Ok(())
}
