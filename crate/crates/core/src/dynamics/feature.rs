//! Generic social-feature update.
//!
//! A feature `S_n` relaxes toward a weighted blend of a local rule
//! `f(cyber, physical, own)` and a social rule `g(others, weights)`:
//!
//! `S_n <- S_n + [omega1 * f + omega2 * g - S_n] * dt`
//!
//! The dissatisfaction model is one instance ([`DissatisfactionFeature`]);
//! it differs from [`super::step`] only by the per-agent rate factor.

use crate::error::{Error, Result, ValidationError};
use crate::types::{ContagionNetwork, WeightMatrix};

pub trait FeatureModel {
    /// Local combination of an agent's cyber, physical and own social value.
    fn local_term(&self, cyber: f64, physical: f64, own: f64) -> f64;

    /// Influence of the other agents' features on `agent`.
    fn social_term(&self, agent: usize, features: &[f64], weights: &WeightMatrix) -> f64;
}

/// A [`FeatureModel`] built from two closures.
pub struct FnFeatureModel<F, G> {
    local: F,
    social: G,
}

impl<F, G> FnFeatureModel<F, G>
where
    F: Fn(f64, f64, f64) -> f64,
    G: Fn(usize, &[f64], &WeightMatrix) -> f64,
{
    pub fn new(local: F, social: G) -> Self {
        Self { local, social }
    }
}

impl<F, G> FeatureModel for FnFeatureModel<F, G>
where
    F: Fn(f64, f64, f64) -> f64,
    G: Fn(usize, &[f64], &WeightMatrix) -> f64,
{
    fn local_term(&self, cyber: f64, physical: f64, own: f64) -> f64 {
        (self.local)(cyber, physical, own)
    }

    fn social_term(&self, agent: usize, features: &[f64], weights: &WeightMatrix) -> f64 {
        (self.social)(agent, features, weights)
    }
}

/// Dissatisfaction as a feature: `f = 1 - E`, `g = sum gamma D / sum alpha`.
///
/// Pass the access-gated matrix `gamma` as `weights`; the ungated row
/// masses are taken from the network at construction.
#[derive(Debug, Clone)]
pub struct DissatisfactionFeature {
    base_mass: Vec<f64>,
}

impl DissatisfactionFeature {
    pub fn new(network: &ContagionNetwork) -> Self {
        Self {
            base_mass: network
                .base_weights()
                .rows()
                .map(|row| row.iter().sum())
                .collect(),
        }
    }
}

impl FeatureModel for DissatisfactionFeature {
    fn local_term(&self, _cyber: f64, physical: f64, _own: f64) -> f64 {
        1.0 - physical
    }

    fn social_term(&self, agent: usize, features: &[f64], weights: &WeightMatrix) -> f64 {
        let mass = self.base_mass[agent];
        if mass > 0.0 {
            let weighted: f64 = weights
                .row(agent)
                .iter()
                .zip(features)
                .map(|(w, s)| w * s)
                .sum();
            weighted / mass
        } else {
            0.0
        }
    }
}

/// One explicit step of the generic feature update, clamped to `[0, 1]`.
///
/// Fails if either rule leaves `[0, 1]` for any agent.
#[allow(clippy::too_many_arguments)]
pub fn step_feature<M: FeatureModel + ?Sized>(
    model: &M,
    state: &[f64],
    cyber: &[f64],
    physical: &[f64],
    weights: &WeightMatrix,
    omega1: f64,
    omega2: f64,
    dt: f64,
) -> Result<Vec<f64>> {
    let n = state.len();
    for (what, len) in [
        ("cyber values", cyber.len()),
        ("physical values", physical.len()),
        ("feature weights", weights.dim()),
    ] {
        if len != n {
            return Err(Error::Dimension {
                what,
                expected: n,
                found: len,
            });
        }
    }
    if !(0.0..=1.0).contains(&omega1) || !(0.0..=1.0).contains(&omega2) || omega1 + omega2 > 1.0 {
        return Err(ValidationError::single(
            "omega1+omega2",
            format!("weights {omega1}, {omega2} must lie in [0, 1] and sum to at most 1"),
        )
        .into());
    }
    if !(dt > 0.0 && dt <= 1.0) {
        return Err(ValidationError::single("dt", format!("{dt} is outside (0, 1]")).into());
    }

    (0..n)
        .map(|agent| {
            let own = state[agent];
            let local = model.local_term(cyber[agent], physical[agent], own);
            check_unit(agent, "local", local)?;
            let social = model.social_term(agent, state, weights);
            check_unit(agent, "social", social)?;
            let next = own + (omega1 * local + omega2 * social - own) * dt;
            Ok(next.clamp(0.0, 1.0))
        })
        .collect()
}

fn check_unit(agent: usize, term: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ModelContract { agent, term, value })
    }
}
