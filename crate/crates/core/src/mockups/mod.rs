//! Efficient samplers `q_U(x)` and heaviness indicators `h_U(x)`.
//!
//! Samplers emit outcomes of one sector. They consume randomness in fixed
//! chunks of [`CHUNK`] draws; chunk `c` always uses the child seed `c`, so a
//! draw's value depends only on its index and the root seed.

mod indicators;
mod samplers;

pub use indicators::{
    h_ideal_power, h_marginal_product, h_multinomial_mixed, h_multinomial_superposition, multinomial_mixed_weights,
    multinomial_superposition_weights, Indicator, IndicatorKind,
};
pub use samplers::{
    exact_sampler_from_scores, fs_dpp_sampler, sample_uniform, DppSampler, ExactSampler, ProductSampler, Sampler,
    SamplerKind, CHUNK,
};

use crate::models::{Outcome, Sector};
use crate::seed::Seed;

/// A collection of outcomes from one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub sector: Sector,
    pub outcomes: Vec<Outcome>,
    /// Natural-log indicator scores aligned with `outcomes`, when computed.
    pub log_scores: Option<Vec<f64>>,
    pub seed: Seed,
    /// Short description of what produced the set, e.g. `spoof k=10 h=marginal`.
    pub origin: String,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}
