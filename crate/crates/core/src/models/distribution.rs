use std::collections::HashMap;

use rayon::prelude::*;

use super::{Model, Outcome, Sector};
use crate::error::{Error, Result};
use crate::sum;

/// Weights over every outcome of an enumerable sector, in sector order.
///
/// Built from a model's ideal probabilities (unnormalized, so the total is
/// `Pr(N)` for GBS) or from arbitrary non-negative scores.
#[derive(Debug, Clone)]
pub struct SectorDistribution {
    sector: Sector,
    outcomes: Vec<Outcome>,
    weights: Vec<f64>,
    index: HashMap<Outcome, usize>,
}

impl SectorDistribution {
    pub fn from_model(model: &Model, sector: Sector) -> Result<Self> {
        let outcomes: Vec<Outcome> = sector.enumerate()?.collect();
        let weights = outcomes
            .par_iter()
            .map(|x| model.probability(x))
            .collect::<Result<Vec<f64>>>()?;
        Self::from_parts(sector, outcomes, weights)
    }

    pub fn from_scores(sector: Sector, score: impl Fn(&Outcome) -> f64 + Sync) -> Result<Self> {
        let outcomes: Vec<Outcome> = sector.enumerate()?.collect();
        let weights: Vec<f64> = outcomes.par_iter().map(&score).collect();
        Self::from_parts(sector, outcomes, weights)
    }

    fn from_parts(sector: Sector, outcomes: Vec<Outcome>, weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight {} at outcome {} is not a finite non-negative number",
                weights[i], outcomes[i]
            )));
        }
        let index = outcomes.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        Ok(Self {
            sector,
            outcomes,
            weights,
            index,
        })
    }

    /// Map every weight through `f`, e.g. `|p| p.powf(2.0)`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_parts(
            self.sector,
            self.outcomes.clone(),
            self.weights.iter().map(|&w| f(w)).collect(),
        )
    }

    /// Rescaled to sum to one.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::AllZeroScores);
        }
        self.map(|w| w / total)
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        sum::sum(self.weights.iter().copied())
    }

    pub fn weight(&self, x: &Outcome) -> Option<f64> {
        self.index.get(x).map(|&i| self.weights[i])
    }

    pub fn position(&self, x: &Outcome) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, f64)> {
        self.outcomes.iter().zip(self.weights.iter().copied())
    }

    /// Outcome indices sorted by descending weight, ties in sector order.
    pub fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.weights[b].total_cmp(&self.weights[a]).then(a.cmp(&b)));
        order
    }
}
