//! Cross-entropy estimators and the Bayesian likelihood-ratio score.
//!
//! XE is evaluated per sector. With normalization `𝒩 = Pr(N) / |sector|`
//! the log estimate is `mean_i log(p(x_i) / 𝒩)`; without it `𝒩 = 1`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mockups::SampleSet;
use crate::models::{Model, Outcome, Sector, SectorDistribution};
use crate::sum::{self, mean_and_stderr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XeVariant {
    /// Per-sample term `log(p / 𝒩)`.
    Log,
    /// Per-sample term `p / 𝒩`.
    Linear,
}

impl fmt::Display for XeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            XeVariant::Log => "log",
            XeVariant::Linear => "linear",
        })
    }
}

impl FromStr for XeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(XeVariant::Log),
            "linear" => Ok(XeVariant::Linear),
            other => Err(Error::Parse(format!(
                "unknown XE variant {other:?} (expected log | linear)"
            ))),
        }
    }
}

/// Sector normalization `𝒩 = Pr(N) / |sector|`, stored as `ln 𝒩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub sector_probability: f64,
    pub ln_cardinality: f64,
}

impl Normalization {
    /// `𝒩 = 1`.
    pub fn none() -> Self {
        Self {
            sector_probability: 1.0,
            ln_cardinality: 0.0,
        }
    }

    pub fn new(sector_probability: f64, sector: Sector) -> Result<Self> {
        if !(sector_probability > 0.0 && sector_probability <= 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "sector probability {sector_probability} outside (0, 1]"
            )));
        }
        Ok(Self {
            sector_probability,
            ln_cardinality: sector.ln_cardinality(),
        })
    }

    /// `Pr(N)` taken from `model`.
    pub fn for_sector(model: &Model, sector: Sector) -> Result<Self> {
        Self::new(model.sector_probability(sector.particles), sector)
    }

    pub fn ln_value(&self) -> f64 {
        self.sector_probability.ln() - self.ln_cardinality
    }

    pub fn value(&self) -> f64 {
        self.ln_value().exp()
    }

    fn term(&self, variant: XeVariant, p: f64) -> f64 {
        match variant {
            XeVariant::Log => p.ln() - self.ln_value(),
            XeVariant::Linear => p * (-self.ln_value()).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XeReport {
    pub variant: XeVariant,
    pub estimate: f64,
    /// Sample standard deviation of the per-sample terms over `sqrt(N_s)`.
    pub std_error: f64,
    pub samples: usize,
    pub normalization: Normalization,
    pub sector: Sector,
}

/// Evaluate `probability` once per distinct outcome, in parallel.
fn probabilities(outcomes: &[Outcome], probability: impl Fn(&Outcome) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    let mut distinct: Vec<&Outcome> = Vec::new();
    let mut slot: HashMap<&Outcome, usize> = HashMap::new();
    let positions: Vec<usize> = outcomes
        .iter()
        .map(|x| {
            *slot.entry(x).or_insert_with(|| {
                distinct.push(x);
                distinct.len() - 1
            })
        })
        .collect();
    let values = distinct
        .par_iter()
        .map(|x| probability(x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(positions.into_iter().map(|i| values[i]).collect())
}

/// XE estimate of `samples` against an arbitrary probability function.
pub fn xe_estimate(
    samples: &SampleSet,
    probability: impl Fn(&Outcome) -> Result<f64> + Sync,
    variant: XeVariant,
    normalization: Normalization,
) -> Result<XeReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("XE of an empty sample set".into()));
    }
    let ps = probabilities(&samples.outcomes, probability)?;
    let mut terms = Vec::with_capacity(ps.len());
    for (x, &p) in samples.outcomes.iter().zip(&ps) {
        samples.sector.check(x)?;
        if p <= 0.0 {
            return Err(Error::ZeroProbability(x.to_string()));
        }
        terms.push(normalization.term(variant, p));
    }
    let (estimate, std_error) = mean_and_stderr(&terms);
    Ok(XeReport {
        variant,
        estimate,
        std_error,
        samples: terms.len(),
        normalization,
        sector: samples.sector,
    })
}

/// `mean_i log(p(x_i) / 𝒩)`.
pub fn log_xe_estimate(samples: &SampleSet, model: &Model, normalization: Normalization) -> Result<XeReport> {
    xe_estimate(samples, |x| model.probability(x), XeVariant::Log, normalization)
}

/// `mean_i p(x_i) / 𝒩`.
pub fn linear_xe_estimate(samples: &SampleSet, model: &Model, normalization: Normalization) -> Result<XeReport> {
    xe_estimate(samples, |x| model.probability(x), XeVariant::Linear, normalization)
}

/// Look up probabilities in an enumerated distribution.
pub fn lookup(p: &SectorDistribution) -> impl Fn(&Outcome) -> Result<f64> + Sync + '_ {
    move |x| {
        p.weight(x).ok_or_else(|| Error::OutsideSector {
            outcome: x.to_string(),
            reason: "not in the enumerated distribution".into(),
        })
    }
}

fn same_sector(p: &SectorDistribution, q: &SectorDistribution) -> Result<()> {
    if p.sector() != q.sector() {
        return Err(Error::Dimension(format!(
            "distributions over different sectors: {:?} vs {:?}",
            p.sector(),
            q.sector()
        )));
    }
    Ok(())
}

/// `sum_x q(x) term(p(x))` with `q` normalized over the sector, `𝒩 = 1`.
pub fn exact_xe(p: &SectorDistribution, q: &SectorDistribution, variant: XeVariant) -> Result<f64> {
    exact_xe_normalized(p, q, variant, Normalization::none())
}

/// [`exact_xe`] with sector normalization.
pub fn exact_xe_normalized(
    p: &SectorDistribution,
    q: &SectorDistribution,
    variant: XeVariant,
    normalization: Normalization,
) -> Result<f64> {
    same_sector(p, q)?;
    let total = q.total();
    if total <= 0.0 {
        return Err(Error::AllZeroScores);
    }
    let mut acc = sum::Compensated::new();
    for ((x, pw), qw) in p.iter().zip(q.weights()) {
        if *qw == 0.0 {
            continue;
        }
        if variant == XeVariant::Log && pw <= 0.0 {
            return Err(Error::Support(format!("q({x}) > 0 but p({x}) = 0")));
        }
        acc.add(qw / total * normalization.term(variant, pw));
    }
    Ok(acc.value())
}

/// `XE_a - XE_b` with standard errors added in quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XeDifference {
    pub value: f64,
    pub std_error: f64,
}

impl XeDifference {
    /// `value / std_error`; infinite for an exact nonzero difference.
    pub fn significance(&self) -> f64 {
        self.value / self.std_error
    }
}

/// `ΔXE = XE_spoofer - XE_ideal`.
pub fn xe_difference(spoofed: &XeReport, ideal: &XeReport) -> Result<XeDifference> {
    if spoofed.variant != ideal.variant {
        return Err(Error::VariantMismatch(format!(
            "{} vs {}",
            spoofed.variant, ideal.variant
        )));
    }
    if (spoofed.normalization.ln_value() - ideal.normalization.ln_value()).abs() > 1e-12 {
        return Err(Error::VariantMismatch("reports use different normalizations".into()));
    }
    Ok(XeDifference {
        value: spoofed.estimate - ideal.estimate,
        std_error: spoofed.std_error.hypot(ideal.std_error),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreReport {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// `mean_i log(p(x_i) / q(x_i))` for samples drawn from the reference.
///
/// `q` is normalized over the sector; `p` is used as given (pass
/// `p.normalized()` to normalize it too).
pub fn bayesian_score(samples: &SampleSet, p: &SectorDistribution, q: &SectorDistribution) -> Result<ScoreReport> {
    same_sector(p, q)?;
    if samples.is_empty() {
        return Err(Error::InvalidParameter("score of an empty sample set".into()));
    }
    let ln_total = q.total().ln();
    let mut terms = Vec::with_capacity(samples.len());
    for x in &samples.outcomes {
        let pos = p.position(x).ok_or_else(|| Error::OutsideSector {
            outcome: x.to_string(),
            reason: "not in the enumerated distribution".into(),
        })?;
        let (pw, qw) = (p.weights()[pos], q.weights()[pos]);
        if pw <= 0.0 || qw <= 0.0 {
            return Err(Error::Support(format!("p({x}) = {pw}, q({x}) = {qw}")));
        }
        terms.push(pw.ln() - (qw.ln() - ln_total));
    }
    let (estimate, std_error) = mean_and_stderr(&terms);
    Ok(ScoreReport {
        estimate,
        std_error,
        samples: terms.len(),
    })
}

/// Ranks of samples under descending ideal probability (rank 0 = heaviest).
#[derive(Debug, Clone, PartialEq)]
pub struct RankProfile {
    pub sector_size: usize,
    /// One rank per sample, in sample order.
    pub ranks: Vec<usize>,
}

impl RankProfile {
    /// Counts per equal-width rank bin; the last bin absorbs the remainder.
    pub fn histogram(&self, bins: usize) -> Vec<usize> {
        let bins = bins.clamp(1, self.sector_size.max(1));
        let mut counts = vec![0; bins];
        for &r in &self.ranks {
            counts[(r * bins / self.sector_size).min(bins - 1)] += 1;
        }
        counts
    }

    /// Fraction of samples whose rank lies in the top `fraction` of the sector.
    pub fn mass_in_top(&self, fraction: f64) -> f64 {
        let cut = (fraction * self.sector_size as f64).ceil() as usize;
        self.ranks.iter().filter(|&&r| r < cut).count() as f64 / self.ranks.len() as f64
    }
}

pub fn heaviness_profile(samples: &SampleSet, p: &SectorDistribution) -> Result<RankProfile> {
    let order = p.descending_order();
    let mut rank_of = vec![0; order.len()];
    for (rank, &pos) in order.iter().enumerate() {
        rank_of[pos] = rank;
    }
    let ranks = samples
        .outcomes
        .iter()
        .map(|x| {
            p.position(x)
                .map(|pos| rank_of[pos])
                .ok_or_else(|| Error::OutsideSector {
                    outcome: x.to_string(),
                    reason: "not in the enumerated distribution".into(),
                })
        })
        .collect::<Result<_>>()?;
    Ok(RankProfile {
        sector_size: p.len(),
        ranks,
    })
}
