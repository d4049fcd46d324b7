//! Post-selection spoofer.
//!
//! 1. Draw `k * N_s` samples from an efficient mock-up `q_U`.
//! 2. Score each draw with a heaviness indicator `h_U`.
//! 3. Keep the `N_s` draws with the largest scores.
//!
//! Selection is a total order on `(score desc, outcome asc, draw index asc)`,
//! so results do not depend on thread count or chunking. Kept samples are
//! returned in draw order and duplicates are retained.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mockups::{Indicator, IndicatorKind, SampleSet, Sampler, SamplerKind, CHUNK};
use crate::models::{Model, Outcome, Sector};
use crate::seed::Seed;

/// How the `k * N_s` pool is reduced to `N_s` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Selection {
    /// Keep the `N_s` best of one pool.
    #[default]
    Batch,
    /// Keep the best of each consecutive block of `k` draws.
    Iterated,
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selection::Batch => "batch",
            Selection::Iterated => "iterated",
        })
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "batch" => Ok(Selection::Batch),
            "iterated" => Ok(Selection::Iterated),
            other => Err(Error::Parse(format!(
                "unknown selection {other:?} (expected batch | iterated)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpoofConfig {
    /// Post-selection rate, at least 1.
    pub k: usize,
    /// Output sample count `N_s`, at least 1.
    pub samples: usize,
    pub sampler: SamplerKind,
    pub indicator: IndicatorKind,
    pub seed: Seed,
    pub selection: Selection,
}

impl SpoofConfig {
    pub fn new(k: usize, samples: usize, sampler: SamplerKind, indicator: IndicatorKind, seed: Seed) -> Self {
        Self {
            k,
            samples,
            sampler,
            indicator,
            seed,
            selection: Selection::Batch,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("post-selection rate k must be >= 1".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("sample count must be >= 1".into()));
        }
        Ok(())
    }

    fn origin(&self) -> String {
        format!(
            "spoof k={} q={} h={} {}",
            self.k, self.sampler, self.indicator, self.selection
        )
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    score: f64,
    outcome: Outcome,
    index: u64,
}

impl Candidate {
    /// `Less` means `self` is preferred.
    fn rank(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then_with(|| self.outcome.cmp(&other.outcome))
            .then_with(|| self.index.cmp(&other.index))
    }
}

fn keep_best(mut pool: Vec<Candidate>, n: usize) -> Vec<Candidate> {
    if pool.len() > n {
        pool.select_nth_unstable_by(n, Candidate::rank);
        pool.truncate(n);
    }
    pool
}

fn scored_chunk(
    sampler: &Sampler,
    indicator: &Indicator,
    seed: &Seed,
    chunk: u64,
    len: usize,
) -> Result<Vec<Candidate>> {
    sampler
        .draw_chunk(seed, chunk, len)
        .into_iter()
        .enumerate()
        .map(|(i, outcome)| {
            let score = indicator.log_score(&outcome)?;
            if score.is_nan() {
                return Err(Error::Numerical(format!("indicator score NaN at {outcome}")));
            }
            Ok(Candidate {
                score,
                outcome,
                index: chunk * CHUNK + i as u64,
            })
        })
        .collect()
}

/// Run the spoofer on one sector of `model`.
pub fn spoof_sector(config: &SpoofConfig, sector: Sector, model: &Model) -> Result<SampleSet> {
    config.validate()?;
    let sampler = Sampler::build(config.sampler, model, sector)?;
    let indicator = Indicator::build(config.indicator, model, sector)?;
    let pool = (config.k as u64)
        .checked_mul(config.samples as u64)
        .ok_or_else(|| Error::InvalidParameter("k * N_s overflows".into()))?;
    let chunks = pool.div_ceil(CHUNK);
    let chunk_len = |c: u64| (pool - c * CHUNK).min(CHUNK) as usize;
    let seed = &config.seed;

    let mut kept = match config.selection {
        Selection::Batch => {
            let n = config.samples;
            (0..chunks)
                .into_par_iter()
                .map(|c| scored_chunk(&sampler, &indicator, seed, c, chunk_len(c)).map(|v| keep_best(v, n)))
                .try_reduce(Vec::new, |mut a, b| {
                    a.extend(b);
                    Ok(keep_best(a, n))
                })?
        }
        Selection::Iterated => {
            let k = config.k as u64;
            let per_chunk: Vec<Vec<(u64, Candidate)>> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut best: Vec<(u64, Candidate)> = Vec::new();
                    for cand in scored_chunk(&sampler, &indicator, seed, c, chunk_len(c))? {
                        let block = cand.index / k;
                        match best.last_mut() {
                            Some((b, cur)) if *b == block => {
                                if cand.rank(cur) == Ordering::Less {
                                    *cur = cand;
                                }
                            }
                            _ => best.push((block, cand)),
                        }
                    }
                    Ok(best)
                })
                .collect::<Result<_>>()?;
            let mut merged: Vec<(u64, Candidate)> = Vec::with_capacity(config.samples);
            for (block, cand) in per_chunk.into_iter().flatten() {
                match merged.last_mut() {
                    Some((b, cur)) if *b == block => {
                        if cand.rank(cur) == Ordering::Less {
                            *cur = cand;
                        }
                    }
                    _ => merged.push((block, cand)),
                }
            }
            merged.into_iter().map(|(_, c)| c).collect()
        }
    };
    kept.sort_unstable_by_key(|c| c.index);
    let (log_scores, outcomes) = kept.into_iter().map(|c| (c.score, c.outcome)).unzip();
    Ok(SampleSet {
        sector,
        outcomes,
        log_scores: Some(log_scores),
        seed: seed.clone(),
        origin: config.origin(),
    })
}

/// Split `total` samples across sectors in proportion to `weights`
/// (indexed by particle number) with largest-remainder rounding.
pub fn allocate(weights: &[f64], total: usize) -> Result<Vec<usize>> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidParameter("sector weights must be finite and >= 0".into()));
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 || total == 0 {
        return Err(Error::InvalidParameter("empty sector allocation".into()));
    }
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Run [`spoof_sector`] on every sector with a nonzero allocation.
///
/// Sector `N` uses `config.seed.child(N)` and its allocated sample count.
/// Returns `(N, samples)` in increasing `N`.
pub fn spoof_multisector(
    config: &SpoofConfig,
    model: &Model,
    weights: &[f64],
    total: usize,
) -> Result<Vec<(usize, SampleSet)>> {
    let counts = allocate(weights, total)?;
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(n, &c)| {
            let sector = model.sector(n)?;
            let cfg = SpoofConfig {
                samples: c,
                seed: config.seed.child(n as u64),
                ..config.clone()
            };
            spoof_sector(&cfg, sector, model).map(|s| (n, s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::haar_unitary;
    use crate::models::FockModel;

    fn fock() -> Model {
        Model::Fock(FockModel::new(&haar_unitary(6, &Seed::new(11)).unwrap(), 3).unwrap())
    }

    #[test]
    fn k_one_is_raw_sample() {
        let model = fock();
        let sector = model.sector(3).unwrap();
        let cfg = SpoofConfig::new(
            1,
            9000,
            SamplerKind::Uniform,
            IndicatorKind::MarginalProduct,
            Seed::new(5),
        );
        let out = spoof_sector(&cfg, sector, &model).unwrap();
        let raw = Sampler::Uniform(sector).draws(9000, &Seed::new(5));
        assert_eq!(out.outcomes, raw);
    }

    #[test]
    fn selection_is_monotone() {
        let model = fock();
        let sector = model.sector(3).unwrap();
        let cfg = SpoofConfig::new(
            4,
            500,
            SamplerKind::Uniform,
            IndicatorKind::IdealPower(1.0),
            Seed::new(2),
        );
        let out = spoof_sector(&cfg, sector, &model).unwrap();
        let kept_min = out.log_scores.unwrap().into_iter().fold(f64::INFINITY, f64::min);
        let ind = Indicator::build(cfg.indicator, &model, sector).unwrap();
        let pool = Sampler::Uniform(sector).draws(2000, &Seed::new(2));
        let mut scores: Vec<f64> = pool.iter().map(|x| ind.log_score(x).unwrap()).collect();
        scores.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(scores[499], kept_min);
        assert!(scores[500] <= kept_min);
    }

    #[test]
    fn iterated_keeps_one_per_block() {
        let model = fock();
        let sector = model.sector(3).unwrap();
        let mut cfg = SpoofConfig::new(
            3,
            2000,
            SamplerKind::Uniform,
            IndicatorKind::IdealPower(1.0),
            Seed::new(8),
        );
        cfg.selection = Selection::Iterated;
        let out = spoof_sector(&cfg, sector, &model).unwrap();
        assert_eq!(out.len(), 2000);
        let ind = Indicator::build(cfg.indicator, &model, sector).unwrap();
        let pool = Sampler::Uniform(sector).draws(6000, &Seed::new(8));
        for (b, x) in out.outcomes.iter().enumerate() {
            let best = pool[3 * b..3 * b + 3]
                .iter()
                .map(|y| ind.log_score(y).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(ind.log_score(x).unwrap(), best);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let model = fock();
        let sector = model.sector(3).unwrap();
        let cfg = SpoofConfig::new(0, 5, SamplerKind::Uniform, IndicatorKind::MarginalProduct, Seed::new(0));
        assert!(spoof_sector(&cfg, sector, &model).is_err());
    }

    #[test]
    fn largest_remainder() {
        assert_eq!(allocate(&[0.5, 0.5], 100).unwrap(), vec![50, 50]);
        assert_eq!(allocate(&[1.0, 1.0, 1.0], 10).unwrap(), vec![4, 3, 3]);
        assert_eq!(allocate(&[0.0, 0.0, 1.0], 7).unwrap(), vec![0, 0, 7]);
        assert!(allocate(&[0.0], 7).is_err());
        assert!(allocate(&[1.0], 0).is_err());
    }
}
