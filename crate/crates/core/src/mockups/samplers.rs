use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;

use super::SampleSet;
use crate::error::{Error, Result};
use crate::kernels::ComplexMatrix;
use crate::models::{first_order_marginals, FermionModel, Model, Outcome, Sector, SectorDistribution, Statistics};
use crate::seed::{Rng, Seed};

/// Draws per derived random stream.
pub const CHUNK: u64 = 4096;

/// Name of a mock-up sampler in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    /// Uniform over the sector.
    Uniform,
    /// Product of first-order marginals, conditioned on the sector.
    MarginalProduct,
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerKind::Uniform => "uniform",
            SamplerKind::MarginalProduct => "marginal",
        })
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(SamplerKind::Uniform),
            "marginal" => Ok(SamplerKind::MarginalProduct),
            other => Err(Error::Parse(format!(
                "unknown sampler {other:?} (expected uniform | marginal)"
            ))),
        }
    }
}

/// An efficiently samplable mock-up distribution over one sector.
#[derive(Debug, Clone)]
pub enum Sampler {
    Uniform(Sector),
    MarginalProduct(ProductSampler),
}

impl Sampler {
    pub fn build(kind: SamplerKind, model: &Model, sector: Sector) -> Result<Self> {
        match kind {
            SamplerKind::Uniform => Ok(Sampler::Uniform(sector)),
            SamplerKind::MarginalProduct => {
                let cap = match sector.statistics {
                    Statistics::Bosonic => sector.particles,
                    Statistics::Fermionic => 1,
                };
                let table = first_order_marginals(model, cap)?;
                ProductSampler::new(sector, table).map(Sampler::MarginalProduct)
            }
        }
    }

    pub fn sector(&self) -> Sector {
        match self {
            Sampler::Uniform(s) => *s,
            Sampler::MarginalProduct(p) => p.sector,
        }
    }

    pub fn draw(&self, rng: &mut Rng) -> Outcome {
        match self {
            Sampler::Uniform(s) => draw_uniform(s, rng),
            Sampler::MarginalProduct(p) => p.draw(rng),
        }
    }

    /// Draws `[chunk * CHUNK, chunk * CHUNK + len)` of the stream rooted at `seed`.
    pub fn draw_chunk(&self, seed: &Seed, chunk: u64, len: usize) -> Vec<Outcome> {
        let mut rng = seed.child(chunk).rng();
        (0..len).map(|_| self.draw(&mut rng)).collect()
    }

    /// The first `count` draws of the stream rooted at `seed`.
    pub fn draws(&self, count: usize, seed: &Seed) -> Vec<Outcome> {
        chunked(count, |chunk, len| self.draw_chunk(seed, chunk, len))
    }
}

/// Split `count` draws into [`CHUNK`]-sized pieces generated in parallel and
/// concatenated in index order.
pub(crate) fn chunked<T: Send>(count: usize, f: impl Fn(u64, usize) -> Vec<T> + Sync) -> Vec<T> {
    let chunks = (count as u64).div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let len = (count as u64 - start).min(CHUNK) as usize;
            f(c, len)
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// A uniformly random outcome of `sector`.
///
/// Fermionic: a random `N`-subset of the modes. Bosonic: a random `N`-subset
/// of `N + M - 1` stars-and-bars slots, mapped to a multiset by subtracting
/// each slot's rank. Both are exact bijections, so no unranking of huge
/// indices is needed.
fn draw_uniform(sector: &Sector, rng: &mut Rng) -> Outcome {
    let (m, n) = (sector.modes, sector.particles);
    let slots = match sector.statistics {
        Statistics::Bosonic => n + m - 1,
        Statistics::Fermionic => m,
    };
    let mut picks = index::sample(rng, slots, n).into_vec();
    picks.sort_unstable();
    let list: Vec<usize> = match sector.statistics {
        Statistics::Bosonic => picks.iter().enumerate().map(|(t, &p)| p - t).collect(),
        Statistics::Fermionic => picks,
    };
    Outcome::from_modes(m, &list).expect("indices in range")
}

/// `count` i.i.d. uniform outcomes of `sector`.
pub fn sample_uniform(sector: Sector, count: usize, seed: &Seed) -> SampleSet {
    let sampler = Sampler::Uniform(sector);
    SampleSet {
        sector,
        outcomes: sampler.draws(count, seed),
        log_scores: None,
        seed: seed.clone(),
        origin: "uniform".into(),
    }
}

/// Product of per-mode weights conditioned on the sector total.
///
/// Sampling runs mode by mode using suffix sums `tail[i][r]`, the total
/// weight of assignments of modes `i..M` carrying `r` particles.
#[derive(Debug, Clone)]
pub struct ProductSampler {
    sector: Sector,
    weights: Vec<Vec<f64>>,
    tail: Vec<Vec<f64>>,
}

impl ProductSampler {
    pub fn new(sector: Sector, weights: Vec<Vec<f64>>) -> Result<Self> {
        let (m, n) = (sector.modes, sector.particles);
        if weights.len() != m {
            return Err(Error::Dimension(format!("{} weight rows for {m} modes", weights.len())));
        }
        let cap = match sector.statistics {
            Statistics::Bosonic => n,
            Statistics::Fermionic => 1.min(n),
        };
        let mut tail = vec![vec![0.0; n + 1]; m + 1];
        tail[m][0] = 1.0;
        for i in (0..m).rev() {
            for r in 0..=n {
                let mut acc = 0.0;
                for k in 0..=cap.min(r) {
                    acc += weights[i].get(k).copied().unwrap_or(0.0) * tail[i + 1][r - k];
                }
                tail[i][r] = acc;
            }
            // Row rescaling leaves the conditionals unchanged and avoids underflow.
            let scale = tail[i].iter().copied().fold(0.0, f64::max);
            if scale > 0.0 {
                tail[i].iter_mut().for_each(|t| *t /= scale);
            }
        }
        if tail[0][n] <= 0.0 {
            return Err(Error::AllZeroScores);
        }
        Ok(Self { sector, weights, tail })
    }

    pub fn draw(&self, rng: &mut Rng) -> Outcome {
        let mut remaining = self.sector.particles;
        let mut occ = vec![0u8; self.sector.modes];
        for (i, slot) in occ.iter_mut().enumerate() {
            if remaining == 0 {
                break;
            }
            let max_k = match self.sector.statistics {
                Statistics::Bosonic => remaining,
                Statistics::Fermionic => 1,
            };
            let cand: Vec<f64> = (0..=max_k)
                .map(|k| self.weights[i].get(k).copied().unwrap_or(0.0) * self.tail[i + 1][remaining - k])
                .collect();
            let k = pick(&cand, rng);
            *slot = k as u8;
            remaining -= k;
        }
        Outcome::new(occ)
    }
}

fn pick(weights: &[f64], rng: &mut Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Inverse-CDF sampler over an enumerated sector.
#[derive(Debug, Clone)]
pub struct ExactSampler {
    outcomes: Vec<Outcome>,
    cdf: Vec<f64>,
    sector: Sector,
}

impl ExactSampler {
    pub fn new(dist: &SectorDistribution) -> Result<Self> {
        let mut acc = 0.0;
        let cdf: Vec<f64> = dist
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        if acc <= 0.0 {
            return Err(Error::AllZeroScores);
        }
        Ok(Self {
            outcomes: dist.outcomes().to_vec(),
            cdf,
            sector: dist.sector(),
        })
    }

    pub fn draw(&self, rng: &mut Rng) -> Outcome {
        let total = *self.cdf.last().expect("non-empty");
        let u = rng.random::<f64>() * total;
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        // Skip zero-weight outcomes sitting on a flat stretch of the CDF.
        let i = (i..self.cdf.len())
            .find(|&j| self.cdf[j] > u && (j == 0 || self.cdf[j] > self.cdf[j - 1]))
            .unwrap_or(i);
        self.outcomes[i].clone()
    }

    pub fn sample(&self, count: usize, seed: &Seed) -> SampleSet {
        let outcomes = chunked(count, |chunk, len| {
            let mut rng = seed.child(chunk).rng();
            (0..len).map(|_| self.draw(&mut rng)).collect()
        });
        SampleSet {
            sector: self.sector,
            outcomes,
            log_scores: None,
            seed: seed.clone(),
            origin: "exact".into(),
        }
    }
}

/// `count` draws from the normalized `score` over an enumerable sector.
pub fn exact_sampler_from_scores(
    sector: Sector,
    score: impl Fn(&Outcome) -> f64 + Sync,
    count: usize,
    seed: &Seed,
) -> Result<SampleSet> {
    let dist = SectorDistribution::from_scores(sector, score)?;
    Ok(ExactSampler::new(&dist)?.sample(count, seed))
}

/// Exact fermion sampler: the chain rule of the projection DPP with kernel
/// `K = A^dag A`.
///
/// Modes are drawn one at a time with probability proportional to the
/// squared norm of their column of `A` projected away from the columns
/// already chosen. Each draw costs `O(M N^2)`.
#[derive(Debug, Clone)]
pub struct DppSampler {
    rows: ComplexMatrix,
    sector: Sector,
}

const DPP_BREAKDOWN: f64 = 1e-12;

impl DppSampler {
    pub fn new(model: &FermionModel) -> Self {
        Self {
            rows: model.rows().clone(),
            sector: model.sector(),
        }
    }

    pub fn draw(&self, rng: &mut Rng) -> Result<Outcome> {
        for _attempt in 0..8 {
            if let Some(x) = self.try_draw(rng) {
                return Ok(x);
            }
        }
        Err(Error::Numerical(format!(
            "conditional normalization below {DPP_BREAKDOWN:e} in DPP chain rule"
        )))
    }

    fn try_draw(&self, rng: &mut Rng) -> Option<Outcome> {
        let (n, m) = (self.rows.rows(), self.rows.cols());
        let col = |i: usize| (0..n).map(move |j| self.rows[(j, i)]);
        let mut residual: Vec<f64> = (0..m).map(|i| col(i).map(|z| z.norm_sqr()).sum()).collect();
        let mut basis: Vec<Vec<num_complex::Complex64>> = Vec::with_capacity(n);
        let mut chosen = Vec::with_capacity(n);
        for _ in 0..n {
            let i = pick(&residual, rng);
            let mut w: Vec<num_complex::Complex64> = col(i).collect();
            for e in &basis {
                let dot: num_complex::Complex64 = e.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                w.iter_mut().zip(e).for_each(|(wk, ek)| *wk -= dot * ek);
            }
            let norm2: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            if norm2 < DPP_BREAKDOWN {
                return None;
            }
            let inv = 1.0 / norm2.sqrt();
            w.iter_mut().for_each(|z| *z *= inv);
            for (j, r) in residual.iter_mut().enumerate() {
                if *r == 0.0 {
                    continue;
                }
                let c: num_complex::Complex64 = w.iter().zip(col(j)).map(|(a, b)| a.conj() * b).sum();
                *r = (*r - c.norm_sqr()).max(0.0);
            }
            residual[i] = 0.0;
            basis.push(w);
            chosen.push(i);
        }
        Some(Outcome::from_modes(m, &chosen).expect("indices in range"))
    }

    pub fn sample(&self, count: usize, seed: &Seed) -> Result<SampleSet> {
        let outcomes: Vec<Result<Outcome>> = chunked(count, |chunk, len| {
            let mut rng = seed.child(chunk).rng();
            (0..len).map(|_| self.draw(&mut rng)).collect()
        });
        Ok(SampleSet {
            sector: self.sector,
            outcomes: outcomes.into_iter().collect::<Result<_>>()?,
            log_scores: None,
            seed: seed.clone(),
            origin: "ideal-dpp".into(),
        })
    }
}

/// `count` exact fermion-sampling outcomes.
pub fn fs_dpp_sampler(model: &FermionModel, count: usize, seed: &Seed) -> Result<SampleSet> {
    DppSampler::new(model).sample(count, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Interferometer;

    #[test]
    fn names_round_trip() {
        for k in [SamplerKind::Uniform, SamplerKind::MarginalProduct] {
            assert_eq!(k.to_string().parse::<SamplerKind>().unwrap(), k);
        }
        assert!("thermal".parse::<SamplerKind>().is_err());
    }

    #[test]
    fn uniform_is_deterministic_and_in_sector() {
        let s = Sector::bosonic(16, 4);
        let a = sample_uniform(s, 10_000, &Seed::new(3));
        let b = sample_uniform(s, 10_000, &Seed::new(3));
        assert_eq!(a, b);
        for x in &a.outcomes {
            assert!(s.rank(x).unwrap() < 3876);
        }
    }

    #[test]
    fn dpp_on_identity_is_fixed() {
        let model = FermionModel::new(&Interferometer::identity(6), 3).unwrap();
        let set = fs_dpp_sampler(&model, 200, &Seed::new(1)).unwrap();
        let expect: Outcome = "1,1,1,0,0,0".parse().unwrap();
        assert!(set.outcomes.iter().all(|x| *x == expect));
    }

    #[test]
    fn point_mass_scores() {
        let s = Sector::bosonic(3, 2);
        let target: Outcome = "0,1,1".parse().unwrap();
        let set = exact_sampler_from_scores(s, |x| if *x == target { 1.0 } else { 0.0 }, 500, &Seed::new(2)).unwrap();
        assert!(set.outcomes.iter().all(|x| *x == target));
        assert!(matches!(
            exact_sampler_from_scores(s, |_| 0.0, 5, &Seed::new(2)),
            Err(Error::AllZeroScores)
        ));
    }

    #[test]
    fn product_sampler_stays_in_sector() {
        let s = Sector::bosonic(5, 3);
        let w = vec![vec![0.5, 0.3, 0.1, 0.1]; 5];
        let p = ProductSampler::new(s, w).unwrap();
        let mut rng = Seed::new(0).rng();
        for _ in 0..1000 {
            assert!(s.contains(&p.draw(&mut rng)));
        }
    }
}
