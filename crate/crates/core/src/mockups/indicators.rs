use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernels::ComplexMatrix;
use crate::models::{first_order_marginals, Model, Outcome, Sector, Statistics};

/// Name of a heaviness indicator in configs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndicatorKind {
    /// `prod_i p_U(x_i)` over first-order marginals.
    MarginalProduct,
    /// Multinomial with `h_i = (1/N) sum_j |U_ji|^2` (FBS only).
    MultinomialMixed,
    /// Multinomial with `h_i = |sum_j U_ji|^2 / N` (FBS only).
    MultinomialSuperposition,
    /// `p_U(x)^s`; needs exact probabilities.
    IdealPower(f64),
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndicatorKind::MarginalProduct => f.write_str("marginal"),
            IndicatorKind::MultinomialMixed => f.write_str("multinomial-mixed"),
            IndicatorKind::MultinomialSuperposition => f.write_str("multinomial-sup"),
            IndicatorKind::IdealPower(s) => write!(f, "ideal-pow:{s}"),
        }
    }
}

impl FromStr for IndicatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "marginal" => Ok(IndicatorKind::MarginalProduct),
            "multinomial-mixed" => Ok(IndicatorKind::MultinomialMixed),
            "multinomial-sup" => Ok(IndicatorKind::MultinomialSuperposition),
            other => {
                let exponent = other.strip_prefix("ideal-pow:").ok_or_else(|| {
                    Error::Parse(format!(
                        "unknown indicator {other:?} (expected marginal | multinomial-mixed | multinomial-sup | ideal-pow:<s>)"
                    ))
                })?;
                let s: f64 = exponent
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad exponent in {other:?}: {e}")))?;
                if !s.is_finite() || s < 0.0 {
                    return Err(Error::Parse(format!("exponent in {other:?} must be finite and >= 0")));
                }
                Ok(IndicatorKind::IdealPower(s))
            }
        }
    }
}

/// An efficiently computable score `h_U(x)` evaluated in the log domain.
#[derive(Debug, Clone)]
pub enum Indicator {
    /// `ln p_U(x_i = k)` per mode and occupation.
    MarginalProduct {
        ln_marginals: Vec<Vec<f64>>,
    },
    /// `ln h_i` per mode; the score is `N!/x! prod_i h_i^{x_i}`.
    Multinomial {
        kind: IndicatorKind,
        ln_weights: Vec<f64>,
    },
    IdealPower {
        exponent: f64,
        model: Model,
    },
}

impl Indicator {
    /// Prepare `kind` for the outcomes of `sector` under `model`.
    pub fn build(kind: IndicatorKind, model: &Model, sector: Sector) -> Result<Self> {
        match kind {
            IndicatorKind::MarginalProduct => {
                let cap = match sector.statistics {
                    Statistics::Bosonic => sector.particles,
                    Statistics::Fermionic => 1,
                };
                let table = first_order_marginals(model, cap)?;
                Ok(Indicator::MarginalProduct {
                    ln_marginals: table
                        .into_iter()
                        .map(|row| row.into_iter().map(f64::ln).collect())
                        .collect(),
                })
            }
            IndicatorKind::MultinomialMixed | IndicatorKind::MultinomialSuperposition => {
                let Model::Fock(fock) = model else {
                    return Err(Error::FamilyMismatch {
                        indicator: kind.to_string(),
                        family: model.family().name(),
                    });
                };
                let weights = if kind == IndicatorKind::MultinomialMixed {
                    multinomial_mixed_weights(fock.rows())
                } else {
                    multinomial_superposition_weights(fock.rows())
                };
                Ok(Indicator::Multinomial {
                    kind,
                    ln_weights: weights.into_iter().map(f64::ln).collect(),
                })
            }
            IndicatorKind::IdealPower(exponent) => Ok(Indicator::IdealPower {
                exponent,
                model: model.clone(),
            }),
        }
    }

    pub fn kind(&self) -> IndicatorKind {
        match self {
            Indicator::MarginalProduct { .. } => IndicatorKind::MarginalProduct,
            Indicator::Multinomial { kind, .. } => *kind,
            Indicator::IdealPower { exponent, .. } => IndicatorKind::IdealPower(*exponent),
        }
    }

    /// `ln h_U(x)`; `-inf` for a zero score.
    pub fn log_score(&self, x: &Outcome) -> Result<f64> {
        match self {
            Indicator::MarginalProduct { ln_marginals } => {
                check_modes(x, ln_marginals.len())?;
                let mut acc = 0.0;
                for (row, &k) in ln_marginals.iter().zip(x.occupations()) {
                    acc += row.get(usize::from(k)).copied().unwrap_or(f64::NEG_INFINITY);
                }
                Ok(acc)
            }
            Indicator::Multinomial { ln_weights, .. } => {
                check_modes(x, ln_weights.len())?;
                let mut acc = ln_factorial(x.total());
                for (&lw, &k) in ln_weights.iter().zip(x.occupations()) {
                    if k > 0 {
                        acc += f64::from(k) * lw - ln_factorial(usize::from(k));
                    }
                }
                Ok(acc)
            }
            Indicator::IdealPower { exponent, model } => {
                let p = model.probability(x)?;
                Ok(if *exponent == 0.0 { 0.0 } else { exponent * p.ln() })
            }
        }
    }

    pub fn score(&self, x: &Outcome) -> Result<f64> {
        self.log_score(x).map(f64::exp)
    }
}

fn check_modes(x: &Outcome, modes: usize) -> Result<()> {
    if x.modes() != modes {
        return Err(Error::Dimension(format!(
            "outcome on {} modes, indicator on {modes}",
            x.modes()
        )));
    }
    Ok(())
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `h_i = (1/N) sum_{j<N} |U_ji|^2`.
pub fn multinomial_mixed_weights(rows: &ComplexMatrix) -> Vec<f64> {
    let n = rows.rows() as f64;
    (0..rows.cols())
        .map(|i| (0..rows.rows()).map(|j| rows[(j, i)].norm_sqr()).sum::<f64>() / n)
        .collect()
}

/// `h_i = |sum_{j<N} U_ji|^2 / N`, clamped at zero.
pub fn multinomial_superposition_weights(rows: &ComplexMatrix) -> Vec<f64> {
    let n = rows.rows() as f64;
    (0..rows.cols())
        .map(|i| {
            let s: num_complex::Complex64 = (0..rows.rows()).map(|j| rows[(j, i)]).sum();
            (s.norm_sqr() / n).max(0.0)
        })
        .collect()
}

fn evaluate(kind: IndicatorKind, model: &Model, x: &Outcome) -> Result<f64> {
    let sector = model.sector(x.total())?;
    sector.check(x)?;
    Indicator::build(kind, model, sector)?.score(x)
}

/// `prod_i p_U(x_i)`. Builds the marginal table on every call; use
/// [`Indicator`] to score many outcomes.
pub fn h_marginal_product(model: &Model, x: &Outcome) -> Result<f64> {
    evaluate(IndicatorKind::MarginalProduct, model, x)
}

/// Multinomial pmf with uniformly mixed input weights.
pub fn h_multinomial_mixed(model: &Model, x: &Outcome) -> Result<f64> {
    evaluate(IndicatorKind::MultinomialMixed, model, x)
}

/// Multinomial pmf with equal-superposition input weights.
pub fn h_multinomial_superposition(model: &Model, x: &Outcome) -> Result<f64> {
    evaluate(IndicatorKind::MultinomialSuperposition, model, x)
}

/// `p_U(x)^s`, unnormalized.
pub fn h_ideal_power(model: &Model, s: f64, x: &Outcome) -> Result<f64> {
    evaluate(IndicatorKind::IdealPower(s), model, x)
}
