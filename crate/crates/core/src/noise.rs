//! Noisy Fock boson sampling: photon loss and partial distinguishability.
//!
//! Distinguishability follows the uniform-overlap model
//! `S_ij = x + (1 - x) δ_ij`: `x = 1` is the ideal (indistinguishable) case
//! and `x = 0` is fully distinguishable.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{permanent, ComplexMatrix};
use crate::models::{FockModel, Outcome};
use crate::sum::Compensated;

/// Largest photon number for the permutation-sum evaluation.
pub const DISTINGUISHABILITY_MAX_PHOTONS: usize = 7;

const IMAGINARY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Per-photon transmission `η`.
    pub transmission: f64,
    /// Pairwise overlap `x`.
    pub distinguishability: f64,
}

impl NoiseSpec {
    pub fn new(transmission: f64, distinguishability: f64) -> Result<Self> {
        unit_interval("transmission", transmission)?;
        unit_interval("distinguishability", distinguishability)?;
        Ok(Self {
            transmission,
            distinguishability,
        })
    }

    pub fn ideal() -> Self {
        Self {
            transmission: 1.0,
            distinguishability: 1.0,
        }
    }

    /// Probability of `x` in the surviving `N`-photon sector.
    pub fn probability(&self, model: &FockModel, x: &Outcome) -> Result<f64> {
        let base = if self.distinguishability == 1.0 {
            model.probability(x)?
        } else {
            partially_distinguishable_probability(model, x, self.distinguishability)?
        };
        Ok(self.transmission.powi(model.photons() as i32) * base)
    }
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("{name} {v} outside [0, 1]")));
    }
    Ok(())
}

/// `η^N p_U(x)`: the branch in which all `N` photons survive.
pub fn lossy_probability(model: &FockModel, x: &Outcome, transmission: f64) -> Result<f64> {
    unit_interval("transmission", transmission)?;
    Ok(transmission.powi(model.photons() as i32) * model.probability(x)?)
}

/// `sum_σ x^{N - fix(σ)} Per(M ∗ M*_σ) / x!` with `M = U_x` and
/// `(M*_σ)_ij = conj(M_{i, σ(j)})`.
pub fn partially_distinguishable_probability(model: &FockModel, x: &Outcome, distinguishability: f64) -> Result<f64> {
    unit_interval("distinguishability", distinguishability)?;
    let n = model.photons();
    if n > DISTINGUISHABILITY_MAX_PHOTONS {
        return Err(Error::PhotonCap {
            total: n,
            cap: DISTINGUISHABILITY_MAX_PHOTONS,
        });
    }
    let m = model.submatrix(x)?;
    let mut re = Compensated::new();
    let mut im = Compensated::new();
    let mut sigma: Vec<usize> = (0..n).collect();
    loop {
        let moved = sigma.iter().enumerate().filter(|(i, &s)| *i != s).count();
        let weight = distinguishability.powi(moved as i32);
        if weight != 0.0 {
            let hadamard = ComplexMatrix::from_fn(n, n, |i, j| m[(i, j)] * m[(i, sigma[j])].conj());
            let per: Complex64 = permanent(&hadamard)?;
            re.add(weight * per.re);
            im.add(weight * per.im);
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    if im.value().abs() > IMAGINARY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "imaginary residue {:e} in distinguishability sum",
            im.value()
        )));
    }
    Ok(re.value() / x.factorial_product())
}

/// Advance to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&v| v > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::haar_unitary;
    use crate::seed::Seed;

    fn model() -> FockModel {
        FockModel::new(&haar_unitary(6, &Seed::new(21)).unwrap(), 3).unwrap()
    }

    #[test]
    fn permutations_cover_symmetric_group() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(p, vec![3, 2, 1, 0]);
    }

    #[test]
    fn indistinguishable_limit() {
        let fm = model();
        let x: Outcome = "1,0,1,0,0,1".parse().unwrap();
        let q = partially_distinguishable_probability(&fm, &x, 1.0).unwrap();
        assert!((q - fm.probability(&x).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn distinguishable_limit() {
        let fm = model();
        let x: Outcome = "2,0,0,1,0,0".parse().unwrap();
        let abs2 = fm.submatrix(&x).unwrap();
        let abs2 = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::from(abs2[(i, j)].norm_sqr()));
        let expect = permanent(&abs2).unwrap().re / 2.0;
        let q = partially_distinguishable_probability(&fm, &x, 0.0).unwrap();
        assert!((q - expect).abs() < 1e-12);
    }

    #[test]
    fn loss_limits() {
        let fm = model();
        let x: Outcome = "1,1,1,0,0,0".parse().unwrap();
        assert_eq!(lossy_probability(&fm, &x, 1.0).unwrap(), fm.probability(&x).unwrap());
        assert_eq!(lossy_probability(&fm, &x, 0.0).unwrap(), 0.0);
        assert!(lossy_probability(&fm, &x, 1.5).is_err());
        assert!(NoiseSpec::new(0.5, -0.1).is_err());
    }

    #[test]
    fn photon_cap() {
        let fm = FockModel::new(&haar_unitary(9, &Seed::new(1)).unwrap(), 8).unwrap();
        let x = Outcome::from_modes(9, &[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        assert!(matches!(
            partially_distinguishable_probability(&fm, &x, 0.5),
            Err(Error::PhotonCap { .. })
        ));
    }
}
