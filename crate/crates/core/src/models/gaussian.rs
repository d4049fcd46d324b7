use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{hafnian, ComplexMatrix, Interferometer, HAFNIAN_MAX_DIM};

use super::{Outcome, Sector};

/// Gaussian boson sampling with photon-number-resolving detectors.
///
/// Each input mode `i` carries single-mode squeezed vacuum with squeezing
/// `r_i`; the circuit is lossless and there is no displacement. With
/// `B = U diag(tanh r) U^T`,
///
/// ```text
/// p(x) = |Haf(B_x)|^2 / (x! prod_i cosh r_i)
/// ```
///
/// where `B_x` repeats row and column `i` `x_i` times. Outcomes with an odd
/// total have probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    interferometer: Interferometer,
    squeezing: Vec<f64>,
    b: ComplexMatrix,
    ln_vacuum: f64,
}

impl GaussianModel {
    pub fn new(interferometer: Interferometer, squeezing: Vec<f64>) -> Result<Self> {
        let m = interferometer.modes();
        if squeezing.len() != m {
            return Err(Error::Dimension(format!(
                "{} squeezing values for {m} modes",
                squeezing.len()
            )));
        }
        if let Some(r) = squeezing.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "squeezing must be finite and >= 0, got {r}"
            )));
        }
        let u = interferometer.matrix();
        let tanh: Vec<f64> = squeezing.iter().map(|r| r.tanh()).collect();
        let b = ComplexMatrix::from_fn(m, m, |i, j| {
            (0..m).map(|k| u[(i, k)] * u[(j, k)] * tanh[k]).sum::<Complex64>()
        });
        // Symmetrize away round-off so the hafnian symmetry check is exact.
        let b = ComplexMatrix::from_fn(m, m, |i, j| (b[(i, j)] + b[(j, i)]) * 0.5);
        let ln_vacuum = -squeezing.iter().map(|r| r.cosh().ln()).sum::<f64>();
        Ok(Self {
            interferometer,
            squeezing,
            b,
            ln_vacuum,
        })
    }

    /// Equal squeezing on every mode chosen so the mean photon number is
    /// `mean_photons`: `M sinh^2 r = mean_photons`.
    pub fn uniform_mean_photons(interferometer: Interferometer, mean_photons: f64) -> Result<Self> {
        if !(mean_photons.is_finite() && mean_photons >= 0.0) {
            return Err(Error::InvalidParameter(format!("mean photon number {mean_photons}")));
        }
        let m = interferometer.modes();
        let r = (mean_photons / m as f64).sqrt().asinh();
        Self::new(interferometer, vec![r; m])
    }

    pub fn modes(&self) -> usize {
        self.interferometer.modes()
    }

    pub fn squeezing(&self) -> &[f64] {
        &self.squeezing
    }

    pub fn interferometer(&self) -> &Interferometer {
        &self.interferometer
    }

    /// `B = U diag(tanh r) U^T`.
    pub fn b_matrix(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn mean_photons(&self) -> f64 {
        self.squeezing.iter().map(|r| r.sinh().powi(2)).sum()
    }

    pub fn sector(&self, photons: usize) -> Sector {
        Sector::bosonic(self.modes(), photons)
    }

    pub fn probability(&self, x: &Outcome) -> Result<f64> {
        if x.modes() != self.modes() {
            return Err(Error::OutsideSector {
                outcome: x.to_string(),
                reason: format!("{} modes, model has {}", x.modes(), self.modes()),
            });
        }
        if x.total() > HAFNIAN_MAX_DIM {
            return Err(Error::PhotonCap {
                total: x.total(),
                cap: HAFNIAN_MAX_DIM,
            });
        }
        if x.total() % 2 == 1 {
            return Ok(0.0);
        }
        let list = x.mode_list();
        let bx = self.b.select(&list, &list)?;
        let haf = hafnian(&bx)?;
        Ok(haf.norm_sqr() / x.factorial_product() * self.ln_vacuum.exp())
    }

    /// Photon-number distribution of output mode `mode`, truncated at `cap`.
    ///
    /// The reduced state is a zero-mean single-mode Gaussian state with
    /// `n = <a^dag a>` and `m = <a a>`. Writing `D = (n+1)^2 - |m|^2`,
    /// `beta = m / D` and `gamma = 1 - (n+1)/D`,
    ///
    /// ```text
    /// p(k) = sum_j [C(k,2j) (2j-1)!!]^2 (k-2j)! |beta|^(2j) gamma^(k-2j) / (k! sqrt(D))
    /// ```
    ///
    /// which is the single-mode hafnian formula with the matching count done
    /// in closed form.
    pub fn marginal(&self, mode: usize, cap: usize) -> Result<Vec<f64>> {
        if mode >= self.modes() {
            return Err(Error::IndexOutOfRange {
                index: mode,
                len: self.modes(),
            });
        }
        let u = self.interferometer.matrix();
        let mut n = 0.0;
        let mut m = Complex64::new(0.0, 0.0);
        for (j, r) in self.squeezing.iter().enumerate() {
            let uij = u[(mode, j)];
            n += uij.norm_sqr() * r.sinh().powi(2);
            m += uij * uij * (r.sinh() * r.cosh());
        }
        Ok(single_mode_gaussian_photon_distribution(n, m.norm(), cap))
    }
}

/// Photon statistics of a zero-mean single-mode Gaussian state with
/// `<a^dag a> = n` and `|<a a>| = m_abs`, for counts `0..=cap`.
pub fn single_mode_gaussian_photon_distribution(n: f64, m_abs: f64, cap: usize) -> Vec<f64> {
    let d = (n + 1.0).powi(2) - m_abs * m_abs;
    let beta2 = (m_abs / d).powi(2);
    let gamma = 1.0 - (n + 1.0) / d;
    let norm = d.sqrt();
    // ln of (2j-1)!! C(k,2j) etc. kept as plain floats; cap stays small.
    let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    let double_fact = |k: usize| {
        // (2j-1)!! for argument j
        (1..=k).map(|v| (2 * v - 1) as f64).product::<f64>()
    };
    (0..=cap)
        .map(|k| {
            let mut acc = 0.0;
            for j in 0..=k / 2 {
                let pairs = fact(k) / (fact(2 * j) * fact(k - 2 * j)) * double_fact(j);
                acc += pairs * pairs * fact(k - 2 * j) * beta2.powi(j as i32) * gamma.powi((k - 2 * j) as i32);
            }
            acc / (fact(k) * norm)
        })
        .collect()
}

/// Single-mode squeezed vacuum: `p(2k) = (2k)!/(2^k k!)^2 tanh^(2k) r / cosh r`.
pub fn squeezed_vacuum_distribution(r: f64, n_max: usize) -> Vec<f64> {
    let t2 = r.tanh().powi(2);
    let mut out = vec![0.0; n_max + 1];
    let mut a = 1.0 / r.cosh();
    for k in 0..=n_max / 2 {
        if k > 0 {
            a *= (2 * k - 1) as f64 / (2 * k) as f64 * t2;
        }
        out[2 * k] = a;
    }
    out
}

/// `Pr(N)` for `N = 0..=n_max`: the convolution of the per-mode squeezed
/// vacuum distributions, since a lossless circuit conserves photon number.
pub fn total_photon_distribution(squeezing: &[f64], n_max: usize) -> Vec<f64> {
    let mut acc = vec![0.0; n_max + 1];
    acc[0] = 1.0;
    for &r in squeezing {
        let single = squeezed_vacuum_distribution(r, n_max);
        let mut next = vec![0.0; n_max + 1];
        for (a, &pa) in acc.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            for (b, &pb) in single.iter().enumerate().take(n_max + 1 - a) {
                next[a + b] += pa * pb;
            }
        }
        acc = next;
    }
    acc
}

/// `Pr` over the total photon number for a model.
pub fn gbs_total_photon_distribution(model: &GaussianModel, n_max: usize) -> Vec<f64> {
    total_photon_distribution(model.squeezing(), n_max)
}

/// Pure-state GBS probability of `x`.
pub fn gbs_probability(model: &GaussianModel, x: &Outcome) -> Result<f64> {
    model.probability(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::haar_unitary;
    use crate::Seed;

    fn single_mode_closed_form(r: f64, photons: usize) -> f64 {
        // (2k)! / (2^k k!)^2 tanh^(2k) r / cosh r, evaluated directly.
        if photons % 2 == 1 {
            return 0.0;
        }
        let k = photons / 2;
        let f = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
        f(2 * k) / (2f64.powi(k as i32) * f(k)).powi(2) * r.tanh().powi(2 * k as i32) / r.cosh()
    }

    #[test]
    fn single_mode_matches_closed_form() {
        let r = 0.7;
        let model = GaussianModel::new(Interferometer::identity(1), vec![r]).unwrap();
        for photons in 0..=10 {
            let x = Outcome::new(vec![photons as u8]);
            let p = model.probability(&x).unwrap();
            assert!((p - single_mode_closed_form(r, photons)).abs() < 1e-14, "k = {photons}");
        }
        let conv = total_photon_distribution(&[r], 10);
        for (k, p) in conv.iter().enumerate() {
            assert!((p - single_mode_closed_form(r, k)).abs() < 1e-14);
        }
    }

    #[test]
    fn vacuum_overlap() {
        let u = haar_unitary(5, &Seed::new(8)).unwrap();
        let r = vec![0.3, 0.1, 0.0, 0.8, 0.5];
        let expect: f64 = r.iter().map(|v: &f64| 1.0 / v.cosh()).product();
        let model = GaussianModel::new(u, r).unwrap();
        let vac = Outcome::new(vec![0; 5]);
        assert!((model.probability(&vac).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn odd_totals_vanish_and_cap_is_enforced() {
        let u = haar_unitary(3, &Seed::new(1)).unwrap();
        let model = GaussianModel::new(u, vec![0.5; 3]).unwrap();
        assert_eq!(model.probability(&"1,0,0".parse().unwrap()).unwrap(), 0.0);
        assert!(matches!(
            model.probability(&Outcome::new(vec![22, 0, 0])),
            Err(Error::PhotonCap { .. })
        ));
    }

    #[test]
    fn no_squeezing_means_vacuum() {
        let d = total_photon_distribution(&[0.0; 4], 6);
        assert_eq!(d[0], 1.0);
        assert!(d[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn marginal_of_pure_squeezed_and_thermal_limits() {
        // Pure squeezed vacuum: n = sinh^2 r, |m| = sinh r cosh r.
        let r: f64 = 0.6;
        let p = single_mode_gaussian_photon_distribution(r.sinh().powi(2), r.sinh() * r.cosh(), 8);
        for (k, v) in p.iter().enumerate() {
            assert!((v - single_mode_closed_form(r, k)).abs() < 1e-13);
        }
        // Thermal: m = 0 gives n^k / (n+1)^(k+1).
        let n = 0.4;
        let p = single_mode_gaussian_photon_distribution(n, 0.0, 8);
        for (k, v) in p.iter().enumerate() {
            assert!((v - n.powi(k as i32) / (n + 1.0).powi(k as i32 + 1)).abs() < 1e-14);
        }
    }
}
