//! Closed-form XE expectations over Haar-random circuits and their Monte
//! Carlo counterparts.
//!
//! Monte Carlo estimators restrict to collision-free outcomes and use
//! `haar_isometry` for the `N` input rows. Trial `t` uses `seed.child(t)`.

use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{gaussian_matrix, haar_isometry, permanent};
use crate::models::{ln_binomial, FockModel, Outcome, Sector};
use crate::noise::partially_distinguishable_probability;
use crate::seed::Seed;
use crate::sum::{mean_and_stderr, sum};

/// Sectors up to this size are summed exhaustively in [`mc_xe_pd`].
pub const FULL_ENUMERATION_LIMIT: u128 = 100_000;

/// Collision-free outcomes drawn per trial when subsampling.
pub const SUBSAMPLE: usize = 2048;

/// Relative standard error above which a result is flagged.
pub const VARIANCE_FLAG: f64 = 0.5;

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn factorial(n: usize) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

/// Derangement count `!m`.
pub fn derangements(m: usize) -> f64 {
    let (mut a, mut b) = (1.0, 0.0);
    if m == 0 {
        return a;
    }
    for k in 2..=m {
        let next = (k - 1) as f64 * (a + b);
        a = b;
        b = next;
    }
    b
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > m {
        return Err(Error::InvalidParameter(format!("need 1 <= N <= M, got N={n}, M={m}")));
    }
    Ok(())
}

/// Ideal XE expectation over collision-free outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealXe {
    /// `C(M,N) N! (N+1)! / M^{2N}`.
    pub exact: f64,
    /// `(N+1)! / M^N`.
    pub approx: f64,
}

pub const CLOSED_FORM_MAX_PHOTONS: usize = 20;

pub fn closed_form_xe_id(n: usize, m: usize) -> Result<IdealXe> {
    check_nm(n, m)?;
    if n > CLOSED_FORM_MAX_PHOTONS {
        return Err(Error::PhotonCap {
            total: n,
            cap: CLOSED_FORM_MAX_PHOTONS,
        });
    }
    let ln_m = (m as f64).ln();
    let ln_fact = ln_factorial(n) + ln_factorial(n + 1);
    Ok(IdealXe {
        exact: (ln_binomial(m as f64, n as f64) + ln_fact - 2.0 * n as f64 * ln_m).exp(),
        approx: (ln_factorial(n + 1) - n as f64 * ln_m).exp(),
    })
}

/// `N! / M^N`, the XE of the fully distinguishable sampler.
pub fn closed_form_xe_idp(n: usize, m: usize) -> Result<f64> {
    check_nm(n, m)?;
    Ok((ln_factorial(n) - n as f64 * (m as f64).ln()).exp())
}

/// `e^2 (1 - ρ^{N+1}) / (1 - ρ)` for `0 <= ρ < 1`.
pub fn pd_bound(rho: f64, n: usize) -> Result<f64> {
    if rho == 1.0 {
        return Err(Error::InvalidParameter(
            "bound is singular at rho = 1 (its limit is (N+1) e^2)".into(),
        ));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho {rho} outside [0, 1)")));
    }
    let e2 = std::f64::consts::E.powi(2);
    Ok(e2 * (1.0 - rho.powi(n as i32 + 1)) / (1.0 - rho))
}

pub const PD_EXACT_MAX_PHOTONS: usize = 12;

/// Integer coefficients `c_k` of `sum_k ρ^{N-k} c_k`:
/// `c_k = C(N,k)^2 (N-k)! !(N-k) sum_j C(k,j)^2 j! (k-j)! !(k-j) 2^j`.
pub fn pd_coefficients(n: usize) -> Vec<f64> {
    let c = |a: usize, b: usize| ln_binomial(a as f64, b as f64).exp().round();
    (0..=n)
        .map(|k| {
            let inner = sum((0..=k).map(|j| {
                c(k, j).powi(2) * factorial(j) * factorial(k - j) * derangements(k - j) * 2f64.powi(j as i32)
            }));
            c(n, k).powi(2) * factorial(n - k) * derangements(n - k) * inner
        })
        .collect()
}

/// Exact `E_U[sum_{collision-free x} p(x) q_ρ(x)]`.
pub fn pd_exact_xe_expectation(rho: f64, n: usize, m: usize) -> Result<f64> {
    check_nm(n, m)?;
    if n > PD_EXACT_MAX_PHOTONS {
        return Err(Error::PhotonCap {
            total: n,
            cap: PD_EXACT_MAX_PHOTONS,
        });
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho {rho} outside [0, 1]")));
    }
    let poly = sum(pd_coefficients(n)
        .into_iter()
        .enumerate()
        .map(|(k, ck)| rho.powi((n - k) as i32) * ck));
    let scale = (ln_binomial(m as f64, n as f64) - 2.0 * n as f64 * (m as f64).ln()).exp();
    Ok(scale * poly)
}

/// Moments of the normalized Gaussian-matrix quantities
/// `p~ = |Per Z|^2 / N!` and `h~ = prod_i (sum_j |Z_ji|^2) / N^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPowerMoments {
    /// `E[h~^s] = ((N+s-1)! / (N-1)!)^N / N^{sN}`.
    pub e_h: f64,
    /// `E[p~ h~^s] = ((N+s)! / N!)^N / N^{sN}`.
    pub e_ph: f64,
    /// `(1 + s/N)^N`.
    pub ratio: f64,
}

pub fn closed_form_h_power_moments(n: usize, s: usize) -> Result<HPowerMoments> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be >= 1".into()));
    }
    let nf = n as f64;
    let ln_norm = (s * n) as f64 * nf.ln();
    let e_h = (nf * (ln_factorial(n + s - 1) - ln_factorial(n - 1)) - ln_norm).exp();
    let e_ph = (nf * (ln_factorial(n + s) - ln_factorial(n)) - ln_norm).exp();
    Ok(HPowerMoments {
        e_h,
        e_ph,
        ratio: (1.0 + s as f64 / nf).powi(n as i32),
    })
}

/// Parameters of a theory check.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TheoryParams {
    pub n: usize,
    pub m: Option<usize>,
    pub s: Option<usize>,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryResult {
    pub name: &'static str,
    pub params: TheoryParams,
    pub closed_form: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub trials: usize,
}

impl TheoryResult {
    pub fn relative_error(&self) -> f64 {
        (self.estimate - self.closed_form).abs() / self.closed_form.abs()
    }

    /// `|estimate - closed form| / std error`.
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.closed_form).abs() / self.std_error
    }

    /// Standard error above [`VARIANCE_FLAG`] of the estimate.
    pub fn high_variance(&self) -> bool {
        self.std_error.is_nan() || self.std_error > VARIANCE_FLAG * self.estimate.abs()
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    Ok(())
}

/// `sum_{collision-free x} f(x)` for one circuit, exhaustive or by uniform
/// subsampling with unbiased `C(M,N) / S` scaling.
fn collision_free_sum(sector: Sector, seed: &Seed, f: impl Fn(&Outcome) -> Result<f64>) -> Result<f64> {
    if sector.cardinality().is_some_and(|c| c <= FULL_ENUMERATION_LIMIT) {
        let terms = sector.enumerate()?.map(|x| f(&x)).collect::<Result<Vec<f64>>>()?;
        return Ok(sum(terms));
    }
    let mut rng = seed.rng();
    let mut terms = Vec::with_capacity(SUBSAMPLE);
    for _ in 0..SUBSAMPLE {
        let modes = index::sample(&mut rng, sector.modes, sector.particles).into_vec();
        terms.push(f(&Outcome::from_modes(sector.modes, &modes)?)?);
    }
    Ok(sum(terms) / SUBSAMPLE as f64 * sector.ln_cardinality().exp())
}

/// Monte Carlo `E_U[sum_{collision-free x} p(x) q_ρ(x)]` with `q_ρ` the
/// partially distinguishable distribution. `ρ = 1` gives the ideal XE.
pub fn mc_xe_pd(rho: f64, n: usize, m: usize, trials: usize, seed: &Seed) -> Result<TheoryResult> {
    check_nm(n, m)?;
    check_trials(trials)?;
    let sector = Sector::fermionic(m, n);
    let values = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let trial = seed.child(t);
            let model = FockModel::from_rows(haar_isometry(n, m, &trial.child(0))?)?;
            collision_free_sum(sector, &trial.child(1), |x| {
                let w = model.permanent_weight(x)?;
                if rho == 1.0 {
                    Ok(w * w)
                } else {
                    Ok(w * partially_distinguishable_probability(&model, x, rho)?)
                }
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let (estimate, std_error) = mean_and_stderr(&values);
    Ok(TheoryResult {
        name: if rho == 1.0 { "xe_id" } else { "xe_pd" },
        params: TheoryParams {
            n,
            m: Some(m),
            s: None,
            rho: Some(rho),
        },
        closed_form: pd_exact_xe_expectation(rho, n, m)?,
        estimate,
        std_error,
        trials,
    })
}

/// Monte Carlo ideal XE against `C(M,N) N! (N+1)! / M^{2N}`.
pub fn mc_xe_id(n: usize, m: usize, trials: usize, seed: &Seed) -> Result<TheoryResult> {
    let mut r = mc_xe_pd(1.0, n, m, trials, seed)?;
    r.closed_form = closed_form_xe_id(n, m)?.exact;
    Ok(r)
}

/// Monte Carlo `E|Per Z|^2` and `E|Per Z|^4` over `N x N` complex Gaussian
/// matrices, against `N!` and `N!(N+1)!`.
pub fn mc_gaussian_permanent_moments(n: usize, draws: usize, seed: &Seed) -> Result<(TheoryResult, TheoryResult)> {
    check_trials(draws)?;
    let abs2 = (0..draws as u64)
        .into_par_iter()
        .map(|t| Ok(permanent(&gaussian_matrix(n, &seed.child(t))?)?.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    let abs4: Vec<f64> = abs2.iter().map(|a| a * a).collect();
    let params = TheoryParams {
        n,
        ..Default::default()
    };
    let make = |name, closed_form, values: &[f64]| {
        let (estimate, std_error) = mean_and_stderr(values);
        TheoryResult {
            name,
            params,
            closed_form,
            estimate,
            std_error,
            trials: draws,
        }
    };
    Ok((
        make("per_moment_2", factorial(n), &abs2),
        make("per_moment_4", factorial(n) * factorial(n + 1), &abs4),
    ))
}

/// Ratio of means `E[p~ h~^s] / E[h~^s]` over Gaussian matrices, against
/// `(1 + s/N)^N`. The standard error is the delta-method error of the ratio.
pub fn mc_h_power_ratio(n: usize, s: usize, trials: usize, seed: &Seed) -> Result<TheoryResult> {
    check_trials(trials)?;
    let closed = closed_form_h_power_moments(n, s)?;
    let nf = n as f64;
    let pairs = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let z = gaussian_matrix(n, &seed.child(t))?;
            let p = permanent(&z)?.norm_sqr() / factorial(n);
            let h: f64 = (0..n)
                .map(|i| (0..n).map(|j| z[(j, i)].norm_sqr()).sum::<f64>() / nf)
                .product();
            let hs = h.powi(s as i32);
            Ok((p * hs, hs))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (ma, _) = mean_and_stderr(&a);
    let (mb, _) = mean_and_stderr(&b);
    let ratio = ma / mb;
    // Residuals of the linearized ratio.
    let resid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - ratio * y) / mb).collect();
    let (_, std_error) = mean_and_stderr(&resid);
    Ok(TheoryResult {
        name: "h_power_ratio",
        params: TheoryParams {
            n,
            m: None,
            s: Some(s),
            rho: None,
        },
        closed_form: closed.ratio,
        estimate: ratio,
        std_error,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derangement_sequence() {
        let got: Vec<f64> = (0..8).map(derangements).collect();
        assert_eq!(got, vec![1.0, 0.0, 1.0, 2.0, 9.0, 44.0, 265.0, 1854.0]);
    }

    #[test]
    fn single_photon_forms() {
        let r = closed_form_xe_id(1, 50).unwrap();
        assert!((r.exact - 2.0 / 50.0).abs() < 1e-15);
        assert!((r.approx - 2.0 / 50.0).abs() < 1e-15);
        assert!((closed_form_xe_idp(1, 50).unwrap() - 0.02).abs() < 1e-15);
        assert!((closed_form_xe_idp(4, 100).unwrap() - 24e-8).abs() < 1e-20);
    }

    #[test]
    fn pd_coefficients_at_one_give_ideal() {
        for n in 1..=8 {
            let total: f64 = pd_coefficients(n).iter().sum();
            assert_eq!(total, factorial(n) * factorial(n + 1), "N={n}");
        }
    }

    #[test]
    fn bound_values() {
        let e2 = std::f64::consts::E.powi(2);
        assert!((pd_bound(0.0, 5).unwrap() - e2).abs() < 1e-12);
        assert!((pd_bound(0.5, 3).unwrap() - e2 * (1.0 - 0.0625) / 0.5).abs() < 1e-12);
        assert!((pd_bound(0.5, 200).unwrap() - 2.0 * e2).abs() < 1e-12);
        assert!(pd_bound(1.0, 3).is_err());
        assert!(pd_bound(-0.1, 3).is_err());
    }

    #[test]
    fn h_moments_small_s() {
        let r0 = closed_form_h_power_moments(5, 0).unwrap();
        assert!((r0.e_h - 1.0).abs() < 1e-12 && (r0.e_ph - 1.0).abs() < 1e-12);
        let r1 = closed_form_h_power_moments(4, 1).unwrap();
        assert!((r1.e_h - 1.0).abs() < 1e-12);
        assert!((r1.e_ph / r1.e_h - r1.ratio).abs() < 1e-12);
        let r2 = closed_form_h_power_moments(4, 2).unwrap();
        assert!((r2.ratio - 5.0625).abs() < 1e-12);
        assert!((r2.e_ph / r2.e_h - 5.0625).abs() < 1e-12);
    }

    #[test]
    fn mc_single_photon() {
        let r = mc_xe_id(1, 60, 400, &Seed::new(3)).unwrap();
        assert!(r.z_score() < 4.0, "{r:?}");
    }
}
