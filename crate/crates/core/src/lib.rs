//! Heavy-outcome post-selection spoofing of cross-entropy benchmarks for
//! linear-optical sampling.
//!
//! The crate is organized bottom-up:
//!
//! * [`kernels`]: permanents, determinants, hafnians, Haar unitaries.
//! * [`models`]: ideal probabilities for Fock-state boson sampling, Gaussian
//!   boson sampling and fermion sampling, plus sector enumeration.
//! * [`mockups`]: efficient samplers `q_U` and heaviness indicators `h_U`.
//! * [`spoofer`]: the post-selection algorithm.
//! * [`metrics`]: log and linear cross-entropy estimators, exact XE, the
//!   Bayesian score and heaviness profiles.
//! * [`noise`]: photon loss and partial distinguishability.
//! * [`theory`]: closed-form XE expectations and their Monte Carlo checks.
//!
//! ```
//! use xebspoof::kernels::haar_unitary;
//! use xebspoof::metrics::{exact_xe, XeVariant};
//! use xebspoof::models::{FockModel, Model, SectorDistribution};
//! use xebspoof::Seed;
//!
//! let u = haar_unitary(6, &Seed::new(1)).unwrap();
//! let model = Model::Fock(FockModel::new(&u, 3).unwrap());
//! let sector = model.sector(3).unwrap();
//! let p = SectorDistribution::from_model(&model, sector).unwrap();
//! assert!((p.total() - 1.0).abs() < 1e-9);
//!
//! // A mock-up proportional to p^2 scores a higher XE than the ideal sampler.
//! let q = p.map(|w| w * w).unwrap().normalized().unwrap();
//! let ideal = exact_xe(&p, &p, XeVariant::Log).unwrap();
//! let squared = exact_xe(&p, &q, XeVariant::Log).unwrap();
//! assert!(squared > ideal);
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod kernels;
pub mod metrics;
pub mod mockups;
pub mod models;
pub mod noise;
pub mod seed;
pub mod spoofer;
pub mod sum;
pub mod theory;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use seed::Seed;
