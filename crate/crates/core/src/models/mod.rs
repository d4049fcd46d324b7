//! Ideal output distributions for the three model families.
//!
//! * [`FockModel`]: Fock-state boson sampling, permanents.
//! * [`GaussianModel`]: pure-state Gaussian boson sampling, hafnians.
//! * [`FermionModel`]: fermion sampling, determinants.
//!
//! [`Model`] wraps the three behind one interface, and [`SectorDistribution`]
//! materializes a model's probabilities over an enumerable [`Sector`].

mod distribution;
mod fermion;
mod fock;
mod gaussian;
mod outcome;

use std::fmt;

pub use distribution::SectorDistribution;
pub use fermion::{fs_probability, FermionModel};
pub use fock::{fbs_probability, FockModel};
pub use gaussian::{
    gbs_probability, gbs_total_photon_distribution, single_mode_gaussian_photon_distribution,
    squeezed_vacuum_distribution, total_photon_distribution, GaussianModel,
};
pub use outcome::{Outcome, Sector, SectorIter, Statistics, ENUMERATION_CAP};

pub(crate) use outcome::ln_binomial;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Fock,
    Gaussian,
    Fermion,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Fock => "fbs",
            Family::Gaussian => "gbs",
            Family::Fermion => "fs",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A model family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Fock(FockModel),
    Gaussian(GaussianModel),
    Fermion(FermionModel),
}

impl Model {
    pub fn family(&self) -> Family {
        match self {
            Model::Fock(_) => Family::Fock,
            Model::Gaussian(_) => Family::Gaussian,
            Model::Fermion(_) => Family::Fermion,
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            Model::Fock(m) => m.modes(),
            Model::Gaussian(m) => m.modes(),
            Model::Fermion(m) => m.modes(),
        }
    }

    pub fn statistics(&self) -> Statistics {
        match self {
            Model::Fermion(_) => Statistics::Fermionic,
            _ => Statistics::Bosonic,
        }
    }

    /// The particle number fixed by the input, if any (`None` for GBS).
    pub fn fixed_particles(&self) -> Option<usize> {
        match self {
            Model::Fock(m) => Some(m.photons()),
            Model::Fermion(m) => Some(m.particles()),
            Model::Gaussian(_) => None,
        }
    }

    /// The `particles` sector; FBS and FS only have their input sector.
    pub fn sector(&self, particles: usize) -> Result<Sector> {
        if let Some(n) = self.fixed_particles() {
            if n != particles {
                return Err(Error::InvalidParameter(format!(
                    "{} model has {n} particles, sector {particles} requested",
                    self.family()
                )));
            }
        }
        Ok(Sector {
            modes: self.modes(),
            particles,
            statistics: self.statistics(),
        })
    }

    /// Ideal probability `p_U(x)`.
    pub fn probability(&self, x: &Outcome) -> Result<f64> {
        match self {
            Model::Fock(m) => m.probability(x),
            Model::Gaussian(m) => m.probability(x),
            Model::Fermion(m) => m.probability(x),
        }
    }

    /// `Pr(N)` for `N = 0..=n_max`. Degenerate at the input particle number
    /// for FBS and FS.
    pub fn sector_weights(&self, n_max: usize) -> Vec<f64> {
        match self {
            Model::Gaussian(m) => total_photon_distribution(m.squeezing(), n_max),
            _ => {
                let n = self.fixed_particles().expect("fixed");
                (0..=n_max).map(|k| if k == n { 1.0 } else { 0.0 }).collect()
            }
        }
    }

    /// `Pr(N)` of a single sector.
    pub fn sector_probability(&self, particles: usize) -> f64 {
        self.sector_weights(particles)[particles]
    }
}

/// First-order marginal of mode `mode`: `Pr(x_mode = k)` for `k = 0..=cap`.
///
/// * GBS: photon statistics of the reduced single-mode Gaussian state.
/// * FS: Bernoulli with `Pr(occupied) = K_ii`; entries above 1 are zero.
/// * FBS: exhaustive summation over the input sector.
pub fn first_order_marginal(model: &Model, mode: usize, cap: usize) -> Result<Vec<f64>> {
    if mode >= model.modes() {
        return Err(Error::IndexOutOfRange {
            index: mode,
            len: model.modes(),
        });
    }
    Ok(first_order_marginals(model, cap)?.swap_remove(mode))
}

/// [`first_order_marginal`] for every mode at once.
pub fn first_order_marginals(model: &Model, cap: usize) -> Result<Vec<Vec<f64>>> {
    let m = model.modes();
    match model {
        Model::Gaussian(g) => (0..m).map(|i| g.marginal(i, cap)).collect(),
        Model::Fermion(f) => Ok(f
            .occupation_probabilities()
            .into_iter()
            .map(|k| {
                let mut row = vec![0.0; cap + 1];
                row[0] = 1.0 - k;
                if cap >= 1 {
                    row[1] = k;
                }
                row
            })
            .collect()),
        Model::Fock(f) => {
            let dist = SectorDistribution::from_model(model, f.sector())?;
            let mut table = vec![vec![0.0; cap + 1]; m];
            for (x, p) in dist.iter() {
                for (i, &occ) in x.occupations().iter().enumerate() {
                    if let Some(slot) = table[i].get_mut(usize::from(occ)) {
                        *slot += p;
                    }
                }
            }
            Ok(table)
        }
    }
}
