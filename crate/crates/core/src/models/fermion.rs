use crate::error::{Error, Result};
use crate::kernels::{determinant, ComplexMatrix, Interferometer};

use super::fock::check_rows;
use super::{Outcome, Sector};

/// Fermion sampling: `N` fermions in the first `N` modes, `p(x) = |Det U_x|^2`.
///
/// The distribution is a projection determinantal point process with kernel
/// `K = A^dag A`, where `A` holds the first `N` rows of `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionModel {
    rows: ComplexMatrix,
}

impl FermionModel {
    pub fn new(u: &Interferometer, particles: usize) -> Result<Self> {
        if particles > u.modes() {
            return Err(Error::Dimension(format!("{particles} fermions on {} modes", u.modes())));
        }
        Ok(Self {
            rows: u.matrix().top_rows(particles)?,
        })
    }

    pub fn from_rows(rows: ComplexMatrix) -> Result<Self> {
        check_rows(&rows)?;
        Ok(Self { rows })
    }

    pub fn particles(&self) -> usize {
        self.rows.rows()
    }

    pub fn modes(&self) -> usize {
        self.rows.cols()
    }

    pub fn rows(&self) -> &ComplexMatrix {
        &self.rows
    }

    pub fn sector(&self) -> Sector {
        Sector::fermionic(self.modes(), self.particles())
    }

    pub fn probability(&self, x: &Outcome) -> Result<f64> {
        if !x.is_binary() {
            return Err(Error::OutsideSector {
                outcome: x.to_string(),
                reason: "fermionic outcomes have occupations 0 or 1".into(),
            });
        }
        self.sector().check(x)?;
        let rows: Vec<usize> = (0..self.particles()).collect();
        let sub = self.rows.select(&rows, &x.mode_list())?;
        Ok(determinant(&sub)?.norm_sqr())
    }

    /// Diagonal of `K = A^dag A`: the probability that mode `i` is occupied.
    pub fn occupation_probabilities(&self) -> Vec<f64> {
        (0..self.modes())
            .map(|i| (0..self.particles()).map(|j| self.rows[(j, i)].norm_sqr()).sum())
            .collect()
    }
}

/// `|Det(U_x)|^2` for `N` fermions entering the first `N` modes.
pub fn fs_probability(u: &Interferometer, particles: usize, x: &Outcome) -> Result<f64> {
    FermionModel::new(u, particles)?.probability(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_deterministic() {
        let u = Interferometer::identity(6);
        let x: Outcome = "1,1,1,0,0,0".parse().unwrap();
        assert!((fs_probability(&u, 3, &x).unwrap() - 1.0).abs() < 1e-15);
        let y: Outcome = "0,1,1,1,0,0".parse().unwrap();
        assert_eq!(fs_probability(&u, 3, &y).unwrap(), 0.0);
    }

    #[test]
    fn non_binary_is_rejected() {
        let u = Interferometer::identity(3);
        let x: Outcome = "2,0,0".parse().unwrap();
        assert!(matches!(fs_probability(&u, 2, &x), Err(Error::OutsideSector { .. })));
    }

    #[test]
    fn occupation_trace_is_particle_number() {
        let u = crate::kernels::haar_unitary(9, &crate::Seed::new(4)).unwrap();
        let m = FermionModel::new(&u, 4).unwrap();
        let trace: f64 = m.occupation_probabilities().iter().sum();
        assert!((trace - 4.0).abs() < 1e-12);
    }
}
