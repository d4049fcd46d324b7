use crate::error::{Error, Result};
use crate::kernels::{permanent, ComplexMatrix, Interferometer, UNITARITY_TOLERANCE};

use super::{Outcome, Sector};

/// Fock-state boson sampling: `N` single photons in the first `N` input modes.
///
/// `p(x) = |Per(U_x)|^2 / x!` with `U_x` the first `N` rows of `U` and column
/// `i` repeated `x_i` times.
#[derive(Debug, Clone, PartialEq)]
pub struct FockModel {
    rows: ComplexMatrix,
}

pub(crate) fn check_rows(rows: &ComplexMatrix) -> Result<()> {
    if rows.rows() > rows.cols() {
        return Err(Error::Dimension(format!(
            "{} particles on {} modes",
            rows.rows(),
            rows.cols()
        )));
    }
    let deviation = rows.row_orthonormality_error();
    if deviation > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

impl FockModel {
    pub fn new(u: &Interferometer, photons: usize) -> Result<Self> {
        if photons > u.modes() {
            return Err(Error::Dimension(format!("{photons} photons on {} modes", u.modes())));
        }
        Ok(Self {
            rows: u.matrix().top_rows(photons)?,
        })
    }

    /// From the first `N` rows of a unitary (rows must be orthonormal).
    pub fn from_rows(rows: ComplexMatrix) -> Result<Self> {
        check_rows(&rows)?;
        Ok(Self { rows })
    }

    pub fn photons(&self) -> usize {
        self.rows.rows()
    }

    pub fn modes(&self) -> usize {
        self.rows.cols()
    }

    /// The `N x M` input rows of `U`.
    pub fn rows(&self) -> &ComplexMatrix {
        &self.rows
    }

    pub fn sector(&self) -> Sector {
        Sector::bosonic(self.modes(), self.photons())
    }

    /// `U_x`: all input rows, column `i` repeated `x_i` times.
    pub fn submatrix(&self, x: &Outcome) -> Result<ComplexMatrix> {
        self.sector().check(x)?;
        let rows: Vec<usize> = (0..self.photons()).collect();
        self.rows.select(&rows, &x.mode_list())
    }

    /// `|Per U_x|^2` without the `x!` factor.
    pub fn permanent_weight(&self, x: &Outcome) -> Result<f64> {
        Ok(permanent(&self.submatrix(x)?)?.norm_sqr())
    }

    pub fn probability(&self, x: &Outcome) -> Result<f64> {
        Ok(self.permanent_weight(x)? / x.factorial_product())
    }
}

/// `|Per(U_x)|^2 / x!` for `N` photons entering the first `N` modes.
pub fn fbs_probability(u: &Interferometer, photons: usize, x: &Outcome) -> Result<f64> {
    FockModel::new(u, photons)?.probability(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_passes_photons_through() {
        let u = Interferometer::identity(5);
        let through: Outcome = "1,1,1,0,0".parse().unwrap();
        assert!((fbs_probability(&u, 3, &through).unwrap() - 1.0).abs() < 1e-15);
        let moved: Outcome = "1,1,0,1,0".parse().unwrap();
        assert_eq!(fbs_probability(&u, 3, &moved).unwrap(), 0.0);
        let bunched: Outcome = "2,1,0,0,0".parse().unwrap();
        assert_eq!(fbs_probability(&u, 3, &bunched).unwrap(), 0.0);
    }

    #[test]
    fn photon_count_mismatch_is_an_error() {
        let u = Interferometer::identity(4);
        let x: Outcome = "1,1,0,0".parse().unwrap();
        assert!(matches!(fbs_probability(&u, 3, &x), Err(Error::OutsideSector { .. })));
        assert!(FockModel::new(&u, 5).is_err());
    }
}
