//! Random matrix ensembles: complex Gaussian matrices and Haar unitaries.

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, Interferometer};
use crate::error::{Error, Result};
use crate::seed::{Rng, Seed};

/// One standard complex normal draw: real and imaginary parts each have
/// variance 1/2, so `E|z|^2 = 1`.
pub fn complex_normal(rng: &mut Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of i.i.d. standard complex normals, filled row-major.
pub fn gaussian_rect(rows: usize, cols: usize, rng: &mut Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// `n x n` matrix of i.i.d. standard complex normals.
pub fn gaussian_matrix(n: usize, seed: &Seed) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("gaussian matrix needs n >= 1".into()));
    }
    Ok(gaussian_rect(n, n, &mut seed.rng()))
}

/// Haar-random `M x M` unitary.
///
/// A complex Gaussian matrix `G` is factored as `G = L Q` (a QR factorization
/// of `G^T`) with the triangular factor's diagonal made real positive, which
/// is the `R_ii / |R_ii|` phase normalization. `Q` is then Haar distributed.
/// Rows are orthonormalized in order, so the first `N` rows of this matrix
/// equal [`haar_isometry`]`(N, M, seed)`.
pub fn haar_unitary(modes: usize, seed: &Seed) -> Result<Interferometer> {
    let rows = haar_isometry(modes, modes, seed)?;
    Interferometer::new(rows)
}

/// The first `rows` rows of a Haar-random `modes x modes` unitary, without
/// forming the rest. Costs `O(rows^2 modes)`.
pub fn haar_isometry(rows: usize, modes: usize, seed: &Seed) -> Result<ComplexMatrix> {
    if modes == 0 {
        return Err(Error::InvalidParameter("haar unitary needs M >= 1".into()));
    }
    if rows > modes {
        return Err(Error::Dimension(format!("{rows} rows requested from {modes} modes")));
    }
    let mut g = gaussian_rect(rows, modes, &mut seed.rng());
    orthonormalize_rows(&mut g)?;
    Ok(g)
}

/// Classical Gram-Schmidt with one reorthogonalization pass per row.
fn orthonormalize_rows(m: &mut ComplexMatrix) -> Result<()> {
    let (rows, cols) = (m.rows(), m.cols());
    for i in 0..rows {
        for _pass in 0..2 {
            for j in 0..i {
                let mut dot = Complex64::new(0.0, 0.0);
                for c in 0..cols {
                    dot += m[(j, c)].conj() * m[(i, c)];
                }
                for c in 0..cols {
                    let q = m[(j, c)];
                    m[(i, c)] -= dot * q;
                }
            }
        }
        let norm = (0..cols).map(|c| m[(i, c)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::Numerical("rank-deficient Gaussian draw".into()));
        }
        for c in 0..cols {
            m[(i, c)] /= norm;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::UNITARITY_TOLERANCE;

    #[test]
    fn one_mode_is_a_phase() {
        let u = haar_unitary(1, &Seed::new(3)).unwrap();
        assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = haar_unitary(8, &Seed::new(11)).unwrap();
        let b = haar_unitary(8, &Seed::new(11)).unwrap();
        assert_eq!(a, b);
        let c = haar_unitary(8, &Seed::new(12)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn isometry_is_prefix_of_unitary() {
        let seed = Seed::new(5).child(2);
        let u = haar_unitary(12, &seed).unwrap();
        let a = haar_isometry(4, 12, &seed).unwrap();
        assert_eq!(u.matrix().top_rows(4).unwrap(), a);
        assert!(a.row_orthonormality_error() < UNITARITY_TOLERANCE);
    }

    #[test]
    fn large_unitary_passes_invariant() {
        let u = haar_unitary(64, &Seed::new(99)).unwrap();
        assert!(crate::kernels::unitarity_error(u.matrix()) < UNITARITY_TOLERANCE);
    }
}
