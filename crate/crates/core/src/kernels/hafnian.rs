use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest hafnian dimension accepted; `(2n-1)!!` terms are enumerated.
pub const HAFNIAN_MAX_DIM: usize = 20;

/// Absolute tolerance on `max |B - B^T|`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Hafnian of a symmetric even-dimensional matrix: the sum over all perfect
/// matchings of `{0, .., 2n-1}` of the product of matched entries.
///
/// The diagonal never enters. The empty matrix has hafnian one.
pub fn hafnian(b: &ComplexMatrix) -> Result<Complex64> {
    if !b.is_square() {
        return Err(Error::Dimension(format!(
            "hafnian needs a square matrix, got {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    let dim = b.rows();
    if dim % 2 == 1 {
        return Err(Error::Dimension(format!("hafnian needs even dimension, got {dim}")));
    }
    if dim > HAFNIAN_MAX_DIM {
        return Err(Error::SizeLimit {
            kernel: "hafnian",
            size: dim,
            limit: HAFNIAN_MAX_DIM,
        });
    }
    let deviation = b.max_abs_diff(&b.transpose());
    if deviation > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { deviation });
    }
    if dim == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(enumerate_matchings(b))
}

/// Depth-first walk of all perfect matchings: the lowest unmatched vertex is
/// paired with every later unmatched vertex, and each completed matching adds
/// its product at the leaf.
fn enumerate_matchings(b: &ComplexMatrix) -> Complex64 {
    fn walk(b: &ComplexMatrix, unmatched: u32, product: Complex64, total: &mut Complex64) {
        if unmatched == 0 {
            *total += product;
            return;
        }
        let first = unmatched.trailing_zeros() as usize;
        let mut rest = unmatched & !(1 << first);
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= !(1 << j);
            walk(b, unmatched & !(1 << first) & !(1 << j), product * b[(first, j)], total);
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    walk(b, (1u32 << b.rows()) - 1, Complex64::new(1.0, 0.0), &mut total);
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_matching() {
        let b = c(0.3, -0.4);
        let m = ComplexMatrix::new(2, 2, vec![c(9.0, 0.0), b, b, c(-7.0, 0.0)]).unwrap();
        assert_eq!(hafnian(&m).unwrap(), b);
    }

    #[test]
    fn three_matchings() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| c((i + j + 1) as f64, (i * j) as f64 * 0.1));
        let h = hafnian(&m).unwrap();
        let expect = m[(0, 1)] * m[(2, 3)] + m[(0, 2)] * m[(1, 3)] + m[(0, 3)] * m[(1, 2)];
        assert!((h - expect).norm() < 1e-12);
    }

    #[test]
    fn all_ones_counts_matchings() {
        // (2n-1)!! perfect matchings: 1, 3, 15, 105, 945, 10395.
        for (n, count) in [(1, 1.0), (2, 3.0), (3, 15.0), (4, 105.0), (5, 945.0), (6, 10395.0)] {
            let m = ComplexMatrix::from_fn(2 * n, 2 * n, |_, _| c(1.0, 0.0));
            assert!((hafnian(&m).unwrap() - count).norm() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn error_paths() {
        assert!(matches!(hafnian(&ComplexMatrix::zeros(3, 3)), Err(Error::Dimension(_))));
        let asym = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(hafnian(&asym), Err(Error::NotSymmetric { .. })));
        assert!(matches!(
            hafnian(&ComplexMatrix::zeros(22, 22)),
            Err(Error::SizeLimit { .. })
        ));
        assert_eq!(hafnian(&ComplexMatrix::zeros(0, 0)).unwrap(), c(1.0, 0.0));
    }
}
