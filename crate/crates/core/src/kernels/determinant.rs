use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Determinant by LU factorization with partial pivoting, `O(n^3)`.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "determinant needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut lu: Vec<Complex64> = a.as_slice().to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| lu[i * n + k].norm().total_cmp(&lu[j * n + k].norm()))
            .expect("non-empty pivot range");
        if lu[pivot * n + k].norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot != k {
            for c in 0..n {
                lu.swap(k * n + c, pivot * n + c);
            }
            det = -det;
        }
        let diag = lu[k * n + k];
        det *= diag;
        for i in k + 1..n {
            let f = lu[i * n + k] / diag;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in k + 1..n {
                let upper = lu[k * n + c];
                lu[i * n + c] -= f * upper;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_empty() {
        for n in [0, 1, 4] {
            assert_eq!(determinant(&ComplexMatrix::identity(n)).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn two_by_two_is_ad_minus_bc() {
        let (a, b, cc, d) = (c(1.0, 2.0), c(-0.5, 0.3), c(0.7, -1.1), c(2.0, 0.0));
        let m = ComplexMatrix::new(2, 2, vec![a, b, cc, d]).unwrap();
        assert!((determinant(&m).unwrap() - (a * d - b * cc)).norm() < 1e-14);
    }

    #[test]
    fn singular_and_pivoting() {
        let m = ComplexMatrix::from_fn(3, 3, |_, _| c(1.0, 0.0));
        assert_eq!(determinant(&m).unwrap().norm(), 0.0);
        // Zero leading entry forces a row swap.
        let p = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((determinant(&p).unwrap() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(determinant(&ComplexMatrix::zeros(2, 3)).is_err());
    }
}
