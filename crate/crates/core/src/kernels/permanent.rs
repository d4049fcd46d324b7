use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest permanent order accepted; the cost is `2^(n-1) n`.
pub const PERMANENT_MAX_ORDER: usize = 28;

/// Matrix permanent by Glynn's formula traversed in Gray-code order.
///
/// ```text
/// Per(A) = 2^(1-n) sum_{d in {±1}^n, d_0 = 1} (prod_k d_k) prod_j (sum_i d_i a_ij)
/// ```
///
/// Consecutive sign vectors differ in one entry, so each term updates the
/// column sums in `O(n)`. The empty matrix has permanent one.
pub fn permanent(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > PERMANENT_MAX_ORDER {
        return Err(Error::SizeLimit {
            kernel: "permanent",
            size: n,
            limit: PERMANENT_MAX_ORDER,
        });
    }
    Ok(match n {
        0 => Complex64::new(1.0, 0.0),
        1 => a[(0, 0)],
        2 => a[(0, 0)] * a[(1, 1)] + a[(0, 1)] * a[(1, 0)],
        _ => glynn_gray(a),
    })
}

fn glynn_gray(a: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    let mut col_sums: Vec<Complex64> = (0..n).map(|j| (0..n).map(|i| a[(i, j)]).sum()).collect();
    let mut signs = vec![1.0f64; n];
    let mut parity = 1.0f64;
    let mut total = col_sums.iter().product::<Complex64>();
    let steps: u64 = 1 << (n - 1);
    for g in 1..steps {
        // Row flipped between Gray codes g-1 and g; row 0 stays fixed at +1.
        let row = g.trailing_zeros() as usize + 1;
        signs[row] = -signs[row];
        parity = -parity;
        let factor = 2.0 * signs[row];
        for (j, s) in col_sums.iter_mut().enumerate() {
            *s += a[(row, j)] * factor;
        }
        let prod: Complex64 = col_sums.iter().product();
        total += prod * parity;
    }
    total / steps as f64
}
