use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `max |U^dag U - I|` accepted by [`Interferometer::new`].
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from nested rows of real-imaginary pairs; convenient in tests.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the rows from an orthonormal set, `max |A A^dag - I|`.
    pub fn row_orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.rows {
                let dot: Complex64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b.conj()).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// Rows `rows` and columns `cols` of `self`, with repetition allowed.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.rows,
            });
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.cols,
            });
        }
        Ok(Self::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])]))
    }

    /// The first `n` rows.
    pub fn top_rows(&self, n: usize) -> Result<Self> {
        if n > self.rows {
            return Err(Error::Dimension(format!(
                "requested {n} rows of a {}-row matrix",
                self.rows
            )));
        }
        Ok(Self {
            rows: n,
            cols: self.cols,
            data: self.data[..n * self.cols].to_vec(),
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// An `M x M` unitary describing a linear-optical circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferometer {
    matrix: ComplexMatrix,
}

impl Interferometer {
    /// Fails with [`Error::NotUnitary`] when `max |U^dag U - I|` exceeds
    /// [`UNITARITY_TOLERANCE`]; the matrix is never renormalized.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "interferometer must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = unitarity_error(&matrix);
        if deviation > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Relabel output modes: column `j` of the result is column `perm[j]` of `U`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        let rows: Vec<usize> = (0..self.modes()).collect();
        Ok(Self {
            matrix: self.matrix.select(&rows, perm)?,
        })
    }
}

/// `max |U^dag U - I|` over all entries.
pub fn unitarity_error(u: &ComplexMatrix) -> f64 {
    let n = u.cols();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for r in 0..u.rows() {
                dot += u[(r, i)].conj() * u[(r, j)];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

/// Submatrix of `U` with the listed rows and columns, repetitions allowed.
///
/// A Fock outcome `x = (2, 0, 1)` selects columns `[0, 0, 2]`.
pub fn select_submatrix(u: &Interferometer, rows: &[usize], cols: &[usize]) -> Result<ComplexMatrix> {
    u.matrix().select(rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_wrong_entry_count_and_nan() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn non_unitary_fails_loudly() {
        let m = ComplexMatrix::from_fn(2, 2, |r, c_| if r == c_ { c(1.0 + 1e-8, 0.0) } else { c(0.0, 0.0) });
        assert!(matches!(Interferometer::new(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn select_with_repetition() {
        let u = Interferometer::identity(3);
        let s = select_submatrix(&u, &[0], &[0]).unwrap();
        assert_eq!(s.as_slice(), &[c(1.0, 0.0)]);
        let s = select_submatrix(&u, &[0, 0], &[0, 1]).unwrap();
        assert_eq!(s.row(0), s.row(1));
        assert_eq!(s.row(0), &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            select_submatrix(&u, &[3], &[0]),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        ));
    }

    #[test]
    fn matmul_by_identity() {
        let a = ComplexMatrix::from_fn(2, 3, |r, k| c(r as f64, k as f64));
        assert_eq!(a.matmul(&ComplexMatrix::identity(3)).unwrap(), a);
        assert!(a.matmul(&a).is_err());
    }
}
