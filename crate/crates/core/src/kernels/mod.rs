//! Exponential-time linear-algebra kernels and random matrix generation.
//!
//! Everything here is a pure function of its arguments; concurrent calls from
//! many threads are safe.

mod determinant;
mod hafnian;
mod matrix;
mod permanent;
mod random;

pub use determinant::determinant;
pub use hafnian::{hafnian, HAFNIAN_MAX_DIM, SYMMETRY_TOLERANCE};
pub use matrix::{select_submatrix, unitarity_error, ComplexMatrix, Interferometer, UNITARITY_TOLERANCE};
pub use permanent::{permanent, PERMANENT_MAX_ORDER};
pub use random::{complex_normal, gaussian_matrix, gaussian_rect, haar_isometry, haar_unitary};
