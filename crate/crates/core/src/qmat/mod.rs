//! Dense complex linear algebra for small quantum systems.

mod density;
mod eigen;
mod matrix;
mod sparse;

pub use density::{partial_trace, trace_distance, DensityMatrix, StateTolerance};
pub use eigen::{
    complex_singular_values, general_eigenvalues, herm_eig, singular_values, HermitianEigen, HERMITIAN_TOL,
    QR_ITERATION_BUDGET,
};
pub use matrix::{expm, kron, kron_vec, ComplexMatrix};
pub use sparse::SparseMatrix;

pub use num_complex::Complex64 as C64;
