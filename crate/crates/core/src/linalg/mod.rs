//! Tridiagonal and dense symmetric kernels, plus quadrature.

mod dense;
mod eigen;
mod quad;
mod tridiag;

pub use dense::{
    dense_sym_eigenvalues, dense_sym_eigs, tridiagonalize, DenseSymmetric, Tridiagonalization, DENSE_LIMIT,
};
pub(crate) use eigen::dot;
pub use eigen::{lowest_eigenpairs, sign_changes, tridiag_eigh, tridiag_eigvec, EigenPair};
pub use quad::{simpson, trapezoid};
pub use tridiag::{sturm_count, thomas_solve, Solve, SymTridiag, TridiagLu};
