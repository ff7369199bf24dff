//! Covariance-domain atomic-norm solver: Hermitian Toeplitz
//! parameterization and the ADMM iteration on its regularized SDP form.

mod admm;
mod toeplitz;

pub use admm::{
    admm_solve, admm_solve_traced, psd_project, AdmmConfig, AdmmState, IterationTrace,
};
pub use toeplitz::{toeplitz_adjoint, toeplitz_build, ToeplitzParam};
