//! Spectra of the inverse covariance and the checks that tie them to `g(r, w)`.
//!
//! For large `N` the eigenvalues of `(1/sigma^2) A^T A` are distributed like
//! the values of `g(r, w)` with `(r, w)` uniform on `[0, 1] x [-pi, pi]`. The
//! checks here measure that agreement through power moments, the weak norm,
//! and (for the covariance itself) Monte-Carlo simulation.

mod checks;
mod eigen;

pub use checks::{
    covariance_mc_check, moment_check, moment_check_with_spectrum, outside_fraction,
    weak_norm_check, CovarianceReport, MomentReport, WeakNormReport,
};
pub use eigen::{eigenvalues, tridiagonal_eigenvalues, EigenSpectrum};
