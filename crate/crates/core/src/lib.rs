//! Rate-distortion functions of Gaussian time-varying autoregressive (TVAR)
//! sources.
//!
//! A TVAR model of order `M` has polynomial coefficient trajectories
//! `a_m(r)` on normalized time `r = t/N`. This crate computes
//!
//! * the banded generator `A_N` and inverse covariance `(1/sigma^2) A_N^T A_N`,
//! * the eigenvalues of that band matrix,
//! * the exact finite-`N` rate-distortion curve by reverse water-filling,
//! * the `N -> infinity` curve as a double integral over the inverse spectrum
//!   `g(r, w)`,
//! * checks tying the eigenvalue distribution to `g(r, w)`.
//!
//! Rates are in nats per letter unless a function says otherwise.
//!
//! ```
//! use tvar_rd::{finite_rate_at_distortion, TvarModel};
//!
//! let white = TvarModel::white_noise(1.0)?;
//! let p = finite_rate_at_distortion(&white, 64, 0.25)?;
//! assert!((p.rate - 2f64.ln()).abs() < 1e-12);
//! # Ok::<(), tvar_rd::Error>(())
//! ```

pub mod asymptotic_rd;
pub mod curve;
mod error;
pub mod finite_rd;
pub mod matrices;
pub mod model;
mod poly;
pub mod quadrature;
pub mod spectral;
pub mod sum;

pub use asymptotic_rd::{
    asymptotic_rate_at_distortion, asymptotic_rd_curve, asymptotic_rd_point, d_max,
    stationary_rd_point, ArSpectrum, AsymptoticRd, PsdGrid, QuadPoint, SpectralDensity,
};
pub use curve::{CurveSource, RdCurve, RdPoint, ShapeReport};
pub use error::{Error, Result};
pub use finite_rd::{
    finite_d_max, finite_rate_at_distortion, finite_rate_at_distortion_from_spectrum,
    finite_rd_curve, finite_rd_curve_from_spectrum, finite_rd_point, finite_theta_for_distortion,
};
pub use matrices::{
    build_a, build_phi, build_phi_inv, entry_phi_inv, trace_phi, DenseMatrix, LowerBandMatrix,
    SymBandMatrix,
};
pub use model::{
    sample_spectrum, simulate, validate, ModelConfig, Polynomial, SamplePaths, SpectrumGrid,
    TvarModel, ValidationReport,
};
pub use quadrature::{QuadConfig, Refined};
pub use spectral::{
    covariance_mc_check, eigenvalues, moment_check, weak_norm_check, CovarianceReport,
    EigenSpectrum, MomentReport, WeakNormReport,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/eigenvalues.md")]
    mod eigenvalues {}
    #[doc = include_str!("../../../book/src/finite.md")]
    mod finite {}
    #[doc = include_str!("../../../book/src/asymptotic.md")]
    mod asymptotic {}
    #[doc = include_str!("../../../book/src/stationary.md")]
    mod stationary {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
