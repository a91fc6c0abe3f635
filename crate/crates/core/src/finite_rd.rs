//! Exact finite-`N` rate-distortion by reverse water-filling over the
//! eigenvalues `alpha_m` of the inverse covariance:
//!
//! ```text
//! D(theta) = (1/N) sum_m min(theta, 1/alpha_m)
//! R(theta) = (1/N) sum_m max(0, 1/2 ln(1 / (theta alpha_m)))
//! ```
//!
//! with `theta` in `(0, max_m 1/alpha_m]`.

use crate::curve::{geometric_grid, CurveSource, RdCurve, RdPoint};
use crate::error::{Error, Result};
use crate::matrices::build_phi_inv;
use crate::model::TvarModel;
use crate::spectral::{eigenvalues, EigenSpectrum};
use crate::sum;

/// Lower end of the default `theta` sweep, as a fraction of the smallest component variance.
pub const THETA_FLOOR_FACTOR: f64 = 1e-3;

/// One water-filling point; the rate is in nats.
pub fn finite_rd_point(spectrum: &EigenSpectrum, theta: f64) -> Result<RdPoint> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("theta must be positive and finite, got {theta}")));
    }
    let n = spectrum.len() as f64;
    let distortion = sum::sum(spectrum.values().iter().map(|&a| theta.min(1.0 / a))) / n;
    let rate = sum::sum(
        spectrum
            .values()
            .iter()
            .map(|&a| (0.5 * (1.0 / (theta * a)).ln()).max(0.0)),
    ) / n;
    Ok(RdPoint {
        theta,
        distortion,
        rate,
    })
}

/// `(1/N) sum 1/alpha_m`, the distortion at zero rate.
pub fn finite_d_max(spectrum: &EigenSpectrum) -> f64 {
    sum::sum(spectrum.values().iter().map(|&a| 1.0 / a)) / spectrum.len() as f64
}

/// Curve for the `N`-dimensional source, `num_points` values of `theta`
/// spaced geometrically on `[THETA_FLOOR_FACTOR / alpha_max, 1 / alpha_min]`.
pub fn finite_rd_curve(model: &TvarModel, n: usize, num_points: usize) -> Result<RdCurve> {
    let spectrum = eigenvalues(&build_phi_inv(model, n)?)?;
    finite_rd_curve_from_spectrum(&spectrum, num_points, THETA_FLOOR_FACTOR)
}

pub fn finite_rd_curve_from_spectrum(
    spectrum: &EigenSpectrum,
    num_points: usize,
    theta_floor_factor: f64,
) -> Result<RdCurve> {
    if num_points < 2 {
        return Err(Error::Domain(format!("a curve needs at least 2 points, got {num_points}")));
    }
    if !(theta_floor_factor > 0.0 && theta_floor_factor <= 1.0) {
        return Err(Error::Domain(format!(
            "theta floor factor must lie in (0, 1], got {theta_floor_factor}"
        )));
    }
    check_positive(spectrum)?;
    let lo = theta_floor_factor / spectrum.max();
    let hi = 1.0 / spectrum.min();
    let points = geometric_grid(lo, hi, num_points)
        .into_iter()
        .map(|t| finite_rd_point(spectrum, t))
        .collect::<Result<Vec<_>>>()?;
    let mut curve = RdCurve::new(
        points,
        CurveSource::FiniteN { n: spectrum.len() },
        Vec::new(),
    );
    curve.d_max = finite_d_max(spectrum);
    Ok(curve)
}

/// The water level `theta` with `D(theta) = d_target`.
///
/// `D` is piecewise linear in `theta` with knots at the component variances
/// `1/alpha_m`, so the inversion is solved segment by segment.
pub fn finite_theta_for_distortion(spectrum: &EigenSpectrum, d_target: f64) -> Result<f64> {
    check_positive(spectrum)?;
    let d_max = finite_d_max(spectrum);
    if !(d_target > 0.0) {
        return Err(Error::Domain(format!("target distortion must be positive, got {d_target}")));
    }
    if d_target > d_max * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::DistortionOutOfRange { d_target, d_max });
    }
    let n = spectrum.len();
    // component variances ascending
    let variances: Vec<f64> = spectrum.values().iter().rev().map(|&a| 1.0 / a).collect();
    let total = d_target * n as f64;
    let mut below = sum::CompensatedSum::new();
    for k in 0..n {
        // k variances lie under the water level, n - k are clipped to theta
        let theta = (total - below.value()) / (n - k) as f64;
        if theta <= variances[k] {
            return Ok(theta.max(if k == 0 { 0.0 } else { variances[k - 1] }));
        }
        below.add(variances[k]);
    }
    Ok(variances[n - 1])
}

/// Rate at distortion `d_target` for a precomputed spectrum.
pub fn finite_rate_at_distortion_from_spectrum(
    spectrum: &EigenSpectrum,
    d_target: f64,
) -> Result<RdPoint> {
    let theta = finite_theta_for_distortion(spectrum, d_target)?;
    finite_rd_point(spectrum, theta)
}

/// Rate at distortion `d_target` for the `N`-dimensional source.
pub fn finite_rate_at_distortion(model: &TvarModel, n: usize, d_target: f64) -> Result<RdPoint> {
    let spectrum = eigenvalues(&build_phi_inv(model, n)?)?;
    finite_rate_at_distortion_from_spectrum(&spectrum, d_target)
}

fn check_positive(spectrum: &EigenSpectrum) -> Result<()> {
    if spectrum.min() <= 0.0 {
        Err(Error::Domain(format!(
            "water-filling needs a positive spectrum, smallest eigenvalue is {}",
            spectrum.min()
        )))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn eig(v: &[f64]) -> EigenSpectrum {
        EigenSpectrum::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn white_noise_point() {
        let p = finite_rd_point(&eig(&[1.0; 8]), 0.5).unwrap();
        assert_eq!(p.distortion, 0.5);
        assert_abs_diff_eq!(p.rate, 0.5 * 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn saturated_point() {
        let s = eig(&[0.5, 2.0, 4.0]);
        let p = finite_rd_point(&s, 2.0).unwrap();
        assert_eq!(p.rate, 0.0);
        assert_abs_diff_eq!(p.distortion, (2.0 + 0.5 + 0.25) / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(finite_d_max(&s), p.distortion, epsilon = 1e-15);
        assert!(finite_rd_point(&s, 0.0).is_err());
        assert!(finite_rd_point(&s, -1.0).is_err());
    }

    #[test]
    fn inversion_is_exact_per_segment() {
        let s = eig(&[0.3, 0.9, 1.7, 2.5, 6.0]);
        let d_max = finite_d_max(&s);
        for i in 1..=50 {
            let d = d_max * i as f64 / 50.0;
            let p = finite_rate_at_distortion_from_spectrum(&s, d).unwrap();
            assert!((p.distortion - d).abs() <= 1e-10 * d.max(1.0), "{d}: {}", p.distortion);
        }
        let top = finite_rate_at_distortion_from_spectrum(&s, d_max).unwrap();
        assert_eq!(top.rate, 0.0);
        assert!(matches!(
            finite_theta_for_distortion(&s, 2.0 * d_max),
            Err(Error::DistortionOutOfRange { .. })
        ));
        assert!(matches!(finite_theta_for_distortion(&s, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn white_noise_rate_at_quarter() {
        let m = TvarModel::white_noise(1.0).unwrap();
        let p = finite_rate_at_distortion(&m, 128, 0.25).unwrap();
        assert_abs_diff_eq!(p.rate, 2f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn curve_endpoints() {
        let m = TvarModel::constant(1.0, &[-0.5]).unwrap();
        let c = finite_rd_curve(&m, 64, 20).unwrap();
        let last = c.points.last().unwrap();
        assert_eq!(last.rate, 0.0);
        assert_abs_diff_eq!(last.distortion, c.d_max, epsilon = 1e-14);
        assert!(c.check_shape().passed(), "{:?}", c.check_shape());
        assert!(finite_rd_curve(&m, 64, 1).is_err());
    }
}
