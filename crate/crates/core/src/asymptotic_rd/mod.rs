//! Asymptotic rate-distortion of a TVAR source:
//!
//! ```text
//! D(theta) = (1/2pi) int_{-pi}^{pi} int_0^1 min(theta, 1/g(r, w)) dr dw
//! R(theta) = (1/2pi) int_{-pi}^{pi} int_0^1 max(0, 1/2 ln(1 / (theta g(r, w)))) dr dw
//! ```
//!
//! Both integrals run over `w in [0, pi]` (doubled, as `g` is even in `w`)
//! with composite Gauss–Legendre panels in both directions. For each `r`
//! node the integrand is kinked where `g(r, w) = 1/theta`; those crossings
//! are roots of a degree-`M` polynomial in `cos w` and every `w` panel that
//! holds one is split there, so each sub-panel sees a smooth integrand.
//! Along `r` the slice integral picks up a `(r - r*)^{3/2}` term wherever a
//! piece of the level set is born; those `r*` are located up front (see
//! `r_breaks`) and integrated through with a graded substitution. Panel
//! counts double until two successive levels agree.

mod stationary;

pub use stationary::{stationary_rd_point, ArSpectrum, PsdGrid, SpectralDensity};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::{geometric_grid, CurveSource, RdCurve, RdPoint};
use crate::error::{Error, Result};
use crate::model::{cosine_series, validate, TvarModel, ValidationReport, DEFAULT_G_FLOOR};
use crate::poly;
use crate::quadrature::{refine, surface_mean, GaussLegendre, QuadConfig, Refined};

/// Lower end of the default `theta` sweep, as a fraction of `1 / g_max`.
pub const THETA_FLOOR_FACTOR: f64 = 1e-3;
/// The sweep ends this factor beyond `1 / g_min` so the zero-rate endpoint
/// survives grid error in `g_min`.
pub const THETA_CEILING_FACTOR: f64 = 1.001;

/// A quadrature estimate of one curve point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadPoint {
    pub point: RdPoint,
    pub distortion_err: f64,
    pub rate_err: f64,
    /// Refinement level at which the estimate settled.
    pub level: usize,
}

impl QuadPoint {
    fn from_refined(theta: f64, r: Refined<2>) -> Self {
        QuadPoint {
            point: RdPoint {
                theta,
                distortion: r.value[0],
                rate: r.value[1],
            },
            distortion_err: r.error[0],
            rate_err: r.error[1],
            level: r.level,
        }
    }
}

/// Points of `(0, pi)` where `c_0 + 2 sum_k c_k cos(k w) = level`, ascending.
pub(crate) fn crossings(fourier: &[f64], level: f64) -> Vec<f64> {
    let mut cheb: Vec<f64> = fourier.iter().map(|c| 2.0 * c).collect();
    cheb[0] = fourier[0] - level;
    let mono = poly::chebyshev_to_monomial(&cheb);
    let mut w: Vec<f64> = poly::real_roots_in(&mono, -1.0, 1.0)
        .into_iter()
        .map(f64::acos)
        .filter(|&w| w > 0.0 && w < PI)
        .collect();
    w.sort_by(f64::total_cmp);
    w.dedup();
    w
}

/// Water-filling integrands `[min(theta, s), max(0, 1/2 ln(s/theta))]` for a component variance `s`.
#[inline]
pub(crate) fn water_fill(theta: f64, variance: f64) -> [f64; 2] {
    [theta.min(variance), (0.5 * (variance / theta).ln()).max(0.0)]
}

/// Mean over `w in [0, pi]` of the water-filling integrands for one `r` slice.
fn omega_slice(rule: &GaussLegendre, panels: usize, fourier: &[f64], theta: f64) -> [f64; 2] {
    let breaks = crossings(fourier, 1.0 / theta);
    let (v, total) = rule.composite_split(0.0, PI, panels, &breaks, |w| {
        let g = cosine_series(fourier, w).max(0.0);
        [theta.min(1.0 / g), (0.5 * (1.0 / (theta * g)).ln()).max(0.0)]
    });
    [v[0] / total, v[1] / total]
}

/// `r` samples used to spot interior tangencies of `g(r, .)` with the water level.
const TANGENCY_SAMPLES: usize = 256;

/// Points of `(0, 1)` where the `w`-slice integrand changes shape: an
/// extremum of `g(r, .)` equals `1/theta`, so a piece of the level set
/// `g = 1/theta` is born or dies there.
///
/// Extrema at `w = 0` and `w = pi` are exact polynomial roots, since
/// `g(r, 0)` and `g(r, pi)` are squares of polynomials in `r`. Interior
/// extrema (order 2 and up) are found where the crossing count changes.
pub(crate) fn r_breaks(model: &TvarModel, theta: f64) -> Vec<f64> {
    let level = 1.0 / theta;
    let root = (model.noise_variance() / theta).sqrt();
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        // sum_m sign^m a_m(r), with a_0 = 1
        let mut s = vec![1.0];
        for (m, p) in model.trajectories().iter().enumerate() {
            let f = if m % 2 == 0 { sign } else { 1.0 };
            if s.len() < p.coefficients().len() {
                s.resize(p.coefficients().len(), 0.0);
            }
            for (k, c) in p.coefficients().iter().enumerate() {
                s[k] += f * c;
            }
        }
        for target in [root, -root] {
            let mut q = s.clone();
            q[0] -= target;
            out.extend(poly::real_roots_in(&q, 0.0, 1.0));
        }
    }
    if model.order() >= 2 {
        let count = |r: f64| crossings(&model.g_fourier(r), level).len();
        let mut prev = (0.0, count(0.0));
        for i in 1..=TANGENCY_SAMPLES {
            let r = i as f64 / TANGENCY_SAMPLES as f64;
            let c = count(r);
            if c != prev.1 {
                let (mut lo, mut hi) = (prev.0, r);
                while hi - lo > 4.0 * f64::EPSILON {
                    let mid = 0.5 * (lo + hi);
                    if count(mid) == prev.1 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev = (r, c);
        }
    }
    out.retain(|&r| r > 0.0 && r < 1.0);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn rd_at_level(model: &TvarModel, quad: &QuadConfig, theta: f64, breaks: &[f64], level: usize) -> [f64; 2] {
    let rule = GaussLegendre::new(quad.nodes_per_panel);
    let omega_panels = quad.omega_panels_at(level);
    let (v, total) = rule.composite_graded(0.0, 1.0, quad.r_panels, level, breaks, |r| {
        omega_slice(&rule, omega_panels, &model.g_fourier(r), theta)
    });
    [v[0] / total, v[1] / total]
}

/// Asymptotic curve machinery for one validated model.
#[derive(Debug, Clone)]
pub struct AsymptoticRd<'a> {
    model: &'a TvarModel,
    quad: QuadConfig,
    validation: ValidationReport,
}

impl<'a> AsymptoticRd<'a> {
    /// Validates `model` against [`DEFAULT_G_FLOOR`].
    pub fn new(model: &'a TvarModel, quad: QuadConfig) -> Result<Self> {
        Self::with_floor(model, quad, DEFAULT_G_FLOOR)
    }

    pub fn with_floor(model: &'a TvarModel, quad: QuadConfig, g_floor: f64) -> Result<Self> {
        quad.validate()?;
        let validation = validate(model, g_floor)?;
        if !validation.passed {
            return Err(Error::BelowFloor {
                inf_g: validation.inf_g,
                g_floor,
                r: validation.inf_at.0,
                omega: validation.inf_at.1,
            });
        }
        Ok(AsymptoticRd {
            model,
            quad,
            validation,
        })
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    pub fn quad(&self) -> &QuadConfig {
        &self.quad
    }

    /// Largest useful water level, slightly beyond `1 / g_min`.
    pub fn theta_ceiling(&self) -> f64 {
        THETA_CEILING_FACTOR / self.validation.inf_g
    }

    pub fn point(&self, theta: f64) -> Result<QuadPoint> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("theta must be positive and finite, got {theta}")));
        }
        let breaks = r_breaks(self.model, theta);
        let refined = refine(&self.quad, [f64::MIN_POSITIVE, 1.0], |level| {
            rd_at_level(self.model, &self.quad, theta, &breaks, level)
        })?;
        Ok(QuadPoint::from_refined(theta, refined))
    }

    /// `(1/2pi) int int 1/g`, the per-letter average variance.
    pub fn d_max(&self) -> Result<Refined<1>> {
        surface_mean(self.model, &self.quad, f64::MIN_POSITIVE, |g| 1.0 / g)
    }

    /// `num_points` water levels spaced geometrically on
    /// `[THETA_FLOOR_FACTOR / g_max, THETA_CEILING_FACTOR / g_min]`.
    ///
    /// A point whose quadrature fails to settle keeps its last estimate and
    /// is listed in the curve warnings.
    pub fn curve(&self, num_points: usize) -> Result<RdCurve> {
        if num_points < 2 {
            return Err(Error::Domain(format!("a curve needs at least 2 points, got {num_points}")));
        }
        let lo = THETA_FLOOR_FACTOR / self.validation.sup_g;
        let hi = self.theta_ceiling();
        let mut points = Vec::with_capacity(num_points);
        let mut warnings = Vec::new();
        for (i, theta) in geometric_grid(lo, hi, num_points).into_iter().enumerate() {
            match self.point(theta) {
                Ok(p) => points.push(p.point),
                Err(Error::Convergence { refinements, last, previous }) => {
                    warnings.push(format!(
                        "point {i} (theta = {theta:e}): quadrature unsettled after {refinements} refinements, \
                         last {last:?}, previous {previous:?}"
                    ));
                    points.push(RdPoint {
                        theta,
                        distortion: last[0],
                        rate: last[1],
                    });
                }
                Err(e) => return Err(e),
            }
        }
        let last = points[points.len() - 1];
        let mut curve = RdCurve::new(points, CurveSource::Asymptotic { quad: self.quad }, warnings);
        curve.d_max = last.distortion;
        Ok(curve)
    }

    /// Solves `D(theta) = d_target` by the Illinois variant of regula falsi,
    /// bracketed by `[d_target, theta_ceiling]`, to a few ulps in `D` or `theta`.
    pub fn rate_at_distortion(&self, d_target: f64) -> Result<QuadPoint> {
        if !(d_target > 0.0 && d_target.is_finite()) {
            return Err(Error::Domain(format!("target distortion must be positive, got {d_target}")));
        }
        let top = self.point(self.theta_ceiling())?;
        let d_max = top.point.distortion;
        let tol = |p: &QuadPoint| f64::max(1e-8, 10.0 * p.distortion_err);
        if d_target >= d_max {
            return if d_target - d_max <= tol(&top) {
                Ok(top)
            } else {
                Err(Error::DistortionOutOfRange { d_target, d_max })
            };
        }
        let hit = |p: &QuadPoint| (p.point.distortion - d_target).abs() <= 8.0 * f64::EPSILON * d_target;
        // D(theta) <= theta, so theta = d_target never overshoots
        let mut lo = self.point(d_target)?;
        if hit(&lo) {
            return Ok(lo);
        }
        let mut hi = top;
        let mut best = lo;
        let (mut f_lo, mut f_hi) = (lo.point.distortion - d_target, hi.point.distortion - d_target);
        let mut side = 0i8;
        for _ in 0..200 {
            let (a, b) = (lo.point.theta, hi.point.theta);
            let mut mid = (a * f_hi - b * f_lo) / (f_hi - f_lo);
            if !(mid > a && mid < b) {
                mid = 0.5 * (a + b);
            }
            if mid <= a || mid >= b || b - a <= 4.0 * f64::EPSILON * b {
                break;
            }
            let p = self.point(mid)?;
            if (p.point.distortion - d_target).abs() <= (best.point.distortion - d_target).abs() {
                best = p;
            }
            if hit(&p) {
                break;
            }
            let f = p.point.distortion - d_target;
            if f < 0.0 {
                lo = p;
                f_lo = f;
                if side == -1 {
                    f_hi *= 0.5;
                }
                side = -1;
            } else {
                hi = p;
                f_hi = f;
                if side == 1 {
                    f_lo *= 0.5;
                }
                side = 1;
            }
        }
        if (best.point.distortion - d_target).abs() > tol(&best) {
            return Err(Error::Convergence {
                refinements: best.level,
                last: vec![best.point.distortion, best.point.rate],
                previous: vec![d_target],
            });
        }
        Ok(best)
    }
}

/// One point of the asymptotic curve.
pub fn asymptotic_rd_point(model: &TvarModel, theta: f64, quad: &QuadConfig) -> Result<QuadPoint> {
    AsymptoticRd::new(model, *quad)?.point(theta)
}

/// The asymptotic curve sampled at `num_points` water levels.
pub fn asymptotic_rd_curve(model: &TvarModel, num_points: usize, quad: &QuadConfig) -> Result<RdCurve> {
    AsymptoticRd::new(model, *quad)?.curve(num_points)
}

/// Asymptotic rate at a target distortion.
pub fn asymptotic_rate_at_distortion(
    model: &TvarModel,
    d_target: f64,
    quad: &QuadConfig,
) -> Result<QuadPoint> {
    AsymptoticRd::new(model, *quad)?.rate_at_distortion(d_target)
}

/// `(1/2pi) int int 1/g dr dw`.
pub fn d_max(model: &TvarModel, quad: &QuadConfig) -> Result<Refined<1>> {
    AsymptoticRd::new(model, *quad)?.d_max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Polynomial;
    use approx::assert_abs_diff_eq;

    #[test]
    fn crossings_match_closed_form_for_ar1() {
        // g(w) = 1 + c^2 + 2c cos w = level  =>  cos w = (level - 1 - c^2) / (2c)
        let c: f64 = -0.9;
        let m = TvarModel::constant(1.0, &[c]).unwrap();
        let f = m.g_fourier(0.5);
        for level in [0.05, 0.5, 1.0, 2.0, 3.5] {
            let w = crossings(&f, level);
            let want = ((level - 1.0 - c * c) / (2.0 * c)).acos();
            assert_eq!(w.len(), 1);
            assert_abs_diff_eq!(w[0], want, epsilon = 1e-12);
        }
        assert!(crossings(&f, 0.001).is_empty());
        assert!(crossings(&f, 5.0).is_empty());
    }

    #[test]
    fn r_breaks_for_ramp() {
        // g(r, 0) = (1 + c r)^2 / s2 meets 1/theta at 1 + c r = sqrt(s2 / theta)
        let c = -0.8;
        let m = TvarModel::new("ramp", 1.0, vec![Polynomial::new(vec![0.0, c])]).unwrap();
        let theta = 2.0;
        let b = r_breaks(&m, theta);
        assert_eq!(b.len(), 1);
        assert_abs_diff_eq!(b[0], ((1.0 / theta).sqrt() - 1.0) / c, epsilon = 1e-14);
        assert!(r_breaks(&TvarModel::constant(1.0, &[0.3, -0.2]).unwrap(), 0.9).is_empty());
    }

    #[test]
    fn white_noise_point() {
        let m = TvarModel::white_noise(1.0).unwrap();
        let p = asymptotic_rd_point(&m, 0.5, &QuadConfig::default()).unwrap();
        assert_abs_diff_eq!(p.point.distortion, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.point.rate, 0.5 * 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn saturation_branch() {
        let m = TvarModel::constant(1.0, &[-0.5]).unwrap();
        let rd = AsymptoticRd::new(&m, QuadConfig::default()).unwrap();
        let p = rd.point(1.0 / 0.25 * 1.01).unwrap();
        assert_eq!(p.point.rate, 0.0);
        assert_abs_diff_eq!(p.point.distortion, 1.0 / (1.0 - 0.25), epsilon = 1e-9);
        assert_abs_diff_eq!(rd.d_max().unwrap().value[0], 1.0 / 0.75, epsilon = 1e-9);
    }

    #[test]
    fn rejects_unit_root() {
        let m = TvarModel::constant(1.0, &[-1.0]).unwrap();
        assert!(matches!(
            AsymptoticRd::new(&m, QuadConfig::default()),
            Err(Error::BelowFloor { .. })
        ));
    }

    #[test]
    fn low_distortion_is_linear() {
        let m = TvarModel::new("tv", 1.0, vec![Polynomial::new(vec![-0.5, -0.4])]).unwrap();
        let rd = AsymptoticRd::new(&m, QuadConfig::default()).unwrap();
        for theta in [0.01, 0.1, 0.25] {
            let p = rd.point(theta).unwrap();
            assert_abs_diff_eq!(p.point.distortion, theta, epsilon = 1e-15);
        }
    }

    #[test]
    fn rate_at_distortion_bounds() {
        let m = TvarModel::white_noise(1.0).unwrap();
        let rd = AsymptoticRd::new(&m, QuadConfig::default()).unwrap();
        let p = rd.rate_at_distortion(0.25).unwrap();
        assert_abs_diff_eq!(p.point.rate, 2f64.ln(), epsilon = 1e-12);
        let top = rd.rate_at_distortion(1.0).unwrap();
        assert!(top.point.rate.abs() <= 1e-8);
        assert!(matches!(rd.rate_at_distortion(1.5), Err(Error::DistortionOutOfRange { .. })));
        assert!(rd.rate_at_distortion(0.0).is_err());
    }
}
