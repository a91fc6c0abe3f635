//! Stationary sources described by a power spectral density `S(w)`:
//!
//! ```text
//! D(theta) = (1/2pi) int_{-pi}^{pi} min(theta, S(w)) dw
//! R(theta) = (1/2pi) int_{-pi}^{pi} max(0, 1/2 ln(S(w) / theta)) dw
//! ```

use std::f64::consts::PI;

use super::{crossings, water_fill, QuadPoint};
use crate::error::{Error, Result};
use crate::model::{cosine_series, TvarModel};
use crate::quadrature::{refine, GaussLegendre, QuadConfig};

/// A nonnegative spectral density on `[-pi, pi]`.
pub trait SpectralDensity {
    fn density(&self, omega: f64) -> f64;

    /// When true only `[0, pi]` is integrated.
    fn is_even(&self) -> bool;

    /// Sorted points of `(lo, hi)` where the integrand may be non-smooth at
    /// water level `theta`: crossings `S = theta` and kinks of `S` itself.
    fn breakpoints(&self, theta: f64, lo: f64, hi: f64) -> Vec<f64>;
}

/// Density of a stationary AR model, `S(w) = 1 / g(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArSpectrum {
    fourier: Vec<f64>,
}

impl ArSpectrum {
    pub fn new(model: &TvarModel) -> Result<Self> {
        if !model.is_stationary() {
            return Err(Error::Domain(format!(
                "model `{}` has time-varying coefficients",
                model.name()
            )));
        }
        Ok(ArSpectrum {
            fourier: model.g_fourier(0.0),
        })
    }
}

impl SpectralDensity for ArSpectrum {
    fn density(&self, omega: f64) -> f64 {
        1.0 / cosine_series(&self.fourier, omega).max(0.0)
    }

    fn is_even(&self) -> bool {
        true
    }

    fn breakpoints(&self, theta: f64, lo: f64, hi: f64) -> Vec<f64> {
        crossings(&self.fourier, 1.0 / theta)
            .into_iter()
            .filter(|&w| w > lo && w < hi)
            .collect()
    }
}

/// A tabulated density, linear between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdGrid {
    nodes: Vec<f64>,
    values: Vec<f64>,
    even: bool,
}

const EDGE_TOL: f64 = 1e-12;

impl PsdGrid {
    /// Samples covering `[-pi, pi]`.
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::build(nodes, values, false)
    }

    /// Samples covering `[0, pi]` of an even density.
    pub fn even(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::build(nodes, values, true)
    }

    /// Samples `density` at `count` equispaced nodes of `[0, pi]`.
    pub fn sample_even(density: &impl SpectralDensity, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Domain(format!("a grid needs at least 2 nodes, got {count}")));
        }
        let nodes: Vec<f64> = (0..count)
            .map(|i| if i + 1 == count { PI } else { PI * i as f64 / (count - 1) as f64 })
            .collect();
        let values = nodes.iter().map(|&w| density.density(w)).collect();
        Self::even(nodes, values)
    }

    fn build(nodes: Vec<f64>, values: Vec<f64>, even: bool) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::Domain(format!(
                "need matching node and value lists of length >= 2, got {} and {}",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spectral density grid".into()));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::Domain("spectral density must be nonnegative".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("grid nodes must be strictly increasing".into()));
        }
        let start = if even { 0.0 } else { -PI };
        if (nodes[0] - start).abs() > EDGE_TOL || (nodes[nodes.len() - 1] - PI).abs() > EDGE_TOL {
            return Err(Error::Domain(format!(
                "grid must span [{start}, pi], got [{}, {}]",
                nodes[0],
                nodes[nodes.len() - 1]
            )));
        }
        Ok(PsdGrid { nodes, values, even })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl SpectralDensity for PsdGrid {
    fn density(&self, omega: f64) -> f64 {
        let w = if self.even { omega.abs() } else { omega };
        let last = self.nodes.len() - 1;
        let i = match self.nodes.partition_point(|&x| x <= w) {
            0 => 0,
            i if i > last => last - 1,
            i => i - 1,
        };
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let t = ((w - x0) / (x1 - x0)).clamp(0.0, 1.0);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    fn is_even(&self) -> bool {
        self.even
    }

    fn breakpoints(&self, theta: f64, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.nodes.len() - 1 {
            let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
            let (v0, v1) = (self.values[i], self.values[i + 1]);
            out.push(x0);
            if (v0 - theta) * (v1 - theta) < 0.0 {
                out.push(x0 + (theta - v0) / (v1 - v0) * (x1 - x0));
            }
        }
        out.retain(|&w| w > lo && w < hi);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// One point of the stationary curve by panel doubling in `w`.
pub fn stationary_rd_point(
    psd: &impl SpectralDensity,
    theta: f64,
    quad: &QuadConfig,
) -> Result<QuadPoint> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("theta must be positive and finite, got {theta}")));
    }
    let rule = GaussLegendre::new(quad.nodes_per_panel);
    let (lo, scale) = if psd.is_even() { (0.0, 1) } else { (-PI, 2) };
    let breaks = psd.breakpoints(theta, lo, PI);
    let refined = refine(quad, [f64::MIN_POSITIVE, 1.0], |level| {
        let (v, total) = rule.composite_split(lo, PI, scale * quad.omega_panels_at(level), &breaks, |w| {
            water_fill(theta, psd.density(w))
        });
        [v[0] / total, v[1] / total]
    })?;
    Ok(QuadPoint::from_refined(theta, refined))
}
