//! Gaussian time-varying autoregressive (TVAR) source models.
//!
//! A model of order `M` generates
//!
//! ```text
//! x_t = -sum_{m=1}^{M} a_m(t/N) x_{t-m} + z_t,   t = 1..N,
//! ```
//!
//! with zero initial state and i.i.d. `N(0, sigma^2)` innovations `z_t`. Each
//! coefficient trajectory `a_m(r)` is a polynomial in normalized time
//! `r in [0, 1]`; `a_0(r) = 1` is implicit and never stored.
//!
//! The inverse-spectrum surface
//!
//! ```text
//! g(r, w) = |1 + sum_m a_m(r) e^{-j m w}|^2 / sigma^2
//! ```
//!
//! governs the asymptotic eigenvalue distribution of the inverse covariance.

pub(crate) mod simulate;
mod spectrum;

pub use simulate::{simulate, SamplePaths};
pub use spectrum::{
    sample_spectrum, validate, validate_on_grid, SpectrumGrid, ValidationReport, DEFAULT_G_FLOOR,
    DEFAULT_GRID_OMEGA, DEFAULT_GRID_R,
};

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real polynomial stored by ascending degree: `c[0] + c[1] r + c[2] r^2 + ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial(Vec<f64>);

impl Polynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Polynomial(coefficients)
    }

    pub fn constant(c: f64) -> Self {
        Polynomial(vec![c])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    /// Horner evaluation.
    pub fn eval(&self, r: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * r + c)
    }

    /// True when every coefficient above degree zero vanishes.
    pub fn is_constant(&self) -> bool {
        self.0.iter().skip(1).all(|&c| c == 0.0)
    }
}

/// On-disk model description.
///
/// `coeffs[m - 1]` lists the polynomial coefficients of `a_m(r)` in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub name: String,
    pub order: usize,
    pub noise_variance: f64,
    pub coeffs: Vec<Vec<f64>>,
}

/// A validated Gaussian TVAR model. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelConfig", into = "ModelConfig")]
pub struct TvarModel {
    name: String,
    noise_variance: f64,
    coeffs: Vec<Polynomial>,
}

impl TryFrom<ModelConfig> for TvarModel {
    type Error = Error;

    fn try_from(cfg: ModelConfig) -> Result<Self> {
        if cfg.coeffs.len() != cfg.order {
            return Err(Error::InvalidModel(format!(
                "order is {} but {} coefficient trajectories were given",
                cfg.order,
                cfg.coeffs.len()
            )));
        }
        TvarModel::new(
            cfg.name,
            cfg.noise_variance,
            cfg.coeffs.into_iter().map(Polynomial::new).collect(),
        )
    }
}

impl From<TvarModel> for ModelConfig {
    fn from(model: TvarModel) -> Self {
        ModelConfig {
            order: model.order(),
            name: model.name,
            noise_variance: model.noise_variance,
            coeffs: model.coeffs.into_iter().map(|p| p.0).collect(),
        }
    }
}

impl TvarModel {
    pub fn new(
        name: impl Into<String>,
        noise_variance: f64,
        coeffs: Vec<Polynomial>,
    ) -> Result<Self> {
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(Error::InvalidModel(format!(
                "noise variance must be finite and positive, got {noise_variance}"
            )));
        }
        for (i, p) in coeffs.iter().enumerate() {
            if p.0.is_empty() {
                return Err(Error::InvalidModel(format!(
                    "coefficient trajectory a_{} has no terms",
                    i + 1
                )));
            }
            if p.0.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "coefficient trajectory a_{} has a non-finite term",
                    i + 1
                )));
            }
        }
        Ok(TvarModel {
            name: name.into(),
            noise_variance,
            coeffs,
        })
    }

    /// White Gaussian noise with variance `noise_variance` (order 0).
    pub fn white_noise(noise_variance: f64) -> Result<Self> {
        Self::new("white-noise", noise_variance, Vec::new())
    }

    /// Stationary model with constant coefficients `a_1..a_M`.
    pub fn constant(noise_variance: f64, coeffs: &[f64]) -> Result<Self> {
        Self::new(
            "constant-ar",
            noise_variance,
            coeffs.iter().map(|&c| Polynomial::constant(c)).collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn trajectories(&self) -> &[Polynomial] {
        &self.coeffs
    }

    /// True when no coefficient depends on `r`.
    pub fn is_stationary(&self) -> bool {
        self.coeffs.iter().all(Polynomial::is_constant)
    }

    /// `a_m(r)`, with `a_0 = 1` and `a_m = 0` for `m > M`.
    pub fn eval_coeff(&self, m: usize, r: f64) -> Result<f64> {
        check_r(r)?;
        Ok(self.coeff(m, r))
    }

    pub(crate) fn coeff(&self, m: usize, r: f64) -> f64 {
        match m {
            0 => 1.0,
            m if m > self.order() => 0.0,
            m => self.coeffs[m - 1].eval(r),
        }
    }

    /// `[a_0(r), a_1(r), ..., a_M(r)]`.
    pub fn coeffs_at(&self, r: f64) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(self.coeffs.iter().map(|p| p.eval(r)))
            .collect()
    }

    /// `g(r, w)`, evaluated as a squared modulus.
    pub fn eval_g(&self, r: f64, omega: f64) -> Result<f64> {
        check_r(r)?;
        if !(-PI..=PI).contains(&omega) {
            return Err(Error::Domain(format!("omega = {omega} is outside [-pi, pi]")));
        }
        Ok(self.g_unchecked(r, omega))
    }

    pub(crate) fn g_unchecked(&self, r: f64, omega: f64) -> f64 {
        let (mut re, mut im) = (1.0, 0.0);
        for (m, p) in self.coeffs.iter().enumerate() {
            let a = p.eval(r);
            let phase = (m + 1) as f64 * omega;
            re += a * phase.cos();
            im -= a * phase.sin();
        }
        (re * re + im * im) / self.noise_variance
    }

    /// Fourier coefficients `g_k(r) = (1/sigma^2) sum_m a_m(r) a_{m+k}(r)`, `k = 0..=M`.
    ///
    /// `g(r, w) = g_0(r) + 2 sum_{k>=1} g_k(r) cos(k w)`.
    pub fn g_fourier(&self, r: f64) -> Vec<f64> {
        fourier_from_coeffs(&self.coeffs_at(r), self.noise_variance)
    }

    /// Upper bound `(1/sigma^2) (sum_m |a_m(r)|)^2` on `g(r, .)`.
    pub fn g_bound(&self, r: f64) -> f64 {
        let s: f64 = self.coeffs_at(r).iter().map(|a| a.abs()).sum();
        s * s / self.noise_variance
    }

    /// Runs the difference equation on a given innovation sequence.
    ///
    /// The path length `N = innovations.len()` fixes the time normalization `r = t/N`.
    pub fn filter(&self, innovations: &[f64]) -> Vec<f64> {
        let n = innovations.len();
        let order = self.order();
        let mut x = vec![0.0; n];
        let mut a = vec![0.0; order + 1];
        for t in 0..n {
            let r = (t + 1) as f64 / n as f64;
            for (m, slot) in a.iter_mut().enumerate().skip(1) {
                *slot = self.coeff(m, r);
            }
            let mut acc = innovations[t];
            for m in 1..=order.min(t) {
                acc -= a[m] * x[t - m];
            }
            x[t] = acc;
        }
        x
    }

    /// Sorted-key JSON with floats in shortest round-trip exponent form.
    pub fn canonical_json(&self) -> String {
        let mut s = String::from("{\"coeffs\":[");
        for (i, p) in self.coeffs.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push('[');
            for (j, c) in p.0.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                write!(s, "{c:e}").unwrap();
            }
            s.push(']');
        }
        let name = serde_json::to_string(&self.name).expect("string serializes");
        write!(
            s,
            "],\"name\":{name},\"noise_variance\":{:e},\"order\":{}}}",
            self.noise_variance,
            self.order()
        )
        .unwrap();
        s
    }
}

pub(crate) fn fourier_from_coeffs(a: &[f64], noise_variance: f64) -> Vec<f64> {
    let order = a.len() - 1;
    (0..=order)
        .map(|k| (0..=order - k).map(|m| a[m] * a[m + k]).sum::<f64>() / noise_variance)
        .collect()
}

/// `c_0 + 2 sum_k c_k cos(k w)` via the Chebyshev recurrence in `cos w`.
pub(crate) fn cosine_series(c: &[f64], omega: f64) -> f64 {
    let x = omega.cos();
    let mut acc = c[0];
    let (mut t_prev, mut t_cur) = (1.0, x);
    for (k, &ck) in c.iter().enumerate().skip(1) {
        if k > 1 {
            let t_next = 2.0 * x * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
        }
        acc += 2.0 * ck * t_cur;
    }
    acc
}

fn check_r(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain(format!("r = {r} is outside [0, 1]")))
    }
}
