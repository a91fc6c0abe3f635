use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::TvarModel;
use crate::error::{Error, Result};

/// Default number of `r` samples for the validation grid.
pub const DEFAULT_GRID_R: usize = 257;
/// Default number of `omega` samples for the validation grid (odd, so `omega = 0` is on it).
pub const DEFAULT_GRID_OMEGA: usize = 513;
/// Models whose `g` dips below this value are rejected by the asymptotic path.
pub const DEFAULT_G_FLOOR: f64 = 1e-9;

/// `g(r, w)` sampled on a uniform tensor grid over `[0, 1] x [-pi, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    pub r_nodes: Vec<f64>,
    pub omega_nodes: Vec<f64>,
    /// Row-major, `values[i * omega_nodes.len() + j] = g(r_i, w_j)`.
    pub values: Vec<f64>,
    pub g_min: f64,
    pub g_max: f64,
    /// `(r, omega)` where the grid minimum is attained.
    pub argmin: (f64, f64),
    pub argmax: (f64, f64),
}

impl SpectrumGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.omega_nodes.len() + j]
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}

/// Samples `g` on an `nr x nw` grid and caches its extrema.
pub fn sample_spectrum(model: &TvarModel, nr: usize, nw: usize) -> Result<SpectrumGrid> {
    if nr < 2 || nw < 2 {
        return Err(Error::Domain(format!(
            "spectrum grid needs at least 2 x 2 nodes, got {nr} x {nw}"
        )));
    }
    let r_nodes = linspace(0.0, 1.0, nr);
    // integer numerators keep the grid mirror-symmetric, with 0 exact for odd nw
    let span = (nw - 1) as f64;
    let omega_nodes: Vec<f64> = (0..nw)
        .map(|j| PI * (2.0 * j as f64 - span) / span)
        .collect();
    let mut values = Vec::with_capacity(nr * nw);
    let (mut g_min, mut g_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut argmin, mut argmax) = ((0.0, 0.0), (0.0, 0.0));
    for &r in &r_nodes {
        let c = model.g_fourier(r);
        for &w in &omega_nodes {
            // cosine form is exactly even in omega
            let g = super::cosine_series(&c, w).max(0.0);
            if g < g_min {
                g_min = g;
                argmin = (r, w);
            }
            if g > g_max {
                g_max = g;
                argmax = (r, w);
            }
            values.push(g);
        }
    }
    Ok(SpectrumGrid {
        r_nodes,
        omega_nodes,
        values,
        g_min,
        g_max,
        argmin,
        argmax,
    })
}

/// Outcome of [`validate`]; a failed check is data, not an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub g_floor: f64,
    /// Grid estimate of the infimum of `g`.
    pub inf_g: f64,
    pub inf_at: (f64, f64),
    /// Grid estimate of the supremum of `g`.
    pub sup_g: f64,
    pub sup_at: (f64, f64),
    /// `max_r (1/sigma^2)(sum_m |a_m(r)|)^2`, an upper bound for `g`.
    pub bound: f64,
    pub grid: (usize, usize),
    pub message: String,
}

/// Checks that `g` stays above `g_floor` on the default grid.
pub fn validate(model: &TvarModel, g_floor: f64) -> Result<ValidationReport> {
    validate_on_grid(model, g_floor, DEFAULT_GRID_R, DEFAULT_GRID_OMEGA)
}

pub fn validate_on_grid(
    model: &TvarModel,
    g_floor: f64,
    nr: usize,
    nw: usize,
) -> Result<ValidationReport> {
    if !(g_floor >= 0.0 && g_floor.is_finite()) {
        return Err(Error::Domain(format!("g_floor must be >= 0, got {g_floor}")));
    }
    let grid = sample_spectrum(model, nr, nw)?;
    let bound = grid
        .r_nodes
        .iter()
        .map(|&r| model.g_bound(r))
        .fold(0.0, f64::max);
    let passed = grid.g_min >= g_floor;
    let message = if passed {
        format!("g in [{:e}, {:e}] on the grid", grid.g_min, grid.g_max)
    } else {
        format!(
            "g reaches {:e} at (r = {}, omega = {}), below the floor {:e}",
            grid.g_min, grid.argmin.0, grid.argmin.1, g_floor
        )
    };
    Ok(ValidationReport {
        passed,
        g_floor,
        inf_g: grid.g_min,
        inf_at: grid.argmin,
        sup_g: grid.g_max,
        sup_at: grid.argmax,
        bound,
        grid: (nr, nw),
        message,
    })
}
