use serde::{Deserialize, Serialize};

use super::eigen::{eigenvalues, EigenSpectrum};
use crate::error::{Error, Result};
use crate::matrices::{build_phi, build_phi_inv};
use crate::model::{simulate::draw_path, TvarModel};
use crate::quadrature::{surface_mean, QuadConfig};

/// Trace average of `alpha^k` against the surface mean of `g^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub n: usize,
    pub k: u32,
    pub trace_avg: f64,
    pub integral: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl MomentReport {
    fn new(n: usize, k: u32, trace_avg: f64, integral: f64) -> Self {
        let abs_err = (trace_avg - integral).abs();
        MomentReport {
            n,
            k,
            trace_avg,
            integral,
            abs_err,
            rel_err: abs_err / integral.abs().max(f64::MIN_POSITIVE),
        }
    }
}

/// `(1/N) sum alpha^k` versus `(1/2pi) int int g^k dr dw`.
pub fn moment_check(model: &TvarModel, n: usize, k: u32, quad: &QuadConfig) -> Result<MomentReport> {
    let spectrum = eigenvalues(&build_phi_inv(model, n)?)?;
    moment_check_with_spectrum(model, &spectrum, k, quad)
}

/// As [`moment_check`], reusing a spectrum already computed for `model`.
pub fn moment_check_with_spectrum(
    model: &TvarModel,
    spectrum: &EigenSpectrum,
    k: u32,
    quad: &QuadConfig,
) -> Result<MomentReport> {
    let integral = surface_mean(model, quad, f64::MIN_POSITIVE, |g| g.powi(k as i32))?.value[0];
    Ok(MomentReport::new(spectrum.len(), k, spectrum.moment(k), integral))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakNormReport {
    pub n: usize,
    /// `sqrt((1/N) sum alpha^2)`.
    pub from_eigenvalues: f64,
    /// `sqrt((1/N) sum_{mu,nu} G(mu,nu)^2)`.
    pub from_entries: f64,
    /// `sqrt((1/2pi) int int g^2)`.
    pub limit: f64,
    pub rel_err: f64,
    /// The underlying second-moment comparison.
    pub moment: MomentReport,
}

/// Weak norm of the inverse covariance against its asymptotic value.
pub fn weak_norm_check(model: &TvarModel, n: usize, quad: &QuadConfig) -> Result<WeakNormReport> {
    let g = build_phi_inv(model, n)?;
    let spectrum = eigenvalues(&g)?;
    let moment = moment_check_with_spectrum(model, &spectrum, 2, quad)?;
    let from_eigenvalues = moment.trace_avg.sqrt();
    let limit = moment.integral.sqrt();
    Ok(WeakNormReport {
        n,
        from_eigenvalues,
        from_entries: (g.frobenius_sq() / n as f64).sqrt(),
        limit,
        rel_err: (from_eigenvalues - limit).abs() / limit.max(f64::MIN_POSITIVE),
        moment,
    })
}

/// Fraction of eigenvalues outside `[lo * (1 - slack), hi * (1 + slack)]`.
pub fn outside_fraction(spectrum: &EigenSpectrum, lo: f64, hi: f64, slack: f64) -> f64 {
    let (a, b) = (lo * (1.0 - slack), hi * (1.0 + slack));
    let outside = spectrum.values().iter().filter(|&&v| v < a || v > b).count();
    outside as f64 / spectrum.len() as f64
}

/// Empirical second moments of simulated paths against `Phi_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub n: usize,
    pub num_paths: usize,
    pub seed: u64,
    pub max_abs_dev: f64,
    /// Location (1-based) of the largest deviation.
    pub worst_entry: (usize, usize),
    /// Largest Monte-Carlo standard error `sqrt((Phi_ii Phi_jj + Phi_ij^2) / paths)`.
    pub max_std_err: f64,
    /// Largest `|dev_ij| / se_ij`.
    pub max_z: f64,
    /// Pass threshold on `max_z`.
    pub z_threshold: f64,
    pub passed: bool,
}

/// Deviations above this many standard errors fail the check.
pub const COVARIANCE_Z_THRESHOLD: f64 = 5.0;

/// Compares `(1/paths) sum x x^T` with `Phi_N` for a zero-mean simulated source.
pub fn covariance_mc_check(
    model: &TvarModel,
    n: usize,
    num_paths: usize,
    seed: u64,
) -> Result<CovarianceReport> {
    if n == 0 || num_paths < 2 {
        return Err(Error::Domain(format!(
            "covariance check needs n >= 1 and at least 2 paths, got n = {n}, paths = {num_paths}"
        )));
    }
    let phi = build_phi(model, n)?;
    // fixed-order accumulation: chunks in path order, each chunk summed in path order
    const CHUNK: usize = 4096;
    let mut total = vec![0.0; n * n];
    let mut start = 0;
    while start < num_paths {
        let end = (start + CHUNK).min(num_paths);
        let mut part = vec![0.0; n * n];
        for p in start..end {
            let x = draw_path(model, n, seed, p);
            for i in 0..n {
                for j in 0..=i {
                    part[i * n + j] += x[i] * x[j];
                }
            }
        }
        total.iter_mut().zip(&part).for_each(|(t, v)| *t += v);
        start = end;
    }
    let paths = num_paths as f64;
    let (mut max_abs_dev, mut worst_entry, mut max_std_err, mut max_z) = (0.0, (1, 1), 0.0, 0.0);
    for i in 0..n {
        for j in 0..=i {
            let emp = total[i * n + j] / paths;
            let dev = (emp - phi.at(i, j)).abs();
            let se = ((phi.at(i, i) * phi.at(j, j) + phi.at(i, j).powi(2)) / paths).sqrt();
            if dev > max_abs_dev {
                max_abs_dev = dev;
                worst_entry = (i + 1, j + 1);
            }
            max_std_err = f64::max(max_std_err, se);
            max_z = f64::max(max_z, dev / se);
        }
    }
    Ok(CovarianceReport {
        n,
        num_paths,
        seed,
        max_abs_dev,
        worst_entry,
        max_std_err,
        max_z,
        z_threshold: COVARIANCE_Z_THRESHOLD,
        passed: max_z <= COVARIANCE_Z_THRESHOLD,
    })
}
