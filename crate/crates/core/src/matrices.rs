//! The lower-triangular TVAR matrix `A`, the inverse covariance `(1/sigma^2) A^T A`,
//! and the covariance `sigma^2 (A^T A)^{-1}`.
//!
//! Public accessors take 1-based `(row, col)` / `(mu, nu)` indices. Internally
//! band `k` of a matrix is stored as a vector indexed by 0-based column `i`,
//! holding the entry at 0-based `(i + k, i)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TvarModel;

/// Unit lower-triangular band matrix `A` with `z = A x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBandMatrix {
    n: usize,
    bands: Vec<Vec<f64>>,
}

impl LowerBandMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of sub-diagonals (the model order `M`).
    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    /// Entry at 1-based `(row, col)`; zero outside the band.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row >= 1 && col >= 1 && row <= self.n && col <= self.n);
        if col > row || row - col > self.bandwidth() {
            return 0.0;
        }
        self.bands[row - col][col - 1]
    }

    /// Sub-diagonal `k` (0 = main diagonal), top to bottom.
    pub fn band(&self, k: usize) -> &[f64] {
        &self.bands[k]
    }

    /// Product of the diagonal.
    pub fn det(&self) -> f64 {
        self.bands[0].iter().product()
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (k, band) in self.bands.iter().enumerate() {
            for (i, &a) in band.iter().enumerate() {
                y[i + k] += a * x[i];
            }
        }
        y
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n);
        for (k, band) in self.bands.iter().enumerate() {
            for (i, &a) in band.iter().enumerate() {
                d.set(i + k, i, a);
            }
        }
        d
    }

    /// Solves `A x = b` in place by forward substitution.
    fn forward_solve(&self, x: &mut [f64]) {
        let m = self.bandwidth();
        for t in 0..self.n {
            let mut acc = x[t];
            for k in 1..=m.min(t) {
                acc -= self.bands[k][t - k] * x[t - k];
            }
            x[t] = acc / self.bands[0][t];
        }
    }

    /// Solves `A^T x = b` in place by back substitution.
    fn backward_solve(&self, x: &mut [f64]) {
        let m = self.bandwidth();
        for t in (0..self.n).rev() {
            let mut acc = x[t];
            for k in 1..=m.min(self.n - 1 - t) {
                acc -= self.bands[k][t] * x[t + k];
            }
            x[t] = acc / self.bands[0][t];
        }
    }
}

/// Symmetric band matrix, lower bands stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymBandMatrix {
    n: usize,
    bands: Vec<Vec<f64>>,
}

impl SymBandMatrix {
    /// Builds from lower bands; `bands[k].len()` must be `n - k`.
    pub fn from_bands(n: usize, bands: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 || bands.is_empty() {
            return Err(Error::Domain("band matrix needs n >= 1 and a main diagonal".into()));
        }
        for (k, b) in bands.iter().enumerate() {
            if k < n && b.len() != n - k {
                return Err(Error::Domain(format!(
                    "band {k} has length {}, expected {}",
                    b.len(),
                    n - k
                )));
            }
            if k >= n && !b.is_empty() {
                return Err(Error::Domain(format!("band {k} lies outside a {n} x {n} matrix")));
            }
        }
        let mut bands = bands;
        bands.truncate(n);
        Ok(SymBandMatrix { n, bands })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn band(&self, k: usize) -> &[f64] {
        &self.bands[k]
    }

    /// Entry at 1-based `(mu, nu)`; zero outside the band.
    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        assert!(mu >= 1 && nu >= 1 && mu <= self.n && nu <= self.n);
        let (hi, lo) = if mu >= nu { (mu, nu) } else { (nu, mu) };
        let k = hi - lo;
        if k > self.bandwidth() {
            0.0
        } else {
            self.bands[k][lo - 1]
        }
    }

    pub fn trace(&self) -> f64 {
        self.bands[0].iter().sum()
    }

    /// Squared Frobenius norm, counting each off-diagonal entry twice.
    pub fn frobenius_sq(&self) -> f64 {
        self.bands
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let s: f64 = b.iter().map(|v| v * v).sum();
                if k == 0 {
                    s
                } else {
                    2.0 * s
                }
            })
            .sum()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0; self.n];
        for (k, b) in self.bands.iter().enumerate() {
            for (i, v) in b.iter().enumerate() {
                rows[i + k] += v.abs();
                if k > 0 {
                    rows[i] += v.abs();
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.bands.iter().flatten().all(|v| v.is_finite())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n);
        for (k, b) in self.bands.iter().enumerate() {
            for (i, &v) in b.iter().enumerate() {
                d.set(i + k, i, v);
                d.set(i, i + k, v);
            }
        }
        d
    }

    /// Band text format: a header of `key value` lines, then one line per band
    /// (`k` followed by the band entries).
    pub fn to_band_text(&self, noise_variance: f64) -> String {
        let mut s = String::new();
        writeln!(s, "n {}", self.n).unwrap();
        writeln!(s, "bandwidth {}", self.bandwidth()).unwrap();
        writeln!(s, "noise_variance {noise_variance}").unwrap();
        for (k, b) in self.bands.iter().enumerate() {
            write!(s, "{k}").unwrap();
            for v in b {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Parses [`to_band_text`](Self::to_band_text) output; returns the matrix and noise variance.
    pub fn from_band_text(text: &str) -> Result<(Self, f64)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut header = |key: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing `{key}` line")))?;
            let mut it = line.split_whitespace();
            match (it.next(), it.next()) {
                (Some(k), Some(v)) if k == key => Ok(v.to_string()),
                _ => Err(Error::Parse(format!("expected `{key} <value>`, got `{line}`"))),
            }
        };
        let parse_err = |e: &dyn std::fmt::Display| Error::Parse(e.to_string());
        let n: usize = header("n")?.parse().map_err(|e| parse_err(&e))?;
        let bw: usize = header("bandwidth")?.parse().map_err(|e| parse_err(&e))?;
        let var: f64 = header("noise_variance")?.parse().map_err(|e| parse_err(&e))?;
        let mut bands = Vec::with_capacity(bw + 1);
        for (k, line) in lines.enumerate() {
            let mut it = line.split_whitespace();
            let idx: usize = it
                .next()
                .ok_or_else(|| Error::Parse("empty band line".into()))?
                .parse()
                .map_err(|e| parse_err(&e))?;
            if idx != k {
                return Err(Error::Parse(format!("band {idx} out of order, expected {k}")));
            }
            let band = it
                .map(|v| v.parse::<f64>().map_err(|e| parse_err(&e)))
                .collect::<Result<Vec<_>>>()?;
            bands.push(band);
        }
        if bands.len() != bw + 1 {
            return Err(Error::Parse(format!(
                "expected {} bands, found {}",
                bw + 1,
                bands.len()
            )));
        }
        Ok((Self::from_bands(n, bands)?, var))
    }
}

/// Square dense matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based access.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Entry at 1-based `(mu, nu)`.
    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.at(mu - 1, nu - 1)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }

    /// `self * other` where `other` is symmetric banded.
    pub fn mul_band(&self, other: &SymBandMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n());
        let n = self.n;
        let bw = other.bandwidth();
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let lo = j.saturating_sub(bw);
                let hi = (j + bw).min(n - 1);
                let s: f64 = (lo..=hi).map(|l| self.at(i, l) * other.get(l + 1, j + 1)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    /// `max |self - I|`.
    pub fn max_abs_dev_from_identity(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.at(i, j) - target).abs());
            }
        }
        worst
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                write!(s, "{v}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// The `n x n` matrix `A`: row `t` holds `a_m(t/n)` at column `t - m`.
pub fn build_a(model: &TvarModel, n: usize) -> Result<LowerBandMatrix> {
    check_n(n)?;
    let order = model.order().min(n - 1);
    let bands = (0..=order)
        .map(|m| {
            (0..n - m)
                .map(|i| model.coeff(m, (i + m + 1) as f64 / n as f64))
                .collect()
        })
        .collect();
    Ok(LowerBandMatrix { n, bands })
}

/// `(1/sigma^2) A^T A`, assembled from the band product.
pub fn build_phi_inv(model: &TvarModel, n: usize) -> Result<SymBandMatrix> {
    let a = build_a(model, n)?;
    Ok(phi_inv_from_a(&a, model.noise_variance()))
}

pub(crate) fn phi_inv_from_a(a: &LowerBandMatrix, noise_variance: f64) -> SymBandMatrix {
    let n = a.n();
    let bw = a.bandwidth();
    // (A^T A)[q + k][q] = sum_t A[t][q + k] A[t][q], t from q + k to min(n - 1, q + bw)
    let bands = (0..=bw)
        .map(|k| {
            (0..n - k)
                .map(|q| {
                    let p = q + k;
                    let last = (q + bw).min(n - 1);
                    (p..=last)
                        .map(|t| a.bands[t - p][p] * a.bands[t - q][q])
                        .sum::<f64>()
                        / noise_variance
                })
                .collect()
        })
        .collect();
    SymBandMatrix { n, bands }
}

/// Closed-form entry of the inverse covariance at 1-based `(mu, nu)`:
///
/// ```text
/// (1/sigma^2) sum_{m=0}^{n - max(mu,nu)} a_m((m + max)/n) a_{m + |mu - nu|}((m + max)/n)
/// ```
pub fn entry_phi_inv(model: &TvarModel, n: usize, mu: usize, nu: usize) -> Result<f64> {
    check_n(n)?;
    if mu == 0 || nu == 0 || mu > n || nu > n {
        return Err(Error::Domain(format!(
            "index ({mu}, {nu}) outside 1..={n}"
        )));
    }
    let hi = mu.max(nu);
    let lag = mu.abs_diff(nu);
    if lag > model.order() {
        return Ok(0.0);
    }
    let terms = (model.order() - lag).min(n - hi);
    let s: f64 = (0..=terms)
        .map(|m| {
            let r = (m + hi) as f64 / n as f64;
            model.coeff(m, r) * model.coeff(m + lag, r)
        })
        .sum();
    Ok(s / model.noise_variance())
}

/// Covariance `sigma^2 (A^T A)^{-1}` from a back solve against `A^T` followed by
/// a forward solve against `A`.
pub fn build_phi(model: &TvarModel, n: usize) -> Result<DenseMatrix> {
    let a = build_a(model, n)?;
    let var = model.noise_variance();
    // W = A^{-T}, column by column
    let mut w = DenseMatrix::zeros(n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        a.backward_solve(&mut col);
        for i in 0..=j {
            w.set(i, j, col[i]);
        }
    }
    // Phi = sigma^2 A^{-1} W, column by column
    let mut phi = DenseMatrix::zeros(n);
    for j in 0..n {
        for i in 0..n {
            col[i] = var * w.at(i, j);
        }
        a.forward_solve(&mut col);
        for i in 0..n {
            phi.set(i, j, col[i]);
        }
    }
    // exact symmetry
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (phi.at(i, j) + phi.at(j, i));
            phi.set(i, j, v);
            phi.set(j, i, v);
        }
    }
    Ok(phi)
}

/// `trace(Phi_N) = sigma^2 ||A^{-1}||_F^2`, one forward solve per column, `O(n)` memory.
pub fn trace_phi(model: &TvarModel, n: usize) -> Result<f64> {
    let a = build_a(model, n)?;
    let mut col = vec![0.0; n];
    let mut total = 0.0;
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        a.forward_solve(&mut col);
        total += col[j..].iter().map(|v| v * v).sum::<f64>();
    }
    Ok(model.noise_variance() * total)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("matrix dimension must be at least 1".into()))
    } else {
        Ok(())
    }
}
