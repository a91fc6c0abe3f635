//! Eigenvalues of symmetric band matrices.
//!
//! Bandwidth `b > 1` is first reduced to tridiagonal form with Givens
//! rotations, one outer diagonal at a time; each rotation that clears an
//! entry pushes a single bulge `b` rows down, which is chased off the end
//! of the matrix. The tridiagonal matrix is then diagonalized by implicit
//! QL with Wilkinson-style shifts (eigenvalues only).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::SymBandMatrix;
use crate::sum;

/// Ascending eigenvalues of a symmetric matrix with solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum {
    values: Vec<f64>,
    /// `n * eps * ||G||_inf`, a backward-error bound for the QL sweep.
    pub backward_error: f64,
    /// `|sum(values) - trace| / max(|trace|, ||G||_inf)`.
    pub trace_residual: f64,
}

impl EigenSpectrum {
    /// Wraps a list of eigenvalues (sorted here); diagnostics are left at zero.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("spectrum must hold at least one value".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("eigenvalue list".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(EigenSpectrum {
            values,
            backward_error: 0.0,
            trace_residual: 0.0,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `(1/N) sum alpha^k`.
    pub fn moment(&self, k: u32) -> f64 {
        if k == 0 {
            return 1.0;
        }
        sum::sum(self.values.iter().map(|a| a.powi(k as i32))) / self.len() as f64
    }

    /// `sum ln alpha`; only meaningful for positive spectra.
    pub fn log_det(&self) -> f64 {
        sum::sum(self.values.iter().map(|a| a.ln()))
    }
}

/// All eigenvalues of a symmetric band matrix, ascending.
pub fn eigenvalues(matrix: &SymBandMatrix) -> Result<EigenSpectrum> {
    if !matrix.is_finite() {
        return Err(Error::NonFinite("matrix has NaN or infinite entries".into()));
    }
    let n = matrix.n();
    let norm = matrix.norm_inf();
    let trace = matrix.trace();
    let (mut d, mut e) = tridiagonalize(matrix);
    tql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    let scale = trace.abs().max(norm).max(f64::MIN_POSITIVE);
    let trace_residual = (sum::sum(d.iter().copied()) - trace).abs() / scale;
    Ok(EigenSpectrum {
        values: d,
        backward_error: n as f64 * f64::EPSILON * norm,
        trace_residual,
    })
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i + 1`).
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::Domain(format!(
            "tridiagonal input needs n >= 1 diagonal and n - 1 off-diagonal entries, got {} and {}",
            n,
            off.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    tql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Lower band storage with one spare diagonal for the bulge.
struct Workspace {
    n: usize,
    width: usize,
    // data[k * n + j] = A(j + k, j)
    data: Vec<f64>,
}

impl Workspace {
    fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > self.width {
            0.0
        } else {
            self.data[k * self.n + lo]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > self.width {
            debug_assert!(v == 0.0, "fill-in outside the band workspace at ({i}, {j})");
            return;
        }
        self.data[k * self.n + lo] = v;
    }

    /// Similarity rotation in the plane `(q - 1, q)` that zeroes `A(q, col)`.
    fn rotate_out(&mut self, q: usize, col: usize) {
        let p = q - 1;
        let x = self.get(p, col);
        let y = self.get(q, col);
        if y == 0.0 {
            return;
        }
        let r = x.hypot(y);
        let (c, s) = (x / r, -y / r);
        let lo = p.saturating_sub(self.width);
        let hi = (q + self.width).min(self.n - 1);
        for j in lo..=hi {
            if j == p || j == q {
                continue;
            }
            let (apj, aqj) = (self.get(p, j), self.get(q, j));
            if apj == 0.0 && aqj == 0.0 {
                continue;
            }
            self.set(p, j, c * apj - s * aqj);
            self.set(q, j, s * apj + c * aqj);
        }
        let (app, aqq, apq) = (self.get(p, p), self.get(q, q), self.get(p, q));
        let (cc, ss, cs) = (c * c, s * s, c * s);
        self.set(p, p, cc * app - 2.0 * cs * apq + ss * aqq);
        self.set(q, q, ss * app + 2.0 * cs * apq + cc * aqq);
        self.set(p, q, cs * (app - aqq) + (cc - ss) * apq);
        self.set(p, col, r);
        self.set(q, col, 0.0);
    }
}

fn tridiagonalize(matrix: &SymBandMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = matrix.n();
    let b = matrix.bandwidth();
    if b <= 1 {
        let d = matrix.band(0).to_vec();
        let mut e = if b == 1 { matrix.band(1).to_vec() } else { vec![0.0; n - 1] };
        e.push(0.0);
        return (d, e);
    }
    let width = b + 1;
    let mut ws = Workspace {
        n,
        width,
        data: vec![0.0; (width + 1) * n],
    };
    for k in 0..=b {
        ws.data[k * n..k * n + (n - k)].copy_from_slice(matrix.band(k));
    }
    for k in (2..=b).rev() {
        for i in 0..n.saturating_sub(k) {
            let (mut row, mut col) = (i + k, i);
            loop {
                if ws.get(row, col) == 0.0 {
                    break;
                }
                ws.rotate_out(row, col);
                // the rotation in (row - 1, row) leaves a bulge at (row + k, row - 1)
                let next = row + k;
                if next >= n {
                    break;
                }
                col = row - 1;
                row = next;
            }
        }
    }
    let d = ws.data[..n].to_vec();
    let mut e = ws.data[n..2 * n - 1].to_vec();
    e.push(0.0);
    (d, e)
}

/// Implicit QL on `(d, e)`, with `e[i]` coupling `i` and `i + 1` and `e[n - 1] = 0`.
/// Eigenvalues are left in `d`, unsorted.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut shift = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::EigenConvergence(l));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                shift += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += shift;
        e[l] = 0.0;
    }
    Ok(())
}
