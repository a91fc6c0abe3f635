//! Composite Gauss–Legendre quadrature with uniform panel doubling.
//!
//! An estimate at refinement level `L` uses `panels * 2^L` equal panels per
//! axis. Refinement stops once two successive levels agree to `refine_tol`;
//! the reported error is the difference between those two levels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{cosine_series, TvarModel};
use crate::sum::CompensatedSum;

/// Panel layout and stopping rule for the `(r, omega)` integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub r_panels: usize,
    pub omega_panels: usize,
    pub nodes_per_panel: usize,
    pub refine_tol: f64,
    pub max_refinements: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            r_panels: 16,
            omega_panels: 32,
            nodes_per_panel: 4,
            refine_tol: 1e-6,
            max_refinements: 6,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.r_panels == 0 || self.omega_panels == 0 || self.nodes_per_panel == 0 {
            return Err(Error::Domain(format!(
                "quadrature panels and nodes must be positive: {self:?}"
            )));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol < 1.0) {
            return Err(Error::Domain(format!(
                "refine_tol must lie in (0, 1), got {}",
                self.refine_tol
            )));
        }
        if self.max_refinements == 0 {
            return Err(Error::Domain("max_refinements must be at least 1".into()));
        }
        Ok(())
    }

    /// The same layout with every panel count doubled.
    pub fn doubled(&self) -> Self {
        QuadConfig {
            r_panels: 2 * self.r_panels,
            omega_panels: 2 * self.omega_panels,
            ..*self
        }
    }

    pub(crate) fn r_panels_at(&self, level: usize) -> usize {
        self.r_panels << level
    }

    pub(crate) fn omega_panels_at(&self, level: usize) -> usize {
        self.omega_panels << level
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Nodes and weights of the composite rule with `panels` equal panels on `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        (0..panels)
            .flat_map(|p| {
                let lo = a + h * p as f64;
                let hi = if p + 1 == panels { b } else { lo + h };
                self.mapped(lo, hi).collect::<Vec<_>>()
            })
            .collect()
    }

    /// Composite integral of a vector-valued `f` on `[a, b]`, with every panel
    /// containing a point of `breaks` split there. `breaks` must be sorted.
    ///
    /// Returns the integrals together with the total weight used.
    pub fn composite_split<const K: usize>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        breaks: &[f64],
        mut f: impl FnMut(f64) -> [f64; K],
    ) -> ([f64; K], f64) {
        let h = (b - a) / panels as f64;
        let mut acc = [CompensatedSum::new(); K];
        let mut total = CompensatedSum::new();
        let mut add = |lo: f64, hi: f64| {
            for (x, w) in self.mapped(lo, hi) {
                let v = f(x);
                for k in 0..K {
                    acc[k].add(w * v[k]);
                }
                total.add(w);
            }
        };
        let mut cursor = 0;
        for p in 0..panels {
            let lo = a + h * p as f64;
            let hi = if p + 1 == panels { b } else { lo + h };
            while cursor < breaks.len() && breaks[cursor] <= lo {
                cursor += 1;
            }
            let mut left = lo;
            while cursor < breaks.len() && breaks[cursor] < hi {
                add(left, breaks[cursor]);
                left = breaks[cursor];
                cursor += 1;
            }
            add(left, hi);
        }
        (acc.map(|s| s.value()), total.value())
    }

    /// Like [`composite_split`](Self::composite_split), but each stretch
    /// between consecutive breaks is integrated in a variable `t` with
    /// `x - x_b ~ t^2` at every break end (`3t^2 - 2t^3` when both ends are
    /// breaks). Terms like `|x - x_b|^{k/2}` then become smooth in `t` over
    /// the whole stretch, not only next to the break. Each stretch gets
    /// `ceil(panels * length / (b - a)) * 2^level` panels in `t`, so every
    /// stretch, however short, doubles from one level to the next.
    pub fn composite_graded<const K: usize>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        level: usize,
        breaks: &[f64],
        mut f: impl FnMut(f64) -> [f64; K],
    ) -> ([f64; K], f64) {
        let mut acc = [CompensatedSum::new(); K];
        let mut total = CompensatedSum::new();
        let mut ends = vec![a];
        ends.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        ends.push(b);
        let last = ends.len() - 2;
        for (i, e) in ends.windows(2).enumerate() {
            let (lo, hi) = (e[0], e[1]);
            let len = hi - lo;
            let n = ((panels as f64 * len / (b - a)).ceil() as usize).max(1) << level;
            // map t in [0, 1] to x in [lo, hi], returning (x, dx/dt)
            let map = |t: f64| -> (f64, f64) {
                match (i > 0, i < last) {
                    (true, true) => (lo + len * t * t * (3.0 - 2.0 * t), 6.0 * len * t * (1.0 - t)),
                    (true, false) => (lo + len * t * t, 2.0 * len * t),
                    (false, true) => {
                        let s = 1.0 - t;
                        (hi - len * s * s, 2.0 * len * s)
                    }
                    (false, false) => (lo + len * t, len),
                }
            };
            for (t, w) in self.composite(0.0, 1.0, n) {
                let (x, dx) = map(t);
                let v = f(x);
                let w = w * dx;
                for k in 0..K {
                    acc[k].add(w * v[k]);
                }
                total.add(w);
            }
        }
        (acc.map(|s| s.value()), total.value())
    }
}

/// `(P_n(x), P_n'(x))` from the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A converged estimate from panel doubling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refined<const K: usize> {
    #[serde(with = "array_serde")]
    pub value: [f64; K],
    /// `|I_L - I_{L-1}|` per component.
    #[serde(with = "array_serde")]
    pub error: [f64; K],
    /// Refinement level at which the estimate settled.
    pub level: usize,
}

mod array_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const K: usize>(v: &[f64; K], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const K: usize>(d: D) -> Result<[f64; K], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|_| serde::de::Error::custom(format!("expected {K} values")))
    }
}

/// Evaluates `estimate(level)` for `level = 0, 1, ...` until successive values
/// satisfy `|I_L - I_{L-1}| <= refine_tol * max(|I_L|, floor[k])` for every component.
pub fn refine<const K: usize>(
    cfg: &QuadConfig,
    floor: [f64; K],
    mut estimate: impl FnMut(usize) -> [f64; K],
) -> Result<Refined<K>> {
    cfg.validate()?;
    let mut previous = estimate(0);
    for level in 1..=cfg.max_refinements {
        let current = estimate(level);
        let mut error = [0.0; K];
        let mut settled = true;
        for k in 0..K {
            error[k] = (current[k] - previous[k]).abs();
            if !(error[k] <= cfg.refine_tol * current[k].abs().max(floor[k])) {
                settled = false;
            }
        }
        if settled {
            return Ok(Refined {
                value: current,
                error,
                level,
            });
        }
        if level == cfg.max_refinements {
            return Err(Error::Convergence {
                refinements: level,
                last: current.to_vec(),
                previous: previous.to_vec(),
            });
        }
        previous = current;
    }
    unreachable!("max_refinements >= 1")
}

/// `(1/2pi) int_{-pi}^{pi} int_0^1 f(g(r, w)) dr dw` at one refinement level,
/// using the even symmetry of `g` in `w`.
pub(crate) fn surface_mean_at_level(
    model: &TvarModel,
    cfg: &QuadConfig,
    level: usize,
    f: &impl Fn(f64) -> f64,
) -> f64 {
    let rule = GaussLegendre::new(cfg.nodes_per_panel);
    let r_nodes = rule.composite(0.0, 1.0, cfg.r_panels_at(level));
    let w_nodes = rule.composite(0.0, PI, cfg.omega_panels_at(level));
    let w_total: f64 = crate::sum::sum(w_nodes.iter().map(|&(_, w)| w));
    let mut outer = CompensatedSum::new();
    let mut r_total = CompensatedSum::new();
    for &(r, wr) in &r_nodes {
        let c = model.g_fourier(r);
        let inner: CompensatedSum = w_nodes
            .iter()
            .map(|&(w, ww)| ww * f(cosine_series(&c, w).max(0.0)))
            .collect();
        outer.add(wr * inner.value() / w_total);
        r_total.add(wr);
    }
    outer.value() / r_total.value()
}

/// Refined surface mean of `f(g)`; relative tolerance against `max(|I|, floor)`.
pub fn surface_mean(
    model: &TvarModel,
    cfg: &QuadConfig,
    floor: f64,
    f: impl Fn(f64) -> f64,
) -> Result<Refined<1>> {
    refine(cfg, [floor], |level| [surface_mean_at_level(model, cfg, level, &f)])
}
