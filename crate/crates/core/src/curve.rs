//! Rate-distortion points and curves, their shape checks, and the curve CSV format.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadConfig;

/// Frozen CSV header for curve files.
pub const CSV_HEADER: &str = "theta,distortion,rate_nats,rate_bits";

/// Slack for the monotonicity check.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Slack for the midpoint-convexity check.
pub const CONVEXITY_SLACK: f64 = 1e-9;

/// One point of a parametric curve; the rate is in nats per letter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdPoint {
    pub theta: f64,
    pub distortion: f64,
    pub rate: f64,
}

impl RdPoint {
    pub fn rate_bits(&self) -> f64 {
        self.rate / std::f64::consts::LN_2
    }
}

/// Where a curve came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSource {
    FiniteN { n: usize },
    Asymptotic { quad: QuadConfig },
}

impl fmt::Display for CurveSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSource::FiniteN { n } => write!(f, "finite-N (N={n})"),
            CurveSource::Asymptotic { .. } => write!(f, "asymptotic"),
        }
    }
}

/// A sampled curve, sorted by increasing distortion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdCurve {
    pub points: Vec<RdPoint>,
    /// Distortion at which the rate first reaches zero.
    pub d_max: f64,
    pub source: CurveSource,
    /// Per-point notes, e.g. quadrature that failed to settle.
    pub warnings: Vec<String>,
}

/// Result of [`RdCurve::check_shape`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub monotone: bool,
    pub convex: bool,
    pub violations: Vec<String>,
}

impl ShapeReport {
    pub fn passed(&self) -> bool {
        self.monotone && self.convex
    }
}

impl RdCurve {
    pub(crate) fn new(mut points: Vec<RdPoint>, source: CurveSource, warnings: Vec<String>) -> Self {
        points.sort_by(|a, b| a.distortion.total_cmp(&b.distortion));
        let d_max = points
            .iter()
            .find(|p| p.rate <= 0.0)
            .or(points.last())
            .map_or(0.0, |p| p.distortion);
        RdCurve {
            points,
            d_max,
            source,
            warnings,
        }
    }

    /// Checks that distortion strictly increases, rate strictly decreases
    /// until it reaches zero (and stays there), and every midpoint lies on
    /// or below the chord through its neighbours.
    pub fn check_shape(&self) -> ShapeReport {
        let mut violations = Vec::new();
        let mut monotone = true;
        let mut convex = true;
        let mut zero_reached = false;
        for (i, w) in self.points.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            if b.distortion <= a.distortion {
                monotone = false;
                violations.push(format!("distortion not increasing at point {}", i + 1));
            }
            if a.rate <= 0.0 {
                zero_reached = true;
            }
            if zero_reached {
                if b.rate > MONOTONE_SLACK {
                    monotone = false;
                    violations.push(format!("rate leaves zero at point {}", i + 1));
                }
            } else if b.rate >= a.rate + MONOTONE_SLACK {
                monotone = false;
                violations.push(format!(
                    "rate not decreasing at point {}: {} -> {}",
                    i + 1,
                    a.rate,
                    b.rate
                ));
            }
        }
        for (i, w) in self.points.windows(3).enumerate() {
            let (a, b, c) = (w[0], w[1], w[2]);
            let span = c.distortion - a.distortion;
            if span <= 0.0 {
                continue;
            }
            let t = (b.distortion - a.distortion) / span;
            let chord = a.rate + t * (c.rate - a.rate);
            if b.rate > chord + CONVEXITY_SLACK {
                convex = false;
                violations.push(format!(
                    "point {} lies {:e} above the chord",
                    i + 1,
                    b.rate - chord
                ));
            }
        }
        ShapeReport {
            monotone,
            convex,
            violations,
        }
    }

    /// CSV with header `theta,distortion,rate_nats,rate_bits`.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.points.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for p in &self.points {
            writeln!(s, "{:e},{:e},{:e},{:e}", p.theta, p.distortion, p.rate, p.rate_bits()).unwrap();
        }
        s
    }

    /// Parses curve CSV; the bits column is ignored in favour of nats.
    pub fn points_from_csv(text: &str) -> Result<Vec<RdPoint>> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `{CSV_HEADER}`, got {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        lines
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, line)| {
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() != 4 {
                    return Err(Error::Parse(format!("line {}: expected 4 columns", i + 2)));
                }
                let num = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))
                };
                Ok(RdPoint {
                    theta: num(cols[0])?,
                    distortion: num(cols[1])?,
                    rate: num(cols[2])?,
                })
            })
            .collect()
    }
}

/// `count` points geometrically spaced from `lo` to `hi`, endpoints exact.
pub(crate) fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..count)
        .map(|i| match i {
            0 => lo,
            i if i + 1 == count => hi,
            i => lo * (ratio * i as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}
