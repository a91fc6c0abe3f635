//! Real roots of low-degree polynomials on an interval.
//!
//! Roots are isolated recursively: the critical points of `p` (roots of `p'`)
//! split the interval into pieces on which `p` is monotone, and each piece
//! with a sign change holds exactly one root, found by bisection.

/// Horner evaluation, ascending coefficients.
pub(crate) fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Sorted real roots of `p` in `[lo, hi]`. Roots of even multiplicity are
/// reported only when they evaluate to exactly zero.
pub(crate) fn real_roots_in(p: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let degree = match p.iter().rposition(|&c| c != 0.0) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let p = &p[..=degree];
    match degree {
        0 => Vec::new(),
        1 => {
            let x = -p[0] / p[1];
            if (lo..=hi).contains(&x) {
                vec![x]
            } else {
                Vec::new()
            }
        }
        _ => {
            let mut knots = vec![lo];
            knots.extend(real_roots_in(&derivative(p), lo, hi));
            knots.push(hi);
            let mut roots: Vec<f64> = Vec::new();
            for pair in knots.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let (fa, fb) = (eval(p, a), eval(p, b));
                if fa == 0.0 {
                    roots.push(a);
                } else if fa.signum() != fb.signum() && fb != 0.0 {
                    roots.push(bisect(p, a, b, fa));
                }
            }
            if eval(p, hi) == 0.0 {
                roots.push(hi);
            }
            roots.dedup();
            roots
        }
    }
}

fn bisect(p: &[f64], mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = eval(p, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Monomial coefficients of `c_0 T_0(x) + c_1 T_1(x) + ... + c_d T_d(x)`.
pub(crate) fn chebyshev_to_monomial(c: &[f64]) -> Vec<f64> {
    let d = c.len();
    let mut out = vec![0.0; d];
    let mut t_prev = vec![1.0];
    let mut t_cur = vec![0.0, 1.0];
    for (k, &ck) in c.iter().enumerate() {
        let t = match k {
            0 => &t_prev,
            1 => &t_cur,
            _ => {
                // T_{k} = 2x T_{k-1} - T_{k-2}
                let mut next = vec![0.0; k + 1];
                for (i, &v) in t_cur.iter().enumerate() {
                    next[i + 1] += 2.0 * v;
                }
                for (i, &v) in t_prev.iter().enumerate() {
                    next[i] -= v;
                }
                t_prev = std::mem::replace(&mut t_cur, next);
                &t_cur
            }
        };
        for (i, &v) in t.iter().enumerate() {
            out[i] += ck * v;
        }
    }
    out
}
