use std::f64::consts::PI;

use proptest::prelude::*;
use tvar_rd::finite_rd::finite_theta_for_distortion;
use tvar_rd::{
    build_phi, build_phi_inv, entry_phi_inv, finite_rd_point, simulate, AsymptoticRd,
    EigenSpectrum, Polynomial, QuadConfig, TvarModel,
};

/// Models of order 0..=3 with coefficients small enough that `sum |a_m| < 1`,
/// so `g` stays away from zero.
fn stable_model() -> impl Strategy<Value = TvarModel> {
    (0usize..=3, 0.1f64..4.0)
        .prop_flat_map(|(order, var)| {
            (
                Just(var),
                prop::collection::vec(prop::collection::vec(-0.15f64..0.15, 1..=3), order),
            )
        })
        .prop_map(|(var, coeffs)| {
            TvarModel::new("p", var, coeffs.into_iter().map(Polynomial::new).collect()).unwrap()
        })
}

fn any_model() -> impl Strategy<Value = TvarModel> {
    (0usize..=3, 0.1f64..4.0)
        .prop_flat_map(|(order, var)| {
            (
                Just(var),
                prop::collection::vec(prop::collection::vec(-1.5f64..1.5, 1..=3), order),
            )
        })
        .prop_map(|(var, coeffs)| {
            TvarModel::new("p", var, coeffs.into_iter().map(Polynomial::new).collect()).unwrap()
        })
}

fn scaled(m: &TvarModel, s: f64) -> TvarModel {
    TvarModel::new("s", m.noise_variance() * s, m.trajectories().to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn g_is_even_and_bounded(m in any_model(), r in 0.0f64..=1.0, w in -PI..=PI) {
        let g = m.eval_g(r, w).unwrap();
        prop_assert!((g - m.eval_g(r, -w).unwrap()).abs() <= 1e-12 * (1.0 + g));
        prop_assert!(g >= 0.0);
        prop_assert!(g <= m.g_bound(r) * (1.0 + 1e-12));
    }

    #[test]
    fn g_scales_inversely_with_noise_variance(m in any_model(), s in 0.1f64..10.0, r in 0.0f64..=1.0, w in -PI..=PI) {
        let g = m.eval_g(r, w).unwrap();
        let gs = scaled(&m, s).eval_g(r, w).unwrap();
        prop_assert!((gs - g / s).abs() <= 1e-12 * (1.0 + g / s));
    }

    #[test]
    fn inverse_covariance_is_symmetric_and_banded(m in any_model(), n in 1usize..24) {
        let g = build_phi_inv(&m, n).unwrap();
        for mu in 1..=n {
            for nu in 1..=n {
                let e = entry_phi_inv(&m, n, mu, nu).unwrap();
                prop_assert_eq!(e, entry_phi_inv(&m, n, nu, mu).unwrap());
                if mu.abs_diff(nu) > m.order() {
                    prop_assert_eq!(e, 0.0);
                    prop_assert_eq!(g.get(mu, nu), 0.0);
                } else {
                    prop_assert!((e - g.get(mu, nu)).abs() <= 1e-12 * e.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn covariance_inverts_inverse_covariance(m in stable_model(), n in 1usize..32) {
        let phi = build_phi(&m, n).unwrap();
        let g = build_phi_inv(&m, n).unwrap();
        prop_assert!(phi.mul_band(&g).max_abs_dev_from_identity() <= 1e-10);
    }

    #[test]
    fn finite_point_ignores_eigenvalue_order(
        mut v in prop::collection::vec(0.05f64..20.0, 2..40),
        frac in 0.01f64..1.0,
    ) {
        let a = EigenSpectrum::from_values(v.clone()).unwrap();
        v.reverse();
        let b = EigenSpectrum::from_values(v).unwrap();
        let theta = frac / a.min();
        let (pa, pb) = (finite_rd_point(&a, theta).unwrap(), finite_rd_point(&b, theta).unwrap());
        prop_assert!((pa.distortion - pb.distortion).abs() <= 1e-14 * pa.distortion);
        prop_assert!((pa.rate - pb.rate).abs() <= 1e-14 * (1.0 + pa.rate));
    }

    #[test]
    fn finite_curve_is_monotone_in_theta(
        v in prop::collection::vec(0.05f64..20.0, 1..40),
        t in prop::collection::vec(1e-3f64..30.0, 2..20),
    ) {
        let s = EigenSpectrum::from_values(v).unwrap();
        let mut t = t;
        t.sort_by(f64::total_cmp);
        let pts: Vec<_> = t.iter().map(|&th| finite_rd_point(&s, th).unwrap()).collect();
        for w in pts.windows(2) {
            prop_assert!(w[1].distortion >= w[0].distortion);
            prop_assert!(w[1].rate <= w[0].rate);
        }
    }

    #[test]
    fn finite_inversion_round_trips(v in prop::collection::vec(0.05f64..20.0, 1..40), frac in 0.001f64..0.999) {
        let s = EigenSpectrum::from_values(v).unwrap();
        let theta = frac / s.min();
        let d = finite_rd_point(&s, theta).unwrap().distortion;
        let back = finite_theta_for_distortion(&s, d).unwrap();
        prop_assert!((back - theta).abs() <= 1e-10 * theta.max(1.0), "{} vs {}", back, theta);
    }

    #[test]
    fn finite_distortion_scales_with_noise_variance(m in stable_model(), s in 0.2f64..5.0, frac in 0.01f64..1.0) {
        let n = 24;
        let a = tvar_rd::eigenvalues(&build_phi_inv(&m, n).unwrap()).unwrap();
        let b = tvar_rd::eigenvalues(&build_phi_inv(&scaled(&m, s), n).unwrap()).unwrap();
        let theta = frac / a.min();
        let pa = finite_rd_point(&a, theta).unwrap();
        let pb = finite_rd_point(&b, s * theta).unwrap();
        prop_assert!((pb.distortion - s * pa.distortion).abs() <= 1e-10 * s * pa.distortion);
        prop_assert!((pb.rate - pa.rate).abs() <= 1e-10 * (1.0 + pa.rate));
    }

    #[test]
    fn simulation_partitions_by_path(m in stable_model(), seed in any::<u64>(), k in 1usize..6, extra in 0usize..4) {
        let few = simulate(&m, 9, k, seed).unwrap();
        let more = simulate(&m, 9, k + extra, seed).unwrap();
        prop_assert_eq!(&few.data[..], &more.data[..few.data.len()]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn asymptotic_point_scales_with_noise_variance(m in stable_model(), s in 0.2f64..5.0, frac in 0.05f64..1.2) {
        let quad = QuadConfig::default();
        let a = AsymptoticRd::new(&m, quad).unwrap();
        let ms = scaled(&m, s);
        let b = AsymptoticRd::new(&ms, quad).unwrap();
        let theta = frac / a.validation().inf_g;
        let pa = a.point(theta).unwrap();
        let pb = b.point(s * theta).unwrap();
        prop_assert!((pb.point.distortion - s * pa.point.distortion).abs() <= 1e-9 * s * pa.point.distortion);
        prop_assert!((pb.point.rate - pa.point.rate).abs() <= 1e-9 * (1.0 + pa.point.rate));
    }

    #[test]
    fn asymptotic_point_is_monotone(m in stable_model(), f1 in 0.01f64..1.2, f2 in 0.01f64..1.2) {
        let a = AsymptoticRd::new(&m, QuadConfig::default()).unwrap();
        let (lo, hi) = (f1.min(f2) / a.validation().inf_g, f1.max(f2) / a.validation().inf_g);
        let (p, q) = (a.point(lo).unwrap(), a.point(hi).unwrap());
        let slack_d = 10.0 * (p.distortion_err + q.distortion_err);
        let slack_r = 10.0 * (p.rate_err + q.rate_err);
        prop_assert!(q.point.distortion >= p.point.distortion - slack_d);
        prop_assert!(q.point.rate <= p.point.rate + slack_r);
    }

    #[test]
    fn low_water_level_gives_distortion_theta(m in stable_model(), frac in 0.01f64..1.0) {
        let a = AsymptoticRd::new(&m, QuadConfig::default()).unwrap();
        // the validation grid maximum can sit below the true supremum; stay clear of it
        let theta = 0.9 * frac / m.trajectories().iter().fold(1.0, |acc, p| {
            acc + p.coefficients().iter().map(|c| c.abs()).sum::<f64>()
        }).powi(2) * m.noise_variance();
        let p = a.point(theta).unwrap();
        prop_assert!((p.point.distortion - theta).abs() <= 4.0 * f64::EPSILON * theta);
    }

    #[test]
    fn doubling_panels_stays_within_error_estimate(m in stable_model(), frac in 0.05f64..1.0) {
        let quad = QuadConfig::default();
        let a = AsymptoticRd::new(&m, quad).unwrap();
        let b = AsymptoticRd::new(&m, quad.doubled()).unwrap();
        let theta = frac / a.validation().inf_g;
        let (p, q) = (a.point(theta).unwrap(), b.point(theta).unwrap());
        // rounding allowance only
        let eps = 64.0 * f64::EPSILON;
        prop_assert!(
            (p.point.distortion - q.point.distortion).abs() <= p.distortion_err + eps * p.point.distortion,
            "D {:?} vs {:?}", p, q
        );
        prop_assert!((p.point.rate - q.point.rate).abs() <= p.rate_err + eps * (1.0 + p.point.rate), "R {:?} vs {:?}", p, q);
    }
}
