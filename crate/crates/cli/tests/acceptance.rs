//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! Runs without the libtest harness so the summary is always printed.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use tvar_rd::finite_rd::finite_theta_for_distortion;
use tvar_rd::matrices::{build_a, build_phi_inv, entry_phi_inv};
use tvar_rd::spectral::{covariance_mc_check, moment_check};
use tvar_rd::{
    asymptotic_rate_at_distortion, eigenvalues, finite_rate_at_distortion, finite_rd_curve,
    finite_rate_at_distortion_from_spectrum, finite_rd_point, stationary_rd_point, trace_phi, ArSpectrum, AsymptoticRd, Polynomial,
    QuadConfig, TvarModel,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ar1() -> TvarModel {
    TvarModel::constant(1.0, &[-0.9]).unwrap()
}

fn affine() -> TvarModel {
    TvarModel::new("affine", 1.0, vec![Polynomial::new(vec![-0.5, -0.4])]).unwrap()
}

fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.2?}, limit {limit:?}"))
}

fn white_noise_closed_form() -> Outcome {
    let start = Instant::now();
    let m = TvarModel::white_noise(1.0).unwrap();
    let quad = QuadConfig::default();
    let rd = AsymptoticRd::new(&m, quad).map_err(|e| e.to_string())?;
    let spectra = [16, 256]
        .map(|n| build_phi_inv(&m, n).and_then(|g| eigenvalues(&g)).map_err(|e| e.to_string()));
    let mut worst: f64 = 0.0;
    for d in geometric(1e-3, 1.0, 32) {
        let want = (0.5 * (1.0 / d).ln()).max(0.0);
        for s in &spectra {
            let s = s.as_ref().map_err(|e| e.clone())?;
            let r = finite_rate_at_distortion_from_spectrum(s, d).map_err(|e| e.to_string())?.rate;
            worst = worst.max((r - want).abs());
        }
        let r = rd.rate_at_distortion(d).map_err(|e| e.to_string())?.point.rate;
        worst = worst.max((r - want).abs());
    }
    ensure(worst <= 1e-6, format!("max |R - max(0, ln(1/D)/2)| = {worst:e}"))?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("max error {worst:e} over 32 D values, N in {{16, 256}} and N -> inf"))
}

fn stationary_reduction() -> Outcome {
    let start = Instant::now();
    let m = ar1();
    let quad = QuadConfig::default();
    let rd = AsymptoticRd::new(&m, quad).map_err(|e| e.to_string())?;
    let s = ArSpectrum::new(&m).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for theta in geometric(1e-3, rd.theta_ceiling(), 16) {
        let a = rd.point(theta).map_err(|e| e.to_string())?.point;
        let b = stationary_rd_point(&s, theta, &quad).map_err(|e| e.to_string())?.point;
        worst = worst.max((a.distortion - b.distortion).abs()).max((a.rate - b.rate).abs());
    }
    ensure(worst <= 1e-10, format!("max deviation {worst:e}"))?;
    within(Duration::from_secs(5), start)?;
    Ok(format!("max |delta D|, |delta R| = {worst:e} at 16 theta values"))
}

fn low_distortion_ar1() -> Outcome {
    let start = Instant::now();
    let p = asymptotic_rate_at_distortion(&ar1(), 0.05, &QuadConfig::default()).map_err(|e| e.to_string())?;
    let want = 0.5 * (1.0f64 / 0.05).ln();
    let err = (p.point.rate - want).abs();
    ensure(err <= 2e-4, format!("R(0.05) = {}, want {want}", p.point.rate))?;
    within(Duration::from_secs(5), start)?;
    Ok(format!("R(0.05) = {:.12} nats, error {err:e}", p.point.rate))
}

fn d_max_oracle() -> Outcome {
    let m = ar1();
    let want = 1.0 / (1.0 - 0.81);
    let got = tvar_rd::d_max(&m, &QuadConfig::default()).map_err(|e| e.to_string())?.value[0];
    let rel = (got - want).abs() / want;
    ensure(rel <= 1e-4, format!("d_max = {got}, want {want}"))?;
    let trace = trace_phi(&m, 4096).map_err(|e| e.to_string())? / 4096.0;
    let rel_trace = (got - trace).abs() / trace;
    ensure(rel_trace <= 1e-2, format!("d_max = {got}, trace average {trace}"))?;
    Ok(format!("d_max = {got:.9} (rel err {rel:e}); trace(Phi)/N at 4096 = {trace:.6} (rel gap {rel_trace:e})"))
}

/// Gaps at or below this are rounding noise around an exact zero.
const GAP_NOISE: f64 = 1e-12;
const LADDER: [usize; 5] = [128, 256, 512, 1024, 2048];
/// Achieved gaps at D = 0.5 along the ladder, from the finite-N solver and an
/// independent high-accuracy evaluation of the asymptotic rate.
const PINNED_GAPS_HALF: [f64; 5] = [
    5.253523603293564e-05,
    2.651397058595073e-05,
    1.3318335065071185e-05,
    6.672465770130032e-06,
    3.337569398798035e-06,
];

fn finite_to_asymptotic() -> Outcome {
    let start = Instant::now();
    let m = affine();
    let quad = QuadConfig::default();
    let mut summary = Vec::new();
    for d in [0.1, 0.25, 0.5] {
        let limit = asymptotic_rate_at_distortion(&m, d, &quad).map_err(|e| e.to_string())?.point.rate;
        let mut gaps = Vec::new();
        for n in LADDER {
            let r = finite_rate_at_distortion(&m, n, d).map_err(|e| e.to_string())?.rate;
            gaps.push((r - limit).abs());
        }
        let rises = gaps.windows(2).filter(|w| w[1] > w[0] && w[1] > GAP_NOISE).count();
        ensure(rises <= 1, format!("D = {d}: gaps {gaps:?} rise {rises} times"))?;
        ensure(gaps[4] <= 0.01, format!("D = {d}: gap at 2048 is {}", gaps[4]))?;
        if d == 0.5 {
            for (g, p) in gaps.iter().zip(PINNED_GAPS_HALF) {
                ensure((g - p).abs() <= 2e-7, format!("D = 0.5: gap {g:e}, pinned {p:e}"))?;
            }
        } else {
            ensure(gaps.iter().all(|&g| g <= GAP_NOISE), format!("D = {d}: gaps {gaps:?} should vanish"))?;
        }
        summary.push(format!("D={d}: gap(2048) = {:e}", gaps[4]));
    }
    within(Duration::from_secs(120), start)?;
    Ok(summary.join(", "))
}

fn moments() -> Outcome {
    let quad = QuadConfig::default();
    let mut rels = Vec::new();
    for k in [1, 2] {
        let r = moment_check(&affine(), 2048, k, &quad).map_err(|e| e.to_string())?;
        ensure(r.rel_err <= 1e-2, format!("k = {k}: rel_err {}", r.rel_err))?;
        rels.push(r.rel_err);
    }
    let c: f64 = -0.9;
    let ramp = TvarModel::new("ramp", 1.0, vec![Polynomial::new(vec![0.0, c])]).unwrap();
    let r = moment_check(&ramp, 64, 1, &quad).map_err(|e| e.to_string())?;
    let want = 1.0 + c * c / 3.0;
    let err = (r.integral - want).abs();
    ensure(err <= 1e-8, format!("ramp k=1 integral {} vs {want}", r.integral))?;
    Ok(format!("rel_err k=1: {:e}, k=2: {:e}; ramp integral error {err:e}", rels[0], rels[1]))
}

fn structure() -> Outcome {
    let models = [
        ar1(),
        TvarModel::new(
            "m2",
            1.3,
            vec![Polynomial::new(vec![0.2, 0.5]), Polynomial::new(vec![-0.3])],
        )
        .unwrap(),
        TvarModel::new(
            "m3",
            0.7,
            vec![
                Polynomial::new(vec![-0.5, 0.2]),
                Polynomial::new(vec![0.3, 0.0, -0.1]),
                Polynomial::new(vec![0.0, -0.1]),
            ],
        )
        .unwrap(),
    ];
    let n = 64;
    let mut worst: f64 = 0.0;
    for m in &models {
        let order = m.order();
        let a = build_a(m, n).map_err(|e| e.to_string())?;
        ensure(a.det() == 1.0, format!("M = {order}: det A = {}", a.det()))?;
        let g = build_phi_inv(m, n).map_err(|e| e.to_string())?;
        let dense = g.to_dense();
        for mu in 1..=n {
            for nu in 1..=n {
                let b = dense.get(mu, nu);
                if mu.abs_diff(nu) > order {
                    ensure(b == 0.0, format!("M = {order}: entry ({mu}, {nu}) = {b}"))?;
                }
                let e = entry_phi_inv(m, n, mu, nu).map_err(|e| e.to_string())?;
                if e != b {
                    let rel = (e - b).abs() / b.abs().max(e.abs());
                    worst = worst.max(rel);
                }
            }
        }
    }
    ensure(worst <= 1e-12, format!("largest relative entry mismatch {worst:e}"))?;
    Ok(format!("det A = 1, zero outside band, entry mismatch <= {worst:e} for M in {{1, 2, 3}}"))
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let r = covariance_mc_check(&ar1(), 8, 200_000, 20_240_601).map_err(|e| e.to_string())?;
    ensure(r.max_abs_dev <= 0.05, format!("max-abs deviation {} at {:?}", r.max_abs_dev, r.worst_entry))?;
    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "max-abs deviation {:.4} at {:?} (max z {:.2})",
        r.max_abs_dev, r.worst_entry, r.max_z
    ))
}

fn curve_shape() -> Outcome {
    let quad = QuadConfig::default();
    let models = [
        TvarModel::white_noise(2.0).unwrap(),
        ar1(),
        affine(),
        TvarModel::new("ramp", 1.0, vec![Polynomial::new(vec![0.0, -0.9])]).unwrap(),
        TvarModel::new(
            "m2",
            1.3,
            vec![Polynomial::new(vec![0.2, 0.5]), Polynomial::new(vec![-0.2])],
        )
        .unwrap(),
    ];
    let mut checked = 0;
    let mut worst_theta: f64 = 0.0;
    let mut worst_d: f64 = 0.0;
    for m in &models {
        let finite = finite_rd_curve(m, 256, 48).map_err(|e| e.to_string())?;
        let rd = AsymptoticRd::new(m, quad).map_err(|e| e.to_string())?;
        let asym = rd.curve(48).map_err(|e| e.to_string())?;
        for c in [&finite, &asym] {
            let rep = c.check_shape();
            ensure(rep.passed(), format!("{} / {}: {:?}", m.name(), c.source, rep.violations))?;
            ensure(c.warnings.is_empty(), format!("{} / {}: {:?}", m.name(), c.source, c.warnings))?;
            checked += 1;
        }

        let spectrum = eigenvalues(&build_phi_inv(m, 256).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let top = 1.0 / spectrum.min();
        for theta in geometric(1e-3 / spectrum.max(), top, 12).into_iter().take(11) {
            let d = finite_rd_point(&spectrum, theta).map_err(|e| e.to_string())?.distortion;
            let back = finite_theta_for_distortion(&spectrum, d).map_err(|e| e.to_string())?;
            worst_theta = worst_theta.max((back - theta).abs() / theta.max(1.0));
        }
        for theta in geometric(1e-2 / rd.validation().sup_g, 0.9 / rd.validation().inf_g, 6) {
            let d = rd.point(theta).map_err(|e| e.to_string())?.point.distortion;
            let p = rd.rate_at_distortion(d).map_err(|e| e.to_string())?;
            worst_d = worst_d.max((p.point.distortion - d).abs());
            worst_theta = worst_theta.max((p.point.theta - theta).abs() / theta.max(1.0));
        }
    }
    ensure(worst_theta <= 1e-8, format!("theta round trip error {worst_theta:e}"))?;
    ensure(worst_d <= 1e-8, format!("D round trip error {worst_d:e}"))?;
    Ok(format!("{checked} curves pass; round trip errors theta {worst_theta:e}, D {worst_d:e}"))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_tvar-rd"))
        .args(args)
        .current_dir(dir)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), format!("tvar-rd {args:?} exited with {status}"))
}

fn determinism() -> Outcome {
    let model = r#"{"name":"affine","order":1,"noise_variance":1.0,"coeffs":[[-0.5,-0.4]]}"#;
    let runs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let files = [
        "asym.csv", "asym.json", "fin.csv", "fin.json", "verify.json", "paths.csv", "paths.json",
        "g.csv", "g.json", "plot.svg",
    ];
    for dir in &runs {
        let d = dir.path();
        std::fs::write(d.join("model.json"), model).unwrap();
        let m = ["--quiet", "--model", "model.json"];
        run_cli(d, &[&m[..], &["curve", "--out", "asym.csv", "--points", "24"]].concat())?;
        run_cli(d, &[&m[..], &["curve", "--method", "finite", "--n", "256", "--out", "fin.csv"]].concat())?;
        run_cli(d, &[&m[..], &["verify", "--n", "128,256", "--mc-paths", "2000", "--out", "verify.json"]].concat())?;
        run_cli(d, &[&m[..], &["simulate", "--n", "16", "--paths", "50", "--seed", "9", "--out", "paths.csv"]].concat())?;
        run_cli(d, &[&m[..], &["spectrum", "--nr", "33", "--nw", "65", "--out", "g.csv"]].concat())?;
        run_cli(d, &["--quiet", "plot", "fin.csv", "asym.csv", "--out", "plot.svg"])?;
    }
    for f in files {
        let a = std::fs::read(runs[0].path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        let b = std::fs::read(runs[1].path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        ensure(a == b, format!("{f} differs between runs"))?;
    }
    Ok(format!("{} output files byte-identical across two runs", files.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("white-noise closed form", white_noise_closed_form),
        ("stationary reduction identity", stationary_reduction),
        ("low-distortion AR(1) rate", low_distortion_ar1),
        ("d_max oracle", d_max_oracle),
        ("finite-N to asymptotic convergence", finite_to_asymptotic),
        ("eigenvalue moments", moments),
        ("structure checks", structure),
        ("Monte-Carlo covariance", monte_carlo),
        ("curve shape and inversion", curve_shape),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let t = start.elapsed();
        match outcome {
            Ok(msg) => println!("PASS criterion {:>2} {name} [{t:.2?}]: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name} [{t:.2?}]: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
