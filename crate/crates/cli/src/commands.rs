use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tvar_rd::curve::{CurveSource, RdCurve, ShapeReport};
use tvar_rd::spectral::{covariance_mc_check, moment_check_with_spectrum, weak_norm_check};
use tvar_rd::{
    build_phi, build_phi_inv, eigenvalues, finite_rd_curve, sample_spectrum, simulate,
    AsymptoticRd, CovarianceReport, MomentReport, TvarModel, WeakNormReport,
};

use crate::error::{CliError, EXIT_CONVERGENCE, EXIT_THRESHOLD, EXIT_VALIDATION};
use crate::manifest::{sha256_hex, sidecar_path, write_atomic, write_json, RunManifest};
use crate::{plot, Cli, Command, CurveArgs, Method, PlotArgs, SimulateArgs, SpectrumArgs, Units, VerifyArgs};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let out = cli
        .out
        .as_deref()
        .ok_or_else(|| CliError::bad_input("--out is required"))?;
    match &cli.command {
        Command::Curve(args) => curve(cli, &load_model(cli)?, args, out),
        Command::Verify(args) => verify(cli, &load_model(cli)?, args, out),
        Command::Simulate(args) => simulate_cmd(cli, &load_model(cli)?, args, out),
        Command::Spectrum(args) => spectrum(cli, &load_model(cli)?, args, out),
        Command::Plot(args) => plot_cmd(cli, args, out),
    }
}

fn load_model(cli: &Cli) -> Result<TvarModel, CliError> {
    let path = cli
        .model
        .as_deref()
        .ok_or_else(|| CliError::bad_input("--model is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))?;
    TvarModel::from_json(&text).map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))
}

fn note(cli: &Cli, message: std::fmt::Arguments<'_>) {
    if !cli.quiet {
        eprintln!("{message}");
    }
}

#[derive(Serialize)]
struct CurveSettings<'a> {
    #[serde(flatten)]
    args: &'a CurveArgs,
    units: Units,
}

#[derive(Serialize)]
struct CurveSidecar<'a> {
    manifest: RunManifest,
    source: &'a CurveSource,
    source_tag: String,
    n: Option<usize>,
    points: usize,
    d_max: f64,
    shape: ShapeReport,
    warnings: &'a [String],
}

fn curve(cli: &Cli, model: &TvarModel, args: &CurveArgs, out: &Path) -> Result<(), CliError> {
    let curve = match args.method {
        Method::Finite => {
            let n = args
                .n
                .ok_or_else(|| CliError::bad_input("--method finite needs --n"))?;
            finite_rd_curve(model, n, args.points)?
        }
        Method::Asymptotic => {
            AsymptoticRd::with_floor(model, args.quad.config(), args.g_floor)?.curve(args.points)?
        }
    };
    let n = match curve.source {
        CurveSource::FiniteN { n } => Some(n),
        CurveSource::Asymptotic { .. } => None,
    };
    let sidecar = CurveSidecar {
        manifest: RunManifest::new(
            "curve",
            Some(model),
            CurveSettings {
                args,
                units: cli.units,
            },
        ),
        source: &curve.source,
        source_tag: curve.source.to_string(),
        n,
        points: curve.points.len(),
        d_max: curve.d_max,
        shape: curve.check_shape(),
        warnings: &curve.warnings,
    };
    write_atomic(out, curve.to_csv().as_bytes())?;
    write_json(&sidecar_path(out), &sidecar)?;
    note(
        cli,
        format_args!(
            "{}: {} points, d_max = {:e}, R(D_min) = {:e} {}",
            curve.source,
            curve.points.len(),
            curve.d_max,
            cli.units.convert(curve.points[0].rate),
            cli.units.label()
        ),
    );
    if !sidecar.shape.passed() {
        note(cli, format_args!("shape check: {:?}", sidecar.shape.violations));
    }
    if !curve.warnings.is_empty() {
        return Err(CliError::new(
            EXIT_CONVERGENCE,
            format!("curve written, but {} point(s) did not converge: {}", curve.warnings.len(), curve.warnings.join("; ")),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    manifest: RunManifest,
    moments: Vec<MomentReport>,
    weak_norm: Vec<WeakNormReport>,
    covariance: Option<CovarianceReport>,
    max_rel_err: f64,
    /// Whether every `rel_err` shrinks (weakly) as `n` grows, per `k`.
    non_increasing_in_n: bool,
    passed: bool,
}

fn verify(cli: &Cli, model: &TvarModel, args: &VerifyArgs, out: &Path) -> Result<(), CliError> {
    if args.n.is_empty() || args.k.is_empty() {
        return Err(CliError::bad_input("--n and --k need at least one value"));
    }
    let quad = args.quad.config();
    let mut ns = args.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut moments = Vec::new();
    let mut weak_norm = Vec::new();
    for &n in &ns {
        let spectrum = eigenvalues(&build_phi_inv(model, n)?)?;
        for &k in &args.k {
            moments.push(moment_check_with_spectrum(model, &spectrum, k, &quad)?);
        }
        weak_norm.push(weak_norm_check(model, n, &quad)?);
    }
    let covariance = match args.mc_paths {
        0 => None,
        paths => Some(covariance_mc_check(model, args.mc_n, paths, cli.seed)?),
    };
    let non_increasing_in_n = args.k.iter().all(|&k| {
        let errs: Vec<f64> = moments.iter().filter(|m| m.k == k).map(|m| m.rel_err).collect();
        errs.windows(2).all(|w| w[1] <= w[0])
    });
    let passed = moments.iter().all(|m| m.rel_err <= args.max_rel_err)
        && weak_norm.iter().all(|w| w.rel_err <= args.max_rel_err)
        && covariance.as_ref().is_none_or(|c| c.passed);
    #[derive(Serialize)]
    struct Settings<'a> {
        #[serde(flatten)]
        args: &'a VerifyArgs,
        seed: u64,
    }
    let report = VerifyReport {
        manifest: RunManifest::new(
            "verify",
            Some(model),
            Settings {
                args,
                seed: cli.seed,
            },
        ),
        moments,
        weak_norm,
        covariance,
        max_rel_err: args.max_rel_err,
        non_increasing_in_n,
        passed,
    };
    write_json(out, &report)?;
    let worst = report.moments.iter().map(|m| m.rel_err).fold(0.0, f64::max);
    note(cli, format_args!("largest moment rel_err = {worst:e}"));
    if passed {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_THRESHOLD,
            format!("verification threshold {} exceeded (report written)", args.max_rel_err),
        ))
    }
}

fn simulate_cmd(cli: &Cli, model: &TvarModel, args: &SimulateArgs, out: &Path) -> Result<(), CliError> {
    let paths = simulate(model, args.n, args.paths, cli.seed)?;
    let mut csv = String::with_capacity(24 * args.n * (args.paths + 1));
    for t in 1..=args.n {
        if t > 1 {
            csv.push(',');
        }
        write!(csv, "x{t}").unwrap();
    }
    csv.push('\n');
    for path in paths.paths() {
        for (t, x) in path.iter().enumerate() {
            if t > 0 {
                csv.push(',');
            }
            write!(csv, "{x:e}").unwrap();
        }
        csv.push('\n');
    }
    #[derive(Serialize)]
    struct Settings<'a> {
        #[serde(flatten)]
        args: &'a SimulateArgs,
        seed: u64,
        generator: &'static str,
    }
    let manifest = RunManifest::new(
        "simulate",
        Some(model),
        Settings {
            args,
            seed: cli.seed,
            generator: "chacha8, stream per path index, StandardNormal",
        },
    );
    write_atomic(out, csv.as_bytes())?;
    write_json(&sidecar_path(out), &manifest)?;
    note(cli, format_args!("{} path(s) of length {}", args.paths, args.n));
    Ok(())
}

#[derive(Serialize)]
struct SpectrumSummary {
    manifest: RunManifest,
    grid: (usize, usize),
    g_min: f64,
    g_max: f64,
    argmin: (f64, f64),
    argmax: (f64, f64),
    g_floor: f64,
    passed: bool,
    exports: Vec<String>,
}

fn spectrum(cli: &Cli, model: &TvarModel, args: &SpectrumArgs, out: &Path) -> Result<(), CliError> {
    let grid = sample_spectrum(model, args.nr, args.nw)?;
    let mut csv = String::with_capacity(48 * grid.values.len());
    csv.push_str("r,omega,g\n");
    for (i, &r) in grid.r_nodes.iter().enumerate() {
        for (j, &w) in grid.omega_nodes.iter().enumerate() {
            writeln!(csv, "{r:e},{w:e},{:e}", grid.get(i, j)).unwrap();
        }
    }
    let mut exports = Vec::new();
    let mut pending: Vec<(PathBuf, String)> = Vec::new();
    if let Some(n) = args.export_n {
        let band = out.with_extension("phi_inv.txt");
        let dense = out.with_extension("phi.csv");
        pending.push((band.clone(), build_phi_inv(model, n)?.to_band_text(model.noise_variance())));
        pending.push((dense.clone(), build_phi(model, n)?.to_csv()));
        exports = [band, dense]
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
    }
    let passed = grid.g_min >= args.g_floor;
    let summary = SpectrumSummary {
        manifest: RunManifest::new("spectrum", Some(model), args),
        grid: (args.nr, args.nw),
        g_min: grid.g_min,
        g_max: grid.g_max,
        argmin: grid.argmin,
        argmax: grid.argmax,
        g_floor: args.g_floor,
        passed,
        exports,
    };
    write_atomic(out, csv.as_bytes())?;
    for (path, text) in &pending {
        write_atomic(path, text.as_bytes())?;
    }
    write_json(&sidecar_path(out), &summary)?;
    note(cli, format_args!("g_min = {:e} at {:?}, g_max = {:e} at {:?}", grid.g_min, grid.argmin, grid.g_max, grid.argmax));
    if passed {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_VALIDATION,
            format!("g_min = {:e} is below the floor {:e}", grid.g_min, args.g_floor),
        ))
    }
}

fn plot_cmd(cli: &Cli, args: &PlotArgs, out: &Path) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Input {
        file: String,
        sha256: String,
        model_hash: Option<String>,
    }
    let mut series = Vec::new();
    let mut inputs = Vec::new();
    for path in &args.curves {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))?;
        let points = RdCurve::points_from_csv(&text)
            .map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))?;
        let file = path.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned());
        let sidecar: Option<serde_json::Value> = std::fs::read_to_string(sidecar_path(path))
            .ok()
            .and_then(|s| serde_json::from_str(&s).ok());
        let tag = sidecar
            .as_ref()
            .and_then(|v| v.get("source_tag")?.as_str().map(str::to_string));
        let model_hash = sidecar
            .as_ref()
            .and_then(|v| v.pointer("/manifest/model_hash")?.as_str().map(str::to_string));
        let legend = tag.unwrap_or_else(|| {
            path.file_stem().map_or_else(|| file.clone(), |s| s.to_string_lossy().into_owned())
        });
        inputs.push(Input {
            file,
            sha256: sha256_hex(text.as_bytes()),
            model_hash,
        });
        series.push(plot::Series { legend, points });
    }
    #[derive(Serialize)]
    struct Settings<'a> {
        title: &'a Option<String>,
        units: Units,
        inputs: Vec<Input>,
    }
    let manifest = RunManifest::new(
        "plot",
        None,
        Settings {
            title: &args.title,
            units: cli.units,
            inputs,
        },
    );
    let svg = plot::render(&series, cli.units, args.title.as_deref(), &manifest);
    write_atomic(out, svg.as_bytes())?;
    note(cli, format_args!("{} curve(s) plotted", series.len()));
    Ok(())
}
