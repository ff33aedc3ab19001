use std::fs;
use std::path::{Path, PathBuf};

use chrono::Utc;
use rydcoh_core::analysis::{fit, FitModel, FitResult, XyData};
use rydcoh_core::experiments::{preset, run_experiment, ExperimentConfig, ExperimentKind, ExperimentOutput};
use rydcoh_core::noise::EnsembleResult;

use crate::failure::{Failure, Outcome};
use crate::output::{float, Manifest, OutputDir};
use crate::plot;

pub struct RunArgs {
    pub kind: ExperimentKind,
    pub config: Option<PathBuf>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub out: PathBuf,
    pub plot: bool,
    pub fit: Option<String>,
}

/// Parses a JSON config, naming the offending key path on failure.
pub fn parse_config(text: &str) -> Outcome<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path.is_empty() || path == "." { "config".to_string() } else { path };
        Failure::field(&field, e.inner())
    })
}

fn load_config(args: &RunArgs) -> Outcome<ExperimentConfig> {
    match (&args.config, &args.preset) {
        (Some(_), Some(_)) => Err(Failure::Config("--config and --preset are mutually exclusive".into())),
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            parse_config(&text)
        }
        (None, Some(name)) => Ok(preset(name)?),
        (None, None) => Ok(ExperimentConfig::new(args.kind)),
    }
}

/// Loads, overrides and validates the configuration for `args.kind`.
pub fn resolve_config(args: &RunArgs) -> Outcome<ExperimentConfig> {
    let mut config = load_config(args)?;
    match config.kind {
        Some(k) if k != args.kind => {
            return Err(Failure::field("kind", format!("config is for `{k}` but the command runs `{}`", args.kind)))
        }
        _ => config.kind = Some(args.kind),
    }
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if let Some(shots) = args.shots {
        config.shots = Some(shots);
    }
    if let Some(model) = &args.fit {
        config.fit = Some(model.clone());
    }
    config.validate()?;
    Ok(config)
}

fn fit_model(config: &ExperimentConfig) -> Outcome<Option<FitModel>> {
    let Some(name) = &config.fit else { return Ok(None) };
    let model: FitModel = name.parse()?;
    // the ground detection efficiency is calibrated separately from the π-train
    Ok(Some(match (model, config.detection) {
        (FitModel::PiTrain { p1d: None }, Some(d)) => FitModel::PiTrain { p1d: Some(d.p1d) },
        (m, _) => m,
    }))
}

fn fit_primary(model: FitModel, primary: &EnsembleResult) -> Outcome<FitResult> {
    let data = XyData::from_ensemble(primary)?;
    fit(model, &data).map_err(|e| Failure::Numerical(e.to_string()))
}

fn extra_outputs(out: &mut OutputDir, manifest: &mut Manifest, output: &ExperimentOutput) -> Outcome<()> {
    match output {
        ExperimentOutput::Scan(_) => {}
        ExperimentOutput::ControlFringe(r) => {
            let mut rows = Vec::new();
            for (t, fringe) in r.contrast.scan_values.iter().zip(&r.fringes) {
                for k in 0..fringe.len() {
                    rows.push(vec![float(*t), float(fringe.scan_values[k]), float(fringe.mean_observable[k]), float(fringe.standard_error[k])]);
                }
            }
            out.write_csv("fringes.csv", &["rydberg_gap", "wait", "mean", "stderr"], rows)?;
            manifest.note("fringe_frequency_hz", r.fringe_frequency);
        }
        ExperimentOutput::Gate(r) => {
            let g = &r.nominal;
            manifest.note("nominal_fidelity", g.fidelity);
            manifest.note("nominal_error", g.error);
            manifest.note("optimized_fidelity", g.optimized_fidelity);
            manifest.note("leakage", g.leakage);
            manifest.note("phase_corrections", [g.phases.0, g.phases.1]);
            manifest.note("mean_error", r.error.mean_observable[0]);
            println!("nominal fidelity {:.9}, mean error {:.6e}", g.fidelity, r.error.mean_observable[0]);
        }
        ExperimentOutput::TemperatureSweep(r) => {
            let rows = r.points.iter().map(|p| {
                vec![float(p.temperature), float(p.t2_star), float(p.t2_star_sigma), float(p.mean_error), float(p.error_stderr)]
            });
            out.write_csv("temperature_sweep.csv", &["temperature", "t2_star", "t2_star_sigma", "mean_error", "error_stderr"], rows)?;
            manifest.note("error_law", r.error_law);
            manifest.note("t2_star_inverse_sqrt", serde_json::json!({"c": r.t2_scaling.0, "r_squared": r.t2_scaling.1}));
            manifest.note("error_vs_temperature", r.error_vs_temperature);
            println!(
                "error law coefficient {:.4} +- {:.4} (R2 {:.4}); T2* ~ c/sqrt(T) R2 {:.4}; E(T) linear R2 {:.4}",
                r.error_law.coefficient,
                r.error_law.standard_error,
                r.error_law.r_squared,
                r.t2_scaling.1,
                r.error_vs_temperature.r_squared
            );
        }
        ExperimentOutput::Bell(r) => {
            manifest.note("p00", r.p00);
            manifest.note("p11", r.p11);
            manifest.note("parity_contrast", r.parity_contrast);
            manifest.note("fidelity", r.fidelity);
            println!("Bell fidelity {:.6} (P00 {:.4}, P11 {:.4}, parity contrast {:.4})", r.fidelity, r.p00, r.p11, r.parity_contrast);
        }
    }
    Ok(())
}

pub fn cmd_run(args: &RunArgs) -> Outcome<PathBuf> {
    let started = Utc::now();
    let config = resolve_config(args)?;
    let seed = config.seed.unwrap_or(0);
    let shots = config.shots();
    let model = fit_model(&config)?;
    let canonical = serde_json::to_value(&config).map_err(|e| Failure::Config(e.to_string()))?;

    let output = run_experiment(&config, shots, seed)?;
    let primary = output.primary();

    let mut out = OutputDir::create(&args.out)?;
    let mut manifest = Manifest::new(format!("run {}", args.kind), canonical, started);
    manifest.seed = Some(seed);
    manifest.shots = Some(shots);
    manifest.note("scan_variable", args.kind.scan_variable());
    out.write_result(&primary)?;
    extra_outputs(&mut out, &mut manifest, &output)?;

    let fitted = match model {
        Some(m) => {
            let f = fit_primary(m, &primary)?;
            out.write_fit(&f)?;
            manifest.note("fit", &f);
            print_fit(&f);
            Some(f)
        }
        None => None,
    };
    if args.plot {
        let svg = plot::render(&primary, fitted.as_ref(), args.kind.scan_variable(), &args.kind.to_string());
        out.write("plot.svg", svg.as_bytes())?;
    }
    let path = out.finish(manifest)?;
    if let Some(f) = &fitted {
        check_converged(f)?;
    }
    Ok(path)
}

pub fn print_fit(f: &FitResult) {
    for ((n, v), s) in f.names.iter().zip(&f.params).zip(&f.sigmas) {
        println!("{n:>14} = {v:.6e} +- {s:.2e}");
    }
    if !f.flags.is_empty() {
        let flags: Vec<String> = f.flags.iter().map(|x| x.to_string()).collect();
        println!("{:>14}   {}", "flags", flags.join(", "));
    }
}

/// A fit that stopped without converging is reported after its outputs are
/// written.
pub fn check_converged(f: &FitResult) -> Outcome<()> {
    if f.converged {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("{} fit did not converge after {} iterations", f.model, f.iterations)))
    }
}

pub fn default_out() -> PathBuf {
    Path::new("rydcoh-out").to_path_buf()
}
