//! Canned pulse-sequence experiments.
//!
//! Each experiment takes an [`ExperimentConfig`], the number of shots and a
//! seed, draws per-shot noise, evolves the pulse schedule and returns shot
//! averages. [`run_experiment`] dispatches on the configured kind.

mod config;
mod gate;
mod presets;
mod single;

pub use config::{
    DetectionConfig, DriveConfig, ExperimentConfig, ExperimentKind, GateConfig, NoiseConfig, Observable, QuantityInput,
    ScanSpec, SequenceConfig, Transition,
};
pub use gate::{
    calibrate_phases, cz_fidelity, cz_fidelity_optimized, project, ramsey_probe_config, run_bell_sequence, run_cz_detuning_scan,
    run_cz_gate, run_cz_temperature_sweep, BellResult, CzGateResult, CzSchedule, GateOutcome, TemperaturePoint,
    TemperatureSweepResult, COMPUTATIONAL,
};
pub use presets::{preset, PRESET_NAMES};
pub use single::{
    pi_train_rydberg_population, run_control_fringe, run_gr_ramsey, run_ground_ramsey, run_pi_train, run_rabi_scan,
    run_spin_echo, run_t1_two_pi, ControlFringeResult,
};

use crate::atoms::detection_model;
use crate::engine::{expm, CMatrix, CVector, C64};
use crate::error::{Error, Result};
use crate::noise::{EnsembleResult, NoiseSpec};

/// Output of any experiment kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentOutput {
    Scan(EnsembleResult),
    ControlFringe(ControlFringeResult),
    Gate(CzGateResult),
    TemperatureSweep(TemperatureSweepResult),
    Bell(BellResult),
}

impl ExperimentOutput {
    /// The headline curve: the scan itself, contrast vs T, gate error,
    /// error vs temperature, or the parity fringe.
    pub fn primary(&self) -> EnsembleResult {
        match self {
            ExperimentOutput::Scan(r) => r.clone(),
            ExperimentOutput::ControlFringe(r) => r.contrast.clone(),
            ExperimentOutput::Gate(r) => r.error.clone(),
            ExperimentOutput::TemperatureSweep(r) => r.error_curve(),
            ExperimentOutput::Bell(r) => r.parity.clone(),
        }
    }
}

/// Runs the configured experiment.
pub fn run_experiment(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<ExperimentOutput> {
    Ok(match config.kind()? {
        ExperimentKind::RabiGr => ExperimentOutput::Scan(run_rabi_scan(config, n_shots, seed)?),
        ExperimentKind::GroundRamsey => ExperimentOutput::Scan(run_ground_ramsey(config, n_shots, seed)?),
        ExperimentKind::RamseyGr => ExperimentOutput::Scan(run_gr_ramsey(config, n_shots, seed)?),
        ExperimentKind::SpinEcho => ExperimentOutput::Scan(run_spin_echo(config, n_shots, seed)?),
        ExperimentKind::T1 => ExperimentOutput::Scan(run_t1_two_pi(config, n_shots, seed)?),
        ExperimentKind::PiTrain => ExperimentOutput::Scan(run_pi_train(config, n_shots, seed)?),
        ExperimentKind::ControlFringe => ExperimentOutput::ControlFringe(run_control_fringe(config, n_shots, seed)?),
        ExperimentKind::CzGate => ExperimentOutput::Gate(run_cz_gate(config, n_shots, seed)?),
        ExperimentKind::CzScan => ExperimentOutput::Scan(run_cz_detuning_scan(config, n_shots, seed)?),
        ExperimentKind::TemperatureSweep => ExperimentOutput::TemperatureSweep(run_cz_temperature_sweep(config, n_shots, seed)?),
        ExperimentKind::Bell => ExperimentOutput::Bell(run_bell_sequence(config, n_shots, seed)?),
    })
}

/// Shot-averaged headline curve of the configured experiment.
pub fn run_ensemble(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<EnsembleResult> {
    Ok(run_experiment(config, n_shots, seed)?.primary())
}

/// Checks the kind and the config, then builds the noise distributions.
fn prepare(config: &ExperimentConfig, kind: ExperimentKind) -> Result<(Vec<f64>, NoiseSpec)> {
    let actual = config.kind()?;
    if actual != kind {
        return Err(Error::config("kind", format!("expected `{kind}`, got `{actual}`")));
    }
    config.validate()?;
    let spec = config.noise_spec()?;
    spec.validate().map_err(|e| Error::config("noise", e.to_string()))?;
    Ok((config.scan_grid()?, spec))
}

/// `vec(|i⟩⟨i|)` in a `dim`-level system.
fn projector(dim: usize, level: usize) -> CVector {
    let mut v = CVector::zeros(dim * dim);
    v[level * dim + level] = C64::new(1.0, 0.0);
    v
}

/// Population of `level` from a column-stacked density matrix.
fn population(v: &CVector, dim: usize, level: usize) -> f64 {
    v[level * dim + level].re.clamp(0.0, 1.0)
}

/// Raw ground population, or the detected survival probability.
fn observe(ground: f64, detection: Option<DetectionConfig>) -> Result<f64> {
    let p = ground.clamp(0.0, 1.0);
    match detection {
        None => Ok(p),
        Some(d) => detection_model(p, d.p1d, d.prd),
    }
}

/// Constant spacing of a grid, if it has one (relative tolerance 1e-9).
fn uniform_step(grid: &[f64]) -> Option<f64> {
    if grid.len() < 2 {
        return None;
    }
    let dt = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    let tol = 1e-9 * dt.abs();
    grid.iter().enumerate().all(|(k, t)| (t - (grid[0] + k as f64 * dt)).abs() <= tol).then_some(dt)
}

/// `exp(L t)` for every grid time. Uniform grids reuse a single step
/// propagator.
fn grid_propagators(l: &CMatrix, grid: &[f64]) -> Vec<CMatrix> {
    let n = l.nrows();
    let at = |t: f64| if t == 0.0 { CMatrix::identity(n, n) } else { expm(&(l * C64::new(t, 0.0))) };
    match uniform_step(grid) {
        Some(dt) => {
            let step = at(dt);
            let mut out: Vec<CMatrix> = Vec::with_capacity(grid.len());
            out.push(at(grid[0]));
            for k in 1..grid.len() {
                let next = &step * &out[k - 1];
                out.push(next);
            }
            out
        }
        None => grid.iter().map(|&t| at(t)).collect(),
    }
}

#[cfg(test)]
mod tests;
