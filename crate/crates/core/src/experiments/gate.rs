//! Two-atom experiments: the π–2π–π blockade C_Z gate, its detuning and
//! temperature dependence, and Bell-state preparation.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind, Observable, QuantityInput, ScanSpec};
use super::prepare;
use crate::analysis::{
    fit_cosine, fit_damped_cosine, fit_error_law, fit_inverse_sqrt, fit_line, ErrorLawFit, LinearFit, XyData,
};
use crate::atoms::{AtomDrive, DriveParams, TwoAtomBlockade};
use crate::engine::{unitary, CMatrix, CVector, C64};
use crate::error::{Error, Result};
use crate::noise::{collect_shots, doppler_sigma, sample_atom, summarize_rows, EnsembleResult, NoiseSpec, ShotSample};
use crate::units::RadPerSec;

/// Indices of |00⟩, |01⟩, |10⟩, |11⟩ in the {0,1,r}⊗{0,1,r} basis.
pub const COMPUTATIONAL: [usize; 4] = [0, 1, 3, 4];

/// Result of one gate evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOutcome {
    /// Projection of the full propagator onto the computational subspace.
    pub final_map: CMatrix,
    /// Population lost from each computational input state.
    pub leakage: [f64; 4],
    /// Process fidelity with C_Z after the calibrated local Z corrections.
    pub fidelity: f64,
    pub error: f64,
    /// Local Z corrections (control, target) applied before comparison.
    pub phases: (f64, f64),
    /// Fidelity with the local Z phases re-optimised for this map.
    pub optimized_fidelity: f64,
}

/// Physical parameters of the π(control)–2π(target)–π(control) schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CzSchedule {
    pub blockade: f64,
    /// Nominal Rabi frequency that sets the pulse durations.
    pub rabi: f64,
}

impl CzSchedule {
    pub fn new(blockade: f64, rabi: f64) -> Result<Self> {
        if !(rabi > 0.0 && rabi.is_finite()) {
            return Err(Error::param("rabi", "must be finite and positive"));
        }
        TwoAtomBlockade::new(blockade)?;
        Ok(CzSchedule { blockade, rabi })
    }

    /// Total gate time: π + 2π + π at the nominal Rabi frequency.
    pub fn duration(&self) -> f64 {
        4.0 * PI / self.rabi
    }

    /// Full 9×9 propagator with per-atom Rabi frequencies and Rydberg
    /// detunings (control, target).
    pub fn propagator(&self, rabi: (f64, f64), detuning: (f64, f64)) -> Result<CMatrix> {
        let model = TwoAtomBlockade::new(self.blockade)?;
        let t_pi = PI / self.rabi;
        let on = |r: f64, d: f64| AtomDrive::rydberg(DriveParams::new(r, d, 0.0));
        let off = |d: f64| AtomDrive::rydberg(DriveParams::new(0.0, d, 0.0));
        let control_pi = unitary(&model.hamiltonian(&on(rabi.0, detuning.0), &off(detuning.1)), t_pi);
        let target_2pi = unitary(&model.hamiltonian(&off(detuning.0), &on(rabi.1, detuning.1)), 2.0 * t_pi);
        Ok(&control_pi * target_2pi * &control_pi)
    }

    /// Noiseless, resonant map used to calibrate the local Z corrections.
    pub fn reference(&self) -> Result<CMatrix> {
        Ok(project(&self.propagator((self.rabi, self.rabi), (0.0, 0.0))?))
    }
}

/// 4×4 block of a 9×9 propagator on the computational states.
pub fn project(u: &CMatrix) -> CMatrix {
    CMatrix::from_fn(4, 4, |j, k| u[(COMPUTATIONAL[j], COMPUTATIONAL[k])])
}

/// Local Z phases (control, target) that map the reference diagonal onto
/// C_Z up to a global phase.
pub fn calibrate_phases(reference: &CMatrix) -> (f64, f64) {
    let a0 = reference[(0, 0)].arg();
    (a0 - reference[(2, 2)].arg(), a0 - reference[(1, 1)].arg())
}

fn trace_overlap(m: &CMatrix, control: f64, target: f64) -> f64 {
    let z = m[(0, 0)] + C64::from_polar(1.0, target) * m[(1, 1)] + C64::from_polar(1.0, control) * m[(2, 2)]
        - C64::from_polar(1.0, control + target) * m[(3, 3)];
    z.norm_sqr() / 16.0
}

/// `|Tr(C_Z† D M)|² / 16` with `D = diag(1, e^{iθ_T}, e^{iθ_C}, e^{i(θ_C+θ_T)})`.
pub fn cz_fidelity(map: &CMatrix, phases: (f64, f64)) -> f64 {
    trace_overlap(map, phases.0, phases.1).clamp(0.0, 1.0)
}

/// C_Z fidelity maximised over both local Z phases.
pub fn cz_fidelity_optimized(map: &CMatrix) -> (f64, (f64, f64)) {
    // for fixed θ_C the best θ_T aligns the two halves of the trace
    let split = |c: f64| {
        let a = map[(0, 0)] + C64::from_polar(1.0, c) * map[(2, 2)];
        let b = map[(1, 1)] - C64::from_polar(1.0, c) * map[(3, 3)];
        (a.norm() + b.norm(), a.arg() - b.arg())
    };
    let n = 720;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..n {
        let c = TAU * k as f64 / n as f64;
        let v = split(c).0;
        if v > best.1 {
            best = (c, v);
        }
    }
    // golden-section refinement inside the winning bracket
    let h = TAU / n as f64;
    let (mut lo, mut hi) = (best.0 - h, best.0 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if split(x1).0 > split(x2).0 {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let c = 0.5 * (lo + hi);
    let t = split(c).1;
    ((split(c).0.powi(2) / 16.0).clamp(0.0, 1.0), (c, t))
}

impl GateOutcome {
    pub fn from_propagator(u: &CMatrix, phases: (f64, f64)) -> Self {
        let map = project(u);
        let leakage: [f64; 4] =
            std::array::from_fn(|k| (1.0 - (0..4).map(|j| map[(j, k)].norm_sqr()).sum::<f64>()).max(0.0));
        let fidelity = cz_fidelity(&map, phases);
        let (optimized_fidelity, _) = cz_fidelity_optimized(&map);
        GateOutcome { final_map: map, leakage, fidelity, error: 1.0 - fidelity, phases, optimized_fidelity }
    }
}

struct GateSetup {
    schedule: CzSchedule,
    phases: (f64, f64),
    spec: NoiseSpec,
}

fn gate_setup(config: &ExperimentConfig, spec: NoiseSpec) -> Result<GateSetup> {
    let schedule = CzSchedule::new(config.gate.blockade.0, config.rydberg_rabi()?)?;
    let phases = calibrate_phases(&schedule.reference()?);
    Ok(GateSetup { schedule, phases, spec })
}

fn shot_rabi(nominal: f64, s: &ShotSample) -> f64 {
    nominal * s.rabi_scale("red") * s.rabi_scale("blue") * s.rabi_scale("rydberg")
}

impl GateSetup {
    /// Gate outcome for one shot with an extra control detuning.
    fn shot(&self, seed: u64, shot: u64, detuning: (f64, f64)) -> Result<GateOutcome> {
        let (c, t) = (sample_atom(&self.spec, seed, shot, 0), sample_atom(&self.spec, seed, shot, 1));
        let rabi = (shot_rabi(self.schedule.rabi, &c), shot_rabi(self.schedule.rabi, &t));
        let u = self.schedule.propagator(rabi, (detuning.0 + c.doppler_detuning, detuning.1 + t.doppler_detuning))?;
        Ok(GateOutcome::from_propagator(&u, self.phases))
    }
}

/// Nominal gate plus the shot-averaged error.
#[derive(Debug, Clone, PartialEq)]
pub struct CzGateResult {
    /// Gate at the configured detunings without noise.
    pub nominal: GateOutcome,
    /// Mean error `1 − F` over shots (scan value 0).
    pub error: EnsembleResult,
}

pub fn run_cz_gate(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<CzGateResult> {
    let (_, spec) = prepare(config, ExperimentKind::CzGate)?;
    let setup = gate_setup(config, spec)?;
    let det = (config.gate.control_detuning.0, config.gate.target_detuning.0);
    let u = setup.schedule.propagator((setup.schedule.rabi, setup.schedule.rabi), det)?;
    let nominal = GateOutcome::from_propagator(&u, setup.phases);
    let rows = collect_shots(n_shots, |i| Ok(vec![setup.shot(seed, i, det)?.error]))?;
    Ok(CzGateResult { nominal, error: summarize_rows(vec![0.0], &rows, seed)? })
}

/// Gate error vs control-atom detuning.
pub fn run_cz_detuning_scan(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<EnsembleResult> {
    let (grid, spec) = prepare(config, ExperimentKind::CzScan)?;
    let setup = gate_setup(config, spec)?;
    let target = config.gate.target_detuning.0;
    let rows = collect_shots(n_shots, |i| {
        grid.iter().map(|&d| Ok(setup.shot(seed, i, (config.gate.control_detuning.0 + d, target))?.error)).collect()
    })?;
    summarize_rows(grid, &rows, seed)
}

/// One temperature of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperaturePoint {
    pub temperature: f64,
    /// Ground-Rydberg Ramsey 1/e time from the damped-cosine fit.
    pub t2_star: f64,
    pub t2_star_sigma: f64,
    pub mean_error: f64,
    pub error_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemperatureSweepResult {
    pub points: Vec<TemperaturePoint>,
    /// `E = c·(1 µs/T2*)²` through the origin.
    pub error_law: ErrorLawFit,
    /// `T2* = c/√T`: (c, R²).
    pub t2_scaling: (f64, f64),
    /// `E = a·T + b`.
    pub error_vs_temperature: LinearFit,
    pub n_shots: u64,
    pub seed: u64,
}

impl TemperatureSweepResult {
    /// Mean gate error vs temperature.
    pub fn error_curve(&self) -> EnsembleResult {
        EnsembleResult {
            scan_values: self.points.iter().map(|p| p.temperature).collect(),
            mean_observable: self.points.iter().map(|p| p.mean_error).collect(),
            standard_error: self.points.iter().map(|p| p.error_stderr).collect(),
            n_shots: self.n_shots,
            seed: self.seed,
        }
    }
}

/// Ramsey config used to measure T2* at one temperature: the Rydberg
/// transition of the gate, no decay, a window of `window_factor·√2/σ_δ` and
/// about four fringe periods across it.
pub fn ramsey_probe_config(config: &ExperimentConfig, temperature: f64) -> Result<ExperimentConfig> {
    let sigma = doppler_sigma(temperature, config.k_eff()?, config.atom.mass.0);
    if !(sigma > 0.0) {
        return Err(Error::config("scan", "temperature sweep needs a nonzero Doppler width"));
    }
    let window = config.sequence.window_factor * std::f64::consts::SQRT_2 / sigma;
    let mut probe = config.clone();
    probe.kind = Some(ExperimentKind::RamseyGr);
    probe.detection = None;
    probe.fit = None;
    probe.drives.transition = Some(config.transition()?);
    probe.drives.rydberg_rabi = Some(RadPerSec(config.rydberg_rabi()?));
    probe.noise.temperature = crate::units::Kelvin(temperature);
    probe.sequence.observable = Observable::Population;
    probe.sequence.fringe_frequency = RadPerSec(4.0 * TAU / window);
    probe.scan = Some(ScanSpec::linear(
        QuantityInput::Number(0.0),
        QuantityInput::Number(window),
        config.sequence.ramsey_points,
    ));
    Ok(probe)
}

/// Per temperature: T2* from a simulated ground-Rydberg Ramsey fit and the
/// Monte-Carlo mean C_Z error (independent Doppler shifts on both atoms).
pub fn run_cz_temperature_sweep(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<TemperatureSweepResult> {
    let (grid, spec) = prepare(config, ExperimentKind::TemperatureSweep)?;
    let mut points = Vec::with_capacity(grid.len());
    for &temperature in &grid {
        let probe = ramsey_probe_config(config, temperature)?;
        let ramsey = super::single::run_gr_ramsey(&probe, n_shots, seed)?;
        let fit = fit_damped_cosine(&XyData::from_ensemble(&ramsey)?)?;
        let tau = fit.param("tau").ok_or_else(|| Error::fit("damped-cosine", "no tau"))?;
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::fit("damped-cosine", format!("T2* fit failed at T = {temperature:e} K")));
        }

        let setup = gate_setup(config, NoiseSpec { temperature, ..spec.clone() })?;
        let det = (config.gate.control_detuning.0, config.gate.target_detuning.0);
        let rows = collect_shots(n_shots, |i| Ok(vec![setup.shot(seed, i, det)?.error]))?;
        let e = summarize_rows(vec![temperature], &rows, seed)?;
        points.push(TemperaturePoint {
            temperature,
            t2_star: tau,
            t2_star_sigma: fit.sigma("tau").unwrap_or(f64::NAN),
            mean_error: e.mean_observable[0],
            error_stderr: e.standard_error[0],
        });
    }
    let temps: Vec<f64> = points.iter().map(|p| p.temperature).collect();
    let t2: Vec<f64> = points.iter().map(|p| p.t2_star).collect();
    let errs: Vec<f64> = points.iter().map(|p| p.mean_error).collect();
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.t2_star, p.mean_error.max(0.0))).collect();
    let error_law = if pairs.len() >= 3 {
        fit_error_law(&pairs)?
    } else {
        ErrorLawFit { coefficient: f64::NAN, standard_error: f64::NAN, r_squared: f64::NAN }
    };
    Ok(TemperatureSweepResult {
        error_law,
        t2_scaling: fit_inverse_sqrt(&temps, &t2)?,
        error_vs_temperature: fit_line(&temps, &errs)?,
        points,
        n_shots,
        seed,
    })
}

/// Bell-state preparation and parity analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellResult {
    /// Parity `P00 + P11 − P01 − P10` vs analysis phase.
    pub parity: EnsembleResult,
    pub p00: f64,
    pub p11: f64,
    /// Fitted amplitude of the parity fringe.
    pub parity_contrast: f64,
    /// `(P00 + P11)/2 + C/2`.
    pub fidelity: f64,
}

/// Local Z rotations as a 9×9 diagonal (the phase also rides on |r⟩).
fn local_z(control: f64, target: f64) -> CMatrix {
    let single = |t: f64| [C64::new(1.0, 0.0), C64::from_polar(1.0, t), C64::from_polar(1.0, t)];
    let (c, t) = (single(control), single(target));
    CMatrix::from_diagonal(&nalgebra::DVector::from_fn(9, |i, _| c[i / 3] * t[i % 3]))
}

/// Global π/2 microwave pulses with phase `phase` on the selected atoms.
fn ground_pulse(model: &TwoAtomBlockade, rabi: f64, phase: f64, on: (bool, bool), det: (f64, f64)) -> CMatrix {
    let drive = |active: bool, d: f64| AtomDrive {
        ground: DriveParams::new(if active { rabi } else { 0.0 }, 0.0, phase),
        rydberg: DriveParams::new(0.0, d, 0.0),
    };
    unitary(&model.hamiltonian(&drive(on.0, det.0), &drive(on.1, det.1)), FRAC_PI_2 / rabi)
}

/// R_y(π/2) on both atoms → C_Z with calibrated local phases and an extra Z
/// on the control → R_y(−π/2) on the target, giving (|00⟩ + |11⟩)/√2. The
/// analysis applies π/2 pulses with phase φ to both atoms.
pub fn run_bell_sequence(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<BellResult> {
    let (grid, spec) = prepare(config, ExperimentKind::Bell)?;
    let setup = gate_setup(config, spec)?;
    let model = TwoAtomBlockade::new(config.gate.blockade.0)?;
    let ground_rabi = config.drives.ground_rabi.0;
    let correction = local_z(setup.phases.0 + PI, setup.phases.1);
    let base = (config.gate.control_detuning.0, config.gate.target_detuning.0);
    let mut psi0 = CVector::zeros(9);
    psi0[0] = C64::new(1.0, 0.0);
    let m = grid.len();

    let rows = collect_shots(n_shots, |i| {
        let (c, t) = (sample_atom(&setup.spec, seed, i, 0), sample_atom(&setup.spec, seed, i, 1));
        let det = (base.0 + c.doppler_detuning, base.1 + t.doppler_detuning);
        let rabi = (shot_rabi(setup.schedule.rabi, &c), shot_rabi(setup.schedule.rabi, &t));
        let gate = setup.schedule.propagator(rabi, det)?;
        let prep = ground_pulse(&model, ground_rabi, FRAC_PI_2, (true, true), det);
        let finish = ground_pulse(&model, ground_rabi, -FRAC_PI_2, (false, true), det);
        let bell = finish * (&correction * (gate * (prep * &psi0)));
        let mut row = Vec::with_capacity(m + 2);
        for &phi in &grid {
            let out = ground_pulse(&model, ground_rabi, phi, (true, true), det) * &bell;
            let p: [f64; 4] = std::array::from_fn(|k| out[COMPUTATIONAL[k]].norm_sqr());
            row.push(p[0] + p[3] - p[1] - p[2]);
        }
        row.push(bell[0].norm_sqr());
        row.push(bell[4].norm_sqr());
        Ok(row)
    })?;

    let parity_rows: Vec<Vec<f64>> = rows.iter().map(|r| r[..m].to_vec()).collect();
    let parity = summarize_rows(grid, &parity_rows, seed)?;
    let n = rows.len() as f64;
    let p00 = rows.iter().map(|r| r[m]).sum::<f64>() / n;
    let p11 = rows.iter().map(|r| r[m + 1]).sum::<f64>() / n;
    let fit = fit_cosine(&XyData::from_ensemble(&parity)?, Some(1.0 / PI))?;
    let parity_contrast = fit.param("A").unwrap_or(0.0).abs().min(1.0);
    Ok(BellResult { parity, p00, p11, parity_contrast, fidelity: 0.5 * (p00 + p11) + 0.5 * parity_contrast })
}
