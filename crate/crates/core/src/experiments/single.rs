//! Single-atom experiments: Rabi, Ramsey, echo, lifetime, π-train and the
//! control-qubit fringe.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use super::config::{DetectionConfig, ExperimentConfig, ExperimentKind, Observable};
use super::{grid_propagators, observe, population, prepare, projector};
use crate::analysis::{extract_contrast_with_frequency, fit_exponential_decay, FitResult, XyData};
use crate::atoms::{
    build_ladder_4level, qubit_rydberg_hamiltonian, stark_compensated_detuning, AtomDrive, DriveParams, LadderModel,
    TwoLevelModel,
};
use crate::engine::{expm, lindblad_propagator, liouvillian, unitary, CMatrix, CVector, CollapseOperator, LevelBasis, C64};
use crate::error::{Error, Result};
use crate::noise::{collect_shots, ensemble_average, sample_shot, shot_rng, summarize_rows, EnsembleResult, ShotSample};

fn two_level_h(rabi: f64, detuning: f64, phase: f64) -> CMatrix {
    TwoLevelModel { basis: LevelBasis::new(["g", "e"]).expect("static basis"), drive: DriveParams::new(rabi, detuning, phase) }
        .hamiltonian()
}

/// Collapse operators for Rydberg decay to `ground` and Markovian
/// ground-Rydberg dephasing on `rydberg`, in a `dim`-level system.
fn rydberg_channels(dim: usize, ground: usize, rydberg: usize, t1: Option<f64>, t2_prime: Option<f64>) -> Result<Vec<CollapseOperator>> {
    let mut out = Vec::new();
    if let Some(t1) = t1 {
        out.push(CollapseOperator::decay(dim, rydberg, ground, 1.0 / t1, "r -> 1")?);
    }
    if let Some(t2) = t2_prime {
        out.push(CollapseOperator::dephasing(dim, rydberg, 2.0 / t2, "r dephasing")?);
    }
    Ok(out)
}

/// Ground-Rydberg Rabi frequency of one shot in the reduced models: the
/// nominal value times the red, blue and direct multipliers.
fn shot_rydberg_rabi(nominal: f64, s: &ShotSample) -> f64 {
    nominal * s.rabi_scale("red") * s.rabi_scale("blue") * s.rabi_scale("rydberg")
}

/// P_ground vs pulse duration in the four-level ladder.
pub fn run_rabi_scan(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<EnsembleResult> {
    let (grid, spec) = prepare(config, ExperimentKind::RabiGr)?;
    let red0 = config.red_drive();
    let blue0 = config.blue_drive();
    let two_photon = config.drives.two_photon_detuning.0;
    let base = if config.drives.stark_compensation { stark_compensated_detuning(&red0, &blue0, two_photon)? } else { two_photon };
    let t1 = config.t1()?;
    let t2_prime = config.noise.t2_prime.map(|s| s.0);
    let detection = config.detection;
    let v0 = projector(4, LadderModel::GROUND);

    ensemble_average(grid.clone(), n_shots, seed, |i| {
        let s = sample_shot(&spec, seed, i);
        let red = DriveParams { rabi: red0.rabi * s.rabi_scale("red"), ..red0 };
        let blue = DriveParams { rabi: blue0.rabi * s.rabi_scale("blue") * s.rabi_scale("rydberg"), ..blue0 };
        let (model, _) = build_ladder_4level(&red, &blue, &config.atom, base + s.doppler_detuning)?;
        let mut collapse = if config.noise.ladder_decay { model.collapse } else { Vec::new() };
        if t1.is_some() {
            collapse.retain(|c| c.description() != "r -> 1");
        }
        collapse.extend(rydberg_channels(4, LadderModel::GROUND, LadderModel::RYDBERG, t1, t2_prime)?);
        let l = liouvillian(&model.hamiltonian, &collapse);
        grid_propagators(&l, &grid)
            .iter()
            .map(|p| {
                let v = p * &v0;
                let excited = population(&v, 4, LadderModel::INTERMEDIATE) + population(&v, 4, LadderModel::RYDBERG);
                observe(1.0 - excited, detection)
            })
            .collect()
    })
}

/// Microwave Ramsey fringe `P_|0⟩` vs gap on the ground qubit, dephased by
/// the thermal differential light shift.
pub fn run_ground_ramsey(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<EnsembleResult> {
    let (grid, spec) = prepare(config, ExperimentKind::GroundRamsey)?;
    let rabi = config.drives.ground_rabi.0;
    let t_half = FRAC_PI_2 / rabi;
    let psi0 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);

    ensemble_average(grid.clone(), n_shots, seed, |i| {
        let s = sample_shot(&spec, seed, i);
        let detuning = config.drives.ground_detuning.0 + s.ground_light_shift;
        let pulse = unitary(&two_level_h(rabi, detuning, 0.0), t_half);
        let gap_h = two_level_h(0.0, detuning, 0.0);
        let first = &pulse * &psi0;
        Ok(grid
            .iter()
            .map(|&t| {
                let psi = &pulse * (unitary(&gap_h, t) * &first);
                psi[0].norm_sqr().clamp(0.0, 1.0)
            })
            .collect())
    })
}

/// Phases of the final π/2 pulse used by the contrast observable.
const ANALYSIS_PHASES: [f64; 4] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

struct ReducedSetup {
    grid: Vec<f64>,
    spec: crate::noise::NoiseSpec,
    rabi: f64,
    detuning: f64,
    collapse: Vec<CollapseOperator>,
    observable: Observable,
    detection: Option<DetectionConfig>,
}

fn reduced_setup(config: &ExperimentConfig, kind: ExperimentKind) -> Result<ReducedSetup> {
    let (grid, spec) = prepare(config, kind)?;
    let t1 = match kind {
        ExperimentKind::T1 => Some(config.t1()?.unwrap_or(config.atom.rydberg_lifetime.0)),
        _ => config.t1()?,
    };
    Ok(ReducedSetup {
        grid,
        spec,
        rabi: config.rydberg_rabi()?,
        detuning: config.drives.rydberg_detuning.0,
        collapse: rydberg_channels(2, 0, 1, t1, config.noise.t2_prime.map(|s| s.0))?,
        observable: config.sequence.observable,
        detection: config.detection,
    })
}

/// Turns per-shot rows into the reported curve. For the contrast observable
/// each row holds the four analysis phases per scan point (phase-major) and
/// the fringe contrast of the ensemble means is reported, with a delta-method
/// standard error.
fn finish_reduced(setup: &ReducedSetup, rows: Vec<Vec<f64>>, seed: u64) -> Result<EnsembleResult> {
    match setup.observable {
        Observable::Population => summarize_rows(setup.grid.clone(), &rows, seed),
        Observable::Contrast => Ok(phase_contrast(setup.grid.clone(), &rows, seed)),
    }
}

/// Contrast `A/mean` of the four-phase fringe at each scan point.
pub(crate) fn phase_contrast(scan_values: Vec<f64>, rows: &[Vec<f64>], seed: u64) -> EnsembleResult {
    let m = scan_values.len();
    let n = rows.len() as f64;
    let mut mean = Vec::with_capacity(m);
    let mut stderr = Vec::with_capacity(m);
    for j in 0..m {
        let at = |row: &Vec<f64>, k: usize| row[k * m + j];
        let mu: [f64; 4] = std::array::from_fn(|k| rows.iter().map(|r| at(r, k)).sum::<f64>() / n);
        let (dc, ds) = (mu[0] - mu[2], mu[1] - mu[3]);
        let amp = 0.5 * dc.hypot(ds);
        let level = mu.iter().sum::<f64>() / 4.0;
        if level <= 0.0 {
            mean.push(0.0);
            stderr.push(0.0);
            continue;
        }
        let contrast = amp / level;
        let grad: [f64; 4] = if amp > 0.0 {
            let g = [dc, ds, -dc, -ds];
            std::array::from_fn(|k| g[k] / (4.0 * amp * level) - contrast / (4.0 * level))
        } else {
            [0.0; 4]
        };
        let var: f64 = rows
            .iter()
            .map(|r| {
                let infl: f64 = (0..4).map(|k| grad[k] * (at(r, k) - mu[k])).sum();
                infl * infl
            })
            .sum::<f64>();
        mean.push(contrast);
        stderr.push(if rows.len() > 1 { (var / (n * (n - 1.0))).sqrt() } else { 0.0 });
    }
    EnsembleResult { scan_values, mean_observable: mean, standard_error: stderr, n_shots: rows.len() as u64, seed }
}

fn final_pulses(setup: &ReducedSetup, rabi: f64, detuning: f64, duration: f64) -> Vec<CMatrix> {
    let phases: &[f64] = match setup.observable {
        Observable::Population => &ANALYSIS_PHASES[..1],
        Observable::Contrast => &ANALYSIS_PHASES,
    };
    phases.iter().map(|&ph| lindblad_propagator(&two_level_h(rabi, detuning, ph), &setup.collapse, duration)).collect()
}

/// Collects `P_ground` for every (analysis phase, scan point), phase-major.
fn reduced_row(setup: &ReducedSetup, finals: &[CMatrix], states: &[CVector]) -> Result<Vec<f64>> {
    let mut row = Vec::with_capacity(finals.len() * states.len());
    for f in finals {
        for v in states {
            row.push(observe(population(&(f * v), 2, 0), setup.detection)?);
        }
    }
    Ok(row)
}

/// Ground-Rydberg π/2–gap–π/2 in the reduced {1, r} model. A frame offset of
/// `sequence.fringe_frequency` during the gap produces the fringe.
pub fn run_gr_ramsey(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<EnsembleResult> {
    let setup = reduced_setup(config, ExperimentKind::RamseyGr)?;
    let offset = config.sequence.fringe_frequency.0;
    let t_half = FRAC_PI_2 / setup.rabi;
    let v0 = projector(2, 0);
    let rows = collect_shots(n_shots, |i| {
        let s = sample_shot(&setup.spec, seed, i);
        let rabi = shot_rydberg_rabi(setup.rabi, &s);
        let det = setup.detuning + s.doppler_detuning;
        let first = lindblad_propagator(&two_level_h(rabi, det, 0.0), &setup.collapse, t_half) * &v0;
        let gap = liouvillian(&two_level_h(0.0, det + offset, 0.0), &setup.collapse);
        let states: Vec<CVector> = grid_propagators(&gap, &setup.grid).iter().map(|g| g * &first).collect();
        reduced_row(&setup, &final_pulses(&setup, rabi, det, t_half), &states)
    })?;
    finish_reduced(&setup, rows, seed)
}

/// π/2–gap/2–π–gap/2–π/2 in the reduced model; the frame offset and any
/// static detuning are refocused.
pub fn run_spin_echo(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<EnsembleResult> {
    let setup = reduced_setup(config, ExperimentKind::SpinEcho)?;
    let offset = config.sequence.fringe_frequency.0;
    let t_half = FRAC_PI_2 / setup.rabi;
    let v0 = projector(2, 0);
    let half_grid: Vec<f64> = setup.grid.iter().map(|t| 0.5 * t).collect();
    let rows = collect_shots(n_shots, |i| {
        let s = sample_shot(&setup.spec, seed, i);
        let rabi = shot_rydberg_rabi(setup.rabi, &s);
        let det = setup.detuning + s.doppler_detuning;
        let h = two_level_h(rabi, det, 0.0);
        let first = lindblad_propagator(&h, &setup.collapse, t_half) * &v0;
        let refocus = lindblad_propagator(&h, &setup.collapse, 2.0 * t_half);
        let gap = liouvillian(&two_level_h(0.0, det + offset, 0.0), &setup.collapse);
        let states: Vec<CVector> =
            grid_propagators(&gap, &half_grid).iter().map(|g| g * (&refocus * (g * &first))).collect();
        reduced_row(&setup, &final_pulses(&setup, rabi, det, t_half), &states)
    })?;
    finish_reduced(&setup, rows, seed)
}

/// π–gap–π: the population returned to `|1⟩` decays as `e^{−t/T1}`. Uses
/// `noise.t1`/`t1_channels`, else the atom's Rydberg lifetime.
pub fn run_t1_two_pi(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<EnsembleResult> {
    let setup = reduced_setup(config, ExperimentKind::T1)?;
    let t_pi = PI / setup.rabi;
    let v0 = projector(2, 0);
    ensemble_average(setup.grid.clone(), n_shots, seed, |i| {
        let s = sample_shot(&setup.spec, seed, i);
        let rabi = shot_rydberg_rabi(setup.rabi, &s);
        let det = setup.detuning + s.doppler_detuning;
        let pi = lindblad_propagator(&two_level_h(rabi, det, 0.0), &setup.collapse, t_pi);
        let gap = liouvillian(&two_level_h(0.0, det, 0.0), &setup.collapse);
        let first = &pi * &v0;
        grid_propagators(&gap, &setup.grid)
            .iter()
            .map(|g| observe(population(&(&pi * (g * &first)), 2, 0), setup.detection))
            .collect()
    })
}

/// Rydberg population after each number of pulses in a train where every
/// pulse succeeds as an ideal π rotation with probability `pre` and otherwise
/// shelves the atom in the dark ground state `|g′⟩`.
pub fn pi_train_rydberg_population(counts: &[u32], pre: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&pre) {
        return Err(Error::param("pre", format!("probability must lie in [0, 1], got {pre}")));
    }
    // {1, r, g'}
    let mut h = CMatrix::zeros(3, 3);
    h[(0, 1)] = C64::new(0.5, 0.0);
    h[(1, 0)] = C64::new(0.5, 0.0);
    let u = unitary(&h, PI);
    let mut shelved = CMatrix::zeros(3, 3);
    shelved[(2, 2)] = C64::new(1.0, 0.0);
    let mut rho = CMatrix::zeros(3, 3);
    rho[(0, 0)] = C64::new(1.0, 0.0);
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut out = vec![0.0; counts.len()];
    for n in 0..=max {
        for (o, &c) in out.iter_mut().zip(counts) {
            if c == n {
                *o = rho[(1, 1)].re.clamp(0.0, 1.0);
            }
        }
        let trace = rho.trace();
        rho = (&u * &rho * u.adjoint()) * C64::new(pre, 0.0) + &shelved * (trace * (1.0 - pre));
    }
    Ok(out)
}

/// Survival vs number of π pulses. Each shot records one detection outcome
/// (0 or 1) per pulse count, drawn with the detection-model probability.
pub fn run_pi_train(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<EnsembleResult> {
    let (grid, _) = prepare(config, ExperimentKind::PiTrain)?;
    let det = config.detection.ok_or_else(|| Error::config("detection", "pi-train requires p1d and prd"))?;
    let counts: Vec<u32> = grid.iter().map(|&n| n as u32).collect();
    let rydberg = pi_train_rydberg_population(&counts, config.sequence.excitation_efficiency)?;
    let survival: Vec<f64> = rydberg.iter().map(|p| observe(1.0 - p, Some(det))).collect::<Result<_>>()?;
    ensemble_average(grid, n_shots, seed, |i| {
        let mut rng = shot_rng(seed, i, 7);
        Ok(survival.iter().map(|&p| if rng.random::<f64>() < p { 1.0 } else { 0.0 }).collect())
    })
}

/// Contrast-vs-T curve of the control-qubit fringe, with the per-T fringes.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ControlFringeResult {
    /// Contrast at each Rydberg gap T, with delta-method standard errors.
    pub contrast: EnsembleResult,
    /// Wait times Δt shared by every fringe.
    pub wait_times: Vec<f64>,
    /// Ensemble-mean `P_|0⟩` vs Δt, one per T.
    pub fringes: Vec<EnsembleResult>,
    /// Fringe frequency in cycles per second of Δt.
    pub fringe_frequency: f64,
}

impl ControlFringeResult {
    /// Single exponential with no offset through the contrasts, unweighted
    /// like the damped-cosine Ramsey fit it is compared with (the T = 0
    /// contrast has almost no shot spread and would otherwise pin the fit).
    pub fn fit_decay(&self) -> Result<FitResult> {
        let c = &self.contrast;
        fit_exponential_decay(&XyData::new(c.scan_values.clone(), c.mean_observable.clone())?, Some(0.0))
    }
}

/// GND-π/2 → Δt → Ryd-π → T → Ryd-π(phase π) → Δt → GND-π/2 on {0, 1, r};
/// `P_|0⟩` vs Δt for every T. A ground frame offset during the Δt waits makes
/// the fringe; one fringe period is sampled with `sequence.wait_points`
/// points.
pub fn run_control_fringe(config: &ExperimentConfig, n_shots: u64, seed: u64) -> Result<ControlFringeResult> {
    let (grid, spec) = prepare(config, ExperimentKind::ControlFringe)?;
    let ground_rabi = config.drives.ground_rabi.0;
    let ground_det = config.drives.ground_detuning.0;
    let offset = config.sequence.fringe_frequency.0;
    let rabi0 = config.rydberg_rabi()?;
    let static_det = config.drives.rydberg_detuning.0;
    let collapse = rydberg_channels(3, 1, 2, config.t1()?, config.noise.t2_prime.map(|s| s.0))?;

    // phase 2·offset·Δt accumulates over both waits
    let frequency = offset.abs() / PI;
    let wp = config.sequence.wait_points;
    let waits: Vec<f64> = (0..wp).map(|j| j as f64 / (wp as f64 * frequency)).collect();

    let idle = |rydberg: DriveParams| AtomDrive { ground: DriveParams::new(0.0, ground_det, 0.0), rydberg };
    let gnd = lindblad_propagator(
        &qubit_rydberg_hamiltonian(&AtomDrive { ground: DriveParams::new(ground_rabi, ground_det, 0.0), rydberg: DriveParams::default() }),
        &collapse,
        FRAC_PI_2 / ground_rabi,
    );
    let wait_h = qubit_rydberg_hamiltonian(&AtomDrive {
        ground: DriveParams::new(0.0, ground_det + offset, 0.0),
        rydberg: DriveParams::new(0.0, static_det, 0.0),
    });
    let wait_l = liouvillian(&wait_h, &collapse);
    let wait_props: Vec<CMatrix> = waits.iter().map(|&t| if t == 0.0 { CMatrix::identity(9, 9) } else { expm(&(&wait_l * C64::new(t, 0.0))) }).collect();
    let start = &gnd * projector(3, 0);
    let prepared: Vec<CVector> = wait_props.iter().map(|w| w * &start).collect();
    let m = grid.len();

    let rows = collect_shots(n_shots, |i| {
        let s = sample_shot(&spec, seed, i);
        let rabi = shot_rydberg_rabi(rabi0, &s);
        let det = static_det + s.doppler_detuning;
        let pi = |phase: f64| {
            lindblad_propagator(&qubit_rydberg_hamiltonian(&idle(DriveParams::new(rabi, det, phase))), &collapse, PI / rabi0)
        };
        let (there, back) = (pi(0.0), pi(PI));
        let gap = liouvillian(&qubit_rydberg_hamiltonian(&idle(DriveParams::new(0.0, det, 0.0))), &collapse);
        let mut row = Vec::with_capacity(m * wp);
        for g in grid_propagators(&gap, &grid) {
            let block = &back * g * &there;
            for (w, v) in wait_props.iter().zip(&prepared) {
                let out = &gnd * (w * (&block * v));
                row.push(population(&out, 3, 0));
            }
        }
        Ok(row)
    })?;

    let n = rows.len() as f64;
    let omega = std::f64::consts::TAU * frequency;
    let mut fringes = Vec::with_capacity(m);
    let mut contrast = Vec::with_capacity(m);
    let mut stderr = Vec::with_capacity(m);
    for (k, _) in grid.iter().enumerate() {
        let slice: Vec<Vec<f64>> = rows.iter().map(|r| r[k * wp..(k + 1) * wp].to_vec()).collect();
        let fringe = summarize_rows(waits.clone(), &slice, seed)?;
        let c = extract_contrast_with_frequency(&XyData::new(waits.clone(), fringe.mean_observable.clone())?, frequency)?;
        // Full-period uniform sampling: the fixed-frequency fit is the discrete
        // Fourier projection, so per-shot influence values are linear.
        let proj = |y: &[f64]| {
            let (mut a, mut b, mut o) = (0.0, 0.0, 0.0);
            for (&t, &v) in waits.iter().zip(y) {
                a += v * (omega * t).cos();
                b += v * (omega * t).sin();
                o += v;
            }
            let w = wp as f64;
            (2.0 * a / w, 2.0 * b / w, o / w)
        };
        let (a, b, o) = proj(&fringe.mean_observable);
        let amp = a.hypot(b);
        let se = if rows.len() > 1 && amp > 0.0 && o > 0.0 && !c.fallback {
            let ratio = amp / o;
            let var: f64 = slice
                .iter()
                .map(|r| {
                    let (da, db, dof) = proj(r);
                    let infl = (a * (da - a) + b * (db - b)) / (amp * o) - ratio * (dof - o) / o;
                    infl * infl
                })
                .sum();
            (var / (n * (n - 1.0))).sqrt()
        } else {
            0.0
        };
        contrast.push(c.value);
        stderr.push(se);
        fringes.push(fringe);
    }

    Ok(ControlFringeResult {
        contrast: EnsembleResult { scan_values: grid, mean_observable: contrast, standard_error: stderr, n_shots: rows.len() as u64, seed },
        wait_times: waits,
        fringes,
        fringe_frequency: frequency,
    })
}
