//! Builders turning physical parameters into level bases, Hamiltonians and
//! collapse operators for each atom model used by the experiments.
//!
//! Drive convention: a drive with Rabi frequency Ω and phase φ on the
//! transition `|a⟩ ↔ |b⟩` (a lower) contributes `H_ab = (Ω/2)e^{−iφ}`; its
//! detuning δ enters as `−δ|b⟩⟨b|`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::constants::{self, BOLTZMANN};
use crate::engine::{kron, CMatrix, CollapseOperator, HamiltonianSegment, LevelBasis, C64};
use crate::error::{Error, Result};

/// Atomic species and laser geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtomPhysicalParams {
    pub mass: crate::units::Kilograms,
    pub wavelength_red: crate::units::Meters,
    pub wavelength_blue: crate::units::Meters,
    /// Single-photon ground-Rydberg wavelength.
    pub wavelength_single: crate::units::Meters,
    pub counter_propagating: bool,
    /// Decay rate of the intermediate level (angular).
    pub gamma_p: crate::units::RadPerSec,
    pub rydberg_lifetime: crate::units::Seconds,
    /// Fraction of intermediate-level decay that goes to the dark state |g′⟩.
    pub branching_to_dark: f64,
}

impl Default for AtomPhysicalParams {
    fn default() -> Self {
        AtomPhysicalParams {
            mass: constants::RB87_MASS.into(),
            wavelength_red: constants::WAVELENGTH_RED.into(),
            wavelength_blue: constants::WAVELENGTH_BLUE.into(),
            wavelength_single: constants::WAVELENGTH_SINGLE_PHOTON.into(),
            counter_propagating: true,
            gamma_p: constants::GAMMA_5P.into(),
            rydberg_lifetime: constants::RYDBERG_LIFETIME.into(),
            branching_to_dark: 0.5,
        }
    }
}

impl AtomPhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass.0 > 0.0) {
            return Err(Error::param("mass", "must be positive"));
        }
        for (name, w) in [
            ("wavelength_red", self.wavelength_red.0),
            ("wavelength_blue", self.wavelength_blue.0),
            ("wavelength_single", self.wavelength_single.0),
        ] {
            if !(w > 0.0) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.branching_to_dark) {
            return Err(Error::param("branching_to_dark", "must lie in [0, 1]"));
        }
        if !(self.gamma_p.0 >= 0.0) {
            return Err(Error::param("gamma_p", "must be non-negative"));
        }
        if !(self.rydberg_lifetime.0 > 0.0) {
            return Err(Error::param("rydberg_lifetime", "must be positive"));
        }
        Ok(())
    }

    /// Effective wave number of the two-photon excitation (rad/m):
    /// difference of the wave numbers counter-propagating, sum co-propagating.
    pub fn k_eff_two_photon(&self) -> f64 {
        let kr = TAU / self.wavelength_red.0;
        let kb = TAU / self.wavelength_blue.0;
        if self.counter_propagating {
            (kb - kr).abs()
        } else {
            kb + kr
        }
    }

    pub fn k_single_photon(&self) -> f64 {
        TAU / self.wavelength_single.0
    }

    /// One-dimensional thermal velocity spread √(k_B T / m).
    pub fn velocity_sigma(&self, temperature: f64) -> f64 {
        (BOLTZMANN * temperature.max(0.0) / self.mass.0).sqrt()
    }
}

/// Rabi frequency, detuning (both rad/s) and phase of one drive.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriveParams {
    pub rabi: f64,
    pub detuning: f64,
    pub phase: f64,
}

impl DriveParams {
    pub fn new(rabi: f64, detuning: f64, phase: f64) -> Self {
        DriveParams { rabi, detuning, phase }
    }

    pub fn resonant(rabi: f64) -> Self {
        DriveParams { rabi, detuning: 0.0, phase: 0.0 }
    }

    /// Same frame detuning, drive switched off.
    pub fn off(self) -> Self {
        DriveParams { rabi: 0.0, ..self }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        DriveParams { phase, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi >= 0.0) || !self.rabi.is_finite() {
            return Err(Error::param("rabi", format!("must be finite and non-negative, got {}", self.rabi)));
        }
        if !self.detuning.is_finite() || !self.phase.is_finite() {
            return Err(Error::param("drive", "detuning and phase must be finite"));
        }
        Ok(())
    }
}

fn couple(h: &mut CMatrix, lower: usize, upper: usize, drive: &DriveParams) {
    let half = 0.5 * drive.rabi;
    let z = C64::from_polar(half, -drive.phase);
    h[(lower, upper)] += z;
    h[(upper, lower)] += z.conj();
}

/// Two-level {g, e} model.
#[derive(Debug, Clone)]
pub struct TwoLevelModel {
    pub basis: LevelBasis,
    pub drive: DriveParams,
}

impl TwoLevelModel {
    /// `H = (Ω/2)(cos φ σx + sin φ σy) − δ|e⟩⟨e|`.
    pub fn hamiltonian(&self) -> CMatrix {
        let mut h = CMatrix::zeros(2, 2);
        couple(&mut h, 0, 1, &self.drive);
        h[(1, 1)] = C64::new(-self.drive.detuning, 0.0);
        h
    }

    pub fn segment(&self, duration: f64) -> Result<HamiltonianSegment> {
        HamiltonianSegment::new(self.hamiltonian(), duration)
    }
}

pub fn build_two_level(drive: DriveParams) -> Result<TwoLevelModel> {
    drive.validate()?;
    Ok(TwoLevelModel { basis: LevelBasis::new(["g", "e"])?, drive })
}

/// Adiabatically eliminated two-photon coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonReduction {
    pub effective_rabi: f64,
    pub differential_stark_shift: f64,
}

/// `Ω₀ = Ω_r Ω_b / 2|Δ|`, differential light shift `(Ω_r² − Ω_b²)/4Δ`.
pub fn reduce_two_photon(red: &DriveParams, blue: &DriveParams, delta1: f64) -> Result<TwoPhotonReduction> {
    red.validate()?;
    blue.validate()?;
    if delta1 == 0.0 || !delta1.is_finite() {
        return Err(Error::param("one_photon_detuning", "must be nonzero for adiabatic elimination"));
    }
    Ok(TwoPhotonReduction {
        effective_rabi: red.rabi * blue.rabi / (2.0 * delta1.abs()),
        differential_stark_shift: (red.rabi * red.rabi - blue.rabi * blue.rabi) / (4.0 * delta1),
    })
}

/// Four-level ladder {1, p, r, g′}.
#[derive(Debug, Clone)]
pub struct LadderModel {
    pub basis: LevelBasis,
    pub hamiltonian: CMatrix,
    pub collapse: Vec<CollapseOperator>,
}

impl LadderModel {
    pub const GROUND: usize = 0;
    pub const INTERMEDIATE: usize = 1;
    pub const RYDBERG: usize = 2;
    pub const DARK: usize = 3;

    pub fn segment(&self, duration: f64) -> Result<HamiltonianSegment> {
        HamiltonianSegment::new(self.hamiltonian.clone(), duration)
    }
}

/// Ladder `|1⟩ —Ω_r— |p⟩ —Ω_b— |r⟩` with `|p⟩` decaying to `|1⟩` and to the dark
/// ground state `|g′⟩`, and `|r⟩` decaying to `|1⟩`.
///
/// The one-photon detuning Δ is `red.detuning`; `blue.detuning` is implied by
/// the two-photon detuning and ignored. Returns `(model, far_detuned)` where
/// `far_detuned` is false when |Δ| < 10 Γ_p (adiabatic regime questionable).
pub fn build_ladder_4level(
    red: &DriveParams,
    blue: &DriveParams,
    params: &AtomPhysicalParams,
    two_photon_detuning: f64,
) -> Result<(LadderModel, bool)> {
    red.validate()?;
    blue.validate()?;
    params.validate()?;
    let basis = LevelBasis::new(["1", "p", "r", "g'"])?;
    let mut h = CMatrix::zeros(4, 4);
    couple(&mut h, LadderModel::GROUND, LadderModel::INTERMEDIATE, red);
    couple(&mut h, LadderModel::INTERMEDIATE, LadderModel::RYDBERG, blue);
    h[(1, 1)] = C64::new(-red.detuning, 0.0);
    h[(2, 2)] = C64::new(-two_photon_detuning, 0.0);

    let gamma = params.gamma_p.0;
    let b = params.branching_to_dark;
    let mut collapse = Vec::new();
    if gamma * (1.0 - b) > 0.0 {
        collapse.push(CollapseOperator::decay(4, 1, 0, gamma * (1.0 - b), "p -> 1")?);
    }
    if gamma * b > 0.0 {
        collapse.push(CollapseOperator::decay(4, 1, 3, gamma * b, "p -> g'")?);
    }
    collapse.push(CollapseOperator::decay(4, 2, 0, 1.0 / params.rydberg_lifetime.0, "r -> 1")?);

    let far_detuned = red.detuning.abs() >= 10.0 * gamma;
    Ok((LadderModel { basis, hamiltonian: h, collapse }, far_detuned))
}

/// Two-photon detuning that cancels the differential light shift.
pub fn stark_compensated_detuning(red: &DriveParams, blue: &DriveParams, two_photon_detuning: f64) -> Result<f64> {
    let red_reduction = reduce_two_photon(red, blue, red.detuning)?;
    Ok(two_photon_detuning - red_reduction.differential_stark_shift)
}

/// Drives on one {0, 1, r} atom: a ground drive on `|0⟩↔|1⟩` and a Rydberg
/// drive on `|1⟩↔|r⟩`. Frame detunings stay active with the drive switched off.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AtomDrive {
    pub ground: DriveParams,
    pub rydberg: DriveParams,
}

impl AtomDrive {
    pub fn rydberg(drive: DriveParams) -> Self {
        AtomDrive { ground: DriveParams::default(), rydberg: drive }
    }

    pub fn ground(drive: DriveParams) -> Self {
        AtomDrive { ground: drive, rydberg: DriveParams::default() }
    }

    /// Both drives off, detunings kept.
    pub fn idle(self) -> Self {
        AtomDrive { ground: self.ground.off(), rydberg: self.rydberg.off() }
    }
}

pub fn qubit_rydberg_basis() -> LevelBasis {
    LevelBasis::new(["0", "1", "r"]).expect("static basis")
}

/// Single-atom {0, 1, r} Hamiltonian. The ground detuning shifts `|1⟩` and
/// (since the Rydberg frame is referenced to `|1⟩`) also `|r⟩`.
pub fn qubit_rydberg_hamiltonian(drive: &AtomDrive) -> CMatrix {
    let mut h = CMatrix::zeros(3, 3);
    couple(&mut h, 0, 1, &drive.ground);
    couple(&mut h, 1, 2, &drive.rydberg);
    h[(1, 1)] += C64::new(-drive.ground.detuning, 0.0);
    h[(2, 2)] += C64::new(-drive.ground.detuning - drive.rydberg.detuning, 0.0);
    h
}

/// Nine-level {0,1,r}⊗{0,1,r} control/target pair with blockade shift on |rr⟩.
#[derive(Debug, Clone)]
pub struct TwoAtomBlockade {
    pub basis: LevelBasis,
    pub blockade: f64,
}

impl TwoAtomBlockade {
    pub fn new(blockade: f64) -> Result<Self> {
        if !(blockade >= 0.0) || !blockade.is_finite() {
            return Err(Error::param("blockade", "must be finite and non-negative"));
        }
        let single = qubit_rydberg_basis();
        Ok(TwoAtomBlockade { basis: single.tensor(&single)?, blockade })
    }

    /// `H_C ⊗ I + I ⊗ H_T + B|rr⟩⟨rr|`.
    pub fn hamiltonian(&self, control: &AtomDrive, target: &AtomDrive) -> CMatrix {
        let id = CMatrix::identity(3, 3);
        let mut h = kron(&qubit_rydberg_hamiltonian(control), &id) + kron(&id, &qubit_rydberg_hamiltonian(target));
        h[(8, 8)] += C64::new(self.blockade, 0.0);
        h
    }

    pub fn segment(&self, control: &AtomDrive, target: &AtomDrive, duration: f64) -> Result<HamiltonianSegment> {
        HamiltonianSegment::new(self.hamiltonian(control, target), duration)
    }
}

/// Two atoms driven on `|1⟩↔|r⟩` only; `None` switches a drive off entirely.
pub fn build_two_atom_blockade(
    control_drive: Option<DriveParams>,
    target_drive: Option<DriveParams>,
    blockade: f64,
) -> Result<(TwoAtomBlockade, CMatrix)> {
    for d in control_drive.iter().chain(target_drive.iter()) {
        d.validate()?;
    }
    let model = TwoAtomBlockade::new(blockade)?;
    let c = AtomDrive::rydberg(control_drive.unwrap_or_default());
    let t = AtomDrive::rydberg(target_drive.unwrap_or_default());
    let h = model.hamiltonian(&c, &t);
    Ok((model, h))
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(name, format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Survival probability seen by the release-recapture readout:
/// ground atoms are detected with efficiency `p1d`, and Rydberg atoms are
/// removed with efficiency `prd`, giving `p1d − prd·(1 − P_ground)`.
/// Values below zero (only possible when `prd > p1d`) are clipped to 0.
pub fn detection_model(ground_population: f64, p1d: f64, prd: f64) -> Result<f64> {
    check_probability("ground_population", ground_population)?;
    check_probability("p1d", p1d)?;
    check_probability("prd", prd)?;
    Ok((p1d - prd * (1.0 - ground_population)).max(0.0))
}

/// Survival after `n` π pulses, each exciting with efficiency `pre`:
/// `P = p1d − prd·pre^n` (clipped at 0).
pub fn pi_train_survival(n: u32, p1d: f64, prd: f64, pre: f64) -> Result<f64> {
    check_probability("pre", pre)?;
    detection_model(1.0 - pre.powi(n as i32), p1d, prd)
}
