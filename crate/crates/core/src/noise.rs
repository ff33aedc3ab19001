//! Quasi-static shot noise and seeded ensemble averaging.
//!
//! Every shot draws its noise from a ChaCha8 stream keyed by
//! `(seed, shot_index, atom)`: the seed selects the key and
//! `shot_index·8 + atom` the stream. A draw therefore depends only on those
//! three integers, never on which worker thread evaluates it, and ensemble
//! means are accumulated in shot-index order after the parallel map. Results
//! are bit-identical for any thread count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{Error, Result};

/// Name of the random-number generator backing every shot (for manifests).
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), stream = shot_index*8 + atom";

/// Amplitude noise on one named drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiNoise {
    /// Absolute standard deviation of the Rabi frequency (rad/s).
    pub sigma: f64,
    /// Nominal Rabi frequency the sigma refers to (rad/s).
    pub nominal: f64,
}

impl RabiNoise {
    /// Relative spread of the multiplicative amplitude factor.
    pub fn relative(&self) -> f64 {
        if self.nominal > 0.0 {
            self.sigma / self.nominal
        } else {
            0.0
        }
    }
}

/// Distributions sampled once per shot.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub temperature: f64,
    /// Effective wave number along the excitation beams (rad/m).
    pub k_eff: f64,
    pub mass: f64,
    pub doppler_enabled: bool,
    pub rabi_sigmas: BTreeMap<String, RabiNoise>,
    pub rabi_enabled: bool,
    /// Differential light-shift coefficient η of the trap on the ground
    /// hyperfine transition; `None` disables ground-state dephasing.
    pub ground_light_shift_eta: Option<f64>,
}

impl NoiseSpec {
    /// Everything switched off.
    pub fn quiet() -> Self {
        NoiseSpec {
            temperature: 0.0,
            k_eff: 0.0,
            mass: crate::constants::RB87_MASS,
            doppler_enabled: false,
            rabi_sigmas: BTreeMap::new(),
            rabi_enabled: false,
            ground_light_shift_eta: None,
        }
    }

    pub fn doppler(temperature: f64, k_eff: f64, mass: f64) -> Self {
        NoiseSpec { temperature, k_eff, mass, doppler_enabled: true, ..NoiseSpec::quiet() }
    }

    pub fn with_rabi_noise(mut self, drive: &str, sigma: f64, nominal: f64) -> Self {
        self.rabi_sigmas.insert(drive.to_string(), RabiNoise { sigma, nominal });
        self.rabi_enabled = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature >= 0.0) {
            return Err(Error::param("temperature", "must be non-negative"));
        }
        if !(self.mass > 0.0) {
            return Err(Error::param("mass", "must be positive"));
        }
        for (name, n) in &self.rabi_sigmas {
            if !(n.sigma >= 0.0) || !(n.nominal >= 0.0) {
                return Err(Error::param(format!("rabi_sigmas.{name}"), "sigma and nominal must be non-negative"));
            }
        }
        if let Some(eta) = self.ground_light_shift_eta {
            if !(eta > 0.0) {
                return Err(Error::param("eta", "must be positive"));
            }
        }
        Ok(())
    }

    pub fn is_quiet(&self) -> bool {
        let thermal = self.temperature > 0.0;
        !((self.doppler_enabled && thermal && self.k_eff != 0.0)
            || (self.rabi_enabled && self.rabi_sigmas.values().any(|n| n.sigma > 0.0))
            || (self.ground_light_shift_eta.is_some() && thermal))
    }

    pub fn doppler_sigma(&self) -> f64 {
        doppler_sigma(self.temperature, self.k_eff, self.mass)
    }
}

/// One concrete noise draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotSample {
    pub shot_index: u64,
    /// Doppler shift k_eff·v_axial (rad/s).
    pub doppler_detuning: f64,
    /// Multiplier on each named drive's Rabi frequency (always > 0).
    pub rabi_scale: BTreeMap<String, f64>,
    /// Thermal velocity (m/s); component 0 lies along the excitation beams.
    pub velocity: [f64; 3],
    /// Total motional energy in the harmonic trap (J).
    pub thermal_energy: f64,
    /// Differential light shift of the ground qubit (rad/s), `−η E / 2ħ`.
    pub ground_light_shift: f64,
}

impl ShotSample {
    pub fn rabi_scale(&self, drive: &str) -> f64 {
        self.rabi_scale.get(drive).copied().unwrap_or(1.0)
    }

    pub fn noiseless(shot_index: u64) -> Self {
        ShotSample {
            shot_index,
            doppler_detuning: 0.0,
            rabi_scale: BTreeMap::new(),
            velocity: [0.0; 3],
            thermal_energy: 0.0,
            ground_light_shift: 0.0,
        }
    }
}

/// Doppler detuning spread `σ_δ = k_eff √(k_B T / m)` (rad/s).
pub fn doppler_sigma(temperature: f64, k_eff: f64, mass: f64) -> f64 {
    k_eff.abs() * (BOLTZMANN * temperature.max(0.0) / mass).sqrt()
}

/// Random stream of atom slot `atom` (0..8) in shot `shot_index`. Slot 7 is
/// reserved for measurement outcomes.
pub fn shot_rng(seed: u64, shot_index: u64, atom: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot_index.wrapping_mul(8).wrapping_add(u64::from(atom & 7)));
    rng
}

/// Noise draw for atom 0 of shot `shot_index`.
pub fn sample_shot(spec: &NoiseSpec, seed: u64, shot_index: u64) -> ShotSample {
    sample_atom(spec, seed, shot_index, 0)
}

/// Noise draw for atom `atom` (0..8) of shot `shot_index`.
///
/// The thermal state is drawn from the 3D Maxwell-Boltzmann distribution in a
/// harmonic trap: three velocity and three position quadratures, so the
/// energy is Gamma(3, k_B T) distributed. Only the axial velocity feeds the
/// Doppler shift. The same six normals are always drawn, followed by one
/// normal per Rabi channel in name order, so a draw is a pure function of
/// `(seed, shot_index, atom)`.
pub fn sample_atom(spec: &NoiseSpec, seed: u64, shot_index: u64, atom: u32) -> ShotSample {
    let mut rng = shot_rng(seed, shot_index, atom);
    let z: [f64; 6] = std::array::from_fn(|_| rng.sample(StandardNormal));

    let sigma_v = (BOLTZMANN * spec.temperature.max(0.0) / spec.mass).sqrt();
    let velocity = [z[0] * sigma_v, z[1] * sigma_v, z[2] * sigma_v];
    let thermal_energy = 0.5 * BOLTZMANN * spec.temperature.max(0.0) * z.iter().map(|x| x * x).sum::<f64>();

    let doppler_detuning = if spec.doppler_enabled { spec.k_eff * velocity[0] } else { 0.0 };
    let ground_light_shift = match spec.ground_light_shift_eta {
        Some(eta) => -eta * thermal_energy / (2.0 * HBAR),
        None => 0.0,
    };

    let mut rabi_scale = BTreeMap::new();
    for (name, noise) in &spec.rabi_sigmas {
        let rel = if spec.rabi_enabled { noise.relative() } else { 0.0 };
        let scale = loop {
            let n: f64 = rng.sample(StandardNormal);
            let s = 1.0 + rel * n;
            if s > 0.0 {
                break s;
            }
        };
        rabi_scale.insert(name.clone(), scale);
    }

    ShotSample { shot_index, doppler_detuning, rabi_scale, velocity, thermal_energy, ground_light_shift }
}

/// Shot-averaged scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub scan_values: Vec<f64>,
    pub mean_observable: Vec<f64>,
    pub standard_error: Vec<f64>,
    pub n_shots: u64,
    pub seed: u64,
}

impl EnsembleResult {
    pub fn len(&self) -> usize {
        self.scan_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scan_values.is_empty()
    }
}

/// Evaluates `shot(i)` for every shot in parallel and averages the
/// per-scan-point observables in shot-index order.
pub fn ensemble_average<F>(scan_values: Vec<f64>, n_shots: u64, seed: u64, shot: F) -> Result<EnsembleResult>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    let rows = collect_shots(n_shots, shot)?;
    summarize_rows(scan_values, &rows, seed)
}

/// Evaluates `shot` for every shot index in parallel and returns the rows in
/// shot order. The first failing shot (lowest index) is reported.
pub fn collect_shots<T, F>(n_shots: u64, shot: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    if n_shots == 0 {
        return Err(Error::param("n_shots", "must be at least 1"));
    }
    let outcomes: Vec<Result<T>> = (0..n_shots).into_par_iter().map(&shot).collect();
    outcomes
        .into_iter()
        .enumerate()
        .map(|(i, out)| out.map_err(|e| Error::Shot { shot: i as u64, source: Box::new(e) }))
        .collect()
}

/// Mean and standard error of per-shot rows, accumulated in row order.
pub fn summarize_rows(scan_values: Vec<f64>, rows: &[Vec<f64>], seed: u64) -> Result<EnsembleResult> {
    if rows.is_empty() {
        return Err(Error::param("n_shots", "must be at least 1"));
    }
    let m = scan_values.len();
    let mut sum = vec![0.0; m];
    for row in rows {
        if row.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: row.len() });
        }
        for (s, v) in sum.iter_mut().zip(row) {
            *s += v;
        }
    }
    let n_shots = rows.len() as u64;
    let n = n_shots as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let mut sq = vec![0.0; m];
    for row in rows {
        for ((acc, v), mu) in sq.iter_mut().zip(row).zip(&mean) {
            *acc += (v - mu) * (v - mu);
        }
    }
    let standard_error = if n_shots > 1 { sq.iter().map(|s| (s / (n - 1.0)).sqrt() / n.sqrt()).collect() } else { vec![0.0; m] };

    Ok(EnsembleResult { scan_values, mean_observable: mean, standard_error, n_shots, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn k_eff() -> f64 {
        crate::atoms::AtomPhysicalParams::default().k_eff_two_photon()
    }

    #[test]
    fn doppler_sigma_examples() {
        let s = doppler_sigma(5.2e-6, k_eff(), crate::constants::RB87_MASS);
        assert!((s / TAU / 1e3 - 17.9).abs() < 0.1, "{}", s / TAU);
        assert_eq!(doppler_sigma(0.0, k_eff(), 1.0), 0.0);
        let s4 = doppler_sigma(4.0 * 5.2e-6, k_eff(), crate::constants::RB87_MASS);
        assert!((s4 / s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quiet_spec_gives_trivial_samples() {
        let spec = NoiseSpec::quiet().with_rabi_noise("red", 0.0, 1.0);
        let s = sample_shot(&spec, 3, 17);
        assert_eq!(s.doppler_detuning, 0.0);
        assert_eq!(s.rabi_scale("red"), 1.0);
        assert_eq!(s.rabi_scale("missing"), 1.0);
        assert!(spec.is_quiet());
    }

    #[test]
    fn draws_are_pure_functions_of_indices() {
        let spec = NoiseSpec::doppler(5.2e-6, k_eff(), crate::constants::RB87_MASS).with_rabi_noise("blue", 1.0, 62.0);
        let a = sample_atom(&spec, 9, 123, 1);
        let _ = sample_atom(&spec, 9, 122, 1);
        let b = sample_atom(&spec, 9, 123, 1);
        assert_eq!(a, b);
        assert_ne!(a, sample_atom(&spec, 9, 123, 0));
        assert_ne!(a, sample_atom(&spec, 10, 123, 1));
    }

    #[test]
    fn truncation_keeps_multipliers_positive() {
        let spec = NoiseSpec::quiet().with_rabi_noise("x", 3.0, 1.0);
        assert!((0..2000).all(|i| sample_shot(&spec, 1, i).rabi_scale("x") > 0.0));
    }

    #[test]
    fn ensemble_mean_and_error() {
        let r = ensemble_average(vec![0.0, 1.0], 4, 0, |i| Ok(vec![i as f64, 1.0])).unwrap();
        assert_eq!(r.mean_observable, vec![1.5, 1.0]);
        assert_eq!(r.standard_error[1], 0.0);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((r.standard_error[0] - sd / 2.0).abs() < 1e-15);
        assert!(ensemble_average(vec![0.0], 0, 0, |_| Ok(vec![0.0])).is_err());
    }

    #[test]
    fn shot_errors_carry_index() {
        let err = ensemble_average(vec![0.0], 10, 0, |i| {
            if i == 7 {
                Err(Error::param("x", "boom"))
            } else {
                Ok(vec![0.0])
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::Shot { shot: 7, .. }));
    }
}
