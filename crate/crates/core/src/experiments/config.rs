//! Experiment configuration: JSON schema, defaults and validation.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::atoms::{reduce_two_photon, AtomPhysicalParams, DriveParams};
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::units::{parse_quantity, Dimension, Kelvin, RadPerSec, Seconds};

/// The canned experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Ground-Rydberg Rabi oscillation in the four-level ladder.
    RabiGr,
    /// Microwave Ramsey fringe on the ground qubit.
    GroundRamsey,
    /// Ground-Rydberg Ramsey fringe.
    RamseyGr,
    SpinEcho,
    /// π–gap–π Rydberg lifetime measurement.
    T1,
    PiTrain,
    ControlFringe,
    CzGate,
    /// C_Z error versus control-atom detuning.
    CzScan,
    TemperatureSweep,
    Bell,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        ExperimentKind::RabiGr,
        ExperimentKind::GroundRamsey,
        ExperimentKind::RamseyGr,
        ExperimentKind::SpinEcho,
        ExperimentKind::T1,
        ExperimentKind::PiTrain,
        ExperimentKind::ControlFringe,
        ExperimentKind::CzGate,
        ExperimentKind::CzScan,
        ExperimentKind::TemperatureSweep,
        ExperimentKind::Bell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::RabiGr => "rabi-gr",
            ExperimentKind::GroundRamsey => "ground-ramsey",
            ExperimentKind::RamseyGr => "ramsey-gr",
            ExperimentKind::SpinEcho => "spin-echo",
            ExperimentKind::T1 => "t1",
            ExperimentKind::PiTrain => "pi-train",
            ExperimentKind::ControlFringe => "control-fringe",
            ExperimentKind::CzGate => "cz-gate",
            ExperimentKind::CzScan => "cz-scan",
            ExperimentKind::TemperatureSweep => "temperature-sweep",
            ExperimentKind::Bell => "bell",
        }
    }

    /// Physical dimension of the scanned variable (`None`: no scan).
    pub fn scan_dimension(self) -> Option<Dimension> {
        match self {
            ExperimentKind::CzGate => None,
            ExperimentKind::PiTrain | ExperimentKind::Bell => Some(Dimension::Dimensionless),
            ExperimentKind::CzScan => Some(Dimension::AngularFrequency),
            ExperimentKind::TemperatureSweep => Some(Dimension::Temperature),
            _ => Some(Dimension::Time),
        }
    }

    pub fn scan_variable(self) -> &'static str {
        match self {
            ExperimentKind::RabiGr => "pulse_duration",
            ExperimentKind::GroundRamsey | ExperimentKind::RamseyGr | ExperimentKind::SpinEcho | ExperimentKind::T1 => "gap",
            ExperimentKind::PiTrain => "pulse_count",
            ExperimentKind::ControlFringe => "rydberg_gap",
            ExperimentKind::CzGate => "none",
            ExperimentKind::CzScan => "control_detuning",
            ExperimentKind::TemperatureSweep => "temperature",
            ExperimentKind::Bell => "analysis_phase",
        }
    }

    pub fn default_shots(self) -> u64 {
        match self {
            ExperimentKind::TemperatureSweep => 1000,
            ExperimentKind::CzGate | ExperimentKind::CzScan => 1,
            _ => 200,
        }
    }

    fn uses_detection(self) -> bool {
        matches!(
            self,
            ExperimentKind::RabiGr | ExperimentKind::RamseyGr | ExperimentKind::SpinEcho | ExperimentKind::T1 | ExperimentKind::PiTrain
        )
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            Error::config("kind", format!("unknown experiment {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// A number in SI units or a unit-suffixed string, resolved against the
/// scan's dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuantityInput {
    Number(f64),
    Text(String),
}

impl QuantityInput {
    pub fn resolve(&self, dim: Dimension) -> Result<f64> {
        match self {
            QuantityInput::Number(v) => Ok(*v),
            QuantityInput::Text(s) => parse_quantity(s, dim),
        }
    }
}

/// Scan grid: either explicit `values` or `start`/`stop`/`points` (linear,
/// inclusive).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<QuantityInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<QuantityInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<QuantityInput>>,
}

impl ScanSpec {
    pub fn linear(start: QuantityInput, stop: QuantityInput, points: usize) -> Self {
        ScanSpec { start: Some(start), stop: Some(stop), points: Some(points), values: None }
    }

    pub fn resolve(&self, dim: Dimension) -> Result<Vec<f64>> {
        let conv = |q: &QuantityInput, field: &str| q.resolve(dim).map_err(|e| Error::config(format!("scan.{field}"), e.to_string()));
        let grid = match (&self.values, &self.start, &self.stop, self.points) {
            (Some(vals), None, None, None) => vals.iter().map(|v| conv(v, "values")).collect::<Result<Vec<_>>>()?,
            (None, Some(a), Some(b), Some(n)) => {
                let (a, b) = (conv(a, "start")?, conv(b, "stop")?);
                match n {
                    0 => return Err(Error::config("scan.points", "must be at least 1")),
                    1 => vec![a],
                    _ => (0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
                }
            }
            _ => return Err(Error::config("scan", "give either `values` or all of `start`, `stop`, `points`")),
        };
        if grid.is_empty() {
            return Err(Error::config("scan", "grid is empty"));
        }
        if grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("scan", "grid values must be finite"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("scan", "grid must be strictly increasing"));
        }
        Ok(grid)
    }
}

/// Which ground-Rydberg excitation scheme sets the Doppler wave number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transition {
    /// Counter- or co-propagating 780 nm + 480 nm ladder.
    TwoPhoton,
    /// Direct ground-Rydberg excitation at `atom.wavelength_single`.
    SinglePhoton,
}

/// Laser and microwave drives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveConfig {
    pub red_rabi: RadPerSec,
    pub blue_rabi: RadPerSec,
    /// One-photon detuning Δ of the red laser from the intermediate level.
    pub intermediate_detuning: RadPerSec,
    pub two_photon_detuning: RadPerSec,
    /// Add the differential light shift to the two-photon detuning.
    pub stark_compensation: bool,
    /// Ground-Rydberg Rabi frequency of the reduced models; defaults to the
    /// two-photon reduction (two-photon) or 2π×1 MHz (single-photon).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rydberg_rabi: Option<RadPerSec>,
    /// Static ground-Rydberg detuning of the reduced models.
    pub rydberg_detuning: RadPerSec,
    /// Microwave Rabi frequency on `|0⟩↔|1⟩`.
    pub ground_rabi: RadPerSec,
    pub ground_detuning: RadPerSec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition: Option<Transition>,
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig {
            red_rabi: RadPerSec(TAU * 215e6),
            blue_rabi: RadPerSec(TAU * 62e6),
            intermediate_detuning: RadPerSec(-TAU * 5.7e9),
            two_photon_detuning: RadPerSec(0.0),
            stark_compensation: true,
            rydberg_rabi: None,
            rydberg_detuning: RadPerSec(0.0),
            ground_rabi: RadPerSec(PI / 29.5e-6),
            ground_detuning: RadPerSec(0.0),
            transition: None,
        }
    }
}

/// Noise channels. Rabi sigmas are absolute (rad/s) and act as
/// multiplicative Gaussian factors on the corresponding drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub temperature: Kelvin,
    pub doppler: bool,
    pub sigma_red: RadPerSec,
    pub sigma_blue: RadPerSec,
    pub sigma_rydberg: RadPerSec,
    /// Homogeneous (Markovian) ground-Rydberg dephasing time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2_prime: Option<Seconds>,
    /// Rydberg decay time back to `|1⟩`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<Seconds>,
    /// Independent Rydberg decay channels, combined harmonically.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_channels: Option<Vec<Seconds>>,
    /// Differential light-shift coefficient for ground-qubit dephasing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Spontaneous decay in the four-level ladder.
    pub ladder_decay: bool,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            temperature: Kelvin(0.0),
            doppler: true,
            sigma_red: RadPerSec(0.0),
            sigma_blue: RadPerSec(0.0),
            sigma_rydberg: RadPerSec(0.0),
            t2_prime: None,
            t1: None,
            t1_channels: None,
            eta: None,
            ladder_decay: true,
        }
    }
}

/// Readout efficiencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub p1d: f64,
    pub prd: f64,
}

/// Which quantity the Ramsey-type scans report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    /// Ground-state population (with the detection model if configured).
    Population,
    /// Fringe contrast from four analysis phases at every scan point.
    Contrast,
}

/// Sequence details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SequenceConfig {
    /// Frame offset applied during free evolution to produce fringes.
    pub fringe_frequency: RadPerSec,
    pub observable: Observable,
    /// Number of Δt points per control fringe (one fringe period).
    pub wait_points: usize,
    /// Per-pulse excitation efficiency in the π-train.
    pub excitation_efficiency: f64,
    /// Ramsey window of the temperature sweep, in units of √2/σ_δ.
    pub window_factor: f64,
    pub ramsey_points: usize,
}

impl Default for SequenceConfig {
    fn default() -> Self {
        SequenceConfig {
            fringe_frequency: RadPerSec(TAU * 250e3),
            observable: Observable::Population,
            wait_points: 12,
            excitation_efficiency: 0.984,
            window_factor: 1.6,
            ramsey_points: 41,
        }
    }
}

/// Two-atom gate parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateConfig {
    pub blockade: RadPerSec,
    pub control_detuning: RadPerSec,
    pub target_detuning: RadPerSec,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig { blockade: RadPerSec(TAU * 1e9), control_detuning: RadPerSec(0.0), target_detuning: RadPerSec(0.0) }
    }
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub atom: AtomPhysicalParams,
    #[serde(default)]
    pub drives: DriveConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionConfig>,
    #[serde(default)]
    pub sequence: SequenceConfig,
    #[serde(default)]
    pub gate: GateConfig,
    /// Fit model applied to the primary scan (see `FitModel`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<String>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind: Some(kind),
            shots: None,
            seed: None,
            scan: None,
            atom: AtomPhysicalParams::default(),
            drives: DriveConfig::default(),
            noise: NoiseConfig::default(),
            detection: None,
            sequence: SequenceConfig::default(),
            gate: GateConfig::default(),
            fit: None,
        }
    }

    pub fn with_scan(mut self, scan: ScanSpec) -> Self {
        self.scan = Some(scan);
        self
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        self.kind.ok_or_else(|| Error::config("kind", "experiment kind is not set"))
    }

    pub fn shots(&self) -> u64 {
        self.shots.unwrap_or_else(|| self.kind.map_or(200, ExperimentKind::default_shots))
    }

    pub fn transition(&self) -> Result<Transition> {
        Ok(self.drives.transition.unwrap_or(match self.kind()? {
            ExperimentKind::CzGate | ExperimentKind::CzScan | ExperimentKind::TemperatureSweep | ExperimentKind::Bell => {
                Transition::SinglePhoton
            }
            _ => Transition::TwoPhoton,
        }))
    }

    /// Doppler wave number for the configured transition.
    pub fn k_eff(&self) -> Result<f64> {
        Ok(match self.transition()? {
            Transition::TwoPhoton => self.atom.k_eff_two_photon(),
            Transition::SinglePhoton => self.atom.k_single_photon(),
        })
    }

    pub fn red_drive(&self) -> DriveParams {
        DriveParams::new(self.drives.red_rabi.0, self.drives.intermediate_detuning.0, 0.0)
    }

    pub fn blue_drive(&self) -> DriveParams {
        DriveParams::resonant(self.drives.blue_rabi.0)
    }

    /// Ground-Rydberg Rabi frequency used by the reduced models and gates.
    pub fn rydberg_rabi(&self) -> Result<f64> {
        if let Some(r) = self.drives.rydberg_rabi {
            return Ok(r.0);
        }
        Ok(match self.transition()? {
            Transition::TwoPhoton => {
                reduce_two_photon(&self.red_drive(), &self.blue_drive(), self.drives.intermediate_detuning.0)
                    .map_err(|e| Error::config("drives.intermediate_detuning", e.to_string()))?
                    .effective_rabi
            }
            Transition::SinglePhoton => TAU * 1e6,
        })
    }

    /// Rydberg decay time from `t1` or `t1_channels` (`None`: no decay).
    pub fn t1(&self) -> Result<Option<f64>> {
        match (&self.noise.t1, &self.noise.t1_channels) {
            (Some(_), Some(_)) => Err(Error::config("noise.t1_channels", "give either t1 or t1_channels, not both")),
            (Some(t), None) => Ok(Some(t.0)),
            (None, Some(ch)) => {
                let v: Vec<f64> = ch.iter().map(|s| s.0).collect();
                crate::analysis::combine_lifetimes(&v).map(Some).map_err(|e| Error::config("noise.t1_channels", e.to_string()))
            }
            (None, None) => Ok(None),
        }
    }

    /// Per-shot noise distributions for this experiment.
    pub fn noise_spec(&self) -> Result<NoiseSpec> {
        let n = &self.noise;
        let mut spec = NoiseSpec::quiet();
        spec.temperature = n.temperature.0;
        spec.mass = self.atom.mass.0;
        spec.k_eff = self.k_eff()?;
        spec.doppler_enabled = n.doppler;
        if n.sigma_red.0 > 0.0 {
            spec = spec.with_rabi_noise("red", n.sigma_red.0, self.drives.red_rabi.0);
        }
        if n.sigma_blue.0 > 0.0 {
            spec = spec.with_rabi_noise("blue", n.sigma_blue.0, self.drives.blue_rabi.0);
        }
        if n.sigma_rydberg.0 > 0.0 {
            spec = spec.with_rabi_noise("rydberg", n.sigma_rydberg.0, self.rydberg_rabi()?);
        }
        spec.ground_light_shift_eta = n.eta;
        Ok(spec)
    }

    pub fn scan_grid(&self) -> Result<Vec<f64>> {
        let kind = self.kind()?;
        match (kind.scan_dimension(), &self.scan) {
            (None, None) => Ok(vec![0.0]),
            (None, Some(_)) => Err(Error::config("scan", format!("kind `{kind}` takes no scan"))),
            (Some(_), None) => Err(Error::config("scan", format!("kind `{kind}` requires a scan over {}", kind.scan_variable()))),
            (Some(dim), Some(s)) => s.resolve(dim),
        }
    }

    /// Checks every field the selected kind uses; errors name the field.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        self.atom.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::config(format!("atom.{name}"), reason),
            other => other,
        })?;
        let grid = self.scan_grid()?;
        if self.shots == Some(0) {
            return Err(Error::config("shots", "must be at least 1"));
        }

        let d = &self.drives;
        for (name, v) in [("drives.red_rabi", d.red_rabi.0), ("drives.blue_rabi", d.blue_rabi.0), ("drives.ground_rabi", d.ground_rabi.0)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(name, "must be finite and non-negative"));
            }
        }
        if let Some(r) = d.rydberg_rabi {
            if !(r.0 > 0.0 && r.0.is_finite()) {
                return Err(Error::config("drives.rydberg_rabi", "must be finite and positive"));
            }
        }
        if kind == ExperimentKind::RabiGr && d.intermediate_detuning.0 == 0.0 {
            return Err(Error::config("drives.intermediate_detuning", "must be nonzero"));
        }
        if self.rydberg_rabi()? <= 0.0 && !matches!(kind, ExperimentKind::GroundRamsey) {
            return Err(Error::config("drives.rydberg_rabi", "ground-Rydberg Rabi frequency must be positive"));
        }
        if matches!(kind, ExperimentKind::GroundRamsey | ExperimentKind::ControlFringe | ExperimentKind::Bell) && !(d.ground_rabi.0 > 0.0) {
            return Err(Error::config("drives.ground_rabi", "must be positive for microwave pulses"));
        }

        let n = &self.noise;
        if !(n.temperature.0 >= 0.0 && n.temperature.0.is_finite()) {
            return Err(Error::config("noise.temperature", "must be finite and non-negative"));
        }
        for (name, v) in [("noise.sigma_red", n.sigma_red.0), ("noise.sigma_blue", n.sigma_blue.0), ("noise.sigma_rydberg", n.sigma_rydberg.0)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(name, "must be finite and non-negative"));
            }
        }
        if let Some(t) = n.t2_prime {
            if !(t.0 > 0.0) {
                return Err(Error::config("noise.t2_prime", "must be positive"));
            }
        }
        if let Some(t) = n.t1 {
            if !(t.0 > 0.0) {
                return Err(Error::config("noise.t1", "must be positive"));
            }
        }
        self.t1()?;
        if let Some(eta) = n.eta {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::config("noise.eta", "must be finite and positive"));
            }
        }

        if let Some(det) = &self.detection {
            if !kind.uses_detection() {
                return Err(Error::config("detection", format!("kind `{kind}` does not use the detection model")));
            }
            for (name, v) in [("detection.p1d", det.p1d), ("detection.prd", det.prd)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::config(name, format!("probability must lie in [0, 1], got {v}")));
                }
            }
        }

        let s = &self.sequence;
        if !s.fringe_frequency.0.is_finite() {
            return Err(Error::config("sequence.fringe_frequency", "must be finite"));
        }
        if kind == ExperimentKind::ControlFringe {
            if s.wait_points < 4 {
                return Err(Error::config("sequence.wait_points", "need at least 4 points per fringe"));
            }
            if s.fringe_frequency.0 == 0.0 {
                return Err(Error::config("sequence.fringe_frequency", "must be nonzero to generate a fringe"));
            }
        }
        if !(s.excitation_efficiency > 0.0 && s.excitation_efficiency <= 1.0) {
            return Err(Error::config("sequence.excitation_efficiency", "must lie in (0, 1]"));
        }
        if kind == ExperimentKind::TemperatureSweep {
            if !(s.window_factor > 0.0 && s.window_factor.is_finite()) {
                return Err(Error::config("sequence.window_factor", "must be positive"));
            }
            if s.ramsey_points < 8 {
                return Err(Error::config("sequence.ramsey_points", "need at least 8 points"));
            }
            if grid.iter().any(|t| *t <= 0.0) {
                return Err(Error::config("scan", "temperatures must be positive"));
            }
            if grid.len() < 2 {
                return Err(Error::config("scan", "temperature sweep needs at least two temperatures"));
            }
        }
        if s.observable == Observable::Contrast && !matches!(kind, ExperimentKind::RamseyGr | ExperimentKind::SpinEcho) {
            return Err(Error::config("sequence.observable", format!("contrast observable is not available for `{kind}`")));
        }

        let g = &self.gate;
        if !(g.blockade.0 >= 0.0 && g.blockade.0.is_finite()) {
            return Err(Error::config("gate.blockade", "must be finite and non-negative"));
        }

        match kind {
            ExperimentKind::PiTrain => {
                if grid.iter().any(|n| *n < 1.0 || n.fract() != 0.0 || (*n as u64) % 2 == 0) {
                    return Err(Error::config("scan", "pi-train pulse counts must be odd positive integers"));
                }
            }
            ExperimentKind::RabiGr
            | ExperimentKind::GroundRamsey
            | ExperimentKind::RamseyGr
            | ExperimentKind::SpinEcho
            | ExperimentKind::T1
            | ExperimentKind::ControlFringe => {
                if grid[0] < 0.0 {
                    return Err(Error::config("scan", "times must be non-negative"));
                }
            }
            _ => {}
        }
        if let Some(f) = &self.fit {
            f.parse::<crate::analysis::FitModel>()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> std::result::Result<ExperimentConfig, serde_json::Error> {
        serde_json::from_str(json)
    }

    #[test]
    fn unit_strings_and_defaults() {
        let c = parse(r#"{"kind":"ramsey-gr","scan":{"start":"0us","stop":"20us","points":5},"noise":{"temperature":"5.2uK","t1":"122us"}}"#)
            .unwrap();
        c.validate().unwrap();
        assert!((c.scan_grid().unwrap()[4] - 20e-6).abs() < 1e-18);
        assert!((c.noise.temperature.0 - 5.2e-6).abs() < 1e-18);
        assert!((c.rydberg_rabi().unwrap() / TAU / 1e6 - 1.169).abs() < 1e-3);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse(r#"{"kind":"t1","temprature":1}"#).is_err());
        assert!(parse(r#"{"kind":"t1","noise":{"temprature":1}}"#).is_err());
    }

    #[test]
    fn validation_names_fields() {
        let mut c = ExperimentConfig::new(ExperimentKind::PiTrain).with_scan(ScanSpec {
            values: Some(vec![QuantityInput::Number(1.0), QuantityInput::Number(2.0)]),
            ..Default::default()
        });
        assert!(c.validate().unwrap_err().to_string().contains("scan"));
        c.scan = Some(ScanSpec { values: Some(vec![QuantityInput::Number(1.0), QuantityInput::Number(3.0)]), ..Default::default() });
        c.validate().unwrap();
        c.detection = Some(DetectionConfig { p1d: 1.2, prd: 0.5 });
        assert!(c.validate().unwrap_err().to_string().contains("detection.p1d"));

        let c = ExperimentConfig::new(ExperimentKind::T1);
        assert!(c.validate().unwrap_err().to_string().contains("scan"));
        let c = ExperimentConfig::new(ExperimentKind::T1).with_scan(ScanSpec {
            values: Some(vec![QuantityInput::Text("2us".into()), QuantityInput::Text("1us".into())]),
            ..Default::default()
        });
        assert!(c.validate().unwrap_err().to_string().contains("strictly increasing"));
    }
}
