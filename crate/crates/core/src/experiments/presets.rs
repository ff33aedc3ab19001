//! Ready-made configurations reproducing the published figures.

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 9] = ["fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5", "fig6", "fig7", "fig8"];

fn preset_json(name: &str) -> Option<&'static str> {
    Some(match name {
        // microwave Ramsey on the clock states, thermal light-shift dephasing
        "fig2b" => r#"{
            "kind": "ground-ramsey", "shots": 2000, "seed": 1,
            "scan": {"start": "0ms", "stop": "15ms", "points": 61},
            "drives": {"ground_detuning": "2pi*300Hz"},
            "noise": {"temperature": "5.2uK", "eta": 3.85e-4},
            "fit": "kuhr"
        }"#,
        "fig3a" => r#"{
            "kind": "rabi-gr", "shots": 500, "seed": 1,
            "scan": {"start": "0us", "stop": "10us", "points": 201},
            "noise": {"temperature": "5.2uK", "sigma_red": "2pi*2.1MHz", "sigma_blue": "2pi*1MHz"},
            "detection": {"p1d": 0.972, "prd": 0.887},
            "fit": "damped-cosine"
        }"#,
        "fig3b" => r#"{
            "kind": "pi-train", "shots": 200, "seed": 1,
            "scan": {"start": 1, "stop": 39, "points": 20},
            "detection": {"p1d": 0.972, "prd": 0.887},
            "sequence": {"excitation_efficiency": 0.984},
            "fit": "pi-train"
        }"#,
        "fig4a" => r#"{
            "kind": "ramsey-gr", "shots": 200, "seed": 1,
            "scan": {"start": "0us", "stop": "15us", "points": 61},
            "noise": {"temperature": "5.2uK", "t2_prime": "74us", "t1": "122us"},
            "fit": "damped-cosine"
        }"#,
        "fig4b" => r#"{
            "kind": "t1", "shots": 1, "seed": 1,
            "scan": {"start": "0us", "stop": "200us", "points": 21},
            "noise": {"t1_channels": ["209us", "940us"]},
            "fit": "exponential-no-offset"
        }"#,
        "fig5" => r#"{
            "kind": "control-fringe", "shots": 300, "seed": 1,
            "scan": {"start": "0us", "stop": "15us", "points": 6},
            "noise": {"temperature": "5.2uK", "t2_prime": "74us", "t1": "122us"},
            "fit": "exponential-no-offset"
        }"#,
        "fig6" => r#"{
            "kind": "cz-scan", "shots": 1, "seed": 1,
            "scan": {"start": "-2pi*100kHz", "stop": "2pi*100kHz", "points": 21},
            "gate": {"blockade": "2pi*1000MHz"},
            "fit": "parabola"
        }"#,
        "fig7" => r#"{
            "kind": "temperature-sweep", "shots": 1000, "seed": 1,
            "scan": {"start": "1uK", "stop": "5uK", "points": 5},
            "gate": {"blockade": "2pi*1000MHz"}
        }"#,
        // same gate driven on the two-photon transition
        "fig8" => r#"{
            "kind": "temperature-sweep", "shots": 1000, "seed": 1,
            "scan": {"start": "2uK", "stop": "10uK", "points": 5},
            "drives": {"transition": "two-photon", "rydberg_rabi": "2pi*1MHz"},
            "gate": {"blockade": "2pi*1000MHz"}
        }"#,
        _ => return None,
    })
}

/// Named preset configuration.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let json = preset_json(name)
        .ok_or_else(|| Error::config("preset", format!("unknown preset {name:?}; expected one of {}", PRESET_NAMES.join(", "))))?;
    serde_json::from_str(json).map_err(|e| Error::config("preset", format!("{name}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESET_NAMES {
            let c = preset(name).unwrap();
            c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset("fig9").is_err());
    }
}
