use std::f64::consts::{PI, TAU};

use super::*;
use crate::analysis::{fit_exponential_decay, XyData};
use crate::units::{Kelvin, RadPerSec, Seconds};

fn q(s: &str) -> QuantityInput {
    QuantityInput::Text(s.into())
}

fn num(v: f64) -> QuantityInput {
    QuantityInput::Number(v)
}

fn values(v: &[f64]) -> ScanSpec {
    ScanSpec { values: Some(v.iter().map(|x| num(*x)).collect()), ..Default::default() }
}

fn quiet(kind: ExperimentKind) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind);
    c.noise.doppler = false;
    c
}

#[test]
fn rabi_first_minimum_at_pi_time() {
    let mut c = quiet(ExperimentKind::RabiGr);
    c.noise.ladder_decay = false;
    let omega = c.rydberg_rabi().unwrap();
    let t_pi = PI / omega;
    let grid: Vec<f64> = (0..201).map(|k| t_pi * (0.9 + 0.2 * k as f64 / 200.0)).collect();
    c.scan = Some(values(&grid));
    let r = run_rabi_scan(&c, 1, 0).unwrap();
    let (imin, _) = r.mean_observable.iter().enumerate().fold((0, f64::MAX), |a, (i, v)| if *v < a.1 { (i, *v) } else { a });
    assert!((grid[imin] / t_pi - 1.0).abs() < 0.01, "{}", grid[imin] / t_pi);
    assert!(r.mean_observable[imin] < 1e-3);
}

#[test]
fn rabi_zero_drive_is_flat_at_p1d() {
    let mut c = quiet(ExperimentKind::RabiGr);
    c.drives.blue_rabi = RadPerSec(0.0);
    c.drives.red_rabi = RadPerSec(0.0);
    c.drives.rydberg_rabi = Some(RadPerSec(1.0));
    c.detection = Some(DetectionConfig { p1d: 0.972, prd: 0.887 });
    c.scan = Some(ScanSpec::linear(q("0us"), q("5us"), 11));
    let r = run_rabi_scan(&c, 1, 0).unwrap();
    assert!(r.mean_observable.iter().all(|v| (v - 0.972).abs() < 1e-12));
}

#[test]
fn detection_disabled_gives_raw_population() {
    let mut c = quiet(ExperimentKind::T1);
    c.noise.t1 = Some(Seconds(50e-6));
    c.scan = Some(ScanSpec::linear(q("0us"), q("100us"), 5));
    let raw = run_t1_two_pi(&c, 1, 0).unwrap();
    // decay during the two π pulses costs under 1% here
    for (t, p) in raw.scan_values.iter().zip(&raw.mean_observable) {
        assert!((p - (-t / 50e-6f64).exp()).abs() < 1e-2, "{t} {p}");
    }
    c.detection = Some(DetectionConfig { p1d: 0.9, prd: 0.8 });
    let det = run_t1_two_pi(&c, 1, 0).unwrap();
    for (p, d) in raw.mean_observable.iter().zip(&det.mean_observable) {
        assert_eq!(*d, (0.9 - 0.8 * (1.0 - p)).max(0.0));
    }
}

#[test]
fn ground_ramsey_transfer_and_inversion() {
    let mut c = quiet(ExperimentKind::GroundRamsey);
    c.scan = Some(values(&[0.0]));
    let r = run_ground_ramsey(&c, 1, 0).unwrap();
    assert!(r.mean_observable[0] < 1e-12);

    let delta = TAU * 300.0;
    c.drives.ground_detuning = RadPerSec(delta);
    c.scan = Some(values(&[0.0, PI / delta, TAU / delta]));
    let r = run_ground_ramsey(&c, 1, 0).unwrap();
    let p = &r.mean_observable;
    // a half fringe period flips the fringe, a full one restores it
    assert!((p[0] + p[1] - 1.0).abs() < 1e-3, "{p:?}");
    assert!((p[2] - p[0]).abs() < 1e-3, "{p:?}");
}

#[test]
fn ground_ramsey_recovers_injected_t2_star() {
    // η chosen so the light-shift dephasing gives T2* = 7.2 ms at 5.2 µK
    let t2 = 7.2e-3;
    let temperature = 5.2e-6;
    let eta = 0.97 * 2.0 * crate::constants::HBAR / (crate::constants::BOLTZMANN * temperature * t2);
    let mut c = preset("fig2b").unwrap();
    c.noise.eta = Some(eta);
    c.noise.temperature = Kelvin(temperature);
    let r = run_ground_ramsey(&c, 2000, 7).unwrap();
    let f = crate::analysis::fit_ramsey_kuhr(&XyData::from_ensemble(&r).unwrap()).unwrap();
    let got = f.param("t2_star").unwrap();
    assert!((got / t2 - 1.0).abs() < 0.10, "{got}");
}

#[test]
fn echo_refocuses_static_doppler() {
    let mut ramsey = ExperimentConfig::new(ExperimentKind::RamseyGr);
    ramsey.noise.temperature = Kelvin(5.2e-6);
    ramsey.sequence.observable = Observable::Contrast;
    ramsey.scan = Some(ScanSpec::linear(q("0us"), q("20us"), 11));
    let mut echo = ramsey.clone();
    echo.kind = Some(ExperimentKind::SpinEcho);
    let r = run_gr_ramsey(&ramsey, 200, 3).unwrap();
    let e = run_spin_echo(&echo, 200, 3).unwrap();
    for (k, t) in r.scan_values.iter().enumerate() {
        assert!(e.mean_observable[k] >= 0.99, "echo contrast {} at {t}", e.mean_observable[k]);
        if *t > 0.0 {
            assert!(e.mean_observable[k] > r.mean_observable[k]);
        }
    }
    assert!(*r.mean_observable.last().unwrap() < 0.3);
}

#[test]
fn echo_with_decay_follows_rate_algebra() {
    let mut c = quiet(ExperimentKind::SpinEcho);
    c.noise.t1 = Some(Seconds(122e-6));
    c.noise.t2_prime = Some(Seconds(74e-6));
    c.scan = Some(ScanSpec::linear(q("0us"), q("150us"), 31));
    let r = run_spin_echo(&c, 1, 0).unwrap();
    let f = fit_exponential_decay(&XyData::from_ensemble(&r).unwrap(), Some(0.5)).unwrap();
    let expect = 1.0 / (1.0 / 74e-6 + 1.0 / (2.0 * 122e-6));
    assert!((f.param("tau").unwrap() / expect - 1.0).abs() < 0.05, "{:?}", f.params);
}

#[test]
fn t1_channels_combine() {
    let c = preset("fig4b").unwrap();
    let r = run_t1_two_pi(&c, 1, 0).unwrap();
    let f = fit_exponential_decay(&XyData::from_ensemble(&r).unwrap(), Some(0.0)).unwrap();
    assert!((f.param("tau").unwrap() / 170.9e-6 - 1.0).abs() < 0.01);

    let mut c = quiet(ExperimentKind::T1);
    c.noise.t1 = Some(Seconds(1e9));
    c.scan = Some(ScanSpec::linear(q("0us"), q("100us"), 5));
    let r = run_t1_two_pi(&c, 1, 0).unwrap();
    assert!(r.mean_observable.iter().all(|p| (p - 1.0).abs() < 1e-9));
}

#[test]
fn pi_train_population_and_parity() {
    let p = pi_train_rydberg_population(&[1, 3, 5], 0.984).unwrap();
    assert!((p[1] - 0.984f64.powi(3)).abs() < 1e-12);
    let survival = 0.972 - 0.887 * p[1];
    assert!((survival - 0.1268).abs() < 1e-4);

    let mut c = ExperimentConfig::new(ExperimentKind::PiTrain);
    c.detection = Some(DetectionConfig { p1d: 0.972, prd: 0.887 });
    c.scan = Some(values(&[1.0, 2.0]));
    assert!(matches!(run_pi_train(&c, 10, 0), Err(crate::Error::Config { .. })));
    c.scan = Some(values(&[3.0]));
    let r = run_pi_train(&c, 4000, 0).unwrap();
    assert!((r.mean_observable[0] - survival).abs() < 4.0 * r.standard_error[0]);
}

#[test]
fn control_fringe_noiseless_contrast_is_one() {
    let mut c = quiet(ExperimentKind::ControlFringe);
    c.scan = Some(ScanSpec::linear(q("0us"), q("10us"), 3));
    let r = run_control_fringe(&c, 1, 0).unwrap();
    for v in &r.contrast.mean_observable {
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }
    assert_eq!(r.fringes.len(), 3);
    assert_eq!(r.wait_times.len(), 12);
}

#[test]
fn control_fringe_reduces_to_ramsey_at_zero_gap() {
    let mut cf = ExperimentConfig::new(ExperimentKind::ControlFringe);
    cf.noise.temperature = Kelvin(5.2e-6);
    cf.noise.t1 = Some(Seconds(122e-6));
    cf.scan = Some(values(&[0.0]));
    let a = run_control_fringe(&cf, 300, 5).unwrap().contrast;

    let mut rg = cf.clone();
    rg.kind = Some(ExperimentKind::RamseyGr);
    rg.sequence.observable = Observable::Contrast;
    // two π pulses back to back: 2π/Ω of Rydberg exposure
    rg.scan = Some(values(&[0.0]));
    let b = run_gr_ramsey(&rg, 300, 5).unwrap();
    let se = a.standard_error[0].hypot(b.standard_error[0]).max(1e-3);
    assert!((a.mean_observable[0] - b.mean_observable[0]).abs() < 2.0 * se + 5e-3, "{a:?} {b:?}");
}

#[test]
fn perfect_blockade_gives_cz() {
    let mut c = quiet(ExperimentKind::CzGate);
    c.gate.blockade = RadPerSec(TAU * 10e9);
    let g = run_cz_gate(&c, 1, 0).unwrap();
    assert!(g.nominal.optimized_fidelity >= 1.0 - 1e-6);
    assert!(g.nominal.fidelity >= 1.0 - 1e-6);
    assert!((CzSchedule::new(TAU * 1e9, TAU * 1e6).unwrap().duration() - 2e-6).abs() < 1e-15);
}

#[test]
fn no_blockade_is_not_cz() {
    let mut c = quiet(ExperimentKind::CzGate);
    c.gate.blockade = RadPerSec(0.0);
    let g = run_cz_gate(&c, 1, 0).unwrap();
    assert!(g.nominal.error >= 0.5 - 1e-9, "{}", g.nominal.error);
    assert!(g.nominal.optimized_fidelity <= 0.5 + 1e-9);
}

#[test]
fn gate_outcome_invariants() {
    let schedule = CzSchedule::new(TAU * 1e9, TAU * 1e6).unwrap();
    let phases = calibrate_phases(&schedule.reference().unwrap());
    for k in 0..40 {
        let x = k as f64 / 40.0;
        let det = (TAU * 300e3 * (x - 0.5), TAU * 170e3 * (0.3 - x));
        let rabi = (TAU * 1e6 * (1.0 + 0.1 * (x - 0.4)), TAU * 1e6 * (1.0 - 0.07 * x));
        let g = GateOutcome::from_propagator(&schedule.propagator(rabi, det).unwrap(), phases);
        assert!((0.0..=1.0).contains(&g.fidelity));
        assert!(g.optimized_fidelity >= g.fidelity - 1e-12);
        let mean_leak = g.leakage.iter().sum::<f64>() / 4.0;
        assert!(g.fidelity <= 1.0 - mean_leak + 1e-9);
        for (col, leak) in g.leakage.iter().enumerate() {
            assert!(*leak >= 0.0);
            let norm: f64 = (0..4).map(|j| g.final_map[(j, col)].norm_sqr()).sum();
            assert!((norm - (1.0 - leak)).abs() < 1e-12);
        }
    }
}

#[test]
fn cz_error_even_in_control_detuning() {
    let c = preset("fig6").unwrap();
    let r = run_cz_detuning_scan(&c, 1, 0).unwrap();
    let n = r.len();
    for k in 0..n / 2 {
        let (a, b) = (r.mean_observable[k], r.mean_observable[n - 1 - k]);
        assert!((a - b).abs() < 0.1 * a.max(b), "{a} {b}");
    }
    assert!(r.mean_observable[n / 2] < 1e-4);
}

#[test]
fn bell_noiseless_and_unblockaded() {
    let mut c = quiet(ExperimentKind::Bell);
    c.gate.blockade = RadPerSec(TAU * 10e9);
    c.scan = Some(ScanSpec::linear(num(0.0), num(TAU), 25));
    let b = run_bell_sequence(&c, 1, 0).unwrap();
    assert!((b.p00 - 0.5).abs() < 1e-6 && (b.p11 - 0.5).abs() < 1e-6, "{} {}", b.p00, b.p11);
    assert!((b.parity_contrast - 1.0).abs() < 1e-4, "{}", b.parity_contrast);
    assert!((b.fidelity - 1.0).abs() < 1e-4);

    c.gate.blockade = RadPerSec(0.0);
    let b = run_bell_sequence(&c, 1, 0).unwrap();
    assert!(b.parity_contrast < 0.02, "{}", b.parity_contrast);
}

#[test]
fn bell_fidelity_falls_with_temperature() {
    let mut c = ExperimentConfig::new(ExperimentKind::Bell);
    c.scan = Some(ScanSpec::linear(num(0.0), num(TAU), 17));
    let mut last = 1.0 + 1e-12;
    for t in [0.0, 1e-6, 3e-6, 10e-6] {
        c.noise.temperature = Kelvin(t);
        let b = run_bell_sequence(&c, 100, 2).unwrap();
        assert!(b.fidelity < last, "T = {t}: {} vs {last}", b.fidelity);
        last = b.fidelity;
    }
}

#[test]
fn reruns_are_identical() {
    let mut c = preset("fig4a").unwrap();
    c.scan = Some(ScanSpec::linear(q("0us"), q("10us"), 11));
    let a = run_ensemble(&c, 50, 9).unwrap();
    let b = run_ensemble(&c, 50, 9).unwrap();
    assert_eq!(a, b);
    let other = run_ensemble(&c, 50, 10).unwrap();
    assert_ne!(a.mean_observable, other.mean_observable);
}

#[test]
fn kind_mismatch_is_config_error() {
    let c = preset("fig4a").unwrap();
    let err = run_spin_echo(&c, 1, 0).unwrap_err();
    assert!(err.to_string().contains("kind"));
}
