use std::f64::consts::{FRAC_PI_2, TAU};

use rydcoh_core::constants::{BOLTZMANN, RB87_MASS};
use rydcoh_core::experiments::{
    preset, run_experiment, run_gr_ramsey, ExperimentConfig, ExperimentKind, Observable, QuantityInput, ScanSpec,
};
use rydcoh_core::noise::{doppler_sigma, ensemble_average, sample_atom, EnsembleResult, NoiseSpec};
use rydcoh_core::units::Kelvin;

fn bits(r: &EnsembleResult) -> Vec<u64> {
    r.scan_values.iter().chain(&r.mean_observable).chain(&r.standard_error).map(|v| v.to_bits()).collect()
}

fn doppler_ramsey(points: usize, stop: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::RamseyGr);
    c.noise.temperature = Kelvin(5.2e-6);
    c.sequence.observable = Observable::Contrast;
    c.scan = Some(ScanSpec::linear(QuantityInput::Text("0us".into()), QuantityInput::Text(stop.into()), points));
    c
}

#[test]
fn reruns_match_bit_for_bit_at_any_thread_count() {
    for name in ["fig3a", "fig4a", "fig5", "fig6"] {
        let c = preset(name).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run_experiment(&c, 40, 9).unwrap().primary())
        };
        let one = run(1);
        assert_eq!(bits(&one), bits(&run(1)), "{name}");
        assert_eq!(bits(&one), bits(&run(4)), "{name}");
    }
}

#[test]
fn standard_error_scales_as_inverse_root_shots() {
    let mut c = doppler_ramsey(11, "10us");
    c.sequence.observable = Observable::Population;
    let mean_se = |n: u64| {
        let r = run_gr_ramsey(&c, n, 3).unwrap();
        r.standard_error.iter().sum::<f64>() / r.len() as f64
    };
    let (a, b, d) = (mean_se(100), mean_se(400), mean_se(1600));
    for ratio in [a / b, b / d] {
        assert!((ratio / 2.0 - 1.0).abs() < 0.2, "{a} {b} {d}");
    }
}

#[test]
fn doppler_ramsey_contrast_follows_gaussian_oracle() {
    let c = doppler_ramsey(9, "20us");
    let r = run_gr_ramsey(&c, 4000, 21).unwrap();
    let sigma = doppler_sigma(5.2e-6, c.k_eff().unwrap(), RB87_MASS);
    // phase accrued during two finite π/2 pulses adds 4τ/π of free evolution
    let pulse = FRAC_PI_2 / c.rydberg_rabi().unwrap();
    for (t, got) in r.scan_values.iter().zip(&r.mean_observable) {
        let te = t + 4.0 * pulse / std::f64::consts::PI;
        let expect = (-0.5 * (sigma * te).powi(2)).exp();
        assert!((got - expect).abs() < 0.03, "t = {t}: {got} vs {expect}");
    }
}

#[test]
fn thermal_sampler_statistics() {
    let k = TAU / 780e-9 + TAU / 480e-9;
    let spec = NoiseSpec::doppler(5.2e-6, k, RB87_MASS).with_rabi_noise("blue", TAU * 1e6, TAU * 62e6);
    let n = 20000u64;
    let draws: Vec<_> = (0..n).map(|i| sample_atom(&spec, 4, i, 1)).collect();
    let mean = |f: &dyn Fn(usize) -> f64| (0..n as usize).map(f).sum::<f64>() / n as f64;
    let m = mean(&|i| draws[i].doppler_detuning);
    let var = mean(&|i| (draws[i].doppler_detuning - m).powi(2));
    let expect = doppler_sigma(5.2e-6, k, RB87_MASS);
    assert!((var.sqrt() / expect - 1.0).abs() < 0.03);
    let energy = mean(&|i| draws[i].thermal_energy);
    assert!((energy / (3.0 * BOLTZMANN * 5.2e-6) - 1.0).abs() < 0.03);
    let scale_sd = mean(&|i| (draws[i].rabi_scale("blue") - 1.0).powi(2)).sqrt();
    assert!((scale_sd / (1.0 / 62.0) - 1.0).abs() < 0.05);
    assert!(draws.iter().all(|d| d.rabi_scale("blue") > 0.0));
}

#[test]
fn ensemble_aggregation_is_order_independent() {
    let a = ensemble_average(vec![0.0, 1.0], 257, 0, |i| Ok(vec![i as f64, (i % 7) as f64])).unwrap();
    assert_eq!(a.mean_observable[0], 128.0);
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| ensemble_average(vec![0.0, 1.0], 257, 0, |i| Ok(vec![i as f64, (i % 7) as f64])).unwrap());
    assert_eq!(bits(&a), bits(&b));
}
