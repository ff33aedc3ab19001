use std::f64::consts::TAU;

use proptest::prelude::*;
use rydcoh_core::experiments::{calibrate_phases, preset, run_cz_detuning_scan, CzSchedule, GateOutcome};

const RABI: f64 = TAU * 1e6;

fn outcome(blockade: f64, rabi: (f64, f64), detuning: (f64, f64)) -> GateOutcome {
    let schedule = CzSchedule::new(blockade, RABI).unwrap();
    let phases = calibrate_phases(&schedule.reference().unwrap());
    GateOutcome::from_propagator(&schedule.propagator(rabi, detuning).unwrap(), phases)
}

#[test]
fn perfect_blockade_fidelity() {
    for blockade in [TAU * 1e9, TAU * 1e10] {
        let g = outcome(blockade, (RABI, RABI), (0.0, 0.0));
        assert!(g.fidelity >= 1.0 - 1e-6, "{}", g.fidelity);
        assert!(g.leakage.iter().all(|l| *l < 1e-6));
    }
}

#[test]
fn two_microsecond_schedule() {
    let s = CzSchedule::new(TAU * 1e9, RABI).unwrap();
    assert!((s.duration() - 2e-6).abs() < 1e-15);
}

#[test]
fn detuning_scan_is_even() {
    let c = preset("fig6").unwrap();
    let r = run_cz_detuning_scan(&c, 1, 0).unwrap();
    let n = r.len();
    for k in 0..n / 2 {
        let (lo, hi) = (r.mean_observable[k], r.mean_observable[n - 1 - k]);
        assert!((r.scan_values[k] + r.scan_values[n - 1 - k]).abs() < 1e-6);
        assert!((lo - hi).abs() < 0.1 * hi, "{lo} {hi}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gate_outcome_bookkeeping(
        blockade_mhz in 1.0..1000.0f64,
        dc in -0.3..0.3f64,
        dt in -0.3..0.3f64,
        sc in 0.9..1.1f64,
        st in 0.9..1.1f64,
    ) {
        let g = outcome(TAU * blockade_mhz * 1e6, (RABI * sc, RABI * st), (TAU * dc * 1e6, TAU * dt * 1e6));
        prop_assert!((0.0..=1.0).contains(&g.fidelity));
        prop_assert!(g.optimized_fidelity >= g.fidelity - 1e-12);
        let mean_leak = g.leakage.iter().sum::<f64>() / 4.0;
        prop_assert!(g.fidelity <= 1.0 - mean_leak + 1e-9);
        for k in 0..4 {
            prop_assert!(g.leakage[k] >= 0.0);
            let col: f64 = (0..4).map(|j| g.final_map[(j, k)].norm_sqr()).sum();
            prop_assert!((col - (1.0 - g.leakage[k])).abs() < 1e-9);
        }
    }

    #[test]
    fn fidelity_bounded_by_worst_leakage(
        blockade_mhz in 1.0..1000.0f64,
        dc in -0.3..0.3f64,
        dt in -0.3..0.3f64,
    ) {
        let g = outcome(TAU * blockade_mhz * 1e6, (RABI, RABI), (TAU * dc * 1e6, TAU * dt * 1e6));
        let worst = g.leakage.iter().fold(0.0f64, |m, l| m.max(*l));
        prop_assert!(g.fidelity <= 1.0 - worst + 1e-9, "F = {} worst leakage = {}", g.fidelity, worst);
    }
}
