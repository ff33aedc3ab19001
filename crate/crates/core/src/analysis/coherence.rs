//! Closed-form coherence-time algebra and thermal estimates.

use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{Error, Result};
use crate::noise::doppler_sigma;

/// Gate-error law coefficient: `E ≈ 0.836 · (1 µs / T2*)²`.
pub const ERROR_LAW_COEFFICIENT: f64 = 0.836;

const MICROSECOND: f64 = 1e-6;

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 || v == f64::INFINITY {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive, got {v}")))
    }
}

/// `1/τ_gr = 1/T2* + 1/T2′ + 1/(2T1)`. Infinite inputs switch a channel off.
pub fn combine_coherence(t2_star: f64, t2_prime: f64, t1: f64) -> Result<f64> {
    positive("t2_star", t2_star)?;
    positive("t2_prime", t2_prime)?;
    positive("t1", t1)?;
    Ok(1.0 / (1.0 / t2_star + 1.0 / t2_prime + 0.5 / t1))
}

/// Inverts the budget from the Ramsey time, the echo time and T1:
/// `T2* = (1/τ_gr − 1/T2,sp)⁻¹`, `T2′ = (1/T2,sp − 1/(2T1))⁻¹`.
pub fn extract_coherence(tau_gr: f64, t2_spin_echo: f64, t1: f64) -> Result<(f64, f64)> {
    let t2_star = t2_star_from_echo(tau_gr, t2_spin_echo)?;
    let t2_prime = t2_prime_from_echo(t2_spin_echo, t1)?;
    Ok((t2_star, t2_prime))
}

/// `T2* = (1/τ_gr − 1/T2,sp)⁻¹`; requires `tau_gr < t2_echo`.
pub fn t2_star_from_echo(tau_gr: f64, t2_echo: f64) -> Result<f64> {
    positive("tau_gr", tau_gr)?;
    positive("t2_echo", t2_echo)?;
    if !(tau_gr < t2_echo) {
        return Err(Error::InconsistentBudget(format!(
            "requires tau_gr < t2_echo, got tau_gr = {tau_gr:e} s, t2_echo = {t2_echo:e} s"
        )));
    }
    Ok(1.0 / (1.0 / tau_gr - 1.0 / t2_echo))
}

/// `T2′ = (1/T2,sp − 1/(2T1))⁻¹`; requires `t2_echo < 2·t1`.
pub fn t2_prime_from_echo(t2_echo: f64, t1: f64) -> Result<f64> {
    positive("t2_echo", t2_echo)?;
    positive("t1", t1)?;
    if !(t2_echo < 2.0 * t1) {
        return Err(Error::InconsistentBudget(format!(
            "requires t2_echo < 2*t1, got t2_echo = {t2_echo:e} s, t1 = {t1:e} s"
        )));
    }
    Ok(1.0 / (1.0 / t2_echo - 0.5 / t1))
}

/// The ground-Rydberg coherence budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceBudget {
    pub t2_star: f64,
    pub t2_prime: f64,
    pub t1: f64,
    pub tau_gr: f64,
    pub t2_spin_echo: Option<f64>,
}

impl CoherenceBudget {
    /// Completes a budget from T2*, T2′ and T1.
    pub fn from_components(t2_star: f64, t2_prime: f64, t1: f64) -> Result<Self> {
        let tau_gr = combine_coherence(t2_star, t2_prime, t1)?;
        let t2_spin_echo = Some(1.0 / (1.0 / t2_prime + 0.5 / t1));
        Ok(CoherenceBudget { t2_star, t2_prime, t1, tau_gr, t2_spin_echo })
    }

    /// Completes a budget from the measured Ramsey and echo times and T1.
    pub fn from_measurements(tau_gr: f64, t2_spin_echo: f64, t1: f64) -> Result<Self> {
        let (t2_star, t2_prime) = extract_coherence(tau_gr, t2_spin_echo, t1)?;
        Ok(CoherenceBudget { t2_star, t2_prime, t1, tau_gr, t2_spin_echo: Some(t2_spin_echo) })
    }

    /// `|1/τ_gr − (1/T2* + 1/T2′ + 1/2T1)| · τ_gr`.
    pub fn consistency_residual(&self) -> f64 {
        let predicted = 1.0 / self.t2_star + 1.0 / self.t2_prime + 0.5 / self.t1;
        (1.0 / self.tau_gr - predicted).abs() * self.tau_gr
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t2_star", self.t2_star), ("t2_prime", self.t2_prime), ("t1", self.t1), ("tau_gr", self.tau_gr)] {
            positive(name, v)?;
        }
        if let Some(e) = self.t2_spin_echo {
            positive("t2_spin_echo", e)?;
        }
        let r = self.consistency_residual();
        if r >= 1e-6 {
            return Err(Error::InconsistentBudget(format!("1/tau_gr differs from the sum of channel rates by {r:e} (relative)")));
        }
        Ok(())
    }
}

/// Doppler-limited dephasing time `√2 / (k_eff √(k_B T / m))`.
pub fn estimate_t2_doppler(temperature: f64, k_eff: f64, mass: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::param("temperature", "must be positive"));
    }
    if k_eff == 0.0 || !k_eff.is_finite() {
        return Err(Error::param("k_eff", "must be nonzero"));
    }
    positive("mass", mass)?;
    Ok(std::f64::consts::SQRT_2 / doppler_sigma(temperature, k_eff, mass))
}

/// Ground hyperfine dephasing time from the trap's differential light shift,
/// `0.97 · 2ħ / (η k_B T)`.
pub fn estimate_t2_ground(temperature: f64, eta: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::param("temperature", "must be positive"));
    }
    if !(eta > 0.0) {
        return Err(Error::param("eta", "must be positive"));
    }
    Ok(0.97 * 2.0 * HBAR / (eta * BOLTZMANN * temperature))
}

/// Lifetime from spontaneous scattering off the intermediate level,
/// `4Δ² / (Ω_b² Γ)`.
pub fn estimate_scatter_lifetime(delta1: f64, omega_b: f64, gamma_e: f64) -> Result<f64> {
    for (name, v) in [("delta1", delta1), ("omega_b", omega_b), ("gamma_e", gamma_e)] {
        if v == 0.0 || !v.is_finite() {
            return Err(Error::param(name, "must be finite and nonzero"));
        }
    }
    Ok(4.0 * delta1 * delta1 / (omega_b * omega_b * gamma_e.abs()))
}

/// Harmonic combination `(Σ 1/T_i)⁻¹` of independent decay channels.
pub fn combine_lifetimes(lifetimes: &[f64]) -> Result<f64> {
    if lifetimes.is_empty() {
        return Err(Error::param("lifetimes", "need at least one channel"));
    }
    for t in lifetimes {
        positive("lifetime", *t)?;
    }
    Ok(1.0 / lifetimes.iter().map(|t| 1.0 / t).sum::<f64>())
}

/// Gate error predicted by the `0.836 (µs/T2*)²` law; `t2_star` in seconds.
pub fn error_from_t2star(t2_star: f64) -> Result<f64> {
    positive("t2_star", t2_star)?;
    Ok(ERROR_LAW_COEFFICIENT * (MICROSECOND / t2_star).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorLawFit {
    /// Coefficient of `(1 µs / T2*)²`.
    pub coefficient: f64,
    pub standard_error: f64,
    pub r_squared: f64,
}

/// Regresses error against `(1 µs / T2*)²` through the origin.
pub fn fit_error_law(pairs: &[(f64, f64)]) -> Result<ErrorLawFit> {
    if pairs.len() < 3 {
        return Err(Error::param("pairs", "need at least 3 (t2_star, error) pairs"));
    }
    for (t, e) in pairs {
        positive("t2_star", *t)?;
        if !(e.is_finite() && *e >= 0.0) {
            return Err(Error::param("error", "must be finite and non-negative"));
        }
    }
    let xs: Vec<f64> = pairs.iter().map(|(t, _)| (MICROSECOND / t).powi(2)).collect();
    let ys: Vec<f64> = pairs.iter().map(|(_, e)| *e).collect();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let c = sxy / sxx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - c * x).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let n = pairs.len() as f64;
    Ok(ErrorLawFit {
        coefficient: c,
        standard_error: (rss / (n - 1.0) / sxx).sqrt(),
        r_squared: if syy > 0.0 { 1.0 - rss / syy } else { 1.0 },
    })
}

/// Ordinary least squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::param("data", "need at least two (x, y) pairs of equal length"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param("data", "x values are all equal"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    Ok(LinearFit { slope, intercept: my - slope * mx, r_squared: if syy > 0.0 { 1.0 - rss / syy } else { 1.0 } })
}

/// Fits `y = c / √x` (least squares in c) and reports `(c, R²)`.
pub fn fit_inverse_sqrt(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::param("data", "need at least two pairs with positive x"));
    }
    let basis: Vec<f64> = xs.iter().map(|x| 1.0 / x.sqrt()).collect();
    let c = basis.iter().zip(ys).map(|(b, y)| b * y).sum::<f64>() / basis.iter().map(|b| b * b).sum::<f64>();
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let rss: f64 = basis.iter().zip(ys).map(|(b, y)| (y - c * b).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    Ok((c, if syy > 0.0 { 1.0 - rss / syy } else { 1.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::AtomPhysicalParams;
    use crate::constants::{RB87_MASS, RYDBERG_LIFETIME};
    use std::f64::consts::TAU;

    const US: f64 = 1e-6;

    #[test]
    fn combine_examples() {
        let tau = combine_coherence(12.7 * US, 74.0 * US, 122.0 * US).unwrap();
        assert!((tau / US - 10.38).abs() < 0.01, "{}", tau / US);
        assert_eq!(combine_coherence(5.0, f64::INFINITY, f64::INFINITY).unwrap(), 5.0);
        assert!((combine_coherence(3.0, 3.0, 3.0).unwrap() - 1.2).abs() < 1e-15);
        assert!(combine_coherence(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn extract_examples() {
        let t2p = t2_prime_from_echo(57.0 * US, 122.0 * US).unwrap();
        assert!((t2p / US - 74.4).abs() < 0.1, "{}", t2p / US);
        let t2s = t2_star_from_echo(10.0 * US, 57.0 * US).unwrap();
        assert!((t2s / US - 12.13).abs() < 0.01, "{}", t2s / US);
        let e = t2_star_from_echo(57.0 * US, 57.0 * US).unwrap_err();
        assert!(e.to_string().contains("tau_gr < t2_echo"));
        let e = t2_prime_from_echo(300.0 * US, 122.0 * US).unwrap_err();
        assert!(e.to_string().contains("t2_echo < 2*t1"));
    }

    #[test]
    fn budget_round_trip() {
        let b = CoherenceBudget::from_components(12.7 * US, 74.0 * US, 122.0 * US).unwrap();
        b.validate().unwrap();
        let back = CoherenceBudget::from_measurements(b.tau_gr, b.t2_spin_echo.unwrap(), b.t1).unwrap();
        assert!((back.t2_star / b.t2_star - 1.0).abs() < 1e-9);
        assert!((combine_coherence(back.t2_star, back.t2_prime, back.t1).unwrap() / b.tau_gr - 1.0).abs() < 1e-9);
    }

    #[test]
    fn thermal_estimates() {
        let k = AtomPhysicalParams::default().k_eff_two_photon();
        let t = estimate_t2_doppler(5.2e-6, k, RB87_MASS).unwrap();
        assert!((t / US - 12.6).abs() < 0.25, "{}", t / US);
        assert!((estimate_t2_doppler(4.0 * 5.2e-6, k, RB87_MASS).unwrap() / t - 0.5).abs() < 1e-12);
        assert!((estimate_t2_doppler(5.2e-6, 2.0 * k, RB87_MASS).unwrap() / t - 0.5).abs() < 1e-12);
        assert_eq!(t * doppler_sigma(5.2e-6, k, RB87_MASS), std::f64::consts::SQRT_2);

        let g = estimate_t2_ground(5.2e-6, 3.85e-4).unwrap();
        assert!((g / 1e-3 - 7.40).abs() < 0.074, "{}", g);
        assert!((estimate_t2_ground(10.4e-6, 3.85e-4).unwrap() / g - 0.5).abs() < 1e-12);
        assert!((estimate_t2_ground(5.2e-6, 7.7e-4).unwrap() / g - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lifetime_estimates() {
        let s = estimate_scatter_lifetime(TAU * 5.7e9, TAU * 62e6, TAU * 5.72e6).unwrap();
        assert!((s / US / 940.0 - 1.0).abs() < 0.01, "{}", s / US);
        let s2 = estimate_scatter_lifetime(TAU * 5.7e9, TAU * 62e6, TAU * 6.07e6).unwrap();
        assert!((s2 / US - 886.0).abs() < 2.0, "{}", s2 / US);
        assert!((estimate_scatter_lifetime(TAU * 5.7e9, TAU * 124e6, TAU * 6.07e6).unwrap() / s2 - 0.25).abs() < 1e-12);

        let t1 = combine_lifetimes(&[RYDBERG_LIFETIME, 940.0 * US]).unwrap();
        assert!((t1 / US / 170.9 - 1.0).abs() < 0.005, "{}", t1 / US);
        assert_eq!(combine_lifetimes(&[3.0]).unwrap(), 3.0);
        assert_eq!(combine_lifetimes(&[4.0, 4.0]).unwrap(), 2.0);
    }

    #[test]
    fn error_law() {
        let e = error_from_t2star(12.6 * US).unwrap();
        assert!((e - 5.27e-3).abs() < 0.01e-3, "{e}");
        assert!(error_from_t2star(f64::INFINITY).unwrap() == 0.0);
        let pairs: Vec<(f64, f64)> = [5.0, 8.0, 12.0, 20.0].iter().map(|t| (t * US, error_from_t2star(t * US).unwrap())).collect();
        let f = fit_error_law(&pairs).unwrap();
        assert!((f.coefficient - 0.836).abs() < 1e-9 * 0.836);
        assert!(fit_error_law(&pairs[..2]).is_err());
    }
}
