//! Curve models in optimizer parameterization.
//!
//! Decay times enter as rates (or inverse widths) so the model stays smooth
//! when a decay is switched off or changes sign; frequencies and times are in
//! whatever units the abscissa uses.

use std::f64::consts::TAU;

use super::lm::CurveModel;

/// Kuhr envelope `α(t) = [1 + 0.95 (t/T)²]^{-3/2}`.
pub fn kuhr_envelope(t: f64, t2_star: f64) -> f64 {
    (1.0 + 0.95 * (t / t2_star).powi(2)).powf(-1.5)
}

/// Kuhr phase drag `κ(t) = −3 arctan(0.97 t / T)`.
pub fn kuhr_phase(t: f64, t2_star: f64) -> f64 {
    -3.0 * (0.97 * t / t2_star).atan()
}

/// `A e^{−γx} cos(2πνx + φ) + offset`; q = [A, offset, ν, φ, γ].
pub struct DampedCosine;

impl CurveModel for DampedCosine {
    fn name(&self) -> &'static str {
        "damped-cosine"
    }
    fn parameter_names(&self) -> &'static [&'static str] {
        &["A", "offset", "frequency", "phase", "rate"]
    }
    fn value(&self, x: f64, q: &[f64]) -> f64 {
        q[1] + q[0] * (-q[4] * x).exp() * (TAU * q[2] * x + q[3]).cos()
    }
    fn gradient(&self, x: f64, q: &[f64], g: &mut [f64]) {
        let e = (-q[4] * x).exp();
        let (s, c) = (TAU * q[2] * x + q[3]).sin_cos();
        g[0] = e * c;
        g[1] = 1.0;
        g[2] = -q[0] * e * s * TAU * x;
        g[3] = -q[0] * e * s;
        g[4] = -x * q[0] * e * c;
    }
}

/// `A cos(2πνx + φ) + offset`; q = [A, offset, ν, φ].
pub struct Cosine;

impl CurveModel for Cosine {
    fn name(&self) -> &'static str {
        "cosine"
    }
    fn parameter_names(&self) -> &'static [&'static str] {
        &["A", "offset", "frequency", "phase"]
    }
    fn value(&self, x: f64, q: &[f64]) -> f64 {
        q[1] + q[0] * (TAU * q[2] * x + q[3]).cos()
    }
    fn gradient(&self, x: f64, q: &[f64], g: &mut [f64]) {
        let (s, c) = (TAU * q[2] * x + q[3]).sin_cos();
        g[0] = c;
        g[1] = 1.0;
        g[2] = -q[0] * s * TAU * x;
        g[3] = -q[0] * s;
    }
}

/// `A e^{−γx} + offset`; q = [A, γ, offset].
pub struct Exponential;

impl CurveModel for Exponential {
    fn name(&self) -> &'static str {
        "exponential"
    }
    fn parameter_names(&self) -> &'static [&'static str] {
        &["A", "rate", "offset"]
    }
    fn value(&self, x: f64, q: &[f64]) -> f64 {
        q[2] + q[0] * (-q[1] * x).exp()
    }
    fn gradient(&self, x: f64, q: &[f64], g: &mut [f64]) {
        let e = (-q[1] * x).exp();
        g[0] = e;
        g[1] = -x * q[0] * e;
        g[2] = 1.0;
    }
}

/// `A e^{−(ux)²} + offset`; q = [A, u, offset].
pub struct GaussianDecay;

impl CurveModel for GaussianDecay {
    fn name(&self) -> &'static str {
        "gaussian"
    }
    fn parameter_names(&self) -> &'static [&'static str] {
        &["A", "inverse_width", "offset"]
    }
    fn value(&self, x: f64, q: &[f64]) -> f64 {
        q[2] + q[0] * (-(q[1] * x).powi(2)).exp()
    }
    fn gradient(&self, x: f64, q: &[f64], g: &mut [f64]) {
        let e = (-(q[1] * x).powi(2)).exp();
        g[0] = e;
        g[1] = -2.0 * q[0] * e * q[1] * x * x;
        g[2] = 1.0;
    }
}

/// `B + α(x) A cos(δx + κ(x) + φ)` with the Kuhr envelope and phase drag
/// written in terms of `u = 1/T`; q = [A, B, δ, φ, u].
pub struct KuhrRamsey;

impl CurveModel for KuhrRamsey {
    fn name(&self) -> &'static str {
        "kuhr"
    }
    fn parameter_names(&self) -> &'static [&'static str] {
        &["A", "B", "delta_prime", "phi", "inverse_t2_star"]
    }
    fn value(&self, x: f64, q: &[f64]) -> f64 {
        let ux = q[4] * x;
        let alpha = (1.0 + 0.95 * ux * ux).powf(-1.5);
        let kappa = -3.0 * (0.97 * ux).atan();
        q[1] + alpha * q[0] * (q[2] * x + kappa + q[3]).cos()
    }
    fn gradient(&self, x: f64, q: &[f64], g: &mut [f64]) {
        let ux = q[4] * x;
        let base = 1.0 + 0.95 * ux * ux;
        let alpha = base.powf(-1.5);
        let kappa = -3.0 * (0.97 * ux).atan();
        let (s, c) = (q[2] * x + kappa + q[3]).sin_cos();
        let dalpha = -1.5 * base.powf(-2.5) * 1.9 * q[4] * x * x;
        let dkappa = -3.0 * 0.97 * x / (1.0 + (0.97 * ux).powi(2));
        g[0] = alpha * c;
        g[1] = 1.0;
        g[2] = -alpha * q[0] * s * x;
        g[3] = -alpha * q[0] * s;
        g[4] = q[0] * (dalpha * c - alpha * s * dkappa);
    }
}

/// `p1d − prd · pre^n`; q = [p1d, prd, pre].
pub struct PiTrain;

impl CurveModel for PiTrain {
    fn name(&self) -> &'static str {
        "pi-train"
    }
    fn parameter_names(&self) -> &'static [&'static str] {
        &["p1d", "prd", "pre"]
    }
    fn value(&self, n: f64, q: &[f64]) -> f64 {
        q[0] - q[1] * q[2].powf(n)
    }
    fn gradient(&self, n: f64, q: &[f64], g: &mut [f64]) {
        g[0] = 1.0;
        g[1] = -q[2].powf(n);
        g[2] = if n == 0.0 { 0.0 } else { -q[1] * n * q[2].powf(n - 1.0) };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kuhr_closed_forms() {
        assert!((kuhr_envelope(1.0, 1.0) - 1.95f64.powf(-1.5)).abs() < 1e-15);
        assert!((kuhr_envelope(7.2e-3, 7.2e-3) - 0.367).abs() < 1e-3);
        assert_eq!(kuhr_phase(0.0, 7.2e-3), 0.0);
        // κ(0) = 0, α(0) = 1: plain cosine at the origin
        let q = [0.4, 0.5, 3.0, 0.2, 0.7];
        assert!((KuhrRamsey.value(0.0, &q) - (0.5 + 0.4 * 0.2f64.cos())).abs() < 1e-15);
    }
}
