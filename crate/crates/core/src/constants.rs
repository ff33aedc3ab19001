//! Physical constants (CODATA 2018, SI units) and 87Rb defaults.

use std::f64::consts::TAU;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Mass of 87Rb in kg.
pub const RB87_MASS: f64 = 1.443_160_648e-25;

pub const WAVELENGTH_RED: f64 = 780e-9;
pub const WAVELENGTH_BLUE: f64 = 480e-9;
/// Single-photon 5S -> nP ground-Rydberg wavelength.
pub const WAVELENGTH_SINGLE_PHOTON: f64 = 297e-9;

/// Natural linewidth of the 5P3/2 intermediate level (angular).
pub const GAMMA_5P: f64 = TAU * 6.07e6;

pub const RYDBERG_LIFETIME: f64 = 209e-6;

/// Converts a frequency in cycles per second to angular frequency.
#[inline]
pub fn angular(hz: f64) -> f64 {
    TAU * hz
}

/// Converts an angular frequency back to cycles per second.
#[inline]
pub fn cycles(rad_per_s: f64) -> f64 {
    rad_per_s / TAU
}
