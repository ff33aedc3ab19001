//! Unit-suffixed quantity strings used by experiment configs.
//!
//! Grammar: `[2pi*] number [unit]`, whitespace ignored. The `2pi*` prefix may
//! also be written `2π×`, `2π*` or `2*pi*`. Frequencies given in Hz, kHz,
//! MHz or GHz are cycles per second and have ×2π applied on ingest, so
//! `"1MHz"` and `"2pi*1MHz"` both parse to 2π·10⁶ rad/s. Bare numbers are taken
//! to be in SI base units (s, rad/s, K, m, kg).

use std::f64::consts::TAU;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Time,
    AngularFrequency,
    Temperature,
    Length,
    Mass,
    Dimensionless,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Time => "time",
            Dimension::AngularFrequency => "frequency",
            Dimension::Temperature => "temperature",
            Dimension::Length => "length",
            Dimension::Mass => "mass",
            Dimension::Dimensionless => "dimensionless",
        };
        f.write_str(s)
    }
}

fn unit_scale(unit: &str) -> Option<(Dimension, f64)> {
    use Dimension::*;
    let v = match unit {
        "" => return None,
        "s" => (Time, 1.0),
        "ms" => (Time, 1e-3),
        "us" | "µs" | "μs" => (Time, 1e-6),
        "ns" => (Time, 1e-9),
        "Hz" => (AngularFrequency, TAU),
        "kHz" => (AngularFrequency, TAU * 1e3),
        "MHz" => (AngularFrequency, TAU * 1e6),
        "GHz" => (AngularFrequency, TAU * 1e9),
        "rad/s" | "1/s" | "s^-1" => (AngularFrequency, 1.0),
        "rad/us" | "rad/µs" => (AngularFrequency, 1e6),
        "K" => (Temperature, 1.0),
        "mK" => (Temperature, 1e-3),
        "uK" | "µK" | "μK" => (Temperature, 1e-6),
        "nK" => (Temperature, 1e-9),
        "m" => (Length, 1.0),
        "mm" => (Length, 1e-3),
        "um" | "µm" | "μm" => (Length, 1e-6),
        "nm" => (Length, 1e-9),
        "kg" => (Mass, 1.0),
        "%" => (Dimensionless, 1e-2),
        _ => return Some((Dimensionless, f64::NAN)),
    };
    Some(v)
}

fn strip_two_pi(s: &str) -> (bool, &str) {
    for prefix in ["2pi*", "2π×", "2π*", "2*pi*", "2pi×", "2π"] {
        if let Some(rest) = s.strip_prefix(prefix) {
            return (true, rest);
        }
    }
    (false, s)
}

/// Parses a quantity string, checking it against the expected dimension.
/// Returns the value in SI base units (angular units for frequencies).
pub fn parse_quantity(input: &str, expected: Dimension) -> Result<f64> {
    let err = |reason: String| Error::Unit { input: input.to_string(), reason };
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let (negative, body) = match compact.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, compact.as_str()),
    };
    let (two_pi, body) = strip_two_pi(body);

    // Longest numeric prefix that parses as f64.
    let split = body
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(body.len()))
        .filter(|&i| body[..i].parse::<f64>().is_ok())
        .last()
        .ok_or_else(|| err("no numeric value".into()))?;
    let number: f64 = body[..split].parse().map_err(|_| err("no numeric value".into()))?;
    let unit = &body[split..];

    let mut value = match unit_scale(unit) {
        None => number,
        Some((dim, scale)) => {
            if scale.is_nan() {
                return Err(err(format!("unknown unit `{unit}`")));
            }
            if dim != expected {
                return Err(err(format!("expected a {expected}, found unit `{unit}` ({dim})")));
            }
            number * scale
        }
    };
    if two_pi {
        if expected != Dimension::AngularFrequency {
            return Err(err(format!("2π prefix is only valid for frequencies, not {expected}")));
        }
        // Hz-family units already carry the 2π; a bare number or rad/s does not.
        let already_angular = matches!(unit, "Hz" | "kHz" | "MHz" | "GHz");
        if !already_angular {
            value *= TAU;
        }
    }
    if negative {
        value = -value;
    }
    if !value.is_finite() {
        return Err(err("value is not finite".into()));
    }
    Ok(value)
}

macro_rules! quantity {
    ($(#[$meta:meta])* $name:ident, $dim:expr) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
        pub struct $name(pub f64);

        impl $name {
            pub const DIMENSION: Dimension = $dim;

            pub fn parse(s: &str) -> Result<Self> {
                parse_quantity(s, $dim).map($name)
            }

            #[inline]
            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl From<f64> for $name {
            fn from(v: f64) -> Self {
                $name(v)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_f64(self.0)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                d.deserialize_any(QuantityVisitor($dim)).map($name)
            }
        }
    };
}

struct QuantityVisitor(Dimension);

impl<'de> Visitor<'de> for QuantityVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a {} as a number (SI units) or a unit-suffixed string", self.0)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<f64, E> {
        parse_quantity(v, self.0).map_err(E::custom)
    }
}

quantity!(
    /// Time in seconds.
    Seconds,
    Dimension::Time
);
quantity!(
    /// Angular frequency in rad/s.
    RadPerSec,
    Dimension::AngularFrequency
);
quantity!(
    /// Temperature in kelvin.
    Kelvin,
    Dimension::Temperature
);
quantity!(
    /// Length in metres.
    Meters,
    Dimension::Length
);
quantity!(
    /// Mass in kilograms.
    Kilograms,
    Dimension::Mass
);
