//! Quantities written as `"<number> <unit>"` strings or bare SI numbers.

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Mass,
    Time,
    Speed,
    Density,
    Angle,
    AngularRate,
    Dimensionless,
}

impl Dimension {
    fn units(self) -> &'static [(&'static str, f64)] {
        const DEG: f64 = std::f64::consts::PI / 180.0;
        match self {
            Self::Length => &[("m", 1.0), ("km", 1e3), ("cm", 1e-2)],
            Self::Mass => &[("kg", 1.0), ("g", 1e-3), ("t", 1e3)],
            Self::Time => &[("s", 1.0), ("min", 60.0), ("h", 3600.0), ("d", 86400.0)],
            Self::Speed => &[("m/s", 1.0), ("km/s", 1e3), ("km/h", 1e3 / 3600.0), ("m/h", 1.0 / 3600.0)],
            Self::Density => &[
                ("kg/m^3", 1.0),
                ("kg/m3", 1.0),
                ("kg/m³", 1.0),
                ("g/cm^3", 1e3),
                ("g/cm3", 1e3),
                ("g/cm³", 1e3),
            ],
            Self::Angle => &[("rad", 1.0), ("deg", DEG)],
            Self::AngularRate => &[("rad/s", 1.0), ("deg/s", DEG)],
            Self::Dimensionless => &[],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Length => "length",
            Self::Mass => "mass",
            Self::Time => "time",
            Self::Speed => "speed",
            Self::Density => "density",
            Self::Angle => "angle",
            Self::AngularRate => "angular rate",
            Self::Dimensionless => "dimensionless",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {message}")]
pub struct UnitError {
    pub field: String,
    pub message: String,
}

/// A config value: a bare number (already SI) or `"value unit"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Self::Number(v)
    }
}

impl From<&str> for Quantity {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

impl Quantity {
    /// Value in SI units, checked against `dimension`.
    pub fn si(&self, dimension: Dimension, field: &str) -> Result<f64, UnitError> {
        let err = |message: String| UnitError {
            field: field.to_string(),
            message,
        };
        let text = match self {
            Self::Number(v) => return Ok(*v),
            Self::Text(t) => t.trim(),
        };
        let split = text.find(|c: char| c.is_whitespace()).unwrap_or(text.len());
        let (number, unit) = text.split_at(split);
        let value: f64 = number
            .parse()
            .map_err(|_| err(format!("cannot read a number from `{text}`")))?;
        let unit = unit.trim();
        if unit.is_empty() {
            return Ok(value);
        }
        dimension
            .units()
            .iter()
            .find(|(name, _)| *name == unit)
            .map(|(_, scale)| value * scale)
            .ok_or_else(|| {
                let known: Vec<&str> = dimension.units().iter().map(|(n, _)| *n).collect();
                err(format!(
                    "unit `{unit}` is not a {} unit (expected one of {})",
                    dimension.name(),
                    known.join(", ")
                ))
            })
    }
}

pub fn vector_si(values: &[Quantity; 3], dimension: Dimension, field: &str) -> Result<[f64; 3], UnitError> {
    let mut out = [0.0; 3];
    for (k, (o, q)) in out.iter_mut().zip(values).enumerate() {
        *o = q.si(dimension, &format!("{field}[{k}]"))?;
    }
    Ok(out)
}
