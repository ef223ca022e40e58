//! Unit-annotated scalar values in configuration files.
//!
//! Physical quantities are strings of the form `"<number> <unit>"`, e.g.
//! `"5 kA"`, `"66 kV(ll-rms)"`, `"±800 kV"`, `"5 deg"`. Dimensionless
//! values may be bare numbers; transformer ratios may also be written as
//! `"30 kV/66 kV"`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::units::{hz_to_rad_per_s, ll_rms_to_ln_peak, pole_to_pole};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Number(x) => write!(f, "{x}"),
            Scalar::Text(s) => f.write_str(s),
        }
    }
}

impl Scalar {
    pub fn text(value: f64, unit: &str) -> Self {
        Scalar::Text(format!("{value} {unit}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    /// Dc voltage, kV; `±X` denotes a bipole and becomes `2X`.
    DcVoltage,
    /// Ac voltage, kV line-to-neutral peak; the unit must carry `(ll-rms)`
    /// or `(ln-peak)`.
    AcVoltage,
    Current,
    ActivePower,
    ReactivePower,
    ApparentPower,
    Resistance,
    ResistancePerLength,
    Length,
    Inductance,
    Angle,
    /// Accepts Hz or rad/s, stored as rad/s.
    AngularFrequency,
    Time,
    Ratio,
    Fraction,
}

impl Dim {
    fn expected(self) -> &'static str {
        match self {
            Dim::DcVoltage => "kV, V or MV (optionally ±X for a bipole)",
            Dim::AcVoltage => "kV(ll-rms) or kV(ln-peak)",
            Dim::Current => "kA or A",
            Dim::ActivePower => "MW, kW or GW",
            Dim::ReactivePower => "MVar or kvar",
            Dim::ApparentPower => "MVA or kVA",
            Dim::Resistance => "ohm or Ω",
            Dim::ResistancePerLength => "ohm/km or ohm/m",
            Dim::Length => "km or m",
            Dim::Inductance => "H, mH or uH",
            Dim::Angle => "deg or rad",
            Dim::AngularFrequency => "Hz or rad/s",
            Dim::Time => "s or ms",
            Dim::Ratio => "a bare number or \"<a> kV/<b> kV\"",
            Dim::Fraction => "a bare number or \"<x> %\"",
        }
    }

    fn scale(self, unit: &str) -> Option<f64> {
        let u = unit;
        Some(match self {
            Dim::DcVoltage | Dim::AcVoltage => match u {
                "kV" => 1.0,
                "V" => 1e-3,
                "MV" => 1e3,
                _ => return None,
            },
            Dim::Current => match u {
                "kA" => 1.0,
                "A" => 1e-3,
                _ => return None,
            },
            Dim::ActivePower => match u {
                "MW" => 1.0,
                "kW" => 1e-3,
                "GW" => 1e3,
                _ => return None,
            },
            Dim::ReactivePower => match u {
                "MVar" | "Mvar" | "MVAr" => 1.0,
                "kvar" | "kVar" => 1e-3,
                _ => return None,
            },
            Dim::ApparentPower => match u {
                "MVA" => 1.0,
                "kVA" => 1e-3,
                _ => return None,
            },
            Dim::Resistance => match u {
                "ohm" | "Ω" => 1.0,
                "kohm" | "kΩ" => 1e3,
                _ => return None,
            },
            Dim::ResistancePerLength => match u {
                "ohm/km" | "Ω/km" => 1.0,
                "ohm/m" | "Ω/m" => 1e3,
                _ => return None,
            },
            Dim::Length => match u {
                "km" => 1.0,
                "m" => 1e-3,
                _ => return None,
            },
            Dim::Inductance => match u {
                "H" => 1.0,
                "mH" => 1e-3,
                "uH" | "µH" => 1e-6,
                _ => return None,
            },
            Dim::Angle => match u {
                "rad" => 1.0,
                "deg" | "°" => PI / 180.0,
                _ => return None,
            },
            Dim::AngularFrequency => match u {
                "rad/s" => 1.0,
                _ => return None,
            },
            Dim::Time => match u {
                "s" => 1.0,
                "ms" => 1e-3,
                _ => return None,
            },
            Dim::Ratio => return None,
            Dim::Fraction => match u {
                "%" => 1e-2,
                _ => return None,
            },
        })
    }
}

fn mismatch(key: &str, found: &str, dim: Dim) -> ConfigError {
    ConfigError::UnitMismatch {
        key: key.to_string(),
        found: found.to_string(),
        expected: dim.expected().to_string(),
    }
}

fn number(key: &str, s: &str) -> Result<f64, ConfigError> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ConfigError::Invalid {
            key: key.to_string(),
            message: format!("`{s}` is not a finite number"),
        })
}

fn split_value(key: &str, text: &str) -> Result<(f64, bool, String), ConfigError> {
    let t = text.trim();
    let (bipole, t) = match t.strip_prefix('±').or_else(|| t.strip_prefix("+-")) {
        Some(rest) => (true, rest.trim_start()),
        None => (false, t),
    };
    let (num, unit) = t
        .split_once(char::is_whitespace)
        .map(|(n, u)| (n, u.trim()))
        .unwrap_or((t, ""));
    Ok((number(key, num)?, bipole, unit.to_string()))
}

/// Parses `raw` as a quantity of dimension `dim`, returning it in the
/// internal unit.
pub fn parse(key: &str, raw: &Scalar, dim: Dim) -> Result<f64, ConfigError> {
    let text = match raw {
        Scalar::Number(x) => {
            return match dim {
                Dim::Ratio | Dim::Fraction => Ok(*x),
                _ => Err(mismatch(key, &format!("{x} (no unit)"), dim)),
            }
        }
        Scalar::Text(s) => s.as_str(),
    };

    if dim == Dim::Ratio {
        if let Some((a, b)) = text.split_once('/') {
            let num = parse(key, &Scalar::Text(a.trim().into()), Dim::DcVoltage)?;
            let den = parse(key, &Scalar::Text(b.trim().into()), Dim::DcVoltage)?;
            if den == 0.0 {
                return Err(ConfigError::Invalid {
                    key: key.to_string(),
                    message: "ratio denominator is zero".into(),
                });
            }
            return Ok(num / den);
        }
        return number(key, text.trim());
    }

    let (value, bipole, unit) = split_value(key, text)?;
    if bipole && dim != Dim::DcVoltage {
        return Err(mismatch(key, text, dim));
    }
    if dim == Dim::Fraction {
        return match unit.as_str() {
            "" => Ok(value),
            "%" => Ok(value / 100.0),
            _ => Err(mismatch(key, text, dim)),
        };
    }

    if dim == Dim::AcVoltage {
        let (base, qualifier) = match unit.split_once('(') {
            Some((b, q)) => (b.trim(), q.trim_end_matches(')').trim()),
            None => return Err(mismatch(key, text, dim)),
        };
        let scale = dim.scale(base).ok_or_else(|| mismatch(key, text, dim))?;
        return match qualifier {
            "ll-rms" => Ok(ll_rms_to_ln_peak(value * scale)),
            "ln-peak" => Ok(value * scale),
            _ => Err(mismatch(key, text, dim)),
        };
    }

    if dim == Dim::AngularFrequency && (unit == "Hz" || unit == "kHz") {
        let f = if unit == "kHz" { value * 1e3 } else { value };
        return Ok(hz_to_rad_per_s(f));
    }

    let scale = dim.scale(&unit).ok_or_else(|| mismatch(key, text, dim))?;
    let v = value * scale;
    Ok(if bipole { pole_to_pole(v) } else { v })
}
