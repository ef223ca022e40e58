//! Conversions between the configuration-facing units and the internal
//! conventions (line-to-neutral peak ac voltage, pole-to-pole dc voltage,
//! radians, rad/s).

use std::f64::consts::PI;

/// Line-to-line RMS to line-to-neutral peak: `× √(2/3)`.
pub fn ll_rms_to_ln_peak(v_ll_rms: f64) -> f64 {
    v_ll_rms * (2.0f64 / 3.0).sqrt()
}

pub fn ln_peak_to_ll_rms(v_ln_peak: f64) -> f64 {
    v_ln_peak * (3.0f64 / 2.0).sqrt()
}

/// `±X kV` bipole notation to the pole-to-pole magnitude `2X`.
pub fn pole_to_pole(v_pole: f64) -> f64 {
    2.0 * v_pole
}

pub fn hz_to_rad_per_s(f: f64) -> f64 {
    2.0 * PI * f
}
