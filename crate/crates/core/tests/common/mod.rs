//! Helpers shared by the integration and acceptance tests.

#![allow(dead_code)]

use std::path::PathBuf;

use hvdc_taplab::cli::config::{parse_config, RunConfig};
use hvdc_taplab::corridor::CorridorSpec;

pub fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("presets")
        .join(name)
}

pub fn load_preset(name: &str) -> RunConfig {
    parse_config(&preset(name)).unwrap_or_else(|e| panic!("preset {name}: {e}"))
}

/// Root of a continuous `f` on `[lo, hi]` with a sign change, by bisection.
pub fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> Option<f64> {
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Clean-energy limit found by searching the boundary current instead of
/// solving the quadratic: the inverter receives the rated corridor power at
/// its upper voltage limit while the rectifier sits at its lower limit.
/// Returns the tap power at the boundary, MW.
pub fn clean_energy_oracle(spec: &CorridorSpec) -> Option<f64> {
    let p = spec.p_corridor_rated?;
    let u_min = spec.u_dcr_min?;
    let u_max = spec.u_dci_max?;
    let r = spec.r_line();
    let i = bisect(0.0, p / u_max, |i| u_max * i + r * i * i - p)?;
    Some(p - u_min * i)
}

/// Line length at which the loop power balance closes, found by bisection
/// on the line resistance. Returns km.
pub fn distance_oracle(spec: &CorridorSpec, p_tap: f64) -> Option<f64> {
    let u_r = spec.u_dcr_rated?;
    let u_i = spec.u_dci_rated?;
    let i = spec.i_dc_rated?;
    let balance = |r: f64| u_r * i + p_tap - i * i * r - u_i * i;
    let hi = (u_r * i + p_tap) / (i * i) * 2.0 + 1.0;
    let r = bisect(0.0, hi, balance)?;
    Some(r / (2.0 * spec.r_0))
}

/// The ±800 kV, 8000 MW corridor with a 2000 km line.
pub fn corridor_case() -> CorridorSpec {
    CorridorSpec {
        u_dc0_r: Some(2000.0),
        u_dc0_i: Some(1800.0),
        x_lcc_r: 10.0,
        x_lcc_i: 10.0,
        r_0: 0.006,
        l_line: 2000.0,
        p_corridor_rated: Some(8000.0),
        p_res_sendend: Some(1500.0),
        u_dcr_min: Some(0.9 * 1600.0),
        u_dci_max: Some(1.1 * 1600.0),
        u_dcr_rated: Some(1.1 * 1600.0),
        u_dci_rated: Some(1600.0),
        i_dc_rated: Some(5.0),
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
