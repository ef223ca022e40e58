//! Corridor-level steady state: an LCC rectifier and inverter joined by a
//! bipolar line, with series taps adding a dc voltage boost `P_tap / I_dc`.
//!
//! All dc voltages are pole-to-pole magnitudes so that `P = U·I` closes.

use serde::{Deserialize, Serialize};

use crate::converter::{commutation_resistance, COMMUTATION_RESISTANCE_FACTOR};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::exec::{linspace, map_collect, Execution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorSpec {
    /// Ideal no-load dc voltage of the rectifier, kV.
    pub u_dc0_r: Option<f64>,
    /// Ideal no-load dc voltage of the inverter, kV.
    pub u_dc0_i: Option<f64>,
    /// Commutation reactances, Ω.
    pub x_lcc_r: f64,
    pub x_lcc_i: f64,
    /// Resistance per unit length of each conductor, Ω/km.
    pub r_0: f64,
    /// Line length, km.
    pub l_line: f64,
    pub p_corridor_rated: Option<f64>,
    /// Renewable power the sending-end grid admits, MW.
    pub p_res_sendend: Option<f64>,
    pub u_dcr_min: Option<f64>,
    pub u_dci_max: Option<f64>,
    pub u_dcr_rated: Option<f64>,
    pub u_dci_rated: Option<f64>,
    pub i_dc_rated: Option<f64>,
}

impl CorridorSpec {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("r_0", self.r_0)?;
        ensure_non_negative("l_line", self.l_line)?;
        ensure_non_negative("x_lcc_r", self.x_lcc_r)?;
        ensure_non_negative("x_lcc_i", self.x_lcc_i)?;
        if let (Some(lo), Some(hi)) = (self.u_dcr_min, self.u_dci_max) {
            if lo > hi {
                return Err(Error::InvalidInput(format!(
                    "u_dcr_min ({lo} kV) must not exceed u_dci_max ({hi} kV)"
                )));
            }
        }
        Ok(())
    }

    pub fn r_line(&self) -> f64 {
        line_resistance(self.r_0, self.l_line)
    }
}

fn required(v: Option<f64>, name: &'static str) -> Result<f64> {
    v.ok_or(Error::MissingParameter(name))
}

/// Loop resistance of a bipolar line: two conductors of `l_line` km.
pub fn line_resistance(r_0: f64, l_line: f64) -> f64 {
    2.0 * r_0 * l_line
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanEnergyLimit {
    pub eta_max: f64,
    /// Renewable share without taps.
    pub eta_baseline: f64,
    pub p_tap_max: f64,
    /// Dc current at the voltage boundary, kA.
    pub i_dc_b: f64,
}

/// Largest renewable share the corridor can carry once taps raise the line
/// voltage from the rectifier's lower limit to the inverter's upper limit.
pub fn max_clean_energy_ratio(spec: &CorridorSpec) -> Result<CleanEnergyLimit> {
    let p_rated = required(spec.p_corridor_rated, "p_corridor_rated")?;
    let p_res = required(spec.p_res_sendend, "p_res_sendend")?;
    let u_min = required(spec.u_dcr_min, "u_dcr_min")?;
    let u_max = required(spec.u_dci_max, "u_dci_max")?;
    ensure_positive("p_corridor_rated", p_rated)?;
    ensure_positive("u_dcr_min", u_min)?;
    ensure_positive("u_dci_max", u_max)?;
    let r = spec.r_line();
    ensure_non_negative("r_line", r)?;

    // With x = P_rated - P_tap and I_b = x / U_min the boundary condition
    // becomes R·x² + U_min·U_max·x - P_rated·U_min² = 0.
    let b = u_min * u_max;
    let c = p_rated * u_min * u_min;
    let disc = b * b + 4.0 * r * c;
    // positive root, written to avoid cancellation as R -> 0
    let x = 2.0 * c / (b + disc.sqrt());
    let p_tap = p_rated - x;
    if !(x > 0.0) || p_tap < 0.0 || p_tap >= p_rated || !p_tap.is_finite() {
        return Err(Error::InfeasibleCorridor(format!(
            "no tap power in [0, {p_rated}) MW satisfies the voltage boundary (root gives {p_tap:.6} MW)"
        )));
    }
    Ok(CleanEnergyLimit {
        eta_max: (p_res + p_tap) / p_rated,
        eta_baseline: p_res / p_rated,
        p_tap_max: p_tap,
        i_dc_b: x / u_min,
    })
}

/// Rating-design result: line length reachable with a given tap power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceLimit {
    pub l_line: f64,
    pub r_line: f64,
    pub p_rectifier: f64,
    pub p_tap: f64,
    pub p_line_loss: f64,
    pub p_inverter: f64,
}

impl DistanceLimit {
    /// `P_R + P_tap - P_loss - P_I`, zero up to rounding.
    pub fn balance_residual(&self) -> f64 {
        self.p_rectifier + self.p_tap - self.p_line_loss - self.p_inverter
    }
}

pub fn max_distance(spec: &CorridorSpec, p_tap_rated: f64) -> Result<DistanceLimit> {
    let u_r = required(spec.u_dcr_rated, "u_dcr_rated")?;
    let u_i = required(spec.u_dci_rated, "u_dci_rated")?;
    let i = required(spec.i_dc_rated, "i_dc_rated")?;
    ensure_positive("i_dc_rated", i)?;
    ensure_positive("r_0", spec.r_0)?;
    ensure_non_negative("p_tap_rated", p_tap_rated)?;
    if u_r < u_i {
        return Err(Error::InvalidInput(format!(
            "u_dcr_rated ({u_r} kV) must be >= u_dci_rated ({u_i} kV)"
        )));
    }
    let r_line = (u_r - u_i + p_tap_rated / i) / i;
    if r_line < 0.0 {
        return Err(Error::InfeasibleDesign(format!(
            "negative line resistance {r_line} Ω"
        )));
    }
    Ok(DistanceLimit {
        l_line: r_line / (2.0 * spec.r_0),
        r_line,
        p_rectifier: u_r * i,
        p_tap: p_tap_rated,
        p_line_loss: i * i * r_line,
        p_inverter: u_i * i,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TapBoost {
    pub tap: usize,
    pub delta_u: f64,
    pub p_tap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub i_dc: f64,
    pub u_dcr: f64,
    pub u_dci: f64,
    pub alpha_r: f64,
    pub gamma_i: f64,
    pub delta_u_line: f64,
    pub delta_u_tap_total: f64,
    pub per_tap_boost: Vec<TapBoost>,
}

impl SystemState {
    /// Voltage-balance residual around the loop, kV.
    pub fn balance_residual(&self) -> f64 {
        (self.u_dcr - self.u_dci) - (self.delta_u_line - self.delta_u_tap_total)
    }
}

fn control_angle(cos_value: f64, what: &str) -> Result<f64> {
    if cos_value > 0.0 && cos_value <= 1.0 {
        Ok(cos_value.acos())
    } else {
        Err(Error::InfeasibleCorridor(format!(
            "{what} requires cos = {cos_value:.6}, outside (0, 1]"
        )))
    }
}

/// Solves the corridor with the rectifier holding `i_dc` and the inverter
/// holding `u_dci`. Each entry of `taps` is one tap's active power, MW.
pub fn solve_system_state(
    spec: &CorridorSpec,
    i_dc: f64,
    u_dci: f64,
    taps: &[f64],
) -> Result<SystemState> {
    if !(i_dc > 0.0) {
        return Err(Error::NonPositiveDcCurrent(i_dc));
    }
    let u_dc0_r = required(spec.u_dc0_r, "u_dc0_r")?;
    let u_dc0_i = required(spec.u_dc0_i, "u_dc0_i")?;
    let delta_u_line = i_dc * spec.r_line();
    let per_tap_boost: Vec<TapBoost> = taps
        .iter()
        .enumerate()
        .map(|(tap, &p)| TapBoost {
            tap,
            delta_u: p / i_dc,
            p_tap: p,
        })
        .collect();
    let delta_u_tap_total = taps.iter().sum::<f64>() / i_dc;
    let u_dcr = u_dci + delta_u_line - delta_u_tap_total;

    let r_r = commutation_resistance(spec.x_lcc_r)?;
    let r_i = COMMUTATION_RESISTANCE_FACTOR * spec.x_lcc_i;
    let alpha_r = control_angle((u_dcr + i_dc * r_r) / u_dc0_r, "rectifier firing angle")?;
    let gamma_i = control_angle((u_dci - i_dc * r_i) / u_dc0_i, "inverter extinction angle")?;

    Ok(SystemState {
        i_dc,
        u_dcr,
        u_dci,
        alpha_r,
        gamma_i,
        delta_u_line,
        delta_u_tap_total,
        per_tap_boost,
    })
}

/// Inclusive range sampled at `steps` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.steps < 2 || !(self.to != self.from) {
            return Err(Error::InvalidInput(format!(
                "degenerate sweep axis {}..{} with {} steps",
                self.from, self.to, self.steps
            )));
        }
        Ok(linspace(self.from, self.to, self.steps))
    }
}

/// One sweep cell; `result` carries the reason when the cell is infeasible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell<T> {
    pub x: f64,
    pub y: f64,
    pub result: std::result::Result<T, String>,
}

fn grid_points(a: &Axis, b: &Axis) -> Result<Vec<(f64, f64)>> {
    let xs = a.values()?;
    let ys = b.values()?;
    Ok(xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect())
}

/// Clean-energy limit over rectifier/inverter voltage factors `k1`, `k2`
/// applied to the pole-to-pole base voltage `u_base`. Row-major in `k1`.
pub fn sweep_eta(
    spec: &CorridorSpec,
    u_base: f64,
    k1: &Axis,
    k2: &Axis,
    exec: Execution,
) -> Result<Vec<SweepCell<CleanEnergyLimit>>> {
    ensure_positive("u_base", u_base)?;
    let cells = grid_points(k1, k2)?;
    Ok(map_collect(exec, &cells, |&(a, b)| {
        let s = CorridorSpec {
            u_dcr_min: Some(a * u_base),
            u_dci_max: Some(b * u_base),
            ..spec.clone()
        };
        SweepCell {
            x: a,
            y: b,
            result: max_clean_energy_ratio(&s).map_err(|e| e.to_string()),
        }
    }))
}

/// Reachable line length over rectifier voltage factor `k3` (on `u_base`)
/// and rated tap power. Row-major in `k3`.
pub fn sweep_distance(
    spec: &CorridorSpec,
    u_base: f64,
    k3: &Axis,
    p_tap: &Axis,
    exec: Execution,
) -> Result<Vec<SweepCell<DistanceLimit>>> {
    ensure_positive("u_base", u_base)?;
    let cells = grid_points(k3, p_tap)?;
    let u_i = spec.u_dci_rated.unwrap_or(u_base);
    Ok(map_collect(exec, &cells, |&(k, p)| {
        let s = CorridorSpec {
            u_dcr_rated: Some(k * u_base),
            u_dci_rated: Some(u_i),
            ..spec.clone()
        };
        SweepCell {
            x: k,
            y: p,
            result: max_distance(&s, p).map_err(|e| e.to_string()),
        }
    }))
}
