//! Closed-form steady-state relations for a line-commutated converter (or
//! the LCC part of a hybrid tap) and for the full-bridge MMC part.
//!
//! Units: kV, kA, MW, MVar, MVA, Ω, H, rad. Ac voltages are line-to-neutral
//! peak values.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Ratio between the ideal no-load dc voltage and the valve-side
/// line-to-neutral peak ac voltage, `6√3/π`.
pub const NO_LOAD_DC_FACTOR: f64 = 6.0 * 1.732_050_807_568_877_2 / PI;

/// Ratio between the equivalent commutation resistance and the
/// commutation reactance, `6/π`.
pub const COMMUTATION_RESISTANCE_FACTOR: f64 = 6.0 / PI;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Ac operating condition at the point of common coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    /// Line-to-neutral peak voltage, kV.
    pub v_g: f64,
    /// Angular frequency, rad/s.
    pub omega_g: f64,
    /// Reactive power the tap injects into the PCC, MVar.
    pub q_eflcc: f64,
}

impl GridPoint {
    pub fn new(v_g: f64, omega_g: f64, q_eflcc: f64) -> Result<Self> {
        let g = Self {
            v_g,
            omega_g,
            q_eflcc,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("v_g", self.v_g)?;
        ensure_positive("omega_g", self.omega_g)?;
        if !self.q_eflcc.is_finite() {
            return Err(Error::InvalidInput("q_eflcc must be finite".into()));
        }
        Ok(())
    }

    pub fn with_q(self, q_eflcc: f64) -> Self {
        Self { q_eflcc, ..self }
    }
}

/// LCC part of the hybrid tap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LccPartParams {
    /// Transformer turns ratio, valve side over grid side.
    pub k_l: f64,
    /// Commutation reactance `ω_g·L_eL` referred to the grid side, Ω.
    pub x_el: f64,
    /// Nominal firing angle, rad.
    pub alpha_star: f64,
}

impl LccPartParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("k_l", self.k_l)?;
        ensure_non_negative("x_el", self.x_el)?;
        if !(0.0..PI / 2.0).contains(&self.alpha_star) {
            return Err(Error::Domain {
                quantity: "alpha_star",
                value: self.alpha_star,
                constraint: "must lie in [0, π/2)",
            });
        }
        Ok(())
    }
}

/// Full-bridge MMC part of the hybrid tap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FbmmcPartParams {
    pub k_m: f64,
    /// Transformer equivalent inductance, H.
    pub l_em: f64,
    /// Arm inductance, H.
    pub l_arm: f64,
    /// Rated capacitor-sum voltage per arm, kV.
    pub v_cap_sum_rating: f64,
    /// Switch RMS current limit, kA.
    pub rms_sch: f64,
    /// Switch peak current limit, kA.
    pub max_sch: f64,
    /// Apparent-power rating, MVA.
    pub s_rating: f64,
}

impl FbmmcPartParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("k_m", self.k_m)?;
        ensure_non_negative("l_em", self.l_em)?;
        ensure_non_negative("l_arm", self.l_arm)?;
        ensure_positive("v_cap_sum_rating", self.v_cap_sum_rating)?;
        ensure_positive("rms_sch", self.rms_sch)?;
        ensure_positive("max_sch", self.max_sch)?;
        ensure_positive("s_rating", self.s_rating)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LccRole {
    Rectifier,
    Inverter,
}

/// How the arm-internal EMF reference is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmfVariant {
    /// Series tap: dc current is imposed by the corridor.
    Eflcc,
    /// Stand-alone VSC form, carries the arm-inductor term.
    FlexLcc,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerTriple {
    pub p: f64,
    pub q: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ArmCurrents {
    pub rms: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmEnvelope {
    pub min: f64,
    pub max: f64,
}

pub fn no_load_dc_voltage(u_ac_ln_peak: f64) -> Result<f64> {
    ensure_non_negative("u_ac_ln_peak", u_ac_ln_peak)?;
    Ok(NO_LOAD_DC_FACTOR * u_ac_ln_peak)
}

pub fn commutation_resistance(x_c: f64) -> Result<f64> {
    ensure_non_negative("x_c", x_c)?;
    Ok(COMMUTATION_RESISTANCE_FACTOR * x_c)
}

/// Dc terminal voltage of a corridor converter. `angle` is the firing angle
/// for a rectifier and the extinction angle for an inverter.
pub fn lcc_terminal_voltage(
    role: LccRole,
    u_dc0: f64,
    angle: f64,
    r_eq: f64,
    i_dc: f64,
) -> Result<f64> {
    ensure_non_negative("i_dc", i_dc)?;
    let drop = i_dc * r_eq;
    Ok(match role {
        LccRole::Rectifier => u_dc0 * angle.cos() - drop,
        LccRole::Inverter => u_dc0 * angle.cos() + drop,
    })
}

/// Dc voltage of the tap's LCC part at firing angle `alpha`.
pub fn lcc_part_dc_voltage(
    lcc: &LccPartParams,
    grid: &GridPoint,
    alpha: f64,
    i_dc: f64,
) -> Result<f64> {
    ensure_non_negative("i_dc", i_dc)?;
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::Domain {
            quantity: "alpha",
            value: alpha,
            constraint: "must lie in [0, π]",
        });
    }
    Ok(NO_LOAD_DC_FACTOR * lcc.k_l * grid.v_g * alpha.cos()
        - COMMUTATION_RESISTANCE_FACTOR * lcc.k_l * lcc.k_l * lcc.x_el * i_dc)
}

/// Active, reactive and apparent power of the LCC part. Reactive power is
/// positive when absorbed from the PCC.
pub fn lcc_part_pq(
    lcc: &LccPartParams,
    grid: &GridPoint,
    alpha: f64,
    i_dc: f64,
) -> Result<PowerTriple> {
    let u_dcl = lcc_part_dc_voltage(lcc, grid, alpha, i_dc)?;
    let p = u_dcl * i_dc;
    let sqrt3_vg = SQRT_3 * grid.v_g;
    let denom = sqrt3_vg * alpha.cos() - lcc.k_l * lcc.x_el * i_dc;
    if denom <= 0.0 {
        return Err(Error::InfeasibleOperatingPoint(format!(
            "commutation overload: √3·V_g·cos α − k_L·X_eL·I_dc = {denom:.6} kV ≤ 0 \
             (alpha = {:.4}°, i_dc = {i_dc} kA)",
            alpha.to_degrees()
        )));
    }
    let ratio = sqrt3_vg / denom;
    // ratio >= 1 analytically; guard the rounding at alpha = 0, x_el = 0
    let q = p * (ratio * ratio - 1.0).max(0.0).sqrt();
    Ok(PowerTriple {
        p,
        q,
        s: p.hypot(q),
    })
}

/// Argument of the arccos that yields the low-power-coordination angle.
pub fn lpc_cosine(lcc: &LccPartParams, grid: &GridPoint, p_eflcc: f64, i_dc: f64) -> Result<f64> {
    ensure_positive("i_dc", i_dc)?;
    ensure_positive("k_l", lcc.k_l)?;
    Ok(p_eflcc / (NO_LOAD_DC_FACTOR * lcc.k_l * grid.v_g * i_dc)
        + lcc.k_l * lcc.x_el * i_dc / (SQRT_3 * grid.v_g))
}

/// Firing angle at which the LCC part alone carries `p_eflcc`, leaving the
/// FBMMC part with zero dc voltage.
pub fn lpc_firing_angle(
    lcc: &LccPartParams,
    grid: &GridPoint,
    p_eflcc: f64,
    i_dc: f64,
) -> Result<f64> {
    let c = lpc_cosine(lcc, grid, p_eflcc, i_dc)?;
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::InfeasibleLpc(format!(
            "arccos argument {c:.9} outside [-1, 1] for P = {p_eflcc} MW, I_dc = {i_dc} kA"
        )));
    }
    Ok(c.acos())
}

/// RMS and peak arm current of the FBMMC part.
pub fn fbmmc_arm_currents(
    s_fbmmc: f64,
    k_m: f64,
    grid: &GridPoint,
    i_dc: f64,
) -> Result<ArmCurrents> {
    let valve = k_m * grid.v_g;
    if valve <= 0.0 {
        return Err(Error::Domain {
            quantity: "k_m·v_g",
            value: valve,
            constraint: "valve-side voltage must be > 0",
        });
    }
    ensure_non_negative("i_dc", i_dc)?;
    ensure_non_negative("s_fbmmc", s_fbmmc)?;
    let i_ac = s_fbmmc / valve;
    Ok(ArmCurrents {
        rms: (i_dc * i_dc + 0.5 * i_ac * i_ac).sqrt() / 3.0,
        max: (i_dc + i_ac) / 3.0,
    })
}

/// Arm-internal EMF reference.
pub fn arm_emf(u_dcm: f64, di_dc_dt: f64, l_arm: f64, variant: EmfVariant) -> f64 {
    match variant {
        EmfVariant::Eflcc => u_dcm / 2.0,
        EmfVariant::FlexLcc => l_arm / 6.0 * di_dc_dt + u_dcm / 2.0,
    }
}

/// Range covered by the upper and lower arm voltages over one fundamental
/// period, for arm EMF `e_dcm` and valve-side peak voltage `u_m_peak`.
pub fn arm_voltage_envelope(e_dcm: f64, u_m_peak: f64) -> Result<ArmEnvelope> {
    ensure_non_negative("u_m_peak", u_m_peak)?;
    // upper arm e - u_M and lower arm e + u_M both span the same range
    // while u_M sweeps [-peak, peak]
    Ok(ArmEnvelope {
        min: e_dcm - u_m_peak,
        max: e_dcm + u_m_peak,
    })
}

pub fn equivalent_inductance(k_m: f64, l_em: f64, l_arm: f64) -> Result<f64> {
    ensure_positive("k_m", k_m)?;
    Ok(k_m * l_em + l_arm / (2.0 * k_m))
}

pub fn voltage_amplitude(v_gd: f64, v_gq: f64) -> f64 {
    v_gd.hypot(v_gq)
}
