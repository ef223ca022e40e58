//! Composite steady state of the hybrid series tap: an LCC part and a
//! full-bridge MMC part stacked in series on the dc side and paralleled at
//! the PCC.
//!
//! With the firing angle held at α*, the LCC part's dc voltage and power are
//! fixed by `I_dc` and the ac voltage, so every change in tap power lands on
//! the FBMMC part. Below the LCC part's nominal power this forces the FBMMC
//! into reverse power flow (circulation). Low-power coordination (LPC) lifts
//! the firing angle until the LCC part carries the whole tap power.

use serde::{Deserialize, Serialize};

use crate::converter::{
    arm_emf, arm_voltage_envelope, fbmmc_arm_currents, lcc_part_dc_voltage, lcc_part_pq,
    lpc_cosine, ArmCurrents, EmfVariant, FbmmcPartParams, GridPoint, LccPartParams,
};
use crate::error::{ensure_positive, Error, Result};
use crate::exec::{linspace, map_collect, Execution};

/// Largest firing angle the LPC may command.
pub const LPC_MAX_ALPHA_DEG: f64 = 89.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EflccParams {
    pub lcc: LccPartParams,
    pub fbmmc: FbmmcPartParams,
    /// MW
    pub p_rated: f64,
    /// MVar
    pub q_rated: f64,
    /// kA
    pub i_dc_rated: f64,
}

impl EflccParams {
    pub fn validate(&self) -> Result<()> {
        self.lcc.validate()?;
        self.fbmmc.validate()?;
        ensure_positive("p_rated", self.p_rated)?;
        ensure_positive("q_rated", self.q_rated)?;
        ensure_positive("i_dc_rated", self.i_dc_rated)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FixedAlpha,
    Lpc,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::FixedAlpha => "fixed_alpha",
            Mode::Lpc => "lpc",
        }
    }
}

/// One solved steady state of the tap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EflccOperatingPoint {
    pub i_dc: f64,
    pub p_eflcc: f64,
    pub q_eflcc: f64,
    pub mode: Mode,
    /// Effective firing angle of the LCC part, rad.
    pub alpha: f64,
    pub u_dcl: f64,
    pub u_dcm: f64,
    pub u_dc: f64,
    /// Arm-internal EMF reference, kV.
    pub e_dcm: f64,
    pub p_lcc: f64,
    pub q_lcc: f64,
    pub s_lcc: f64,
    pub p_fbmmc: f64,
    pub q_fbmmc: f64,
    pub s_fbmmc: f64,
    pub arm_rms: f64,
    pub arm_max: f64,
    /// Valve-side peak ac voltage of the FBMMC part, kV.
    pub u_m_peak: f64,
}

/// LCC part operating at the nominal firing angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NominalLccPoint {
    pub p_lcc_star: f64,
    pub q_lcc_star: f64,
    pub s_lcc_star: f64,
    pub u_dcl: f64,
}

pub fn nominal_lcc_point(
    params: &EflccParams,
    grid: &GridPoint,
    i_dc: f64,
) -> Result<NominalLccPoint> {
    let lcc = &params.lcc;
    let u_dcl = lcc_part_dc_voltage(lcc, grid, lcc.alpha_star, i_dc)?;
    let pq = lcc_part_pq(lcc, grid, lcc.alpha_star, i_dc)?;
    Ok(NominalLccPoint {
        p_lcc_star: pq.p,
        q_lcc_star: pq.q,
        s_lcc_star: pq.s,
        u_dcl,
    })
}

/// Firing angle for the LPC, clamped to `[α*, 89°]`.
fn lpc_alpha(params: &EflccParams, grid: &GridPoint, p_eflcc: f64, i_dc: f64) -> Result<f64> {
    let alpha_star = params.lcc.alpha_star;
    let c = lpc_cosine(&params.lcc, grid, p_eflcc, i_dc)?;
    if c >= alpha_star.cos() {
        // only reachable through rounding at the mode boundary
        return Ok(alpha_star);
    }
    let alpha_max = LPC_MAX_ALPHA_DEG.to_radians();
    if c < alpha_max.cos() {
        return Err(Error::InfeasibleLpc(format!(
            "P = {p_eflcc} MW at I_dc = {i_dc} kA needs cos α = {c:.6}, beyond the {LPC_MAX_ALPHA_DEG}° limit"
        )));
    }
    Ok(c.acos())
}

/// Solves the tap at dc current `i_dc` delivering `p_eflcc`, with the
/// reactive setpoint taken from `grid.q_eflcc`.
pub fn solve_operating_point(
    params: &EflccParams,
    grid: &GridPoint,
    i_dc: f64,
    p_eflcc: f64,
    lpc_enabled: bool,
) -> Result<EflccOperatingPoint> {
    if !(i_dc > 0.0) {
        return Err(Error::NonPositiveDcCurrent(i_dc));
    }
    grid.validate()?;
    if !(p_eflcc >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "tap power must be >= 0 MW, got {p_eflcc}"
        )));
    }
    let nominal = nominal_lcc_point(params, grid, i_dc)?;
    let u_dc = p_eflcc / i_dc;
    let q_eflcc = grid.q_eflcc;

    let (mode, alpha, u_dcl, lcc_pq) = if lpc_enabled && p_eflcc <= nominal.p_lcc_star {
        let alpha = lpc_alpha(params, grid, p_eflcc, i_dc)?;
        let u_dcl = lcc_part_dc_voltage(&params.lcc, grid, alpha, i_dc)?;
        let pq = lcc_part_pq(&params.lcc, grid, alpha, i_dc)?;
        (Mode::Lpc, alpha, u_dcl, pq)
    } else {
        let pq = crate::converter::PowerTriple {
            p: nominal.p_lcc_star,
            q: nominal.q_lcc_star,
            s: nominal.s_lcc_star,
        };
        (Mode::FixedAlpha, params.lcc.alpha_star, nominal.u_dcl, pq)
    };

    let u_dcm = u_dc - u_dcl;
    let p_fbmmc = p_eflcc - lcc_pq.p;
    let q_fbmmc = lcc_pq.q + q_eflcc;
    let s_fbmmc = p_fbmmc.hypot(q_fbmmc);
    let ArmCurrents { rms, max } = fbmmc_arm_currents(s_fbmmc, params.fbmmc.k_m, grid, i_dc)?;

    Ok(EflccOperatingPoint {
        i_dc,
        p_eflcc,
        q_eflcc,
        mode,
        alpha,
        u_dcl,
        u_dcm,
        u_dc,
        e_dcm: arm_emf(u_dcm, 0.0, params.fbmmc.l_arm, EmfVariant::Eflcc),
        p_lcc: lcc_pq.p,
        q_lcc: lcc_pq.q,
        s_lcc: lcc_pq.s,
        p_fbmmc,
        q_fbmmc,
        s_fbmmc,
        arm_rms: rms,
        arm_max: max,
        u_m_peak: params.fbmmc.k_m * grid.v_g,
    })
}

/// Internal power split over evenly spaced tap powers.
#[allow(clippy::too_many_arguments)]
pub fn power_distribution_sweep(
    params: &EflccParams,
    grid: &GridPoint,
    i_dc: f64,
    p_from: f64,
    p_to: f64,
    steps: usize,
    lpc_enabled: bool,
    exec: Execution,
) -> Result<Vec<EflccOperatingPoint>> {
    if steps < 2 {
        return Err(Error::InvalidInput(format!(
            "sweep needs at least 2 steps, got {steps}"
        )));
    }
    let powers = linspace(p_from, p_to, steps);
    map_collect(exec, &powers, |&p| {
        solve_operating_point(params, grid, i_dc, p, lpc_enabled)
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    ArmRms,
    ArmMax,
    ApparentPower,
    ArmVoltageUpper,
    ArmVoltageLower,
}

impl Limit {
    pub fn as_str(self) -> &'static str {
        match self {
            Limit::ArmRms => "arm_rms",
            Limit::ArmMax => "arm_max",
            Limit::ApparentPower => "s_fbmmc",
            Limit::ArmVoltageUpper => "arm_voltage_upper",
            Limit::ArmVoltageLower => "arm_voltage_lower",
        }
    }
}

/// A single rating check. `margin = limit - value`; negative means violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    pub limit: Limit,
    pub value: f64,
    pub rating: f64,
    pub margin: f64,
}

impl LimitCheck {
    fn new(limit: Limit, value: f64, rating: f64) -> Self {
        Self {
            limit,
            value,
            rating,
            margin: rating - value,
        }
    }

    pub fn relative_margin(&self) -> f64 {
        self.margin / self.rating
    }

    pub fn is_violated(&self) -> bool {
        self.margin < 0.0
    }
}

/// Every rating check for `point`, violated or not.
pub fn envelope_checks(point: &EflccOperatingPoint, params: &EflccParams) -> Vec<LimitCheck> {
    let f = &params.fbmmc;
    let mut checks = vec![
        LimitCheck::new(Limit::ArmRms, point.arm_rms, f.rms_sch),
        LimitCheck::new(Limit::ArmMax, point.arm_max, f.max_sch),
        LimitCheck::new(Limit::ApparentPower, point.s_fbmmc, f.s_rating),
    ];
    if let Ok(env) = arm_voltage_envelope(point.e_dcm, point.u_m_peak) {
        checks.push(LimitCheck::new(
            Limit::ArmVoltageUpper,
            env.max,
            f.v_cap_sum_rating,
        ));
        checks.push(LimitCheck::new(
            Limit::ArmVoltageLower,
            -env.min,
            f.v_cap_sum_rating,
        ));
    }
    checks
}

/// Rating checks that `point` fails. Empty when the point is inside the envelope.
pub fn validate_envelope(point: &EflccOperatingPoint, params: &EflccParams) -> Vec<LimitCheck> {
    envelope_checks(point, params)
        .into_iter()
        .filter(LimitCheck::is_violated)
        .collect()
}
