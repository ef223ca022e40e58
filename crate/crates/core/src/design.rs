//! Main-circuit parameter design for the hybrid tap and the side-by-side
//! comparison against a tap built from an FBMMC alone.

use serde::{Deserialize, Serialize};

use crate::converter::{
    fbmmc_arm_currents, lcc_part_dc_voltage, lcc_part_pq, ArmCurrents, FbmmcPartParams, GridPoint,
    LccPartParams, COMMUTATION_RESISTANCE_FACTOR, NO_LOAD_DC_FACTOR,
};
use crate::eflcc::{power_distribution_sweep, EflccOperatingPoint, EflccParams};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::exec::Execution;
use crate::units::ln_peak_to_ll_rms;

/// Average station loss as a fraction of apparent power.
pub const LCC_LOSS_FRACTION: f64 = 0.0063;
pub const FBMMC_LOSS_FRACTION: f64 = 0.0108;

/// Relative slack allowed when re-checking the ratio constraints.
const CONSTRAINT_TOL: f64 = 1e-9;

/// Points used to trace the FBMMC dc-voltage range for capacitor sizing.
const ENVELOPE_POINTS: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    /// Rated PCC condition; its `q_eflcc` is ignored in favour of `q_rated`.
    pub grid: GridPoint,
    pub i_dc_rated: f64,
    pub p_rated: f64,
    pub q_rated: f64,
    pub alpha_star: f64,
    pub x_el: f64,
    pub lpc_planned: bool,
    pub rms_sch: f64,
    pub max_sch: f64,
    /// Capacitor-sum voltage headroom over the arm-voltage envelope.
    pub envelope_margin: f64,
    /// Valve-side LL-RMS step of the transformer ratio ladder, kV.
    pub ratio_step_kv: f64,
    pub l_em: f64,
    pub l_arm: f64,
    /// Optional capacitor-sum targets to back-compute the implied margin.
    pub v_cap_sum_reference_eflcc: Option<f64>,
    pub v_cap_sum_reference_fbmmc: Option<f64>,
}

impl DesignSpec {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        ensure_positive("i_dc_rated", self.i_dc_rated)?;
        ensure_positive("p_rated", self.p_rated)?;
        ensure_non_negative("q_rated", self.q_rated)?;
        ensure_non_negative("x_el", self.x_el)?;
        ensure_positive("rms_sch", self.rms_sch)?;
        ensure_positive("max_sch", self.max_sch)?;
        ensure_non_negative("envelope_margin", self.envelope_margin)?;
        ensure_positive("ratio_step_kv", self.ratio_step_kv)?;
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&self.alpha_star) {
            return Err(Error::Domain {
                quantity: "alpha_star",
                value: self.alpha_star,
                constraint: "must lie in [0, π/2)",
            });
        }
        Ok(())
    }

    pub fn rated_grid(&self) -> GridPoint {
        self.grid.with_q(self.q_rated)
    }

    fn lcc(&self, k_l: f64) -> LccPartParams {
        LccPartParams {
            k_l,
            x_el: self.x_el,
            alpha_star: self.alpha_star,
        }
    }

    /// Grid-side line-to-line RMS voltage, kV.
    pub fn grid_ll_rms(&self) -> f64 {
        ln_peak_to_ll_rms(self.grid.v_g)
    }
}

/// Outcome of re-checking the active-power bracket on the LCC part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub lpc_planned: bool,
    pub p_lcc_star: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

impl ConstraintReport {
    fn evaluate(p_lcc_star: f64, p_rated: f64, lpc_planned: bool) -> Self {
        let (lower, upper) = if lpc_planned {
            (p_rated / 2.0, p_rated)
        } else {
            (0.0, p_rated / 2.0)
        };
        let slack = CONSTRAINT_TOL * p_rated;
        Self {
            lpc_planned,
            p_lcc_star,
            lower,
            upper,
            pass: p_lcc_star >= lower - slack && p_lcc_star <= upper + slack,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlDesign {
    pub k_l: f64,
    pub constraint: ConstraintReport,
}

/// Smaller positive root of
/// `(6/π)·X·I·k² − (6√3/π)·V_g·cos α*·k + P/(2I) = 0`,
/// which places half the rated power on the LCC part.
pub fn design_kl(spec: &DesignSpec) -> Result<KlDesign> {
    spec.validate()?;
    let i = spec.i_dc_rated;
    let a = COMMUTATION_RESISTANCE_FACTOR * spec.x_el * i;
    let b = NO_LOAD_DC_FACTOR * spec.grid.v_g * spec.alpha_star.cos();
    let c = spec.p_rated / (2.0 * i);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(Error::NoFeasibleRatio { discriminant: disc });
    }
    // smaller root in cancellation-free form; reduces to c/b when a = 0
    let k_l = 2.0 * c / (b + disc.sqrt());
    if !(k_l > 0.0) || !k_l.is_finite() {
        return Err(Error::NoFeasibleRatio { discriminant: disc });
    }
    let p_lcc_star = lcc_part_dc_voltage(&spec.lcc(k_l), &spec.grid, spec.alpha_star, i)? * i;
    let constraint = ConstraintReport::evaluate(p_lcc_star, spec.p_rated, spec.lpc_planned);
    if !constraint.pass {
        return Err(Error::InfeasibleDesign(format!(
            "P_LCC at α* = {p_lcc_star} MW falls outside [{}, {}] MW",
            constraint.lower, constraint.upper
        )));
    }
    Ok(KlDesign { k_l, constraint })
}

/// Rated capacities of the two parts for a given LCC ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitySplit {
    pub p_lcc_star: f64,
    pub q_lcc_star: f64,
    pub s_lcc: f64,
    pub u_dcl: f64,
    pub p_fbmmc: f64,
    pub q_fbmmc: f64,
    pub s_fbmmc: f64,
}

pub fn evaluate_design(spec: &DesignSpec, k_l: f64) -> Result<CapacitySplit> {
    ensure_non_negative("k_l", k_l)?;
    let lcc = spec.lcc(k_l);
    let i = spec.i_dc_rated;
    let u_dcl = lcc_part_dc_voltage(&lcc, &spec.grid, spec.alpha_star, i)?;
    let pq = lcc_part_pq(&lcc, &spec.grid, spec.alpha_star, i)?;
    let p_fbmmc = spec.p_rated - pq.p;
    let q_fbmmc = pq.q + spec.q_rated;
    Ok(CapacitySplit {
        p_lcc_star: pq.p,
        q_lcc_star: pq.q,
        s_lcc: pq.s,
        u_dcl,
        p_fbmmc,
        q_fbmmc,
        s_fbmmc: p_fbmmc.hypot(q_fbmmc),
    })
}

/// Smallest FBMMC ratio keeping both arm-current figures within the switch
/// limits at apparent power `s_fbmmc`.
pub fn design_km(
    s_fbmmc: f64,
    grid: &GridPoint,
    i_dc: f64,
    rms_sch: f64,
    max_sch: f64,
) -> Result<f64> {
    ensure_non_negative("s_fbmmc", s_fbmmc)?;
    ensure_non_negative("i_dc", i_dc)?;
    let rms_head = (3.0 * rms_sch).powi(2) - i_dc * i_dc;
    let max_head = 3.0 * max_sch - i_dc;
    if !(rms_head > 0.0) || !(max_head > 0.0) {
        return Err(Error::SwitchLimitsUnreachable(format!(
            "dc current {i_dc} kA alone saturates the switches (RMS {rms_sch} kA, MAX {max_sch} kA)"
        )));
    }
    let rms_term = 1.0 / (2.0 * rms_head).sqrt();
    let max_term = 1.0 / max_head;
    Ok(s_fbmmc / grid.v_g * rms_term.max(max_term))
}

/// Transformer ratio snapped to a ladder of valve-side voltages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub exact: f64,
    pub valve_kv: f64,
    pub grid_kv: f64,
    pub nameplate: String,
}

impl Ratio {
    pub fn from_exact(exact: f64, grid_ll_rms: f64) -> Self {
        let valve_kv = exact * grid_ll_rms;
        Self {
            exact,
            valve_kv,
            grid_kv: grid_ll_rms,
            nameplate: nameplate(valve_kv, grid_ll_rms),
        }
    }

    /// Smallest ladder ratio not below `minimum`.
    pub fn ladder_above(minimum: f64, grid_ll_rms: f64, step_kv: f64) -> Self {
        let valve_min = minimum * grid_ll_rms;
        // absorb rounding so an exact rung is not pushed up a step
        let rungs = (valve_min / step_kv * (1.0 - 1e-12)).ceil();
        let valve_kv = rungs * step_kv;
        Self {
            exact: valve_kv / grid_ll_rms,
            valve_kv,
            grid_kv: grid_ll_rms,
            nameplate: nameplate(valve_kv, grid_ll_rms),
        }
    }
}

fn nameplate(valve_kv: f64, grid_kv: f64) -> String {
    format!("{} kV/{} kV", valve_kv.round(), grid_kv.round())
}

/// Largest arm-voltage magnitude over `points`: `max |e_dcM| + k_M·V_g`.
pub fn capacitor_envelope_peak(
    points: &[EflccOperatingPoint],
    k_m: f64,
    grid: &GridPoint,
) -> Result<f64> {
    let u_m = k_m * grid.v_g;
    points
        .iter()
        .map(|p| p.e_dcm.abs() + u_m)
        .reduce(f64::max)
        .ok_or_else(|| {
            Error::InvalidInput("capacitor sizing needs at least one operating point".into())
        })
}

pub fn size_capacitor_sum(
    points: &[EflccOperatingPoint],
    k_m: f64,
    grid: &GridPoint,
    margin: f64,
) -> Result<f64> {
    Ok((1.0 + margin) * capacitor_envelope_peak(points, k_m, grid)?)
}

/// Rated loss estimate from per-station average loss fractions, MW.
pub fn estimate_losses(s_lcc: f64, s_fbmmc: f64) -> f64 {
    LCC_LOSS_FRACTION * s_lcc + FBMMC_LOSS_FRACTION * s_fbmmc
}

/// Same fractions applied to active-power throughput, MW. Circulating power
/// in the FBMMC part counts at its magnitude.
pub fn estimate_active_losses(p_lcc: f64, p_fbmmc: f64) -> f64 {
    LCC_LOSS_FRACTION * p_lcc.abs() + FBMMC_LOSS_FRACTION * p_fbmmc.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitorSizing {
    pub envelope_peak: f64,
    pub margin: f64,
    pub v_cap_sum: f64,
    pub reference: Option<f64>,
    /// Margin that would reproduce `reference`.
    pub implied_margin: Option<f64>,
}

impl CapacitorSizing {
    fn new(envelope_peak: f64, margin: f64, reference: Option<f64>) -> Self {
        Self {
            envelope_peak,
            margin,
            v_cap_sum: (1.0 + margin) * envelope_peak,
            reference,
            implied_margin: reference.map(|r| r / envelope_peak - 1.0),
        }
    }
}

/// One column of the comparison: a full design of one tap topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub topology: String,
    pub k_l: Option<Ratio>,
    pub p_lcc_star: f64,
    pub q_lcc_star: f64,
    pub s_lcc: f64,
    pub u_dcl: f64,
    pub p_fbmmc: f64,
    pub q_fbmmc: f64,
    pub s_fbmmc: f64,
    pub k_m_min: f64,
    pub k_m: Ratio,
    pub arm_rms: f64,
    pub arm_max: f64,
    pub arm_rms_margin: f64,
    pub arm_max_margin: f64,
    pub u_dcm_rated: f64,
    pub capacitor: CapacitorSizing,
    pub losses_rated: f64,
    pub constraint_report: Option<ConstraintReport>,
}

impl DesignResult {
    /// Main-circuit parameters for the hybrid tap as designed.
    pub fn eflcc_params(&self, spec: &DesignSpec) -> Option<EflccParams> {
        let k_l = self.k_l.as_ref()?;
        Some(EflccParams {
            lcc: spec.lcc(k_l.exact),
            fbmmc: FbmmcPartParams {
                k_m: self.k_m.exact,
                l_em: spec.l_em,
                l_arm: spec.l_arm,
                v_cap_sum_rating: self.capacitor.v_cap_sum,
                rms_sch: spec.rms_sch,
                max_sch: spec.max_sch,
                s_rating: self.s_fbmmc,
            },
            p_rated: spec.p_rated,
            q_rated: spec.q_rated,
            i_dc_rated: spec.i_dc_rated,
        })
    }
}

fn arm_figures(spec: &DesignSpec, s_fbmmc: f64, k_m: f64) -> Result<ArmCurrents> {
    fbmmc_arm_currents(s_fbmmc, k_m, &spec.grid, spec.i_dc_rated)
}

/// Full design of the hybrid tap.
pub fn design_eflcc(spec: &DesignSpec) -> Result<DesignResult> {
    let kl = design_kl(spec)?;
    let split = evaluate_design(spec, kl.k_l)?;
    let grid = spec.rated_grid();
    let k_m_min = design_km(
        split.s_fbmmc,
        &grid,
        spec.i_dc_rated,
        spec.rms_sch,
        spec.max_sch,
    )?;
    let k_m = Ratio::ladder_above(k_m_min, spec.grid_ll_rms(), spec.ratio_step_kv);
    let arms = arm_figures(spec, split.s_fbmmc, k_m.exact)?;

    // The firing angle stays at α* while low power is being detected, so
    // the FBMMC dc voltage can swing across the whole power range.
    let params = EflccParams {
        lcc: spec.lcc(kl.k_l),
        fbmmc: FbmmcPartParams {
            k_m: k_m.exact,
            l_em: spec.l_em,
            l_arm: spec.l_arm,
            v_cap_sum_rating: f64::INFINITY,
            rms_sch: spec.rms_sch,
            max_sch: spec.max_sch,
            s_rating: split.s_fbmmc,
        },
        p_rated: spec.p_rated,
        q_rated: spec.q_rated,
        i_dc_rated: spec.i_dc_rated,
    };
    let points = power_distribution_sweep(
        &params,
        &grid,
        spec.i_dc_rated,
        0.0,
        spec.p_rated,
        ENVELOPE_POINTS,
        false,
        Execution::Sequential,
    )?;
    let peak = capacitor_envelope_peak(&points, k_m.exact, &grid)?;

    Ok(DesignResult {
        topology: "eflcc".into(),
        k_l: Some(Ratio::from_exact(kl.k_l, spec.grid_ll_rms())),
        p_lcc_star: split.p_lcc_star,
        q_lcc_star: split.q_lcc_star,
        s_lcc: split.s_lcc,
        u_dcl: split.u_dcl,
        p_fbmmc: split.p_fbmmc,
        q_fbmmc: split.q_fbmmc,
        s_fbmmc: split.s_fbmmc,
        k_m_min,
        k_m,
        arm_rms: arms.rms,
        arm_max: arms.max,
        arm_rms_margin: spec.rms_sch - arms.rms,
        arm_max_margin: spec.max_sch - arms.max,
        u_dcm_rated: spec.p_rated / spec.i_dc_rated - split.u_dcl,
        capacitor: CapacitorSizing::new(peak, spec.envelope_margin, spec.v_cap_sum_reference_eflcc),
        losses_rated: estimate_losses(split.s_lcc, split.s_fbmmc),
        constraint_report: Some(kl.constraint),
    })
}

/// Tap built from an FBMMC alone, with the conventional valve-side voltage
/// of half the dc-port voltage.
pub fn design_fbmmc_tap(spec: &DesignSpec) -> Result<DesignResult> {
    spec.validate()?;
    let split = evaluate_design(spec, 0.0)?;
    let grid = spec.rated_grid();
    let u_dc = spec.p_rated / spec.i_dc_rated;
    let k_m = Ratio::from_exact(u_dc / 2.0 / spec.grid_ll_rms(), spec.grid_ll_rms());
    let k_m_min = design_km(
        split.s_fbmmc,
        &grid,
        spec.i_dc_rated,
        spec.rms_sch,
        spec.max_sch,
    )?;
    let arms = arm_figures(spec, split.s_fbmmc, k_m.exact)?;
    // e_dcM = U_dcM / 2 with U_dcM spanning [0, U_dc]
    let peak = u_dc / 2.0 + k_m.exact * grid.v_g;

    Ok(DesignResult {
        topology: "fbmmc".into(),
        k_l: None,
        p_lcc_star: 0.0,
        q_lcc_star: 0.0,
        s_lcc: 0.0,
        u_dcl: 0.0,
        p_fbmmc: split.p_fbmmc,
        q_fbmmc: split.q_fbmmc,
        s_fbmmc: split.s_fbmmc,
        k_m_min,
        k_m,
        arm_rms: arms.rms,
        arm_max: arms.max,
        arm_rms_margin: spec.rms_sch - arms.rms,
        arm_max_margin: spec.max_sch - arms.max,
        u_dcm_rated: u_dc,
        capacitor: CapacitorSizing::new(peak, spec.envelope_margin, spec.v_cap_sum_reference_fbmmc),
        losses_rated: estimate_losses(0.0, split.s_fbmmc),
        constraint_report: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub fbmmc: DesignResult,
    pub eflcc: DesignResult,
    /// FBMMC-tap losses minus hybrid-tap losses, MW.
    pub loss_saving: f64,
    /// Hybrid FBMMC capacity over the FBMMC-only tap capacity.
    pub fbmmc_capacity_ratio: f64,
}

pub fn compare_designs(spec: &DesignSpec) -> Result<ComparisonReport> {
    let eflcc = design_eflcc(spec)?;
    let fbmmc = design_fbmmc_tap(spec)?;
    Ok(ComparisonReport {
        loss_saving: fbmmc.losses_rated - eflcc.losses_rated,
        fbmmc_capacity_ratio: eflcc.s_fbmmc / fbmmc.s_fbmmc,
        fbmmc,
        eflcc,
    })
}
