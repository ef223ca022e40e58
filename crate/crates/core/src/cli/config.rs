//! Run configuration: strict TOML/JSON parsing, unit normalization and the
//! canonical echo written back into every report.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::quantity::{parse, Dim, Scalar};
use super::ConfigError;
use crate::converter::{no_load_dc_voltage, FbmmcPartParams, GridPoint, LccPartParams};
use crate::corridor::{Axis, CorridorSpec};
use crate::design::DesignSpec;
use crate::eflcc::EflccParams;
use crate::exec::Execution;
use crate::sim::{CorridorAttachment, Scenario, Segment, DEFAULT_DETECTION_DELAY, DEFAULT_DT};

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<RawGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eflcc: Option<RawEflcc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<RawDesign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corridor: Option<RawCorridor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<RawSolve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RawSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<RawScenario>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub voltage: Scalar,
    pub frequency: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_eflcc: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEflcc {
    pub k_l: Scalar,
    pub x_el: Scalar,
    pub alpha_star: Scalar,
    pub k_m: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_em: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_arm: Option<Scalar>,
    pub v_cap_sum_rating: Scalar,
    pub rms_sch: Scalar,
    pub max_sch: Scalar,
    pub s_rating: Scalar,
    pub p_rated: Scalar,
    pub q_rated: Scalar,
    pub i_dc_rated: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDesign {
    pub i_dc_rated: Scalar,
    pub p_rated: Scalar,
    pub q_rated: Scalar,
    pub alpha_star: Scalar,
    pub x_el: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lpc_planned: Option<bool>,
    pub rms_sch: Scalar,
    pub max_sch: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope_margin: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_step: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_em: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_arm: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_cap_sum_reference_eflcc: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_cap_sum_reference_fbmmc: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCorridor {
    /// Rectifier no-load dc voltage; alternatively give `u_ac_r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_dc0_r: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_ac_r: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_dc0_i: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_ac_i: Option<Scalar>,
    pub x_lcc_r: Scalar,
    pub x_lcc_i: Scalar,
    pub r_0: Scalar,
    pub l_line: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_rated: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_res_sendend: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_dcr_min: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_dci_max: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_dcr_rated: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_dci_rated: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_dc_rated: Option<Scalar>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolve {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tap: Option<RawSolveTap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<RawSolveSystem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clean_energy: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<RawSolveDistance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolveTap {
    pub i_dc: Scalar,
    pub p_eflcc: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lpc_enabled: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolveSystem {
    pub i_dc: Scalar,
    pub u_dci: Scalar,
    pub taps: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolveDistance {
    pub p_tap_rated: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAxis {
    pub from: Scalar,
    pub to: Scalar,
    pub steps: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub execution: Option<Execution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_distribution: Option<RawPowerSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clean_energy: Option<RawEtaSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<RawDistanceSweep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPowerSweep {
    pub i_dc: Scalar,
    pub p: RawAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lpc_enabled: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEtaSweep {
    pub u_base: Scalar,
    pub k1: RawAxis,
    pub k2: RawAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDistanceSweep {
    pub u_base: Scalar,
    pub k3: RawAxis,
    pub p_tap: RawAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<Scalar>,
    pub duration: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection_delay: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attach_corridor: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_dci: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_taps: Option<Vec<Scalar>>,
    #[serde(default)]
    pub segments: Vec<RawSegment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSegment {
    pub t_start: Scalar,
    pub p_eflcc: Scalar,
    pub q_eflcc: Scalar,
    pub i_dc: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lpc_enabled: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp: Option<Scalar>,
}

// ---------------------------------------------------------------------------
// Normalized configuration

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TapSolve {
    pub i_dc: f64,
    pub p_eflcc: f64,
    pub lpc_enabled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolve {
    pub i_dc: f64,
    pub u_dci: f64,
    pub taps: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveConfig {
    pub tap: Option<TapSolve>,
    pub system: Option<SystemSolve>,
    pub clean_energy: bool,
    pub distance_p_tap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepKind {
    PowerDistribution {
        i_dc: f64,
        p: Axis,
        lpc_enabled: bool,
    },
    CleanEnergy {
        u_base: f64,
        k1: Axis,
        k2: Axis,
    },
    Distance {
        u_base: f64,
        k3: Axis,
        p_tap: Axis,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub dt: f64,
    pub duration: f64,
    pub detection_delay: f64,
    pub attach_corridor: bool,
    pub u_dci: Option<f64>,
    pub other_taps: Vec<f64>,
    pub segments: Vec<Segment>,
}

/// Validated, unit-normalized configuration. Voltages are kV (ac: LN peak,
/// dc: pole-to-pole), currents kA, powers MW/MVar/MVA, angles rad,
/// frequencies rad/s, inductances H, resistances Ω, lengths km, times s.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: Option<GridPoint>,
    pub eflcc: Option<EflccParams>,
    pub design: Option<DesignSpec>,
    pub corridor: Option<CorridorSpec>,
    pub solve: Option<SolveConfig>,
    pub sweep: Option<SweepConfig>,
    pub scenario: Option<ScenarioConfig>,
}

// ---------------------------------------------------------------------------
// Parsing

/// Reads `path` as TOML, or as JSON when the extension is `.json`.
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let raw = if is_json {
        parse_json(&text)
    } else {
        parse_toml(&text)
    }
    .map_err(|e| match e {
        ConfigError::Parse { message, .. } => ConfigError::Parse {
            path: path.display().to_string(),
            message,
        },
        other => other,
    })?;
    RunConfig::from_raw(&raw)
}

pub fn parse_toml(text: &str) -> Result<RawConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: String::new(),
        message: e.to_string(),
    })
}

pub fn parse_json(text: &str) -> Result<RawConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: String::new(),
        message: e.to_string(),
    })
}

struct Ctx<'a> {
    section: &'a str,
}

impl Ctx<'_> {
    fn key(&self, name: &str) -> String {
        format!("{}.{}", self.section, name)
    }

    fn q(&self, name: &str, raw: &Scalar, dim: Dim) -> Result<f64, ConfigError> {
        parse(&self.key(name), raw, dim)
    }

    fn opt(&self, name: &str, raw: &Option<Scalar>, dim: Dim) -> Result<Option<f64>, ConfigError> {
        raw.as_ref().map(|r| self.q(name, r, dim)).transpose()
    }

    fn positive(&self, name: &str, raw: &Scalar, dim: Dim) -> Result<f64, ConfigError> {
        let v = self.q(name, raw, dim)?;
        self.check(name, v, v > 0.0, "must be > 0")
    }

    fn non_negative(&self, name: &str, raw: &Scalar, dim: Dim) -> Result<f64, ConfigError> {
        let v = self.q(name, raw, dim)?;
        self.check(name, v, v >= 0.0, "must be >= 0")
    }

    fn check(&self, name: &str, v: f64, ok: bool, constraint: &str) -> Result<f64, ConfigError> {
        if ok {
            Ok(v)
        } else {
            Err(ConfigError::Range {
                key: self.key(name),
                value: v,
                constraint: constraint.to_string(),
            })
        }
    }

    fn axis(&self, name: &str, raw: &RawAxis, dim: Dim) -> Result<Axis, ConfigError> {
        let axis = Axis {
            from: self.q(&format!("{name}.from"), &raw.from, dim)?,
            to: self.q(&format!("{name}.to"), &raw.to, dim)?,
            steps: raw.steps,
        };
        axis.values().map_err(|e| ConfigError::Invalid {
            key: self.key(name),
            message: e.to_string(),
        })?;
        Ok(axis)
    }

    fn domain(&self, r: crate::Result<()>) -> Result<(), ConfigError> {
        r.map_err(|e| ConfigError::Invalid {
            key: self.section.to_string(),
            message: e.to_string(),
        })
    }
}

fn missing(key: &str) -> ConfigError {
    ConfigError::Missing {
        key: key.to_string(),
    }
}

fn parse_grid(raw: &RawGrid) -> Result<GridPoint, ConfigError> {
    let c = Ctx { section: "grid" };
    let grid = GridPoint {
        v_g: c.positive("voltage", &raw.voltage, Dim::AcVoltage)?,
        omega_g: c.positive("frequency", &raw.frequency, Dim::AngularFrequency)?,
        q_eflcc: match &raw.q_eflcc {
            Some(q) => c.non_negative("q_eflcc", q, Dim::ReactivePower)?,
            None => 0.0,
        },
    };
    c.domain(grid.validate())?;
    Ok(grid)
}

fn parse_eflcc(raw: &RawEflcc) -> Result<EflccParams, ConfigError> {
    let c = Ctx { section: "eflcc" };
    let alpha_star = c.non_negative("alpha_star", &raw.alpha_star, Dim::Angle)?;
    let params = EflccParams {
        lcc: LccPartParams {
            k_l: c.positive("k_l", &raw.k_l, Dim::Ratio)?,
            x_el: c.non_negative("x_el", &raw.x_el, Dim::Resistance)?,
            alpha_star,
        },
        fbmmc: FbmmcPartParams {
            k_m: c.positive("k_m", &raw.k_m, Dim::Ratio)?,
            l_em: c
                .opt("l_em", &raw.l_em, Dim::Inductance)?
                .map_or(Ok(0.0), |v| c.check("l_em", v, v >= 0.0, "must be >= 0"))?,
            l_arm: c
                .opt("l_arm", &raw.l_arm, Dim::Inductance)?
                .map_or(Ok(0.0), |v| c.check("l_arm", v, v >= 0.0, "must be >= 0"))?,
            v_cap_sum_rating: c.positive(
                "v_cap_sum_rating",
                &raw.v_cap_sum_rating,
                Dim::DcVoltage,
            )?,
            rms_sch: c.positive("rms_sch", &raw.rms_sch, Dim::Current)?,
            max_sch: c.positive("max_sch", &raw.max_sch, Dim::Current)?,
            s_rating: c.positive("s_rating", &raw.s_rating, Dim::ApparentPower)?,
        },
        p_rated: c.positive("p_rated", &raw.p_rated, Dim::ActivePower)?,
        q_rated: c.non_negative("q_rated", &raw.q_rated, Dim::ReactivePower)?,
        i_dc_rated: c.positive("i_dc_rated", &raw.i_dc_rated, Dim::Current)?,
    };
    c.domain(params.validate())?;
    Ok(params)
}

fn parse_design(raw: &RawDesign, grid: GridPoint) -> Result<DesignSpec, ConfigError> {
    let c = Ctx { section: "design" };
    let opt_pos = |name: &str, v: &Option<Scalar>, dim: Dim| -> Result<Option<f64>, ConfigError> {
        c.opt(name, v, dim)?
            .map(|x| c.check(name, x, x > 0.0, "must be > 0"))
            .transpose()
    };
    let spec = DesignSpec {
        grid,
        i_dc_rated: c.positive("i_dc_rated", &raw.i_dc_rated, Dim::Current)?,
        p_rated: c.positive("p_rated", &raw.p_rated, Dim::ActivePower)?,
        q_rated: c.non_negative("q_rated", &raw.q_rated, Dim::ReactivePower)?,
        alpha_star: c.non_negative("alpha_star", &raw.alpha_star, Dim::Angle)?,
        x_el: c.non_negative("x_el", &raw.x_el, Dim::Resistance)?,
        lpc_planned: raw.lpc_planned.unwrap_or(false),
        rms_sch: c.positive("rms_sch", &raw.rms_sch, Dim::Current)?,
        max_sch: c.positive("max_sch", &raw.max_sch, Dim::Current)?,
        envelope_margin: match &raw.envelope_margin {
            Some(m) => c.non_negative("envelope_margin", m, Dim::Fraction)?,
            None => 0.0,
        },
        ratio_step_kv: opt_pos("ratio_step", &raw.ratio_step, Dim::DcVoltage)?.unwrap_or(1.0),
        l_em: c.opt("l_em", &raw.l_em, Dim::Inductance)?.unwrap_or(0.0),
        l_arm: c.opt("l_arm", &raw.l_arm, Dim::Inductance)?.unwrap_or(0.0),
        v_cap_sum_reference_eflcc: opt_pos(
            "v_cap_sum_reference_eflcc",
            &raw.v_cap_sum_reference_eflcc,
            Dim::DcVoltage,
        )?,
        v_cap_sum_reference_fbmmc: opt_pos(
            "v_cap_sum_reference_fbmmc",
            &raw.v_cap_sum_reference_fbmmc,
            Dim::DcVoltage,
        )?,
    };
    c.domain(spec.validate())?;
    Ok(spec)
}

fn parse_corridor(raw: &RawCorridor) -> Result<CorridorSpec, ConfigError> {
    let c = Ctx {
        section: "corridor",
    };
    let u_dc0 =
        |dc_name: &str, dc: &Option<Scalar>, ac_name: &str, ac: &Option<Scalar>| match (dc, ac) {
            (Some(_), Some(_)) => Err(ConfigError::Invalid {
                key: c.key(dc_name),
                message: format!("give either {dc_name} or {ac_name}, not both"),
            }),
            (Some(v), None) => c.positive(dc_name, v, Dim::DcVoltage).map(Some),
            (None, Some(v)) => {
                let u = c.positive(ac_name, v, Dim::AcVoltage)?;
                no_load_dc_voltage(u)
                    .map(Some)
                    .map_err(|e| ConfigError::Invalid {
                        key: c.key(ac_name),
                        message: e.to_string(),
                    })
            }
            (None, None) => Ok(None),
        };
    let opt_pos = |name: &str, v: &Option<Scalar>, dim: Dim| -> Result<Option<f64>, ConfigError> {
        c.opt(name, v, dim)?
            .map(|x| c.check(name, x, x > 0.0, "must be > 0"))
            .transpose()
    };
    let spec = CorridorSpec {
        u_dc0_r: u_dc0("u_dc0_r", &raw.u_dc0_r, "u_ac_r", &raw.u_ac_r)?,
        u_dc0_i: u_dc0("u_dc0_i", &raw.u_dc0_i, "u_ac_i", &raw.u_ac_i)?,
        x_lcc_r: c.non_negative("x_lcc_r", &raw.x_lcc_r, Dim::Resistance)?,
        x_lcc_i: c.non_negative("x_lcc_i", &raw.x_lcc_i, Dim::Resistance)?,
        r_0: c.positive("r_0", &raw.r_0, Dim::ResistancePerLength)?,
        l_line: c.non_negative("l_line", &raw.l_line, Dim::Length)?,
        p_corridor_rated: opt_pos("p_rated", &raw.p_rated, Dim::ActivePower)?,
        p_res_sendend: c
            .opt("p_res_sendend", &raw.p_res_sendend, Dim::ActivePower)?
            .map(|x| c.check("p_res_sendend", x, x >= 0.0, "must be >= 0"))
            .transpose()?,
        u_dcr_min: opt_pos("u_dcr_min", &raw.u_dcr_min, Dim::DcVoltage)?,
        u_dci_max: opt_pos("u_dci_max", &raw.u_dci_max, Dim::DcVoltage)?,
        u_dcr_rated: opt_pos("u_dcr_rated", &raw.u_dcr_rated, Dim::DcVoltage)?,
        u_dci_rated: opt_pos("u_dci_rated", &raw.u_dci_rated, Dim::DcVoltage)?,
        i_dc_rated: opt_pos("i_dc_rated", &raw.i_dc_rated, Dim::Current)?,
    };
    c.domain(spec.validate())?;
    Ok(spec)
}

fn parse_solve(raw: &RawSolve) -> Result<SolveConfig, ConfigError> {
    let tap = match &raw.tap {
        Some(t) => {
            let c = Ctx {
                section: "solve.tap",
            };
            Some(TapSolve {
                i_dc: c.positive("i_dc", &t.i_dc, Dim::Current)?,
                p_eflcc: c.non_negative("p_eflcc", &t.p_eflcc, Dim::ActivePower)?,
                lpc_enabled: t.lpc_enabled.unwrap_or(false),
            })
        }
        None => None,
    };
    let system = match &raw.system {
        Some(s) => {
            let c = Ctx {
                section: "solve.system",
            };
            let taps = s
                .taps
                .iter()
                .enumerate()
                .map(|(i, p)| c.q(&format!("taps[{i}]"), p, Dim::ActivePower))
                .collect::<Result<Vec<_>, _>>()?;
            Some(SystemSolve {
                i_dc: c.positive("i_dc", &s.i_dc, Dim::Current)?,
                u_dci: c.positive("u_dci", &s.u_dci, Dim::DcVoltage)?,
                taps,
            })
        }
        None => None,
    };
    let distance_p_tap = match &raw.distance {
        Some(d) => Some(
            Ctx {
                section: "solve.distance",
            }
            .non_negative("p_tap_rated", &d.p_tap_rated, Dim::ActivePower)?,
        ),
        None => None,
    };
    let cfg = SolveConfig {
        tap,
        system,
        clean_energy: raw.clean_energy.unwrap_or(false),
        distance_p_tap,
    };
    if cfg.tap.is_none()
        && cfg.system.is_none()
        && !cfg.clean_energy
        && cfg.distance_p_tap.is_none()
    {
        return Err(ConfigError::Invalid {
            key: "solve".into(),
            message: "nothing to solve: add [solve.tap], [solve.system], [solve.distance] or clean_energy = true"
                .into(),
        });
    }
    Ok(cfg)
}

fn parse_sweep(raw: &RawSweep) -> Result<SweepConfig, ConfigError> {
    let given = [
        raw.power_distribution.is_some(),
        raw.clean_energy.is_some(),
        raw.distance.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if given != 1 {
        return Err(ConfigError::Invalid {
            key: "sweep".into(),
            message: format!(
                "exactly one of [sweep.power_distribution], [sweep.clean_energy], [sweep.distance] is required, found {given}"
            ),
        });
    }
    let kind = if let Some(s) = &raw.power_distribution {
        let c = Ctx {
            section: "sweep.power_distribution",
        };
        SweepKind::PowerDistribution {
            i_dc: c.positive("i_dc", &s.i_dc, Dim::Current)?,
            p: c.axis("p", &s.p, Dim::ActivePower)?,
            lpc_enabled: s.lpc_enabled.unwrap_or(false),
        }
    } else if let Some(s) = &raw.clean_energy {
        let c = Ctx {
            section: "sweep.clean_energy",
        };
        SweepKind::CleanEnergy {
            u_base: c.positive("u_base", &s.u_base, Dim::DcVoltage)?,
            k1: c.axis("k1", &s.k1, Dim::Ratio)?,
            k2: c.axis("k2", &s.k2, Dim::Ratio)?,
        }
    } else if let Some(s) = &raw.distance {
        let c = Ctx {
            section: "sweep.distance",
        };
        SweepKind::Distance {
            u_base: c.positive("u_base", &s.u_base, Dim::DcVoltage)?,
            k3: c.axis("k3", &s.k3, Dim::Ratio)?,
            p_tap: c.axis("p_tap", &s.p_tap, Dim::ActivePower)?,
        }
    } else {
        unreachable!("exactly one sweep kind checked above")
    };
    Ok(SweepConfig {
        kind,
        execution: raw.execution.unwrap_or_default(),
    })
}

fn parse_scenario(raw: &RawScenario) -> Result<ScenarioConfig, ConfigError> {
    let c = Ctx {
        section: "scenario",
    };
    if raw.segments.is_empty() {
        return Err(ConfigError::Invalid {
            key: c.key("segments"),
            message: "scenario needs at least one segment".into(),
        });
    }
    let segments = raw
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let name = format!("scenario.segments[{i}]");
            let c = Ctx { section: &name };
            Ok(Segment {
                t_start: c.non_negative("t_start", &s.t_start, Dim::Time)?,
                p_eflcc: c.non_negative("p_eflcc", &s.p_eflcc, Dim::ActivePower)?,
                q_eflcc: c.non_negative("q_eflcc", &s.q_eflcc, Dim::ReactivePower)?,
                i_dc: c.positive("i_dc", &s.i_dc, Dim::Current)?,
                lpc_enabled: s.lpc_enabled.unwrap_or(false),
                ramp: match &s.ramp {
                    Some(r) => c.non_negative("ramp", r, Dim::Time)?,
                    None => 0.0,
                },
            })
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    Ok(ScenarioConfig {
        dt: match &raw.dt {
            Some(d) => c.positive("dt", d, Dim::Time)?,
            None => DEFAULT_DT,
        },
        duration: c.positive("duration", &raw.duration, Dim::Time)?,
        detection_delay: match &raw.detection_delay {
            Some(d) => c.non_negative("detection_delay", d, Dim::Time)?,
            None => DEFAULT_DETECTION_DELAY,
        },
        attach_corridor: raw.attach_corridor.unwrap_or(false),
        u_dci: c
            .opt("u_dci", &raw.u_dci, Dim::DcVoltage)?
            .map(|v| c.check("u_dci", v, v > 0.0, "must be > 0"))
            .transpose()?,
        other_taps: raw
            .other_taps
            .iter()
            .flatten()
            .enumerate()
            .map(|(i, p)| c.q(&format!("other_taps[{i}]"), p, Dim::ActivePower))
            .collect::<Result<Vec<_>, _>>()?,
        segments,
    })
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let grid = raw.grid.as_ref().map(parse_grid).transpose()?;
        let eflcc = raw.eflcc.as_ref().map(parse_eflcc).transpose()?;
        let design = match &raw.design {
            Some(d) => Some(parse_design(d, grid.ok_or_else(|| missing("grid"))?)?),
            None => None,
        };
        let corridor = raw.corridor.as_ref().map(parse_corridor).transpose()?;
        let cfg = RunConfig {
            grid,
            eflcc,
            design,
            corridor,
            solve: raw.solve.as_ref().map(parse_solve).transpose()?,
            sweep: raw.sweep.as_ref().map(parse_sweep).transpose()?,
            scenario: raw.scenario.as_ref().map(parse_scenario).transpose()?,
        };
        if let Some(sc) = &cfg.scenario {
            cfg.build_scenario(sc)?;
        }
        Ok(cfg)
    }

    /// Assembles the simulation input from the scenario, tap and corridor
    /// sections.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let sc = self.scenario.as_ref().ok_or_else(|| missing("scenario"))?;
        self.build_scenario(sc)
    }

    fn build_scenario(&self, sc: &ScenarioConfig) -> Result<Scenario, ConfigError> {
        let params = self.eflcc.ok_or_else(|| missing("eflcc"))?;
        let grid = self.grid.ok_or_else(|| missing("grid"))?;
        let corridor = if sc.attach_corridor {
            let spec = self.corridor.clone().ok_or_else(|| missing("corridor"))?;
            let u_dci = sc
                .u_dci
                .or(spec.u_dci_rated)
                .ok_or_else(|| missing("scenario.u_dci"))?;
            Some(CorridorAttachment {
                spec,
                u_dci,
                other_taps: sc.other_taps.clone(),
            })
        } else {
            None
        };
        let scenario = Scenario {
            params,
            corridor,
            grid,
            dt: sc.dt,
            duration: sc.duration,
            segments: sc.segments.clone(),
            detection_delay: sc.detection_delay,
        };
        scenario.validate().map_err(|e| ConfigError::Invalid {
            key: "scenario".into(),
            message: e.to_string(),
        })?;
        Ok(scenario)
    }

    /// Canonical form: every quantity in internal units, written so that
    /// parsing it back yields bit-identical values.
    pub fn to_raw(&self) -> RawConfig {
        let kv = |v: f64| Scalar::text(v, "kV");
        let opt = |v: Option<f64>, unit: &str| v.map(|x| Scalar::text(x, unit));
        RawConfig {
            grid: self.grid.map(|g| RawGrid {
                voltage: Scalar::text(g.v_g, "kV(ln-peak)"),
                frequency: Scalar::text(g.omega_g, "rad/s"),
                q_eflcc: Some(Scalar::text(g.q_eflcc, "MVar")),
            }),
            eflcc: self.eflcc.map(|p| RawEflcc {
                k_l: Scalar::Number(p.lcc.k_l),
                x_el: Scalar::text(p.lcc.x_el, "ohm"),
                alpha_star: Scalar::text(p.lcc.alpha_star, "rad"),
                k_m: Scalar::Number(p.fbmmc.k_m),
                l_em: Some(Scalar::text(p.fbmmc.l_em, "H")),
                l_arm: Some(Scalar::text(p.fbmmc.l_arm, "H")),
                v_cap_sum_rating: kv(p.fbmmc.v_cap_sum_rating),
                rms_sch: Scalar::text(p.fbmmc.rms_sch, "kA"),
                max_sch: Scalar::text(p.fbmmc.max_sch, "kA"),
                s_rating: Scalar::text(p.fbmmc.s_rating, "MVA"),
                p_rated: Scalar::text(p.p_rated, "MW"),
                q_rated: Scalar::text(p.q_rated, "MVar"),
                i_dc_rated: Scalar::text(p.i_dc_rated, "kA"),
            }),
            design: self.design.map(|d| RawDesign {
                i_dc_rated: Scalar::text(d.i_dc_rated, "kA"),
                p_rated: Scalar::text(d.p_rated, "MW"),
                q_rated: Scalar::text(d.q_rated, "MVar"),
                alpha_star: Scalar::text(d.alpha_star, "rad"),
                x_el: Scalar::text(d.x_el, "ohm"),
                lpc_planned: Some(d.lpc_planned),
                rms_sch: Scalar::text(d.rms_sch, "kA"),
                max_sch: Scalar::text(d.max_sch, "kA"),
                envelope_margin: Some(Scalar::Number(d.envelope_margin)),
                ratio_step: Some(kv(d.ratio_step_kv)),
                l_em: Some(Scalar::text(d.l_em, "H")),
                l_arm: Some(Scalar::text(d.l_arm, "H")),
                v_cap_sum_reference_eflcc: opt(d.v_cap_sum_reference_eflcc, "kV"),
                v_cap_sum_reference_fbmmc: opt(d.v_cap_sum_reference_fbmmc, "kV"),
            }),
            corridor: self.corridor.as_ref().map(|s| RawCorridor {
                u_dc0_r: opt(s.u_dc0_r, "kV"),
                u_ac_r: None,
                u_dc0_i: opt(s.u_dc0_i, "kV"),
                u_ac_i: None,
                x_lcc_r: Scalar::text(s.x_lcc_r, "ohm"),
                x_lcc_i: Scalar::text(s.x_lcc_i, "ohm"),
                r_0: Scalar::text(s.r_0, "ohm/km"),
                l_line: Scalar::text(s.l_line, "km"),
                p_rated: opt(s.p_corridor_rated, "MW"),
                p_res_sendend: opt(s.p_res_sendend, "MW"),
                u_dcr_min: opt(s.u_dcr_min, "kV"),
                u_dci_max: opt(s.u_dci_max, "kV"),
                u_dcr_rated: opt(s.u_dcr_rated, "kV"),
                u_dci_rated: opt(s.u_dci_rated, "kV"),
                i_dc_rated: opt(s.i_dc_rated, "kA"),
            }),
            solve: self.solve.as_ref().map(|s| RawSolve {
                tap: s.tap.map(|t| RawSolveTap {
                    i_dc: Scalar::text(t.i_dc, "kA"),
                    p_eflcc: Scalar::text(t.p_eflcc, "MW"),
                    lpc_enabled: Some(t.lpc_enabled),
                }),
                system: s.system.as_ref().map(|t| RawSolveSystem {
                    i_dc: Scalar::text(t.i_dc, "kA"),
                    u_dci: kv(t.u_dci),
                    taps: t.taps.iter().map(|&p| Scalar::text(p, "MW")).collect(),
                }),
                clean_energy: Some(s.clean_energy),
                distance: s.distance_p_tap.map(|p| RawSolveDistance {
                    p_tap_rated: Scalar::text(p, "MW"),
                }),
            }),
            sweep: self.sweep.map(|s| {
                let axis = |a: Axis, unit: Option<&str>| RawAxis {
                    from: unit.map_or(Scalar::Number(a.from), |u| Scalar::text(a.from, u)),
                    to: unit.map_or(Scalar::Number(a.to), |u| Scalar::text(a.to, u)),
                    steps: a.steps,
                };
                let mut out = RawSweep {
                    execution: Some(s.execution),
                    ..RawSweep::default()
                };
                match s.kind {
                    SweepKind::PowerDistribution {
                        i_dc,
                        p,
                        lpc_enabled,
                    } => {
                        out.power_distribution = Some(RawPowerSweep {
                            i_dc: Scalar::text(i_dc, "kA"),
                            p: axis(p, Some("MW")),
                            lpc_enabled: Some(lpc_enabled),
                        })
                    }
                    SweepKind::CleanEnergy { u_base, k1, k2 } => {
                        out.clean_energy = Some(RawEtaSweep {
                            u_base: kv(u_base),
                            k1: axis(k1, None),
                            k2: axis(k2, None),
                        })
                    }
                    SweepKind::Distance { u_base, k3, p_tap } => {
                        out.distance = Some(RawDistanceSweep {
                            u_base: kv(u_base),
                            k3: axis(k3, None),
                            p_tap: axis(p_tap, Some("MW")),
                        })
                    }
                }
                out
            }),
            scenario: self.scenario.as_ref().map(|s| RawScenario {
                dt: Some(Scalar::text(s.dt, "s")),
                duration: Scalar::text(s.duration, "s"),
                detection_delay: Some(Scalar::text(s.detection_delay, "s")),
                attach_corridor: Some(s.attach_corridor),
                u_dci: opt(s.u_dci, "kV"),
                other_taps: Some(
                    s.other_taps
                        .iter()
                        .map(|&p| Scalar::text(p, "MW"))
                        .collect(),
                ),
                segments: s
                    .segments
                    .iter()
                    .map(|g| RawSegment {
                        t_start: Scalar::text(g.t_start, "s"),
                        p_eflcc: Scalar::text(g.p_eflcc, "MW"),
                        q_eflcc: Scalar::text(g.q_eflcc, "MVar"),
                        i_dc: Scalar::text(g.i_dc, "kA"),
                        lpc_enabled: Some(g.lpc_enabled),
                        ramp: Some(Scalar::text(g.ramp, "s")),
                    })
                    .collect(),
            }),
        }
    }
}
