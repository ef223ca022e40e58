//! The five commands. Each turns a validated configuration into an
//! [`Outcome`]; writing files and mapping exit codes happen in the caller.

use serde_json::{json, Value};

use super::config::{RunConfig, SweepKind};
use super::output::{Cell, Outcome, Status, Table};
use super::ConfigError;
use crate::corridor::{
    max_clean_energy_ratio, max_distance, solve_system_state, sweep_distance, sweep_eta,
};
use crate::design::{compare_designs, design_eflcc, DesignResult, DesignSpec};
use crate::eflcc::{
    envelope_checks, nominal_lcc_point, solve_operating_point, EflccOperatingPoint, EflccParams,
    LimitCheck,
};
use crate::error::Error;
use crate::exec::{linspace, map_collect};
use crate::sim::{event_summary, run_scenario, StepState};

/// Command failures that prevent any artifact from being produced.
#[derive(Debug)]
pub enum CommandError {
    Config(ConfigError),
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e)
    }
}

fn missing(key: &str) -> CommandError {
    CommandError::Config(ConfigError::Missing { key: key.into() })
}

/// Input-side errors from the library are configuration errors; everything
/// else means the requested operating point or design does not exist.
fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Domain { .. } | Error::InvalidInput(_) | Error::MissingParameter(_)
    )
}

fn library(section: &str, e: Error) -> CommandError {
    CommandError::Config(ConfigError::Invalid {
        key: section.into(),
        message: e.to_string(),
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn check_value(c: &LimitCheck) -> Value {
    json!({
        "limit": c.limit,
        "value": c.value,
        "rating": c.rating,
        "margin": c.margin,
        "relative_margin": c.relative_margin(),
    })
}

fn kv_table(rows: &[(&str, &str, f64)]) -> Table {
    let mut t = Table::new(&["quantity", "unit", "value"]);
    for &(q, u, v) in rows {
        t.push(vec![q.into(), u.into(), v.into()]);
    }
    t
}

fn design_spec(cfg: &RunConfig) -> Result<DesignSpec, CommandError> {
    cfg.design.ok_or_else(|| missing("design"))
}

fn design_rows(d: &DesignResult) -> Vec<(&'static str, &'static str, f64)> {
    let k_l = d.k_l.as_ref();
    vec![
        ("k_l", "1", k_l.map_or(f64::NAN, |r| r.exact)),
        (
            "k_l_valve_side",
            "kV(ll-rms)",
            k_l.map_or(f64::NAN, |r| r.valve_kv),
        ),
        ("p_lcc_star", "MW", d.p_lcc_star),
        ("q_lcc_star", "MVar", d.q_lcc_star),
        ("s_lcc", "MVA", d.s_lcc),
        ("u_dcl", "kV", d.u_dcl),
        ("p_fbmmc", "MW", d.p_fbmmc),
        ("q_fbmmc", "MVar", d.q_fbmmc),
        ("s_fbmmc", "MVA", d.s_fbmmc),
        ("k_m_min", "1", d.k_m_min),
        ("k_m", "1", d.k_m.exact),
        ("k_m_valve_side", "kV(ll-rms)", d.k_m.valve_kv),
        ("arm_rms", "kA", d.arm_rms),
        ("arm_max", "kA", d.arm_max),
        ("arm_rms_margin", "kA", d.arm_rms_margin),
        ("arm_max_margin", "kA", d.arm_max_margin),
        ("u_dcm_rated", "kV", d.u_dcm_rated),
        ("arm_voltage_envelope_peak", "kV", d.capacitor.envelope_peak),
        ("v_cap_sum", "kV", d.capacitor.v_cap_sum),
        (
            "v_cap_sum_implied_margin",
            "1",
            d.capacitor.implied_margin.unwrap_or(f64::NAN),
        ),
        ("losses_rated", "MW", d.losses_rated),
    ]
}

fn design_violations(d: &DesignResult) -> Vec<Value> {
    let mut v = Vec::new();
    if d.arm_rms_margin < 0.0 {
        v.push(json!({"topology": d.topology, "limit": "arm_rms", "value": d.arm_rms, "margin": d.arm_rms_margin}));
    }
    if d.arm_max_margin < 0.0 {
        v.push(json!({"topology": d.topology, "limit": "arm_max", "value": d.arm_max, "margin": d.arm_max_margin}));
    }
    if let Some(c) = d.constraint_report.filter(|c| !c.pass) {
        v.push(
            json!({"topology": d.topology, "limit": "lcc_power_bracket", "detail": to_value(&c)}),
        );
    }
    v
}

fn infeasible(command: &'static str, e: &Error) -> Outcome {
    Outcome {
        command,
        status: Status::Infeasible,
        output: json!({ "error": e.to_string() }),
        violations: Vec::new(),
        diagnostics: vec![e.to_string()],
        tables: Vec::new(),
    }
}

pub fn cmd_design(cfg: &RunConfig) -> Result<Outcome, CommandError> {
    let spec = design_spec(cfg)?;
    match design_eflcc(&spec) {
        Ok(d) => Ok(Outcome {
            command: "design",
            status: Status::Ok,
            violations: design_violations(&d),
            diagnostics: Vec::new(),
            tables: vec![(String::new(), kv_table(&design_rows(&d)))],
            output: json!({ "eflcc": to_value(&d), "params": to_value(&d.eflcc_params(&spec)) }),
        }),
        Err(e) if is_config_error(&e) => Err(library("design", e)),
        Err(e) => Ok(infeasible("design", &e)),
    }
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Outcome, CommandError> {
    let spec = design_spec(cfg)?;
    match compare_designs(&spec) {
        Ok(r) => {
            let mut t = Table::new(&["quantity", "unit", "fbmmc_tap", "eflcc"]);
            for ((q, u, f), (_, _, e)) in
                design_rows(&r.fbmmc).into_iter().zip(design_rows(&r.eflcc))
            {
                t.push(vec![q.into(), u.into(), f.into(), e.into()]);
            }
            let mut violations = design_violations(&r.fbmmc);
            violations.extend(design_violations(&r.eflcc));
            Ok(Outcome {
                command: "compare",
                status: Status::Ok,
                output: to_value(&r),
                violations,
                diagnostics: Vec::new(),
                tables: vec![(String::new(), t)],
            })
        }
        Err(e) if is_config_error(&e) => Err(library("design", e)),
        Err(e) => Ok(infeasible("compare", &e)),
    }
}

const POINT_COLUMNS: [(&str, &str); 17] = [
    ("i_dc", "kA"),
    ("p_eflcc", "MW"),
    ("q_eflcc", "MVar"),
    ("alpha", "deg"),
    ("u_dc", "kV"),
    ("u_dcl", "kV"),
    ("u_dcm", "kV"),
    ("e_dcm", "kV"),
    ("p_lcc", "MW"),
    ("q_lcc", "MVar"),
    ("s_lcc", "MVA"),
    ("p_fbmmc", "MW"),
    ("q_fbmmc", "MVar"),
    ("s_fbmmc", "MVA"),
    ("arm_rms", "kA"),
    ("arm_max", "kA"),
    ("u_m_peak", "kV"),
];

fn point_values(p: &EflccOperatingPoint) -> [f64; 17] {
    [
        p.i_dc,
        p.p_eflcc,
        p.q_eflcc,
        p.alpha.to_degrees(),
        p.u_dc,
        p.u_dcl,
        p.u_dcm,
        p.e_dcm,
        p.p_lcc,
        p.q_lcc,
        p.s_lcc,
        p.p_fbmmc,
        p.q_fbmmc,
        p.s_fbmmc,
        p.arm_rms,
        p.arm_max,
        p.u_m_peak,
    ]
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome, CommandError> {
    let solve = cfg.solve.as_ref().ok_or_else(|| missing("solve"))?;
    let mut output = serde_json::Map::new();
    let mut violations = Vec::new();
    let mut diagnostics = Vec::new();
    let mut table = Table::new(&["section", "quantity", "unit", "value"]);
    let mut failed = false;
    let mut record = |name: &str,
                      e: Error,
                      output: &mut serde_json::Map<String, Value>|
     -> Result<(), CommandError> {
        if is_config_error(&e) {
            return Err(library(&format!("solve.{name}"), e));
        }
        diagnostics.push(format!("{name}: {e}"));
        output.insert(name.into(), json!({ "error": e.to_string() }));
        failed = true;
        Ok(())
    };

    if let Some(tap) = solve.tap {
        let params = cfg.eflcc.ok_or_else(|| missing("eflcc"))?;
        let grid = cfg.grid.ok_or_else(|| missing("grid"))?;
        let solved = nominal_lcc_point(&params, &grid, tap.i_dc).and_then(|nominal| {
            solve_operating_point(&params, &grid, tap.i_dc, tap.p_eflcc, tap.lpc_enabled)
                .map(|p| (nominal, p))
        });
        match solved {
            Ok((nominal, point)) => {
                let checks = envelope_checks(&point, &params);
                for c in checks.iter().filter(|c| c.is_violated()) {
                    violations.push(check_value(c));
                }
                for ((q, u), v) in POINT_COLUMNS.iter().zip(point_values(&point)) {
                    table.push(vec!["tap".into(), (*q).into(), (*u).into(), v.into()]);
                }
                output.insert(
                    "tap".into(),
                    json!({
                        "nominal": to_value(&nominal),
                        "point": to_value(&point),
                        "checks": checks.iter().map(check_value).collect::<Vec<_>>(),
                    }),
                );
            }
            Err(e) => record("tap", e, &mut output)?,
        }
    }

    let corridor = || cfg.corridor.as_ref().ok_or_else(|| missing("corridor"));

    if let Some(sys) = &solve.system {
        match solve_system_state(corridor()?, sys.i_dc, sys.u_dci, &sys.taps) {
            Ok(s) => {
                let rows = [
                    ("i_dc", "kA", s.i_dc),
                    ("u_dcr", "kV", s.u_dcr),
                    ("u_dci", "kV", s.u_dci),
                    ("alpha_r", "deg", s.alpha_r.to_degrees()),
                    ("gamma_i", "deg", s.gamma_i.to_degrees()),
                    ("delta_u_line", "kV", s.delta_u_line),
                    ("delta_u_tap_total", "kV", s.delta_u_tap_total),
                    ("balance_residual", "MW", s.balance_residual()),
                ];
                for (q, u, v) in rows {
                    table.push(vec!["system".into(), q.into(), u.into(), v.into()]);
                }
                output.insert("system".into(), to_value(&s));
            }
            Err(e) => record("system", e, &mut output)?,
        }
    }

    if solve.clean_energy {
        match max_clean_energy_ratio(corridor()?) {
            Ok(c) => {
                let rows = [
                    ("eta_max", "1", c.eta_max),
                    ("eta_baseline", "1", c.eta_baseline),
                    ("p_tap_max", "MW", c.p_tap_max),
                    ("i_dc_b", "kA", c.i_dc_b),
                ];
                for (q, u, v) in rows {
                    table.push(vec!["clean_energy".into(), q.into(), u.into(), v.into()]);
                }
                output.insert("clean_energy".into(), to_value(&c));
            }
            Err(e) => record("clean_energy", e, &mut output)?,
        }
    }

    if let Some(p_tap) = solve.distance_p_tap {
        match max_distance(corridor()?, p_tap) {
            Ok(d) => {
                let rows = [
                    ("l_line", "km", d.l_line),
                    ("r_line", "ohm", d.r_line),
                    ("p_rectifier", "MW", d.p_rectifier),
                    ("p_tap", "MW", d.p_tap),
                    ("p_line_loss", "MW", d.p_line_loss),
                    ("p_inverter", "MW", d.p_inverter),
                ];
                for (q, u, v) in rows {
                    table.push(vec!["distance".into(), q.into(), u.into(), v.into()]);
                }
                output.insert("distance".into(), to_value(&d));
            }
            Err(e) => record("distance", e, &mut output)?,
        }
    }

    Ok(Outcome {
        command: "solve",
        status: if failed {
            Status::Infeasible
        } else {
            Status::Ok
        },
        output: Value::Object(output),
        violations,
        diagnostics,
        tables: vec![(String::new(), table)],
    })
}

fn power_sweep(
    params: &EflccParams,
    cfg: &RunConfig,
    i_dc: f64,
    axis: &crate::corridor::Axis,
    lpc_enabled: bool,
    exec: crate::Execution,
) -> Result<(Table, Vec<Value>, usize, usize), CommandError> {
    let grid = cfg.grid.ok_or_else(|| missing("grid"))?;
    let powers = linspace(axis.from, axis.to, axis.steps);
    let results = map_collect(exec, &powers, |&p| {
        solve_operating_point(params, &grid, i_dc, p, lpc_enabled)
    });
    // p_eflcc leads the row, the remaining point columns follow the status
    let names: Vec<&str> = POINT_COLUMNS
        .iter()
        .map(|c| c.0)
        .filter(|n| *n != "p_eflcc")
        .collect();
    let mut header = vec!["p_eflcc", "status", "mode"];
    header.extend(names.iter().copied());
    header.extend(["violations", "reason"]);
    let mut t = Table::new(&header);
    let mut violations = Vec::new();
    let mut bad = 0;
    for (p, r) in powers.iter().zip(results) {
        let mut row: Vec<Cell> = vec![(*p).into()];
        match r {
            Ok(point) => {
                let v: Vec<LimitCheck> = envelope_checks(&point, params)
                    .into_iter()
                    .filter(|c| c.is_violated())
                    .collect();
                for c in &v {
                    let mut val = check_value(c);
                    val["p_eflcc"] = json!(p);
                    violations.push(val);
                }
                row.push("ok".into());
                row.push(point.mode.as_str().into());
                row.extend(
                    POINT_COLUMNS
                        .iter()
                        .zip(point_values(&point))
                        .filter(|(c, _)| c.0 != "p_eflcc")
                        .map(|(_, v)| Cell::Num(v)),
                );
                row.push(v.len().into());
                row.push("".into());
            }
            Err(e) if is_config_error(&e) => return Err(library("sweep.power_distribution", e)),
            Err(e) => {
                bad += 1;
                row.push("infeasible".into());
                row.push("".into());
                row.extend(names.iter().map(|_| Cell::Num(f64::NAN)));
                row.push(0usize.into());
                row.push(e.to_string().into());
            }
        }
        t.push(row);
    }
    Ok((t, violations, bad, powers.len()))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, CommandError> {
    let sweep = cfg.sweep.ok_or_else(|| missing("sweep"))?;
    let exec = sweep.execution;
    let (table, violations, bad, total, kind) = match sweep.kind {
        SweepKind::PowerDistribution {
            i_dc,
            p,
            lpc_enabled,
        } => {
            let params = cfg.eflcc.ok_or_else(|| missing("eflcc"))?;
            let (t, v, bad, total) = power_sweep(&params, cfg, i_dc, &p, lpc_enabled, exec)?;
            (t, v, bad, total, "power_distribution")
        }
        SweepKind::CleanEnergy { u_base, k1, k2 } => {
            let spec = cfg.corridor.as_ref().ok_or_else(|| missing("corridor"))?;
            let cells = sweep_eta(spec, u_base, &k1, &k2, exec)
                .map_err(|e| library("sweep.clean_energy", e))?;
            let mut t = Table::new(&[
                "k1",
                "k2",
                "eta_max",
                "eta_baseline",
                "p_tap_max",
                "i_dc_b",
                "reason",
            ]);
            let mut bad = 0;
            for c in &cells {
                match &c.result {
                    Ok(r) => t.push(vec![
                        c.x.into(),
                        c.y.into(),
                        r.eta_max.into(),
                        r.eta_baseline.into(),
                        r.p_tap_max.into(),
                        r.i_dc_b.into(),
                        "".into(),
                    ]),
                    Err(e) => {
                        bad += 1;
                        let nan = Cell::Num(f64::NAN);
                        t.push(vec![
                            c.x.into(),
                            c.y.into(),
                            nan.clone(),
                            nan.clone(),
                            nan.clone(),
                            nan,
                            e.as_str().into(),
                        ]);
                    }
                }
            }
            (t, Vec::new(), bad, cells.len(), "clean_energy")
        }
        SweepKind::Distance { u_base, k3, p_tap } => {
            let spec = cfg.corridor.as_ref().ok_or_else(|| missing("corridor"))?;
            let cells = sweep_distance(spec, u_base, &k3, &p_tap, exec)
                .map_err(|e| library("sweep.distance", e))?;
            let mut t = Table::new(&[
                "k3",
                "p_tap",
                "l_line",
                "r_line",
                "p_rectifier",
                "p_line_loss",
                "p_inverter",
                "reason",
            ]);
            let mut bad = 0;
            for c in &cells {
                match &c.result {
                    Ok(r) => t.push(vec![
                        c.x.into(),
                        c.y.into(),
                        r.l_line.into(),
                        r.r_line.into(),
                        r.p_rectifier.into(),
                        r.p_line_loss.into(),
                        r.p_inverter.into(),
                        "".into(),
                    ]),
                    Err(e) => {
                        bad += 1;
                        let nan = Cell::Num(f64::NAN);
                        t.push(vec![
                            c.x.into(),
                            c.y.into(),
                            nan.clone(),
                            nan.clone(),
                            nan.clone(),
                            nan.clone(),
                            nan,
                            e.as_str().into(),
                        ]);
                    }
                }
            }
            (t, Vec::new(), bad, cells.len(), "distance")
        }
    };
    let status = if bad == total {
        Status::Infeasible
    } else {
        Status::Ok
    };
    Ok(Outcome {
        command: "sweep",
        status,
        output: json!({
            "kind": kind,
            "cells": total,
            "infeasible_cells": bad,
            "columns": table.header,
        }),
        violations,
        diagnostics: if bad > 0 {
            vec![format!("{bad} of {total} sweep cells are infeasible")]
        } else {
            Vec::new()
        },
        tables: vec![(String::new(), table)],
    })
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Outcome, CommandError> {
    let scenario = cfg.scenario()?;
    let ts = run_scenario(&scenario).map_err(|e| library("scenario", e))?;
    let summary = event_summary(&ts);

    let mut rows = Table::new(&[
        "step",
        "t",
        "p_set",
        "q_set",
        "i_dc_set",
        "lpc_enabled",
        "status",
        "mode",
        "alpha_deg",
        "u_dc",
        "u_dcl",
        "u_dcm",
        "e_dcm",
        "p_lcc",
        "q_lcc",
        "s_lcc",
        "p_fbmmc",
        "q_fbmmc",
        "s_fbmmc",
        "arm_rms",
        "arm_max",
        "violations",
        "u_dcr",
        "u_dci",
        "alpha_r_deg",
        "gamma_i_deg",
        "reason",
    ]);
    let mut infeasible_steps = Vec::new();
    for r in &ts.rows {
        let mut row: Vec<Cell> = vec![
            r.step.into(),
            r.t.into(),
            r.p_set.into(),
            r.q_set.into(),
            r.i_dc_set.into(),
            r.lpc_enabled.into(),
        ];
        let mut reason = String::new();
        match &r.state {
            StepState::Solved { point: p } => {
                row.push("ok".into());
                row.push(p.mode.as_str().into());
                row.extend(
                    [
                        p.alpha.to_degrees(),
                        p.u_dc,
                        p.u_dcl,
                        p.u_dcm,
                        p.e_dcm,
                        p.p_lcc,
                        p.q_lcc,
                        p.s_lcc,
                        p.p_fbmmc,
                        p.q_fbmmc,
                        p.s_fbmmc,
                        p.arm_rms,
                        p.arm_max,
                    ]
                    .map(Cell::Num),
                );
            }
            StepState::Infeasible { reason: why } => {
                infeasible_steps.push(json!({"step": r.step, "t": r.t, "reason": why}));
                reason = why.clone();
                row.push("infeasible".into());
                row.push("".into());
                row.extend([f64::NAN; 13].map(Cell::Num));
            }
        }
        row.push(r.violations.len().into());
        match &r.system {
            Some(Ok(s)) => row.extend(
                [
                    s.u_dcr,
                    s.u_dci,
                    s.alpha_r.to_degrees(),
                    s.gamma_i.to_degrees(),
                ]
                .map(Cell::Num),
            ),
            Some(Err(e)) => {
                if reason.is_empty() {
                    reason = format!("corridor: {e}");
                }
                row.extend([f64::NAN; 4].map(Cell::Num));
            }
            None => row.extend([f64::NAN; 4].map(Cell::Num)),
        }
        row.push(reason.into());
        rows.push(row);
    }

    let mut events = Table::new(&["step", "t", "kind", "detail"]);
    for e in &ts.events {
        events.push(vec![
            e.step.into(),
            e.t.into(),
            e.kind.as_str().into(),
            e.detail.as_str().into(),
        ]);
    }
    let violations = ts
        .rows
        .iter()
        .flat_map(|r| {
            r.violations.iter().map(move |c| {
                let mut v = check_value(c);
                v["t"] = json!(r.t);
                v["step"] = json!(r.step);
                v
            })
        })
        .collect();

    let status = if summary.infeasible_steps > 0 {
        Status::Infeasible
    } else {
        Status::Ok
    };
    Ok(Outcome {
        command: "simulate",
        status,
        output: json!({
            "steps": ts.rows.len(),
            "dt": ts.dt,
            "summary": to_value(&summary),
            "events": to_value(&ts.events),
            "infeasible_steps": infeasible_steps,
        }),
        violations,
        diagnostics: if summary.infeasible_steps > 0 {
            vec![format!(
                "{} of {} steps are infeasible",
                summary.infeasible_steps,
                ts.rows.len()
            )]
        } else {
            Vec::new()
        },
        tables: vec![(String::new(), rows), ("events".into(), events)],
    })
}
