//! Quasi-static scenario engine.
//!
//! Each step is an independent steady-state solve of the tap (and of the
//! corridor, when one is attached). The only state carried between steps is
//! the low-power detection timer: after the tap power drops to or below the
//! LCC part's nominal power, the firing angle stays at α* for the detection
//! delay before the LPC takes over. Leaving the low-power region reverts to
//! α* on the same step.

use serde::{Deserialize, Serialize};

use crate::converter::GridPoint;
use crate::corridor::{solve_system_state, CorridorSpec, SystemState};
use crate::design::{estimate_active_losses, estimate_losses};
use crate::eflcc::{
    envelope_checks, nominal_lcc_point, solve_operating_point, EflccOperatingPoint, EflccParams,
    Limit, LimitCheck, Mode,
};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::exec::{map_collect, Execution};

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_DETECTION_DELAY: f64 = 0.5;

/// Setpoints that take effect at `t_start`. With `ramp > 0` the setpoints
/// move linearly from the previous segment's values over `ramp` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_start: f64,
    pub p_eflcc: f64,
    pub q_eflcc: f64,
    pub i_dc: f64,
    pub lpc_enabled: bool,
    pub ramp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorAttachment {
    pub spec: CorridorSpec,
    /// Inverter dc voltage setpoint, kV.
    pub u_dci: f64,
    /// Power of the other taps on the line, MW.
    pub other_taps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: EflccParams,
    pub corridor: Option<CorridorAttachment>,
    pub grid: GridPoint,
    pub dt: f64,
    pub duration: f64,
    pub segments: Vec<Segment>,
    pub detection_delay: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("dt", self.dt)?;
        ensure_positive("duration", self.duration)?;
        ensure_non_negative("detection_delay", self.detection_delay)?;
        self.grid.validate()?;
        let first = self
            .segments
            .first()
            .ok_or_else(|| Error::InvalidInput("scenario has no segments".into()))?;
        if first.t_start != 0.0 {
            return Err(Error::InvalidInput(format!(
                "first segment must start at 0 s, got {}",
                first.t_start
            )));
        }
        for w in self.segments.windows(2) {
            if !(w[1].t_start > w[0].t_start) {
                return Err(Error::InvalidInput(format!(
                    "segments must be sorted by start time ({} then {})",
                    w[0].t_start, w[1].t_start
                )));
            }
        }
        for s in &self.segments {
            ensure_non_negative("ramp", s.ramp)?;
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StepState {
    Solved { point: EflccOperatingPoint },
    Infeasible { reason: String },
}

impl StepState {
    pub fn point(&self) -> Option<&EflccOperatingPoint> {
        match self {
            StepState::Solved { point } => Some(point),
            StepState::Infeasible { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub step: usize,
    pub t: f64,
    pub p_set: f64,
    pub q_set: f64,
    pub i_dc_set: f64,
    pub lpc_enabled: bool,
    pub state: StepState,
    pub system: Option<std::result::Result<SystemState, String>>,
    pub violations: Vec<LimitCheck>,
    /// Check with the smallest relative margin on this step.
    pub tightest: Option<LimitCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ModeChange,
    LpcArmed,
    Violation,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::ModeChange => "mode_change",
            EventKind::LpcArmed => "lpc_armed",
            EventKind::Violation => "violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub step: usize,
    pub t: f64,
    pub kind: EventKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub dt: f64,
    pub rows: Vec<Row>,
    pub events: Vec<Event>,
}

impl TimeSeries {
    /// Rows and events with `from <= t < to`.
    pub fn window(&self, from: f64, to: f64) -> TimeSeries {
        TimeSeries {
            dt: self.dt,
            rows: self
                .rows
                .iter()
                .filter(|r| r.t >= from && r.t < to)
                .cloned()
                .collect(),
            events: self
                .events
                .iter()
                .filter(|e| e.t >= from && e.t < to)
                .cloned()
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Setpoint {
    p: f64,
    q: f64,
    i_dc: f64,
    lpc_enabled: bool,
}

fn setpoint_at(sc: &Scenario, starts: &[usize], step: usize) -> Setpoint {
    let idx = starts.iter().rposition(|&s| s <= step).unwrap_or(0);
    let seg = &sc.segments[idx];
    let target = Setpoint {
        p: seg.p_eflcc,
        q: seg.q_eflcc,
        i_dc: seg.i_dc,
        lpc_enabled: seg.lpc_enabled,
    };
    if idx == 0 || seg.ramp <= 0.0 {
        return target;
    }
    let elapsed = (step - starts[idx]) as f64 * sc.dt;
    if elapsed >= seg.ramp {
        return target;
    }
    let prev = &sc.segments[idx - 1];
    let f = elapsed / seg.ramp;
    let lerp = |a: f64, b: f64| a + (b - a) * f;
    Setpoint {
        p: lerp(prev.p_eflcc, seg.p_eflcc),
        q: lerp(prev.q_eflcc, seg.q_eflcc),
        i_dc: lerp(prev.i_dc, seg.i_dc),
        lpc_enabled: seg.lpc_enabled,
    }
}

fn tightest(checks: &[LimitCheck]) -> Option<LimitCheck> {
    checks
        .iter()
        .copied()
        .min_by(|a, b| a.relative_margin().total_cmp(&b.relative_margin()))
}

pub fn run_scenario(sc: &Scenario) -> Result<TimeSeries> {
    sc.validate()?;
    let n = sc.steps();
    let starts: Vec<usize> = sc
        .segments
        .iter()
        .map(|s| (s.t_start / sc.dt).round() as usize)
        .collect();
    let delay_steps = (sc.detection_delay / sc.dt).round() as usize;

    let mut rows = Vec::with_capacity(n);
    let mut events = Vec::new();
    let mut low_since: Option<usize> = None;
    let mut last_mode: Option<Mode> = None;
    let mut violated: Vec<Limit> = Vec::new();

    for step in 0..n {
        let t = step as f64 * sc.dt;
        let sp = setpoint_at(sc, &starts, step);
        let grid = sc.grid.with_q(sp.q);

        let state = match nominal_lcc_point(&sc.params, &grid, sp.i_dc) {
            Err(e) => {
                low_since = None;
                StepState::Infeasible {
                    reason: e.to_string(),
                }
            }
            Ok(nominal) => {
                let low_power = sp.lpc_enabled && sp.p <= nominal.p_lcc_star;
                let engage = if low_power {
                    let since = *low_since.get_or_insert_with(|| {
                        events.push(Event {
                            step,
                            t,
                            kind: EventKind::LpcArmed,
                            detail: format!(
                                "P = {} MW <= P_LCC* = {:.6} MW; LPC after {} s",
                                sp.p, nominal.p_lcc_star, sc.detection_delay
                            ),
                        });
                        step
                    });
                    step - since >= delay_steps
                } else {
                    low_since = None;
                    false
                };
                match solve_operating_point(&sc.params, &grid, sp.i_dc, sp.p, engage) {
                    Ok(point) => StepState::Solved { point },
                    Err(e) => StepState::Infeasible {
                        reason: e.to_string(),
                    },
                }
            }
        };

        let (checks, row_violations) = match state.point() {
            Some(point) => {
                if let Some(prev) = last_mode {
                    if prev != point.mode {
                        events.push(Event {
                            step,
                            t,
                            kind: EventKind::ModeChange,
                            detail: format!(
                                "{} -> {} (alpha = {:.4} deg)",
                                prev.as_str(),
                                point.mode.as_str(),
                                point.alpha.to_degrees()
                            ),
                        });
                    }
                }
                last_mode = Some(point.mode);
                let checks = envelope_checks(point, &sc.params);
                let v: Vec<LimitCheck> = checks
                    .iter()
                    .copied()
                    .filter(LimitCheck::is_violated)
                    .collect();
                (checks, v)
            }
            None => (Vec::new(), Vec::new()),
        };

        // log each limit when it first becomes violated
        for v in &row_violations {
            if !violated.contains(&v.limit) {
                events.push(Event {
                    step,
                    t,
                    kind: EventKind::Violation,
                    detail: format!(
                        "{} = {:.6} exceeds rating {:.6} (margin {:.6})",
                        v.limit.as_str(),
                        v.value,
                        v.rating,
                        v.margin
                    ),
                });
            }
        }
        violated = row_violations.iter().map(|v| v.limit).collect();

        let system = match (&sc.corridor, state.point()) {
            (Some(att), Some(point)) => {
                let mut taps = Vec::with_capacity(att.other_taps.len() + 1);
                taps.push(point.p_eflcc);
                taps.extend_from_slice(&att.other_taps);
                Some(
                    solve_system_state(&att.spec, sp.i_dc, att.u_dci, &taps)
                        .map_err(|e| e.to_string()),
                )
            }
            (Some(_), None) => Some(Err("tap step infeasible".to_string())),
            (None, _) => None,
        };

        rows.push(Row {
            step,
            t,
            p_set: sp.p,
            q_set: sp.q,
            i_dc_set: sp.i_dc,
            lpc_enabled: sp.lpc_enabled,
            state,
            system,
            violations: row_violations,
            tightest: tightest(&checks),
        });
    }

    Ok(TimeSeries {
        dt: sc.dt,
        rows,
        events,
    })
}

/// Runs independent scenarios, preserving input order.
pub fn run_batch(scenarios: &[Scenario], exec: Execution) -> Vec<Result<TimeSeries>> {
    map_collect(exec, scenarios, run_scenario)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstMargin {
    pub t: f64,
    pub limit: Limit,
    pub relative_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mode_changes: usize,
    pub lpc_armed: usize,
    pub violations: usize,
    pub infeasible_steps: usize,
    pub time_fixed_alpha: f64,
    pub time_lpc: f64,
    pub time_infeasible: f64,
    pub worst_margin: Option<WorstMargin>,
    /// Loss energy from apparent-power throughput, MW·s.
    pub loss_energy: f64,
    /// Loss energy from active-power throughput, MW·s.
    pub loss_energy_active: f64,
    pub transmitted_energy: f64,
    /// Time-averaged loss over solved steps, MW.
    pub average_loss: f64,
    pub average_loss_active: f64,
}

pub fn event_summary(ts: &TimeSeries) -> Summary {
    let count = |k: EventKind| ts.events.iter().filter(|e| e.kind == k).count();
    let mut s = Summary {
        mode_changes: count(EventKind::ModeChange),
        lpc_armed: count(EventKind::LpcArmed),
        violations: count(EventKind::Violation),
        infeasible_steps: 0,
        time_fixed_alpha: 0.0,
        time_lpc: 0.0,
        time_infeasible: 0.0,
        worst_margin: None,
        loss_energy: 0.0,
        loss_energy_active: 0.0,
        transmitted_energy: 0.0,
        average_loss: 0.0,
        average_loss_active: 0.0,
    };
    let mut solved = 0usize;
    for row in &ts.rows {
        match row.state.point() {
            None => {
                s.infeasible_steps += 1;
                s.time_infeasible += ts.dt;
            }
            Some(p) => {
                solved += 1;
                match p.mode {
                    Mode::FixedAlpha => s.time_fixed_alpha += ts.dt,
                    Mode::Lpc => s.time_lpc += ts.dt,
                }
                s.loss_energy += estimate_losses(p.s_lcc, p.s_fbmmc) * ts.dt;
                s.loss_energy_active += estimate_active_losses(p.p_lcc, p.p_fbmmc) * ts.dt;
                s.transmitted_energy += p.p_eflcc * ts.dt;
            }
        }
        if let Some(c) = row.tightest {
            let rel = c.relative_margin();
            if s.worst_margin.is_none_or(|w| rel < w.relative_margin) {
                s.worst_margin = Some(WorstMargin {
                    t: row.t,
                    limit: c.limit,
                    relative_margin: rel,
                });
            }
        }
    }
    if solved > 0 {
        let span = solved as f64 * ts.dt;
        s.average_loss = s.loss_energy / span;
        s.average_loss_active = s.loss_energy_active / span;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::converter::{FbmmcPartParams, LccPartParams};
    use std::f64::consts::PI;

    fn params() -> EflccParams {
        EflccParams {
            lcc: LccPartParams {
                k_l: 0.234_084_791_310_368_13,
                x_el: 3.0,
                alpha_star: 5f64.to_radians(),
            },
            fbmmc: FbmmcPartParams {
                k_m: 30.0 / 66.0,
                l_em: 0.0,
                l_arm: 0.0,
                v_cap_sum_rating: 60.0,
                rms_sch: 2.8,
                max_sch: 4.85,
                s_rating: 228.0,
            },
            p_rated: 400.0,
            q_rated: 50.0,
            i_dc_rated: 5.0,
        }
    }

    fn seg(t_start: f64, p: f64, q: f64) -> Segment {
        Segment {
            t_start,
            p_eflcc: p,
            q_eflcc: q,
            i_dc: 5.0,
            lpc_enabled: true,
            ramp: 0.0,
        }
    }

    fn scenario(segments: Vec<Segment>) -> Scenario {
        Scenario {
            params: params(),
            corridor: None,
            grid: GridPoint::new(53.888_774_341_229_92, 100.0 * PI, 0.0).unwrap(),
            dt: DEFAULT_DT,
            duration: 2.5,
            segments,
            detection_delay: DEFAULT_DETECTION_DELAY,
        }
    }

    #[test]
    fn lpc_engages_after_delay() {
        let ts = run_scenario(&scenario(vec![
            seg(0.0, 400.0, 50.0),
            seg(1.0, 100.0, 30.0),
        ]))
        .unwrap();
        assert_eq!(ts.rows.len(), 251);
        let changes: Vec<_> = ts
            .events
            .iter()
            .filter(|e| e.kind == EventKind::ModeChange)
            .collect();
        assert_eq!(changes.len(), 1);
        assert_eq!(changes[0].step, 150);
        let armed: Vec<_> = ts
            .events
            .iter()
            .filter(|e| e.kind == EventKind::LpcArmed)
            .collect();
        assert_eq!(armed.len(), 1);
        assert_eq!(armed[0].step, 100);

        let at = |k: usize| *ts.rows[k].state.point().unwrap();
        assert!((at(99).u_dcm - 40.0).abs() < 1e-9);
        assert!((at(149).u_dcm + 20.0).abs() < 1e-9);
        assert!(at(150).u_dcm.abs() < 1e-9);
        assert_eq!(at(149).u_dc, at(150).u_dc);
    }

    #[test]
    fn constant_high_power_has_no_mode_change() {
        let ts = run_scenario(&scenario(vec![seg(0.0, 350.0, 50.0)])).unwrap();
        assert_eq!(event_summary(&ts).mode_changes, 0);
        assert_eq!(event_summary(&ts).lpc_armed, 0);
    }

    #[test]
    fn leaving_low_power_reverts_immediately() {
        let ts = run_scenario(&scenario(vec![seg(0.0, 100.0, 0.0), seg(1.0, 400.0, 0.0)])).unwrap();
        let modes: Vec<Mode> = ts
            .rows
            .iter()
            .map(|r| r.state.point().unwrap().mode)
            .collect();
        assert_eq!(modes[49], Mode::FixedAlpha);
        assert_eq!(modes[50], Mode::Lpc);
        assert_eq!(modes[99], Mode::Lpc);
        assert_eq!(modes[100], Mode::FixedAlpha);
        assert_eq!(event_summary(&ts).mode_changes, 2);
    }

    #[test]
    fn ramps_interpolate() {
        let mut b = seg(1.0, 200.0, 0.0);
        b.ramp = 0.5;
        let ts = run_scenario(&scenario(vec![seg(0.0, 400.0, 0.0), b])).unwrap();
        assert!((ts.rows[125].p_set - 300.0).abs() < 1e-9);
        assert_eq!(ts.rows[150].p_set, 200.0);
    }

    #[test]
    fn infeasible_steps_are_marked() {
        let mut bad = seg(1.0, 100.0, 0.0);
        bad.i_dc = 0.0;
        let ts = run_scenario(&scenario(vec![seg(0.0, 400.0, 0.0), bad])).unwrap();
        assert!(matches!(ts.rows[120].state, StepState::Infeasible { .. }));
        let s = event_summary(&ts);
        assert_eq!(s.infeasible_steps, 151);
        assert!((s.time_infeasible - 1.51).abs() < 1e-9);
    }

    #[test]
    fn violations_are_logged_once_per_onset() {
        let ts = run_scenario(&scenario(vec![
            seg(0.0, 400.0, 50.0),
            seg(1.0, 100.0, 50.0),
        ]))
        .unwrap();
        let v: Vec<_> = ts
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Violation)
            .collect();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].step, 150);
        assert!(event_summary(&ts).worst_margin.unwrap().relative_margin < 0.0);
    }

    #[test]
    fn rejects_malformed_scenarios() {
        assert!(run_scenario(&scenario(vec![])).is_err());
        assert!(run_scenario(&scenario(vec![seg(0.5, 100.0, 0.0)])).is_err());
        assert!(run_scenario(&scenario(vec![seg(0.0, 1.0, 0.0), seg(0.0, 2.0, 0.0)])).is_err());
    }

    #[test]
    fn batch_matches_individual_runs() {
        let a = scenario(vec![seg(0.0, 400.0, 50.0), seg(1.0, 100.0, 30.0)]);
        let b = scenario(vec![seg(0.0, 300.0, 0.0)]);
        let out = run_batch(&[a.clone(), b], Execution::Parallel);
        assert_eq!(out[0].as_ref().unwrap(), &run_scenario(&a).unwrap());
    }

    #[test]
    fn lpc_lowers_active_loss_after_the_step() {
        let with = scenario(vec![seg(0.0, 400.0, 50.0), seg(1.0, 100.0, 30.0)]);
        let mut without = with.clone();
        for s in &mut without.segments {
            s.lpc_enabled = false;
        }
        let window = |sc: &Scenario| event_summary(&run_scenario(sc).unwrap().window(1.0, 2.5));
        let (a, b) = (window(&with), window(&without));
        assert_eq!(a.mode_changes, 1);
        assert_eq!(b.mode_changes, 0);
        assert!(a.average_loss_active < b.average_loss_active);
        // the LPC angle raises the reactive burden, so the apparent-power
        // estimate moves the other way
        assert!(a.average_loss > b.average_loss);
    }

    proptest::proptest! {
        #[test]
        fn lpc_never_engages_before_the_delay(
            powers in proptest::collection::vec(0.0f64..400.0, 1..6),
            gaps in proptest::collection::vec(1usize..80, 6),
            delay_steps in 0usize..60,
        ) {
            let mut t = 0usize;
            let segments: Vec<Segment> = powers
                .iter()
                .zip(&gaps)
                .map(|(&p, &g)| {
                    let s = seg(t as f64 * DEFAULT_DT, p, 0.0);
                    t += g;
                    s
                })
                .collect();
            let mut sc = scenario(segments);
            sc.detection_delay = delay_steps as f64 * DEFAULT_DT;
            let ts = run_scenario(&sc).unwrap();
            let p_star = nominal_lcc_point(&sc.params, &sc.grid, 5.0).unwrap().p_lcc_star;
            let mut low_for = 0usize;
            for row in &ts.rows {
                let low = row.p_set <= p_star;
                let mode = row.state.point().map(|p| p.mode);
                if mode == Some(Mode::Lpc) {
                    proptest::prop_assert!(low && low_for >= delay_steps, "step {}", row.step);
                }
                low_for = if low { low_for + 1 } else { 0 };
            }
        }
    }
}
