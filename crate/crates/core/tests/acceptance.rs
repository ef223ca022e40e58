//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::{clean_energy_oracle, corridor_case, distance_oracle, load_preset, preset, rel_close};
use hvdc_taplab::cli::cmd_compare;
use hvdc_taplab::converter::{
    arm_emf, fbmmc_arm_currents, lcc_part_dc_voltage, lpc_firing_angle, EmfVariant,
    FbmmcPartParams, GridPoint, LccPartParams,
};
use hvdc_taplab::corridor::{max_clean_energy_ratio, max_distance, CorridorSpec};
use hvdc_taplab::design::{design_kl, design_km};
use hvdc_taplab::eflcc::{
    nominal_lcc_point, solve_operating_point, EflccOperatingPoint, EflccParams, Mode,
};
use hvdc_taplab::sim::{run_scenario, EventKind};

const SAMPLES: usize = 10_000;

/// Collects the sub-checks of one criterion.
#[derive(Default)]
struct Checks {
    passed: usize,
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, label: &str, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(format!("{label}: {}", detail()));
        }
    }

    fn near(&mut self, label: &str, value: f64, expected: f64, tol: f64) {
        self.check(label, (value - expected).abs() <= tol, || {
            format!("{value:.6} not within {expected} ± {tol}")
        });
    }

    fn within(&mut self, label: &str, value: f64, lo: f64, hi: f64) {
        self.check(label, (lo..=hi).contains(&value), || {
            format!("{value:.6} outside [{lo}, {hi}]")
        });
    }
}

struct Suite {
    failed: usize,
}

impl Suite {
    fn run(&mut self, id: &str, title: &str, body: impl FnOnce(&mut Checks)) {
        let mut checks = Checks::default();
        let outcome = catch_unwind(AssertUnwindSafe(|| body(&mut checks)));
        if let Err(panic) = outcome {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            checks.failures.push(format!("panicked: {msg}"));
        }
        if checks.failures.is_empty() {
            println!("[PASS] {id} {title} ({} checks)", checks.passed);
        } else {
            self.failed += 1;
            println!(
                "[FAIL] {id} {title} ({} passed, {} failed): {}",
                checks.passed,
                checks.failures.len(),
                checks.failures.join("; ")
            );
        }
    }
}

fn ac1_clean_energy(c: &mut Checks) {
    let spec = corridor_case();
    let r = max_clean_energy_ratio(&spec).expect("corridor case is feasible");
    c.near("eta_max", r.eta_max, 0.41, 0.01);
    c.near("eta_baseline", r.eta_baseline, 1500.0 / 8000.0, 1e-12);
    let oracle = clean_energy_oracle(&spec).expect("oracle brackets the root");
    c.near("p_tap_max vs oracle", r.p_tap_max, oracle, 0.5);
    c.near("p_tap_max", r.p_tap_max, 1816.6, 0.5);
}

fn ac2_distance(c: &mut Checks) {
    let spec = corridor_case();
    let at = |p: f64| {
        max_distance(&spec, p)
            .expect("distance case is feasible")
            .l_line
    };
    let l400 = at(400.0);
    let l800 = at(800.0);
    let l0 = at(0.0);
    c.check(
        "400 MW within 2% of 4000 km",
        rel_close(l400, 4000.0, 0.02),
        || format!("{l400:.3} km"),
    );
    c.check(
        "800 MW within 2% of 5333 km",
        rel_close(l800, 5333.0, 0.02),
        || format!("{l800:.3} km"),
    );
    c.check(
        "800 MW within 5% of 5300 km",
        rel_close(l800, 5300.0, 0.05),
        || format!("{l800:.3} km"),
    );
    c.check(
        "0 MW within 2% of 2667 km",
        rel_close(l0, 2667.0, 0.02),
        || format!("{l0:.3} km"),
    );
    c.check(
        "0 MW within 5% of 2600 km",
        rel_close(l0, 2600.0, 0.05),
        || format!("{l0:.3} km"),
    );
    for p in [0.0, 400.0, 800.0] {
        let oracle = distance_oracle(&spec, p).expect("oracle brackets the root");
        let l = at(p);
        c.check(
            &format!("{p} MW vs oracle"),
            rel_close(l, oracle, 1e-6),
            || format!("{l} vs {oracle}"),
        );
    }
}

fn field(v: &Value, path: &[&str]) -> f64 {
    let mut cur = v;
    for p in path {
        cur = &cur[*p];
    }
    cur.as_f64()
        .unwrap_or_else(|| panic!("missing numeric field {}", path.join(".")))
}

fn ac3_table_ii(c: &mut Checks) {
    let cfg = load_preset("table_i.toml");
    let outcome = cmd_compare(&cfg).unwrap_or_else(|_| panic!("compare rejected the preset"));
    let out = &outcome.output;
    let e = |k: &str| field(out, &["eflcc", k]);
    let f = |k: &str| field(out, &["fbmmc", k]);
    c.near("S_LCC", e("s_lcc"), 208.0, 1.0);
    c.near("U_dcL", e("u_dcl"), 40.0, 0.1);
    c.near("S_FBMMC (hybrid)", e("s_fbmmc"), 228.0, 2.0);
    c.near("S_FBMMC (FBMMC tap)", f("s_fbmmc"), 403.0, 1.0);
    c.near("arm RMS (hybrid)", e("arm_rms"), 2.75, 0.02);
    c.near("arm RMS (FBMMC tap)", f("arm_rms"), 3.35, 0.02);
    c.near("arm MAX (hybrid)", e("arm_max"), 4.77, 0.1);
    c.near("arm MAX (FBMMC tap)", f("arm_max"), 5.78, 0.1);
    c.near("losses (hybrid)", e("losses_rated"), 3.77, 0.05);
    c.near("losses (FBMMC tap)", f("losses_rated"), 4.35, 0.05);
    c.within(
        "k_L valve side",
        field(out, &["eflcc", "k_l", "valve_kv"]),
        15.0,
        15.9,
    );
    let nameplate = |t: &str| {
        out[t]["k_m"]["nameplate"]
            .as_str()
            .unwrap_or_default()
            .to_string()
    };
    c.check(
        "k_M nameplate (hybrid)",
        nameplate("eflcc") == "30 kV/66 kV",
        || nameplate("eflcc"),
    );
    c.check(
        "k_M nameplate (FBMMC tap)",
        nameplate("fbmmc") == "40 kV/66 kV",
        || nameplate("fbmmc"),
    );
}

fn ac4_lpc_point(c: &mut Checks) {
    let cfg = load_preset("table_i.toml");
    let spec = cfg.design.expect("preset has a design section");
    let k_l = design_kl(&spec).expect("ratio design is feasible").k_l;
    let lcc = LccPartParams {
        k_l,
        x_el: spec.x_el,
        alpha_star: spec.alpha_star,
    };
    let grid = spec.grid;
    let alpha = lpc_firing_angle(&lcc, &grid, 100.0, 5.0).expect("LPC angle exists");
    c.near("alpha (deg)", alpha.to_degrees(), 58.9, 0.2);
    let u_dcl = lcc_part_dc_voltage(&lcc, &grid, alpha, 5.0).expect("valid angle");
    c.near("U_dcL", u_dcl, 20.0, 0.01);

    let params = load_preset("lpc_step.toml")
        .eflcc
        .expect("preset has tap parameters");
    let params = EflccParams { lcc, ..params };
    let p = solve_operating_point(&params, &grid.with_q(30.0), 5.0, 100.0, true)
        .expect("LPC point solves");
    c.check("mode", p.mode == Mode::Lpc, || format!("{:?}", p.mode));
    c.near("U_dcM", p.u_dcm, 0.0, 1e-6);
    c.near("P_FBMMC", p.p_fbmmc, 0.0, 1e-6);
    c.near("U_dcL from solve", p.u_dcl, 20.0, 0.01);
}

fn ac5_scenario(c: &mut Checks) {
    let cfg = load_preset("lpc_step.toml");
    let sc = cfg.scenario().expect("preset builds a scenario");
    let t1 = sc.segments[1].t_start;
    let delay = sc.detection_delay;
    let dt = sc.dt;
    let ts = run_scenario(&sc).expect("scenario runs");
    let point = |i: usize| -> &EflccOperatingPoint {
        ts.rows[i]
            .state
            .point()
            .unwrap_or_else(|| panic!("step {i} infeasible"))
    };
    let step_t1 = (t1 / dt).round() as usize;
    let step_lpc = ((t1 + delay) / dt).round() as usize;

    let before: Vec<usize> = (0..step_t1).collect();
    let plateau = |c: &mut Checks,
                   label: &str,
                   steps: &[usize],
                   get: &dyn Fn(&EflccOperatingPoint) -> f64,
                   want: f64| {
        let worst = steps
            .iter()
            .map(|&i| (get(point(i)) - want).abs())
            .fold(0.0, f64::max);
        c.check(label, worst <= 1e-6, || {
            format!("deviates by {worst:.3e} from {want}")
        });
    };
    plateau(c, "U_dc before t1", &before, &|p| p.u_dc, 80.0);
    plateau(c, "U_dcL before t1", &before, &|p| p.u_dcl, 40.0);
    plateau(c, "U_dcM before t1", &before, &|p| p.u_dcm, 40.0);
    plateau(c, "P_LCC before t1", &before, &|p| p.p_lcc, 200.0);
    plateau(c, "P_FBMMC before t1", &before, &|p| p.p_fbmmc, 200.0);

    // the delay is resolved to ±1 step, so skip one step at each edge
    let window: Vec<usize> = (step_t1 + 1..step_lpc - 1).collect();
    c.check("detection window is populated", window.len() >= 40, || {
        format!("{} steps", window.len())
    });
    plateau(c, "U_dcM in detection window", &window, &|p| p.u_dcm, -20.0);
    plateau(
        c,
        "P_FBMMC in detection window",
        &window,
        &|p| p.p_fbmmc,
        -100.0,
    );

    let changes: Vec<_> = ts
        .events
        .iter()
        .filter(|e| e.kind == EventKind::ModeChange)
        .collect();
    c.check("exactly one mode change", changes.len() == 1, || {
        format!("{} mode changes", changes.len())
    });
    if let Some(e) = changes.first() {
        c.near("mode change time", e.t, t1 + delay, dt + 1e-9);
    }

    let u_dcr = |i: usize| match &ts.rows[i].system {
        Some(Ok(s)) => s.u_dcr,
        other => panic!("corridor state at step {i}: {other:?}"),
    };
    c.near(
        "U_dcR rise across t1",
        u_dcr(step_t1) - u_dcr(step_t1 - 1),
        60.0,
        0.1,
    );
}

struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..=hi)
    }

    /// Random tap whose nominal LCC point exists.
    fn tap(&mut self) -> (EflccParams, GridPoint, f64) {
        loop {
            let grid = GridPoint {
                v_g: self.uniform(20.0, 200.0),
                omega_g: 100.0 * PI,
                q_eflcc: self.uniform(0.0, 150.0),
            };
            let params = EflccParams {
                lcc: LccPartParams {
                    k_l: self.uniform(0.05, 0.6),
                    x_el: self.uniform(0.0, 10.0),
                    alpha_star: self.uniform(0.0, 30.0).to_radians(),
                },
                fbmmc: FbmmcPartParams {
                    k_m: self.uniform(0.2, 1.0),
                    l_em: 0.0,
                    l_arm: 0.0,
                    v_cap_sum_rating: 100.0,
                    rms_sch: 3.0,
                    max_sch: 5.0,
                    s_rating: 300.0,
                },
                p_rated: 400.0,
                q_rated: 50.0,
                i_dc_rated: 5.0,
            };
            let i_dc = self.uniform(0.5, 6.0);
            if nominal_lcc_point(&params, &grid, i_dc).is_ok_and(|n| n.p_lcc_star > 1e-3) {
                return (params, grid, i_dc);
            }
        }
    }
}

fn conservation(c: &mut Checks) {
    let mut s = Sampler::new(0x5eed_0001);
    let mut worst = 0.0f64;
    let mut solved = 0;
    while solved < SAMPLES {
        let (params, grid, i_dc) = s.tap();
        let p_star = nominal_lcc_point(&params, &grid, i_dc)
            .expect("sampled feasible")
            .p_lcc_star;
        let p = s.uniform(0.0, 2.0 * p_star);
        let lpc = s.rng.random_bool(0.5);
        let Ok(pt) = solve_operating_point(&params, &grid, i_dc, p, lpc) else {
            continue;
        };
        solved += 1;
        let u_scale = pt.u_dc.abs().max(pt.u_dcl.abs()).max(pt.u_dcm.abs());
        let p_scale = pt.p_eflcc.abs().max(pt.p_lcc.abs()).max(pt.p_fbmmc.abs());
        let q_scale = pt.q_fbmmc.abs().max(pt.q_lcc.abs()).max(pt.q_eflcc);
        let residuals = [
            (pt.u_dcl + pt.u_dcm - pt.u_dc).abs() / u_scale,
            (pt.p_lcc + pt.p_fbmmc - pt.p_eflcc).abs() / p_scale,
            (pt.u_dcl * pt.i_dc - pt.p_lcc).abs() / p_scale,
            (pt.u_dcm * pt.i_dc - pt.p_fbmmc).abs() / p_scale,
            (pt.u_dc * pt.i_dc - pt.p_eflcc).abs() / p_scale,
            (pt.q_lcc + pt.q_eflcc - pt.q_fbmmc).abs() / q_scale.max(f64::MIN_POSITIVE),
            (pt.p_fbmmc.hypot(pt.q_fbmmc) - pt.s_fbmmc).abs() / pt.s_fbmmc.max(f64::MIN_POSITIVE),
            (pt.p_lcc.hypot(pt.q_lcc) - pt.s_lcc).abs() / pt.s_lcc.max(f64::MIN_POSITIVE),
            (2.0 * pt.e_dcm - pt.u_dcm).abs() / u_scale,
        ];
        worst = residuals.iter().copied().fold(worst, f64::max);
    }
    c.check("operating-point conservation", worst <= 1e-9, || {
        format!("worst relative residual {worst:.3e}")
    });
}

fn lpc_round_trip(c: &mut Checks) {
    let mut s = Sampler::new(0x5eed_0002);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < SAMPLES {
        let (params, grid, i_dc) = s.tap();
        let p_star = nominal_lcc_point(&params, &grid, i_dc)
            .expect("sampled feasible")
            .p_lcc_star;
        let p = s.uniform(0.0, p_star);
        let Ok(alpha) = lpc_firing_angle(&params.lcc, &grid, p, i_dc) else {
            continue;
        };
        n += 1;
        let back =
            lcc_part_dc_voltage(&params.lcc, &grid, alpha, i_dc).expect("angle in range") * i_dc;
        worst = worst.max((back - p).abs() / p_star);
    }
    c.check("LPC angle round trip", worst <= 1e-9, || {
        format!("worst relative error {worst:.3e}")
    });
}

fn mode_boundary(c: &mut Checks) {
    let mut s = Sampler::new(0x5eed_0003);
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let (params, grid, i_dc) = s.tap();
        let p_star = nominal_lcc_point(&params, &grid, i_dc)
            .expect("sampled feasible")
            .p_lcc_star;
        for p in [p_star, p_star * (1.0 - 1e-14)] {
            let fixed =
                solve_operating_point(&params, &grid, i_dc, p, false).expect("fixed angle solves");
            let lpc =
                solve_operating_point(&params, &grid, i_dc, p, true).expect("boundary LPC solves");
            let u = fixed.u_dc.abs().max(fixed.u_dcl.abs());
            let sc = fixed.s_lcc.max(fixed.s_fbmmc).max(p_star);
            let diffs = [
                (fixed.alpha - lpc.alpha).abs(),
                (fixed.u_dcl - lpc.u_dcl).abs() / u,
                (fixed.u_dcm - lpc.u_dcm).abs() / u,
                (fixed.p_lcc - lpc.p_lcc).abs() / sc,
                (fixed.q_lcc - lpc.q_lcc).abs() / sc,
                (fixed.s_fbmmc - lpc.s_fbmmc).abs() / sc,
            ];
            worst = diffs.iter().copied().fold(worst, f64::max);
        }
    }
    c.check("mode boundary continuity", worst <= 1e-6, || {
        format!("worst jump {worst:.3e}")
    });
}

fn random_corridor(s: &mut Sampler) -> CorridorSpec {
    let u_base = s.uniform(400.0, 1600.0);
    CorridorSpec {
        u_dc0_r: None,
        u_dc0_i: None,
        x_lcc_r: 10.0,
        x_lcc_i: 10.0,
        r_0: s.uniform(0.001, 0.02),
        l_line: s.uniform(100.0, 4000.0),
        p_corridor_rated: Some(s.uniform(1000.0, 10000.0)),
        p_res_sendend: Some(s.uniform(0.0, 3000.0)),
        u_dcr_min: Some(s.uniform(0.8, 1.0) * u_base),
        u_dci_max: Some(s.uniform(1.0, 1.2) * u_base),
        u_dcr_rated: Some(s.uniform(1.0, 1.2) * u_base),
        u_dci_rated: Some(u_base),
        i_dc_rated: Some(s.uniform(1.0, 6.0)),
    }
}

fn corridor_oracles(c: &mut Checks) {
    let mut s = Sampler::new(0x5eed_0004);
    let (mut worst_eta, mut worst_dist) = (0.0f64, 0.0f64);
    let mut disagreements = 0;
    let mut compared = 0;
    while compared < SAMPLES {
        let spec = random_corridor(&mut s);
        match (max_clean_energy_ratio(&spec), clean_energy_oracle(&spec)) {
            (Ok(r), Some(o)) if o >= 0.0 => {
                compared += 1;
                let scale = spec.p_corridor_rated.unwrap_or(1.0);
                worst_eta = worst_eta.max(
                    (r.p_tap_max - o).abs() / r.p_tap_max.abs().max(o.abs()).max(1e-9 * scale),
                );
            }
            (Err(_), Some(o)) if o < 0.0 => {}
            (r, o) => {
                disagreements += 1;
                eprintln!("feasibility mismatch: {r:?} vs {o:?}");
            }
        }
        let p_tap = s.uniform(0.0, 2000.0);
        let l = max_distance(&spec, p_tap)
            .expect("rated voltages ordered")
            .l_line;
        let o = distance_oracle(&spec, p_tap).expect("oracle brackets the root");
        worst_dist = worst_dist.max((l - o).abs() / l.abs().max(o.abs()).max(1e-9));
    }
    c.check("clean-energy limit vs bisection", worst_eta <= 1e-6, || {
        format!("worst {worst_eta:.3e}")
    });
    c.check("distance limit vs bisection", worst_dist <= 1e-6, || {
        format!("worst {worst_dist:.3e}")
    });
    c.check("feasibility agrees with oracle", disagreements == 0, || {
        format!("{disagreements} mismatches")
    });
}

fn km_tightness(c: &mut Checks) {
    let mut s = Sampler::new(0x5eed_0005);
    let mut worst_slack = 0.0f64;
    let mut exceeded = 0;
    let mut not_binding_below = 0;
    for _ in 0..SAMPLES {
        let grid = GridPoint {
            v_g: s.uniform(20.0, 200.0),
            omega_g: 100.0 * PI,
            q_eflcc: 0.0,
        };
        let i_dc = s.uniform(0.5, 6.0);
        let rms_sch = i_dc / 3.0 * s.uniform(1.05, 3.0);
        let max_sch = i_dc / 3.0 * s.uniform(1.05, 3.0);
        let s_fbmmc = s.uniform(1.0, 1000.0);
        let k =
            design_km(s_fbmmc, &grid, i_dc, rms_sch, max_sch).expect("limits above the dc share");
        let at = fbmmc_arm_currents(s_fbmmc, k, &grid, i_dc).expect("positive ratio");
        if at.rms > rms_sch * (1.0 + 1e-9) || at.max > max_sch * (1.0 + 1e-9) {
            exceeded += 1;
        }
        let slack = ((rms_sch - at.rms) / rms_sch).min((max_sch - at.max) / max_sch);
        worst_slack = worst_slack.max(slack);
        let below =
            fbmmc_arm_currents(s_fbmmc, k * (1.0 - 1e-6), &grid, i_dc).expect("positive ratio");
        if below.rms <= rms_sch && below.max <= max_sch {
            not_binding_below += 1;
        }
    }
    c.check("limits hold at the designed ratio", exceeded == 0, || {
        format!("{exceeded} samples exceed")
    });
    c.check("one limit is binding", worst_slack <= 1e-9, || {
        format!("worst slack {worst_slack:.3e}")
    });
    c.check(
        "a smaller ratio violates a limit",
        not_binding_below == 0,
        || format!("{not_binding_below} samples still feasible"),
    );
}

fn emf_variants(c: &mut Checks) {
    let mut s = Sampler::new(0x5eed_0006);
    let mut mismatches = 0;
    for _ in 0..SAMPLES {
        let u = s.uniform(-200.0, 200.0);
        let l = s.uniform(0.0, 0.5);
        if arm_emf(u, 0.0, l, EmfVariant::Eflcc) != arm_emf(u, 0.0, l, EmfVariant::FlexLcc) {
            mismatches += 1;
        }
    }
    c.check("EMF variants agree at zero slope", mismatches == 0, || {
        format!("{mismatches} mismatches")
    });
}

fn ac6_properties(c: &mut Checks) {
    conservation(c);
    lpc_round_trip(c);
    mode_boundary(c);
    corridor_oracles(c);
    km_tightness(c);
    emf_variants(c);
}

const RUNS: [(&str, &str); 7] = [
    ("design", "table_i.toml"),
    ("compare", "table_i.toml"),
    ("solve", "corridor_limits.toml"),
    ("sweep", "clean_energy_sweep.toml"),
    ("sweep", "distance_sweep.toml"),
    ("sweep", "power_distribution.toml"),
    ("simulate", "lpc_step.toml"),
];

fn run_cli(command: &str, config: &Path, out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_hvdc-taplab"))
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .status()
        .expect("binary runs")
        .code()
        .unwrap_or(-1)
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .expect("output directory exists")
        .map(|e| e.expect("dir entry").path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p
                .file_name()
                .expect("file name")
                .to_string_lossy()
                .into_owned();
            (name, fs::read(&p).expect("artifact readable"))
        })
        .collect()
}

fn ac7_determinism(c: &mut Checks) {
    let tmp = tempfile::tempdir().expect("temp dir");
    for (i, (command, file)) in RUNS.iter().enumerate() {
        let label = format!("{command} {file}");
        let a = tmp.path().join(format!("{i}-a"));
        let b = tmp.path().join(format!("{i}-b"));
        let code_a = run_cli(command, &preset(file), &a);
        let code_b = run_cli(command, &preset(file), &b);
        c.check(
            &format!("{label} exits 0"),
            code_a == 0 && code_b == 0,
            || format!("{code_a}/{code_b}"),
        );
        let first = artifacts(&a);
        c.check(
            &format!("{label} repeat is byte-identical"),
            first == artifacts(&b),
            || "artifacts differ".into(),
        );

        // re-run from the report's echoed input
        let report: Value =
            serde_json::from_slice(&fs::read(a.join(format!("{command}.json"))).expect("report"))
                .expect("report is JSON");
        let echoed = tmp.path().join(format!("{i}-echo.json"));
        fs::write(
            &echoed,
            serde_json::to_vec(&report["input"]).expect("echo serializes"),
        )
        .expect("write echo");
        let r = tmp.path().join(format!("{i}-r"));
        let code_r = run_cli(command, &echoed, &r);
        c.check(&format!("{label} echo re-run exits 0"), code_r == 0, || {
            format!("{code_r}")
        });
        c.check(
            &format!("{label} echo re-run is byte-identical"),
            first == artifacts(&r),
            || "artifacts differ".into(),
        );
    }
}

fn main() {
    let mut suite = Suite { failed: 0 };
    suite.run(
        "AC1",
        "clean-energy ratio of the 8000 MW corridor",
        ac1_clean_energy,
    );
    suite.run("AC2", "reachable distance versus tap power", ac2_distance);
    suite.run("AC3", "key parameter comparison via compare", ac3_table_ii);
    suite.run("AC4", "LPC point at 100 MW", ac4_lpc_point);
    suite.run("AC5", "LPC step scenario", ac5_scenario);
    suite.run("AC6", "randomized property suites", ac6_properties);
    suite.run("AC7", "byte-identical reruns", ac7_determinism);
    if suite.failed > 0 {
        println!("{} criteria failed", suite.failed);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
