use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hvdc_taplab::converter::{FbmmcPartParams, GridPoint, LccPartParams};
use hvdc_taplab::corridor::{sweep_distance, sweep_eta, Axis, CorridorSpec};
use hvdc_taplab::eflcc::{power_distribution_sweep, EflccParams};
use hvdc_taplab::sim::{run_batch, Scenario, Segment};
use hvdc_taplab::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn corridor() -> CorridorSpec {
    CorridorSpec {
        u_dc0_r: Some(2000.0),
        u_dc0_i: Some(1800.0),
        x_lcc_r: 10.0,
        x_lcc_i: 10.0,
        r_0: 0.006,
        l_line: 2000.0,
        p_corridor_rated: Some(8000.0),
        p_res_sendend: Some(1500.0),
        u_dcr_min: None,
        u_dci_max: None,
        u_dcr_rated: None,
        u_dci_rated: Some(1600.0),
        i_dc_rated: Some(5.0),
    }
}

fn tap() -> (EflccParams, GridPoint) {
    let params = EflccParams {
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
    };
    let grid = GridPoint {
        v_g: 66.0 * (2.0f64 / 3.0).sqrt(),
        omega_g: 100.0 * PI,
        q_eflcc: 50.0,
    };
    (params, grid)
}

fn corridor_grids(c: &mut Criterion) {
    let spec = corridor();
    let mut group = c.benchmark_group("corridor_grid");
    for n in [32usize, 256] {
        let k1 = Axis {
            from: 0.8,
            to: 1.0,
            steps: n,
        };
        let k2 = Axis {
            from: 1.0,
            to: 1.2,
            steps: n,
        };
        let p = Axis {
            from: 0.0,
            to: 1000.0,
            steps: n,
        };
        for (name, exec) in MODES {
            group.bench_with_input(
                BenchmarkId::new(format!("eta_{name}"), n * n),
                &n,
                |b, _| b.iter(|| sweep_eta(black_box(&spec), 1600.0, &k1, &k2, exec).unwrap()),
            );
            group.bench_with_input(
                BenchmarkId::new(format!("distance_{name}"), n * n),
                &n,
                |b, _| b.iter(|| sweep_distance(black_box(&spec), 1600.0, &k1, &p, exec).unwrap()),
            );
        }
    }
    group.finish();
}

fn power_distribution(c: &mut Criterion) {
    let (params, grid) = tap();
    let mut group = c.benchmark_group("power_distribution");
    for steps in [401usize, 40_001] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, steps), &steps, |b, &steps| {
                b.iter(|| {
                    power_distribution_sweep(
                        black_box(&params),
                        &grid,
                        5.0,
                        0.0,
                        400.0,
                        steps,
                        true,
                        exec,
                    )
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn scenario_batch(c: &mut Criterion) {
    let (params, grid) = tap();
    let scenarios: Vec<Scenario> = (0..64)
        .map(|i| Scenario {
            params,
            corridor: None,
            grid: grid.with_q(0.0),
            dt: 0.01,
            duration: 5.0,
            segments: vec![
                Segment {
                    t_start: 0.0,
                    p_eflcc: 400.0,
                    q_eflcc: 50.0,
                    i_dc: 5.0,
                    lpc_enabled: true,
                    ramp: 0.0,
                },
                Segment {
                    t_start: 1.0,
                    p_eflcc: 50.0 + 2.0 * i as f64,
                    q_eflcc: 30.0,
                    i_dc: 5.0,
                    lpc_enabled: true,
                    ramp: 0.2,
                },
            ],
            detection_delay: 0.5,
        })
        .collect();
    let mut group = c.benchmark_group("scenario_batch");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| run_batch(black_box(&scenarios), exec)));
    }
    group.finish();
}

criterion_group!(benches, corridor_grids, power_distribution, scenario_batch);
criterion_main!(benches);
