use criterion::{black_box, criterion_group, criterion_main, Criterion};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

use skycart::refgov::{rg_step, RgConfig};
use skycart::{
    cascade_step, full_dynamics, rk4_step, simulate_closed_loop, ActuatorLimits, ControlInput,
    ControllerConfig, DynamicsModel, InnerGains, OuterGains, PhysicalParams, Reference, State,
    ThrustLaw, UgvGains,
};

fn setup() -> (PhysicalParams, ActuatorLimits, ControllerConfig) {
    let p = PhysicalParams::desk_scale();
    let lim = ActuatorLimits::new(5.0, 1.3, 10.0).unwrap();
    let cfg = ControllerConfig {
        ugv: UgvGains::new(3.0, 3.0, 10.0, 2.0).unwrap(),
        outer: OuterGains::new(20.0, 5.0, 1.0, &lim).unwrap(),
        inner: InnerGains::new(0.5, 0.01).unwrap(),
        thrust_law: ThrustLaw::Basic,
    };
    (p, lim, cfg)
}

fn bench_dynamics(c: &mut Criterion) {
    let (p, lim, cfg) = setup();
    let s = State::new(0.1, -0.2, FRAC_PI_3, 0.4, FRAC_PI_4, 1.0);
    let u = ControlInput::clamped(2.0, 0.3, -1.0, &lim);

    c.bench_function("full_dynamics", |b| {
        b.iter(|| full_dynamics(black_box(&s), black_box(&u), &p).unwrap())
    });

    c.bench_function("cascade_step", |b| {
        let refs = Reference::new(0.3, FRAC_PI_2);
        b.iter(|| cascade_step(black_box(&s), &refs, &cfg, &p, &lim))
    });

    c.bench_function("rk4_closed_loop_step", |b| {
        let refs = Reference::new(0.3, FRAC_PI_2);
        b.iter(|| {
            rk4_step(
                black_box(&s),
                |st| cascade_step(st, &refs, &cfg, &p, &lim).0,
                DynamicsModel::Full,
                &p,
                1e-3,
            )
            .unwrap()
        })
    });
}

fn bench_closed_loop(c: &mut Criterion) {
    let (p, lim, cfg) = setup();
    let s0 = State::at_rest(0.0, FRAC_PI_3, FRAC_PI_4);
    let refs = Reference::new(0.3, FRAC_PI_2);

    c.bench_function("simulate_1s", |b| {
        b.iter(|| {
            simulate_closed_loop(
                black_box(&s0),
                &refs,
                &cfg,
                &p,
                &lim,
                DynamicsModel::Full,
                1e-3,
                1.0,
            )
            .unwrap()
        })
    });
}

fn bench_governor(c: &mut Criterion) {
    let (p, lim, mut cfg) = setup();
    cfg.thrust_law = ThrustLaw::Improved;
    let rg = RgConfig {
        horizon: 4.0,
        ..RgConfig::default()
    };
    let s = State::at_rest(0.0, FRAC_PI_3, FRAC_PI_4);
    let applied = Reference::new(0.0, FRAC_PI_3);
    let desired = Reference::new(0.3, 2.0 * FRAC_PI_3);

    c.bench_function("rg_step_bisection", |b| {
        b.iter(|| {
            rg_step(
                black_box(&s),
                &applied,
                &desired,
                &cfg,
                &p,
                &lim,
                &rg,
                DynamicsModel::Full,
                1e-3,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_dynamics, bench_closed_loop, bench_governor);
criterion_main!(benches);
