//! Acceptance checks: each criterion runs standalone, reports its measured
//! values, and owns its tolerances.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skycart::analysis::{
    delta_theta, delta_theta_bound, delta_theta_bound_constant, fictitious_error,
    inner_gain_analytic, inner_gain_numeric, lyapunov_feasible, LyapunovParams,
};
use skycart::control::{theta_ref, thrust_basic};
use skycart::equilibria::{
    attainable_alpha_range, controller_equilibrium_attitude, steady_state_input,
};
use skycart::refgov::{
    candidate_admissible, constraints_ok, rg_run, rg_step, violation_count, RgConfig,
};
use skycart::{
    energy, rk4_step, simulate_closed_loop, ControlInput, DynamicsModel, OuterGains, Reference,
    State, Trajectory,
};

use crate::scenario::{load_scenario, simulate, FIG3, FIG4};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:2} {:<28} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.details
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Model,
    Control,
    Analysis,
    Rg,
}

impl Suite {
    pub fn criteria(self) -> &'static [usize] {
        match self {
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
            Suite::Model => &[6, 7, 9],
            Suite::Control => &[1, 8],
            Suite::Analysis => &[3, 4, 5, 11],
            Suite::Rg => &[2, 10],
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "all" => Some(Suite::All),
            "model" => Some(Suite::Model),
            "control" => Some(Suite::Control),
            "analysis" => Some(Suite::Analysis),
            "rg" => Some(Suite::Rg),
            _ => None,
        }
    }
}

/// Run a suite with one thread per criterion; every criterion owns its own
/// simulation instances, so they are independent. Results come back in
/// criterion order.
pub fn run_suite(suite: Suite) -> Vec<CriterionResult> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = suite
            .criteria()
            .iter()
            .map(|&id| scope.spawn(move || run_criterion(id)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

pub fn run_criterion(id: usize) -> CriterionResult {
    let run = match id {
        1 => c1_fig3_convergence,
        2 => c2_fig4_instability_and_recovery,
        3 => c3_inner_gain,
        4 => c4_disturbance_bound,
        5 => c5_fictitious_error,
        6 => c6_energy_conservation,
        7 => c7_model_reduction,
        8 => c8_cart_law,
        9 => c9_equilibria,
        10 => c10_rg_bisection,
        11 => c11_lyapunov_grid,
        _ => panic!("unknown criterion id {id}"),
    };
    run()
}

fn result(id: usize, name: &'static str, passed: bool, details: String) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed,
        details,
    }
}

fn failure(id: usize, name: &'static str, err: impl std::fmt::Display) -> CriterionResult {
    result(id, name, false, format!("setup failed: {err}"))
}

fn min_pre_clamp_u1(traj: &Trajectory) -> f64 {
    traj.samples
        .iter()
        .map(|s| s.debug.u1_pre_clamp)
        .fold(f64::INFINITY, f64::min)
}

/// Criterion 1: the vertical-hold scenario settles inside tight bands with a
/// thrust that never needs to go negative.
fn c1_fig3_convergence() -> CriterionResult {
    const NAME: &str = "fig3 convergence";
    let sc = match load_scenario(FIG3) {
        Ok(sc) => sc,
        Err(e) => return failure(1, NAME, e),
    };
    let t0 = Instant::now();
    let traj = match simulate(&sc) {
        Ok(t) => t,
        Err(e) => return failure(1, NAME, e),
    };
    let runtime = t0.elapsed().as_secs_f64();
    let a_err = traj.max_alpha_error(FRAC_PI_2, 25.0);
    let x_err = traj.max_x_error(0.3, 25.0);
    let min_u1 = traj.min_u1();
    let min_u1_cmd = min_pre_clamp_u1(&traj);
    let passed =
        a_err < 0.01 && x_err < 0.005 && min_u1 >= 0.0 && min_u1_cmd >= 0.0 && runtime < 5.0;
    result(
        1,
        NAME,
        passed,
        format!(
            "max|alpha-pi/2| = {a_err:.2e} (< 1e-2), max|x-0.3| = {x_err:.2e} (< 5e-3), \
             min u1 = {min_u1:.3} N, min commanded u1 = {min_u1_cmd:.3} N (>= 0), \
             runtime {runtime:.2} s (< 5)"
        ),
    )
}

/// Criterion 2: the leaning set-point destabilizes the bar without the
/// governor and settles cleanly with it, with zero constraint violations.
fn c2_fig4_instability_and_recovery() -> CriterionResult {
    const NAME: &str = "fig4 fall and recovery";
    let sc = match load_scenario(FIG4) {
        Ok(sc) => sc,
        Err(e) => return failure(2, NAME, e),
    };
    let rg = sc.rg.expect("fig4 carries the governor");
    let t0 = Instant::now();

    let mut ungoverned = sc.without_rg();
    ungoverned.duration = 30.0;
    let traj_u = match simulate(&ungoverned) {
        Ok(t) => t,
        Err(e) => return failure(2, NAME, e),
    };
    let window = attainable_alpha_range(&sc.params, &sc.limits).shrunk(rg.margin_mu);
    let max_alpha = traj_u
        .samples
        .iter()
        .map(|s| s.state.alpha)
        .fold(f64::NEG_INFINITY, f64::max);
    let crossed = max_alpha > window.alpha_max && !constraints_ok(&traj_u, &sc.params, &sc.limits, &rg);
    let t_at_flat = traj_u
        .samples
        .iter()
        .find(|s| (s.state.alpha - PI).abs() < 0.05)
        .map(|s| s.t);

    let governed = match simulate(&sc) {
        Ok(t) => t,
        Err(e) => return failure(2, NAME, e),
    };
    let runtime = t0.elapsed().as_secs_f64();
    let g_err = governed.max_alpha_error(sc.desired.alpha_ref, 40.0);
    let violations = violation_count(&governed, &sc.params, &sc.limits, &rg);
    let clean = constraints_ok(&governed, &sc.params, &sc.limits, &rg);

    // applied way-points only ever move toward the desired reference
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for s in &governed.samples {
        let d = s.applied.distance(&sc.desired);
        if d > prev + 1e-12 {
            monotone = false;
        }
        prev = d;
    }

    let passed = crossed
        && t_at_flat.is_some()
        && g_err < 0.01
        && violations == 0
        && clean
        && monotone
        && runtime < 30.0;
    result(
        2,
        NAME,
        passed,
        format!(
            "ungoverned: max alpha = {max_alpha:.3} rad (> {:.3}, violates constraints), \
             reaches pi +- 0.05 at t = {} s; \
             governed: max|alpha-2pi/3| (t >= 40) = {g_err:.2e} (< 1e-2), \
             violations = {violations}, monotone progress = {monotone}, \
             runtime {runtime:.1} s (< 30)",
            window.alpha_max,
            t_at_flat.map_or_else(|| "never".into(), |t| format!("{t:.2}")),
        ),
    )
}

/// Criterion 3: numeric inner-loop l1 gain agrees with the closed form on
/// the critically damped family.
fn c3_inner_gain() -> CriterionResult {
    const NAME: &str = "inner-loop l1 gain";
    let i_u = 0.881e-3;
    let mut worst: f64 = 0.0;
    let mut details = String::new();
    for omega in [1.0, 5.0, 20.0] {
        let k_p = omega * omega * i_u;
        let k_d = 2.0 * omega * i_u;
        let analytic = match inner_gain_analytic(k_p, k_d, i_u) {
            Ok(g) => g,
            Err(e) => return failure(3, NAME, e),
        };
        let numeric = inner_gain_numeric(k_p, k_d, i_u, 40.0 / omega, 0.01 / omega);
        let rel = (numeric.gain - analytic).abs() / analytic;
        worst = worst.max(rel);
        details.push_str(&format!(
            "omega = {omega}: numeric {numeric:.9} vs analytic {analytic:.9} (rel {rel:.1e}); ",
            numeric = numeric.gain,
        ));
    }
    result(
        3,
        NAME,
        worst < 1e-6,
        format!("{details}worst rel err {worst:.2e} (< 1e-6)"),
    )
}

/// Criterion 4: the tilt-times-thrust product peaks exactly at the mapping
/// constant, and the disturbance never exceeds its bound.
fn c4_disturbance_bound() -> CriterionResult {
    const NAME: &str = "disturbance bound";
    let p = skycart::PhysicalParams::desk_scale();
    let lim = skycart::ActuatorLimits::new(5.0, 1.3, 10.0).unwrap();
    let u = lim.u_max();
    let mut details = String::new();
    let mut passed = true;

    for eps in [0.01, 1.0, 100.0] {
        let g = OuterGains::new(20.0, 5.0, eps, &lim).unwrap();
        let constant = delta_theta_bound_constant(&g);

        // brute-force maximum of |u1 cos(theta_ref)| over a 1e6-point grid
        let n = 1_000_000usize;
        let mut grid_max: f64 = 0.0;
        for i in 0..=n {
            let f_t = -u + 2.0 * u * i as f64 / n as f64;
            let tb = theta_ref(f_t, &g);
            let v = (thrust_basic(f_t, tb, &g) * tb.cos()).abs();
            grid_max = grid_max.max(v);
        }
        let gap = (grid_max - constant).abs();

        // bound sweep over random samples, including the saturated tails
        let mut rng = ChaCha8Rng::seed_from_u64(0x0dd5_eed0 ^ eps.to_bits());
        let mut violations = 0usize;
        let mut min_margin = f64::INFINITY;
        for _ in 0..1_000_000 {
            let f_t = rng.gen_range(-10.0 * u..10.0 * u);
            let tt = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
            let alpha = rng.gen_range(0.0..PI);
            let d = delta_theta(f_t, tt, alpha, &g, &p).abs();
            let b = delta_theta_bound(tt, &g, &p);
            if d > b {
                violations += 1;
            }
            min_margin = min_margin.min(b - d);
        }
        passed &= gap < 1e-6 && violations == 0;
        details.push_str(&format!(
            "eps = {eps}: grid max {grid_max:.7} vs 1/(gamma eps) {constant:.7} \
             (|diff| {gap:.1e} < 1e-6), violations {violations}/1e6 (margin >= {min_margin:.1e}); "
        ));
    }
    result(4, NAME, passed, details)
}

/// Criterion 5: the fictitious attitude error never exceeds the real one.
fn c5_fictitious_error() -> CriterionResult {
    const NAME: &str = "fictitious attitude error";
    let lim = skycart::ActuatorLimits::new(5.0, 1.3, 10.0).unwrap();
    let g = OuterGains::new(20.0, 5.0, 1.0, &lim).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xf1c7_1712);
    let mut violations = 0usize;
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_residual: f64 = 0.0;
    for _ in 0..100_000 {
        let f_t = rng.gen_range(-lim.u_max()..lim.u_max());
        let tb = theta_ref(f_t, &g);
        let theta = rng.gen_range(-PI..PI);
        let tf = match fictitious_error(f_t, tb, theta, &lim) {
            Ok(tf) => tf,
            Err(e) => return failure(5, NAME, e),
        };
        let excess = tf.abs() - (theta - tb).abs();
        max_excess = max_excess.max(excess);
        if excess > 0.0 {
            violations += 1;
        }
        if f_t.abs() > 1e-9 {
            let delivered = skycart::pos_sat(f_t / theta.sin(), lim.u_max()) * theta.sin();
            max_residual = max_residual.max((f_t * (tb + tf).sin() / tb.sin() - delivered).abs());
        }
    }
    result(
        5,
        NAME,
        violations == 0 && max_residual < 1e-7,
        format!(
            "violations {violations}/1e5 (max |tf|-|tt| = {max_excess:.1e}), \
             max defining-equation residual {max_residual:.1e} (< 1e-7)"
        ),
    )
}

/// Criterion 6: unforced full-model energy drift stays at integrator order.
fn c6_energy_conservation() -> CriterionResult {
    const NAME: &str = "energy conservation";
    let p = skycart::PhysicalParams::desk_scale();
    let s0 = State::new(0.0, 0.4, FRAC_PI_3, 0.3, FRAC_PI_4, 2.0);
    let (t0e, v0e) = energy(&s0, &p);
    let e0 = t0e + v0e;
    let dt = 1e-4;
    let mut s = s0;
    let mut drift: f64 = 0.0;
    for _ in 0..50_000 {
        s = match rk4_step(&s, |_| ControlInput::zero(), DynamicsModel::Full, &p, dt) {
            Ok(next) => next,
            Err(e) => return failure(6, NAME, e),
        };
        let (ke, pe) = energy(&s, &p);
        drift = drift.max(((ke + pe) - e0).abs() / e0.abs().max(1.0));
    }
    result(
        6,
        NAME,
        drift < 1e-6,
        format!("relative drift over 5 s at dt = 1e-4: {drift:.2e} (< 1e-6)"),
    )
}

/// Criterion 7: with the cart mass scaled x100, the full and reduced models
/// track each other in closed loop.
fn c7_model_reduction() -> CriterionResult {
    const NAME: &str = "model reduction";
    let sc = match load_scenario(FIG3) {
        Ok(sc) => sc,
        Err(e) => return failure(7, NAME, e),
    };
    let heavy = match sc.params.with_cart_mass(sc.params.m_c() * 100.0) {
        Ok(p) => p,
        Err(e) => return failure(7, NAME, e),
    };
    let run = |model| {
        simulate_closed_loop(
            &sc.initial_state,
            &sc.desired,
            &sc.controller,
            &heavy,
            &sc.limits,
            model,
            1e-3,
            5.0,
        )
    };
    let (full, simp) = match (run(DynamicsModel::Full), run(DynamicsModel::Simplified)) {
        (Ok(f), Ok(s)) => (f, s),
        (Err(e), _) | (_, Err(e)) => return failure(7, NAME, e),
    };
    let sup_diff = full
        .samples
        .iter()
        .zip(&simp.samples)
        .map(|(a, b)| (a.state.alpha - b.state.alpha).abs())
        .fold(0.0, f64::max);
    result(
        7,
        NAME,
        sup_diff < 1e-3,
        format!("sup over 5 s of |alpha_full - alpha_reduced| = {sup_diff:.2e} rad (< 1e-3)"),
    )
}

/// Criterion 8: cart law properties over random initial conditions — the
/// acceleration bound, its vanishing, and position convergence.
fn c8_cart_law() -> CriterionResult {
    const NAME: &str = "cart law properties";
    let sc = match load_scenario(FIG3) {
        Ok(sc) => sc,
        Err(e) => return failure(8, NAME, e),
    };
    let bound = sc.controller.ugv.lambda_1() / sc.params.m_c();
    let mut rng = ChaCha8Rng::seed_from_u64(0xca57_0001);
    let refs = Reference::new(0.0, FRAC_PI_2);
    let mut max_accel: f64 = 0.0;
    let mut max_tail_accel: f64 = 0.0;
    let mut max_final_err: f64 = 0.0;
    for _ in 0..100 {
        let s0 = State::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            FRAC_PI_2,
            0.0,
            FRAC_PI_2,
            0.0,
        );
        let traj = match simulate_closed_loop(
            &s0,
            &refs,
            &sc.controller,
            &sc.params,
            &sc.limits,
            DynamicsModel::Simplified,
            1e-3,
            35.0,
        ) {
            Ok(t) => t,
            Err(e) => return failure(8, NAME, e),
        };
        for s in &traj.samples {
            let accel = (s.input.u3() / sc.params.m_c()).abs();
            max_accel = max_accel.max(accel);
            if s.t > 30.0 {
                max_tail_accel = max_tail_accel.max(accel);
            }
        }
        max_final_err = max_final_err.max(traj.last().unwrap().state.x.abs());
    }
    let passed = max_accel <= bound + 1e-9 && max_tail_accel < 1e-4 && max_final_err < 1e-3;
    result(
        8,
        NAME,
        passed,
        format!(
            "100 random starts: max|x_ddot| = {max_accel:.4} (<= {bound:.4} + 1e-9), \
             max|x_ddot| past 30 s = {max_tail_accel:.2e} (< 1e-4), \
             max final |x - x_ref| = {max_final_err:.2e} m (< 1e-3)"
        ),
    )
}

/// Criterion 9: attainable range closed form and the steady-state thrust
/// sweep across the mapping parameter.
fn c9_equilibria() -> CriterionResult {
    const NAME: &str = "equilibria";
    let p = skycart::PhysicalParams::desk_scale();
    let lim = skycart::ActuatorLimits::new(5.0, 1.3, 10.0).unwrap();
    let range = attainable_alpha_range(&p, &lim);
    let expect_min = (5.0f64 / (0.7 * 9.81)).acos();
    let gap = (range.alpha_min - expect_min)
        .abs()
        .max((range.alpha_max - (PI - expect_min)).abs());

    let mut violations = 0usize;
    let mut max_u1: f64 = 0.0;
    for eps in [0.01, 0.1, 1.0, 10.0, 100.0] {
        let g = OuterGains::new(20.0, 5.0, eps, &lim).unwrap();
        for i in 0..1000 {
            let alpha = range.alpha_min
                + (range.alpha_max - range.alpha_min) * i as f64 / 999.0;
            let beta = controller_equilibrium_attitude(alpha, &g, &p);
            match steady_state_input(alpha, beta, &p, &lim) {
                Ok(u) if (0.0..=lim.u_max()).contains(&u.u1()) => {
                    max_u1 = max_u1.max(u.u1());
                }
                _ => violations += 1,
            }
        }
    }
    result(
        9,
        NAME,
        gap < 1e-12 && violations == 0,
        format!(
            "range endpoints off closed form by {gap:.1e} (< 1e-12); steady-thrust sweep \
             (1000 angles x 5 eps): violations {violations}, max u1 = {max_u1:.4} N"
        ),
    )
}

/// Criterion 10: the governor's bisection agrees with a dense linear scan,
/// and applied references only ever approach the desired one.
fn c10_rg_bisection() -> CriterionResult {
    const NAME: &str = "governor bisection";
    let sc = match load_scenario(FIG4) {
        Ok(sc) => sc,
        Err(e) => return failure(10, NAME, e),
    };
    let rg = RgConfig {
        horizon: 6.0,
        bisection_tol: 2f64.powi(-12),
        max_bisection_iters: 12,
        ..RgConfig::default()
    };
    let dt = 0.01;
    let window = attainable_alpha_range(&sc.params, &sc.limits).shrunk(rg.margin_mu);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b15_ec70);
    let mut max_gap: f64 = 0.0;
    let mut worst = String::new();

    for instance in 0..50 {
        let alpha0 = rng.gen_range(window.alpha_min + 0.1..window.alpha_max - 0.1);
        let x0 = rng.gen_range(-0.5..0.5);
        let beta0 = controller_equilibrium_attitude(alpha0, &sc.controller.outer, &sc.params);
        let state = State::at_rest(x0, alpha0, beta0);
        let applied = Reference::new(x0, alpha0);
        let desired = Reference::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(window.alpha_min - 0.3..window.alpha_max + 0.3),
        );

        let stepped = match rg_step(
            &state,
            &applied,
            &desired,
            &sc.controller,
            &sc.params,
            &sc.limits,
            &rg,
            DynamicsModel::Full,
            dt,
        ) {
            Ok(r) => r,
            Err(e) => return failure(10, NAME, e),
        };
        let seg = applied.distance(&desired);
        let c_bisect = if seg == 0.0 {
            1.0
        } else {
            stepped.distance(&applied) / seg
        };

        // dense-scan oracle: largest admissible grid point, scanning down
        let mut c_scan = 0.0;
        for k in (0..=1000usize).rev() {
            let c = k as f64 / 1000.0;
            let cand = applied.lerp_toward(&desired, c);
            if candidate_admissible(
                &state,
                &cand,
                &sc.controller,
                &sc.params,
                &sc.limits,
                &rg,
                DynamicsModel::Full,
                dt,
            ) {
                c_scan = c;
                break;
            }
        }
        let gap = (c_bisect - c_scan).abs();
        if gap > max_gap {
            max_gap = gap;
            worst = format!("instance {instance}: bisect {c_bisect:.4} vs scan {c_scan:.4}");
        }
    }

    // monotone progress on a governed run throttled by the alpha margin
    let run = match rg_run(
        &State::at_rest(0.0, FRAC_PI_3, FRAC_PI_4),
        &Reference::new(0.0, FRAC_PI_3),
        &Reference::new(0.3, window.alpha_max - 0.01),
        &sc.controller,
        &sc.params,
        &sc.limits,
        &rg,
        DynamicsModel::Full,
        dt,
        15.0,
    ) {
        Ok(t) => t,
        Err(e) => return failure(10, NAME, e),
    };
    let desired = Reference::new(0.3, window.alpha_max - 0.01);
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for s in &run.samples {
        let d = s.applied.distance(&desired);
        if d > prev + 1e-12 {
            monotone = false;
        }
        prev = d;
    }

    let passed = max_gap <= 1e-3 + 1e-9 && monotone;
    result(
        10,
        NAME,
        passed,
        format!(
            "50 instances: max |c_bisect - c_scan| = {max_gap:.2e} (<= 1e-3){}; \
             monotone applied progress = {monotone}",
            if worst.is_empty() {
                String::new()
            } else {
                format!(" [{worst}]")
            }
        ),
    )
}

/// Criterion 11: the Lyapunov feasibility inequality and the principal-minor
/// test of its matrix form agree across the parameter grid.
fn c11_lyapunov_grid() -> CriterionResult {
    const NAME: &str = "Lyapunov feasibility grid";
    let mut checked = 0usize;
    let mut disagreements = 0usize;
    let mut feasible_count = 0usize;
    for i in 0..22 {
        let xi = 0.05 + i as f64 * (3.0 - 0.05) / 21.0;
        for j in 0..21 {
            let nu = (j + 1) as f64 / 22.0;
            for k in 0..22 {
                let tt = (k + 1) as f64 * (FRAC_PI_2 * 0.98) / 23.0;
                let v = lyapunov_feasible(&LyapunovParams::new(xi, nu, tt).unwrap());
                checked += 1;
                if v.feasible != v.q_positive_definite {
                    disagreements += 1;
                }
                if v.feasible {
                    feasible_count += 1;
                }
            }
        }
    }
    result(
        11,
        NAME,
        checked >= 10_000 && disagreements == 0,
        format!(
            "{checked} grid points, {disagreements} inequality-vs-minors disagreements \
             ({feasible_count} feasible)"
        ),
    )
}
