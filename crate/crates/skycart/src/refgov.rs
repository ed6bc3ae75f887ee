//! Nonlinear reference governor: the applied set-point moves toward the
//! desired one by the largest convex step whose constant-reference forward
//! prediction stays inside the constraint set.

use serde::{Deserialize, Serialize};

use crate::control::{cascade_step, ControlDebug, ControllerConfig};
use crate::equilibria::{attainable_alpha_range, controller_equilibrium_attitude};
use crate::error::{Error, Result};
use crate::integrator::{rk4_step, DynamicsModel};
use crate::model::{ActuatorLimits, PhysicalParams, State};
use crate::trajectory::{Reference, Trajectory, TrajectorySample};

fn default_enforce() -> bool {
    true
}

fn default_settle_radius() -> f64 {
    0.05
}

fn default_sample_time() -> f64 {
    0.2
}

fn default_horizon() -> f64 {
    8.0
}

fn default_bisection_tol() -> f64 {
    2f64.powi(-10)
}

fn default_max_bisection_iters() -> u32 {
    12
}

fn default_margin_mu() -> f64 {
    0.05
}

/// Governor timing, search resolution, and constraint-set composition.
///
/// Every field carries a default, so a bare `[rg]` table in a scenario file
/// enables the governor with the stock configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RgConfig {
    /// Period between reference updates \[s\].
    #[serde(default = "default_sample_time")]
    pub sample_time: f64,
    /// Prediction horizon for candidate validation \[s\].
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Bisection interval width at which the search stops.
    #[serde(default = "default_bisection_tol")]
    pub bisection_tol: f64,
    #[serde(default = "default_max_bisection_iters")]
    pub max_bisection_iters: u32,
    /// Stability margin shrinking the attainable inclination range \[rad\].
    #[serde(default = "default_margin_mu")]
    pub margin_mu: f64,
    /// Reject candidates whose pre-clamp commands leave the actuator budget.
    #[serde(default = "default_enforce")]
    pub enforce_actuator_limits: bool,
    /// Reject candidates whose inclination leaves the margin-shrunk range.
    #[serde(default = "default_enforce")]
    pub enforce_alpha_range: bool,
    /// Ball around the candidate equilibrium the prediction must reach by the
    /// end of the horizon; guards against accepting unsettled candidates.
    #[serde(default = "default_settle_radius")]
    pub settle_radius: f64,
}

impl Default for RgConfig {
    fn default() -> Self {
        Self {
            sample_time: default_sample_time(),
            horizon: default_horizon(),
            bisection_tol: default_bisection_tol(),
            max_bisection_iters: default_max_bisection_iters(),
            margin_mu: default_margin_mu(),
            enforce_actuator_limits: true,
            enforce_alpha_range: true,
            settle_radius: default_settle_radius(),
        }
    }
}

impl RgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_time <= 0.0 {
            return Err(Error::InvalidParameter(
                "sample_time must be positive".to_string(),
            ));
        }
        if self.horizon <= 0.0 {
            return Err(Error::InvalidParameter(
                "horizon must be positive".to_string(),
            ));
        }
        if !(0.0 < self.bisection_tol && self.bisection_tol < 1.0) {
            return Err(Error::InvalidParameter(
                "bisection_tol must lie in (0, 1)".to_string(),
            ));
        }
        if self.margin_mu <= 0.0 {
            return Err(Error::InvalidParameter(
                "margin_mu must be positive".to_string(),
            ));
        }
        if self.settle_radius <= 0.0 {
            return Err(Error::InvalidParameter(
                "settle_radius must be positive".to_string(),
            ));
        }
        Ok(())
    }

    /// Margin-shrunk inclination window `[alpha_min + mu, alpha_max - mu]`.
    pub fn alpha_window(&self, p: &PhysicalParams, lim: &ActuatorLimits) -> (f64, f64) {
        let r = attainable_alpha_range(p, lim).shrunk(self.margin_mu);
        (r.alpha_min, r.alpha_max)
    }
}

fn sample_ok(
    alpha: f64,
    debug: &ControlDebug,
    lim: &ActuatorLimits,
    rg: &RgConfig,
    window: (f64, f64),
) -> bool {
    if rg.enforce_alpha_range && !(window.0..=window.1).contains(&alpha) {
        return false;
    }
    if rg.enforce_actuator_limits {
        let u1_ok = (-1e-12..=lim.u_max() + 1e-12).contains(&debug.u1_pre_clamp);
        let u2_ok = debug.u2_pre_clamp.abs() <= lim.t_max();
        let u3_ok = debug.u3_pre_clamp.abs() <= lim.f_max();
        if !(u1_ok && u2_ok && u3_ok) {
            return false;
        }
    }
    true
}

/// Whether every sample of a logged run satisfies the governor's constraint
/// set: pre-clamp commands inside the actuator budget and inclination inside
/// the margin-shrunk attainable window.
pub fn constraints_ok(
    traj: &Trajectory,
    p: &PhysicalParams,
    lim: &ActuatorLimits,
    rg: &RgConfig,
) -> bool {
    violation_count(traj, p, lim, rg) == 0
}

/// Number of logged samples violating the governor's constraint set.
pub fn violation_count(
    traj: &Trajectory,
    p: &PhysicalParams,
    lim: &ActuatorLimits,
    rg: &RgConfig,
) -> usize {
    let window = rg.alpha_window(p, lim);
    traj.samples
        .iter()
        .filter(|s| !sample_ok(s.state.alpha, &s.debug, lim, rg, window))
        .count()
}

/// Distance of a state to the equilibrium the cascade settles at for `refs`.
fn equilibrium_distance(
    s: &State,
    refs: &Reference,
    cfg: &ControllerConfig,
    p: &PhysicalParams,
) -> f64 {
    let beta_eq = controller_equilibrium_attitude(refs.alpha_ref, &cfg.outer, p);
    ((s.x - refs.x_ref).powi(2)
        + s.x_dot.powi(2)
        + (s.alpha - refs.alpha_ref).powi(2)
        + s.alpha_dot.powi(2)
        + (s.beta - beta_eq).powi(2)
        + s.beta_dot.powi(2))
    .sqrt()
}

/// Constant-reference forward prediction: constraints at every step plus the
/// terminal settle ball. Exits early on the first violation.
#[allow(clippy::too_many_arguments)]
pub fn candidate_admissible(
    s0: &State,
    candidate: &Reference,
    cfg: &ControllerConfig,
    p: &PhysicalParams,
    lim: &ActuatorLimits,
    rg: &RgConfig,
    model: DynamicsModel,
    dt: f64,
) -> bool {
    let window = rg.alpha_window(p, lim);
    let steps = (rg.horizon / dt).round() as usize;
    let mut state = *s0;
    for _ in 0..steps {
        let (_, debug) = cascade_step(&state, candidate, cfg, p, lim);
        if !sample_ok(state.alpha, &debug, lim, rg, window) {
            return false;
        }
        match rk4_step(
            &state,
            |s| cascade_step(s, candidate, cfg, p, lim).0,
            model,
            p,
            dt,
        ) {
            Ok(next) => state = next,
            Err(_) => return false,
        }
    }
    let (_, debug) = cascade_step(&state, candidate, cfg, p, lim);
    sample_ok(state.alpha, &debug, lim, rg, window)
        && equilibrium_distance(&state, candidate, cfg, p) < rg.settle_radius
}

/// One governor update from the current state.
///
/// Returns `(1 - c) * applied + c * desired` for the largest `c in [0, 1]`
/// (found by bisection) whose candidate passes [`candidate_admissible`];
/// `c = 1` short-circuits when the desired reference itself passes. Errors if
/// even holding the current applied reference fails, which violates the
/// governor's standing precondition.
#[allow(clippy::too_many_arguments)]
pub fn rg_step(
    s: &State,
    applied: &Reference,
    desired: &Reference,
    cfg: &ControllerConfig,
    p: &PhysicalParams,
    lim: &ActuatorLimits,
    rg: &RgConfig,
    model: DynamicsModel,
    dt: f64,
) -> Result<Reference> {
    if applied == desired {
        return Ok(*desired);
    }
    if candidate_admissible(s, desired, cfg, p, lim, rg, model, dt) {
        return Ok(*desired);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut iters = 0;
    while hi - lo > rg.bisection_tol && iters < rg.max_bisection_iters {
        let mid = 0.5 * (lo + hi);
        let cand = applied.lerp_toward(desired, mid);
        if candidate_admissible(s, &cand, cfg, p, lim, rg, model, dt) {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    if lo == 0.0 && !candidate_admissible(s, applied, cfg, p, lim, rg, model, dt) {
        return Err(Error::InfeasibleReference);
    }
    Ok(applied.lerp_toward(desired, lo))
}

/// Closed-loop run with the governor updating the applied reference every
/// `sample_time` and the cascade running at the integrator rate in between.
///
/// `sample_time` must be an integer multiple of `dt`.
#[allow(clippy::too_many_arguments)]
pub fn rg_run(
    s0: &State,
    initial_applied: &Reference,
    desired: &Reference,
    cfg: &ControllerConfig,
    p: &PhysicalParams,
    lim: &ActuatorLimits,
    rg: &RgConfig,
    model: DynamicsModel,
    dt: f64,
    total_time: f64,
) -> Result<Trajectory> {
    rg.validate()?;
    let per = (rg.sample_time / dt).round() as usize;
    if per == 0 || (rg.sample_time - per as f64 * dt).abs() > 1e-9 * rg.sample_time {
        return Err(Error::InvalidParameter(format!(
            "sample_time = {} must be an integer multiple of dt = {}",
            rg.sample_time, dt
        )));
    }
    let steps = (total_time / dt).round() as usize;
    let mut traj = Trajectory::with_capacity(steps + 1);
    let mut state = *s0;
    let mut applied = *initial_applied;
    for i in 0..=steps {
        let t = i as f64 * dt;
        if i % per == 0 {
            applied = rg_step(&state, &applied, desired, cfg, p, lim, rg, model, dt)?;
        }
        let (input, debug) = cascade_step(&state, &applied, cfg, p, lim);
        traj.samples.push(TrajectorySample {
            t,
            state,
            input,
            debug,
            applied,
        });
        if i < steps {
            let refs = applied;
            state = rk4_step(
                &state,
                |s| cascade_step(s, &refs, cfg, p, lim).0,
                model,
                p,
                dt,
            )
            .map_err(|e| match e {
                Error::NonFiniteState => Error::IntegrationDiverged { t },
                other => other,
            })?;
        }
    }
    Ok(traj)
}
