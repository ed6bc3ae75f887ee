//! Closed-loop runs of the cascade against either plant model.

use crate::control::{cascade_step, ControllerConfig};
use crate::error::{Error, Result};
use crate::integrator::{rk4_step, DynamicsModel};
use crate::model::{ActuatorLimits, PhysicalParams, State};
use crate::trajectory::{Reference, Trajectory, TrajectorySample};

/// Simulate the cascade tracking a fixed reference, logging every step.
///
/// Deterministic: sample times are `i * dt`, never accumulated. Divergence is
/// reported with the last time that still had a finite state.
#[allow(clippy::too_many_arguments)]
pub fn simulate_closed_loop(
    s0: &State,
    refs: &Reference,
    cfg: &ControllerConfig,
    p: &PhysicalParams,
    lim: &ActuatorLimits,
    model: DynamicsModel,
    dt: f64,
    duration: f64,
) -> Result<Trajectory> {
    let steps = (duration / dt).round() as usize;
    let mut traj = Trajectory::with_capacity(steps + 1);
    let mut state = *s0;
    for i in 0..=steps {
        let t = i as f64 * dt;
        let (input, debug) = cascade_step(&state, refs, cfg, p, lim);
        traj.samples.push(TrajectorySample {
            t,
            state,
            input,
            debug,
            applied: *refs,
        });
        if i < steps {
            state = rk4_step(
                &state,
                |s| cascade_step(s, refs, cfg, p, lim).0,
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
