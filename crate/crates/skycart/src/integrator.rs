//! Fixed-step RK4 integration of the closed loop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{full_dynamics, simplified_dynamics, Accel, ControlInput, PhysicalParams, State};

/// Which equations of motion drive the plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DynamicsModel {
    Full,
    Simplified,
}

impl DynamicsModel {
    pub fn accel(&self, s: &State, u: &ControlInput, p: &PhysicalParams) -> Result<Accel> {
        match self {
            DynamicsModel::Full => full_dynamics(s, u, p),
            DynamicsModel::Simplified => Ok(simplified_dynamics(s, u, p)),
        }
    }
}

fn derivative(
    y: [f64; 6],
    controller: &mut impl FnMut(&State) -> ControlInput,
    model: DynamicsModel,
    p: &PhysicalParams,
) -> Result<[f64; 6]> {
    let s = State::from_array(y);
    let u = controller(&s);
    let a = model.accel(&s, &u, p)?;
    Ok([y[1], a.x_ddot, y[3], a.alpha_ddot, y[5], a.beta_ddot])
}

/// One classical Runge-Kutta step of the six-dimensional first-order system.
///
/// The controller is re-evaluated at every internal stage, so saturations act
/// on the stage states rather than being frozen over the step.
pub fn rk4_step(
    s: &State,
    mut controller: impl FnMut(&State) -> ControlInput,
    model: DynamicsModel,
    p: &PhysicalParams,
    dt: f64,
) -> Result<State> {
    debug_assert!(dt > 0.0, "step size must be positive");
    let y = s.to_array();

    let k1 = derivative(y, &mut controller, model, p)?;
    let mut y2 = y;
    for i in 0..6 {
        y2[i] += 0.5 * dt * k1[i];
    }
    let k2 = derivative(y2, &mut controller, model, p)?;
    let mut y3 = y;
    for i in 0..6 {
        y3[i] += 0.5 * dt * k2[i];
    }
    let k3 = derivative(y3, &mut controller, model, p)?;
    let mut y4 = y;
    for i in 0..6 {
        y4[i] += dt * k3[i];
    }
    let k4 = derivative(y4, &mut controller, model, p)?;

    let mut out = y;
    for i in 0..6 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    let next = State::from_array(out);
    if !next.is_finite() {
        return Err(Error::NonFiniteState);
    }
    Ok(next)
}
