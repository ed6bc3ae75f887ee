//! Simulation and analysis toolkit for a planar UAV+UGV team cooperatively
//! manipulating a rigid object.
//!
//! A quadrotor is pinned to one end of a bar whose other end rides on a
//! ground cart. The cart parks the bar at a position set-point with a nested
//! saturated PD; the quadrotor tilts the bar to an inclination set-point
//! through a cascade of an outer tangential-force PD and an inner attitude
//! PD, with the thrust/attitude split chosen so the thrust stays positive and
//! inside its saturation at steady state.
//!
//! Modules:
//!
//! - [`model`]: parameters, state, full/reduced equations of motion, energies
//! - [`integrator`]: fixed-step RK4 with in-stage controller evaluation
//! - [`equilibria`]: attainable poses and steady-state inputs under saturation
//! - [`control`]: the cascade laws and both thrust mappings
//! - [`analysis`]: disturbance bounds, Lyapunov feasibility, loop gains,
//!   small-gain admissibility, fictitious attitude error
//! - [`refgov`]: the simulation-validated reference governor
//! - [`sim`] / [`trajectory`]: closed-loop runs and their logs

pub mod analysis;
pub mod control;
pub mod equilibria;
pub mod error;
pub mod integrator;
pub mod model;
pub mod refgov;
pub mod saturation;
pub mod sim;
pub mod trajectory;

pub use control::{
    cascade_step, ControlDebug, ControllerConfig, InnerGains, OuterGains, ThrustLaw, UgvGains,
};
pub use error::{Error, Result};
pub use integrator::{rk4_step, DynamicsModel};
pub use model::{
    energy, full_dynamics, simplified_dynamics, Accel, ActuatorLimits, ControlInput,
    PhysicalParams, State,
};
pub use refgov::RgConfig;
pub use saturation::{pos_sat, sat};
pub use sim::simulate_closed_loop;
pub use trajectory::{Reference, Trajectory, TrajectorySample};
