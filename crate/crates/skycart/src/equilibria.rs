//! Attainable equilibrium configurations under thrust saturation.
//!
//! A static pose needs `u2 = u3 = 0` and a thrust balancing the gravity
//! torque, `M g cos(alpha) = u1 sin(beta - alpha)`. With `u1` capped at
//! `U_max` this restricts both the inclination `alpha` and, for each
//! inclination, the attitude `beta`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::control::OuterGains;
use crate::error::{Error, Result};
use crate::model::{ActuatorLimits, ControlInput, PhysicalParams};
use crate::saturation::sat;

/// Closed interval of inclinations that can be held statically.
///
/// Symmetric about `pi/2`: `alpha_min + alpha_max = pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRange {
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl AlphaRange {
    pub fn contains(&self, alpha: f64) -> bool {
        (self.alpha_min..=self.alpha_max).contains(&alpha)
    }

    /// Range shrunk by the stability margin `mu` on both ends.
    pub fn shrunk(&self, mu: f64) -> AlphaRange {
        AlphaRange {
            alpha_min: self.alpha_min + mu,
            alpha_max: self.alpha_max - mu,
        }
    }
}

/// Closed interval of attitudes that can hold a given inclination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaRange {
    pub beta_min: f64,
    pub beta_max: f64,
}

impl BetaRange {
    pub fn contains(&self, beta: f64) -> bool {
        (self.beta_min..=self.beta_max).contains(&beta)
    }
}

/// Inclinations attainable at equilibrium.
///
/// The whole `[0, pi]` when `U_max >= M g`, otherwise
/// `[arccos(U_max / (M g)), arccos(-U_max / (M g))]`.
pub fn attainable_alpha_range(p: &PhysicalParams, lim: &ActuatorLimits) -> AlphaRange {
    let mg = p.apparent_mass() * p.g();
    if lim.u_max() >= mg {
        AlphaRange {
            alpha_min: 0.0,
            alpha_max: PI,
        }
    } else {
        let r = lim.u_max() / mg;
        AlphaRange {
            alpha_min: r.acos(),
            alpha_max: (-r).acos(),
        }
    }
}

/// Attitudes that can hold `alpha_bar`, from the saturated-thrust geometry.
///
/// The interval ends come from solving the torque balance with `u1 = U_max`.
/// An uphill load (`cos(alpha_bar) > 0`) needs `sin(beta - alpha) > 0`, a
/// downhill load the opposite sign, so the interval sits above the object
/// axis below `pi/2` and reflects below it past `pi/2`:
///
/// ```text
/// cos(a) >= 0:  [a + s, a + pi - s]      s = arcsin(M g |cos(a)| / U_max)
/// cos(a) <  0:  [a - pi + s, a - s]
/// ```
pub fn attainable_beta_range(
    alpha_bar: f64,
    p: &PhysicalParams,
    lim: &ActuatorLimits,
) -> Result<BetaRange> {
    let range = attainable_alpha_range(p, lim);
    let cos_a = alpha_bar.cos();
    let ratio = p.apparent_mass() * p.g() * cos_a / lim.u_max();
    if ratio.abs() > 1.0 + 1e-12 {
        return Err(Error::UnattainableAngle {
            alpha_bar,
            alpha_min: range.alpha_min,
            alpha_max: range.alpha_max,
        });
    }
    let s = ratio.abs().clamp(0.0, 1.0).asin();
    if cos_a >= 0.0 {
        Ok(BetaRange {
            beta_min: alpha_bar + s,
            beta_max: alpha_bar + PI - s,
        })
    } else {
        Ok(BetaRange {
            beta_min: alpha_bar - PI + s,
            beta_max: alpha_bar - s,
        })
    }
}

const SIN_TOL: f64 = 1e-9;
const LOAD_TOL: f64 = 1e-9;

/// Steady-state input holding `(alpha_bar, beta_bar)`.
///
/// Always `u2 = u3 = 0`; the thrust is `M g cos(alpha_bar) / sin(beta_bar -
/// alpha_bar)` and must land in `[0, U_max]`. A vanishing gravity load
/// (`cos(alpha_bar) = 0`) needs no thrust regardless of attitude.
pub fn steady_state_input(
    alpha_bar: f64,
    beta_bar: f64,
    p: &PhysicalParams,
    lim: &ActuatorLimits,
) -> Result<ControlInput> {
    let load = p.apparent_mass() * p.g() * alpha_bar.cos();
    let sin_rel = (beta_bar - alpha_bar).sin();
    if sin_rel.abs() <= SIN_TOL {
        if load.abs() <= LOAD_TOL {
            return ControlInput::new(0.0, 0.0, 0.0, lim);
        }
        return Err(Error::SingularEquilibrium);
    }
    let u1 = load / sin_rel;
    // tolerate rounding dust at the saturated boundary
    if !(-1e-12..=lim.u_max() * (1.0 + 1e-12)).contains(&u1) {
        return Err(Error::InfeasibleEquilibrium {
            u1,
            u_max: lim.u_max(),
        });
    }
    ControlInput::new(u1.clamp(0.0, lim.u_max()), 0.0, 0.0, lim)
}

/// Attitude the cascade controller settles at for a held `alpha_bar`:
/// `beta_bar = alpha_bar + sat(gamma * arctan(eps * M g cos(alpha_bar)), pi/2)`.
pub fn controller_equilibrium_attitude(
    alpha_bar: f64,
    outer: &OuterGains,
    p: &PhysicalParams,
) -> f64 {
    let f_t = p.apparent_mass() * p.g() * alpha_bar.cos();
    let theta_bar = sat(outer.gamma() * (outer.epsilon() * f_t).atan(), FRAC_PI_2);
    alpha_bar + theta_bar
}
