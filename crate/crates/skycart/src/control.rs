//! Feedback laws: nested saturated PD for the cart, tangential-force PD with
//! gravity compensation for the object inclination, the thrust/attitude
//! mapping (basic and improved), and the attitude PD for the quadrotor.
//!
//! The cascade runs at one rate and carries no internal state: the outer loop
//! turns the inclination error into a tangential-force demand `f_t`, the
//! mapping splits `f_t` into a thrust and an attitude reference, and the
//! inner PD tracks that attitude.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActuatorLimits, ControlInput, PhysicalParams, State};
use crate::saturation::{pos_sat, sat};
use crate::trajectory::Reference;

/// Below this tangential-force magnitude the basic thrust mapping returns its
/// removable-singularity limit `1 / (gamma * epsilon)`.
pub const F_TOL: f64 = 1e-9;

/// Cart gains for the nested saturated PD.
///
/// `lambda_2 < lambda_1 * k_d_x / 2` is required for global asymptotic
/// stability; `lambda_1 <= F_max` keeps the law inside the actuator budget
/// and is checked against the limits separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUgvGains", into = "RawUgvGains")]
pub struct UgvGains {
    k_p_x: f64,
    k_d_x: f64,
    lambda_1: f64,
    lambda_2: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawUgvGains {
    k_p_x: f64,
    k_d_x: f64,
    lambda_1: f64,
    lambda_2: f64,
}

impl TryFrom<RawUgvGains> for UgvGains {
    type Error = Error;

    fn try_from(r: RawUgvGains) -> Result<Self> {
        UgvGains::new(r.k_p_x, r.k_d_x, r.lambda_1, r.lambda_2)
    }
}

impl From<UgvGains> for RawUgvGains {
    fn from(g: UgvGains) -> Self {
        RawUgvGains {
            k_p_x: g.k_p_x,
            k_d_x: g.k_d_x,
            lambda_1: g.lambda_1,
            lambda_2: g.lambda_2,
        }
    }
}

impl UgvGains {
    pub fn new(k_p_x: f64, k_d_x: f64, lambda_1: f64, lambda_2: f64) -> Result<Self> {
        for (name, v) in [
            ("k_p_x", k_p_x),
            ("k_d_x", k_d_x),
            ("lambda_1", lambda_1),
            ("lambda_2", lambda_2),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if lambda_2 >= 0.5 * lambda_1 * k_d_x {
            return Err(Error::InvalidParameter(format!(
                "lambda_2 = {lambda_2} must be below lambda_1 * k_d_x / 2 = {} \
                 for global asymptotic stability of the cart loop",
                0.5 * lambda_1 * k_d_x
            )));
        }
        Ok(Self {
            k_p_x,
            k_d_x,
            lambda_1,
            lambda_2,
        })
    }

    pub fn k_p_x(&self) -> f64 {
        self.k_p_x
    }

    pub fn k_d_x(&self) -> f64 {
        self.k_d_x
    }

    pub fn lambda_1(&self) -> f64 {
        self.lambda_1
    }

    pub fn lambda_2(&self) -> f64 {
        self.lambda_2
    }
}

/// Outer-loop gains plus the thrust/attitude mapping parameters.
///
/// `gamma` is derived, not free: `gamma = pi / (2 arctan(epsilon * U_max))`
/// pins the mapping so that `f_t = U_max` demands exactly `theta = pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "RawOuterGainsDef")]
pub struct OuterGains {
    k_p_alpha: f64,
    k_d_alpha: f64,
    epsilon: f64,
    gamma: f64,
}

/// Schema mirror of [`OuterGains`]: `gamma` never appears in files, it is
/// derived against the actuator limits when the gains are assembled.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOuterGainsDef {
    pub k_p_alpha: f64,
    pub k_d_alpha: f64,
    pub epsilon: f64,
}

impl From<OuterGains> for RawOuterGainsDef {
    fn from(g: OuterGains) -> Self {
        RawOuterGainsDef {
            k_p_alpha: g.k_p_alpha,
            k_d_alpha: g.k_d_alpha,
            epsilon: g.epsilon,
        }
    }
}

impl OuterGains {
    pub fn new(k_p_alpha: f64, k_d_alpha: f64, epsilon: f64, lim: &ActuatorLimits) -> Result<Self> {
        for (name, v) in [
            ("k_p_alpha", k_p_alpha),
            ("k_d_alpha", k_d_alpha),
            ("epsilon", epsilon),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(Self {
            k_p_alpha,
            k_d_alpha,
            epsilon,
            gamma: FRAC_PI_2 / (epsilon * lim.u_max()).atan(),
        })
    }

    pub fn k_p_alpha(&self) -> f64 {
        self.k_p_alpha
    }

    pub fn k_d_alpha(&self) -> f64 {
        self.k_d_alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Attitude PD gains for the quadrotor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInnerGains", into = "RawInnerGains")]
pub struct InnerGains {
    k_p_beta: f64,
    k_d_beta: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawInnerGains {
    k_p_beta: f64,
    k_d_beta: f64,
}

impl TryFrom<RawInnerGains> for InnerGains {
    type Error = Error;

    fn try_from(r: RawInnerGains) -> Result<Self> {
        InnerGains::new(r.k_p_beta, r.k_d_beta)
    }
}

impl From<InnerGains> for RawInnerGains {
    fn from(g: InnerGains) -> Self {
        RawInnerGains {
            k_p_beta: g.k_p_beta,
            k_d_beta: g.k_d_beta,
        }
    }
}

impl InnerGains {
    pub fn new(k_p_beta: f64, k_d_beta: f64) -> Result<Self> {
        for (name, v) in [("k_p_beta", k_p_beta), ("k_d_beta", k_d_beta)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(Self { k_p_beta, k_d_beta })
    }

    pub fn k_p_beta(&self) -> f64 {
        self.k_p_beta
    }

    pub fn k_d_beta(&self) -> f64 {
        self.k_d_beta
    }
}

/// Which thrust mapping closes the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThrustLaw {
    /// `u1 = f_t / sin(theta_ref)`: always positive, ignores the actual attitude.
    Basic,
    /// `u1 = pos_sat(f_t / sin(theta), U_max)` on the measured relative
    /// attitude; the saturation is part of the law.
    Improved,
}

/// Complete gain set for the decentralized cascade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControllerConfig {
    pub ugv: UgvGains,
    pub outer: OuterGains,
    pub inner: InnerGains,
    pub thrust_law: ThrustLaw,
}

impl ControllerConfig {
    /// Cross-checks that need the actuator limits: `lambda_1 <= F_max`.
    pub fn validate_against(&self, lim: &ActuatorLimits) -> Result<()> {
        if self.ugv.lambda_1() > lim.f_max() {
            return Err(Error::InvalidParameter(format!(
                "lambda_1 = {} exceeds F_max = {}",
                self.ugv.lambda_1(),
                lim.f_max()
            )));
        }
        Ok(())
    }
}

/// Controller internals exposed for constraint supervision and logging.
///
/// The `*_pre_clamp` fields are the values the laws command before the plant
/// saturates them. For the improved thrust law the saturation is part of the
/// law itself, so `u1_pre_clamp` already lies in `[0, U_max]` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlDebug {
    pub f_t: f64,
    pub theta_ref: f64,
    pub beta_ref: f64,
    pub u1_pre_clamp: f64,
    pub u2_pre_clamp: f64,
    pub u3_pre_clamp: f64,
}

/// Nested saturated PD for the cart:
/// `u3 = -sat(k_d_x x_dot + sat(k_p_x (x - x_ref), lambda_2), lambda_1)`.
pub fn ugv_control(s: &State, x_ref: f64, g: &UgvGains) -> f64 {
    -sat(
        g.k_d_x() * s.x_dot + sat(g.k_p_x() * (s.x - x_ref), g.lambda_2()),
        g.lambda_1(),
    )
}

/// Outer-loop PD with gravity compensation:
/// `f_t = -k_p_alpha (alpha - alpha_ref) - k_d_alpha alpha_dot + M g cos(alpha)`.
pub fn tangential_force(s: &State, alpha_ref: f64, g: &OuterGains, p: &PhysicalParams) -> f64 {
    -g.k_p_alpha() * (s.alpha - alpha_ref) - g.k_d_alpha() * s.alpha_dot
        + p.apparent_mass() * p.g() * s.alpha.cos()
}

/// Relative-attitude reference `theta_ref = sat(gamma * arctan(eps * f_t), pi/2)`.
///
/// Odd and monotone in `f_t`, bounded by `pi/2`; saturates exactly when
/// `|f_t| > U_max` thanks to the `gamma` tuning.
pub fn theta_ref(f_t: f64, g: &OuterGains) -> f64 {
    sat(g.gamma() * (g.epsilon() * f_t).atan(), FRAC_PI_2)
}

/// Basic thrust mapping `u1 = f_t / sin(theta_ref)`.
///
/// A quotient of odd increasing functions, hence strictly positive; the
/// removable singularity at `f_t = 0` evaluates to `1 / (gamma * epsilon)`.
pub fn thrust_basic(f_t: f64, theta_ref: f64, g: &OuterGains) -> f64 {
    if f_t.abs() <= F_TOL {
        1.0 / (g.gamma() * g.epsilon())
    } else {
        f_t / theta_ref.sin()
    }
}

/// Improved thrust mapping `u1 = pos_sat(f_t / sin(theta), U_max)` on the
/// measured relative attitude `theta = beta - alpha`.
///
/// At `sin(theta) = 0` the quotient limit is taken pointwise: `U_max` when the
/// signs agree, `0` when they oppose, and the basic-law limit
/// `1 / (gamma * epsilon)` only when `f_t` vanishes as well.
pub fn thrust_improved(f_t: f64, theta: f64, g: &OuterGains, lim: &ActuatorLimits) -> f64 {
    let sin_theta = theta.sin();
    if f_t.abs() <= F_TOL && sin_theta.abs() <= F_TOL {
        return 1.0 / (g.gamma() * g.epsilon());
    }
    if sin_theta == 0.0 {
        // IEEE would give the right signed infinity anyway; keep it explicit
        return if f_t > 0.0 { lim.u_max() } else { 0.0 };
    }
    pos_sat(f_t / sin_theta, lim.u_max())
}

/// Attitude PD `u2 = -k_p_beta (beta - beta_ref) - k_d_beta beta_dot`.
pub fn inner_control(s: &State, beta_ref: f64, g: &InnerGains) -> f64 {
    -g.k_p_beta() * (s.beta - beta_ref) - g.k_d_beta() * s.beta_dot
}

/// One evaluation of the whole cascade.
///
/// The attitude reference composes as `beta_ref = theta_ref + alpha` with the
/// instantaneous inclination. Returns the physically clamped input alongside
/// the pre-clamp commands.
pub fn cascade_step(
    s: &State,
    refs: &Reference,
    cfg: &ControllerConfig,
    p: &PhysicalParams,
    lim: &ActuatorLimits,
) -> (ControlInput, ControlDebug) {
    let f_t = tangential_force(s, refs.alpha_ref, &cfg.outer, p);
    let theta_bar = theta_ref(f_t, &cfg.outer);
    let beta_bar = theta_bar + s.alpha;

    let u1 = match cfg.thrust_law {
        ThrustLaw::Basic => thrust_basic(f_t, theta_bar, &cfg.outer),
        ThrustLaw::Improved => thrust_improved(f_t, s.theta(), &cfg.outer, lim),
    };
    let u2 = inner_control(s, beta_bar, &cfg.inner);
    let u3 = ugv_control(s, refs.x_ref, &cfg.ugv);

    let debug = ControlDebug {
        f_t,
        theta_ref: theta_bar,
        beta_ref: beta_bar,
        u1_pre_clamp: u1,
        u2_pre_clamp: u2,
        u3_pre_clamp: u3,
    };
    (ControlInput::clamped(u1, u2, u3, lim), debug)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn limits() -> ActuatorLimits {
        ActuatorLimits::new(5.0, 1.3, 10.0).unwrap()
    }

    fn config() -> ControllerConfig {
        let lim = limits();
        ControllerConfig {
            ugv: UgvGains::new(3.0, 3.0, 10.0, 2.0).unwrap(),
            outer: OuterGains::new(20.0, 5.0, 1.0, &lim).unwrap(),
            inner: InnerGains::new(0.5, 0.01).unwrap(),
            thrust_law: ThrustLaw::Basic,
        }
    }

    #[test]
    fn ugv_gain_gate() {
        assert!(UgvGains::new(3.0, 3.0, 10.0, 15.0).is_err());
        assert!(UgvGains::new(3.0, 3.0, 10.0, 14.9).is_ok());
        assert!(UgvGains::new(0.0, 3.0, 10.0, 2.0).is_err());
    }

    #[test]
    fn ugv_control_examples() {
        let g = UgvGains::new(3.0, 3.0, 10.0, 2.0).unwrap();
        let s = State::at_rest(0.3, FRAC_PI_2, FRAC_PI_2);
        assert_eq!(ugv_control(&s, 0.3, &g), 0.0);

        // inner saturation caps the position term at lambda_2
        let s = State::at_rest(100.0, FRAC_PI_2, FRAC_PI_2);
        assert_eq!(ugv_control(&s, 0.0, &g), -2.0);

        // outer saturation caps everything at lambda_1
        let s = State::new(0.0, 1e6, FRAC_PI_2, 0.0, FRAC_PI_2, 0.0);
        assert_eq!(ugv_control(&s, 0.0, &g), -10.0);
    }

    #[test]
    fn tangential_force_examples() {
        let cfg = config();
        let p = PhysicalParams::desk_scale();
        let s = State::at_rest(0.0, FRAC_PI_2, FRAC_PI_2);
        assert_abs_diff_eq!(
            tangential_force(&s, FRAC_PI_2, &cfg.outer, &p),
            0.0,
            epsilon = 1e-12
        );

        let s = State::at_rest(0.0, 0.0, 0.0);
        assert_relative_eq!(
            tangential_force(&s, 0.0, &cfg.outer, &p),
            p.apparent_mass() * p.g()
        );

        let s = State::at_rest(0.0, FRAC_PI_3, FRAC_PI_3);
        assert_relative_eq!(
            tangential_force(&s, FRAC_PI_2, &cfg.outer, &p),
            -20.0 * (FRAC_PI_3 - FRAC_PI_2) + 0.7 * 9.81 * FRAC_PI_3.cos()
        );
    }

    #[test]
    fn theta_ref_examples() {
        let cfg = config();
        assert_eq!(theta_ref(0.0, &cfg.outer), 0.0);
        assert_abs_diff_eq!(theta_ref(5.0, &cfg.outer), FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(theta_ref(-5.0, &cfg.outer), -FRAC_PI_2, epsilon = 1e-12);
        assert!(theta_ref(1e9, &cfg.outer) <= FRAC_PI_2);
    }

    #[test]
    fn thrust_basic_examples() {
        let cfg = config();
        let g = &cfg.outer;
        assert_relative_eq!(thrust_basic(5.0, theta_ref(5.0, g), g), 5.0);
        // removable singularity: 1 / (gamma * eps) for eps = 1, U_max = 5
        let limit = thrust_basic(0.0, 0.0, g);
        assert_abs_diff_eq!(limit, 0.87433, epsilon = 1e-5);
        // approach from both sides
        for f_t in [1e-6, -1e-6, 1e-4, -1e-4] {
            assert_relative_eq!(
                thrust_basic(f_t, theta_ref(f_t, g), g),
                limit,
                max_relative = 1e-7
            );
        }
        // odd/odd quotient stays positive
        assert!(thrust_basic(-3.0, theta_ref(-3.0, g), g) > 0.0);
    }

    #[test]
    fn thrust_improved_examples() {
        let cfg = config();
        let lim = limits();
        assert_relative_eq!(thrust_improved(2.0, FRAC_PI_2, &cfg.outer, &lim), 2.0);
        assert_eq!(thrust_improved(2.0, 0.01, &cfg.outer, &lim), 5.0);
        assert_eq!(thrust_improved(2.0, -0.1, &cfg.outer, &lim), 0.0);
        // sign conventions at the sin(theta) = 0 boundary
        assert_eq!(thrust_improved(2.0, 0.0, &cfg.outer, &lim), 5.0);
        assert_eq!(thrust_improved(-2.0, 0.0, &cfg.outer, &lim), 0.0);
        assert_abs_diff_eq!(
            thrust_improved(0.0, 0.0, &cfg.outer, &lim),
            1.0 / (cfg.outer.gamma() * cfg.outer.epsilon())
        );
    }

    #[test]
    fn inner_control_examples() {
        let g = InnerGains::new(0.5, 0.01).unwrap();
        let s = State::at_rest(0.0, FRAC_PI_2, FRAC_PI_2);
        assert_eq!(inner_control(&s, FRAC_PI_2, &g), 0.0);

        let s = State::at_rest(0.0, FRAC_PI_2, FRAC_PI_2 + 0.1);
        assert_relative_eq!(inner_control(&s, FRAC_PI_2, &g), -0.05);

        let s = State::new(0.0, 0.0, FRAC_PI_2, 0.0, FRAC_PI_2, 1.0);
        assert_relative_eq!(inner_control(&s, FRAC_PI_2, &g), -0.01);
    }

    #[test]
    fn cascade_fixed_point_at_vertical() {
        let cfg = config();
        let p = PhysicalParams::desk_scale();
        let lim = limits();
        let s = State::at_rest(0.3, FRAC_PI_2, FRAC_PI_2);
        let refs = Reference::new(0.3, FRAC_PI_2);
        let (u, dbg) = cascade_step(&s, &refs, &cfg, &p, &lim);
        // f_t ~ cos(pi/2) ~ 4e-16 N, so the thrust takes the limit branch and
        // the net torque u1 * sin(theta) vanishes with theta.
        assert_abs_diff_eq!(dbg.f_t, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.u2(), 0.0, epsilon = 1e-12);
        assert_eq!(u.u3(), 0.0);
        assert_abs_diff_eq!(u.u1() * s.theta().sin(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cascade_scenario_initial_state() {
        let cfg = config();
        let p = PhysicalParams::desk_scale();
        let lim = limits();
        let s = State::at_rest(0.0, FRAC_PI_3, std::f64::consts::FRAC_PI_4);
        let refs = Reference::new(0.3, FRAC_PI_2);
        let (u, dbg) = cascade_step(&s, &refs, &cfg, &p, &lim);
        assert!(u.u1() >= 0.0 && dbg.u1_pre_clamp > 0.0);
        assert!(u.u1().is_finite() && u.u2().is_finite() && u.u3().is_finite());
        assert!(u.u1() <= lim.u_max() && u.u2().abs() <= lim.t_max());
    }

    #[test]
    fn basic_and_improved_agree_on_track() {
        // with beta = beta_ref (theta = theta_ref) and no saturation binding,
        // the two laws command the same thrust
        let p = PhysicalParams::desk_scale();
        let lim = limits();
        let mut cfg = config();
        for alpha in [1.2, FRAC_PI_2, 1.9] {
            let f_t = tangential_force(&State::at_rest(0.0, alpha, 0.0), alpha, &cfg.outer, &p);
            let tb = theta_ref(f_t, &cfg.outer);
            let s = State::at_rest(0.0, alpha, alpha + tb);
            let refs = Reference::new(0.0, alpha);
            cfg.thrust_law = ThrustLaw::Basic;
            let (ub, _) = cascade_step(&s, &refs, &cfg, &p, &lim);
            cfg.thrust_law = ThrustLaw::Improved;
            let (ui, _) = cascade_step(&s, &refs, &cfg, &p, &lim);
            assert_relative_eq!(ub.u1(), ui.u1(), max_relative = 1e-12);
        }
    }

    #[test]
    fn lambda1_checked_against_limits() {
        let lim = limits();
        let cfg = ControllerConfig {
            ugv: UgvGains::new(3.0, 3.0, 11.0, 2.0).unwrap(),
            ..config()
        };
        assert!(cfg.validate_against(&lim).is_err());
        assert!(config().validate_against(&lim).is_ok());
    }
}
