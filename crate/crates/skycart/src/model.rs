//! Physical parameters, state, inputs, equations of motion, and energies for
//! the planar cart–object–quadrotor chain.
//!
//! The mechanism has three generalized coordinates: the cart position `x`,
//! the object inclination `alpha` (measured from the horizon), and the
//! quadrotor attitude `beta`. The object of length `L` is pinned to the cart
//! at one end and carries the quadrotor at the other; the quadrotor center of
//! mass coincides with that joint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mass, inertia and geometry of the cart–object–quadrotor chain.
///
/// Construction validates positivity, `d_g <= l`, and invertibility of the
/// full-model mass matrix (`m_tot * i0 > m^2 * l`) so the coupled dynamics
/// can be solved for every inclination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPhysicalParams", into = "RawPhysicalParams")]
pub struct PhysicalParams {
    m_u: f64,
    i_u: f64,
    m_c: f64,
    m_b: f64,
    i_b: f64,
    l: f64,
    d_g: f64,
    g: f64,
}

/// Serde mirror of [`PhysicalParams`] carrying the schema field names.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawPhysicalParams {
    m_u: f64,
    #[serde(rename = "I_u")]
    i_u: f64,
    m_c: f64,
    m_b: f64,
    #[serde(rename = "I_b")]
    i_b: f64,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "d_G")]
    d_g: f64,
    g: f64,
}

impl TryFrom<RawPhysicalParams> for PhysicalParams {
    type Error = Error;

    fn try_from(r: RawPhysicalParams) -> Result<Self> {
        PhysicalParams::new(r.m_u, r.i_u, r.m_c, r.m_b, r.i_b, r.l, r.d_g, r.g)
    }
}

impl From<PhysicalParams> for RawPhysicalParams {
    fn from(p: PhysicalParams) -> Self {
        RawPhysicalParams {
            m_u: p.m_u,
            i_u: p.i_u,
            m_c: p.m_c,
            m_b: p.m_b,
            i_b: p.i_b,
            l: p.l,
            d_g: p.d_g,
            g: p.g,
        }
    }
}

impl PhysicalParams {
    /// Desk-scale defaults matching the built-in scenarios: a 200 g quadrotor
    /// (inertia 0.881e-3 kg m^2) on a 1 kg, 1 m bar pinned to a 2 kg cart.
    pub fn desk_scale() -> Self {
        Self::new(0.2, 0.881e-3, 2.0, 1.0, 0.33, 1.0, 0.5, 9.81)
            .expect("desk-scale defaults are valid")
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m_u: f64,
        i_u: f64,
        m_c: f64,
        m_b: f64,
        i_b: f64,
        l: f64,
        d_g: f64,
        g: f64,
    ) -> Result<Self> {
        let fields = [
            ("m_u", m_u),
            ("I_u", i_u),
            ("m_c", m_c),
            ("m_b", m_b),
            ("I_b", i_b),
            ("L", l),
            ("d_G", d_g),
            ("g", g),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        if d_g > l {
            return Err(Error::InvalidParameter(format!(
                "d_G must not exceed L (d_G = {d_g}, L = {l})"
            )));
        }
        let p = Self {
            m_u,
            i_u,
            m_c,
            m_b,
            i_b,
            l,
            d_g,
            g,
        };
        if p.m_tot() * p.i0() <= p.apparent_mass().powi(2) * p.l {
            return Err(Error::InvalidParameter(format!(
                "M_tot * I_0 must exceed M^2 * L for an invertible mass matrix \
                 (M_tot * I_0 = {}, M^2 * L = {})",
                p.m_tot() * p.i0(),
                p.apparent_mass().powi(2) * p.l
            )));
        }
        Ok(p)
    }

    pub fn m_u(&self) -> f64 {
        self.m_u
    }

    /// Quadrotor moment of inertia [kg m^2].
    pub fn i_u(&self) -> f64 {
        self.i_u
    }

    pub fn m_c(&self) -> f64 {
        self.m_c
    }

    pub fn m_b(&self) -> f64 {
        self.m_b
    }

    pub fn i_b(&self) -> f64 {
        self.i_b
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn d_g(&self) -> f64 {
        self.d_g
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Total mass `M_tot = m_c + m_b + m_u`.
    pub fn m_tot(&self) -> f64 {
        self.m_c + self.m_b + self.m_u
    }

    /// Apparent mass `M = m_b d_G / L + m_u` coupling object and quadrotor
    /// into the tilt dynamics.
    pub fn apparent_mass(&self) -> f64 {
        self.m_b * self.d_g / self.l + self.m_u
    }

    /// Per-length moment of inertia `I_0 = (m_b d_G^2 + I_b) / L + m_u L`.
    pub fn i0(&self) -> f64 {
        (self.m_b * self.d_g.powi(2) + self.i_b) / self.l + self.m_u * self.l
    }

    /// Copy with the cart mass replaced (used by the model-reduction checks).
    pub fn with_cart_mass(&self, m_c: f64) -> Result<Self> {
        Self::new(
            self.m_u, self.i_u, m_c, self.m_b, self.i_b, self.l, self.d_g, self.g,
        )
    }
}

/// Actuator saturation levels: thrust `U_max`, torque `T_max`, cart force `F_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawActuatorLimits", into = "RawActuatorLimits")]
pub struct ActuatorLimits {
    u_max: f64,
    t_max: f64,
    f_max: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawActuatorLimits {
    #[serde(rename = "U_max")]
    u_max: f64,
    #[serde(rename = "T_max")]
    t_max: f64,
    #[serde(rename = "F_max")]
    f_max: f64,
}

impl TryFrom<RawActuatorLimits> for ActuatorLimits {
    type Error = Error;

    fn try_from(r: RawActuatorLimits) -> Result<Self> {
        ActuatorLimits::new(r.u_max, r.t_max, r.f_max)
    }
}

impl From<ActuatorLimits> for RawActuatorLimits {
    fn from(l: ActuatorLimits) -> Self {
        RawActuatorLimits {
            u_max: l.u_max,
            t_max: l.t_max,
            f_max: l.f_max,
        }
    }
}

impl ActuatorLimits {
    pub fn new(u_max: f64, t_max: f64, f_max: f64) -> Result<Self> {
        for (name, v) in [("U_max", u_max), ("T_max", t_max), ("F_max", f_max)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            u_max,
            t_max,
            f_max,
        })
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }
}

/// Generalized coordinates and rates `(x, x_dot, alpha, alpha_dot, beta, beta_dot)`.
///
/// Angles are stored unwrapped: the domains `alpha in [0, pi]` and
/// `beta in [0, 2 pi]` are constraint checks for the governor, not storage
/// normalization, so PD terms never see artificial jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub x_dot: f64,
    pub alpha: f64,
    pub alpha_dot: f64,
    pub beta: f64,
    pub beta_dot: f64,
}

impl State {
    pub fn new(x: f64, x_dot: f64, alpha: f64, alpha_dot: f64, beta: f64, beta_dot: f64) -> Self {
        Self {
            x,
            x_dot,
            alpha,
            alpha_dot,
            beta,
            beta_dot,
        }
    }

    /// Everything at rest at the given pose.
    pub fn at_rest(x: f64, alpha: f64, beta: f64) -> Self {
        Self::new(x, 0.0, alpha, 0.0, beta, 0.0)
    }

    /// Relative attitude `theta = beta - alpha` of the quadrotor w.r.t. the object.
    pub fn theta(&self) -> f64 {
        self.beta - self.alpha
    }

    pub fn theta_dot(&self) -> f64 {
        self.beta_dot - self.alpha_dot
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub(crate) fn to_array(self) -> [f64; 6] {
        [
            self.x,
            self.x_dot,
            self.alpha,
            self.alpha_dot,
            self.beta,
            self.beta_dot,
        ]
    }

    pub(crate) fn from_array(y: [f64; 6]) -> Self {
        Self::new(y[0], y[1], y[2], y[3], y[4], y[5])
    }
}

/// Actuator command after physical saturation: thrust `u1 in [0, U_max]`,
/// quadrotor torque `|u2| <= T_max`, cart force `|u3| <= F_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    u1: f64,
    u2: f64,
    u3: f64,
}

impl ControlInput {
    /// Validating constructor; rejects commands outside the limits.
    pub fn new(u1: f64, u2: f64, u3: f64, lim: &ActuatorLimits) -> Result<Self> {
        if !(u1.is_finite() && u2.is_finite() && u3.is_finite()) {
            return Err(Error::InvalidParameter(
                "control input must be finite".to_string(),
            ));
        }
        if !(0.0..=lim.u_max()).contains(&u1) {
            return Err(Error::InvalidParameter(format!(
                "u1 = {u1} outside [0, {}]",
                lim.u_max()
            )));
        }
        if u2.abs() > lim.t_max() {
            return Err(Error::InvalidParameter(format!(
                "|u2| = {} exceeds T_max = {}",
                u2.abs(),
                lim.t_max()
            )));
        }
        if u3.abs() > lim.f_max() {
            return Err(Error::InvalidParameter(format!(
                "|u3| = {} exceeds F_max = {}",
                u3.abs(),
                lim.f_max()
            )));
        }
        Ok(Self { u1, u2, u3 })
    }

    /// Physical saturation of raw commands, as the actuators would apply it.
    pub fn clamped(u1: f64, u2: f64, u3: f64, lim: &ActuatorLimits) -> Self {
        Self {
            u1: crate::saturation::pos_sat(u1, lim.u_max()),
            u2: crate::saturation::sat(u2, lim.t_max()),
            u3: crate::saturation::sat(u3, lim.f_max()),
        }
    }

    pub fn zero() -> Self {
        Self {
            u1: 0.0,
            u2: 0.0,
            u3: 0.0,
        }
    }

    pub fn u1(&self) -> f64 {
        self.u1
    }

    pub fn u2(&self) -> f64 {
        self.u2
    }

    pub fn u3(&self) -> f64 {
        self.u3
    }
}

/// Generalized accelerations returned by the dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accel {
    pub x_ddot: f64,
    pub alpha_ddot: f64,
    pub beta_ddot: f64,
}

const DET_FLOOR: f64 = 1e-12;

/// Full coupled equations of motion.
///
/// Solves the 2x2 linear system in `(x_ddot, alpha_ddot)`
///
/// ```text
/// [ M_tot        -M L sin(a) ] [x_ddot    ]   [ u3 + M L a_dot^2 cos(a)    ]
/// [ -M sin(a)     I_0        ] [alpha_ddot] = [ u1 sin(b - a) - M g cos(a) ]
/// ```
///
/// and the decoupled attitude row `beta_ddot = u2 / I_u`. The determinant
/// `M_tot I_0 - M^2 L sin^2(a)` is bounded away from zero by the parameter
/// invariants for every `alpha`.
pub fn full_dynamics(s: &State, u: &ControlInput, p: &PhysicalParams) -> Result<Accel> {
    let m = p.apparent_mass();
    let (sin_a, cos_a) = s.alpha.sin_cos();

    let a11 = p.m_tot();
    let a12 = -m * p.l() * sin_a;
    let a21 = -m * sin_a;
    let a22 = p.i0();
    let det = a11 * a22 - a12 * a21;
    if det.abs() <= DET_FLOOR {
        return Err(Error::DegenerateMassMatrix { det });
    }

    let b1 = u.u3() + m * p.l() * s.alpha_dot.powi(2) * cos_a;
    let b2 = u.u1() * (s.beta - s.alpha).sin() - m * p.g() * cos_a;

    Ok(Accel {
        x_ddot: (a22 * b1 - a12 * b2) / det,
        alpha_ddot: (a11 * b2 - a21 * b1) / det,
        beta_ddot: u.u2() / p.i_u(),
    })
}

/// Reduced equations of motion for `m_c >> m_b, m_u`: the cart no longer
/// feels the object (`x_ddot = u3 / m_c`) while the tilt row keeps the cart
/// acceleration as a disturbance input.
pub fn simplified_dynamics(s: &State, u: &ControlInput, p: &PhysicalParams) -> Accel {
    let m = p.apparent_mass();
    let x_ddot = u.u3() / p.m_c();
    let alpha_ddot = (u.u1() * (s.beta - s.alpha).sin()
        - m * (-s.alpha.sin() * x_ddot + p.g() * s.alpha.cos()))
        / p.i0();
    Accel {
        x_ddot,
        alpha_ddot,
        beta_ddot: u.u2() / p.i_u(),
    }
}

/// Kinetic and potential energy `(T, V)` of the chain.
pub fn energy(s: &State, p: &PhysicalParams) -> (f64, f64) {
    let (sin_a, _) = s.alpha.sin_cos();
    let kinetic = 0.5 * p.m_c() * s.x_dot.powi(2)
        + 0.5
            * p.m_b()
            * (s.x_dot.powi(2) - 2.0 * s.x_dot * p.d_g() * s.alpha_dot * sin_a
                + p.d_g().powi(2) * s.alpha_dot.powi(2))
        + 0.5
            * p.m_u()
            * (s.x_dot.powi(2) - 2.0 * s.x_dot * p.l() * s.alpha_dot * sin_a
                + p.l().powi(2) * s.alpha_dot.powi(2))
        + 0.5 * p.i_b() * s.alpha_dot.powi(2)
        + 0.5 * p.i_u() * s.beta_dot.powi(2);
    let potential = (p.m_b() * p.d_g() + p.m_u() * p.l()) * p.g() * sin_a;
    (kinetic, potential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params() -> PhysicalParams {
        PhysicalParams::desk_scale()
    }

    fn limits() -> ActuatorLimits {
        ActuatorLimits::new(5.0, 1.3, 10.0).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let p = params();
        assert_relative_eq!(p.m_tot(), 3.2);
        assert_relative_eq!(p.apparent_mass(), 0.7);
        assert_relative_eq!(p.i0(), 0.78);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PhysicalParams::new(0.2, 0.881e-3, 2.0, 1.0, 0.33, 1.0, 1.5, 9.81).is_err());
        assert!(PhysicalParams::new(-0.2, 0.881e-3, 2.0, 1.0, 0.33, 1.0, 0.5, 9.81).is_err());
        assert!(PhysicalParams::new(0.2, 0.881e-3, 2.0, 1.0, 0.33, 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn full_dynamics_vertical_equilibrium() {
        let p = params();
        let s = State::at_rest(0.0, FRAC_PI_2, FRAC_PI_2);
        let a = full_dynamics(&s, &ControlInput::zero(), &p).unwrap();
        // cos(pi/2) rounds to ~6.1e-17, so the residual torque is O(1e-16)
        assert_abs_diff_eq!(a.x_ddot, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.alpha_ddot, 0.0, epsilon = 1e-12);
        assert_eq!(a.beta_ddot, 0.0);
    }

    #[test]
    fn full_dynamics_horizontal_release() {
        // Hand-solved 2x2 system at sin(alpha) = 0: alpha_ddot = -M g / I_0.
        let p = params();
        let s = State::at_rest(0.0, 0.0, 0.0);
        let a = full_dynamics(&s, &ControlInput::zero(), &p).unwrap();
        assert_relative_eq!(a.alpha_ddot, -p.apparent_mass() * p.g() / p.i0());
        assert_relative_eq!(a.alpha_ddot, -8.803846153846153, max_relative = 1e-12);
        assert_abs_diff_eq!(a.x_ddot, 0.0);
    }

    #[test]
    fn attitude_row_is_decoupled() {
        let p = params();
        let u = ControlInput::new(0.0, 0.1, 0.0, &limits()).unwrap();
        for alpha in [0.0, 0.7, FRAC_PI_2, 2.0] {
            let s = State::at_rest(0.0, alpha, 1.0);
            let a = full_dynamics(&s, &u, &p).unwrap();
            assert_relative_eq!(a.beta_ddot, 0.1 / 0.881e-3);
        }
    }

    #[test]
    fn simplified_dynamics_examples() {
        let p = params();
        let s = State::at_rest(0.0, FRAC_PI_2, FRAC_PI_2);
        let a = simplified_dynamics(&s, &ControlInput::zero(), &p);
        assert_abs_diff_eq!(a.x_ddot, 0.0);
        assert_abs_diff_eq!(a.alpha_ddot, 0.0, epsilon = 1e-12);

        // u3 = 2 N pushes the cart at 1 m/s^2 and tilts the bar through the
        // -M sin(alpha) x_ddot coupling term.
        let u = ControlInput::new(0.0, 0.0, 2.0, &limits()).unwrap();
        let a = simplified_dynamics(&s, &u, &p);
        assert_relative_eq!(a.x_ddot, 1.0);
        assert_relative_eq!(
            a.alpha_ddot,
            p.apparent_mass() * (FRAC_PI_2.sin() * 1.0 - p.g() * FRAC_PI_2.cos()) / p.i0()
        );

        let s = State::at_rest(0.0, 0.0, 0.0);
        let a = simplified_dynamics(&s, &ControlInput::zero(), &p);
        assert_relative_eq!(a.alpha_ddot, -p.apparent_mass() * p.g() / p.i0());
    }

    #[test]
    fn models_agree_with_unforced_cart_at_horizontal() {
        // With sin(alpha) = 0, alpha_dot = 0 and u3 = 0 the two models produce
        // identical accelerations (the x rows differ whenever u3 != 0 because
        // the full model spreads the force over M_tot).
        let p = params();
        let u = ControlInput::new(2.0, 0.3, 0.0, &limits()).unwrap();
        for alpha in [0.0, PI] {
            let s = State::new(0.4, -0.2, alpha, 0.0, 0.9, 0.1);
            let f = full_dynamics(&s, &u, &p).unwrap();
            let r = simplified_dynamics(&s, &u, &p);
            assert_abs_diff_eq!(f.x_ddot, r.x_ddot, epsilon = 1e-15);
            assert_abs_diff_eq!(f.alpha_ddot, r.alpha_ddot, epsilon = 1e-12);
            assert_abs_diff_eq!(f.beta_ddot, r.beta_ddot);
        }
    }

    #[test]
    fn mass_matrix_determinant_positive_for_all_alpha() {
        let p = params();
        let m = p.apparent_mass();
        let floor = p.m_tot() * p.i0() - m * m * p.l();
        assert!(floor > 0.0);
        for i in 0..=1000 {
            let alpha = -PI + 2.0 * PI * i as f64 / 1000.0;
            let det = p.m_tot() * p.i0() - m * m * p.l() * alpha.sin().powi(2);
            assert!(det >= floor - 1e-12);
        }
    }

    #[test]
    fn energy_examples() {
        let p = params();
        let (t, v) = energy(&State::at_rest(0.0, 0.0, 0.0), &p);
        assert_abs_diff_eq!(t, 0.0);
        assert_abs_diff_eq!(v, 0.0);

        let (t, v) = energy(&State::at_rest(0.0, FRAC_PI_2, FRAC_PI_2), &p);
        assert_abs_diff_eq!(t, 0.0);
        assert_relative_eq!(v, (p.m_b() * p.d_g() + p.m_u() * p.l()) * p.g());

        let s = State::new(0.0, 1.0, 0.3, 0.0, 0.0, 0.0);
        let (t, _) = energy(&s, &p);
        assert_relative_eq!(t, 0.5 * p.m_tot());
    }

    #[test]
    fn control_input_validation() {
        let lim = limits();
        assert!(ControlInput::new(-0.1, 0.0, 0.0, &lim).is_err());
        assert!(ControlInput::new(5.1, 0.0, 0.0, &lim).is_err());
        assert!(ControlInput::new(1.0, 1.4, 0.0, &lim).is_err());
        assert!(ControlInput::new(1.0, 0.0, -10.5, &lim).is_err());
        let u = ControlInput::clamped(7.0, -2.0, 12.0, &lim);
        assert_eq!((u.u1(), u.u2(), u.u3()), (5.0, -1.3, 10.0));
        let u = ControlInput::clamped(-1.0, 0.2, -3.0, &lim);
        assert_eq!((u.u1(), u.u2(), u.u3()), (0.0, 0.2, -3.0));
    }
}
