use thiserror::Error;

/// Errors produced by the simulation and analysis layers.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor was handed values that violate a documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The full-model mass matrix lost rank. Unreachable while the
    /// `PhysicalParams` invariants hold; kept as a guard.
    #[error("mass matrix is degenerate (det = {det:e})")]
    DegenerateMassMatrix { det: f64 },

    /// An integration step produced a non-finite state component.
    #[error("integrator produced a non-finite state")]
    NonFiniteState,

    /// A closed-loop run diverged; `t` is the last time with a valid state.
    #[error("integration diverged, last valid time t = {t}")]
    IntegrationDiverged { t: f64 },

    /// The requested equilibrium attitude is outside the attainable range.
    #[error("equilibrium angle {alpha_bar} rad outside attainable range [{alpha_min}, {alpha_max}]")]
    UnattainableAngle {
        alpha_bar: f64,
        alpha_min: f64,
        alpha_max: f64,
    },

    /// Holding the pose would need a thrust outside `[0, U_max]`.
    #[error("infeasible equilibrium: required thrust {u1} N outside [0, {u_max}]")]
    InfeasibleEquilibrium { u1: f64, u_max: f64 },

    /// `sin(beta - alpha) = 0` while the gravity load is nonzero.
    #[error("singular equilibrium: sin(beta - alpha) = 0 with nonzero tangential load")]
    SingularEquilibrium,

    /// The analytic inner-loop gain formula requires critically damped gains.
    #[error("gains are not critically damped: k_d^2 = {kd_sq}, 4 k_p I_u = {four_kp_iu}")]
    NotCriticallyDamped { kd_sq: f64, four_kp_iu: f64 },

    /// The fictitious-error equation has no root; unreachable per the case
    /// analysis, kept as an internal assertion.
    #[error("fictitious attitude error has no solution (|sine argument| = {arg})")]
    FictitiousErrorNoSolution { arg: f64 },

    /// Even freezing the currently applied reference violates constraints.
    #[error("current applied reference is not admissible from this state")]
    InfeasibleReference,
}

pub type Result<T> = std::result::Result<T, Error>;
