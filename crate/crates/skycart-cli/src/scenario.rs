//! Scenario files: a TOML schema mirroring the simulation inputs, plus the
//! two built-in desk-scale scenarios.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use skycart::control::RawOuterGainsDef;
use skycart::equilibria::attainable_alpha_range;
use skycart::{
    ActuatorLimits, ControllerConfig, DynamicsModel, InnerGains, OuterGains, PhysicalParams,
    Reference, RgConfig, State, ThrustLaw, Trajectory, UgvGains,
};

/// Vertical hold: drive the bar to `alpha = pi/2` while the cart parks at
/// 0.3 m, basic thrust law, no governor.
pub const FIG3: &str = "paper-fig3";
/// Leaning hold at `alpha = 2 pi/3` with the improved thrust law and the
/// reference governor at a 0.2 s update period (doubled UAV inertia).
pub const FIG4: &str = "paper-fig4";

pub const BUILTIN_NAMES: [&str; 2] = [FIG3, FIG4];

const FIG3_TOML: &str = include_str!("scenarios/paper-fig3.toml");
const FIG4_TOML: &str = include_str!("scenarios/paper-fig4.toml");

#[derive(Error, Debug)]
pub enum ScenarioError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    /// Schema violations; the embedded TOML error names the failing field.
    #[error("scenario schema error: {0}")]
    Schema(#[from] toml::de::Error),
    #[error("scenario invariant violated: {0}")]
    Invariant(String),
}

impl From<skycart::Error> for ScenarioError {
    fn from(e: skycart::Error) -> Self {
        ScenarioError::Invariant(e.to_string())
    }
}

/// A fully validated simulation setup.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: PhysicalParams,
    pub limits: ActuatorLimits,
    pub controller: ControllerConfig,
    pub initial_state: State,
    pub desired: Reference,
    pub rg: Option<RgConfig>,
    /// First applied reference for governed runs; defaults to the initial
    /// `(x, alpha)` of the scenario.
    pub initial_applied: Option<Reference>,
    pub dynamics_model: DynamicsModel,
    pub dt: f64,
    pub duration: f64,
}

/// Raw file mirror. `gamma` is never a file field: it is derived from
/// `epsilon` and `U_max` when the controller is assembled.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    params: PhysicalParams,
    limits: ActuatorLimits,
    controller: ControllerSection,
    initial_state: StateSection,
    desired: ReferenceSection,
    #[serde(default)]
    rg: Option<RgConfig>,
    #[serde(default)]
    initial_applied: Option<ReferenceSection>,
    dynamics_model: DynamicsModel,
    dt: f64,
    duration: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ControllerSection {
    thrust_law: ThrustLaw,
    ugv: UgvGains,
    outer: RawOuterGainsDef,
    inner: InnerGains,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct StateSection {
    x: f64,
    x_dot: f64,
    alpha: f64,
    alpha_dot: f64,
    beta: f64,
    beta_dot: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ReferenceSection {
    x_ref: f64,
    alpha_ref: f64,
}

impl Scenario {
    /// Parse and validate a scenario from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let raw: ScenarioFile = toml::from_str(text)?;
        let outer = OuterGains::new(
            raw.controller.outer.k_p_alpha,
            raw.controller.outer.k_d_alpha,
            raw.controller.outer.epsilon,
            &raw.limits,
        )?;
        let controller = ControllerConfig {
            ugv: raw.controller.ugv,
            outer,
            inner: raw.controller.inner,
            thrust_law: raw.controller.thrust_law,
        };
        let s = raw.initial_state;
        let scenario = Scenario {
            params: raw.params,
            limits: raw.limits,
            controller,
            initial_state: State::new(s.x, s.x_dot, s.alpha, s.alpha_dot, s.beta, s.beta_dot),
            desired: Reference::new(raw.desired.x_ref, raw.desired.alpha_ref),
            rg: raw.rg,
            initial_applied: raw
                .initial_applied
                .map(|r| Reference::new(r.x_ref, r.alpha_ref)),
            dynamics_model: raw.dynamics_model,
            dt: raw.dt,
            duration: raw.duration,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let inv = |msg: String| Err(ScenarioError::Invariant(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return inv(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return inv(format!("duration must be positive, got {}", self.duration));
        }
        if !self.initial_state.is_finite() {
            return inv("initial_state must be finite".to_string());
        }
        self.controller.validate_against(&self.limits)?;
        if let Some(rg) = &self.rg {
            rg.validate()?;
            if self.dt > rg.sample_time {
                return inv(format!(
                    "dt = {} must not exceed the governor sample_time = {}",
                    self.dt, rg.sample_time
                ));
            }
            let per = (rg.sample_time / self.dt).round();
            if (rg.sample_time - per * self.dt).abs() > 1e-9 * rg.sample_time {
                return inv(format!(
                    "sample_time = {} must be an integer multiple of dt = {}",
                    rg.sample_time, self.dt
                ));
            }
            let window = attainable_alpha_range(&self.params, &self.limits).shrunk(rg.margin_mu);
            for (name, r) in [
                ("desired", Some(self.desired)),
                ("initial_applied", self.initial_applied),
            ] {
                if let Some(r) = r {
                    if !window.contains(r.alpha_ref) {
                        return inv(format!(
                            "{name}.alpha_ref = {} outside the governed range [{}, {}]",
                            r.alpha_ref, window.alpha_min, window.alpha_max
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Applied reference a governed run starts from.
    pub fn initial_applied(&self) -> Reference {
        self.initial_applied
            .unwrap_or(Reference::new(self.initial_state.x, self.initial_state.alpha))
    }

    /// Copy without the governor (used for the ungoverned comparison runs).
    pub fn without_rg(&self) -> Scenario {
        Scenario {
            rg: None,
            initial_applied: None,
            ..self.clone()
        }
    }
}

/// Load a scenario by built-in name (`paper-fig3`, `paper-fig4`) or by file
/// path.
pub fn load_scenario(spec: &str) -> Result<Scenario, ScenarioError> {
    match spec {
        FIG3 => Scenario::from_toml_str(FIG3_TOML),
        FIG4 => Scenario::from_toml_str(FIG4_TOML),
        path => Scenario::from_toml_str(&std::fs::read_to_string(Path::new(path))?),
    }
}

/// Run a scenario to completion: governed when `rg` is configured, plain
/// closed loop otherwise. Deterministic per scenario.
pub fn simulate(sc: &Scenario) -> skycart::Result<Trajectory> {
    match &sc.rg {
        Some(rg) => skycart::refgov::rg_run(
            &sc.initial_state,
            &sc.initial_applied(),
            &sc.desired,
            &sc.controller,
            &sc.params,
            &sc.limits,
            rg,
            sc.dynamics_model,
            sc.dt,
            sc.duration,
        ),
        None => skycart::simulate_closed_loop(
            &sc.initial_state,
            &sc.desired,
            &sc.controller,
            &sc.params,
            &sc.limits,
            sc.dynamics_model,
            sc.dt,
            sc.duration,
        ),
    }
}
