//! Scenario runner for the skycart toolkit: scenario files and built-ins,
//! CSV and plot-script emission, and the acceptance-check suite behind the
//! `verify` subcommand.

pub mod csv;
pub mod plot;
pub mod scenario;
pub mod verify;

pub use scenario::{load_scenario, simulate, Scenario, ScenarioError, FIG3, FIG4};
