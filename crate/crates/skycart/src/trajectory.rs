//! Logged closed-loop runs and the reference points they track.

use serde::{Deserialize, Serialize};

use crate::control::ControlDebug;
use crate::model::{ControlInput, State};

/// A set-point `(x_ref, alpha_ref)` for the cart position and object inclination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub x_ref: f64,
    pub alpha_ref: f64,
}

impl Reference {
    pub fn new(x_ref: f64, alpha_ref: f64) -> Self {
        Self { x_ref, alpha_ref }
    }

    /// Convex combination `(1 - c) * self + c * other`.
    pub fn lerp_toward(&self, other: &Reference, c: f64) -> Self {
        Self {
            x_ref: self.x_ref + c * (other.x_ref - self.x_ref),
            alpha_ref: self.alpha_ref + c * (other.alpha_ref - self.alpha_ref),
        }
    }

    /// Euclidean distance to another reference.
    pub fn distance(&self, other: &Reference) -> f64 {
        (self.x_ref - other.x_ref).hypot(self.alpha_ref - other.alpha_ref)
    }
}

/// One logged integration sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: State,
    pub input: ControlInput,
    pub debug: ControlDebug,
    pub applied: Reference,
}

/// Time-indexed closed-loop record at the integrator rate.
///
/// Samples are strictly increasing in `t` with uniform spacing `dt`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            samples: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    /// Samples with `t >= t_from`.
    pub fn from_time(&self, t_from: f64) -> impl Iterator<Item = &TrajectorySample> {
        self.samples.iter().filter(move |s| s.t >= t_from)
    }

    /// Smallest thrust actually applied over the run.
    pub fn min_u1(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.input.u1())
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|alpha(t) - alpha_ref|` over `t >= t_from`.
    pub fn max_alpha_error(&self, alpha_ref: f64, t_from: f64) -> f64 {
        self.from_time(t_from)
            .map(|s| (s.state.alpha - alpha_ref).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|x(t) - x_ref|` over `t >= t_from`.
    pub fn max_x_error(&self, x_ref: f64, t_from: f64) -> f64 {
        self.from_time(t_from)
            .map(|s| (s.state.x - x_ref).abs())
            .fold(0.0, f64::max)
    }
}
