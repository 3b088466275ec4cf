//! Explicit time integration of diffusion and Turing reaction-diffusion on
//! closed meshes, with the mesh Laplacian as the diffusion operator.
//!
//! Both solvers use forward Euler. Every vertex update reads only the
//! fields of the previous step, so the result does not depend on the order
//! in which vertices are processed.

mod heat;
mod turing;

pub use heat::{run_heat, step_heat, HeatProblem};
pub use turing::{run_turing, sample_gamma, step_turing, TuringParams, TuringProblem};

use std::fmt;

use thiserror::Error;

use crate::ltl::OperatorError;
use crate::mesh::TriangleMesh;

/// Safety factor in [`stability_dt`].
pub const DEFAULT_STABILITY_C: f64 = 0.2;
/// Default threshold on `max |u' - u| / dt` for declaring a steady state.
pub const DEFAULT_STEADY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("step produced a non-finite value (max |Δu| before the step: {max_laplacian})")]
    BlowUp { max_laplacian: f64 },
}

/// Suggested explicit time step `c·h_min²`, with `h_min` the shortest edge.
pub fn stability_dt(mesh: &TriangleMesh, c: f64) -> f64 {
    c * mesh.min_edge_length().powi(2)
}

/// When a run counts as stationary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SteadyCriterion {
    /// `max |u' - u| / dt` below the tolerance.
    #[default]
    Strict,
    /// Same test on the mean-free part of the update; for sources with
    /// nonzero mean, where `u` keeps drifting uniformly.
    Profile,
}

/// Step size and stopping rules shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunControl {
    pub dt: f64,
    pub max_steps: usize,
    pub steady_tol: f64,
    pub criterion: SteadyCriterion,
}

impl RunControl {
    pub fn new(dt: f64, max_steps: usize) -> Self {
        Self {
            dt,
            max_steps,
            steady_tol: DEFAULT_STEADY_TOL,
            criterion: SteadyCriterion::Strict,
        }
    }

    fn check(&self) -> Result<(), SolverError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolverError::InvalidProblem(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.steady_tol > 0.0) {
            return Err(SolverError::InvalidProblem(format!(
                "steady tolerance must be positive, got {}",
                self.steady_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Steady,
    ProfileSteady,
    MaxSteps,
    /// A non-finite value appeared at this step.
    BlowUp { step: usize },
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Steady => f.write_str("steady"),
            Termination::ProfileSteady => f.write_str("profile_steady"),
            Termination::MaxSteps => f.write_str("max_steps"),
            Termination::BlowUp { step } => write!(f, "blow_up at step {step}"),
        }
    }
}

/// The fields after a given number of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub fields: Vec<Vec<f64>>,
}

/// History of a run.
///
/// Snapshots are taken at steps 0, 1, 2, 4, 8, … and at the last finite
/// state. `max_update[k]` and `profile_update[k]` describe step `k + 1`;
/// a step that blew up is recorded as infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub field_names: Vec<&'static str>,
    pub dt: f64,
    pub snapshots: Vec<Snapshot>,
    pub max_update: Vec<f64>,
    pub profile_update: Vec<f64>,
    pub termination: Termination,
}

impl SolveTrace {
    /// Number of steps attempted.
    pub fn steps(&self) -> usize {
        self.max_update.len()
    }

    /// Last finite state.
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("a trace always holds the initial state")
    }
}

fn check_field(name: &str, values: &[f64], n: usize) -> Result<(), SolverError> {
    if values.len() != n {
        return Err(SolverError::InvalidProblem(format!(
            "{name} has {} values but the mesh has {n} vertices",
            values.len()
        )));
    }
    if let Some(v) = values.iter().position(|x| !x.is_finite()) {
        return Err(SolverError::InvalidProblem(format!("{name} is not finite at vertex {v}")));
    }
    Ok(())
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `(max |Δ|, max |Δ - mean(Δ)|)` of one field's update.
fn update_norms(old: &[f64], new: &[f64]) -> (f64, f64) {
    let mean = old.iter().zip(new).map(|(a, b)| b - a).sum::<f64>() / old.len() as f64;
    old.iter().zip(new).fold((0.0f64, 0.0f64), |(m, p), (a, b)| {
        let d = b - a;
        (m.max(d.abs()), p.max((d - mean).abs()))
    })
}

/// Runs `step` until a stopping rule fires.
fn integrate(
    field_names: Vec<&'static str>,
    initial: Vec<Vec<f64>>,
    control: &RunControl,
    mut step: impl FnMut(&[Vec<f64>]) -> Result<Vec<Vec<f64>>, SolverError>,
) -> SolveTrace {
    let dt = control.dt;
    let mut trace = SolveTrace {
        field_names,
        dt,
        snapshots: vec![Snapshot {
            step: 0,
            time: 0.0,
            fields: initial.clone(),
        }],
        max_update: Vec::new(),
        profile_update: Vec::new(),
        termination: Termination::MaxSteps,
    };
    let mut current = initial;
    let mut next_snapshot = 1;
    for n in 1..=control.max_steps {
        let next = match step(&current) {
            Ok(next) => next,
            Err(_) => {
                trace.max_update.push(f64::INFINITY);
                trace.profile_update.push(f64::INFINITY);
                trace.termination = Termination::BlowUp { step: n };
                break;
            }
        };
        let (mut strict, mut profile) = (0.0f64, 0.0f64);
        for (old, new) in current.iter().zip(&next) {
            let (s, p) = update_norms(old, new);
            strict = strict.max(s / dt);
            profile = profile.max(p / dt);
        }
        trace.max_update.push(strict);
        trace.profile_update.push(profile);
        current = next;
        let done = if strict < control.steady_tol {
            Some(Termination::Steady)
        } else if control.criterion == SteadyCriterion::Profile && profile < control.steady_tol {
            Some(Termination::ProfileSteady)
        } else {
            None
        };
        if n == next_snapshot || done.is_some() || n == control.max_steps {
            trace.snapshots.push(Snapshot {
                step: n,
                time: n as f64 * dt,
                fields: current.clone(),
            });
            if n == next_snapshot {
                next_snapshot *= 2;
            }
        }
        if let Some(t) = done {
            trace.termination = t;
            break;
        }
    }
    if let Termination::BlowUp { step } = trace.termination {
        if trace.last().step != step - 1 {
            trace.snapshots.push(Snapshot {
                step: step - 1,
                time: (step - 1) as f64 * dt,
                fields: current,
            });
        }
    }
    trace
}
