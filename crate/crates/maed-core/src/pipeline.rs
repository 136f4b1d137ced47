//! The single evaluation path both search engines share: denormalize,
//! clamp into bounds, repair prohibited zones, evaluate, penalize.
//!
//! Engines only ever see [`Objective::evaluate`]; analytic test functions
//! plug in through [`FunctionObjective`] so engine behaviour can be checked
//! against known optima with the exact same machinery.

use thiserror::Error;

use crate::constraints::{clamp_bounds, penalized_fitness, repair_all, PenaltyWeights};
use crate::eval::evaluate;
use crate::model::{DecisionVector, EvaluationReport, ModelError, ProblemInstance, Tolerances};
use crate::space::NormalizedSpace;

/// An evaluated candidate: problem-space coordinates plus scalar fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Problem-space vector after clamping and repair.
    pub dv: DecisionVector,
    /// Full evaluation report; absent for analytic test objectives.
    pub report: Option<EvaluationReport>,
    /// Scalar the engines minimize.
    pub fitness: f64,
}

impl Candidate {
    /// Fuel cost when available, otherwise the raw fitness.
    pub fn cost(&self) -> f64 {
        self.report.as_ref().map_or(self.fitness, |r| r.cost)
    }
}

/// Anything the engines can minimize over the normalized box.
pub trait Objective {
    fn dim(&self) -> usize;
    /// Evaluates a normalized point. `iteration` feeds penalty escalation.
    fn evaluate(&self, z: &[f64], iteration: usize) -> Result<Candidate, ModelError>;
}

/// The dispatch pipeline: the one code path that turns a raw normalized
/// candidate into a penalized fitness.
pub struct DispatchObjective<'a> {
    pub instance: &'a ProblemInstance,
    pub space: NormalizedSpace,
    pub weights: PenaltyWeights,
    pub tolerances: Tolerances,
}

impl<'a> DispatchObjective<'a> {
    pub fn new(instance: &'a ProblemInstance, weights: PenaltyWeights, tolerances: Tolerances) -> Self {
        Self {
            instance,
            space: NormalizedSpace::for_instance(instance),
            weights,
            tolerances,
        }
    }
}

impl Objective for DispatchObjective<'_> {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn evaluate(&self, z: &[f64], iteration: usize) -> Result<Candidate, ModelError> {
        let x = self.space.denormalize(z);
        let dv = self.space.to_decision_vector(x);
        let dv = clamp_bounds(self.instance, &dv);
        let dv = repair_all(self.instance, &dv);
        let report = evaluate(self.instance, &dv, &self.tolerances)?;
        let fitness = penalized_fitness(&report, &self.weights, iteration);
        Ok(Candidate {
            dv,
            report: Some(report),
            fitness,
        })
    }
}

/// A plain function over a box, for engine sanity checks.
pub struct FunctionObjective<F: Fn(&[f64]) -> f64> {
    pub space: NormalizedSpace,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> FunctionObjective<F> {
    pub fn new(lb: Vec<f64>, ub: Vec<f64>, f: F) -> Self {
        Self {
            space: NormalizedSpace::from_bounds(lb, ub),
            f,
        }
    }
}

impl<F: Fn(&[f64]) -> f64> Objective for FunctionObjective<F> {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn evaluate(&self, z: &[f64], _iteration: usize) -> Result<Candidate, ModelError> {
        let x = self.space.denormalize(z);
        let fitness = (self.f)(&x);
        Ok(Candidate {
            dv: DecisionVector::new(x, vec![]),
            report: None,
            fitness,
        })
    }
}

/// Errors from the solver entry points.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid instance:\n  {}", .0.join("\n  "))]
    InvalidInstance(Vec<String>),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
