//! Constraint handling: bound clamping, prohibited-zone repair and the
//! quadratic penalty composing an evaluation report into scalar fitness.
//!
//! Every candidate is clamped and zone-repaired before evaluation; the area
//! balance equality is handled purely by an escalating quadratic penalty.

use serde::{Deserialize, Serialize};

use crate::model::{DecisionVector, EvaluationReport, Generator, ProblemInstance};

/// Penalty weights for the scalar fitness. All weights are in $/MW^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    /// Weight on squared per-area balance residuals.
    pub w_balance: f64,
    /// Weight on squared per-generator zone violations.
    pub w_poz: f64,
    /// Weight on squared bound and tie-capacity excesses.
    pub w_bound: f64,
    /// Per-iteration multiplier (>= 1) applied to the balance weight.
    pub escalation: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self {
            w_balance: 1e3,
            w_poz: 1e4,
            w_bound: 1e4,
            escalation: 1.01,
        }
    }
}

/// Escalation is capped so the effective balance weight never exceeds
/// `ESCALATION_CAP` times its initial value.
pub const ESCALATION_CAP: f64 = 1e6;

/// Projects every generator output into `[p_min, p_max]` and every tie flow
/// into `[-capacity, +capacity]`. Idempotent; feasible inputs come back
/// bit-identical.
pub fn clamp_bounds(instance: &ProblemInstance, dv: &DecisionVector) -> DecisionVector {
    let p = instance
        .generators
        .iter()
        .zip(&dv.p)
        .map(|(g, &p)| p.clamp(g.p_min, g.p_max))
        .collect();
    let t = instance
        .tie_lines
        .iter()
        .zip(&dv.t)
        .map(|(line, &t)| t.clamp(-line.capacity, line.capacity))
        .collect();
    DecisionVector::new(p, t)
}

/// Moves `p` out of any prohibited zone onto the nearer zone boundary.
/// An exact midpoint breaks toward the lower boundary. Points outside all
/// zones (including boundaries) pass through unchanged.
pub fn repair_poz(gen: &Generator, p: f64) -> f64 {
    for zone in &gen.poz {
        if zone.contains(p) {
            return if p - zone.low <= zone.up - p {
                zone.low
            } else {
                zone.up
            };
        }
    }
    p
}

/// Applies [`repair_poz`] to every generator entry of `dv`.
pub fn repair_all(instance: &ProblemInstance, dv: &DecisionVector) -> DecisionVector {
    let p = instance
        .generators
        .iter()
        .zip(&dv.p)
        .map(|(g, &p)| repair_poz(g, p))
        .collect();
    DecisionVector::new(p, dv.t.clone())
}

/// Scalar fitness: cost plus weighted squared violations.
///
/// The balance weight escalates geometrically with the iteration count,
/// capped at [`ESCALATION_CAP`] times its initial value. A fully feasible
/// report scores exactly its cost.
pub fn penalized_fitness(
    report: &EvaluationReport,
    weights: &PenaltyWeights,
    iteration: usize,
) -> f64 {
    let escalated = weights.w_balance
        * weights
            .escalation
            .powi(iteration as i32)
            .min(ESCALATION_CAP);
    let balance: f64 = report.balance_residual.iter().map(|r| r * r).sum();
    let poz: f64 = report.poz_violations.iter().map(|v| v * v).sum();
    let bound: f64 = report.bound_violations.iter().map(|v| v * v).sum::<f64>()
        + report.tie_violations.iter().map(|v| v * v).sum::<f64>();
    report.cost + escalated * balance + weights.w_poz * poz + weights.w_bound * bound
}
