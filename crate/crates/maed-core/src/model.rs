//! Problem data model: areas, generators, loss models, tie lines, and the
//! decision vector the solvers operate on.
//!
//! All powers are in MW, costs in $/h. Cost coefficients follow the usual
//! quadratic-plus-valve convention `a*p^2 + b*p + c + |e*sin(f*(p_low - p))|`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One fuel segment of a generator cost curve.
///
/// Single-fuel generators have exactly one option spanning `[p_min, p_max]`.
/// Multi-fuel generators carry one option per fuel; the valve ripple of each
/// option is phase-anchored at the option's own `p_low`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelOption {
    /// Lower edge of the segment (MW).
    pub p_low: f64,
    /// Upper edge of the segment (MW).
    pub p_high: f64,
    /// Quadratic cost coefficient ($/MW^2 h).
    pub a: f64,
    /// Linear cost coefficient ($/MW h).
    pub b: f64,
    /// Constant cost ($/h).
    pub c: f64,
    /// Valve-point ripple amplitude ($/h).
    pub e: f64,
    /// Valve-point ripple frequency (rad/MW).
    pub f: f64,
}

/// A power interval `(low, up)` where operation is prohibited.
/// The boundaries themselves are feasible operating points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProhibitedZone {
    pub low: f64,
    pub up: f64,
}

impl ProhibitedZone {
    pub fn new(low: f64, up: f64) -> Self {
        Self { low, up }
    }

    /// True when `p` lies strictly inside the zone.
    pub fn contains(&self, p: f64) -> bool {
        p > self.low && p < self.up
    }
}

/// A dispatchable generating unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    /// Index into `ProblemInstance::areas`.
    pub area: usize,
    /// Minimum stable output (MW).
    pub p_min: f64,
    /// Maximum output (MW).
    pub p_max: f64,
    /// Ordered, contiguous fuel segments jointly covering `[p_min, p_max]`.
    pub fuel_options: Vec<FuelOption>,
    /// Sorted, pairwise disjoint prohibited zones, each strictly inside
    /// `(p_min, p_max)`. May be empty.
    pub poz: Vec<ProhibitedZone>,
}

impl Generator {
    /// Convenience constructor for a single-fuel unit without zones.
    pub fn single_fuel(
        id: impl Into<String>,
        area: usize,
        p_min: f64,
        p_max: f64,
        a: f64,
        b: f64,
        c: f64,
        e: f64,
        f: f64,
    ) -> Self {
        Self {
            id: id.into(),
            area,
            p_min,
            p_max,
            fuel_options: vec![FuelOption {
                p_low: p_min,
                p_high: p_max,
                a,
                b,
                c,
                e,
                f,
            }],
            poz: Vec::new(),
        }
    }
}

/// Quadratic transmission-loss model for one area:
/// `P_L = p' B p + b0' p + b00` over that area's generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossModel {
    /// Symmetric quadratic coefficients (1/MW), row-major square matrix.
    pub b: Vec<Vec<f64>>,
    /// Linear coefficients (dimensionless).
    pub b0: Vec<f64>,
    /// Constant loss (MW).
    pub b00: f64,
}

/// One control area: its load and optional loss model.
/// An absent loss model means the area is lossless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub id: String,
    /// Load demand (MW).
    pub demand: f64,
    pub loss: Option<LossModel>,
}

/// Transmission corridor between two areas with symmetric capacity.
/// Flow is stored once per unordered pair; positive flow runs from
/// `from_area` (the lower index) toward `to_area`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieLine {
    pub from_area: usize,
    pub to_area: usize,
    /// Flow limit (MW); the feasible band is `[-capacity, +capacity]`.
    pub capacity: f64,
}

/// A complete multi-area economic dispatch instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub name: String,
    pub areas: Vec<Area>,
    pub generators: Vec<Generator>,
    pub tie_lines: Vec<TieLine>,
}

impl ProblemInstance {
    /// Number of decision variables: one per generator plus one per tie line.
    pub fn dim(&self) -> usize {
        self.generators.len() + self.tie_lines.len()
    }

    /// Indices (into `generators`) of the units in `area_idx`, in instance order.
    pub fn area_generators(&self, area_idx: usize) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.area == area_idx)
            .map(|(i, _)| i)
            .collect()
    }

    /// Net export of `area_idx` under tie flows `t` (instance order):
    /// outgoing flow counts positive, incoming negative.
    pub fn net_export(&self, area_idx: usize, t: &[f64]) -> f64 {
        self.tie_lines
            .iter()
            .zip(t)
            .map(|(line, &flow)| {
                if line.from_area == area_idx {
                    flow
                } else if line.to_area == area_idx {
                    -flow
                } else {
                    0.0
                }
            })
            .sum()
    }
}

/// Concatenated generator outputs and tie-line flows, in instance order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector {
    /// Generator outputs (MW), one entry per generator.
    pub p: Vec<f64>,
    /// Tie-line flows (MW), one entry per tie line; positive means flow
    /// from the line's `from_area` to its `to_area`.
    pub t: Vec<f64>,
}

impl DecisionVector {
    pub fn new(p: Vec<f64>, t: Vec<f64>) -> Self {
        Self { p, t }
    }

    pub fn dim(&self) -> usize {
        self.p.len() + self.t.len()
    }

    /// First non-finite entry, if any, as an index into the concatenation.
    pub fn non_finite_index(&self) -> Option<usize> {
        self.p
            .iter()
            .chain(self.t.iter())
            .position(|v| !v.is_finite())
    }
}

/// Feasibility tolerances used when flagging an `EvaluationReport`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max allowed per-area balance residual magnitude (MW).
    pub balance: f64,
    /// Max allowed total generator bound violation (MW).
    pub bound: f64,
    /// Max allowed total prohibited-zone violation (MW).
    pub poz: f64,
    /// Max allowed total tie-line capacity violation (MW).
    pub tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            balance: 1e-3,
            bound: 1e-6,
            poz: 1e-6,
            tie: 1e-6,
        }
    }
}

/// Full account of one decision vector: cost, losses, residuals and
/// violation magnitudes. Produced by [`crate::eval::evaluate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// Total fuel cost ($/h), computed on the bound-clamped copy of the vector.
    pub cost: f64,
    /// Transmission loss per area (MW).
    pub area_losses: Vec<f64>,
    /// Generation minus demand, losses and net export, per area (MW).
    pub balance_residual: Vec<f64>,
    /// Per-generator distance outside `[p_min, p_max]` (MW).
    pub bound_violations: Vec<f64>,
    /// Per-generator distance to the nearest boundary of an enclosing zone (MW).
    pub poz_violations: Vec<f64>,
    /// Per-tie-line flow excess beyond `[-capacity, +capacity]` (MW).
    pub tie_violations: Vec<f64>,
    /// Sum of `bound_violations` (MW).
    pub bound_violation: f64,
    /// Sum of `poz_violations` (MW).
    pub poz_violation: f64,
    /// Sum of `tie_violations` (MW).
    pub tie_violation: f64,
    /// True iff every violation total and every residual magnitude is within
    /// its tolerance.
    pub feasible: bool,
}

impl EvaluationReport {
    /// Largest per-area balance residual magnitude (MW).
    pub fn max_balance_residual(&self) -> f64 {
        self.balance_residual
            .iter()
            .fold(0.0_f64, |m, r| m.max(r.abs()))
    }
}

/// Errors raised by evaluation operations.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("generator `{id}`: output {p} MW outside [{lo}, {hi}] MW")]
    PowerOutOfRange { id: String, p: f64, lo: f64, hi: f64 },
    #[error("decision vector has {got} entries, instance `{name}` expects {want}")]
    DimensionMismatch {
        name: String,
        got: usize,
        want: usize,
    },
    #[error("decision vector entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("area index {index} out of range ({count} areas)")]
    BadAreaIndex { index: usize, count: usize },
}

/// Relative symmetry tolerance for loss matrices.
const B_SYMMETRY_RTOL: f64 = 1e-12;

/// Checks every structural invariant of `instance` and returns all failures,
/// not just the first. An empty list means the instance is well formed.
pub fn validate_instance(instance: &ProblemInstance) -> Vec<String> {
    let mut issues = Vec::new();
    let n_areas = instance.areas.len();

    if n_areas == 0 {
        issues.push("instance has no areas".to_string());
    }
    if instance.generators.is_empty() {
        issues.push("instance has no generators".to_string());
    }

    for (ai, area) in instance.areas.iter().enumerate() {
        if !(area.demand >= 0.0) {
            issues.push(format!("area `{}`: demand {} is negative", area.id, area.demand));
        }
        let n_gen = instance.generators.iter().filter(|g| g.area == ai).count();
        if n_gen == 0 {
            issues.push(format!("area `{}` has no generators", area.id));
        }
        if let Some(loss) = &area.loss {
            let n = loss.b.len();
            if n != n_gen {
                issues.push(format!(
                    "area `{}`: loss matrix is {}x{} but the area has {} generators",
                    area.id,
                    n,
                    loss.b.first().map_or(0, Vec::len),
                    n_gen
                ));
            }
            if loss.b.iter().any(|row| row.len() != n) {
                issues.push(format!("area `{}`: loss matrix is not square", area.id));
            } else {
                for q in 0..n {
                    for j in (q + 1)..n {
                        let (x, y) = (loss.b[q][j], loss.b[j][q]);
                        let scale = x.abs().max(y.abs()).max(1.0);
                        if (x - y).abs() > B_SYMMETRY_RTOL * scale {
                            issues.push(format!(
                                "area `{}`: loss matrix asymmetric at ({q},{j}): {x} vs {y}",
                                area.id
                            ));
                        }
                    }
                }
            }
            if loss.b0.len() != n_gen {
                issues.push(format!(
                    "area `{}`: loss b0 has {} entries for {} generators",
                    area.id,
                    loss.b0.len(),
                    n_gen
                ));
            }
        }
    }

    for gen in &instance.generators {
        if gen.area >= n_areas {
            issues.push(format!(
                "generator `{}`: area index {} out of range ({} areas)",
                gen.id, gen.area, n_areas
            ));
        }
        if !(gen.p_min < gen.p_max) {
            issues.push(format!(
                "generator `{}`: p_min {} must be below p_max {}",
                gen.id, gen.p_min, gen.p_max
            ));
        }
        if gen.fuel_options.is_empty() {
            issues.push(format!("generator `{}`: no fuel options", gen.id));
        } else {
            // Segments must tile [p_min, p_max] exactly, in order.
            let mut edge = gen.p_min;
            for (i, opt) in gen.fuel_options.iter().enumerate() {
                if !(opt.p_low < opt.p_high) {
                    issues.push(format!(
                        "generator `{}` fuel option {i}: p_low {} must be below p_high {}",
                        gen.id, opt.p_low, opt.p_high
                    ));
                }
                if opt.p_low != edge {
                    issues.push(format!(
                        "generator `{}` fuel option {i}: starts at {} but previous segment ends at {}",
                        gen.id, opt.p_low, edge
                    ));
                }
                if opt.a < 0.0 || opt.e < 0.0 || opt.f < 0.0 {
                    issues.push(format!(
                        "generator `{}` fuel option {i}: a, e, f must be non-negative",
                        gen.id
                    ));
                }
                edge = opt.p_high;
            }
            if edge != gen.p_max {
                issues.push(format!(
                    "generator `{}`: fuel options end at {} but p_max is {}",
                    gen.id, edge, gen.p_max
                ));
            }
        }
        let mut prev_up = f64::NEG_INFINITY;
        for (l, zone) in gen.poz.iter().enumerate() {
            if !(zone.low < zone.up) {
                issues.push(format!(
                    "generator `{}` zone {l} [{}, {}]: low must be below up",
                    gen.id, zone.low, zone.up
                ));
            }
            if zone.low <= prev_up {
                issues.push(format!(
                    "generator `{}` zone {l} [{}, {}] overlaps or touches the previous zone ending at {}",
                    gen.id, zone.low, zone.up, prev_up
                ));
            }
            if zone.low <= gen.p_min || zone.up >= gen.p_max {
                issues.push(format!(
                    "generator `{}` zone {l} [{}, {}] not strictly inside ({}, {})",
                    gen.id, zone.low, zone.up, gen.p_min, gen.p_max
                ));
            }
            prev_up = zone.up;
        }
    }

    let mut seen_pairs = std::collections::HashSet::new();
    for (ti, line) in instance.tie_lines.iter().enumerate() {
        if line.from_area >= n_areas || line.to_area >= n_areas {
            issues.push(format!(
                "tie line {ti}: connects area {} to {} but there are {} areas",
                line.from_area, line.to_area, n_areas
            ));
            continue;
        }
        if line.from_area >= line.to_area {
            issues.push(format!(
                "tie line {ti}: from_area {} must be below to_area {}",
                line.from_area, line.to_area
            ));
        }
        if !(line.capacity > 0.0) {
            issues.push(format!(
                "tie line {ti}: capacity {} must be positive",
                line.capacity
            ));
        }
        if !seen_pairs.insert((line.from_area, line.to_area)) {
            issues.push(format!(
                "tie line {ti}: duplicate corridor between areas {} and {}",
                line.from_area, line.to_area
            ));
        }
    }

    issues
}
