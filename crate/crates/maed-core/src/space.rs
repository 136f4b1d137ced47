//! Affine mapping between problem coordinates and the normalized search
//! box `[1, 2]^D` the engines operate in.
//!
//! Working in `[1, 2]` keeps the reciprocal-square terms of the nucleus
//! relocation bounded (1/z^2 stays in [0.25, 1]) and makes the search
//! scale-free across MW ranges.

use crate::model::{DecisionVector, ProblemInstance};

/// Per-dimension problem bounds together with the `[1, 2]` mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSpace {
    lb: Vec<f64>,
    ub: Vec<f64>,
    n_gens: usize,
}

/// Lower edge of the normalized box.
pub const NORM_LO: f64 = 1.0;
/// Upper edge of the normalized box.
pub const NORM_HI: f64 = 2.0;

impl NormalizedSpace {
    /// Builds the search box for an instance: one dimension per generator
    /// (`[p_min, p_max]`) followed by one per tie line (`[-cap, +cap]`).
    pub fn for_instance(instance: &ProblemInstance) -> Self {
        let mut lb = Vec::with_capacity(instance.dim());
        let mut ub = Vec::with_capacity(instance.dim());
        for g in &instance.generators {
            lb.push(g.p_min);
            ub.push(g.p_max);
        }
        for line in &instance.tie_lines {
            lb.push(-line.capacity);
            ub.push(line.capacity);
        }
        Self {
            lb,
            ub,
            n_gens: instance.generators.len(),
        }
    }

    /// Builds a space from explicit bounds (used for analytic test problems).
    pub fn from_bounds(lb: Vec<f64>, ub: Vec<f64>) -> Self {
        assert_eq!(lb.len(), ub.len());
        assert!(lb.iter().zip(&ub).all(|(l, u)| l < u), "lb must be < ub");
        let n = lb.len();
        Self {
            lb,
            ub,
            n_gens: n,
        }
    }

    pub fn dim(&self) -> usize {
        self.lb.len()
    }

    /// Maps a normalized point into problem coordinates.
    pub fn denormalize(&self, z: &[f64]) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.dim());
        z.iter()
            .zip(self.lb.iter().zip(&self.ub))
            .map(|(&zi, (&l, &u))| l + (zi - NORM_LO) * (u - l))
            .collect()
    }

    /// Maps problem coordinates into the normalized box.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(self.lb.iter().zip(&self.ub))
            .map(|(&xi, (&l, &u))| NORM_LO + (xi - l) / (u - l))
            .collect()
    }

    /// Splits a denormalized coordinate vector into a decision vector.
    pub fn to_decision_vector(&self, x: Vec<f64>) -> DecisionVector {
        let (p, t) = {
            let mut p = x;
            let t = p.split_off(self.n_gens);
            (p, t)
        };
        DecisionVector::new(p, t)
    }
}

/// Clamps a normalized coordinate into the `[1, 2]` box.
pub fn clamp_norm(z: f64) -> f64 {
    z.clamp(NORM_LO, NORM_HI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn round_trip_is_identity() {
        let space = NormalizedSpace::from_bounds(vec![-50.0, 10.0, 0.0], vec![75.0, 500.0, 1.0]);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..1000 {
            let z: Vec<f64> = (0..3).map(|_| rng.random_range(1.0..2.0)).collect();
            let x = space.denormalize(&z);
            let back = space.normalize(&x);
            for (a, b) in z.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn box_edges_map_to_problem_bounds() {
        let space = NormalizedSpace::from_bounds(vec![100.0], vec![500.0]);
        assert_eq!(space.denormalize(&[1.0])[0], 100.0);
        assert_eq!(space.denormalize(&[2.0])[0], 500.0);
        assert_eq!(space.denormalize(&[1.5])[0], 300.0);
    }
}
