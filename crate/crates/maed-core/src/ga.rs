//! Real-coded genetic algorithm baseline: tournament selection, blend
//! crossover, Gaussian mutation and elitism, running over the same
//! normalized box and evaluation pipeline as the electro-search engine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::constraints::PenaltyWeights;
use crate::model::{ProblemInstance, Tolerances};
use crate::pipeline::{Candidate, DispatchObjective, Objective, SolveError};
use crate::space::{clamp_norm, NORM_HI, NORM_LO};
use crate::trace::{RunTrace, SolveResult, TraceRow};

/// Genetic-algorithm knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    /// Population size (>= 4).
    pub pop_size: usize,
    /// Tournament size for parent selection.
    pub tournament_k: usize,
    /// Probability a child is produced by crossover rather than copied.
    pub crossover_rate: f64,
    /// Blend-crossover expansion factor (BLX-alpha).
    pub blend_alpha: f64,
    /// Per-dimension mutation probability; `None` means `1/D`.
    pub p_mut: Option<f64>,
    /// Mutation noise std, in normalized units.
    pub sigma_mut: f64,
    /// Individuals copied unchanged into the next generation.
    pub elitism_count: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub penalty: PenaltyWeights,
    pub tolerances: Tolerances,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            pop_size: 50,
            tournament_k: 3,
            crossover_rate: 0.9,
            blend_alpha: 0.5,
            p_mut: None,
            sigma_mut: 0.1,
            elitism_count: 2,
            max_iters: 200,
            seed: 0,
            penalty: PenaltyWeights::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::InvalidConfig(msg));
        if self.pop_size < 4 {
            return bad(format!("pop_size must be >= 4, got {}", self.pop_size));
        }
        if self.elitism_count >= self.pop_size {
            return bad(format!(
                "elitism_count {} must be below pop_size {}",
                self.elitism_count, self.pop_size
            ));
        }
        if self.tournament_k == 0 {
            return bad("tournament_k must be positive".into());
        }
        for (name, v) in [
            ("crossover_rate", self.crossover_rate),
            ("blend_alpha", self.blend_alpha),
        ] {
            if !(0.0..=1.0).contains(&v) && name == "crossover_rate" {
                return bad(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        if let Some(p) = self.p_mut {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("p_mut must be in [0, 1], got {p}"));
            }
        }
        if self.sigma_mut < 0.0 {
            return bad(format!("sigma_mut must be non-negative, got {}", self.sigma_mut));
        }
        Ok(())
    }
}

struct Individual {
    genome: Vec<f64>,
    cand: Candidate,
}

fn tournament(pop: &[Individual], k: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..k {
        let i = rng.random_range(0..pop.len());
        if pop[i].cand.fitness < pop[best].cand.fitness {
            best = i;
        }
    }
    best
}

/// BLX-alpha: each child gene is uniform over the parents' interval expanded
/// by `alpha` times its width, clamped to the box.
fn blend_crossover(a: &[f64], b: &[f64], alpha: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            let span = hi - lo;
            let l = lo - alpha * span;
            let u = hi + alpha * span;
            clamp_norm(if u > l { rng.random_range(l..u) } else { l })
        })
        .collect()
}

fn gaussian_mutate(z: &mut [f64], p_mut: f64, sigma: f64, rng: &mut ChaCha8Rng) {
    let normal = Normal::new(0.0, sigma).expect("sigma validated non-negative");
    for zd in z.iter_mut() {
        if rng.random::<f64>() < p_mut {
            *zd = clamp_norm(*zd + normal.sample(rng));
        }
    }
}

/// Minimizes an arbitrary objective with the GA, returning the best
/// candidate, its fitness and the convergence trace.
pub fn ga_run<O: Objective>(
    obj: &O,
    config: &GaConfig,
) -> Result<(Candidate, f64, RunTrace), SolveError> {
    config.validate()?;
    let dim = obj.dim();
    let p_mut = config.p_mut.unwrap_or(1.0 / dim as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut pop = Vec::with_capacity(config.pop_size);
    for _ in 0..config.pop_size {
        let genome: Vec<f64> = (0..dim).map(|_| rng.random_range(NORM_LO..NORM_HI)).collect();
        let cand = obj.evaluate(&genome, 0)?;
        pop.push(Individual { genome, cand });
    }
    pop.sort_by(|a, b| a.cand.fitness.total_cmp(&b.cand.fitness));

    let mut best_cost_so_far = pop[0].cand.cost();
    let mut trace = RunTrace::default();
    trace.push(TraceRow {
        iter: 0,
        best_fitness: pop[0].cand.fitness,
        best_cost: best_cost_so_far,
        tie_flows: pop[0].cand.dv.t.clone(),
    });

    for gen in 1..=config.max_iters {
        let mut next = Vec::with_capacity(config.pop_size);
        // Population is kept sorted, so elites are the leading individuals.
        for elite in pop.iter().take(config.elitism_count) {
            next.push(Individual {
                genome: elite.genome.clone(),
                cand: elite.cand.clone(),
            });
        }
        while next.len() < config.pop_size {
            let p1 = tournament(&pop, config.tournament_k, &mut rng);
            let mut child = if rng.random::<f64>() < config.crossover_rate {
                let p2 = tournament(&pop, config.tournament_k, &mut rng);
                blend_crossover(
                    &pop[p1].genome,
                    &pop[p2].genome,
                    config.blend_alpha,
                    &mut rng,
                )
            } else {
                pop[p1].genome.clone()
            };
            gaussian_mutate(&mut child, p_mut, config.sigma_mut, &mut rng);
            let cand = obj.evaluate(&child, gen)?;
            next.push(Individual {
                genome: child,
                cand,
            });
        }
        pop = next;
        pop.sort_by(|a, b| a.cand.fitness.total_cmp(&b.cand.fitness));
        best_cost_so_far = best_cost_so_far.min(pop[0].cand.cost());
        trace.push(TraceRow {
            iter: gen,
            best_fitness: pop[0].cand.fitness,
            best_cost: best_cost_so_far,
            tie_flows: pop[0].cand.dv.t.clone(),
        });
    }

    let best = &pop[0];
    Ok((best.cand.clone(), best.cand.fitness, trace))
}

/// Solves a dispatch instance with the GA baseline.
pub fn ga_solve(instance: &ProblemInstance, config: &GaConfig) -> Result<SolveResult, SolveError> {
    let issues = crate::model::validate_instance(instance);
    if !issues.is_empty() {
        return Err(SolveError::InvalidInstance(issues));
    }
    let obj = DispatchObjective::new(instance, config.penalty, config.tolerances);
    let (cand, fitness, trace) = ga_run(&obj, config)?;
    Ok(SolveResult {
        best_vector: cand.dv,
        best_report: cand.report.expect("dispatch objective always reports"),
        best_fitness: fitness,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::FunctionObjective;

    fn sphere(dim: usize) -> FunctionObjective<impl Fn(&[f64]) -> f64> {
        FunctionObjective::new(vec![-5.12; dim], vec![5.12; dim], |x: &[f64]| {
            x.iter().map(|v| v * v).sum()
        })
    }

    #[test]
    fn sphere_reaches_target_in_two_hundred_iters() {
        let obj = sphere(5);
        let config = GaConfig {
            seed: 21,
            ..GaConfig::default()
        };
        let (best, _, _) = ga_run(&obj, &config).unwrap();
        assert!(best.fitness < 1e-2, "ga sphere best {}", best.fitness);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let obj = sphere(3);
        let config = GaConfig {
            max_iters: 40,
            seed: 5,
            ..GaConfig::default()
        };
        let (a, fa, ta) = ga_run(&obj, &config).unwrap();
        let (b, fb, tb) = ga_run(&obj, &config).unwrap();
        assert_eq!(a.dv, b.dv);
        assert_eq!(fa, fb);
        assert_eq!(ta, tb);
    }

    #[test]
    fn elitism_makes_best_fitness_monotone() {
        let obj = sphere(4);
        let config = GaConfig {
            max_iters: 60,
            seed: 9,
            ..GaConfig::default()
        };
        let (_, _, trace) = ga_run(&obj, &config).unwrap();
        for w in trace.rows.windows(2) {
            assert!(w[1].best_fitness <= w[0].best_fitness);
        }
    }

    #[test]
    fn offspring_stay_inside_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let a: Vec<f64> = (0..3).map(|_| rng.random_range(1.0..2.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.random_range(1.0..2.0)).collect();
            let child = blend_crossover(&a, &b, 0.5, &mut rng);
            assert!(child.iter().all(|&z| (NORM_LO..=NORM_HI).contains(&z)));
        }
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let mut c = GaConfig::default();
        c.pop_size = 3;
        assert!(c.validate().is_err());
        let mut c = GaConfig::default();
        c.elitism_count = 60;
        assert!(c.validate().is_err());
        let mut c = GaConfig::default();
        c.crossover_rate = 1.2;
        assert!(c.validate().is_err());
    }
}
