//! Multi-seed experiment runner: repeated solves over consecutive seeds with
//! summary statistics, the shape of an eleven-run benchmark table.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::esoa::{self, EngineConfig};
use crate::ga::{self, GaConfig};
use crate::model::ProblemInstance;
use crate::pipeline::SolveError;
use crate::trace::SolveResult;

/// Which search engine to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Esoa,
    Ga,
}

impl std::str::FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "esoa" => Ok(Algo::Esoa),
            "ga" => Ok(Algo::Ga),
            other => Err(format!("unknown algorithm `{other}` (expected esoa or ga)")),
        }
    }
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algo::Esoa => write!(f, "esoa"),
            Algo::Ga => write!(f, "ga"),
        }
    }
}

/// Solver configuration for a bench run: one of the two engines with its
/// full settings. The seed field inside is replaced per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BenchConfig {
    Esoa(EngineConfig),
    Ga(GaConfig),
}

impl BenchConfig {
    pub fn algo(&self) -> Algo {
        match self {
            BenchConfig::Esoa(_) => Algo::Esoa,
            BenchConfig::Ga(_) => Algo::Ga,
        }
    }

    fn with_seed(&self, seed: u64) -> Self {
        match self {
            BenchConfig::Esoa(c) => BenchConfig::Esoa(EngineConfig { seed, ..c.clone() }),
            BenchConfig::Ga(c) => BenchConfig::Ga(GaConfig { seed, ..c.clone() }),
        }
    }

    pub fn solve(&self, instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
        match self {
            BenchConfig::Esoa(c) => esoa::solve(instance, c),
            BenchConfig::Ga(c) => ga::ga_solve(instance, c),
        }
    }
}

/// Deterministic summary of a multi-seed benchmark. Wall time is tracked
/// separately by the caller so the serialized summary is bit-reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub instance: String,
    pub algo: Algo,
    pub n_runs: usize,
    pub seed_base: u64,
    /// Best cost per run, seed order.
    pub best_costs: Vec<f64>,
    /// Feasibility flag per run, seed order.
    pub feasible: Vec<bool>,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// Fraction of runs whose final solution was feasible.
    pub feasibility_rate: f64,
}

/// Outcome of [`run_bench`]: the summary, per-run results, and elapsed time.
pub struct BenchOutcome {
    pub summary: BenchSummary,
    pub results: Vec<SolveResult>,
    pub wall_time_s: f64,
}

/// Runs `n_runs` independent seeded solves (seeds `seed_base..seed_base+n`)
/// in parallel and aggregates the summary. Results are identical to running
/// the seeds sequentially.
pub fn run_bench(
    instance: &ProblemInstance,
    config: &BenchConfig,
    n_runs: usize,
    seed_base: u64,
) -> Result<BenchOutcome, SolveError> {
    let started = Instant::now();
    let results: Vec<SolveResult> = (0..n_runs)
        .into_par_iter()
        .map(|i| config.with_seed(seed_base + i as u64).solve(instance))
        .collect::<Result<_, _>>()?;
    let wall_time_s = started.elapsed().as_secs_f64();

    let best_costs: Vec<f64> = results.iter().map(|r| r.best_report.cost).collect();
    let feasible: Vec<bool> = results.iter().map(|r| r.best_report.feasible).collect();
    let n = best_costs.len().max(1) as f64;
    let mean = best_costs.iter().sum::<f64>() / n;
    let var = best_costs.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / n;
    let min = best_costs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = best_costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let feasibility_rate = feasible.iter().filter(|&&f| f).count() as f64 / n;

    Ok(BenchOutcome {
        summary: BenchSummary {
            instance: instance.name.clone(),
            algo: config.algo(),
            n_runs,
            seed_base,
            best_costs,
            feasible,
            mean,
            std: var.sqrt(),
            min,
            max,
            feasibility_rate,
        },
        results,
        wall_time_s,
    })
}
