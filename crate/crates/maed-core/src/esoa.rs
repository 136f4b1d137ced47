//! Electro-search optimization: atoms spread over the normalized box emit
//! electrons at quantized orbit radii, nuclei relocate toward the best
//! electron and away from the worst nucleus, and the Rydberg/accelerator
//! coefficients self-tune through fitness-weighted averaging.
//!
//! The search runs entirely in `[1, 2]^D`; candidates pass through the
//! shared dispatch pipeline for clamping, zone repair and penalty fitness.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::constraints::PenaltyWeights;
use crate::model::{ProblemInstance, Tolerances};
use crate::pipeline::{Candidate, DispatchObjective, Objective, SolveError};
use crate::space::{clamp_norm, NORM_HI, NORM_LO};
use crate::trace::{RunTrace, SolveResult, TraceRow};

/// Tunable knobs of the electro-search engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Population size (>= 3).
    pub n_atoms: usize,
    /// Orbit quantum numbers electrons may use, each in 2..=5.
    pub orbits: Vec<u32>,
    /// Electrons sampled around each nucleus per iteration.
    pub electrons_per_atom: usize,
    /// Initial orbit radius as a fraction of the normalized range.
    pub r_frac: f64,
    /// Orbit radius (fraction of range) reached at the final iteration; the
    /// radius anneals geometrically from `r_frac` down to this value.
    pub r_end: f64,
    /// Gain on the best-attraction / worst-repulsion movement terms.
    /// Zero recovers the unmodified four-phase update.
    pub alpha: f64,
    /// Per-dimension mutation probability.
    pub p_mut: f64,
    /// Mutation noise std, in normalized units.
    pub sigma_mut: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Upper clamp for the Rydberg coefficient.
    pub re_max: f64,
    /// Upper clamp for the accelerator coefficient.
    pub ac_max: f64,
    pub penalty: PenaltyWeights,
    pub tolerances: Tolerances,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            n_atoms: 50,
            orbits: vec![2, 3, 4, 5],
            electrons_per_atom: 4,
            r_frac: 0.3,
            r_end: 1e-7,
            alpha: 1.0,
            p_mut: 0.05,
            sigma_mut: 0.05,
            max_iters: 100,
            seed: 0,
            re_max: 2.0,
            ac_max: 2.0,
            penalty: PenaltyWeights::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::InvalidConfig(msg));
        if self.n_atoms < 3 {
            return bad(format!("n_atoms must be >= 3, got {}", self.n_atoms));
        }
        if self.orbits.is_empty() || self.orbits.iter().any(|&n| !(2..=5).contains(&n)) {
            return bad(format!("orbits must be a non-empty subset of 2..=5, got {:?}", self.orbits));
        }
        if self.electrons_per_atom == 0 {
            return bad("electrons_per_atom must be positive".into());
        }
        if !(self.r_frac > 0.0) {
            return bad(format!("r_frac must be positive, got {}", self.r_frac));
        }
        if !(self.r_end > 0.0 && self.r_end <= self.r_frac) {
            return bad(format!("r_end must be in (0, r_frac], got {}", self.r_end));
        }
        if !(0.0..=1.0).contains(&self.p_mut) {
            return bad(format!("p_mut must be in [0, 1], got {}", self.p_mut));
        }
        if self.sigma_mut < 0.0 {
            return bad(format!("sigma_mut must be non-negative, got {}", self.sigma_mut));
        }
        Ok(())
    }

    /// Orbit radius at iteration `k`: geometric anneal from `r_frac` to
    /// `r_end` across the horizon. A constant radius cannot both explore and
    /// meet MW-scale precision targets, so the schedule replaces the fixed
    /// fraction.
    pub fn orbit_radius(&self, k: usize) -> f64 {
        if self.max_iters == 0 {
            return self.r_frac;
        }
        let rho = (self.r_end / self.r_frac).powf(1.0 / self.max_iters as f64);
        self.r_frac * rho.powi(k.min(self.max_iters) as i32)
    }
}

/// One search agent: a nucleus with its evaluated candidate, per-atom
/// Rydberg (`re`) and accelerator (`ac`) coefficients, and the best electron
/// found this iteration.
#[derive(Debug, Clone)]
pub struct Atom {
    /// Position in `[1, 2]^D`.
    pub nucleus: Vec<f64>,
    /// Evaluation of the nucleus, with the fitness stored at acceptance.
    pub cand: Candidate,
    pub re: f64,
    pub ac: f64,
    pub best_electron: Option<Vec<f64>>,
}

/// Engine state across iterations.
pub struct EsoaState {
    pub atoms: Vec<Atom>,
    /// Iterations completed.
    pub iter: usize,
    pub trace: RunTrace,
    best_cost_so_far: f64,
    rng: ChaCha8Rng,
}

impl EsoaState {
    pub fn best_index(&self) -> usize {
        argmin_fitness(&self.atoms)
    }
}

fn argmin_fitness(atoms: &[Atom]) -> usize {
    let mut best = 0;
    for (i, a) in atoms.iter().enumerate() {
        if a.cand.fitness < atoms[best].cand.fitness {
            best = i;
        }
    }
    best
}

fn argmax_fitness(atoms: &[Atom]) -> usize {
    let mut worst = 0;
    for (i, a) in atoms.iter().enumerate() {
        if a.cand.fitness > atoms[worst].cand.fitness {
            worst = i;
        }
    }
    worst
}

/// Spreads `n_atoms` nuclei uniformly over the box and evaluates them.
/// Per-atom coefficients start uniform in (0, 1].
pub fn spread_atoms<O: Objective>(
    obj: &O,
    config: &EngineConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Atom>, crate::model::ModelError> {
    let dim = obj.dim();
    let mut atoms = Vec::with_capacity(config.n_atoms);
    for _ in 0..config.n_atoms {
        let nucleus: Vec<f64> = (0..dim).map(|_| rng.random_range(NORM_LO..NORM_HI)).collect();
        let re = 1.0 - rng.random::<f64>();
        let ac = 1.0 - rng.random::<f64>();
        let cand = obj.evaluate(&nucleus, 0)?;
        atoms.push(Atom {
            nucleus,
            cand,
            re,
            ac,
            best_electron: None,
        });
    }
    Ok(atoms)
}

/// Samples the electron cloud of one nucleus: each electron picks an orbit
/// `n` from the configured set and lands at
/// `N_d + (2*rand - 1) * (1 - 1/n^2) * r` per dimension, clamped to the box.
pub fn orbital_transition(
    nucleus: &[f64],
    config: &EngineConfig,
    r: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    (0..config.electrons_per_atom)
        .map(|_| {
            let n = config.orbits[rng.random_range(0..config.orbits.len())];
            let amplitude = (1.0 - 1.0 / (n as f64 * n as f64)) * r;
            nucleus
                .iter()
                .map(|&nd| clamp_norm(nd + (2.0 * rng.random::<f64>() - 1.0) * amplitude))
                .collect()
        })
        .collect()
}

/// Relocates one nucleus:
/// `D = (e_best - N_best) + Re*(1/N_best^2 - 1/N^2)
///      + alpha*rand1*(N_best - N) - alpha*rand2*(N_worst - N)`,
/// all elementwise, then `N' = clamp(N + Ac*D)`. With `alpha = 0` only the
/// two leading terms remain.
pub fn nucleus_relocation(
    atom: &Atom,
    best_nucleus: &[f64],
    worst_nucleus: &[f64],
    config: &EngineConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let e_best = atom
        .best_electron
        .as_ref()
        .expect("best_electron must be set before relocation");
    let dim = atom.nucleus.len();
    let rand1: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let rand2: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    (0..dim)
        .map(|d| {
            let n_k = atom.nucleus[d];
            let n_best = best_nucleus[d];
            let n_worst = worst_nucleus[d];
            let step = (e_best[d] - n_best)
                + atom.re * (1.0 / (n_best * n_best) - 1.0 / (n_k * n_k))
                + config.alpha * rand1[d] * (n_best - n_k)
                - config.alpha * rand2[d] * (n_worst - n_k);
            clamp_norm(n_k + atom.ac * step)
        })
        .collect()
}

/// Adds Gaussian noise (std `sigma_mut`) to each dimension independently
/// with probability `p_mut`, clamped to the box.
pub fn mutate(z: &mut [f64], config: &EngineConfig, rng: &mut ChaCha8Rng) {
    let normal = Normal::new(0.0, config.sigma_mut).expect("sigma_mut validated non-negative");
    for zd in z.iter_mut() {
        if rng.random::<f64>() < config.p_mut {
            *zd = clamp_norm(*zd + normal.sample(rng));
        }
    }
}

/// Self-tunes the per-atom coefficients: a fitness-weighted center of mass
/// `W` is folded with the best atom's coefficient, then averaged with the
/// atom's own. Returns `(re, ac)` per atom, clamped to the configured caps.
///
/// Weights are reciprocal shifted fitnesses; an all-equal population
/// degenerates to uniform weights, making every coefficient a fixed point.
pub fn tune_coefficients(atoms: &[Atom], best_idx: usize, config: &EngineConfig) -> Vec<(f64, f64)> {
    let min_f = atoms.iter().map(|a| a.cand.fitness).fold(f64::INFINITY, f64::min);
    let max_f = atoms
        .iter()
        .map(|a| a.cand.fitness)
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = ((max_f - min_f) * 0.01).max(1e-12);

    let mut w_sum = 0.0;
    let mut re_acc = 0.0;
    let mut ac_acc = 0.0;
    for a in atoms {
        let w = 1.0 / (a.cand.fitness - min_f + shift);
        w_sum += w;
        re_acc += a.re * w;
        ac_acc += a.ac * w;
    }
    let w_re = re_acc / w_sum;
    let w_ac = ac_acc / w_sum;

    let re_best = atoms[best_idx].re;
    let ac_best = atoms[best_idx].ac;
    atoms
        .iter()
        .map(|a| {
            let re = (a.re + (re_best + w_re) / 2.0) / 2.0;
            let ac = (a.ac + (ac_best + w_ac) / 2.0) / 2.0;
            (re.min(config.re_max), ac.min(config.ac_max))
        })
        .collect()
}

/// Initializes engine state: spread, evaluate, record the starting trace row.
pub fn init_state<O: Objective>(obj: &O, config: &EngineConfig) -> Result<EsoaState, SolveError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let atoms = spread_atoms(obj, config, &mut rng)?;
    let best = argmin_fitness(&atoms);
    let best_cost = atoms[best].cand.cost();
    let mut trace = RunTrace::default();
    trace.push(TraceRow {
        iter: 0,
        best_fitness: atoms[best].cand.fitness,
        best_cost,
        tie_flows: atoms[best].cand.dv.t.clone(),
    });
    Ok(EsoaState {
        atoms,
        iter: 0,
        trace,
        best_cost_so_far: best_cost,
        rng,
    })
}

/// Runs one full iteration: electron clouds, relocation with mutation under
/// greedy acceptance, coefficient tuning, trace append.
pub fn step<O: Objective>(
    state: &mut EsoaState,
    obj: &O,
    config: &EngineConfig,
) -> Result<(), crate::model::ModelError> {
    state.iter += 1;
    let k = state.iter;
    let r = config.orbit_radius(k);
    let rng = &mut state.rng;

    for atom in &mut state.atoms {
        let electrons = orbital_transition(&atom.nucleus, config, r, rng);
        let mut best: Option<(Vec<f64>, f64)> = None;
        for e in electrons {
            let cand = obj.evaluate(&e, k)?;
            if best.as_ref().is_none_or(|(_, f)| cand.fitness < *f) {
                best = Some((e, cand.fitness));
            }
        }
        atom.best_electron = best.map(|(e, _)| e);
    }

    let best_idx = argmin_fitness(&state.atoms);
    let worst_idx = argmax_fitness(&state.atoms);
    let best_nucleus = state.atoms[best_idx].nucleus.clone();
    let worst_nucleus = state.atoms[worst_idx].nucleus.clone();

    for atom in &mut state.atoms {
        let mut z = nucleus_relocation(atom, &best_nucleus, &worst_nucleus, config, rng);
        mutate(&mut z, config, rng);
        let cand = obj.evaluate(&z, k)?;
        if cand.fitness < atom.cand.fitness {
            atom.nucleus = z;
            atom.cand = cand;
        }
    }

    let best_idx = argmin_fitness(&state.atoms);
    let tuned = tune_coefficients(&state.atoms, best_idx, config);
    for (atom, (re, ac)) in state.atoms.iter_mut().zip(tuned) {
        atom.re = re;
        atom.ac = ac;
    }

    let best = &state.atoms[best_idx];
    state.best_cost_so_far = state.best_cost_so_far.min(best.cand.cost());
    state.trace.push(TraceRow {
        iter: k,
        best_fitness: best.cand.fitness,
        best_cost: state.best_cost_so_far,
        tie_flows: best.cand.dv.t.clone(),
    });
    Ok(())
}

/// Minimizes an arbitrary objective, returning the best candidate and trace.
pub fn run_engine<O: Objective>(
    obj: &O,
    config: &EngineConfig,
) -> Result<(Candidate, f64, RunTrace), SolveError> {
    let mut state = init_state(obj, config)?;
    for _ in 0..config.max_iters {
        step(&mut state, obj, config)?;
    }
    let best = &state.atoms[state.best_index()];
    Ok((best.cand.clone(), best.cand.fitness, state.trace))
}

/// Solves a dispatch instance with the electro-search engine.
pub fn solve(instance: &ProblemInstance, config: &EngineConfig) -> Result<SolveResult, SolveError> {
    let issues = crate::model::validate_instance(instance);
    if !issues.is_empty() {
        return Err(SolveError::InvalidInstance(issues));
    }
    let obj = DispatchObjective::new(instance, config.penalty, config.tolerances);
    let (cand, fitness, trace) = run_engine(&obj, config)?;
    Ok(SolveResult {
        best_vector: cand.dv,
        best_report: cand.report.expect("dispatch objective always reports"),
        best_fitness: fitness,
        trace,
    })
}

use rand::SeedableRng;
