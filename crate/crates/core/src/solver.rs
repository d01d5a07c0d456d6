//! Elitist single-individual heuristics for chance-constrained maximum
//! coverage: the (1+1) EA, the fast GA with heavy-tailed mutation strength,
//! and a greedy hill climber flipping one bit per step.
//!
//! All three start from the empty selection, generate one offspring per
//! evaluation and keep it when it is not worse than the incumbent under the
//! lexicographic [`Fitness`] order (constraint violation first, coverage
//! second).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::Rng as _;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{surrogate_from_moments, ChanceInstance};
use crate::seed::{rng_from, Rng};
use crate::solution::Solution;

/// Objective reported for a run that never held a solution with positive
/// feasible coverage.
pub const EPSILON: f64 = 1e-2;

/// Exponent of the power-law mutation strength used by default.
pub const DEFAULT_BETA: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// (1+1) EA with standard bit mutation.
    Ea,
    /// Fast genetic algorithm.
    Fga,
    /// Greedy hill climber.
    Ghc,
}

impl Algorithm {
    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Ea => "ea",
            Algorithm::Fga => "fga",
            Algorithm::Ghc => "ghc",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ea" => Ok(Algorithm::Ea),
            "fga" => Ok(Algorithm::Fga),
            "ghc" => Ok(Algorithm::Ghc),
            _ => Err(Error::Usage(format!("unknown algorithm `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub evaluation_budget: u64,
    pub seed: u64,
    pub beta: f64,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, evaluation_budget: u64, seed: u64) -> Self {
        SolverConfig {
            algorithm,
            evaluation_budget,
            seed,
            beta: DEFAULT_BETA,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SolverConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.evaluation_budget == 0 {
            return Err(Error::Domain("evaluation budget must be at least 1".into()));
        }
        if !(self.beta > 1.0) {
            return Err(Error::Domain(format!("power-law exponent must exceed 1, got {}", self.beta)));
        }
        Ok(())
    }
}

/// Constraint-aware solution quality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    /// `max(0, surrogate − budget)`.
    pub violation: f64,
    pub coverage: usize,
}

impl Fitness {
    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }

    /// `Greater` means `self` is better.
    pub fn compare(&self, other: &Fitness) -> Ordering {
        other
            .violation
            .total_cmp(&self.violation)
            .then(self.coverage.cmp(&other.coverage))
    }

    pub fn beats(&self, other: &Fitness) -> bool {
        self.compare(other) == Ordering::Greater
    }

    pub fn not_worse_than(&self, other: &Fitness) -> bool {
        self.compare(other) != Ordering::Less
    }
}

pub fn evaluate_fitness(instance: &ChanceInstance, solution: &Solution) -> Result<Fitness> {
    let surrogate = instance.surrogate_value(solution)?;
    let coverage = crate::graph::coverage_count(instance.graph(), solution)?;
    Ok(Fitness {
        violation: (surrogate - instance.budget()).max(0.0),
        coverage,
    })
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverRun {
    pub solution: Solution,
    pub fitness: Fitness,
    pub evaluations: u64,
}

impl SolverRun {
    /// Best feasible coverage, or [`EPSILON`] when the run never held a
    /// feasible solution covering at least one node.
    pub fn objective(&self) -> f64 {
        if self.fitness.is_feasible() && self.fitness.coverage > 0 {
            self.fitness.coverage as f64
        } else {
            EPSILON
        }
    }
}

/// Probabilities of mutation strength `k = 1..=max(1, ⌊n/2⌋)`, proportional
/// to `k^(−β)`.
pub fn power_law_pmf(n: usize, beta: f64) -> Vec<f64> {
    let support = (n / 2).max(1);
    let weights: Vec<f64> = (1..=support).map(|k| (k as f64).powf(-beta)).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Selection plus incrementally maintained cover counts.
struct Incumbent<'a> {
    instance: &'a ChanceInstance,
    bits: Vec<bool>,
    cover: Vec<u32>,
    covered: usize,
}

impl<'a> Incumbent<'a> {
    fn empty(instance: &'a ChanceInstance) -> Self {
        let n = instance.node_count();
        Incumbent {
            instance,
            bits: vec![false; n],
            cover: vec![0; n],
            covered: 0,
        }
    }

    fn toggle(&mut self, v: usize) {
        let graph = self.instance.graph();
        let adding = !self.bits[v];
        self.bits[v] = adding;
        for u in std::iter::once(v).chain(graph.neighbors(v).iter().copied()) {
            if adding {
                self.cover[u] += 1;
                if self.cover[u] == 1 {
                    self.covered += 1;
                }
            } else {
                self.cover[u] -= 1;
                if self.cover[u] == 0 {
                    self.covered -= 1;
                }
            }
        }
    }

    fn fitness(&self) -> Fitness {
        let (mean, variance) = self.instance.cost_moments_unchecked(&self.bits);
        let surrogate = surrogate_from_moments(mean, variance, self.instance.alpha());
        Fitness {
            violation: (surrogate - self.instance.budget()).max(0.0),
            coverage: self.covered,
        }
    }
}

enum Mutation {
    Standard(Option<Binomial>),
    HeavyTailed(WeightedIndex<f64>),
    SingleFlip,
}

impl Mutation {
    fn new(config: &SolverConfig, n: usize) -> Self {
        match config.algorithm {
            Algorithm::Ea => Mutation::Standard(Binomial::new(n as u64, 1.0 / n as f64).ok()),
            Algorithm::Fga => {
                Mutation::HeavyTailed(WeightedIndex::new(power_law_pmf(n, config.beta)).expect("positive weights"))
            }
            Algorithm::Ghc => Mutation::SingleFlip,
        }
    }

    /// Distinct positions to flip. Independent per-bit flips are drawn as a
    /// binomial count followed by a uniform subset of that size.
    fn positions(&self, n: usize, rng: &mut Rng, out: &mut Vec<usize>) {
        out.clear();
        let count = match self {
            Mutation::Standard(b) => b.as_ref().map_or(0, |b| b.sample(rng) as usize),
            Mutation::HeavyTailed(strength) => {
                let k = strength.sample(rng) + 1;
                let p = (k as f64 / n as f64).min(1.0);
                Binomial::new(n as u64, p).map_or(0, |b| b.sample(rng) as usize)
            }
            Mutation::SingleFlip => {
                out.push(rng.random_range(0..n));
                return;
            }
        };
        out.extend(index::sample(rng, n, count));
    }
}

/// Run the configured solver, reporting the incumbent fitness after every
/// evaluation (including the initial one) to `observe`.
pub fn run_solver_observed(
    instance: &ChanceInstance,
    config: &SolverConfig,
    mut observe: impl FnMut(&Fitness),
) -> Result<SolverRun> {
    config.validate()?;
    let n = instance.node_count();
    let mut rng = rng_from(config.seed);
    let mutation = Mutation::new(config, n);

    let mut state = Incumbent::empty(instance);
    let mut best = state.fitness();
    let mut evaluations = 1;
    observe(&best);

    let mut flips = Vec::new();
    while evaluations < config.evaluation_budget {
        mutation.positions(n, &mut rng, &mut flips);
        for &v in &flips {
            state.toggle(v);
        }
        let candidate = state.fitness();
        evaluations += 1;
        if candidate.not_worse_than(&best) {
            best = candidate;
        } else {
            for &v in &flips {
                state.toggle(v);
            }
        }
        observe(&best);
    }

    Ok(SolverRun {
        solution: Solution::from_bits(state.bits),
        fitness: best,
        evaluations,
    })
}

pub fn run_solver(instance: &ChanceInstance, config: &SolverConfig) -> Result<SolverRun> {
    run_solver_observed(instance, config, |_| {})
}

pub fn run_one_plus_one_ea(instance: &ChanceInstance, evaluation_budget: u64, seed: u64) -> Result<SolverRun> {
    run_solver(instance, &SolverConfig::new(Algorithm::Ea, evaluation_budget, seed))
}

pub fn run_fga(instance: &ChanceInstance, evaluation_budget: u64, seed: u64, beta: f64) -> Result<SolverRun> {
    let config = SolverConfig {
        beta,
        ..SolverConfig::new(Algorithm::Fga, evaluation_budget, seed)
    };
    run_solver(instance, &config)
}

pub fn run_ghc(instance: &ChanceInstance, evaluation_budget: u64, seed: u64) -> Result<SolverRun> {
    run_solver(instance, &SolverConfig::new(Algorithm::Ghc, evaluation_budget, seed))
}

/// One run of the configured solver, reduced to its objective value.
pub fn best_objective(instance: &ChanceInstance, config: &SolverConfig) -> Result<f64> {
    Ok(run_solver(instance, config)?.objective())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CoverageGraph;
    use std::sync::Arc;

    fn path3(budget: f64) -> ChanceInstance {
        let g = Arc::new(CoverageGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap());
        ChanceInstance::new(g, vec![1.0; 3], vec![0.0; 3], budget, 0.05, 10.0).unwrap()
    }

    #[test]
    fn lexicographic_order() {
        let feasible = Fitness { violation: 0.0, coverage: 1 };
        let infeasible = Fitness { violation: 0.5, coverage: 100 };
        assert!(feasible.beats(&infeasible));
        assert!(!infeasible.beats(&feasible));
        let better = Fitness { violation: 0.0, coverage: 2 };
        assert!(better.beats(&feasible));
        assert!(feasible.not_worse_than(&feasible));
        let less_violating = Fitness { violation: 0.1, coverage: 0 };
        assert!(less_violating.beats(&infeasible));
    }

    #[test]
    fn fitness_violation() {
        let g = Arc::new(CoverageGraph::from_edges(2, []).unwrap());
        let inst = ChanceInstance::new(g, vec![60.0, 40.0], vec![16.0, 9.0], 121.0, 0.05, 100.0).unwrap();
        let f = evaluate_fitness(&inst, &Solution::empty(2)).unwrap();
        assert_eq!(f, Fitness { violation: 0.0, coverage: 0 });
        let f = evaluate_fitness(&inst, &Solution::full(2)).unwrap();
        assert!((f.violation - (475f64.sqrt() - 21.0)).abs() < 1e-12);
        assert!((f.violation - 0.7945).abs() < 1e-4);
        assert_eq!(f.coverage, 2);
    }

    #[test]
    fn power_law_ratio() {
        let pmf = power_law_pmf(10, 1.5);
        assert_eq!(pmf.len(), 5);
        assert!((pmf[0] / pmf[1] - 2f64.powf(1.5)).abs() < 1e-12);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(power_law_pmf(1, 1.5), vec![1.0]);
    }

    #[test]
    fn infeasible_singletons_keep_empty_start() {
        let inst = path3(0.5);
        for alg in [Algorithm::Ea, Algorithm::Fga, Algorithm::Ghc] {
            let run = run_solver(&inst, &SolverConfig::new(alg, 500, 3)).unwrap();
            assert_eq!(run.solution, Solution::empty(3), "{alg}");
            assert_eq!(run.objective(), EPSILON);
        }
    }

    #[test]
    fn ea_finds_path_optimum() {
        let inst = path3(100.0);
        let hits = (0..100)
            .filter(|&s| run_one_plus_one_ea(&inst, 10_000, s).unwrap().fitness.coverage == 3)
            .count();
        assert!(hits >= 95, "{hits}");
        assert_eq!(best_objective(&inst, &SolverConfig::new(Algorithm::Ea, 10_000, 0)).unwrap(), 3.0);
    }

    #[test]
    fn ghc_selects_single_feasible_node() {
        let g = Arc::new(CoverageGraph::from_edges(1, []).unwrap());
        let inst = ChanceInstance::new(g, vec![1.0], vec![0.0], 2.0, 0.05, 10.0).unwrap();
        for seed in 0..50 {
            let run = run_ghc(&inst, 10, seed).unwrap();
            assert_eq!(run.solution, Solution::full(1));
        }
    }

    #[test]
    fn budget_accounting_and_determinism() {
        let inst = path3(2.5);
        for alg in [Algorithm::Ea, Algorithm::Fga, Algorithm::Ghc] {
            let cfg = SolverConfig::new(alg, 137, 11);
            let mut seen = 0;
            let run = run_solver_observed(&inst, &cfg, |_| seen += 1).unwrap();
            assert_eq!(run.evaluations, 137);
            assert_eq!(seen, 137);
            assert_eq!(run, run_solver(&inst, &cfg).unwrap());
            assert_eq!(run.fitness, evaluate_fitness(&inst, &run.solution).unwrap());
        }
        assert!(run_solver(&inst, &SolverConfig::new(Algorithm::Ea, 0, 1)).is_err());
        let bad_beta = SolverConfig { beta: 1.0, ..SolverConfig::new(Algorithm::Fga, 5, 1) };
        assert!(run_solver(&inst, &bad_beta).is_err());
    }
}
