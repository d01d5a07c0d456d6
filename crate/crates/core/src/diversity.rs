//! Feature-based diversity optimisation over populations of discriminating
//! instances.
//!
//! A population is kept sorted by one scalar feature. Each member's
//! contribution is the product of its feature gaps to the sorted neighbours;
//! the two extremes contribute `+∞` and members sharing a feature value with
//! another member contribute `0`. The steady-state loop mutates one parent
//! per iteration towards a better-balanced position, keeps the child only if
//! it still discriminates the solver pair, and then evicts a least
//! contributing member.

use std::sync::Arc;

use rand::Rng as _;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::CoverageGraph;
use crate::instance::{mean, ChanceInstance, CostTarget, FeatureKind};
use crate::ratio::discounted_ratio_with;
use crate::seed::{derive_rng, derive_seed, Rng};
use crate::solver::SolverConfig;

/// Resampling attempts allowed per swap when an update would leave
/// `[0, ceiling]`.
pub const SWAP_RESAMPLES: usize = 10;

fn check_sorted(features: &[f64]) -> Result<()> {
    if let Some(k) = features.windows(2).position(|w| !(w[0] <= w[1])) {
        return Err(Error::Contract(format!(
            "feature list not sorted ascending at position {}",
            k + 1
        )));
    }
    Ok(())
}

fn contribution_unchecked(features: &[f64], i: usize) -> f64 {
    let last = features.len() - 1;
    if i == 0 || i == last {
        return f64::INFINITY;
    }
    // sorted, so equal values are adjacent
    if features[i] == features[i - 1] || features[i] == features[i + 1] {
        return 0.0;
    }
    (features[i] - features[i - 1]) * (features[i + 1] - features[i])
}

/// Diversity contribution of member `i` of an ascending feature list.
pub fn contribution(sorted_features: &[f64], i: usize) -> Result<f64> {
    if sorted_features.len() < 2 {
        return Err(Error::Domain("a population needs at least 2 members".into()));
    }
    if i >= sorted_features.len() {
        return Err(Error::Domain(format!("index {i} out of range")));
    }
    check_sorted(sorted_features)?;
    Ok(contribution_unchecked(sorted_features, i))
}

/// Contributions of every member.
pub fn contributions(sorted_features: &[f64]) -> Result<Vec<f64>> {
    if sorted_features.len() < 2 {
        return Err(Error::Domain("a population needs at least 2 members".into()));
    }
    check_sorted(sorted_features)?;
    Ok((0..sorted_features.len())
        .map(|i| contribution_unchecked(sorted_features, i))
        .collect())
}

/// Sum of the interior contributions.
pub fn set_diversity(sorted_features: &[f64]) -> Result<f64> {
    if sorted_features.len() < 3 {
        return Err(Error::Domain(format!(
            "set diversity needs at least 3 members, got {}",
            sorted_features.len()
        )));
    }
    check_sorted(sorted_features)?;
    Ok((1..sorted_features.len() - 1)
        .map(|i| contribution_unchecked(sorted_features, i))
        .sum())
}

/// Whether a mutation should raise or lower the parent's feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }
}

/// Direction for member `j` (0-based) of an ascending feature list: up for
/// the maximum, down for the minimum, otherwise towards the wider gap (up
/// on a tie).
pub fn indicator(sorted_features: &[f64], j: usize) -> Direction {
    let last = sorted_features.len() - 1;
    let f = sorted_features;
    if j == last || (j != 0 && f[j] - f[j - 1] <= f[j + 1] - f[j]) {
        Direction::Up
    } else {
        Direction::Down
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationParams {
    /// Standard deviation of the per-node shift (mean features).
    pub sigma1: f64,
    /// Standard deviation of the swap amount (spread features).
    pub sigma2: f64,
    /// Poisson mean of the extra swap count.
    pub lambda: f64,
    pub target: CostTarget,
}

impl MutationParams {
    /// Defaults for a feature: shifts of σ=3 on expected costs and σ=100 on
    /// variances; swaps of σ=100 on expected costs and σ=3000 on variances;
    /// λ=5.
    pub fn for_feature(kind: FeatureKind) -> Self {
        let target = kind.target();
        let (sigma1, sigma2) = match target {
            CostTarget::Mu => (3.0, 100.0),
            CostTarget::Var => (100.0, 3000.0),
        };
        MutationParams {
            sigma1,
            sigma2,
            lambda: 5.0,
            target,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma1 > 0.0 && self.sigma2 > 0.0 && self.lambda > 0.0) {
            return Err(Error::Domain("sigma1, sigma2 and lambda must be positive".into()));
        }
        Ok(())
    }
}

/// Shift every targeted value by `direction · |δ|`, `δ ~ N(0, σ₁)`, clamped
/// to `[0, ceiling]`.
pub fn mutate_independent(
    instance: &ChanceInstance,
    direction: Direction,
    params: &MutationParams,
    rng: &mut Rng,
) -> Result<ChanceInstance> {
    params.validate()?;
    let normal = Normal::new(0.0, params.sigma1).map_err(|e| Error::Domain(e.to_string()))?;
    let ceiling = instance.ceiling(params.target);
    let mut child = instance.clone();
    for v in child.values_mut(params.target) {
        let delta: f64 = normal.sample(rng);
        *v = (*v + direction.sign() * delta.abs()).clamp(0.0, ceiling);
    }
    Ok(child)
}

/// Mean-preserving spread change.
///
/// Nodes are split once into `≤ mean` and `> mean`. `K = min(m + 1, |low|,
/// |high|)` swaps with `m ~ Pois(λ)` each move `|δ|`, `δ ~ N(0, σ₂)`, from a
/// low node to a high node (`Up`, spread grows) or back (`Down`). Nodes are
/// used at most once per call. A swap that would leave `[0, ceiling]` is
/// redrawn up to [`SWAP_RESAMPLES`] times and then skipped.
pub fn mutate_dependent(
    instance: &ChanceInstance,
    direction: Direction,
    params: &MutationParams,
    rng: &mut Rng,
) -> Result<ChanceInstance> {
    params.validate()?;
    let normal = Normal::new(0.0, params.sigma2).map_err(|e| Error::Domain(e.to_string()))?;
    let poisson = Poisson::new(params.lambda).map_err(|e| Error::Domain(e.to_string()))?;
    let ceiling = instance.ceiling(params.target);
    let mut child = instance.clone();
    let values = child.values_mut(params.target);

    let avg = mean(values);
    let (mut low, mut high): (Vec<usize>, Vec<usize>) = (0..values.len()).partition(|&i| values[i] <= avg);
    if low.is_empty() || high.is_empty() {
        return Ok(child);
    }
    let m: f64 = poisson.sample(rng);
    let swaps = (m as usize + 1).min(low.len()).min(high.len());

    for _ in 0..swaps {
        for _attempt in 0..=SWAP_RESAMPLES {
            let si = rng.random_range(0..low.len());
            let ti = rng.random_range(0..high.len());
            let delta: f64 = normal.sample(rng);
            let shift = direction.sign() * delta.abs();
            if apply_swap(values, low[si], high[ti], shift, ceiling) {
                low.swap_remove(si);
                high.swap_remove(ti);
                break;
            }
        }
    }
    Ok(child)
}

/// Move `shift` from node `s` to node `t` if both stay inside
/// `[0, ceiling]`.
fn apply_swap(values: &mut [f64], s: usize, t: usize, shift: f64, ceiling: f64) -> bool {
    let new_s = values[s] - shift;
    let new_t = values[t] + shift;
    let ok = (0.0..=ceiling).contains(&new_s) && (0.0..=ceiling).contains(&new_t);
    if ok {
        values[s] = new_s;
        values[t] = new_t;
    }
    ok
}

/// Apply the operator matching `kind`.
pub fn mutate(
    instance: &ChanceInstance,
    kind: FeatureKind,
    direction: Direction,
    params: &MutationParams,
    rng: &mut Rng,
) -> Result<ChanceInstance> {
    if kind.is_dependent() {
        mutate_dependent(instance, direction, params, rng)
    } else {
        mutate_independent(instance, direction, params, rng)
    }
}

/// Parent index (0-based) for a population of `len` sorted members: the
/// minimum, the maximum or a uniform interior member, each with
/// probability 1/3.
pub fn select_parent(len: usize, rng: &mut Rng) -> Result<usize> {
    if len < 3 {
        return Err(Error::Domain(format!("parent selection needs at least 3 members, got {len}")));
    }
    Ok(match rng.random_range(0..3u8) {
        0 => 0,
        1 => len - 1,
        _ => rng.random_range(1..len - 1),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub instance: ChanceInstance,
    pub feature: f64,
    pub r_prime: f64,
    pub contribution: f64,
}

/// Feature-sorted population with cached features, ratios and
/// contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    members: Vec<Member>,
    feature_kind: FeatureKind,
    threshold: f64,
}

impl Population {
    /// Sort `(instance, R′)` pairs by feature and cache contributions.
    /// Every R′ must reach `threshold`.
    pub fn new(entries: Vec<(ChanceInstance, f64)>, feature_kind: FeatureKind, threshold: f64) -> Result<Self> {
        if entries.len() < 3 {
            return Err(Error::Domain(format!(
                "a population needs at least 3 members, got {}",
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|(_, r)| !(*r >= threshold)) {
            return Err(Error::validation(
                "r_prime",
                Some(k),
                format!("{} is below threshold {threshold}", entries[k].1),
            ));
        }
        let mut members: Vec<Member> = entries
            .into_iter()
            .map(|(instance, r_prime)| Member {
                feature: instance.feature(feature_kind),
                instance,
                r_prime,
                contribution: 0.0,
            })
            .collect();
        members.sort_by(|a, b| a.feature.total_cmp(&b.feature));
        let mut pop = Population {
            members,
            feature_kind,
            threshold,
        };
        pop.refresh_contributions();
        Ok(pop)
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn feature_kind(&self) -> FeatureKind {
        self.feature_kind
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn features(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.feature).collect()
    }

    pub fn set_diversity(&self) -> f64 {
        set_diversity(&self.features()).expect("population holds at least 3 sorted members")
    }

    /// Same members re-sorted by a different feature.
    pub fn with_feature(&self, kind: FeatureKind) -> Result<Self> {
        let entries = self
            .members
            .iter()
            .map(|m| (m.instance.clone(), m.r_prime))
            .collect();
        Population::new(entries, kind, self.threshold)
    }

    fn refresh_contributions(&mut self) {
        let features = self.features();
        for (i, m) in self.members.iter_mut().enumerate() {
            m.contribution = contribution_unchecked(&features, i);
        }
    }

    /// Insert a child in sort order (after equal features), recompute all
    /// contributions, then evict one member of minimum contribution chosen
    /// uniformly among ties. Returns whether the child survived.
    pub fn insert_and_evict(&mut self, instance: ChanceInstance, r_prime: f64, rng: &mut Rng) -> bool {
        let feature = instance.feature(self.feature_kind);
        let pos = self.members.partition_point(|m| m.feature <= feature);
        self.members.insert(
            pos,
            Member {
                instance,
                feature,
                r_prime,
                contribution: 0.0,
            },
        );
        self.refresh_contributions();

        let min = self
            .members
            .iter()
            .map(|m| m.contribution)
            .fold(f64::INFINITY, f64::min);
        let ties: Vec<usize> = (0..self.members.len())
            .filter(|&i| self.members[i].contribution == min)
            .collect();
        let evict = ties[rng.random_range(0..ties.len())];
        self.members.remove(evict);
        self.refresh_contributions();
        evict != pos
    }

    /// Recompute everything from the instances and compare with the caches.
    pub fn check_invariants(&self) -> Result<()> {
        let features = self.features();
        check_sorted(&features)?;
        for (i, m) in self.members.iter().enumerate() {
            let fresh = m.instance.feature(self.feature_kind);
            if fresh != m.feature {
                return Err(Error::validation("feature", Some(i), format!("cached {} != {fresh}", m.feature)));
            }
            if !(m.r_prime >= self.threshold) {
                return Err(Error::validation(
                    "r_prime",
                    Some(i),
                    format!("{} below threshold {}", m.r_prime, self.threshold),
                ));
            }
        }
        let fresh = contributions(&features)?;
        for (i, (m, c)) in self.members.iter().zip(fresh).enumerate() {
            if m.contribution != c {
                return Err(Error::validation(
                    "contribution",
                    Some(i),
                    format!("cached {} != {c}", m.contribution),
                ));
            }
        }
        Ok(())
    }
}

/// Settings shared by the diversity loop and the conventional baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSettings {
    pub alg1: SolverConfig,
    pub alg2: SolverConfig,
    pub runs: usize,
    pub theta: f64,
    pub exec: Exec,
}

impl RatioSettings {
    pub fn r_prime(&self, instance: &ChanceInstance, seed: u64) -> Result<f64> {
        Ok(discounted_ratio_with(instance, &self.alg1, &self.alg2, self.runs, self.theta, seed, self.exec)?.discounted)
    }
}

/// One generation of the diversity loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub accepted: bool,
    pub child_feature: f64,
    pub child_r_prime: f64,
    pub set_diversity_after: f64,
}

/// Steady-state diversity loop, `iterations` generated children.
///
/// `observe` sees the record and the population after every generation.
pub fn evolve_diverse(
    initial: Population,
    ratio: &RatioSettings,
    params: &MutationParams,
    iterations: u64,
    seed: u64,
    mut observe: impl FnMut(&IterationRecord, &Population),
) -> Result<Population> {
    params.validate()?;
    if params.target != initial.feature_kind.target() {
        return Err(Error::Usage(format!(
            "mutation target {:?} does not match feature {}",
            params.target, initial.feature_kind
        )));
    }
    let mut pop = initial;
    let kind = pop.feature_kind;
    let mut rng = derive_rng(seed, "evolve", 0);

    for iteration in 0..iterations {
        let features = pop.features();
        let parent = select_parent(pop.len(), &mut rng)?;
        let direction = indicator(&features, parent);
        let child = mutate(&pop.members[parent].instance, kind, direction, params, &mut rng)?;
        let child_feature = child.feature(kind);
        let child_r_prime = ratio.r_prime(&child, derive_seed(seed, "ratio", iteration))?;

        let accepted = child_r_prime >= pop.threshold;
        if accepted {
            pop.insert_and_evict(child, child_r_prime, &mut rng);
        }
        let record = IterationRecord {
            iteration,
            accepted,
            child_feature,
            child_r_prime,
            set_diversity_after: pop.set_diversity(),
        };
        observe(&record, &pop);
    }
    Ok(pop)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConventionalSettings {
    pub iterations: u64,
    pub mu_max: f64,
    pub alpha: f64,
    /// Noise on expected costs per step.
    pub sigma_mu: f64,
    /// Noise on variances per step.
    pub sigma_var: f64,
}

impl ConventionalSettings {
    pub fn new(iterations: u64, mu_max: f64, alpha: f64) -> Self {
        ConventionalSettings {
            iterations,
            mu_max,
            alpha,
            sigma_mu: 3.0,
            sigma_var: 100.0,
        }
    }
}

/// Result of the single-instance baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct ConventionalResult {
    pub instance: ChanceInstance,
    pub r_prime: f64,
    /// Incumbent R′ after the initial evaluation and after every step.
    pub trajectory: Vec<f64>,
}

/// (1+1) EA over instance space maximising R′ for one instance, without any
/// population-level diversity pressure.
pub fn evolve_conventional(
    graph: Arc<CoverageGraph>,
    ratio: &RatioSettings,
    settings: &ConventionalSettings,
    seed: u64,
) -> Result<ConventionalResult> {
    let mut parent = ChanceInstance::sample(graph, derive_seed(seed, "sample", 0), settings.mu_max, settings.alpha)?;
    let mut parent_r = ratio.r_prime(&parent, derive_seed(seed, "ratio", 0))?;
    let mut trajectory = vec![parent_r];

    let mu_noise = Normal::new(0.0, settings.sigma_mu).map_err(|e| Error::Domain(e.to_string()))?;
    let var_noise = Normal::new(0.0, settings.sigma_var).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = derive_rng(seed, "perturb", 0);

    for step in 1..=settings.iterations {
        let mut child = parent.clone();
        for target in [CostTarget::Mu, CostTarget::Var] {
            let (noise, ceiling) = match target {
                CostTarget::Mu => (&mu_noise, child.mu_max()),
                CostTarget::Var => (&var_noise, child.var_ceiling()),
            };
            for v in child.values_mut(target) {
                *v = (*v + noise.sample(&mut rng)).clamp(0.0, ceiling);
            }
        }
        let child_r = ratio.r_prime(&child, derive_seed(seed, "ratio", step))?;
        if child_r >= parent_r {
            parent = child;
            parent_r = child_r;
        }
        trajectory.push(parent_r);
    }
    Ok(ConventionalResult {
        instance: parent,
        r_prime: parent_r,
        trajectory,
    })
}
