//! Chance-constrained instances: stochastic node costs over a fixed graph,
//! the Chebyshev surrogate constraint and the four scalar features.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CoverageGraph, GraphDoc};
use crate::seed::rng_from;
use crate::solution::Solution;

/// Which per-node cost vector an operation reads or writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostTarget {
    /// Expected costs.
    Mu,
    /// Cost variances.
    Var,
}

/// Scalar instance descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    /// Mean expected cost.
    Ft1,
    /// Mean cost variance.
    Ft2,
    /// Population standard deviation of expected costs.
    Ft3,
    /// Population standard deviation of cost variances.
    Ft4,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 4] = [FeatureKind::Ft1, FeatureKind::Ft2, FeatureKind::Ft3, FeatureKind::Ft4];

    pub fn target(self) -> CostTarget {
        match self {
            FeatureKind::Ft1 | FeatureKind::Ft3 => CostTarget::Mu,
            FeatureKind::Ft2 | FeatureKind::Ft4 => CostTarget::Var,
        }
    }

    /// Spread features are mutated with mean-preserving swaps; mean
    /// features with one-directional shifts.
    pub fn is_dependent(self) -> bool {
        matches!(self, FeatureKind::Ft3 | FeatureKind::Ft4)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Ft1 => "ft1",
            FeatureKind::Ft2 => "ft2",
            FeatureKind::Ft3 => "ft3",
            FeatureKind::Ft4 => "ft4",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown feature `{s}` (expected ft1|ft2|ft3|ft4)")))
    }
}

/// Budget used for freshly sampled instances: `n/30 · mu_max/2`.
pub fn default_budget(n: usize, mu_max: f64) -> f64 {
    n as f64 / 30.0 * mu_max / 2.0
}

/// Chebyshev surrogate of a cost distribution with the given total mean and
/// variance: `mean + sqrt(variance · (1 − α)/α)`.
pub fn surrogate_from_moments(mean: f64, variance: f64, alpha: f64) -> f64 {
    mean + (variance * (1.0 - alpha) / alpha).sqrt()
}

/// An instance of chance-constrained maximum coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct ChanceInstance {
    graph: Arc<CoverageGraph>,
    mu: Vec<f64>,
    var: Vec<f64>,
    budget: f64,
    alpha: f64,
    mu_max: f64,
}

impl ChanceInstance {
    pub fn new(
        graph: Arc<CoverageGraph>,
        mu: Vec<f64>,
        var: Vec<f64>,
        budget: f64,
        alpha: f64,
        mu_max: f64,
    ) -> Result<Self> {
        let inst = ChanceInstance {
            graph,
            mu,
            var,
            budget,
            alpha,
            mu_max,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Check every invariant, naming the first offending field.
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.node_count();
        if !(self.mu_max.is_finite() && self.mu_max > 0.0) {
            return Err(Error::validation("mu_max", None, "must be finite and positive"));
        }
        if !(self.budget.is_finite() && self.budget > 0.0) {
            return Err(Error::validation("budget", None, "must be finite and positive"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(Error::validation("alpha", None, "must lie in (0, 0.5]"));
        }
        let var_max = self.var_ceiling();
        for (name, values, ceiling) in [("mu", &self.mu, self.mu_max), ("var", &self.var, var_max)] {
            if values.len() != n {
                return Err(Error::validation(
                    name,
                    None,
                    format!("length {} does not match node count {n}", values.len()),
                ));
            }
            if let Some(i) = values.iter().position(|&x| !(x >= 0.0 && x <= ceiling)) {
                return Err(Error::validation(
                    name,
                    Some(i),
                    format!("value {} outside [0, {ceiling}]", values[i]),
                ));
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> &CoverageGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<CoverageGraph> {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn var(&self) -> &[f64] {
        &self.var
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu_max(&self) -> f64 {
        self.mu_max
    }

    /// Upper clamp for variances, `mu_max² / 3`.
    pub fn var_ceiling(&self) -> f64 {
        self.mu_max * self.mu_max / 3.0
    }

    pub fn values(&self, target: CostTarget) -> &[f64] {
        match target {
            CostTarget::Mu => &self.mu,
            CostTarget::Var => &self.var,
        }
    }

    pub fn ceiling(&self, target: CostTarget) -> f64 {
        match target {
            CostTarget::Mu => self.mu_max,
            CostTarget::Var => self.var_ceiling(),
        }
    }

    /// Callers must keep every value inside `[0, ceiling(target)]`.
    pub(crate) fn values_mut(&mut self, target: CostTarget) -> &mut [f64] {
        match target {
            CostTarget::Mu => &mut self.mu,
            CostTarget::Var => &mut self.var,
        }
    }

    fn check_len(&self, solution: &Solution) -> Result<()> {
        if solution.len() != self.node_count() {
            return Err(Error::Dimension {
                expected: self.node_count(),
                found: solution.len(),
            });
        }
        Ok(())
    }

    /// Total expected cost and total variance of the selected nodes, summed
    /// in index order.
    pub fn cost_moments(&self, solution: &Solution) -> Result<(f64, f64)> {
        self.check_len(solution)?;
        Ok(self.cost_moments_unchecked(solution.bits()))
    }

    pub(crate) fn cost_moments_unchecked(&self, bits: &[bool]) -> (f64, f64) {
        let mut mean = 0.0;
        let mut variance = 0.0;
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            mean += self.mu[i];
            variance += self.var[i];
        }
        (mean, variance)
    }

    pub fn surrogate_value(&self, solution: &Solution) -> Result<f64> {
        let (m, v) = self.cost_moments(solution)?;
        Ok(surrogate_from_moments(m, v, self.alpha))
    }

    /// Surrogate feasibility, which implies `Pr(cost > budget) ≤ α`.
    pub fn is_feasible(&self, solution: &Solution) -> Result<bool> {
        Ok(self.surrogate_value(solution)? <= self.budget)
    }

    pub fn feature(&self, kind: FeatureKind) -> f64 {
        let values = self.values(kind.target());
        if kind.is_dependent() {
            population_std(values)
        } else {
            mean(values)
        }
    }

    /// Sample a fresh instance: `mu[i] ~ U(0, mu_max)`, `var[i] ~ U(0, mu[i]²/3)`,
    /// budget from [`default_budget`].
    pub fn sample(graph: Arc<CoverageGraph>, seed: u64, mu_max: f64, alpha: f64) -> Result<Self> {
        if !(mu_max.is_finite() && mu_max > 0.0) {
            return Err(Error::Domain(format!("mu_max must be positive, got {mu_max}")));
        }
        let n = graph.node_count();
        let mut rng = rng_from(seed);
        let mut open_unit = || loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        };
        let mu: Vec<f64> = (0..n).map(|_| open_unit() * mu_max).collect();
        let var: Vec<f64> = mu.iter().map(|&m| open_unit() * m * m / 3.0).collect();
        Self::new(graph, mu, var, default_budget(n, mu_max), alpha, mu_max)
    }

    fn doc(&self, graph: GraphRef) -> InstanceDoc {
        InstanceDoc {
            graph,
            mu: self.mu.clone(),
            var: self.var.clone(),
            budget: self.budget,
            alpha: self.alpha,
            mu_max: self.mu_max,
        }
    }

    /// JSON document with the graph embedded.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.doc(GraphRef::Inline(self.graph.to_doc()))).expect("instance serializes")
    }

    /// JSON document referring to a graph file by (relative) path.
    pub fn to_json_with_graph_file(&self, graph_file: &str) -> String {
        serde_json::to_string(&self.doc(GraphRef::File(graph_file.to_owned()))).expect("instance serializes")
    }

    /// Parse an instance document. A graph given as a file reference is
    /// resolved against `base_dir` (or the working directory).
    pub fn from_json(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        let graph = match &doc.graph {
            GraphRef::Inline(g) => CoverageGraph::from_doc(g)?,
            GraphRef::File(f) => {
                let path = base_dir.map(|d| d.join(f)).unwrap_or_else(|| f.into());
                crate::io::read_graph(&path)?
            }
        };
        Self::from_doc_with_graph(doc, Arc::new(graph))
    }

    /// Parse an instance document using an already loaded graph, ignoring
    /// the document's own graph field.
    pub fn from_json_with_graph(text: &str, graph: Arc<CoverageGraph>) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        Self::from_doc_with_graph(doc, graph)
    }

    fn from_doc_with_graph(doc: InstanceDoc, graph: Arc<CoverageGraph>) -> Result<Self> {
        Self::new(graph, doc.mu, doc.var, doc.budget, doc.alpha, doc.mu_max)
    }

    /// Same instance with a different budget.
    pub fn with_budget(&self, budget: f64) -> Result<Self> {
        let mut out = self.clone();
        out.budget = budget;
        out.validate()?;
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum GraphRef {
    Inline(GraphDoc),
    File(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceDoc {
    graph: GraphRef,
    mu: Vec<f64>,
    var: Vec<f64>,
    budget: f64,
    alpha: f64,
    mu_max: f64,
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Standard deviation with divisor `n`.
pub(crate) fn population_std(values: &[f64]) -> f64 {
    if values.iter().all(|&v| v == values[0]) {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / values.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn edgeless(n: usize) -> Arc<CoverageGraph> {
        Arc::new(CoverageGraph::from_edges(n, []).unwrap())
    }

    fn inst(mu: Vec<f64>, var: Vec<f64>, budget: f64) -> ChanceInstance {
        let n = mu.len();
        ChanceInstance::new(edgeless(n), mu, var, budget, 0.05, 1000.0).unwrap()
    }

    #[test]
    fn surrogate_examples() {
        let i = inst(vec![60.0, 40.0, 7.0], vec![16.0, 9.0, 1.0], 121.0);
        assert_eq!(i.surrogate_value(&Solution::empty(3)).unwrap(), 0.0);
        let x = Solution::from_nodes(3, &[0, 1]);
        let expected = 100.0 + 475f64.sqrt();
        assert_relative_eq!(i.surrogate_value(&x).unwrap(), expected, max_relative = 1e-12);
        assert_relative_eq!(expected, 121.7945, epsilon = 1e-4);
        assert!(!i.is_feasible(&x).unwrap());
        assert!(i.with_budget(122.0).unwrap().is_feasible(&x).unwrap());
        assert!(i.with_budget(1.0).unwrap().is_feasible(&Solution::empty(3)).unwrap());

        let single = inst(vec![10.0], vec![0.0], 5.0);
        assert_eq!(single.surrogate_value(&Solution::full(1)).unwrap(), 10.0);
        assert!(matches!(i.surrogate_value(&Solution::empty(2)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn feature_examples() {
        let i = inst(vec![1.0, 2.0, 3.0], vec![5.0, 5.0, 5.0], 1.0);
        assert_eq!(i.feature(FeatureKind::Ft1), 2.0);
        assert_relative_eq!(i.feature(FeatureKind::Ft3), (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(i.feature(FeatureKind::Ft3), 0.81650, epsilon = 1e-5);
        assert_eq!(i.feature(FeatureKind::Ft2), 5.0);
        assert_eq!(i.feature(FeatureKind::Ft4), 0.0);
    }

    #[test]
    fn sampled_budget() {
        let g = edgeless(300);
        let i = ChanceInstance::sample(g, 1, 1000.0, 0.05).unwrap();
        assert_eq!(i.budget(), 5000.0);
        let i = ChanceInstance::sample(edgeless(205), 1, 1000.0, 0.05).unwrap();
        assert_relative_eq!(i.budget(), 3_416.666_666_666_667, epsilon = 1e-9);
    }

    #[test]
    fn validation_names_field_and_index() {
        let good = inst(vec![1.0, 2.0], vec![0.5, 0.5], 1.0);
        let text = good.to_json().replace("\"var\":[0.5,0.5]", "\"var\":[0.5,-1.0]");
        match ChanceInstance::from_json(&text, None) {
            Err(Error::Validation { field, index: Some(1), .. }) => assert_eq!(field, "var"),
            other => panic!("unexpected {other:?}"),
        }
        let text = good.to_json().replace("\"mu\":[1.0,2.0]", "\"mu\":[1.0]");
        match ChanceInstance::from_json(&text, None) {
            Err(Error::Validation { field, index: None, .. }) => assert_eq!(field, "mu"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(ChanceInstance::new(edgeless(1), vec![1.0], vec![0.0], 1.0, 0.6, 10.0).is_err());
        assert!(ChanceInstance::new(edgeless(1), vec![1.0], vec![0.0], 0.0, 0.05, 10.0).is_err());
        assert!(ChanceInstance::new(edgeless(1), vec![11.0], vec![0.0], 1.0, 0.05, 10.0).is_err());
        assert!(ChanceInstance::new(edgeless(1), vec![1.0], vec![34.0], 1.0, 0.05, 10.0).is_err());
    }

    #[test]
    fn feature_kind_parsing() {
        assert_eq!("FT3".parse::<FeatureKind>().unwrap(), FeatureKind::Ft3);
        assert!("ft5".parse::<FeatureKind>().is_err());
        assert_eq!(FeatureKind::Ft4.target(), CostTarget::Var);
    }

    proptest! {
        #[test]
        fn sampling_respects_bounds(seed in any::<u64>(), n in 1usize..60, mu_max in 1.0f64..5000.0) {
            let i = ChanceInstance::sample(edgeless(n), seed, mu_max, 0.05).unwrap();
            for k in 0..n {
                prop_assert!(i.mu()[k] > 0.0 && i.mu()[k] < mu_max);
                prop_assert!(i.var()[k] > 0.0 && i.var()[k] < i.mu()[k] * i.mu()[k] / 3.0);
            }
            prop_assert_eq!(&i, &ChanceInstance::sample(edgeless(n), seed, mu_max, 0.05).unwrap());
        }

        #[test]
        fn json_round_trip_is_exact(seed in any::<u64>(), n in 1usize..30) {
            let g = Arc::new(crate::graph::generate_random_graph(n, 0.3, seed).unwrap());
            let i = ChanceInstance::sample(g, seed, 1000.0, 0.05).unwrap();
            prop_assert_eq!(&ChanceInstance::from_json(&i.to_json(), None).unwrap(), &i);
        }

        #[test]
        fn surrogate_is_monotone(seed in any::<u64>(), mask in any::<u64>(), v in 0usize..20) {
            let i = ChanceInstance::sample(edgeless(20), seed, 1000.0, 0.05).unwrap();
            let mut s = Solution::from_mask(20, mask);
            let before = i.surrogate_value(&s).unwrap();
            s.set(v, true);
            prop_assert!(i.surrogate_value(&s).unwrap() >= before);
        }

        #[test]
        fn mean_features_are_homogeneous(seed in any::<u64>(), c in 0.01f64..1.0) {
            let i = ChanceInstance::sample(edgeless(25), seed, 1000.0, 0.05).unwrap();
            let scaled: Vec<f64> = i.mu().iter().map(|m| m * c).collect();
            let j = ChanceInstance::new(i.graph_arc().clone(), scaled, i.var().to_vec(), 1.0, 0.05, 1000.0).unwrap();
            prop_assert!((j.feature(FeatureKind::Ft1) - c * i.feature(FeatureKind::Ft1)).abs() <= 1e-9);
            prop_assert!((j.feature(FeatureKind::Ft3) - c * i.feature(FeatureKind::Ft3)).abs() <= 1e-9);
        }

        #[test]
        fn spread_is_zero_iff_constant(vals in proptest::collection::vec(0.0f64..100.0, 1..10)) {
            let n = vals.len();
            let i = inst(vals.clone(), vals.clone(), 1.0);
            let constant = vals.iter().all(|&v| v == vals[0]);
            prop_assert_eq!(i.feature(FeatureKind::Ft3) == 0.0, constant);
            prop_assert_eq!(i.feature(FeatureKind::Ft4) == 0.0, constant);
            prop_assert_eq!(n, i.node_count());
        }
    }
}
