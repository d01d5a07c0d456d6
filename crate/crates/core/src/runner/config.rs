use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diversity::{ConventionalSettings, MutationParams, RatioSettings};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{generate_random_graph, CoverageGraph};
use crate::instance::FeatureKind;
use crate::solver::{Algorithm, SolverConfig, DEFAULT_BETA};

/// Solver pair: the first is expected to win.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    #[serde(rename = "ea-fga")]
    EaFga,
    #[serde(rename = "ea-ghc")]
    EaGhc,
}

impl Pair {
    pub fn algorithms(self) -> (Algorithm, Algorithm) {
        match self {
            Pair::EaFga => (Algorithm::Ea, Algorithm::Fga),
            Pair::EaGhc => (Algorithm::Ea, Algorithm::Ghc),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pair::EaFga => "ea-fga",
            Pair::EaGhc => "ea-ghc",
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ea-fga" => Ok(Pair::EaFga),
            "ea-ghc" => Ok(Pair::EaGhc),
            _ => Err(Error::Usage(format!("unknown pair `{s}` (expected ea-fga|ea-ghc)"))),
        }
    }
}

/// Every experiment constant. Missing fields in a JSON config take the
/// defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Graph file (`.mtx` or canonical JSON). Takes precedence over the
    /// random-graph fields.
    pub graph: Option<PathBuf>,
    pub random_n: Option<usize>,
    pub random_p: f64,
    pub graph_seed: u64,
    /// Defaults to `ea-fga` for new populations, to the checkpoint's pair
    /// otherwise.
    pub pair: Option<Pair>,
    /// Defaults to `ft1` for new populations, to the checkpoint's feature
    /// otherwise.
    pub feature: Option<FeatureKind>,
    /// Population size.
    pub mu: usize,
    /// Generations of the diversity loop.
    pub iterations: u64,
    /// Steps of the single-instance baseline per member.
    pub conv_iterations: u64,
    pub solver_evals: u64,
    pub r: usize,
    pub theta: f64,
    pub alpha: f64,
    pub mu_max: f64,
    /// Unset: 3 for expected costs, 100 for variances.
    pub sigma1: Option<f64>,
    /// Unset: 100 for expected costs, 3000 for variances.
    pub sigma2: Option<f64>,
    pub lambda: f64,
    pub beta: f64,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            graph: None,
            random_n: None,
            random_p: 0.1,
            graph_seed: 0,
            pair: None,
            feature: None,
            mu: 20,
            iterations: 10_000,
            conv_iterations: 1_000,
            solver_evals: 10_000,
            r: 10,
            theta: 0.9,
            alpha: 0.05,
            mu_max: 1000.0,
            sigma1: None,
            sigma2: None,
            lambda: 5.0,
            beta: DEFAULT_BETA,
            seed: 0,
            output_dir: None,
        }
    }
}

impl RunConfig {
    /// Scaled-down preset: random graph n=50, p=0.1, μ=10, 2000 solver
    /// evaluations, 500 generations, 300 baseline steps.
    pub fn desk() -> Self {
        RunConfig {
            random_n: Some(50),
            random_p: 0.1,
            mu: 10,
            iterations: 500,
            conv_iterations: 200,
            solver_evals: 2_000,
            ..RunConfig::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        Ok(cfg)
    }

    /// Overlay the keys present in a JSON config document onto `self`.
    pub fn overlay_json(&self, text: &str) -> Result<Self> {
        let overlay: serde_json::Value = serde_json::from_str(text)?;
        let serde_json::Value::Object(overlay) = overlay else {
            return Err(Error::Usage("config file must hold a JSON object".into()));
        };
        let mut base = serde_json::to_value(self)?;
        let map = base.as_object_mut().expect("config serializes to an object");
        for (k, v) in overlay {
            map.insert(k, v);
        }
        Ok(serde_json::from_value(base)?)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mu_max", self.mu_max),
            ("alpha", self.alpha),
            ("theta", self.theta),
            ("lambda", self.lambda),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(name, None, "must be positive"));
            }
        }
        for (name, v) in [("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if let Some(v) = v.filter(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::validation(name, None, format!("must be positive, got {v}")));
            }
        }
        if self.mu < 3 {
            return Err(Error::validation("mu", None, "population size must be at least 3"));
        }
        if self.r < 2 {
            return Err(Error::validation("r", None, "at least 2 runs are needed"));
        }
        if self.solver_evals == 0 {
            return Err(Error::validation("solver_evals", None, "must be positive"));
        }
        if !(self.theta > 0.5 && self.theta < 1.0) {
            return Err(Error::validation("theta", None, "must lie in (0.5, 1)"));
        }
        if self.alpha > 0.5 {
            return Err(Error::validation("alpha", None, "must lie in (0, 0.5]"));
        }
        if !(self.beta > 1.0) {
            return Err(Error::validation("beta", None, "must exceed 1"));
        }
        if !(0.0..=1.0).contains(&self.random_p) {
            return Err(Error::validation("random_p", None, "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// The configured graph: a file if given, else a random graph.
    pub fn load_graph(&self) -> Result<Arc<CoverageGraph>> {
        let graph = match (&self.graph, self.random_n) {
            (Some(path), _) => crate::io::read_graph(path)?,
            (None, Some(n)) => generate_random_graph(n, self.random_p, self.graph_seed)?,
            (None, None) => return Err(Error::Usage("no graph given (use --graph or --random-n)".into())),
        };
        Ok(Arc::new(graph))
    }

    pub fn solver_pair(&self, pair: Pair) -> (SolverConfig, SolverConfig) {
        let (a1, a2) = pair.algorithms();
        let cfg = |a| SolverConfig {
            beta: self.beta,
            ..SolverConfig::new(a, self.solver_evals, 0)
        };
        (cfg(a1), cfg(a2))
    }

    pub fn ratio_settings(&self, pair: Pair) -> RatioSettings {
        let (alg1, alg2) = self.solver_pair(pair);
        RatioSettings {
            alg1,
            alg2,
            runs: self.r,
            theta: self.theta,
            exec: Exec::default(),
        }
    }

    pub fn conventional_settings(&self) -> ConventionalSettings {
        ConventionalSettings::new(self.conv_iterations, self.mu_max, self.alpha)
    }

    pub fn mutation_params(&self, feature: FeatureKind) -> MutationParams {
        let defaults = MutationParams::for_feature(feature);
        MutationParams {
            sigma1: self.sigma1.unwrap_or(defaults.sigma1),
            sigma2: self.sigma2.unwrap_or(defaults.sigma2),
            lambda: self.lambda,
            target: defaults.target,
        }
    }
}
