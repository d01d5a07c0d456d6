//! Discounted performance ratio between two solvers on one instance.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::instance::ChanceInstance;
use crate::seed::derive_seed;
use crate::solver::{best_objective, SolverConfig};

/// Discount factor for confidence level `theta`: the standard normal
/// quantile `Φ⁻¹(θ)`.
pub fn k_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.5 && theta < 1.0) {
        return Err(Error::Domain(format!("confidence level {theta} outside (0.5, 1)")));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(theta))
}

/// Per-run objectives of both solvers and the statistics derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub per_run_a1: Vec<f64>,
    pub per_run_a2: Vec<f64>,
    pub ratios: Vec<f64>,
    pub mean_ratio: f64,
    /// Sample standard deviation (divisor `r − 1`).
    pub std_ratio: f64,
    pub theta: f64,
    pub k_theta: f64,
    /// `mean_ratio − k_theta · std_ratio`.
    pub discounted: f64,
}

impl RatioReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Statistics over paired per-run objectives.
    pub fn from_objectives(per_run_a1: Vec<f64>, per_run_a2: Vec<f64>, theta: f64) -> Result<Self> {
        if per_run_a1.len() != per_run_a2.len() {
            return Err(Error::Dimension {
                expected: per_run_a1.len(),
                found: per_run_a2.len(),
            });
        }
        let ratios: Vec<f64> = per_run_a1.iter().zip(&per_run_a2).map(|(a, b)| a / b).collect();
        let (mean_ratio, std_ratio) = mean_and_sample_std(&ratios)?;
        let k = k_theta(theta)?;
        Ok(RatioReport {
            per_run_a1,
            per_run_a2,
            ratios,
            mean_ratio,
            std_ratio,
            theta,
            k_theta: k,
            discounted: mean_ratio - k * std_ratio,
        })
    }
}

fn mean_and_sample_std(values: &[f64]) -> Result<(f64, f64)> {
    let r = values.len();
    if r < 2 {
        return Err(Error::Domain(format!("at least 2 runs are needed, got {r}")));
    }
    let mean = values.iter().sum::<f64>() / r as f64;
    let std = if values.iter().all(|&v| v == values[0]) {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1) as f64).sqrt()
    };
    Ok((mean, std))
}

/// Seed of run `run` of `config`'s algorithm under master seed `seed`.
///
/// Depends only on the algorithm, so swapping the pair swaps the runs.
pub fn run_seed(seed: u64, run: usize, config: &SolverConfig) -> u64 {
    derive_seed(seed, config.algorithm.tag(), run as u64)
}

/// Run both solvers `r` times and pair run `i` of one with run `i` of the
/// other. The configs' own seeds are replaced by [`run_seed`].
pub fn discounted_ratio(
    instance: &ChanceInstance,
    alg1: &SolverConfig,
    alg2: &SolverConfig,
    r: usize,
    theta: f64,
    seed: u64,
) -> Result<RatioReport> {
    discounted_ratio_with(instance, alg1, alg2, r, theta, seed, Exec::default())
}

pub fn discounted_ratio_with(
    instance: &ChanceInstance,
    alg1: &SolverConfig,
    alg2: &SolverConfig,
    r: usize,
    theta: f64,
    seed: u64,
    exec: Exec,
) -> Result<RatioReport> {
    if r < 2 {
        return Err(Error::Domain(format!("at least 2 runs are needed, got {r}")));
    }
    k_theta(theta)?;
    alg1.validate()?;
    alg2.validate()?;

    // Runs 0..r belong to alg1, r..2r to alg2.
    let objectives = exec.map_indexed(2 * r, |k| {
        let (cfg, run) = if k < r { (alg1, k) } else { (alg2, k - r) };
        best_objective(instance, &cfg.with_seed(run_seed(seed, run, cfg)))
    });
    let objectives = objectives.into_iter().collect::<Result<Vec<f64>>>()?;
    let (a1, a2) = objectives.split_at(r);
    RatioReport::from_objectives(a1.to_vec(), a2.to_vec(), theta)
}

/// Acceptance threshold kept above 1: `0.8 · (R′ − 1) + 1`.
pub fn threshold_from(r_prime_baseline: f64) -> Result<f64> {
    if !(r_prime_baseline > 1.0) {
        return Err(Error::Domain(format!(
            "baseline ratio {r_prime_baseline} is not discriminating (must exceed 1)"
        )));
    }
    Ok(0.8 * (r_prime_baseline - 1.0) + 1.0)
}
