//! Test-only oracles, written independently of the library's evaluation
//! paths.
#![allow(dead_code)]

use std::sync::Arc;

use ccdiv::{ChanceInstance, CoverageGraph, Solution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exhaustive optimum over all 2ⁿ subsets using closed-neighbourhood bit
/// masks. Returns (best feasible coverage, largest feasible cardinality).
pub fn brute_force(instance: &ChanceInstance) -> (usize, usize) {
    let n = instance.node_count();
    assert!(n <= 20);
    let g = instance.graph();
    let closed: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(1u32 << v, |m, &u| m | 1 << u))
        .collect();
    let alpha = instance.alpha();
    let factor = (1.0 - alpha) / alpha;
    let mut best = 0;
    let mut largest = 0;
    for mask in 0u32..(1 << n) {
        let mut covered = 0u32;
        let mut m = 0.0;
        let mut v = 0.0;
        for (i, &reach) in closed.iter().enumerate() {
            if mask >> i & 1 == 1 {
                covered |= reach;
                m += instance.mu()[i];
                v += instance.var()[i];
            }
        }
        if m + (v * factor).sqrt() <= instance.budget() {
            best = best.max(covered.count_ones() as usize);
            largest = largest.max(mask.count_ones() as usize);
        }
    }
    (best, largest)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random instance with a budget between 40% and 100% of the
/// surrogate cost of selecting everything.
pub fn small_instance(seed: u64, n: usize) -> ChanceInstance {
    let mut r = rng(seed);
    let graph = Arc::new(ccdiv::generate_random_graph(n, 0.3, r.random()).unwrap());
    let mu_max = 1000.0;
    let mu: Vec<f64> = (0..n).map(|_| r.random_range(1.0..mu_max)).collect();
    let var: Vec<f64> = mu.iter().map(|m| r.random_range(0.0..m * m / 3.0)).collect();
    let base = ChanceInstance::new(graph, mu, var, 1.0, 0.05, mu_max).unwrap();
    let all = base.surrogate_value(&Solution::full(n)).unwrap();
    base.with_budget(all * r.random_range(0.4..1.0)).unwrap()
}

/// Direct 1-based evaluation of the interior contribution sum.
pub fn set_diversity_oracle(f: &[f64]) -> f64 {
    let mu = f.len();
    let ft = |i: usize| f[i - 1];
    let mut total = 0.0;
    for i in 2..mu {
        let duplicated = (1..=mu).any(|k| k != i && ft(k) == ft(i));
        total += if duplicated {
            0.0
        } else {
            (ft(i) - ft(i - 1)) * (ft(i + 1) - ft(i))
        };
    }
    total
}

pub fn path_graph(n: usize) -> Arc<CoverageGraph> {
    Arc::new(CoverageGraph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap())
}
