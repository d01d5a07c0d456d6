//! Evolving diverse sets of benchmark instances for chance-constrained
//! maximum coverage, where every instance separates a pair of heuristic
//! solvers.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diversity;
pub mod error;
pub mod exec;
pub mod graph;
pub mod instance;
pub mod io;
pub mod ratio;
pub mod runner;
pub mod seed;
pub mod solution;
pub mod solver;

pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{coverage_count, generate_random_graph, load_matrix_market, CoverageGraph};
pub use instance::{ChanceInstance, CostTarget, FeatureKind};
pub use ratio::{discounted_ratio, k_theta, threshold_from, RatioReport};
pub use solution::Solution;
pub use solver::{Algorithm, Fitness, SolverConfig};
