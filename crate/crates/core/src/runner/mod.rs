//! Batch commands behind the `ccdiv` binary. Each command is a pure
//! function of its configuration and seed; files are written only after all
//! computation has finished.

pub mod checkpoint;
pub mod config;
pub mod report;

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diversity::{evolve_conventional, evolve_diverse, IterationRecord, Population};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{generate_random_graph, CoverageGraph};
use crate::instance::{ChanceInstance, FeatureKind};
use crate::io::{read_to_string, write_graph, write_string};
use crate::ratio::{discounted_ratio_with, threshold_from, RatioReport};
use crate::seed::derive_seed;

pub use checkpoint::{read_checkpoint, write_checkpoint, Manifest};
pub use config::{Pair, RunConfig};
pub use report::{BoxRow, SummaryRow};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const BOX_FILE: &str = "box_stats.csv";

fn output_dir(cfg: &RunConfig) -> Result<&Path> {
    cfg.output_dir
        .as_deref()
        .ok_or_else(|| Error::Usage("an output directory is required (--output-dir)".into()))
}

pub fn cmd_random_graph(n: usize, p: f64, seed: u64, out: &Path) -> Result<CoverageGraph> {
    let graph = generate_random_graph(n, p, seed)?;
    write_graph(out, &graph)?;
    Ok(graph)
}

/// Outcome of [`cmd_gen_initial`].
#[derive(Debug, Clone)]
pub struct GenInitial {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

/// Evolve `mu` discriminating instances independently with the baseline
/// (1+1) EA and store them as a checkpoint with threshold derived from the
/// smallest member R′.
pub fn cmd_gen_initial(cfg: &RunConfig) -> Result<GenInitial> {
    cfg.validate()?;
    let dir = output_dir(cfg)?;
    let pair = cfg.pair.unwrap_or(Pair::EaFga);
    let feature = cfg.feature.unwrap_or(FeatureKind::Ft1);
    let graph = cfg.load_graph()?;
    let ratio = cfg.ratio_settings(pair);
    let settings = cfg.conventional_settings();

    let results = Exec::default().map_indexed(cfg.mu, |k| {
        evolve_conventional(graph.clone(), &ratio, &settings, derive_seed(cfg.seed, "member", k as u64))
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let failed: Vec<String> = results
        .iter()
        .enumerate()
        .filter(|(_, r)| !(r.r_prime > 1.0))
        .map(|(k, r)| format!("member {k} (R' = {:.6})", r.r_prime))
        .collect();
    if !failed.is_empty() {
        return Err(Error::Generation(format!(
            "{} of {} members are not discriminating after {} steps: {}",
            failed.len(),
            cfg.mu,
            cfg.conv_iterations,
            failed.join(", ")
        )));
    }
    let min_r = results.iter().map(|r| r.r_prime).fold(f64::INFINITY, f64::min);
    let threshold = threshold_from(min_r)?;
    let entries = results.into_iter().map(|r| (r.instance, r.r_prime)).collect();
    let population = Population::new(entries, feature, threshold)?;
    let manifest = write_checkpoint(dir, &population, pair, 0, cfg.seed)?;
    Ok(GenInitial {
        dir: dir.to_owned(),
        manifest,
    })
}

/// Outcome of [`cmd_evolve`].
#[derive(Debug, Clone)]
pub struct Evolved {
    pub initial_d_s: f64,
    pub final_d_s: f64,
    pub accepted: u64,
    pub manifest: Manifest,
}

#[derive(Serialize)]
struct TrajectoryRow {
    iteration: u64,
    accepted: u8,
    child_feature: f64,
    child_r_prime: f64,
    #[serde(rename = "D_s_after")]
    d_s_after: f64,
}

pub fn cmd_evolve(cfg: &RunConfig, population_dir: &Path) -> Result<Evolved> {
    cmd_evolve_observed(cfg, population_dir, |_, _| {})
}

/// [`cmd_evolve`] with a hook called after every generation.
pub fn cmd_evolve_observed(
    cfg: &RunConfig,
    population_dir: &Path,
    mut observe: impl FnMut(&IterationRecord, &Population),
) -> Result<Evolved> {
    cfg.validate()?;
    let out = output_dir(cfg)?;
    let (mut population, manifest) = read_checkpoint(population_dir)?;
    if let Some(pair) = cfg.pair.filter(|p| *p != manifest.pair) {
        return Err(Error::Usage(format!(
            "population was generated for pair {}, not {pair}",
            manifest.pair
        )));
    }
    if let Some(kind) = cfg.feature.filter(|k| *k != population.feature_kind()) {
        population = population.with_feature(kind)?;
    }
    let kind = population.feature_kind();
    let ratio = cfg.ratio_settings(manifest.pair);
    let params = cfg.mutation_params(kind);
    let initial_d_s = population.set_diversity();

    let mut rows = Vec::with_capacity(cfg.iterations as usize);
    let mut accepted = 0;
    let population = evolve_diverse(population, &ratio, &params, cfg.iterations, cfg.seed, |rec, pop| {
        accepted += u64::from(rec.accepted);
        rows.push(TrajectoryRow {
            iteration: rec.iteration,
            accepted: u8::from(rec.accepted),
            child_feature: rec.child_feature,
            child_r_prime: rec.child_r_prime,
            d_s_after: rec.set_diversity_after,
        });
        observe(rec, pop);
    })?;

    let final_d_s = population.set_diversity();
    let manifest = write_checkpoint(out, &population, manifest.pair, manifest.iteration + cfg.iterations, cfg.seed)?;
    write_string(&out.join(TRAJECTORY_FILE), &report::write_csv(&rows)?)?;
    Ok(Evolved {
        initial_d_s,
        final_d_s,
        accepted,
        manifest,
    })
}

/// Discounted ratio of one instance file. The pair defaults to `ea-fga`.
pub fn cmd_ratio(cfg: &RunConfig, instance_path: &Path) -> Result<RatioReport> {
    cfg.validate()?;
    let text = read_to_string(instance_path)?;
    let instance = ChanceInstance::from_json(&text, instance_path.parent())?;
    let (a1, a2) = cfg.solver_pair(cfg.pair.unwrap_or(Pair::EaFga));
    let report = discounted_ratio_with(&instance, &a1, &a2, cfg.r, cfg.theta, cfg.seed, Exec::default())?;
    if let Some(dir) = &cfg.output_dir {
        write_string(&dir.join("ratio.json"), &report.to_json_pretty())?;
    }
    Ok(report)
}

/// Outcome of [`cmd_report`].
#[derive(Debug, Clone)]
pub struct Report {
    pub summary: Vec<SummaryRow>,
    pub boxes: Vec<BoxRow>,
}

/// Summaries for several checkpoints sharing one feature kind, labelled by
/// directory name. Features are recomputed from the member files and must
/// match the caches.
pub fn cmd_report(population_dirs: &[PathBuf], out_dir: Option<&Path>) -> Result<Report> {
    if population_dirs.is_empty() {
        return Err(Error::Usage("no population directories given".into()));
    }
    let mut kind = None;
    let mut summary = Vec::new();
    let mut boxes = Vec::new();
    for dir in population_dirs {
        let (population, _) = read_checkpoint(dir)?;
        let k = population.feature_kind();
        match kind {
            None => kind = Some(k),
            Some(prev) if prev != k => {
                return Err(Error::Usage(format!(
                    "mixed feature kinds: {prev} and {k} ({})",
                    dir.display()
                )))
            }
            _ => {}
        }
        let fresh: Vec<f64> = population.members().iter().map(|m| m.instance.feature(k)).collect();
        let label = dir
            .file_name()
            .map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
        let (s, b) = report::summarize(&label, k.as_str(), &fresh)?;
        summary.push(s);
        boxes.push(b);
    }
    if let Some(out) = out_dir {
        write_string(&out.join(SUMMARY_FILE), &report::write_csv(&summary)?)?;
        write_string(&out.join(BOX_FILE), &report::write_csv(&boxes)?)?;
    }
    Ok(Report { summary, boxes })
}
