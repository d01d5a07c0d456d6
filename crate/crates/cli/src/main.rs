use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ccdiv::instance::FeatureKind;
use ccdiv::io::read_to_string;
use ccdiv::runner::{self, Pair, RunConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ccdiv", version, about = "Evolve diverse discriminating chance-constrained coverage instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a G(n, p) random graph as canonical JSON.
    RandomGraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evolve an initial population of discriminating instances.
    GenInitial(RunArgs),
    /// Run the diversity loop on a population checkpoint.
    Evolve {
        #[arg(long)]
        population: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Discounted performance ratio of one instance.
    Ratio {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Feature summaries and box-plot statistics of population checkpoints.
    Report {
        #[arg(required = true)]
        populations: Vec<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scaled-down preset for quick runs.
    #[arg(long)]
    desk: bool,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    random_n: Option<usize>,
    #[arg(long)]
    random_p: Option<f64>,
    #[arg(long)]
    graph_seed: Option<u64>,
    #[arg(long)]
    pair: Option<Pair>,
    #[arg(long)]
    feature: Option<FeatureKind>,
    #[arg(long)]
    mu: Option<usize>,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    conv_iterations: Option<u64>,
    #[arg(long)]
    solver_evals: Option<u64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    mu_max: Option<f64>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(self) -> ccdiv::Result<RunConfig> {
        let mut cfg = if self.desk { RunConfig::desk() } else { RunConfig::default() };
        if let Some(path) = &self.config {
            cfg = cfg.overlay_json(&read_to_string(path)?)?;
        }
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        macro_rules! set_opt {
            ($($field:ident),*) => { $( if self.$field.is_some() { cfg.$field = self.$field; } )* };
        }
        set!(random_p, graph_seed, mu, iterations, conv_iterations, solver_evals, r, theta, alpha, mu_max, lambda, beta, seed);
        set_opt!(graph, random_n, pair, feature, sigma1, sigma2, output_dir);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> ccdiv::Result<()> {
    match cli.command {
        Command::RandomGraph { n, p, seed, out } => {
            let g = runner::cmd_random_graph(n, p, seed, &out)?;
            println!("nodes {} edges {}", g.node_count(), g.edge_count());
        }
        Command::GenInitial(args) => {
            let cfg = args.resolve()?;
            let out = runner::cmd_gen_initial(&cfg)?;
            let m = &out.manifest;
            println!(
                "wrote {} members to {} (pair {}, feature {}, threshold {:.6}, D_s {})",
                m.members.len(),
                out.dir.display(),
                m.pair,
                m.feature_kind,
                m.threshold,
                m.d_s
            );
        }
        Command::Evolve { population, run } => {
            let cfg = run.resolve()?;
            let out = runner::cmd_evolve(&cfg, &population)?;
            println!("initial D_s {}", out.initial_d_s);
            println!("final D_s {}", out.final_d_s);
            println!("accepted {} of {}", out.accepted, cfg.iterations);
        }
        Command::Ratio { instance, run } => {
            let cfg = run.resolve()?;
            let report = runner::cmd_ratio(&cfg, &instance)?;
            eprintln!("R' = {}", report.discounted);
            println!("{}", report.to_json_pretty());
        }
        Command::Report { populations, out_dir } => {
            let report = runner::cmd_report(&populations, out_dir.as_deref())?;
            print!("{}", runner::report::write_csv(&report.summary)?);
            if let Some(dir) = out_dir {
                print_written(&dir);
            }
        }
    }
    Ok(())
}

fn print_written(dir: &Path) {
    eprintln!(
        "wrote {} and {}",
        dir.join(runner::SUMMARY_FILE).display(),
        dir.join(runner::BOX_FILE).display()
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
