//! Benchmark CLI: solve single lot-sizing instances or run experiment
//! sweeps defined by a JSON config, emitting per-run CSV and aggregate
//! JSON.

use anyhow::{bail, Context, Result};
use arpsolve::lotsizing::{
    self, run_experiment, solve_nominal, solve_robust, CostMode, ExperimentConfig,
    LotSizingInstance, RunRecord, NOMINAL_RADIUS_CUTOFF,
};
use arpsolve::pdps::PdpsConfig;
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "arpsolve",
    about = "Two-stage adjustable robust lot-sizing solver (primal-dual proximal splitting with SDP projections)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Linear,
    Quartic,
    Randomized,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance: robust model plus nominal benchmark.
    Solve {
        /// Model family; only the lot-sizing benchmark is built in.
        #[arg(long, default_value = "lotsizing")]
        model: String,
        /// Number of stores.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Storage cost structure.
        #[arg(long, value_enum, default_value_t = CostArg::Linear)]
        cost: CostArg,
        /// Ball radius parameter (squared-norm bound); 0 solves the
        /// nominal model.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Decision-rule mix (affine weight).
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// Stopping tolerance of the splitting iteration.
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        /// Seed for the power-method start vector and randomized costs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path for the run record (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment sweep from a JSON config file.
    Experiment {
        /// Path to the config (see ExperimentConfig; keys: experiment,
        /// n_list, r_grid, runs, seed, eps, output).
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve { model, n, cost, r, rho, eps, seed, out } => {
            if model != "lotsizing" {
                bail!("unknown model '{model}'; available: lotsizing");
            }
            let mut inst = match cost {
                CostArg::Linear => LotSizingInstance::fixed_linear(n),
                CostArg::Quartic => LotSizingInstance::fixed_quartic(n),
                CostArg::Randomized => {
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    LotSizingInstance::randomized_linear(n, &mut rng)
                }
            };
            inst.radius_sq = r;
            inst.rho = rho;
            let cfg = PdpsConfig { eps, seed, ..Default::default() };

            let (_, nominal) = solve_nominal(&inst, &cfg).context("nominal solve failed")?;
            let record = if r < NOMINAL_RADIUS_CUTOFF {
                println!("r = {r} below cutoff; reporting the nominal model");
                RunRecord {
                    n,
                    r,
                    seed,
                    objective: nominal,
                    nominal,
                    por_percent: 0.0,
                    iterations: 0,
                    wall_time_s: 0.0,
                    status: "nominal".into(),
                }
            } else {
                let report = solve_robust(&inst, &cfg).context("robust solve failed")?;
                let por = lotsizing::price_of_robustness(report.objective, nominal)?;
                println!(
                    "robust objective {:.6} | nominal {:.6} | PoR {:.4}% | {} iterations in {:.2}s",
                    report.objective, nominal, por, report.iterations, report.wall_time_s
                );
                RunRecord {
                    n,
                    r,
                    seed,
                    objective: report.objective,
                    nominal,
                    por_percent: por,
                    iterations: report.iterations,
                    wall_time_s: report.wall_time_s,
                    status: format!("{:?}", report.status).to_lowercase(),
                }
            };
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&record)?)
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("wrote {}", path.display());
            }
        }
        Command::Experiment { config } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg: ExperimentConfig = serde_json::from_str(&text).context("parsing config")?;
            let records = run_experiment(&cfg)?;
            let mode = cfg.cost_mode();
            for cell in lotsizing::aggregate(&records) {
                println!(
                    "N={} r={} ({} cost, {} runs): objective {:.4} +/- {:.4}, PoR {:.4}% +/- {:.4}, mean iterations {:.0}",
                    cell.n,
                    cell.r,
                    mode_label(mode),
                    cell.runs,
                    cell.objective_mean,
                    cell.objective_std,
                    cell.por_mean,
                    cell.por_std,
                    cell.iterations_mean
                );
            }
            if let Some(out) = &cfg.output {
                let path = PathBuf::from(out);
                lotsizing::write_outputs(&records, &path)?;
                println!(
                    "wrote {} and {}",
                    path.display(),
                    path.with_extension("json").display()
                );
            }
        }
    }
    Ok(())
}

fn mode_label(mode: CostMode) -> &'static str {
    match mode {
        CostMode::Linear => "linear",
        CostMode::Quartic => "quartic",
        CostMode::Randomized => "randomized",
    }
}
