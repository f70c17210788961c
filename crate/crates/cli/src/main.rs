use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use msnn_cli::checkpoint;
use msnn_cli::config::ExperimentConfig;
use msnn_cli::data::synth_raster;
use msnn_cli::run::{bounds_csv, run_eval, run_train};
use msnn_cli::CliError;
use msnn_core::raster::write_raster;

#[derive(Parser)]
#[command(
    name = "msnn",
    about = "Multi-sample spiking network experiment harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Experiment configuration file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for the per-sample phase
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the online training loop and write report.csv + checkpoint.params
    Train(CommonOpts),
    /// Evaluate a checkpoint and write metrics.json
    Eval {
        #[command(flatten)]
        common: CommonOpts,
        /// Parameter checkpoint to evaluate
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Tabulate exact vs Hoeffding majority-error bounds as CSV
    Bounds {
        /// Per-decision error probability
        #[arg(long)]
        p_e: f64,
        /// Largest ensemble size K_I to tabulate
        #[arg(long, default_value_t = 50)]
        k_max: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic Bernoulli spike raster as an event-list file
    GenData {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        neurons: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        rate: f64,
        /// Output file
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(common: &CommonOpts) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_out(dir: &std::path::Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(common) => {
            let cfg = load_config(&common)?;
            let outcome = run_train(&cfg, common.threads)?;
            write_out(&common.out, "report.csv", &outcome.report_csv())?;
            write_out(
                &common.out,
                "checkpoint.params",
                &checkpoint::write_checkpoint(&outcome.header, &outcome.params),
            )?;
            let last = outcome.final_row();
            println!(
                "trained {} steps, final log-loss {}",
                last.step, last.log_loss
            );
            Ok(())
        }
        Command::Eval {
            common,
            checkpoint: ckpt,
        } => {
            let cfg = load_config(&common)?;
            let (header, params) = checkpoint::load(&ckpt)?;
            let metrics = run_eval(&header, &params, &cfg)?;
            let json =
                serde_json::to_string_pretty(&metrics).expect("metrics serialization cannot fail");
            write_out(&common.out, "metrics.json", &json)?;
            println!("{json}");
            Ok(())
        }
        Command::Bounds { p_e, k_max, out } => {
            let csv = bounds_csv(p_e, k_max)?;
            match out {
                Some(path) => {
                    let dir = path.parent().unwrap_or(std::path::Path::new("."));
                    let name = path
                        .file_name()
                        .ok_or_else(|| CliError::Config("bad output path".into()))?;
                    write_out(dir, &name.to_string_lossy(), &csv)?;
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::GenData {
            seed,
            neurons,
            horizon,
            rate,
            out,
        } => {
            if !(0.0..=1.0).contains(&rate) {
                return Err(CliError::Config("rate must be a probability".into()));
            }
            if neurons == 0 || horizon == 0 {
                return Err(CliError::Config(
                    "neurons and horizon must be positive".into(),
                ));
            }
            let raster = synth_raster(seed, 0, neurons, horizon, rate);
            let dir = out.parent().unwrap_or(std::path::Path::new("."));
            let name = out
                .file_name()
                .ok_or_else(|| CliError::Config("bad output path".into()))?;
            write_out(dir, &name.to_string_lossy(), &write_raster(&raster))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
