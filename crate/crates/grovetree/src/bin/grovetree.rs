//! Command-line driver: generation, prediction, verification, simulation,
//! and scaling sweeps over stochastic uniform growth trees.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 verification failure,
//! 3 resource cap (size or overflow guard).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grovetree::driver::{self, DriverError, ExperimentConfig, OutputFormat};
use grovetree::growth;

#[derive(Parser)]
#[command(
    name = "grovetree",
    version,
    about = "Stochastic uniform growth trees: exact structure, closed forms, and walk oracles"
)]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    rng_seed: Option<u64>,
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Write the command's output here instead of stdout
    /// (for `generate`: the tree file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

/// Which experiment to run: a config file, or a preset plus generation.
#[derive(Args)]
struct Instance {
    /// Experiment config (JSON, see schema/experiment_config.schema.json).
    #[arg(long, conflicts_with_all = ["preset", "param"])]
    config: Option<PathBuf>,
    /// Preset family name (see `grovetree preset-list`).
    #[arg(long)]
    preset: Option<String>,
    /// Preset parameter (mu, nu, or m where the preset takes one).
    #[arg(long, requires = "preset")]
    param: Option<u64>,
    /// Generation count.
    #[arg(long)]
    t: Option<u64>,
}

impl Instance {
    fn resolve(&self, cli: &Cli) -> Result<ExperimentConfig, DriverError> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::from_file(path)?,
            (None, Some(name)) => {
                ExperimentConfig::from_preset(name, self.param, self.t.unwrap_or(1))?
            }
            (None, None) => {
                return Err(DriverError::Config(
                    "either --config or --preset is required".into(),
                ))
            }
        };
        if let Some(t) = self.t {
            config.t = Some(t);
            config.t_range = None;
        }
        if let Some(seed) = cli.rng_seed {
            config.rng_seed = seed;
        }
        if let Some(format) = cli.format {
            config.format = format.into();
        }
        if let Some(out) = &cli.out {
            config.out = Some(out.clone());
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Grow the configured tree, write it out, print n / W / MFPT.
    Generate(Instance),
    /// Closed-form predictions for generation t.
    Predict(Instance),
    /// First-passage identity suite on the configured instance.
    VerifyIdentities(Instance),
    /// Sample replicate trees and z-test their means against predictions.
    VerifyEnsemble {
        #[command(flatten)]
        instance: Instance,
        /// Number of sampled trees (overrides the config).
        #[arg(long)]
        replicates: Option<u64>,
    },
    /// Monte Carlo first-passage estimate for one vertex pair vs exact.
    Simulate {
        #[command(flatten)]
        instance: Instance,
        #[arg(long)]
        source: usize,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Evaluate closed forms over a t range and fit the scaling law.
    Sweep {
        #[command(flatten)]
        instance: Instance,
        #[arg(long)]
        t_min: Option<u64>,
        #[arg(long)]
        t_max: Option<u64>,
    },
    /// List the built-in deterministic families.
    PresetList,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems exit 1 (clap would default to 2, which is
            // reserved for verification failures here).
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, DriverError> {
    match &cli.command {
        Command::Generate(instance) => {
            let config = instance.resolve(cli)?;
            let output = driver::generate(&config)?;
            println!("{}", serde_json::to_string_pretty(&output)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Predict(instance) => {
            let config = instance.resolve(cli)?;
            let report = driver::predict(&config)?;
            let payload = match config.format {
                OutputFormat::Json => serde_json::to_string_pretty(&report)?,
                OutputFormat::Csv => format!(
                    "{}\n{}\n",
                    grovetree::analytic::AnalyticReport::CSV_HEADER,
                    report.csv_row()
                ),
            };
            emit(config.out.as_deref(), &payload)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyIdentities(instance) => {
            let config = instance.resolve(cli)?;
            let report = driver::verify_identities(&config)?;
            emit(
                config.out.as_deref(),
                &serde_json::to_string_pretty(&report)?,
            )?;
            Ok(exit_for(report.passed))
        }
        Command::VerifyEnsemble {
            instance,
            replicates,
        } => {
            let mut config = instance.resolve(cli)?;
            if let Some(r) = replicates {
                config.replicates = *r;
                config.validate()?;
            }
            let stats = driver::verify_ensemble(&config)?;
            let payload = match config.format {
                OutputFormat::Json => serde_json::to_string_pretty(&stats)?,
                OutputFormat::Csv => driver::ensemble_csv(&stats),
            };
            emit(config.out.as_deref(), &payload)?;
            Ok(exit_for(stats.passed))
        }
        Command::Simulate {
            instance,
            source,
            target,
            trials,
        } => {
            let config = instance.resolve(cli)?;
            let report = driver::simulate(&config, *source, *target, *trials)?;
            emit(
                config.out.as_deref(),
                &serde_json::to_string_pretty(&report)?,
            )?;
            Ok(exit_for(report.within_4_se))
        }
        Command::Sweep {
            instance,
            t_min,
            t_max,
        } => {
            let mut config = instance.resolve(cli)?;
            if let (Some(lo), Some(hi)) = (t_min, t_max) {
                config.t = None;
                config.t_range = Some((*lo, *hi));
            }
            config.validate()?;
            let report = driver::sweep(&config)?;
            let payload = match config.format {
                OutputFormat::Json => serde_json::to_string_pretty(&report)?,
                OutputFormat::Csv => driver::sweep_csv(&report),
            };
            emit(config.out.as_deref(), &payload)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::PresetList => {
            for preset in growth::preset_list() {
                let param = preset.parameter.unwrap_or("none");
                println!(
                    "{:<12} param: {:<8} {}",
                    preset.name, param, preset.description
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Print to stdout, or write to the output path if one is set. `generate`
/// never passes a path: its `--out` holds the tree file and the summary
/// always prints.
fn emit(path: Option<&std::path::Path>, payload: &str) -> Result<(), DriverError> {
    match path {
        Some(path) => std::fs::write(path, payload)?,
        None => println!("{payload}"),
    }
    Ok(())
}

fn exit_for(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
