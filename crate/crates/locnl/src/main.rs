use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand as ClapSubcommand};
use locnl::config::{parse_config, RunConfig};
use locnl::error::CliError;
use locnl::presets;
use locnl::run::{run, Subcommand};

#[derive(Parser)]
#[command(name = "locnl", version, about = "Coupled local/nonlocal diffusion solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration; a built-in preset is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory receiving output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Integrate the configured model and write trajectory and diagnostics CSVs.
    Simulate(Common),
    /// Compute the spectral gap and write its eigenvector.
    Eigen(Common),
    /// Compare fully parabolic relaxations against the coupled limit.
    EpsilonStudy(Common),
    /// Trace the interface values of u and v.
    DemoJump(Common),
    /// Check kernel, assembly and conservation invariants.
    Validate(Common),
    /// Print a built-in configuration as JSON.
    Preset {
        /// `reference` or `demo-jump`.
        name: String,
    },
}

fn load(common: &Common, default: fn() -> RunConfig) -> Result<RunConfig, CliError> {
    let cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            parse_config(&text)?
        }
        None => default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (cmd, common, default): (Subcommand, Common, fn() -> RunConfig) = match cli.command {
        Command::Simulate(c) => (Subcommand::Simulate, c, presets::reference_scenario),
        Command::Eigen(c) => (Subcommand::Eigen, c, presets::reference_scenario),
        Command::EpsilonStudy(c) => (Subcommand::EpsilonStudy, c, presets::reference_scenario),
        Command::DemoJump(c) => (Subcommand::DemoJump, c, presets::demo_jump),
        Command::Validate(c) => (Subcommand::Validate, c, presets::reference_scenario),
        Command::Preset { name } => {
            let cfg = presets::by_name(&name).ok_or_else(|| {
                CliError::Config(locnl::error::ConfigError::Invalid {
                    path: "preset".into(),
                    message: format!("unknown preset '{name}'"),
                })
            })?;
            println!("{}", cfg.to_json());
            return Ok(());
        }
    };
    let cfg = load(&common, default)?;
    let outcome = run(cmd, &cfg, &common.out_dir)?;
    for line in &outcome.lines {
        println!("{line}");
    }
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
