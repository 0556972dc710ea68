use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};
use kflow::cli::{run, Experiment, ExperimentConfig};
use kflow::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kflow", version, about = "Kolmogorov-flow damping and dissipation experiments")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a named experiment.
    Run {
        experiment: String,
        /// key = value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a single key, e.g. --set nu=1e-4,1e-5
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List experiment names.
    List,
}

fn usage(msg: impl std::fmt::Display) -> ! {
    Args::command().error(ErrorKind::ValueValidation, msg).exit()
}

fn build(experiment: &str, config: Option<PathBuf>, set: &[String], out: Option<PathBuf>) -> kflow::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(Experiment::parse(experiment)?);
    if let Some(path) = config {
        cfg.apply_file(&path)?;
    }
    for kv in set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("--set {kv}: expected KEY=VALUE")))?;
        cfg.set(k, v)?;
    }
    if let Some(o) = out {
        cfg.out = o;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    match Args::parse().cmd {
        Cmd::List => {
            for e in Experiment::ALL {
                println!("{e}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Run { experiment, config, set, out } => {
            let cfg = build(&experiment, config, &set, out).unwrap_or_else(|e| usage(e));
            match run(&cfg) {
                Ok(summary) => {
                    println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
                    eprintln!("wrote {}", cfg.out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
