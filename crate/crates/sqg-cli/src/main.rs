use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sqg_cli::config::parse_config;
use sqg_cli::experiments::run_experiment;

#[derive(Parser)]
#[command(name = "sqg", about = "Spectral SQG simulator and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more experiment configs.
    Run {
        /// Flat key=value config file(s).
        configs: Vec<PathBuf>,
        /// Output directory (default: $SQG_OUT or ./sqg-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Treat each config as an independent sweep member writing
        /// to its own subdirectory.
        #[arg(long)]
        sweep: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { configs, out, sweep } => {
            if configs.is_empty() {
                eprintln!("error: no config files given");
                return ExitCode::from(2);
            }
            if configs.len() > 1 && !sweep {
                eprintln!("error: multiple configs require --sweep");
                return ExitCode::from(2);
            }
            let out_root = out
                .or_else(|| std::env::var_os("SQG_OUT").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("sqg-out"));
            let mut all_pass = true;
            for path in &configs {
                let text = match std::fs::read_to_string(path) {
                    Ok(t) => t,
                    Err(e) => {
                        eprintln!("error: reading {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                };
                let spec = match parse_config(&text) {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                };
                let dir = if sweep {
                    let stem = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "run".to_string());
                    out_root.join(stem)
                } else {
                    out_root.clone()
                };
                match run_experiment(&spec, &dir) {
                    Ok(pass) => {
                        println!(
                            "{}: {} -> {}",
                            spec.name.as_str(),
                            if pass { "all checks passed" } else { "CHECK FAILURE" },
                            dir.display()
                        );
                        all_pass &= pass;
                    }
                    Err(e) => {
                        eprintln!("error: {}: {e:#}", path.display());
                        return ExitCode::from(2);
                    }
                }
            }
            ExitCode::from(if all_pass { 0 } else { 1 })
        }
    }
}
