use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use maxmul::cli::{run, CliError, Scenario, ScenarioConfig, EXIT_INVARIANT};

/// Run one maxmul scenario and write its CSV table.
#[derive(Parser)]
#[command(name = "maxmul", version)]
struct Args {
    /// norm, decay-fit, range-table, dyadic-l2, domination, maximal-ratio or verify
    scenario: String,
    /// key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination (stdout when absent and the config has no `out`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// override a config key, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(failed) => ExitCode::from(if failed { EXIT_INVARIANT as u8 } else { 0 }),
        Err(e) => {
            eprintln!("maxmul: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let scenario = Scenario::parse(&args.scenario)
        .ok_or_else(|| CliError::Config(format!("unknown scenario `{}`", args.scenario)))?;
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            ScenarioConfig::parse(&text)?
        }
        None => ScenarioConfig::default(),
    };
    for pair in &args.set {
        cfg.set_pair(pair)?;
    }
    let report = run(scenario, &cfg)?;
    let out = args.out.clone().or_else(|| cfg.output_path().map(PathBuf::from));
    match out {
        Some(path) => std::fs::write(path, &report.csv)?,
        None => print!("{}", report.csv),
    }
    if report.failed {
        eprintln!("maxmul: invariant check failed");
    }
    Ok(report.failed)
}
