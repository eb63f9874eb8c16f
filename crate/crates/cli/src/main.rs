use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use jumpfree::harness::{
    bench_csv, fixtures, run_bench, run_label, run_search, run_solve, run_verify, ExperimentConfig,
    RunRecord, Status, Timings,
};
use jumpfree::{Error, InstanceSet};

#[derive(Parser)]
#[command(name = "jumpfree", version, about = "Jump-free labeling experiments")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; runs land in <out>/<config hash>/.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replace the master seed and every rule seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for verify (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the graph and compute t-hat, s-hat and h-rho.
    Label,
    /// Search for a cube over which the configured family is regular.
    Search,
    /// Run the property suites.
    Verify,
    /// Build instances from a regular cube (or read them) and solve.
    Solve {
        /// Instance set (JSON) to solve instead of deriving one.
        #[arg(long)]
        instances: Option<PathBuf>,
    },
    /// Comparison counts of the structured solver over a p-sweep.
    Bench,
    /// Write the bundled configs.
    Fixtures,
}

const DEFAULT_OUT: &str = "runs";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Fail) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli, fallback: Option<ExperimentConfig>) -> Result<ExperimentConfig, Error> {
    let mut config = match (&cli.config, fallback) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(c)) => c,
        (None, None) => return Err(Error::Config("--config is required".into())),
    };
    if let Some(seed) = cli.seed {
        config.override_seed(seed);
        config.validate()?;
    }
    Ok(config)
}

fn out_dir(cli: &Cli, config: &ExperimentConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| config.output_path.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn report(record: &RunRecord, timings: &Timings, out: &Path) -> Result<Status, Error> {
    let dir = record.persist(out, timings)?;
    for c in &record.checks {
        println!(
            "{:<24} {:<7} trials={} checked={} violations={}",
            c.name,
            status_word(c.status),
            c.trials,
            c.checked,
            c.violations
        );
    }
    println!("status: {}", status_word(record.status));
    println!("record: {}", dir.join(format!("{}.json", record.command)).display());
    Ok(record.status)
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::NoData => "no-data",
    }
}

fn run(cli: Cli) -> Result<Status, Error> {
    match &cli.command {
        Command::Fixtures => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("fixtures"));
            std::fs::create_dir_all(&out)?;
            for (name, config) in fixtures::all() {
                let path = out.join(format!("{name}.json"));
                std::fs::write(&path, serde_json::to_string_pretty(&config)? + "\n")?;
                println!("{}", path.display());
            }
            Ok(Status::Pass)
        }
        Command::Label => {
            let config = load_config(&cli, None)?;
            let (record, timings) = run_label(&config)?;
            report(&record, &timings, &out_dir(&cli, &config))
        }
        Command::Search => {
            let config = load_config(&cli, None)?;
            let (record, timings) = run_search(&config)?;
            report(&record, &timings, &out_dir(&cli, &config))
        }
        Command::Verify => {
            let config = load_config(&cli, None)?;
            let (record, timings) = run_verify(&config, cli.jobs)?;
            report(&record, &timings, &out_dir(&cli, &config))
        }
        Command::Solve { instances } => {
            let config = load_config(&cli, None)?;
            let given: Option<InstanceSet> = match instances {
                Some(path) => Some(
                    serde_json::from_str(&std::fs::read_to_string(path)?)
                        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
                ),
                None => None,
            };
            let (record, timings) = run_solve(&config, given.as_ref())?;
            report(&record, &timings, &out_dir(&cli, &config))
        }
        Command::Bench => {
            let config = load_config(&cli, Some(fixtures::noisy_cube()))?;
            let (record, timings, rows) = run_bench(&config)?;
            let out = out_dir(&cli, &config);
            let status = report(&record, &timings, &out)?;
            let csv = bench_csv(&rows);
            std::fs::write(out.join(&record.config_hash).join("bench.csv"), &csv)?;
            print!("{csv}");
            Ok(status)
        }
    }
}
