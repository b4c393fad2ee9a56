//! Command-line frontend: regime analysis, trajectory simulation, survival
//! probabilities and Monte-Carlo batches, all driven by a JSON scheme config.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 1 on runtime errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use urnsim::asymptotics::classify;
use urnsim::config::{parse_config, ConfigError};
use urnsim::montecarlo::run_batch;
use urnsim::plot::emit_trajectory_svg;
use urnsim::survival;
use urnsim::urn::{simulate_trajectory, Trajectory, UrnScheme};

#[derive(Parser)]
#[command(name = "urnsim", version, about = "Two-color urn scheme simulator and analyzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Path to the scheme config (JSON).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Print the asymptotic regime report as JSON.
    Analyze {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Simulate seeded trajectories; optionally write CSV and an SVG plot.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        /// Extractions per trajectory.
        #[arg(long)]
        steps: u64,
        /// Base seed; trajectory i uses seed XOR i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trajectories: u64,
        /// CSV output path (trajectory index is appended when > 1).
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// SVG plot path.
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Solve the survival probability grid P{tau > M}.
    Survival {
        #[command(flatten)]
        config: ConfigArg,
        /// Horizon M (number of extractions).
        #[arg(long)]
        horizon: u64,
        /// Initial total-ball range "t1:t2".
        #[arg(long)]
        t_range: Option<String>,
        /// Table spec "t0s=6,12,18:p0s=1/3,1/2,2/3".
        #[arg(long)]
        table: Option<String>,
        /// Output path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch of trajectories and print the statistics as JSON.
    Montecarlo {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        trajectories: u64,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn load_scheme(path: &Path) -> Result<UrnScheme, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_config(&text)?.build()?)
}

fn parse_t_range(s: &str) -> Result<(i64, i64), CliError> {
    let err = || CliError::Config(format!("invalid --t-range '{s}', expected t1:t2"));
    let (a, b) = s.split_once(':').ok_or_else(err)?;
    Ok((
        a.trim().parse().map_err(|_| err())?,
        b.trim().parse().map_err(|_| err())?,
    ))
}

fn parse_fraction(s: &str) -> Result<(i64, i64), CliError> {
    let err = || CliError::Config(format!("invalid fraction '{s}', expected n or n/d"));
    match s.split_once('/') {
        Some((n, d)) => Ok((
            n.trim().parse().map_err(|_| err())?,
            d.trim().parse().map_err(|_| err())?,
        )),
        None => Ok((s.trim().parse().map_err(|_| err())?, 1)),
    }
}

fn parse_table_spec(s: &str) -> Result<(Vec<i64>, Vec<(i64, i64)>), CliError> {
    let err = || CliError::Config(format!("invalid --table '{s}', expected t0s=...:p0s=..."));
    let (t_part, p_part) = s.split_once(':').ok_or_else(err)?;
    let t_list = t_part.strip_prefix("t0s=").ok_or_else(err)?;
    let p_list = p_part.strip_prefix("p0s=").ok_or_else(err)?;
    let t0s = t_list
        .split(',')
        .map(|v| v.trim().parse::<i64>().map_err(|_| err()))
        .collect::<Result<Vec<_>, _>>()?;
    let p0s = p_list
        .split(',')
        .map(parse_fraction)
        .collect::<Result<Vec<_>, _>>()?;
    if t0s.is_empty() || p0s.is_empty() {
        return Err(err());
    }
    Ok((t0s, p0s))
}

fn write_or_print(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(Into::into),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn csv_path_for(base: &Path, index: u64, total: u64) -> PathBuf {
    if total == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("trajectory");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}-{index}.{ext}"))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { config } => {
            let scheme = load_scheme(&config.config)?;
            println!("{}", classify(&scheme).to_json());
            Ok(())
        }
        Command::Simulate {
            config,
            steps,
            seed,
            trajectories,
            out_csv,
            out_svg,
        } => {
            if trajectories < 1 {
                return Err(CliError::Config("--trajectories must be >= 1".into()));
            }
            let scheme = load_scheme(&config.config)?;
            let runs: Vec<Trajectory> = (0..trajectories)
                .map(|i| simulate_trajectory(&scheme, steps, seed ^ i))
                .collect();
            if let Some(base) = &out_csv {
                for (i, t) in runs.iter().enumerate() {
                    let path = csv_path_for(base, i as u64, trajectories);
                    fs::write(&path, t.to_csv_string())?;
                }
            }
            if let Some(path) = &out_svg {
                let report = classify(&scheme);
                let mut file = fs::File::create(path)?;
                emit_trajectory_svg(&runs, &report.limit_points, &mut file)?;
            }
            if out_csv.is_none() && out_svg.is_none() {
                for t in &runs {
                    print!("{}", t.to_csv_string());
                }
            }
            Ok(())
        }
        Command::Survival {
            config,
            horizon,
            t_range,
            table,
            out,
        } => {
            let scheme = load_scheme(&config.config)?;
            let csv = if let Some(spec) = &table {
                let (t0s, p0s) = parse_table_spec(spec)?;
                let cells = survival::survival_table(&scheme, horizon, &t0s, &p0s)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                survival::table_to_csv(&cells)
            } else {
                let range = match &t_range {
                    Some(s) => parse_t_range(s)?,
                    None => (scheme.t0(), scheme.t0()),
                };
                let grid = survival::solve(&scheme, horizon, range)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                let mut csv = String::from("t0,alpha0,p0,q0\n");
                for (t, alpha, q) in grid.entries() {
                    csv.push_str(&format!("{t},{alpha},{alpha}/{t},{q}\n"));
                }
                csv
            };
            write_or_print(out.as_deref(), &csv)
        }
        Command::Montecarlo {
            config,
            trajectories,
            steps,
            seed,
        } => {
            if trajectories < 1 {
                return Err(CliError::Config("--trajectories must be >= 1".into()));
            }
            let scheme = load_scheme(&config.config)?;
            let stats = run_batch(&scheme, trajectories, steps, seed);
            println!("{}", stats.to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
