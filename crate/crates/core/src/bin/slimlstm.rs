use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slim_lstm::harness::{
    bench_step, compare_reference, report_reduction, run_grad_check_suite, run_sweep,
    seed_variance, HarnessConfig, SummaryTable, ACCURACY_SUMMARY_FILE,
};
use slim_lstm::{Error, Result, Variant};

#[derive(Parser)]
#[command(name = "slimlstm", version, about = "SLIM LSTM experiment harness")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config file (version 1)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed override
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Concurrent training runs
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Epoch count override
    #[arg(long, global = true)]
    epochs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the variant x activation x learning-rate grid and write summary tables
    Sweep,
    /// Repeat one configuration over several seeds and report the spread
    SeedVariance,
    /// Finite-difference checks of the cells and the desk-scale model
    GradCheck,
    /// Parameter and per-step operation counts of every variant
    ReductionReport {
        #[arg(long, default_value_t = 3)]
        input_dim: usize,
        #[arg(long, default_value_t = 4)]
        hidden_dim: usize,
    },
    /// Time forward+backward of each variant
    Bench {
        #[arg(long, default_value_t = 64)]
        input_dim: usize,
        #[arg(long, default_value_t = 128)]
        hidden_dim: usize,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 7)]
        repeats: usize,
    },
    /// Compare a sweep accuracy summary with the reference grid
    Compare {
        /// summary_accuracy.csv, or the sweep output directory holding it
        summary: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slimlstm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(common: &Common) -> Result<HarnessConfig> {
    let mut config = match &common.config {
        Some(path) => HarnessConfig::load(path)?,
        None => HarnessConfig::default(),
    };
    if let Some(epochs) = common.epochs {
        config.sweep.epochs = epochs;
        config.seed_variance.epochs = epochs;
    }
    if let Some(seed) = common.seed {
        config.sweep.seeds = vec![seed];
    }
    Ok(config)
}

fn out_dir(common: &Common, default: &str) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    match cli.command {
        Command::Sweep => {
            let config = load_config(common)?;
            let out = out_dir(common, "sweep-results");
            let outcome = run_sweep(&config.sweep_spec(), &out, common.jobs)?;
            let flagged = outcome
                .runs
                .iter()
                .filter(|r| r.records.iter().any(|e| e.nonfinite || e.collapsed))
                .count();
            println!("{}", outcome.accuracy.to_csv());
            println!(
                "{} runs, {} with collapsed or non-finite epochs; {} files in {}",
                outcome.runs.len(),
                flagged,
                outcome.files.len(),
                out.display()
            );
        }
        Command::SeedVariance => {
            let config = load_config(common)?;
            let out = out_dir(common, "seed-variance");
            let task = config.task.load()?;
            let report = seed_variance(
                &config.seed_variance_config(),
                &task,
                &config.seed_variance.seeds,
                common.jobs,
            )?;
            report.write(&out)?;
            println!("{report}");
        }
        Command::GradCheck => {
            let suite = run_grad_check_suite(common.seed.unwrap_or(0))?;
            println!("{suite}");
            if !suite.passed() {
                return Err(Error::NumericCheck(
                    "gradient check found violations".into(),
                ));
            }
        }
        Command::ReductionReport {
            input_dim,
            hidden_dim,
        } => {
            print!("{}", report_reduction(input_dim, hidden_dim)?);
        }
        Command::Bench {
            input_dim,
            hidden_dim,
            steps,
            repeats,
        } => {
            let report = bench_step(
                &Variant::ALL,
                input_dim,
                hidden_dim,
                steps,
                repeats,
                common.seed.unwrap_or(0),
            )?;
            print!("{report}");
        }
        Command::Compare { summary } => {
            let table = SummaryTable::from_csv(&read(&summary_path(&summary))?)?;
            let comparison = compare_reference(&table)?;
            print!("{comparison}");
            if let Some(out) = &common.out {
                std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
                let path = out.join("comparison.txt");
                std::fs::write(&path, comparison.to_string()).map_err(|e| Error::io(&path, e))?;
            }
        }
    }
    Ok(())
}

fn summary_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(ACCURACY_SUMMARY_FILE)
    } else {
        path.to_path_buf()
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
