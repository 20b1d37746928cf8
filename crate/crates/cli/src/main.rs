use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trichotomy::verify::{VerifyOptions, DEFAULT_RANDOM_ICS, DEFAULT_SEED};
use trichotomy_cli::commands::parse_nonnegative;
use trichotomy_cli::spec::split_list;
use trichotomy_cli::{
    cmd_classify, cmd_construct, cmd_simulate, cmd_sweep, cmd_verify, write_sweep_csv, CliError,
    Constructor, EquationSpec, ExitStatus, ModeArg, RunOptions, RunReport, SweepGrid, SweepParam,
};

/// Classify and check linear-fractional difference equations against the
/// periodic trichotomy.
#[derive(Parser)]
#[command(name = "trichotomy", version)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every family's hypotheses and print the verdict.
    Classify {
        spec: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Iterate the equation and write `n,x_n` rows as CSV.
    Simulate {
        spec: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Summary report in JSON on stderr.
        #[arg(long)]
        json: bool,
    },
    /// Build initial values for a cycle or an unbounded orbit and certify them.
    Construct {
        spec: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Full periods to certify exactly.
        #[arg(long, default_value_t = 3)]
        periods: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check the governing family's prediction end to end.
    Verify {
        spec: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Random initial values per check.
        #[arg(long, default_value_t = DEFAULT_RANDOM_ICS)]
        random_ics: usize,
        /// Horizon for random runs not converged after --steps.
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Scan a parameter across a grid and write one CSV row per point.
    Sweep {
        spec: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        count: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 5000)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long, default_value_t = 128)]
    precision_bits: u32,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Tail length for cycle detection; defaults to 4 k p.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Initial values x_-1, ..., x_-k, comma separated.
    #[arg(long)]
    ics: Option<String>,
    #[arg(long, value_enum)]
    constructor: Option<Constructor>,
    #[arg(long, default_value = "1000000")]
    threshold: String,
    /// Output file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn options(&self) -> Result<RunOptions, CliError> {
        if !(self.tolerance > 0.0) {
            return Err(CliError::Parse("--tolerance must be positive".into()));
        }
        if self.steps == 0 {
            return Err(CliError::Parse("--steps must be positive".into()));
        }
        if self.precision_bits < 64 {
            return Err(CliError::Parse(
                "--precision-bits must be at least 64".into(),
            ));
        }
        Ok(RunOptions {
            steps: self.steps,
            mode: self.mode,
            precision_bits: self.precision_bits,
            tolerance: self.tolerance,
            window: self.window,
            seed: self.seed,
            threshold: parse_nonnegative("--threshold", &self.threshold)?,
            ics: self.ics.as_deref().map(split_list),
            constructor: self.constructor,
        })
    }

    fn output(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn print_report(report: &RunReport, json: bool) {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render());
    }
}

fn load(path: &Path) -> Result<EquationSpec, CliError> {
    EquationSpec::load(path)
}

fn run(cli: Cli) -> Result<ExitStatus, CliError> {
    match cli.command {
        Command::Classify { spec, json } => {
            let report = cmd_classify(&load(&spec)?)?;
            print_report(&report, json);
            Ok(report.exit_status)
        }
        Command::Simulate { spec, run, json } => {
            let opts = run.options()?;
            let mut out = run.output()?;
            let report = cmd_simulate(&load(&spec)?, &opts, &mut out)?;
            out.flush()?;
            if json {
                eprintln!("{}", report.to_json());
            }
            Ok(report.exit_status)
        }
        Command::Construct {
            spec,
            run,
            periods,
            json,
        } => {
            let report = cmd_construct(&load(&spec)?, &run.options()?, periods)?;
            print_report(&report, json);
            Ok(report.exit_status)
        }
        Command::Verify {
            spec,
            run,
            random_ics,
            max_steps,
            json,
        } => {
            let opts = run.options()?;
            let verify_opts = VerifyOptions {
                steps: opts.steps,
                max_steps: max_steps.unwrap_or(4 * opts.steps).max(opts.steps),
                precision_bits: opts.precision_bits,
                tolerance: opts.tolerance,
                window: opts.window,
                seed: opts.seed,
                random_ics,
                threshold: opts.threshold.clone(),
                ..VerifyOptions::default()
            };
            let report = cmd_verify(&load(&spec)?, &opts, &verify_opts)?;
            print_report(&report, json);
            Ok(report.exit_status)
        }
        Command::Sweep {
            spec,
            run,
            param,
            from,
            to,
            count,
        } => {
            let opts = run.options()?;
            let grid = SweepGrid {
                param,
                from: parse_nonnegative("--from", &from)?,
                to: parse_nonnegative("--to", &to)?,
                count,
            };
            let rows = cmd_sweep(&load(&spec)?, &grid, &opts)?;
            let mut out = run.output()?;
            write_sweep_csv(&rows, &mut out)?;
            out.flush()?;
            Ok(ExitStatus::Success)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ExitStatus::InputError.code())
        }
    }
}
