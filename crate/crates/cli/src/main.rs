use clap::{Args, Parser, Subcommand, ValueEnum};
use designkit::budget::DENSE_CAP_ENV;
use designkit::report::Report;
use designkit::rng::DEFAULT_SEED;
use designkit::{Budget, Error};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "designkit", version, about = "Exact moment checks for random circuits and design Hamiltonians")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Largest dense matrix dimension.
    #[arg(long, global = true, env = DENSE_CAP_ENV)]
    pub dense_cap: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expander gap of a Fourier-type pair.
    Eta(commands::EtaArgs),
    /// Gap of a diagonal circuit and its defect bound.
    EtaTilde(commands::EtaTildeArgs),
    /// Count of local-but-not-row permutation pairs.
    Lambda(commands::LambdaArgs),
    /// Compare discrete-phase or Hamiltonian moments with the circuit moment.
    MomentCompare(commands::CompareArgs),
    /// Design-time table.
    DesignTime(commands::DesignTimeArgs),
    /// Gate and random-bit counts.
    Resources(commands::ResourcesArgs),
    /// The full acceptance suite.
    VerifyAll(commands::VerifyArgs),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::NonConvergence(_) => 1,
        _ => 2,
    }
}

fn write_report(report: &Report, common: &Common) -> Result<(), Error> {
    let mut sink: Box<dyn Write> = match &common.output {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match common.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, report)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(Report::CSV_HEADER).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            for row in report.csv_rows() {
                w.write_record(&row).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Report, Error> {
    let mut budget = Budget::default();
    if let Some(cap) = cli.common.dense_cap {
        budget.dense_cap = cap;
    }
    let threads = cli.common.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let common = cli.common.clone();
    pool.install(|| commands::dispatch(&cli.command, &common, &budget))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.common.clone();
    if common.threads == Some(0) {
        eprintln!("error: --threads must be positive");
        return ExitCode::from(2);
    }
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = write_report(&report, &common) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for f in report.failures() {
        eprintln!("FAIL [{}] {} {:?} value={:?} bound={:?}", f.criterion, f.name, f.params, f.value, f.bound);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
