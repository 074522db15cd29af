use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fdnoma::montecarlo::Method;
use fdnoma::params::ConfigFile;
use fdnoma::sweep::{parse_methods, parse_users, run_sweep, validate_report, SweepRange, SweepSpec, SweepVariable};
use fdnoma::Error;

/// Outage probability of a NOMA full-duplex relay network, as CSV curves.
#[derive(Debug, Parser)]
#[command(name = "fdnoma", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Sweep as `var=start:stop:step`, var one of snr_db, mu, kappa, d_sr.
    /// Without it the configured SNR is evaluated alone.
    #[arg(long)]
    sweep: Option<String>,

    /// Comma-separated subset of mc, exact, lb, asymp, hd, oma.
    #[arg(long, default_value = "exact")]
    methods: String,

    /// Comma-separated 1-based user indices; all users when omitted.
    #[arg(long)]
    users: Option<String>,

    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    #[arg(long, default_value_t = 1)]
    partitions: usize,

    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Check the configuration and print the derived symbols instead of sweeping.
    #[arg(long)]
    validate: bool,
}

fn run(cli: &Cli) -> Result<(), Error> {
    let file = ConfigFile::load(&cli.config)?;
    if cli.validate {
        print!("{}", validate_report(&file)?);
        return Ok(());
    }
    let range = match &cli.sweep {
        Some(s) => SweepRange::parse(s)?,
        None => SweepRange::single(SweepVariable::SnrDb, file.snr_db),
    };
    let methods: Vec<Method> = parse_methods(&cli.methods)?;
    let users = match &cli.users {
        Some(u) => parse_users(u)?,
        None => (1..=file.num_users).collect(),
    };
    let spec = SweepSpec {
        range,
        methods,
        users,
        trials: cli.trials,
        seed: cli.seed,
        partitions: cli.partitions,
    };
    let result = run_sweep(&file, &spec)?;
    let csv = result.to_csv();
    match &cli.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
