use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use photon_spinor::cli::{self, EXIT_CONFIG, THREADS_ENV};

#[derive(Parser)]
#[command(name = "photon-spinor", about = "Run and inspect photon spinor scenarios")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and emit its JSON report.
    Run {
        config: PathBuf,
        /// Report path; overrides `[output] report`. Stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a scenario and list its actions without running them.
    Describe { config: PathBuf },
    /// Print version and build information.
    Version,
}

fn configure_threads() -> Result<(), String> {
    let raw = std::env::var(THREADS_ENV).ok();
    if let Some(n) = cli::parse_thread_cap(raw.as_deref())? {
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
        #[cfg(not(feature = "parallel"))]
        let _ = n;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    match args.command {
        Command::Version => {
            println!("{}", cli::version_string());
            ExitCode::SUCCESS
        }
        Command::Describe { config } => match cli::load_scenario(&config) {
            Ok(s) => {
                print!("{}", cli::describe_scenario(&s));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Run { config, out } => {
            let outcome = cli::run_path(&config, out.as_deref());
            match (&outcome.message, &outcome.report) {
                (Some(m), _) if outcome.exit_code == EXIT_CONFIG => eprintln!("error: {m}"),
                (Some(m), _) => eprintln!("{m}"),
                (None, Some(r)) => print!("{}", cli::to_json_string(r)),
                (None, None) => {}
            }
            ExitCode::from(outcome.exit_code)
        }
    }
}
