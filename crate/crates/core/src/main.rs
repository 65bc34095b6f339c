use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use magband::cli::{self, CheckStatus};

/// Band structure of a magnetic Landau Hamiltonian perturbed by a
/// translation-invariant obstacle.
#[derive(Parser, Debug)]
#[command(name = "magband", version)]
struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Comma-separated checks; overrides `[sweep] checks`.
    #[arg(long, value_name = "NAME,...")]
    check: Option<String>,

    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(args: &Args) -> magband::Result<bool> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = cli::parse_config(&text)?;
    if let Some(dir) = &args.out_dir {
        cfg.output.dir = dir.clone();
    }
    if let Some(list) = &args.check {
        cfg.checks = cli::parse_check_list(list)?;
    }
    let outcome = cli::run(&cfg)?;
    if !args.quiet {
        println!(
            "wrote {} bands at {} momenta to {}",
            outcome.bands.band_count(),
            outcome.bands.p_grid.len(),
            cfg.output.dir.display()
        );
        for c in &outcome.checks {
            println!("{} {}: {}", c.name, c.status, c.summary);
        }
    }
    if outcome.checks.iter().any(|c| c.status == CheckStatus::Fail) {
        eprint!("{}", cli::failure_list(&outcome.checks));
    }
    Ok(outcome.success())
}
