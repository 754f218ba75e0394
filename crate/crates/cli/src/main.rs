use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slowlight_cli::{cmd_check, cmd_dump_defaults, cmd_loss_curve, cmd_run, RunConfig, EXIT_USAGE};

/// Slow-light storage and retrieval of optical vortices.
///
/// Exit status: 0 on success, 1 if an embedded assertion fails, 2 on usage
/// or configuration errors.
#[derive(Parser)]
#[command(name = "tsl", version)]
struct Cli {
    /// Output directory; reports go to DIR/<kind>/ [default: tsl-out]
    #[arg(long, global = true, env = "TSL_OUT", value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for the parallel kernels
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Override a config key (TOML value syntax); repeatable
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Only report failures
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file
    Run { config: PathBuf },
    /// Print the loss law over START:END:COUNT values of b as CSV
    LossCurve {
        range: String,
        sigma_p: f64,
    },
    /// Run every scenario kind at its defaults and check all assertions
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the resolved default config of a scenario kind
    DumpDefaults { kind: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    let cfg = RunConfig {
        out: cli.out,
        overrides: cli.set,
        quiet: cli.quiet,
    };
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let code = match cli.command {
        Command::Run { config } => cmd_run(&config, &cfg, &mut out, &mut err),
        Command::LossCurve { range, sigma_p } => cmd_loss_curve(&range, sigma_p, &cfg, &mut out, &mut err),
        Command::Check { seed } => cmd_check(seed, &cfg, &mut out, &mut err),
        Command::DumpDefaults { kind } => cmd_dump_defaults(&kind, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
