use std::process::ExitCode;

use bpmc_cli::{run, Command, Format, Ideal, RunConfig};
use clap::Parser;

/// Brown-Peterson formal group law series and McClure obstructions.
#[derive(Parser, Debug)]
#[command(name = "bpmc", version)]
struct Args {
    /// log | exp | pseries | reduced-pseries | power-op-coeffs | mc | verify
    command: String,
    #[arg(long, default_value_t = 2)]
    prime: u32,
    /// Obstruction index for `mc`; largest a_i for `power-op-coeffs`.
    #[arg(long)]
    n: Option<u32>,
    /// Report results modulo ξ^(k+1); defaults to the range of the shipped tables.
    #[arg(long)]
    truncation: Option<u32>,
    /// Generators to kill, e.g. "v2,v3" or "v2+".
    #[arg(long, default_value = "")]
    ideal: String,
    #[arg(long, default_value = "text")]
    format: String,
    /// Worker threads (default: available cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Compute MC_n even when sparseness forces it to vanish.
    #[arg(long)]
    force_full: bool,
    /// Print canonical representatives modulo ⟨p⟩ξ (power-op-coeffs).
    #[arg(long)]
    reduce: bool,
    /// Also print the unreduced MC_n.
    #[arg(long)]
    raw: bool,
    /// Golden suites for `verify`: p2, p3, p5, p7, p11, p13 (comma separated) or all.
    #[arg(long)]
    suite: Option<String>,
    /// Report summand progress on stderr.
    #[arg(long)]
    progress: bool,
}

fn config(args: Args) -> Result<RunConfig, bpmc_cli::CliError> {
    let mut cfg = RunConfig::new(args.command.parse::<Command>()?, args.prime);
    cfg.n = args.n;
    cfg.truncation = args.truncation;
    cfg.ideal = args.ideal.parse::<Ideal>()?;
    cfg.format = args.format.parse::<Format>()?;
    cfg.threads = args.threads;
    cfg.force_full = args.force_full;
    cfg.reduce = args.reduce;
    cfg.raw = args.raw;
    cfg.suite = args.suite;
    cfg.progress = args.progress;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = config(args).and_then(|cfg| run(&cfg));
    match result {
        Ok(out) => {
            print!("{}", out);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
