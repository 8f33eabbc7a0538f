//! `levlab` — weighted approximation and the Levinson dichotomy from the
//! command line.
//!
//! Commands: `classify`, `transform`, `dichotomy`, `witness`, `approx`.
//! Global flags `--out`, `--seed`, `--tol`, `--config`; the env var
//! `LEVLAB_THREADS` caps internal parallelism. All JSON outputs carry a
//! schema version, the config hash, and the seed; the only timestamp in any
//! output is the single `# generated` header line of each CSV file.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use commands::{EXIT_ERROR, EXIT_OK};
use config::{parse_bump, parse_ladder, parse_psi, ConfigFile, RunConfig};
use report::Reporter;

#[derive(Parser)]
#[command(name = "levlab", version, about = "Weighted approximation and the Levinson dichotomy")]
struct Cli {
    /// Output directory for reports and plot data.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for probe sequences; recorded in every output.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override (meaning depends on the command).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Weight selector: lin-log:K, power:A, sqrt, const-plus-log:A, table:FILE.
    #[arg(long)]
    psi: Option<String>,
    /// Space selector: r1/r2/r3 or h2/h3/h4.
    #[arg(long)]
    space: Option<String>,
    /// Support window `lo,hi` of the test bump.
    #[arg(long)]
    bump: Option<String>,
    /// Ball radius for spans and witnesses.
    #[arg(long)]
    l: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a weight as divergent or convergent (exit 2 when undecided).
    Classify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a named transform round trip; exit 3 when the residual exceeds --tol.
    Transform {
        #[command(flatten)]
        common: CommonArgs,
        /// sft-roundtrip, abel-roundtrip, fourier-roundtrip, slice-check, radon-roundtrip.
        #[arg(long)]
        op: Option<String>,
    },
    /// Run the dichotomy experiment matching the weight's verdict.
    Dichotomy {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated tolerance ladder for the divergent branch.
        #[arg(long)]
        eps_ladder: Option<String>,
        /// Base span size for the divergent branch.
        #[arg(long)]
        span: Option<usize>,
    },
    /// Build and certify a compactly supported witness.
    Witness {
        #[command(flatten)]
        common: CommonArgs,
        /// line, r1/r2/r3, or h2/h3/h4.
        #[arg(long)]
        domain: Option<String>,
    },
    /// Certified dyadic discretization demo (plane-wave kernel on the disk).
    Approx {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of seeded probe frequencies.
        #[arg(long)]
        probes: Option<usize>,
    },
}

fn cap_threads() {
    if let Ok(v) = std::env::var("LEVLAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                // ignore failure: the global pool can only be set once
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn resolve(cli: Cli) -> Result<(RunConfig, PathBuf)> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    let (name, common, op, eps_ladder, span, domain, probes) = match cli.command {
        Command::Classify { common } => ("classify", common, None, None, None, None, None),
        Command::Transform { common, op } => ("transform", common, op, None, None, None, None),
        Command::Dichotomy { common, eps_ladder, span } => {
            ("dichotomy", common, None, eps_ladder, span, None, None)
        }
        Command::Witness { common, domain } => ("witness", common, None, None, None, domain, None),
        Command::Approx { common, probes } => ("approx", common, None, None, None, None, probes),
    };
    let bump = match common.bump.or(file.bump) {
        Some(s) => Some(parse_bump(&s)?),
        None => None,
    };
    let eps_ladder = match eps_ladder.or(file.eps_ladder) {
        Some(s) => Some(parse_ladder(&s)?),
        None => None,
    };
    let cfg = RunConfig {
        command: name.to_string(),
        seed: cli.seed.or(file.seed).unwrap_or(0),
        tol: cli.tol.or(file.tol).unwrap_or(1e-4),
        psi: common.psi.or(file.psi),
        space: common.space.or(file.space),
        op: op.or(file.op),
        bump,
        l: common.l.or(file.l),
        eps_ladder,
        span: span.or(file.span),
        domain: domain.or(file.domain),
        probes: probes.or(file.probes),
    };
    cfg.validate()?;
    if let Some(p) = &cfg.psi {
        // fail fast on malformed selectors before any work happens
        parse_psi(p)?;
    }
    let out = cli.out.or(file.out).unwrap_or_else(|| PathBuf::from("."));
    Ok((cfg, out))
}

fn run() -> Result<u8> {
    cap_threads();
    let cli = Cli::parse();
    let (cfg, out) = resolve(cli)?;
    let rep = Reporter::new(&out, cfg.hash(), cfg.seed)?;
    match cfg.command.as_str() {
        "classify" => commands::cmd_classify(&cfg, &rep),
        "transform" => commands::cmd_transform(&cfg, &rep),
        "dichotomy" => commands::cmd_dichotomy(&cfg, &rep),
        "witness" => commands::cmd_witness(&cfg, &rep),
        "approx" => commands::cmd_approx(&cfg, &rep, cfg.seed),
        _ => unreachable!("command names are fixed above"),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            debug_assert_ne!(EXIT_ERROR, EXIT_OK);
            ExitCode::from(EXIT_ERROR)
        }
    }
}
