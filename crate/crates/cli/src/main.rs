use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use efetlab_cli::{emit_plotdata, init_threads, parse_config, run, CliError, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "efetlab", version, about = "Numerical experiments on entire functions of exponential type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zero counts over a radius sweep with a growth fit and Parseval lower bounds.
    DichotomyScan(Args),
    /// Zero counts and factorization checks for the cos √n + 2 example.
    SqrtExample(Args),
    /// Recover ωₙ·conj(ωₙ₊ₕ) at integers from the correlation interpolant.
    InterpVerify(Args),
    /// Angular profile g_R with its error bars and power-sum envelope check.
    HadamardProfile(Args),
    /// Explicit subharmonic example with its claims grid and Riesz masses.
    Subharmonic(Args),
    /// Search for a combinatorial witness on the unimodular index set.
    Combi(Args),
    /// Argument-principle zero counts on circles.
    Count(Args),
    /// Locate zeros inside a disk.
    Locate(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON experiment config; without one the experiment's defaults are used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Working precision in bits (overrides the config).
    #[arg(long)]
    precision: Option<u32>,
    /// Seed for random sequences (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Args) {
        use Command::*;
        match self {
            DichotomyScan(a) => (ExperimentKind::DichotomyScan, a),
            SqrtExample(a) => (ExperimentKind::SqrtExample, a),
            InterpVerify(a) => (ExperimentKind::InterpVerify, a),
            HadamardProfile(a) => (ExperimentKind::HadamardProfile, a),
            Subharmonic(a) => (ExperimentKind::Subharmonic, a),
            Combi(a) => (ExperimentKind::Combi, a),
            Count(a) => (ExperimentKind::Count, a),
            Locate(a) => (ExperimentKind::Locate, a),
        }
    }
}

fn load(kind: ExperimentKind, args: &Args) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            parse_config(&text)?
        }
        None => ExperimentConfig::bare(kind),
    };
    if cfg.experiment != kind {
        return Err(CliError::Config(format!(
            "config is for {} but the subcommand is {}",
            cfg.experiment.tag(),
            kind.tag()
        )));
    }
    if let Some(p) = args.precision {
        cfg.precision_bits = p;
    }
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.display().to_string());
    }
    cfg.resolve()
}

fn main_inner() -> Result<i32, CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(0);
        }
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    init_threads()?;
    let (kind, args) = cli.command.split();
    let cfg = load(kind, &args)?;
    let out = PathBuf::from(cfg.output.clone().unwrap_or_else(|| format!("out/{}", kind.tag())));
    let report = run(&cfg)?;
    for path in emit_plotdata(&report, &out)? {
        println!("{}", path.display());
    }
    println!("{}", serde_json::to_string_pretty(&report.summary).expect("summary serializes"));
    Ok(match &report.failure {
        Some(msg) => {
            eprintln!("numeric failure (partial results written): {msg}");
            2
        }
        None => 0,
    })
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("efetlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
