use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use keldysh_nca::commands::{self, Method, Options, Outcome};
use keldysh_nca::output::Artifacts;
use keldysh_nca::{FileConfig, RunConfig};
use serde_json::json;

/// Steady-state Keldysh Green's functions, weak-coupling correlators and
/// KMS/FDR checks for a bosonic mode in a thermal bath.
#[derive(Debug, Parser)]
#[command(name = "keldysh-nca", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// TOML configuration file; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long = "lambda-sq", global = true, allow_hyphen_values = true)]
    lambda_sq: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    omega0: Option<f64>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the default configuration as TOML and exit.
    #[arg(long)]
    print_defaults: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lesser/greater correlators of the linearly coupled mode.
    WeakCorr,
    /// Secular spin-boson correlators.
    SpinCorr,
    /// Principal-value Lamb shift of the configured spectral density.
    LambShift,
    /// Green's function from one of the Keldysh solvers.
    Greens {
        #[arg(long, value_enum, default_value = "nca")]
        method: Method,
    },
    /// FDR residual of a solver result or of a Green's function CSV.
    FdrCheck {
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// CSV with columns omega,re_GR,im_GR,re_GA,im_GA,re_GK,im_GK.
        #[arg(long, conflicts_with = "method")]
        input: Option<PathBuf>,
    },
    /// Born, one-step and NCA retarded functions side by side.
    Compare,
    /// Randomised closure checks of the contraction and Dyson equation.
    PropertyCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::WeakCorr => "weak-corr",
            Command::SpinCorr => "spin-corr",
            Command::LambShift => "lamb-shift",
            Command::Greens { .. } => "greens",
            Command::FdrCheck { .. } => "fdr-check",
            Command::Compare => "compare",
            Command::PropertyCheck { .. } => "property-check",
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let (mut file, base) = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (FileConfig::parse(&text)?, base)
        }
        None => (FileConfig::default(), PathBuf::from(".")),
    };
    if let Some(v) = cli.lambda_sq {
        file.model.lambda_sq = v;
    }
    if let Some(v) = cli.beta {
        file.thermal.beta = v;
    }
    if let Some(v) = cli.omega0 {
        file.model.omega0 = v;
    }
    if let Some(v) = &cli.out {
        file.output.dir = v.clone();
    }
    Ok(RunConfig::build(file, &base)?)
}

fn dispatch(cmd: &Command, cfg: &RunConfig, art: &mut Artifacts) -> Result<Outcome> {
    match cmd {
        Command::WeakCorr => commands::weak_corr(cfg, art),
        Command::SpinCorr => commands::spin_corr(cfg, art),
        Command::LambShift => commands::lamb(cfg, art),
        Command::Greens { method } => commands::greens(cfg, art, *method),
        Command::FdrCheck { method, input } => {
            let opts = Options {
                method: *method,
                input: input.clone(),
                ..Options::default()
            };
            commands::fdr(cfg, art, &opts)
        }
        Command::Compare => commands::compare(cfg, art),
        Command::PropertyCheck { seed, cases } => {
            let opts = Options {
                seed: *seed,
                cases: *cases,
                ..Options::default()
            };
            commands::property_check(cfg, art, &opts)
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    if cli.print_defaults {
        print!("{}", FileConfig::default().to_toml());
        return Ok(0);
    }
    let Some(cmd) = &cli.command else {
        anyhow::bail!("no command given; see --help");
    };
    let cfg = load(&cli)?;
    let mut art = Artifacts::create(cfg.out_dir())?;
    let start = Instant::now();
    let outcome = dispatch(cmd, &cfg, &mut art)?;
    let elapsed = start.elapsed().as_secs_f64();
    let name = cmd.name();
    art.json(&format!("{name}.json"), &outcome.report)?;
    let files: Vec<String> = art.written().iter().map(|p| p.display().to_string()).collect();
    let meta = json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg.file,
        "runtime_s": elapsed,
        "artifacts": files,
        "exit_code": outcome.status.code(),
    });
    art.json(&format!("{name}.meta.json"), &meta)?;
    println!("{name}:");
    for line in &outcome.summary {
        println!("  {line}");
    }
    println!("  artifacts in {}", cfg.out_dir().display());
    Ok(outcome.status.code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
