//! `fermiqc`: verification suites, code experiments, FFT resource tables and
//! pairing-gate experiments, written as versioned JSON and CSV files.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Experiment, Family, Format, RunConfig, SourceArg};

#[derive(Debug, Parser)]
#[command(name = "fermiqc", version, about = "Fermion-qubit circuit toolkit")]
struct Cli {
    /// JSON run configuration; flags given on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// seed for sampled experiments (default 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// output directory (else $FQC_OUTPUT_DIR, the config, or ./fqc-out)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// replaces every verification threshold
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symbolic rules against dense matrices, braid identities, codes and logical gates
    Verify(VerifyArgs),
    /// Code construction, syndrome table and memory experiment
    Codes(CodesArgs),
    /// Resource table of the fermionic FFT and the qubit baselines
    #[command(visible_alias = "fft-bench")]
    Fft(FftArgs),
    /// Ramsey, Bell and Choi experiments for the pairing gate
    Pairing(PairingArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// flip the sign of one table row's expected image, e.g. "BRAID: gt_i"
    #[arg(long)]
    inject_fault: Option<String>,
}

#[derive(Debug, Args)]
struct CodesArgs {
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// per-site phase-error probability per round
    #[arg(long)]
    noise: Option<f64>,
    /// per-site single-Majorana error probability per round
    #[arg(long)]
    loss: Option<f64>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
}

#[derive(Debug, Args)]
struct FftArgs {
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct PairingArgs {
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    /// Ramsey molecule numbers
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// molecules driving the prepared (Bell) or tested (Choi) gate
    #[arg(long, value_delimiter = ',')]
    n2: Option<Vec<f64>>,
    /// tomography molecules; converged by doubling when omitted
    #[arg(long)]
    n1: Option<f64>,
    #[arg(long, value_enum)]
    source: Option<SourceArg>,
    #[arg(long)]
    points: Option<usize>,
}

fn merge(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cli.tolerance.is_some() {
        cfg.tolerance = cli.tolerance;
    }
    match &cli.command {
        Command::Verify(a) => {
            if a.inject_fault.is_some() {
                cfg.verify.inject_fault = a.inject_fault.clone();
            }
        }
        Command::Codes(a) => {
            let c = &mut cfg.codes;
            c.family = a.family.unwrap_or(c.family);
            c.n = a.n.unwrap_or(c.n);
            c.d = a.d.unwrap_or(c.d);
            c.noise = a.noise.unwrap_or(c.noise);
            c.loss = a.loss.unwrap_or(c.loss);
            c.shots = a.shots.unwrap_or(c.shots);
            c.rounds = a.rounds.unwrap_or(c.rounds);
        }
        Command::Fft(a) => {
            if let Some(s) = &a.sizes {
                cfg.fft.sizes = s.clone();
            }
        }
        Command::Pairing(a) => {
            let p = &mut cfg.pairing;
            p.experiment = a.experiment.unwrap_or(p.experiment);
            if let Some(n) = &a.n {
                p.n = n.clone();
            }
            if let Some(n2) = &a.n2 {
                p.n2 = n2.clone();
            }
            if a.n1.is_some() {
                p.n1 = a.n1;
            }
            p.source = a.source.unwrap_or(p.source);
            p.points = a.points.unwrap_or(p.points);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = merge(&cli)?;
    let dir = cfg.resolve_output_dir(cli.out_dir.as_deref());
    let artifacts = match cli.command {
        Command::Verify(_) => commands::verify(&cfg)?,
        Command::Codes(_) => commands::codes(&cfg)?,
        Command::Fft(_) => commands::fft(&cfg)?,
        Command::Pairing(_) => commands::pairing(&cfg)?,
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, body) in &artifacts.files {
        let path = dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(artifacts.success)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
