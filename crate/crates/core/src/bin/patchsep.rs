use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use patchsep::io::{parse_config, run_command, Command, CommandError};

/// Internal/external separation of potential fields on the sphere.
#[derive(Parser)]
#[command(name = "patchsep", version)]
struct Cli {
    /// Configuration file of `key: value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV, SVG, coefficient and report files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Seed for all randomness (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Extra `key=value` settings applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct GlobalArgs {
    /// Field samples on a Gauss grid (`theta,phi,bx,by,bz`).
    #[arg(long = "in")]
    input: Option<String>,
    /// Analysis degree.
    #[arg(long)]
    degree: Option<u64>,
}

#[derive(Args)]
struct PatchArgs {
    /// Field samples at the patch nodes (`theta,phi,bx,by,bz`); synthetic data when absent.
    #[arg(long = "in")]
    input: Option<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Full-sphere separation into ext, int and df channels.
    SeparateGlobal(GlobalArgs),
    /// Write the patch restriction matrix and its column metadata.
    Assemble,
    /// Singular spectrum of the patch restriction matrix.
    Svd,
    /// Regularized separation from patch data.
    SeparatePatch(PatchArgs),
    /// Null-space pairs from a tapered indicator, across degrees.
    KernelDemo,
    /// Best int approximation of an ext field on the patch, across degrees.
    DensityDemo,
    /// Singular-value decay and best approximation across degrees.
    InstabilitySweep,
    /// Condition number across shell radii.
    ShellSweep,
    /// Separation error across noise levels with model fits.
    NoiseSweep,
    /// Synthetic truth and noisy patch data.
    Synth,
}

fn run(cli: Cli) -> Result<(), CommandError> {
    let (command, overrides): (Command, Vec<(String, String)>) = match &cli.command {
        Sub::SeparateGlobal(a) => {
            let mut o = Vec::new();
            if let Some(i) = &a.input {
                o.push(("input".to_string(), i.clone()));
            }
            if let Some(d) = a.degree {
                o.push(("degree".to_string(), d.to_string()));
            }
            (Command::SeparateGlobal, o)
        }
        Sub::Assemble => (Command::Assemble, vec![]),
        Sub::Svd => (Command::Svd, vec![]),
        Sub::SeparatePatch(a) => (
            Command::SeparatePatch,
            a.input.iter().map(|i| ("input".to_string(), i.clone())).collect(),
        ),
        Sub::KernelDemo => (Command::KernelDemo, vec![]),
        Sub::DensityDemo => (Command::DensityDemo, vec![]),
        Sub::InstabilitySweep => (Command::InstabilitySweep, vec![]),
        Sub::ShellSweep => (Command::ShellSweep, vec![]),
        Sub::NoiseSweep => (Command::NoiseSweep, vec![]),
        Sub::Synth => (Command::Synth, vec![]),
    };

    let mut text = match &cli.config {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CommandError::Config(format!("cannot read config {}: {e}", p.display())))?,
        None => String::new(),
    };
    // Command-line values replace file values for the same key.
    let mut extra: Vec<(String, String)> = overrides;
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CommandError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        extra.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(seed) = cli.seed {
        extra.push(("seed".to_string(), seed.to_string()));
    }
    let overridden: Vec<&str> = extra.iter().map(|(k, _)| k.as_str()).collect();
    text = text
        .lines()
        .filter(|l| {
            let key = l.split('#').next().unwrap_or("").split(':').next().unwrap_or("").trim();
            !overridden.contains(&key)
        })
        .collect::<Vec<_>>()
        .join("\n");
    for (k, v) in &extra {
        text.push_str(&format!("\n{k}: {v}"));
    }
    let cfg = parse_config(&text, command.name())?;

    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CommandError::Config(format!("thread pool: {e}")))?;
    }
    let outcome = run_command(command, &cfg, &cli.out_dir)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for check in &outcome.checks {
        println!("{} {}", if check.pass { "PASS" } else { "FAIL" }, check.name);
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("patchsep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
