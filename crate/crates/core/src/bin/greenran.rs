use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use greenran::config::{digest, read_text, RunManifest, SimConfig, SCHEMA_VERSION, TOOL_VERSION};
use greenran::engine::{run_batch, SimulationRun};
use greenran::output::{simulate_to_dir, write_batch};
use greenran::{Algorithm, Error};

/// Relative `--out` paths are resolved against this directory when set.
const OUT_ROOT_ENV: &str = "GREENRAN_OUT_ROOT";

#[derive(Parser)]
#[command(name = "greenran", version, about = "Green heterogeneous RAN simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Proposed,
    Reference,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Proposed => Algorithm::Proposed,
            AlgorithmArg::Reference => Algorithm::Reference,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BatchAlgorithm {
    Proposed,
    Reference,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run one continuous simulation and write per-tick tables and a summary.
    Simulate {
        #[arg(long, conflicts_with = "manifest")]
        config: Option<PathBuf>,
        /// Re-run exactly what a previous manifest.json describes.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "proposed")]
        algorithm: AlgorithmArg,
        /// Simulated time, e.g. `72h`, `90m`, `3600s`. Defaults to the configuration.
        #[arg(long, value_parser = humantime::parse_duration)]
        duration: Option<Duration>,
        /// Overrides every random seed of the configuration.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write every user position at every tick.
        #[arg(long)]
        trajectory: bool,
    },
    /// Placement-only runs over consecutive seeds.
    Batch {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        runs: u64,
        /// First seed of the batch.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "both")]
        algorithm: BatchAlgorithm,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the full default configuration as TOML.
    PrintDefaultConfig,
    /// Parse and validate a configuration file.
    ValidateConfig { path: PathBuf },
}

fn load_config(path: Option<&Path>) -> Result<(SimConfig, String), Error> {
    match path {
        Some(p) => {
            let text = read_text(p)?;
            Ok((SimConfig::from_toml_str(&text)?, digest(text.as_bytes())))
        }
        None => Ok((SimConfig::default(), digest(b""))),
    }
}

fn out_dir(out: &Path) -> PathBuf {
    match std::env::var_os(OUT_ROOT_ENV) {
        Some(root) if out.is_relative() => PathBuf::from(root).join(out),
        _ => out.to_path_buf(),
    }
}

fn duration_s(d: Duration) -> Result<u64, Error> {
    if d.subsec_nanos() != 0 {
        return Err(Error::InvalidConfig {
            key: "--duration".into(),
            reason: "must be a whole number of seconds (s)".into(),
        });
    }
    Ok(d.as_secs())
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate {
            config,
            manifest,
            algorithm,
            duration,
            seed,
            out,
            trajectory,
        } => {
            let manifest = match manifest {
                Some(path) => RunManifest::read(&path)?,
                None => {
                    let (mut cfg, config_digest) = load_config(config.as_deref())?;
                    if let Some(d) = duration {
                        cfg.engine.duration_s = duration_s(d)?;
                    }
                    if let Some(s) = seed {
                        cfg = cfg.with_seed(s);
                    }
                    cfg.validate()?;
                    RunManifest {
                        schema_version: SCHEMA_VERSION,
                        tool_version: TOOL_VERSION.to_string(),
                        config_digest,
                        command: "simulate".into(),
                        algorithm: Some(algorithm.into()),
                        seed: cfg.scenario.rng_seed,
                        duration_s: cfg.engine.duration_s,
                        runs: None,
                        resolved_config: cfg,
                    }
                }
            };
            let alg = manifest.algorithm.ok_or_else(|| Error::InvalidConfig {
                key: "manifest.algorithm".into(),
                reason: "a simulate manifest names its algorithm".into(),
            })?;
            let run = SimulationRun::new(manifest.resolved_config.clone(), alg);
            let dir = out_dir(&out);
            let s = simulate_to_dir(&run, &manifest, &dir, trajectory)?;
            println!(
                "{} seed {} over {} s: MBS load share {:.4}, outage {:.4}, on-grid {:.3} kWh -> {}",
                alg,
                s.seed,
                s.duration_s,
                s.report.mbs_load_share,
                s.report.outage_share,
                s.report.on_grid_kwh,
                dir.display()
            );
        }
        Command::Batch {
            config,
            runs,
            seed,
            algorithm,
            bins,
            out,
        } => {
            let (cfg, config_digest) = load_config(config.as_deref())?;
            if bins == 0 {
                return Err(Error::InvalidConfig {
                    key: "--bins".into(),
                    reason: "need at least one bin".into(),
                });
            }
            let algorithms = match algorithm {
                BatchAlgorithm::Proposed => vec![Algorithm::Proposed],
                BatchAlgorithm::Reference => vec![Algorithm::Reference],
                BatchAlgorithm::Both => vec![Algorithm::Proposed, Algorithm::Reference],
            };
            let batches = algorithms
                .iter()
                .map(|&a| run_batch(&cfg, runs, seed, a))
                .collect::<Result<Vec<_>, _>>()?;
            let manifest = RunManifest {
                schema_version: SCHEMA_VERSION,
                tool_version: TOOL_VERSION.to_string(),
                config_digest,
                command: "batch".into(),
                algorithm: (algorithms.len() == 1).then(|| algorithms[0]),
                seed,
                duration_s: 0,
                runs: Some(runs),
                resolved_config: cfg,
            };
            let dir = out_dir(&out);
            write_batch(&batches, bins, &manifest, &dir)?;
            for b in &batches {
                println!(
                    "{}: {} runs, mean MBS load share {:.4}, mean outage {:.4}",
                    b.algorithm, b.n_runs, b.mbs_load_share.mean, b.outage_share.mean
                );
            }
        }
        Command::PrintDefaultConfig => print!("{}", SimConfig::default_config_text()),
        Command::ValidateConfig { path } => {
            SimConfig::parse_config(&path)?;
            println!("{}: ok", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
