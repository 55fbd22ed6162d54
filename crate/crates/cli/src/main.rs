//! `polariton-lab`: batch front end for the polariton simulator.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 64 usage.

mod failure;
mod jsonpath;
mod manifest;
mod range;
mod runs;
mod sweep;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use polariton_core::manybody::BetheOptions;
use polariton_core::spectra::Scheme;
use polariton_core::Exec;

use failure::{Failure, Outcome, EXIT_USAGE};
use manifest::RunManifest;
use range::Range;
use runs::{
    load_config, read_text, BetheRun, DispersionRun, LatticeFile, ManybodyRun, Observable, PhasematchRun, ProtocolRun,
    ResolvedRun, ScheduleInput,
};
use sweep::{Axis, SweepRun, Target};

#[derive(Parser, Debug)]
#[command(name = "polariton-lab", version, about = "Stationary-light polariton simulator")]
struct Cli {
    /// Worker threads for the data-parallel kernels.
    #[arg(long, global = true, env = "POLARITON_LAB_THREADS")]
    threads: Option<usize>,
    /// Eigensolver seed; overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory receiving every output and the manifest.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Band structure of the EIT or stationary-light coupling matrix.
    Dispersion(DispersionArgs),
    /// Storage, hold, interaction and retrieval under a control schedule.
    Protocol(ProtocolArgs),
    /// Lattice exact diagonalization.
    Manybody(ManybodyArgs),
    /// Lieb-Liniger ground energy over a gamma grid.
    Bethe(BetheArgs),
    /// Coplanar four-beam phase matching.
    Phasematch(PhasematchArgs),
    /// Scalar summaries over a parameter grid.
    Sweep(SweepArgs),
    /// Re-run a manifest snapshot.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
struct DispersionArgs {
    #[arg(long)]
    config: PathBuf,
    /// eit or stationary; defaults to stationary when omega_L > 0.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    kmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kmax: Option<f64>,
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Also write the paired EIT/stationary loss spectrum.
    #[arg(long)]
    loss: bool,
    #[arg(long, default_value = "bands.csv")]
    out: String,
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long, default_value = "report.json")]
    out: String,
    #[arg(long)]
    trace: Option<String>,
}

#[derive(Args, Debug)]
struct ManybodyArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value = "g2,energy,K")]
    observables: String,
    #[arg(long, default_value = "result.json")]
    out: String,
}

#[derive(Args, Debug)]
struct BetheArgs {
    #[arg(long, default_value = "0.1:100:log:20")]
    gamma_grid: String,
    /// Quadrature nodes (the error estimate doubles them).
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, default_value = "e_of_gamma.csv")]
    out: String,
}

#[derive(Args, Debug)]
struct PhasematchArgs {
    #[arg(long)]
    lambda_probe: f64,
    #[arg(long)]
    lambda_control: f64,
    #[arg(long, default_value = "beams.json")]
    out: String,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// dispersion or protocol.
    #[arg(long)]
    target: String,
    /// `path[+path]=start:stop:lin|log:count`; repeat for a product grid.
    #[arg(long = "axis", required = true, allow_hyphen_values = true)]
    axes: Vec<String>,
    #[arg(long, default_value = "sweep.csv")]
    out: String,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
}

fn resolve(cmd: Command, seed: Option<u64>) -> Outcome<(ResolvedRun, u64)> {
    let run = match cmd {
        Command::Dispersion(a) => {
            let mut config = load_config(&a.config)?;
            config.seed = seed.unwrap_or(config.seed);
            let p = config.params;
            let scheme = match a.scheme {
                Some(s) => Scheme::parse(&s)?,
                None => runs::default_scheme(&p),
            };
            let kmax = a.kmax.or(a.kmin.map(|k| -k)).unwrap_or_else(|| DispersionRun::default_kmax(&p));
            let kmin = a.kmin.unwrap_or(-kmax);
            ResolvedRun::Dispersion(DispersionRun {
                config,
                scheme,
                kmin,
                kmax,
                points: a.points,
                loss: a.loss,
                out: a.out,
            })
        }
        Command::Protocol(a) => {
            let mut config = load_config(&a.config)?;
            config.seed = seed.unwrap_or(config.seed);
            ResolvedRun::Protocol(ProtocolRun {
                config,
                schedule: ScheduleInput::from_json(&a.schedule)?,
                out: a.out,
                trace: a.trace,
            })
        }
        Command::Manybody(a) => {
            let text = read_text(&a.spec)?;
            let file: LatticeFile = serde_json::from_str(&text).map_err(|e| Failure::parse(&a.spec, e))?;
            let mut lanczos = file.lanczos.unwrap_or_default();
            lanczos.seed = seed.or(file.seed).unwrap_or(lanczos.seed);
            ResolvedRun::Manybody(ManybodyRun {
                spec: file.spec,
                observables: Observable::parse_list(&a.observables)?,
                fit: file.fit,
                lanczos,
                out: a.out,
            })
        }
        Command::Bethe(a) => {
            let mut options = BetheOptions::default();
            if let Some(n) = a.nodes {
                options.nodes = n;
            }
            ResolvedRun::Bethe(BetheRun {
                gamma_grid: a.gamma_grid.parse::<Range>()?,
                options,
                out: a.out,
            })
        }
        Command::Phasematch(a) => ResolvedRun::Phasematch(PhasematchRun {
            lambda_probe: a.lambda_probe,
            lambda_control: a.lambda_control,
            out: a.out,
        }),
        Command::Sweep(a) => {
            let mut config = load_config(&a.config)?;
            config.seed = seed.unwrap_or(config.seed);
            let target = match a.target.as_str() {
                "dispersion" => Target::Dispersion,
                "protocol" => Target::Protocol,
                other => {
                    return Err(Failure::validation(format!(
                        "unknown sweep target `{other}` (expected dispersion or protocol)"
                    )))
                }
            };
            let schedule = a.schedule.as_deref().map(ScheduleInput::from_json).transpose()?;
            let axes = a.axes.iter().map(|s| s.parse::<Axis>()).collect::<Outcome<Vec<_>>>()?;
            ResolvedRun::Sweep(SweepRun::new(&config, schedule.as_ref(), target, axes, a.out)?)
        }
        Command::Replay(_) => unreachable!("replay is handled before resolution"),
    };
    let seed = match &run {
        ResolvedRun::Manybody(m) => m.lanczos.seed,
        ResolvedRun::Dispersion(d) => d.config.seed,
        ResolvedRun::Protocol(p) => p.config.seed,
        _ => seed.unwrap_or(0),
    };
    Ok((run, seed))
}

fn configure_threads(threads: Option<usize>) -> Outcome<usize> {
    if threads == Some(0) {
        return Err(Failure::validation("--threads must be >= 1"));
    }
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::numerical(format!("thread pool: {e}")))?;
        }
        Ok(rayon::current_num_threads())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(1)
    }
}

fn execute(run: ResolvedRun, seed: u64, threads: usize, out_dir: &Path) -> Outcome<RunManifest> {
    let start = Instant::now();
    let outputs = run.execute(out_dir, Exec::Parallel)?;
    let manifest = RunManifest {
        subcommand: run.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        seed,
        threads,
        config: run,
        outputs,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    manifest.write(out_dir)?;
    Ok(manifest)
}

fn dispatch(cli: Cli) -> Outcome<()> {
    let threads = configure_threads(cli.threads)?;
    let (run, seed) = match cli.command {
        Command::Replay(a) => {
            let m = RunManifest::load(&a.manifest)?;
            (m.config, m.seed)
        }
        cmd => resolve(cmd, cli.seed)?,
    };
    let manifest = execute(run, seed, threads, &cli.out_dir)?;
    for f in &manifest.outputs {
        println!("{}", cli.out_dir.join(f).display());
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(f) = dispatch(cli) {
        eprintln!("error: {f}");
        std::process::exit(f.code);
    }
}
