//! `phasegate`: synthesize composite gates, map validity regions, report phase
//! quantization and simulate scan experiments. Outputs are JSON/CSV plus a manifest.
//!
//! Exit codes: 0 success, 2 validity/region, 3 I/O, 4 configuration or usage, 1 other.

mod jobs;
mod manifest;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jobs::{Job, RegionParams, SynthParams};
use manifest::{write_outputs, RunManifest};
use phasegate::config::{self, ExperimentConfig, ModelConfig};
use phasegate::region;
use phasegate::synthesis::Variant;
use phasegate::Error;

const EXIT_OTHER: u8 = 1;
const EXIT_VALIDITY: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_CONFIG: u8 = 4;

#[derive(Parser)]
#[command(name = "phasegate", version, about = "Position-controlled composite single-qubit gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one composite gate and verify it.
    Synth(SynthArgs),
    /// Validity map and full-range interval for one variant.
    Region(RegionArgs),
    /// Run an experiment configuration or a figure preset.
    Simulate(SimulateArgs),
    /// Report DAC phase resolution in both quantization modes.
    Quantize(QuantizeArgs),
    /// Rerun a manifest and compare outputs byte for byte.
    Replay(ReplayArgs),
}

fn angle(s: &str) -> Result<f64, String> {
    config::parse_angle(s).map_err(|e| e.to_string())
}

fn angle_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected '<lo>:<hi>', got '{s}'"))?;
    Ok((angle(a)?, angle(b)?))
}

#[derive(Args)]
struct SynthArgs {
    /// Base rotation, radians or "<k>pi".
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    theta0: f64,
    /// Target rotation, radians or "<k>pi".
    #[arg(long = "thetaT", alias = "theta-t", value_parser = angle, allow_hyphen_values = true)]
    theta_t: f64,
    #[arg(long, default_value = "antisym4")]
    variant: Variant,
    /// Write solution.json and a manifest here instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    variant: Variant,
    #[arg(long = "theta0-range", value_parser = angle_range, default_value = "0:pi", allow_hyphen_values = true)]
    theta0_range: (f64, f64),
    #[arg(long = "thetaT-range", alias = "theta-t-range", value_parser = angle_range, default_value = "-2pi:2pi", allow_hyphen_values = true)]
    theta_t_range: (f64, f64),
    #[arg(long, value_parser = angle, default_value = "0.005pi")]
    resolution: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Fig1c,
    Fig2c,
    Fig3,
}

impl Preset {
    fn text(self) -> &'static str {
        match self {
            Preset::Fig1c => include_str!("../presets/fig1c.json"),
            Preset::Fig2c => include_str!("../presets/fig2c.json"),
            Preset::Fig3 => include_str!("../presets/fig3.json"),
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct Source {
    #[arg(long)]
    preset: Option<Preset>,
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured shots per point (0 for noiseless).
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QuantizeArgs {
    /// Model configuration (JSON); defaults are used for missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the DAC resolution.
    #[arg(long)]
    dac_bits: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Also write the regenerated outputs here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        e if e.is_validity() => EXIT_VALIDITY,
        Error::Io(_) => EXIT_IO,
        Error::Config(_) | Error::Domain(_) => EXIT_CONFIG,
        _ => EXIT_OTHER,
    }
}

fn report_error(e: &Error) {
    match e {
        Error::Uncovered { theta0, theta_t, verdicts } => {
            eprintln!("error: no variant covers θ₀ = {:.6}π, θ_T = {:.6}π", theta0 / PI, theta_t / PI);
            for v in verdicts {
                eprintln!("  {v}");
            }
        }
        e => eprintln!("error: {e}"),
    }
}

fn read(path: &Path) -> phasegate::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn build_job(command: &Command) -> phasegate::Result<Job> {
    Ok(match command {
        Command::Synth(a) => Job::Synth(SynthParams { theta0: a.theta0, theta_t: a.theta_t, variant: a.variant }),
        Command::Region(a) => {
            if a.resolution < region::MIN_RESOLUTION * (1.0 - 1e-12) {
                return Err(Error::Config(format!("resolution must be at least 0.001π, got {:.6}π", a.resolution / PI)));
            }
            Job::Region(RegionParams {
                variant: a.variant,
                theta0_range: a.theta0_range,
                theta_t_range: a.theta_t_range,
                resolution: a.resolution,
            })
        }
        Command::Simulate(a) => {
            let text = match (&a.source.preset, &a.source.config) {
                (Some(p), _) => p.text().to_string(),
                (None, Some(path)) => read(path)?,
                (None, None) => unreachable!("clap enforces one source"),
            };
            let mut c = ExperimentConfig::parse(&text)?;
            if let Some(s) = a.seed {
                c.seed = s;
            }
            if let Some(n) = a.shots {
                c.shots = n;
            }
            Job::Simulate(c)
        }
        Command::Quantize(a) => {
            let mut m = match &a.config {
                Some(path) => config::parse_model(&read(path)?)?,
                None => ModelConfig::default(),
            };
            if let Some(b) = a.dac_bits {
                m.dac_bits = b;
                m.awg()?;
            }
            Job::Quantize(m)
        }
        Command::Replay(_) => unreachable!("replay has no job of its own"),
    })
}

fn execute(job: &Job, out: Option<&Path>) -> phasegate::Result<()> {
    let outcome = jobs::run(job)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    match out {
        Some(dir) => {
            let m = write_outputs(dir, job, &outcome.artifacts, &outcome.warnings)?;
            for o in &m.outputs {
                println!("{}", dir.join(&o.path).display());
            }
            println!("{}", dir.join(manifest::MANIFEST_NAME).display());
        }
        None => {
            for a in &outcome.artifacts {
                print!("{}", String::from_utf8_lossy(&a.bytes));
            }
        }
    }
    Ok(())
}

fn replay(a: &ReplayArgs) -> phasegate::Result<bool> {
    let recorded = RunManifest::load(&a.manifest)?;
    let outcome = jobs::run(&recorded.job)?;
    let fresh = match &a.out {
        Some(dir) => write_outputs(dir, &recorded.job, &outcome.artifacts, &outcome.warnings)?,
        None => RunManifest::new(&recorded.job, &outcome.artifacts, &outcome.warnings),
    };
    let mut identical = fresh.outputs.len() == recorded.outputs.len();
    for old in &recorded.outputs {
        let verdict = match fresh.outputs.iter().find(|o| o.path == old.path) {
            Some(new) if new.sha256 == old.sha256 => "identical",
            Some(_) => "DIFFERS",
            None => "MISSING",
        };
        identical &= verdict == "identical";
        println!("{verdict} {}", old.path);
    }
    Ok(identical)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    let result = match &cli.command {
        Command::Replay(a) => replay(a).map(|same| if same { ExitCode::SUCCESS } else { ExitCode::from(EXIT_OTHER) }),
        command => {
            let out = match command {
                Command::Synth(a) => a.out.as_deref(),
                Command::Region(a) => Some(a.out.as_path()),
                Command::Simulate(a) => Some(a.out.as_path()),
                Command::Quantize(a) => a.out.as_deref(),
                Command::Replay(_) => None,
            };
            build_job(command).and_then(|job| execute(&job, out)).map(|()| ExitCode::SUCCESS)
        }
    };
    result.unwrap_or_else(|e| {
        report_error(&e);
        ExitCode::from(exit_code(&e))
    })
}
