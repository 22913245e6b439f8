use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use onehot_core::bench::{run, Experiment, ExperimentSpec, OutputFormat};
use onehot_core::simd::ArithmeticProfile;
use onehot_core::{HeError, Result};

#[derive(Parser)]
#[command(name = "onehot-bench", version, about = "Cost-model experiments for encrypted one-hot conversions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bandwidth against server cost per input representation
    Tradeoff(Common),
    /// Precision and overflow of numeric to one-hot conversions
    Num2onehot(Common),
    /// Bounds on the positive shadow-tree constants
    ShadowBounds {
        #[command(flatten)]
        common: Common,
        /// Largest tree depth (2..=8)
        #[arg(long)]
        max_level: Option<usize>,
    },
    /// Equality and comparison circuits
    Comparators(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment spec; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated n values (bit widths for `comparators`)
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    /// Tile shape, e.g. "[n/1,m/s]" or "[n/s,m/1]"
    #[arg(long)]
    shape: Option<String>,
    /// exact | fixed:<frac>:<int> | noisy:<sigma>
    #[arg(long)]
    profile: Option<String>,
    /// Slots per ciphertext (power of two)
    #[arg(long)]
    slots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
}

fn load(experiment: Experiment, common: &Common) -> Result<ExperimentSpec> {
    let mut spec = match &common.config {
        None => ExperimentSpec::new(experiment),
        Some(path) => {
            let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path)?)?;
            let obj = v
                .as_object_mut()
                .ok_or_else(|| HeError::InvalidParameter("config must be a JSON object".into()))?;
            let want = serde_json::to_value(experiment)?;
            match obj.get("experiment") {
                Some(found) if *found != want => {
                    return Err(HeError::InvalidParameter(format!("config is for {found}, not {want}")));
                }
                Some(_) => {}
                None => {
                    obj.insert("experiment".into(), want);
                }
            }
            ExperimentSpec::from_json(&v.to_string())?
        }
    };
    if let Some(n) = &common.n {
        spec.n = Some(n.clone());
    }
    if let Some(s) = &common.shape {
        spec.shape = Some(s.clone());
    }
    if let Some(p) = &common.profile {
        spec.profile = Some(p.parse::<ArithmeticProfile>()?);
    }
    if let Some(s) = common.slots {
        spec.slots = Some(s);
    }
    if let Some(s) = common.seed {
        spec.seed = s;
    }
    if let Some(o) = &common.out {
        spec.out = Some(o.clone());
    }
    if let Some(f) = &common.format {
        spec.format = f.parse::<OutputFormat>()?;
    }
    spec.validate()?;
    Ok(spec)
}

fn execute(cli: Cli) -> Result<()> {
    let spec = match &cli.command {
        Command::Tradeoff(c) => load(Experiment::Tradeoff, c)?,
        Command::Num2onehot(c) => load(Experiment::Num2onehot, c)?,
        Command::Comparators(c) => load(Experiment::ComparatorSuite, c)?,
        Command::ShadowBounds { common, max_level } => {
            let mut spec = load(Experiment::ShadowBounds, common)?;
            if max_level.is_some() {
                spec.max_level = *max_level;
                spec.validate()?;
            }
            spec
        }
    };
    let report = run(&spec)?;
    match &spec.out {
        Some(path) => report.write(spec.format, io::BufWriter::new(fs::File::create(path)?)),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match report.write(spec.format, &mut lock).and_then(|()| Ok(lock.flush()?)) {
                // reader went away (e.g. piped into `head`)
                Err(HeError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r,
            }
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
