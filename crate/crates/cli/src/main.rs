use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use wsce_core::dataset::{corrupt, normalize, CorruptionKind, CorruptionSpec};
use wsce_core::harness::{
    run, run_sweep, write_sweep_csv, DataSource, Method, RunConfig, RunOptions, SweepAxis,
    DEFAULT_ENSEMBLE_SIZE, DEFAULT_REPEATS,
};
use wsce_core::{AffinityExponent, FeatureSelection};

#[derive(Parser)]
#[command(name = "wsce", version, about = "Weighted spectral cluster ensemble experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its manifest.
    Run(RunArgs),
    /// Run a grid over corruption rate or retained-feature fraction.
    Sweep(SweepArgs),
    /// Generate (and optionally corrupt) a dataset and write it as CSV.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// CSV path, or `half-ring[:N[:NOISE_STD]]` for the synthetic generator.
    #[arg(long)]
    data: String,
    /// Name of the ground-truth column in the CSV.
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args, Clone)]
struct PipelineArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Final cluster count.
    #[arg(long)]
    k: usize,
    /// Retained decorrelated features; 0 keeps all.
    #[arg(long, default_value_t = 0, conflicts_with = "d_frac")]
    d: usize,
    /// Retained features as a fraction of m.
    #[arg(long)]
    d_frac: Option<f64>,
    /// Neighbors kept per node (default max(7, ceil(log2 n))).
    #[arg(long)]
    knn: Option<usize>,
    /// Use exp(-d / (phi_i phi_j)) instead of the squared distance.
    #[arg(long)]
    unsquared: bool,
    #[arg(long, default_value_t = DEFAULT_ENSEMBLE_SIZE)]
    ensemble_size: usize,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of cells receiving unit Gaussian noise.
    #[arg(long, conflicts_with = "missing")]
    noise: Option<f64>,
    /// Fraction of cells replaced by their column mean.
    #[arg(long)]
    missing: Option<f64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

impl PipelineArgs {
    fn config(&self, method: Method) -> Result<RunConfig> {
        let source = DataSource::parse(&self.data.data, self.data.label.clone())?;
        let mut cfg = RunConfig::new(source, self.k);
        cfg.features = match self.d_frac {
            Some(f) => FeatureSelection::Fraction(f),
            None => FeatureSelection::Count(self.d),
        };
        cfg.knn = self.knn;
        cfg.exponent = if self.unsquared {
            AffinityExponent::Unsquared
        } else {
            AffinityExponent::Squared
        };
        cfg.ensemble_size = self.ensemble_size;
        cfg.repeats = self.repeats;
        cfg.seed = self.seed;
        cfg.method = method;
        cfg.corruption = corruption(self.noise, self.missing, self.seed);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn corruption(noise: Option<f64>, missing: Option<f64>, seed: u64) -> Option<CorruptionSpec> {
    match (noise, missing) {
        (Some(rate), _) => Some(CorruptionSpec { kind: CorruptionKind::Noise, rate, seed }),
        (None, Some(rate)) => Some(CorruptionSpec { kind: CorruptionKind::Missing, rate, seed }),
        (None, None) => None,
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, default_value = "wsce")]
    method: String,
    /// Also write similarity triples, co-association matrices and merge lists.
    #[arg(long)]
    dump_intermediates: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// noise, missing or d_frac.
    #[arg(long)]
    axis: String,
    /// Comma-separated ascending values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    /// Comma-separated methods; one CSV row per (value, method).
    #[arg(long, value_delimiter = ',', default_value = "wsce")]
    method: Vec<String>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corrupt this fraction of (normalized) cells with unit Gaussian noise.
    #[arg(long, conflicts_with = "missing")]
    noise: Option<f64>,
    /// Replace this fraction of (normalized) cells by their column mean.
    #[arg(long)]
    missing: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Where to write the (row, col) corruption mask.
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let method: Method = args.method.parse()?;
    let cfg = args.pipeline.config(method)?;
    let out = &args.pipeline.out_dir;
    let opts = RunOptions {
        dump_dir: args.dump_intermediates.then(|| out.join("intermediates")),
    };
    let manifest = run(&cfg, &opts)?;
    let path = out.join(format!("manifest_{method}.json"));
    write_file(&path, &manifest.to_json()?)?;
    match (manifest.mean_accuracy, manifest.std_accuracy) {
        (Some(mean), Some(std)) => println!(
            "{} {method}: accuracy {:.2} ± {:.2} over {} repeat(s)",
            manifest.dataset.name,
            100.0 * mean,
            100.0 * std,
            manifest.repeats.len()
        ),
        _ => println!("{} {method}: done (no labels)", manifest.dataset.name),
    }
    println!("manifest: {}", path.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let axis: SweepAxis = args.axis.parse()?;
    let methods = args
        .method
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<Result<Vec<_>, _>>()?;
    let base = args.pipeline.config(methods[0])?;
    let cells = run_sweep(&base, axis, &args.values, &methods)?;

    let out = &args.pipeline.out_dir;
    fs::create_dir_all(out)?;
    let csv_path = out.join(format!("sweep_{axis}.csv"));
    write_sweep_csv(&cells, fs::File::create(&csv_path)?)?;
    let json_path = out.join(format!("sweep_{axis}.json"));
    write_file(&json_path, &serde_json::to_string_pretty(&cells)?)?;
    for cell in &cells {
        let (mean, std) = cell.mean_std();
        match &cell.error {
            None => println!("{axis}={} {}: {:.2} ± {:.2}", cell.value, cell.method, 100.0 * mean, 100.0 * std),
            Some(e) => println!("{axis}={} {}: FAILED ({e})", cell.value, cell.method),
        }
    }
    println!("sweep table: {}", csv_path.display());
    let failed = cells.iter().filter(|c| c.error.is_some()).count();
    if failed == cells.len() {
        bail!("every sweep cell failed");
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let source = DataSource::parse(&args.data.data, args.data.label.clone())?;
    let ds = source.load(args.seed)?;
    match corruption(args.noise, args.missing, args.seed) {
        Some(spec) => {
            let (normalized, _) = normalize(&ds);
            let corrupted = corrupt(&normalized, &spec)?;
            corrupted.dataset.save_csv(&args.out)?;
            if let Some(mask_path) = &args.mask_out {
                corrupted.write_mask_csv(fs::File::create(mask_path)?)?;
            }
            println!(
                "wrote {} ({} corrupted cells)",
                args.out.display(),
                corrupted.mask.len()
            );
        }
        None => {
            if args.mask_out.is_some() {
                bail!("--mask-out requires --noise or --missing");
            }
            ds.save_csv(&args.out)?;
            println!("wrote {}", args.out.display());
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Synth(args) => cmd_synth(args),
    }
}
