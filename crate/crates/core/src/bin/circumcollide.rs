use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use circumcollide::detect::Method;
use circumcollide::harness::{
    compare, run_scene, sweep_d, write_compare_csv, write_sweep_csv, SceneConfig, DEFAULT_D_VALUES,
};
use circumcollide::{Error, Result};
use clap::{Args, Parser, Subcommand};

/// Deformable collision experiments with curvature-adaptive circumspheres.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scene file, or a built-in scene name (cloth-over-sphere, two-sphere-impact, sphere-drop-on-plane).
    #[arg(long)]
    scene: String,
    /// Output CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scene's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the scene's frame count.
    #[arg(long)]
    frames: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scene and write per-frame metrics.
    Run {
        #[command(flatten)]
        common: Common,
        /// Detection method, overriding the scene's.
        #[arg(long)]
        method: Option<Method>,
    },
    /// Repeat a scene over several update thresholds.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<f64>>,
    },
    /// Repeat a scene with each detection method.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "circumsphere,bounding-ball,polygon-exact"
        )]
        methods: Vec<Method>,
    },
}

fn load(common: &Common) -> Result<SceneConfig> {
    let mut config = SceneConfig::resolve(&common.scene)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(frames) = common.frames {
        config.frames = frames;
    }
    config.validate()?;
    Ok(config)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })
}

fn out_path(common: &Common, config: &SceneConfig, fallback: &str) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from(fallback))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, method } => {
            let mut config = load(&common)?;
            if let Some(m) = method {
                config.method = m;
            }
            let out = out_path(&common, &config, "metrics.csv");
            let rows = run_scene(&config, Some(&out))?;
            eprintln!("{} frames written to {}", rows.len(), out.display());
        }
        Command::Sweep { common, d } => {
            let config = load(&common)?;
            let d = d.unwrap_or_else(|| DEFAULT_D_VALUES.to_vec());
            let rows = sweep_d(&config, &d)?;
            let out = out_path(&common, &config, "sweep.csv");
            write_sweep_csv(create(&out)?, &rows)?;
            eprintln!("{} thresholds written to {}", rows.len(), out.display());
        }
        Command::Compare { common, methods } => {
            let config = load(&common)?;
            let rows = compare(&config, &methods)?;
            let out = out_path(&common, &config, "compare.csv");
            write_compare_csv(create(&out)?, &rows)?;
            eprintln!("{} methods written to {}", rows.len(), out.display());
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Instability { .. } => 3,
        Error::File { .. } | Error::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
