use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agmm::eval::{self, SceneSpec};
use agmm::io::{self, EmitFlags, InputSource, RunConfig};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "agmm", version, about = "Adaptive mixture-of-Gaussians background subtraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline over a frame directory or a raw RGB24 stream.
    Run {
        /// JSON run config; omitted fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory of frame_*.ppm files, or `-` for raw RGB24 on stdin.
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        frames: Option<u64>,
        /// Comma-separated subset of masks,overlays,events,stats.
        #[arg(long)]
        emit: Option<String>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
    },
    /// Render a synthetic scene and its ground truth.
    Gen {
        /// Scene spec JSON; the built-in standard scene when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predicted masks against ground-truth masks.
    Score {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = eval::DEFAULT_WARMUP)]
        warmup: usize,
    },
    /// Measure in-memory pipeline throughput on a synthetic scene.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => Ok(RunConfig::load(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn load_spec(path: Option<&Path>) -> Result<SceneSpec> {
    let Some(path) = path else {
        return Ok(SceneSpec::standard());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading scene spec {}", path.display()))?;
    let spec: SceneSpec = serde_json::from_str(&text).with_context(|| format!("parsing scene spec {}", path.display()))?;
    spec.validate()?;
    Ok(spec)
}

fn read_masks(dir: &Path) -> Result<Vec<io::ClassMap>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pgm"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            io::decode_mask(&bytes).with_context(|| format!("decoding {}", p.display()))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, input, output, frames, emit, width, height } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(i) = input {
                cfg.input = InputSource::parse(&i);
            }
            if let Some(o) = output {
                cfg.output = o;
            }
            if frames.is_some() {
                cfg.frames = frames;
            }
            if let Some(list) = emit {
                cfg.emit = EmitFlags::parse_list(&list)?;
            }
            cfg.width = width.or(cfg.width);
            cfg.height = height.or(cfg.height);
            let stats = io::run_pipeline(&cfg)?;
            println!("{}", serde_json::to_string(&stats)?);
        }
        Command::Gen { spec, seed, out } => {
            let spec = load_spec(spec.as_deref())?;
            let (frames, truth) = eval::generate_scene(&spec, seed)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for (f, t) in frames.iter().zip(&truth.frames) {
                let i = f.index;
                fs::write(out.join(format!("frame_{i:06}.ppm")), io::encode_frame(f))?;
                fs::write(out.join(format!("truth_{i:06}.pgm")), io::encode_mask(t))?;
            }
            let summary = serde_json::json!({
                "frames": frames.len(),
                "width": spec.width,
                "height": spec.height,
                "seed": seed,
                "out": out,
            });
            println!("{summary}");
        }
        Command::Score { pred, truth, warmup } => {
            let pred = read_masks(&pred)?;
            let truth = read_masks(&truth)?;
            if pred.is_empty() {
                bail!("no .pgm masks found in the prediction directory");
            }
            let report = eval::score(&pred, &truth, warmup)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Bench { config, spec, reps, seed } => {
            let cfg = load_config(config.as_deref())?;
            let spec = load_spec(spec.as_deref())?;
            let report = eval::benchmark(&cfg, &spec, reps, seed)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
