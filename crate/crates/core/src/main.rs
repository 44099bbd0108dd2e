//! Thin scenario-driven CLI over the library; see the library examples for
//! programmatic use.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cquant::error::{Error, Result};
use cquant::point::Point;
use cquant::runner;
use cquant::scenario::{parse_scenario, preset, Scenario, PRESET_NAMES};

#[derive(Parser)]
#[command(
    name = "cquant",
    version,
    about = "Constrained quantization scenarios: codebooks, error curves, dimension estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (flat `key = value` sections).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Worker threads (0 = automatic).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one codebook and write `codebook.txt` + `summary.csv`.
    Quantize(Common),
    /// Solve the whole n-list and write `curve.csv`.
    Curve(Common),
    /// Curve plus dimension fits, box counts, and condition checks
    /// (`curve.csv`, `report.json`).
    Dimension(Common),
    /// Regularity checks only (`checks.json`).
    Check(Common),
    /// Project points onto the constraint set (`projection.csv`).
    Project {
        #[command(flatten)]
        common: Common,
        /// Optional plain-text point list (`x y [z]` rows); defaults to the
        /// scenario measure's atoms.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Run a named built-in scene end to end (quantize + curve + report +
    /// checks).
    Reproduce {
        /// One of: circle-disc, cantor-line, dirac-circle, vshape,
        /// circle-ball-half.
        preset: String,
        #[command(flatten)]
        common: Common,
    },
}

fn load_scenario(common: &Common) -> Result<Scenario> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config <path> is required for this subcommand".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read scenario {path:?}: {e}")))?;
    let mut sc = parse_scenario(&text, path.parent())?;
    if let Some(seed) = common.seed {
        sc = sc.with_seed(seed);
    }
    Ok(sc)
}

fn init_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn parse_point_rows(text: &str) -> Result<Vec<Point>> {
    let mut pts = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Config(format!("line {}: bad number {t:?}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        match coords.len() {
            2 => pts.push(Point::xy(coords[0], coords[1])),
            3 => pts.push(Point::new(coords[0], coords[1], coords[2])),
            n => {
                return Err(Error::Config(format!(
                    "line {}: expected 2 or 3 coordinates, got {n}",
                    lineno + 1
                )));
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::Config("point file holds no points".into()));
    }
    Ok(pts)
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::Quantize(common) => {
            init_threads(common.threads);
            let sc = load_scenario(&common)?;
            runner::run_quantize(&sc, &common.out)
        }
        Command::Curve(common) => {
            init_threads(common.threads);
            let sc = load_scenario(&common)?;
            runner::run_curve(&sc, &common.out).map(|(_, path)| vec![path])
        }
        Command::Dimension(common) => {
            init_threads(common.threads);
            let sc = load_scenario(&common)?;
            runner::run_analyze(&sc, &common.out).map(|(_, files)| files)
        }
        Command::Check(common) => {
            init_threads(common.threads);
            let sc = load_scenario(&common)?;
            runner::run_check(&sc, &common.out)
        }
        Command::Project { common, points } => {
            init_threads(common.threads);
            let sc = load_scenario(&common)?;
            let pts = points
                .map(|p| {
                    let text = std::fs::read_to_string(&p)
                        .map_err(|e| Error::Config(format!("cannot read points {p:?}: {e}")))?;
                    parse_point_rows(&text)
                })
                .transpose()?;
            runner::run_project(&sc, pts.as_deref(), &common.out)
        }
        Command::Reproduce {
            preset: name,
            common,
        } => {
            init_threads(common.threads);
            let mut sc = preset(&name)?;
            if let Some(seed) = common.seed {
                sc = sc.with_seed(seed);
            }
            let out = if common.out == std::path::Path::new("out") {
                common.out.join(&name)
            } else {
                common.out.clone()
            };
            runner::run_reproduce(&sc, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Config(_)) && e.to_string().contains("unknown preset") {
                eprintln!("available presets: {}", PRESET_NAMES.join(", "));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
