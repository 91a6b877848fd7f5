//! `tropwave`: waves, dynamics, curves, refinement and the lift from the
//! command line. Every command writes its artifacts and a `manifest.json`
//! with SHA-256 digests into `--out`.

mod bundle;
mod commands;
mod config;
mod fail;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Overrides;

#[derive(Parser)]
#[command(name = "tropwave", version, about = "Exact tropical series and wave dynamics on rational polygons")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// One wave G_p: event JSON, the new series and before/after SVGs.
    Wave {
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long)]
        series: Option<PathBuf>,
        /// Wave point as x,y (rationals).
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Iterate the waves of a point set until the series stabilizes.
    Dynamics {
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long)]
        series: Option<PathBuf>,
        /// JSON array of ["x", "y"] points.
        #[arg(long)]
        points: PathBuf,
        /// Visit points in a freshly shuffled order each sweep (seeded).
        #[arg(long)]
        shuffle: bool,
    },
    /// Avalanche statistics of random dynamics from the zero series.
    Stats {
        /// Defaults to the unit square.
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Check Trop(S_p F) = G_val(p) Trop(F), for one instance or by fuzzing.
    LiftCheck {
        /// Polynomial file with lines A(i,j)=(num)/(den).
        #[arg(long, requires = "point")]
        poly: Option<PathBuf>,
        /// p1;p2 as field elements, e.g. "t^(1);t^(2)".
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        terms: usize,
    },
    /// Blow up corners until the series is nice on a unimodular polygon.
    /// With only --domain, the series is the distance function l_Ω.
    MakeNice {
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long)]
        eps: String,
    },
    /// A nice smooth series of the given quasi-degree close to the boundary.
    Verge {
        #[arg(long)]
        domain: PathBuf,
        /// Side multiplicities in side order, e.g. 2,1,2,1.
        #[arg(long)]
        degree: String,
        #[arg(long)]
        eps: String,
    },
    /// Run the dynamic from a nice smooth series and certify a coarse replay.
    Coarsen {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Extract, classify and render the curve of a series.
    Curve {
        #[arg(long)]
        series: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.overrides.resolve().and_then(|cfg| commands::run(&cli.cmd, &cfg));
    match result {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("tropwave: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
