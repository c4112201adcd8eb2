//! Flag surface. Config-file merging and value parsing live in `config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "kneadsweep",
    version,
    about = "Biparametric symbol sweeps of separatrix dynamics and return-map feasibility diagrams"
)]
pub struct Cli {
    /// Worker threads (default: all cores; env CHAOS_WORKERS overrides).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Report equilibria, spectra, and saddle quantities of a model.
    ModelsInfo(ModelsInfoArgs),
    /// Run a biparametric symbol sweep and write a data container.
    Sweep(SweepArgs),
    /// Return-map diagnostics: feasibility bars, scaling ratios, 1D map samples.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Localize a kneading boundary starting from a sweep container.
    Refine(RefineArgs),
}

#[derive(Args)]
pub struct ModelsInfoArgs {
    /// Model name: chua | acst.
    pub model: String,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    /// Machine-readable output (schema stable across patch versions).
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct SweepArgs {
    /// key=value config file; explicit flags override file entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// chua | acst.
    #[arg(long)]
    pub model: Option<String>,
    /// identity | polar | affine.
    #[arg(long)]
    pub transform: Option<String>,
    /// First swept parameter range, lo:hi.
    #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
    pub u_range: Option<String>,
    /// Second swept parameter range, lo:hi.
    #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
    pub v_range: Option<String>,
    /// Grid cells per axis.
    #[arg(long, value_name = "NU:NV")]
    pub res: Option<String>,
    /// Symbol window, 1-based inclusive.
    #[arg(long, value_name = "I:J")]
    pub window: Option<String>,
    /// full | one-sided | dcp.
    #[arg(long)]
    pub mode: Option<String>,
    /// gamma1 | gamma2.
    #[arg(long)]
    pub branch: Option<String>,
    /// Integration step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Time budget per cell before the run counts as timed out.
    #[arg(long)]
    pub max_time: Option<f64>,
    /// Output container path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional rendered image (.ppm or .png).
    #[arg(long)]
    pub img: Option<PathBuf>,
    /// Colormap seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
pub enum TheoryCommand {
    /// Feasibility diagram of one code over (|mu|, nu0).
    Bars(BarsArgs),
    /// Self-similarity ratios of the code's root intervals along mu.
    Ratios(RatiosArgs),
    /// Sample the 1D return map over a z range.
    #[command(name = "map1d")]
    Map1d(Map1dArgs),
}

/// Return-map constants shared by the theory subcommands.
#[derive(Args)]
pub struct MapParamArgs {
    #[arg(long = "B0", default_value_t = 0.8)]
    pub b0: f64,
    #[arg(long = "R", default_value_t = 1.0)]
    pub r: f64,
    #[arg(long = "Omega0", default_value_t = 3.0)]
    pub omega0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi2: f64,
}

#[derive(Args)]
pub struct BarsArgs {
    /// Binary code, e.g. 11 or 101 (first symbol must be 1).
    #[arg(long)]
    pub code: String,
    #[command(flatten)]
    pub map: MapParamArgs,
    /// |mu| range, log-sampled columns.
    #[arg(long, value_name = "LO:HI", default_value = "2e-3:0.55")]
    pub mu_range: String,
    /// nu0 range, linearly sampled rows.
    #[arg(long, value_name = "LO:HI", default_value = "0.05:0.98")]
    pub nu0_range: String,
    #[arg(long, value_name = "NC:NR", default_value = "600:400")]
    pub res: String,
    /// alternating-minus | alternating-plus | fixed-minus | fixed-plus.
    #[arg(long, default_value = "alternating-minus")]
    pub rule: String,
    /// Output container path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional rendered image (.ppm or .png).
    #[arg(long)]
    pub img: Option<PathBuf>,
    /// Colormap seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args)]
pub struct RatiosArgs {
    /// Binary code, e.g. 11 or 101 (first symbol must be 1).
    #[arg(long)]
    pub code: String,
    #[command(flatten)]
    pub map: MapParamArgs,
    #[arg(long, default_value_t = 0.5)]
    pub nu0: f64,
    /// Scan range in ln|mu|.
    #[arg(long, value_name = "LO:HI", default_value = "-20.7:-9.2", allow_hyphen_values = true)]
    pub lnmu_range: String,
    /// alternating-minus | alternating-plus | fixed-minus | fixed-plus.
    #[arg(long, default_value = "alternating-minus")]
    pub rule: String,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct Map1dArgs {
    #[command(flatten)]
    pub map: MapParamArgs,
    /// Splitting parameter mu.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.5)]
    pub nu0: f64,
    /// Sampled z range (positive, log-spaced).
    #[arg(long, value_name = "LO:HI", default_value = "1e-6:1.0")]
    pub z_range: String,
    #[arg(long, default_value_t = 2000)]
    pub samples: u32,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct RefineArgs {
    /// Sweep container produced by `kneadsweep sweep`.
    pub data: PathBuf,
    /// Grid cell "p,q" (column,row); pair with an adjacent --cell-b.
    #[arg(long, value_name = "P,Q", requires = "cell_b", conflicts_with_all = ["point_a", "point_b"])]
    pub cell_a: Option<String>,
    #[arg(long, value_name = "P,Q", requires = "cell_a")]
    pub cell_b: Option<String>,
    /// Parameter point "u,v"; pair with --point-b on the other side of the boundary.
    #[arg(long, value_name = "U,V", requires = "point_b", allow_hyphen_values = true)]
    pub point_a: Option<String>,
    #[arg(long, value_name = "U,V", requires = "point_a", allow_hyphen_values = true)]
    pub point_b: Option<String>,
    /// Localization tolerance in parameter distance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}
