use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "slehydro", version, about = "Hydrodynamic limit of multiple SLE: hulls, maps, densities and Dyson simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Hull boundary polylines.
    #[command(allow_negative_numbers = true)]
    Hull(HullArgs),
    /// Values of g_t over a grid of the upper half plane.
    #[command(allow_negative_numbers = true)]
    Gmap(GmapArgs),
    /// Density of the evolved measure and its support.
    #[command(allow_negative_numbers = true)]
    Density(DensityArgs),
    /// One Dyson path: dump plus final-state statistics.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// KS distance to the semicircle against N, plus a raster hull.
    #[command(allow_negative_numbers = true)]
    Converge(ConvergeArgs),
    /// Distance between K_t/√t and the limit shape.
    #[command(allow_negative_numbers = true)]
    Asymptote(AsymptoteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Single,
    Two,
    Atoms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    /// Initial measure: δ₀, (δ₋ₐ + δₐ)/2, or a custom list of atoms.
    #[arg(long, value_enum, default_value = "single")]
    pub source: Source,
    /// Half-distance between the two sources.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Atoms as "loc:weight,loc:weight,..." (weights are normalized).
    #[arg(long, allow_hyphen_values = true)]
    pub atoms: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HullArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Time, or a comma-separated list of times (one file each).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GmapArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Grid as "x_min,x_max,y_min,y_max,nx,ny"; defaults to a window around the hull.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Evaluation points; a grid covering the support when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Option<Vec<f64>>,
    /// Number of grid points when --u is not given.
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DynamicsArgs {
    #[arg(long, default_value_t = 2.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    /// Number of particles.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep every k-th step in the dump.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// Also rasterize the hull at the largest N on an "nx,ny" grid (seed 0).
    #[arg(long)]
    pub raster: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AsymptoteArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32")]
    pub t_list: Vec<f64>,
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}
