use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "covergrowth", version, about = "Ball growth in universal covers and surface capture checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Seed for generated instances; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Work budget (cover edges or lattice work units).
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Write artifacts into this directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Artifacts to emit.
    #[arg(long, global = true, value_delimiter = ',', default_value = "json,csv")]
    pub format: Vec<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metric graph tools.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Same as `graph growth`.
    Growth(GrowthArgs),
    /// Same as `graph witness`.
    Witness(WitnessArgs),
    /// Triangulated surface tools.
    #[command(subcommand)]
    Surface(SurfaceCommand),
    /// Reference curves.
    #[command(subcommand)]
    Ref(RefCommand),
    /// Print a named or random instance in its file format.
    Gen(GenArgs),
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Structural diagnostics.
    Validate(GraphInput),
    /// Ball length in the universal cover over a radius grid.
    Growth(GrowthArgs),
    /// `ln(length) / R` over a radius grid.
    Entropy(GrowthArgs),
    /// Prune leaves and smooth degree-2 vertices.
    Reduce(GraphInput),
    /// Find a witness vertex and tabulate its growth.
    Witness(WitnessArgs),
    /// Find a witness vertex and fail on any violated bound.
    Verify(WitnessArgs),
}

#[derive(Debug, Args)]
pub struct GraphInput {
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Largest radius, as `p/q` or a decimal.
    #[arg(long, default_value = "4")]
    pub rmax: String,
    /// Number of grid steps in `[0, rmax]`.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    /// Center vertex; defaults to the smallest id.
    #[arg(long)]
    pub vertex: Option<u32>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "1/6")]
    pub lambda: String,
    /// Largest verified radius; defaults to `4 (C' + c)` in the input's units.
    #[arg(long)]
    pub rmax: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
}

#[derive(Debug, Subcommand)]
pub enum SurfaceCommand {
    /// Counts, genus, area and systole.
    Validate(SurfaceInput),
    /// Shortest non-contractible loop, overall or based at a vertex.
    Systole(SystoleArgs),
    /// Shortest capturing graph; with `--through`, the height and area check at that vertex.
    Capture(CaptureArgs),
    /// Packing nerve graph and its checks.
    Nerve(NerveArgs),
    /// Capturing graph, witness and radius-by-radius comparisons.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct SurfaceInput {
    #[arg(long)]
    pub surface: PathBuf,
}

#[derive(Debug, Args)]
pub struct SystoleArgs {
    #[arg(long)]
    pub surface: PathBuf,
    #[arg(long)]
    pub vertex: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Greedy,
}

#[derive(Debug, Args)]
pub struct CaptureArgs {
    #[arg(long)]
    pub surface: PathBuf,
    /// Defaults to exact on genus-1 surfaces small enough for it, greedy otherwise.
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub through: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NerveArgs {
    #[arg(long)]
    pub surface: PathBuf,
    #[arg(long, default_value = "1/32")]
    pub r0: String,
    #[arg(long, default_value = "1/64")]
    pub eps: String,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub surface: PathBuf,
    #[arg(long, default_value = "1/32")]
    pub r0: String,
    #[arg(long, default_value = "1/64")]
    pub eps: String,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    /// Extra radii beyond `sys/2`, in multiples of `sys/2`.
    #[arg(long, default_value_t = 0)]
    pub extend: usize,
    /// Run even when the area or systole hypothesis fails.
    #[arg(long)]
    pub diagnostic: bool,
}

#[derive(Debug, Subcommand)]
pub enum RefCommand {
    /// Trivalent tree ball length and hyperbolic disk area.
    Curves(CurvesArgs),
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, default_value = "4")]
    pub rmax: String,
    /// Steps in `[0, rmax]`; defaults to four per unit.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Theta,
    FigureEight,
    Trivalent,
    Random,
    Tetrahedron,
    Octahedron,
    Torus7,
    SubdividedTorus,
    Genus2,
    FineTorus,
    FineGenus2,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// First Betti number for `trivalent` and `random`.
    #[arg(long, default_value_t = 2)]
    pub b: usize,
    #[arg(long, default_value = "1/24")]
    pub min: String,
    #[arg(long, default_value = "1")]
    pub max: String,
}
