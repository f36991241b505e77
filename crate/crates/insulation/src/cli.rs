//! Command-line flags. Every flag struct doubles as the schema of the JSON
//! config file, keyed by the long flag name.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::config::one_or_many;
use crate::output::Format;
use crate::shapes::Preset;

#[derive(Debug, Parser)]
#[command(name = "insulation", version, about = "Robin insulation functional: radial solutions, web bounds, finite elements")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct Common {
    /// JSON file with default values for any flag
    #[arg(long, global = true, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Write records here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for random shapes
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Exit with status 1 when a checked property fails
    #[arg(long, global = true)]
    pub test: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form minimizer on a spherical shell, over parameter grids
    Radial(RadialArgs),
    /// I(δ) and the sign of dI/dδ against the threshold δ*
    SweepDelta(SweepArgs),
    /// Web-function upper bound for a convex body
    WebBound(WebArgs),
    /// Finite-element minimizer on the layer D + δB minus D
    Fem(FemArgs),
    /// Finite-element values of several shapes against the equal-perimeter disk
    CompareShapes(CompareArgs),
    /// Steiner formulas on seeded random convex polygons
    SteinerCheck(SteinerArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RadialArgs {
    /// Dimensions (comma-separated grid)
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(deserialize_with = "one_or_many")]
    pub p: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(deserialize_with = "one_or_many")]
    pub beta: Option<Vec<f64>>,
    /// Inner radius
    #[arg(long = "R", alias = "r", value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(rename = "R", deserialize_with = "one_or_many")]
    pub radius: Option<Vec<f64>>,
    /// Shell thickness
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(deserialize_with = "one_or_many")]
    pub delta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long = "R", alias = "r", allow_negative_numbers = true)]
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    /// Explicit thickness grid; overrides --delta-max/--steps
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(deserialize_with = "one_or_many")]
    pub delta: Option<Vec<f64>>,
    /// Uniform grid on (0, delta-max]
    #[arg(long)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ShapeSource {
    /// Polygon file, one `x y` per line
    #[arg(long, value_name = "PATH")]
    pub shape: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Ball of this radius
    #[arg(long)]
    pub ball: Option<f64>,
    /// Rescale the shape or preset to this perimeter
    #[arg(long)]
    pub perimeter: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct Physics {
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct Resolution {
    /// Number of rings L
    #[arg(long)]
    pub rings: Option<usize>,
    /// Nodes per ring M
    #[arg(long)]
    pub per_ring: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct WebArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: ShapeSource,
    /// Steiner polynomial file {"n", "W"}
    #[arg(long, value_name = "PATH")]
    pub steiner: Option<PathBuf>,
    /// Square of this side length
    #[arg(long)]
    pub square: Option<f64>,
    /// Dimension for --ball
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: Physics,
    /// Also run the finite-element solver and check the full chain
    #[arg(long)]
    pub fem: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub resolution: Resolution,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IterationArg {
    #[default]
    Reweighted,
    Newton,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SolverArgs {
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub eps_reg: Option<f64>,
    #[arg(long, value_enum)]
    pub iteration: Option<IterationArg>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct FemArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: ShapeSource,
    /// Solve on a mesh file instead of building one
    #[arg(long, value_name = "PATH")]
    pub import_mesh: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    #[serde(flatten)]
    pub resolution: Resolution,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Number of levels, doubling L and M each time
    #[arg(long)]
    pub refine: Option<usize>,
    /// Write the (finest) mesh here
    #[arg(long, value_name = "PATH")]
    pub export_mesh: Option<PathBuf>,
    /// Write the (finest) mesh and nodal values here
    #[arg(long, value_name = "PATH")]
    pub export_solution: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct CompareArgs {
    /// Polygon files (repeatable)
    #[arg(long = "shape", value_name = "PATH")]
    #[serde(rename = "shape", deserialize_with = "one_or_many")]
    pub shapes: Option<Vec<PathBuf>>,
    /// Preset shapes (comma-separated)
    #[arg(long = "preset", value_enum, value_delimiter = ',')]
    #[serde(rename = "preset", deserialize_with = "one_or_many")]
    pub presets: Option<Vec<Preset>>,
    /// Common perimeter every shape is rescaled to
    #[arg(long)]
    pub perimeter: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    #[serde(flatten)]
    pub resolution: Resolution,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SteinerArgs {
    /// Number of random polygons
    #[arg(long)]
    pub count: Option<usize>,
    /// Offsets to test (comma-separated)
    #[arg(long = "deltas", value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(rename = "deltas", deserialize_with = "one_or_many")]
    pub deltas: Option<Vec<f64>>,
    /// Upper bound on the points drawn per polygon
    #[arg(long)]
    pub max_points: Option<usize>,
    #[arg(long)]
    pub perimeter: Option<f64>,
    /// Check this polygon file as well
    #[arg(long, value_name = "PATH")]
    pub shape: Option<PathBuf>,
}
