use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "uat-topo", version, about = "Superactivation lookup, shallow networks, and certified reports")]
pub struct Cli {
    /// Write the JSON report to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate or self-check the superactivation function.
    #[command(subcommand)]
    Sigma(SigmaCmd),
    /// Single-neuron approximation of a univariate target.
    #[command(subcommand)]
    Neuron(NeuronCmd),
    /// Shallow networks over a basic family of features.
    #[command(subcommand)]
    Tfnn(TfnnCmd),
    /// Networks over linear functionals on Euclidean or function spaces.
    #[command(subcommand)]
    Lcs(LcsCmd),
    /// Superposition networks on products of cubes.
    #[command(subcommand)]
    Kst(KstCmd),
    /// Regenerate the checked-in golden files.
    #[command(subcommand)]
    Golden(GoldenCmd),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Literal,
    Smooth,
}

impl Mode {
    pub fn sigma_mode(self) -> uat_topo_core::SigmaMode {
        match self {
            Mode::Literal => uat_topo_core::SigmaMode::PaperLiteral,
            Mode::Smooth => uat_topo_core::SigmaMode::SmoothGlued,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaKind {
    Ramp,
    Tanh,
    Super,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaCmd {
    /// Print σ at one point.
    Eval(SigmaEvalArgs),
    /// Check segment values and junction smoothness for m ≤ mmax.
    Check(SigmaCheckArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(group(clap::ArgGroup::new("point").required(true).args(["t", "segment"])))]
pub struct SigmaEvalArgs {
    /// Scale α > 0, as a fraction or decimal.
    #[arg(long, default_value = "1")]
    pub alpha: String,
    #[arg(long, value_enum, default_value_t = Mode::Literal)]
    pub mode: Mode,
    /// Global coordinate t.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// `M,TAU`: segment index and local coordinate in [0, 1].
    #[arg(long)]
    pub segment: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SigmaCheckArgs {
    #[arg(long, default_value = "1")]
    pub alpha: String,
    #[arg(long, value_enum, default_value_t = Mode::Literal)]
    pub mode: Mode,
    #[arg(long, default_value_t = 100)]
    pub mmax: u64,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeuronCmd {
    /// Find one neuron σ(w x − θ) within eps of the target on [a, b].
    Fit(NeuronFitArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["target", "csv"])))]
pub struct NeuronFitArgs {
    /// Built-in target: sin, cos, exp, abs, runge, square.
    #[arg(long)]
    pub target: Option<String>,
    /// `x,value` table with a header row, interpolated piecewise-linearly.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Mode::Literal)]
    pub mode: Mode,
    #[arg(long, default_value = "1")]
    pub alpha: String,
    #[arg(long, default_value_t = uat_topo_core::neuron::DEFAULT_MAX_DEGREE)]
    pub max_degree: usize,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TfnnCmd {
    /// Assemble a network from a decomposition, or fit one over a feature table.
    Fit(TfnnFitArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["demo", "csv"])))]
pub struct TfnnFitArgs {
    /// Built-in decomposition demo: xy.
    #[arg(long)]
    pub demo: Option<String>,
    /// Sample table: columns `id,g` then one column per feature.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Points per side of the demo grid.
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Mode::Literal)]
    pub mode: Mode,
    /// Activation for table fits.
    #[arg(long, value_enum, default_value_t = SigmaKind::Tanh)]
    pub sigma: SigmaKind,
    /// Log-spaced weight magnitudes per feature for table fits.
    #[arg(long, default_value_t = 4)]
    pub weights: usize,
    /// Shift centers per feature for table fits.
    #[arg(long, default_value_t = 8)]
    pub centers: usize,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LcsCmd {
    /// Fit Σ c σ(w f(x) − θ) over a family of linear functionals.
    Fit(LcsFitArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["target", "csv"])))]
pub struct LcsFitArgs {
    /// `euclidean:D` or `funcspace:GRID`.
    #[arg(long)]
    pub space: String,
    /// Number of functionals.
    #[arg(long)]
    pub family: usize,
    #[arg(long, value_enum, default_value_t = SigmaKind::Ramp)]
    pub sigma: SigmaKind,
    /// Built-in target: max or norm2 (euclidean), mean-square (funcspace).
    #[arg(long)]
    pub target: Option<String>,
    /// One row per point: coordinates then the target value, with a header row.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 5e-2)]
    pub eps: f64,
    /// Sample size for built-in targets.
    #[arg(long, default_value_t = 61)]
    pub points: usize,
    /// Shift centers per functional.
    #[arg(long, default_value_t = 16)]
    pub centers: usize,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KstCmd {
    /// Backfit a superposition network and replace each outer function by one neuron.
    Fit(KstFitArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["target", "csv"])))]
pub struct KstFitArgs {
    /// Factor dimensions, e.g. `1,1`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub resolution: u32,
    #[arg(long, default_value_t = 1e-2)]
    pub eps: f64,
    #[arg(long, default_value_t = 20)]
    pub sweeps: usize,
    /// Built-in target on the unit cube: mean, product, sin-sum.
    #[arg(long)]
    pub target: Option<String>,
    /// One row per point: coordinates then the target value, with a header row.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Points per side of the sample grid for built-in targets.
    #[arg(long, default_value_t = 17)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = Mode::Literal)]
    pub mode: Mode,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoldenCmd {
    /// Write the enumeration table and σ self-check snapshot.
    Dump(GoldenDumpArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GoldenDumpArgs {
    #[arg(long, default_value = "docs/golden")]
    pub dir: PathBuf,
}
