use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pqkant::convergence::DEFAULT_N_LIST;
use pqkant::BasisMode;
use serde::{Deserialize, Deserializer, Serialize};

#[derive(Debug, Parser)]
#[command(name = "pqkant", version, about = "(p,q) Kantorovich-Stancu-Schurer operators of Chlodowsky type")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an operator at one point.
    Eval(EvalArgs),
    /// Compare closed-form moments with brute force.
    Verify(VerifyArgs),
    /// Error bounds over a grid of x.
    Bounds(BoundsArgs),
    /// Korovkin and vanishing-function sweeps.
    Converge(ConvergeArgs),
    /// Re-run a manifest.
    Replay(ReplayArgs),
}

/// Operator parameters. Reals accept decimals or fractions such as `4/5`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OperatorArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    #[arg(long, default_value = "0")]
    #[serde(deserialize_with = "real_text")]
    pub alpha: String,
    #[arg(long, default_value = "0")]
    #[serde(deserialize_with = "real_text")]
    pub beta: String,
    #[arg(long, default_value = "1")]
    #[serde(deserialize_with = "real_text")]
    pub bn: String,
    #[arg(long, default_value = "1")]
    #[serde(deserialize_with = "real_text")]
    pub p: String,
    #[arg(long, default_value = "1")]
    #[serde(deserialize_with = "real_text")]
    pub q: String,
    #[arg(long, default_value_t = BasisMode::Normalized)]
    pub mode: BasisMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    /// `K_{n,m}^{(alpha,beta)}` on `[0, b_n]`
    K,
    /// `T_{n,m}` on `[0, 1]`
    T,
    /// Extension of `K` to `[0, inf)`
    U,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    /// JSON object whose keys mirror the flags; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Builtin function: const1, id, square, sin, absdev:<a>, lip:<a>:<gamma>, bump:<C>.
    #[arg(long = "fn", id = "fn")]
    #[serde(rename = "fn")]
    pub function: Option<String>,
    #[arg(long)]
    #[serde(default, deserialize_with = "optional_real_text")]
    pub x: Option<String>,
    #[arg(long, value_enum, default_value_t = OperatorKind::K)]
    pub operator: OperatorKind,
    /// Relative tolerance of truncated (p,q)-integrals.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Also write the result as JSON, with a manifest alongside.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(default, deserialize_with = "optional_real_text")]
    pub x: Option<String>,
    /// Rational arithmetic (requires n + m <= 12).
    #[arg(long)]
    pub exact: bool,
    /// Output JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long = "fn", id = "fn")]
    #[serde(rename = "fn")]
    pub function: Option<String>,
    /// Number of x values, uniform on `[0, b_n]`.
    #[arg(long, default_value_t = 65)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConvergeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Rule for p_n: default-p, default-q, cbrt, linear, const:<c>, pow:<e>.
    #[arg(long, default_value = "default-p")]
    pub p_rule: String,
    #[arg(long, default_value = "default-q")]
    pub q_rule: String,
    #[arg(long, default_value = "cbrt")]
    pub b_rule: String,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_N_LIST)]
    pub n_list: Vec<usize>,
    /// CSV table `n,p,q,b` replacing the rules and the n list.
    #[arg(long)]
    pub seq_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Extra functions for the weighted sweep.
    #[arg(long, value_delimiter = ',')]
    pub extra: Vec<String>,
    /// Run the unweighted sweep of a compactly supported function instead.
    #[arg(long)]
    pub vanish: Option<String>,
    #[arg(long, default_value_t = 257)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Only report the sequence hypotheses.
    #[arg(long)]
    pub check_only: bool,
    /// Output path (CSV, or JSON with --check-only).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write the output here instead of the recorded path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Real parameters are kept as text so that fractions survive; config
/// files may give them as JSON numbers.
#[derive(Deserialize)]
#[serde(untagged)]
enum RealText {
    Text(String),
    Number(serde_json::Number),
}

impl From<RealText> for String {
    fn from(r: RealText) -> String {
        match r {
            RealText::Text(s) => s,
            RealText::Number(n) => n.to_string(),
        }
    }
}

fn real_text<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    RealText::deserialize(d).map(String::from)
}

fn optional_real_text<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    Option::<RealText>::deserialize(d).map(|r| r.map(String::from))
}
