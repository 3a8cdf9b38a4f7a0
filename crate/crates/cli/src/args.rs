use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qcalc_core::expr::parse_real;

#[derive(Parser, Debug)]
#[command(
    name = "qcalc",
    version,
    about = "Quantum, symmetric and time-scale difference calculus from the command line"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    pub output: Output,

    /// Absolute tolerance for series truncation.
    #[arg(long, value_parser = real, global = true)]
    pub abs_tol: Option<f64>,

    /// Relative tolerance for series truncation.
    #[arg(long, value_parser = real, global = true)]
    pub rel_tol: Option<f64>,

    /// Term cap for series.
    #[arg(long, env = "QCALC_MAX_TERMS", global = true)]
    pub max_terms: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a difference operator at one or more points.
    Deriv(DerivArgs),
    /// Evaluate an integral.
    Integ(IntegArgs),
    /// Euler-Lagrange residuals of a candidate extremal.
    ElCheck(ProblemArgs),
    /// First variation and convexity sampling.
    VarCheck(VarCheckArgs),
    /// Holder, Cauchy-Schwarz or Minkowski inequality.
    Ineq(IneqArgs),
    /// Mean value witnesses.
    Mvt(MvtArgs),
    /// Leitmann's direct method: checks the transformation identity.
    Leitmann(LeitmannArgs),
    /// Jump operators and diamond weights of a time scale.
    TsQuery(TsQueryArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Deriv(_) => "deriv",
            Command::Integ(_) => "integ",
            Command::ElCheck(_) => "el-check",
            Command::VarCheck(_) => "var-check",
            Command::Ineq(_) => "ineq",
            Command::Mvt(_) => "mvt",
            Command::Leitmann(_) => "leitmann",
            Command::TsQuery(_) => "ts-query",
        }
    }
}

pub fn real(s: &str) -> Result<f64, String> {
    parse_real(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct FnArgs {
    /// Function of t, e.g. "1/t^2".
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: Option<String>,

    /// Point override for f, as "t=0.5:1".
    #[arg(long = "override")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<String>,

    /// Second function of t.
    #[arg(long = "g", allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,

    /// Point override for g.
    #[arg(long = "g-override")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub g_overrides: Vec<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct ParamArgs {
    #[arg(long, value_parser = real)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,

    #[arg(long, value_parser = real)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,

    /// Step of the h-calculus.
    #[arg(long, value_parser = real)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,

    #[arg(long, value_parser = real)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,

    #[arg(long, value_parser = real)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,

    /// Time scale, e.g. "union(interval(0,1),points(2,4))".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,

    /// Diamond-alpha weight in [0, 1].
    #[arg(long, value_parser = real)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivOp {
    Hahn,
    Q,
    HForward,
    HBackward,
    HahnSym,
    QSym,
    AbSym,
    Delta,
    Nabla,
    DiamondAlpha,
    SymDiamond,
}

#[derive(Args, Debug, Serialize)]
pub struct DerivArgs {
    #[arg(long, value_enum)]
    pub op: DerivOp,

    #[command(flatten)]
    #[serde(flatten)]
    pub func: FnArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    /// Evaluation points; repeat or separate with commas.
    #[arg(long = "t", value_parser = real, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub t: Vec<f64>,

    /// Order of the Hahn derivative.
    #[arg(long, default_value_t = 1)]
    pub order: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegOp {
    Hahn,
    Jackson,
    H,
    HahnSym,
    QSym,
    AbSym,
    AlphaForward,
    BetaBackward,
    Delta,
    Nabla,
    DiamondAlpha,
    Diamond,
}

#[derive(Args, Debug, Serialize)]
pub struct IntegArgs {
    #[arg(long, value_enum)]
    pub op: IntegOp,

    #[command(flatten)]
    #[serde(flatten)]
    pub func: FnArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    #[arg(long, value_parser = real, allow_negative_numbers = true)]
    pub a: f64,

    #[arg(long, value_parser = real, allow_negative_numbers = true)]
    pub b: f64,
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct ProblemArgs {
    /// JSON job file; flags given alongside take precedence.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub job: Option<PathBuf>,

    /// hahn-higher, q-symmetric or hahn-symmetric.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flavor: Option<String>,

    #[arg(long, value_parser = real)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,

    #[arg(long, value_parser = real)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,

    /// Order of the problem.
    #[arg(long = "r")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,

    /// Lagrangian in t, u0 (y), u1 (Dy), ...
    #[arg(long = "L", allow_hyphen_values = true)]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub lagrangian: Option<String>,

    #[arg(long, value_parser = real, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,

    #[arg(long, value_parser = real, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,

    /// Boundary values alpha0,beta0,alpha1,beta1,...
    #[arg(long, value_parser = real, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<f64>>,

    /// Candidate extremal.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,

    /// Point override for y, as "t=0:1".
    #[arg(long = "y-override")]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub y_overrides: Vec<String>,

    /// Lattice depth per endpoint.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,

    /// Residual threshold for the "satisfied" flag.
    #[arg(long, value_parser = real)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct VarCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,

    /// Variation; must vanish at the endpoints.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,

    /// Grid size for convexity sampling; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub convexity_n: usize,

    #[arg(long, value_parser = real, value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,2")]
    pub u_range: Vec<f64>,

    #[arg(long, value_parser = real, value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,2")]
    pub v_range: Vec<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IneqKind {
    Holder,
    CauchySchwarz,
    Minkowski,
}

#[derive(Args, Debug, Serialize)]
pub struct IneqArgs {
    #[arg(long, value_enum)]
    pub kind: IneqKind,

    #[command(flatten)]
    #[serde(flatten)]
    pub func: FnArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    /// Exponent of the Holder and Minkowski inequalities.
    #[arg(long = "p", value_parser = real, default_value = "2")]
    pub p: f64,

    #[arg(long, value_parser = real, allow_negative_numbers = true)]
    pub a: f64,

    #[arg(long, value_parser = real, allow_negative_numbers = true)]
    pub b: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MvtChoice {
    Fermat,
    Rolle,
    Lagrange,
    Cauchy,
    Integral,
}

#[derive(Args, Debug, Serialize)]
pub struct MvtArgs {
    #[arg(long, value_enum)]
    pub kind: MvtChoice,

    #[command(flatten)]
    #[serde(flatten)]
    pub func: FnArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    #[arg(long, value_parser = real, allow_negative_numbers = true)]
    pub a: f64,

    #[arg(long, value_parser = real, allow_negative_numbers = true)]
    pub b: f64,

    /// Interior extremum for Fermat.
    #[arg(long, value_parser = real, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct LeitmannArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,

    /// Transformed Lagrangian.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lbar: Option<String>,

    /// y = z(t, u0) with u0 = ybar.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,

    /// Inverse of z in its second argument.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_inv: Option<String>,

    /// G(t, u0).
    #[arg(long = "G", allow_hyphen_values = true)]
    #[serde(rename = "G", skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct TsQueryArgs {
    #[arg(long)]
    pub scale: String,

    /// Query points; repeat or separate with commas.
    #[arg(long = "t", value_parser = real, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub t: Vec<f64>,
}
