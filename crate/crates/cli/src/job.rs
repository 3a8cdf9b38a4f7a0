//! JSON job files and the conversion of flags into library objects.

use std::fs;

use serde::{Deserialize, Serialize};

use qcalc_core::expr::parse_real;
use qcalc_core::variational::{Flavor, VariationalProblem};
use qcalc_core::{ExprFunc, QOmegaParams};

use crate::args::ProblemArgs;
use crate::CliError;

/// A number given either as JSON number or as text such as "1/6".
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Real {
    Num(f64),
    Text(String),
}

impl Real {
    fn get(&self) -> Result<f64, CliError> {
        match self {
            Real::Num(x) => Ok(*x),
            Real::Text(s) => parse_real(s)
                .map_err(|e| CliError::usage(format!("bad number '{s}': {e}"), "write numbers as 0.25 or 1/4")),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub flavor: Option<String>,
    pub q: Option<Real>,
    pub omega: Option<Real>,
    pub r: Option<usize>,
    #[serde(rename = "L")]
    pub lagrangian: Option<String>,
    pub a: Option<Real>,
    pub b: Option<Real>,
    pub boundary: Option<Vec<Real>>,
    pub y: Option<String>,
    /// `[[t, value], ...]`
    #[serde(default)]
    pub y_overrides: Vec<(Real, Real)>,
    pub eta: Option<String>,
    pub depth: Option<usize>,
    pub tol: Option<Real>,
    pub lbar: Option<String>,
    pub z: Option<String>,
    pub z_inv: Option<String>,
    #[serde(rename = "G")]
    pub g: Option<String>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl JobFile {
    pub fn load(args: &ProblemArgs) -> Result<JobFile, CliError> {
        let Some(path) = &args.job else {
            return Ok(JobFile::default());
        };
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::usage(
                format!("cannot read job file {}: {e}", path.display()),
                "check the path given to --job",
            )
        })?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::usage(
                format!("job file {} is not a valid job: {e}", path.display()),
                "expected {flavor, q, omega, r, L, a, b, boundary, y, y_overrides, eta, depth}",
            )
        })
    }
}

/// Problem data with flags layered over the job file.
pub struct Problem {
    pub prob: VariationalProblem,
    pub y: Option<ExprFunc>,
    pub eta: Option<String>,
    pub tol: f64,
    pub job: JobFile,
}

fn need<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| {
        CliError::usage(
            format!("missing problem field '{name}'"),
            format!("pass --{name} or set \"{name}\" in the --job file"),
        )
    })
}

fn pick(flag: Option<f64>, job: &Option<Real>) -> Result<Option<f64>, CliError> {
    match (flag, job) {
        (Some(x), _) => Ok(Some(x)),
        (None, Some(r)) => r.get().map(Some),
        (None, None) => Ok(None),
    }
}

pub fn function(src: &str, overrides: &[String]) -> Result<ExprFunc, CliError> {
    let mut f = ExprFunc::parse(src)?;
    for o in overrides {
        let (point, value) = parse_override(o)?;
        f = f.with_override(point, value)?;
    }
    Ok(f)
}

/// `"t=0.5:1"` or `"t=1,u0=2:3"`. Unnamed coordinates keep their default
/// of 0.
pub fn parse_override(text: &str) -> Result<(Vec<f64>, f64), CliError> {
    let hint = "write overrides as t=0.5:1 (point, colon, value)";
    let bad = || CliError::usage(format!("bad override '{text}'"), hint);
    let (lhs, rhs) = text.rsplit_once(':').ok_or_else(bad)?;
    let value = parse_real(rhs.trim()).map_err(|_| bad())?;
    let mut point: Vec<f64> = Vec::new();
    for part in lhs.split(',') {
        let (name, x) = part.split_once('=').ok_or_else(bad)?;
        let var = qcalc_core::Var::from_name(name.trim()).ok_or_else(bad)?;
        let x = parse_real(x.trim()).map_err(|_| bad())?;
        let i = var.index();
        if point.len() <= i {
            point.resize(i + 1, 0.0);
        }
        point[i] = x;
    }
    Ok((point, value))
}

impl Problem {
    pub fn build(args: &ProblemArgs) -> Result<Problem, CliError> {
        let job = JobFile::load(args)?;
        let flavor: Flavor = need(args.flavor.clone().or(job.flavor.clone()), "flavor")?
            .parse()
            .map_err(|_| CliError::usage("unknown flavor", "use hahn-higher, q-symmetric or hahn-symmetric"))?;
        let q = need(pick(args.q, &job.q)?, "q")?;
        let omega = pick(args.omega, &job.omega)?.unwrap_or(0.0);
        let order = args.r.or(job.r).unwrap_or(1);
        let l = need(args.lagrangian.clone().or(job.lagrangian.clone()), "L")?;
        let a = need(pick(args.a, &job.a)?, "a")?;
        let b = need(pick(args.b, &job.b)?, "b")?;
        let boundary = match (&args.boundary, &job.boundary) {
            (Some(v), _) => v.clone(),
            (None, Some(v)) => v.iter().map(Real::get).collect::<Result<_, _>>()?,
            (None, None) => return Err(need::<()>(None, "boundary").unwrap_err()),
        };
        let params = QOmegaParams::new(q, omega)?;
        let mut prob = VariationalProblem::new(flavor, params, order, function(&l, &[])?, a, b, boundary)?;
        if let Some(d) = args.depth.or(job.depth) {
            prob = prob.with_depth(d)?;
        }
        let y = match args.y.clone().or(job.y.clone()) {
            Some(src) => {
                let mut y = function(&src, &args.y_overrides)?;
                if args.y_overrides.is_empty() {
                    for (t, v) in &job.y_overrides {
                        y = y.with_t_override(t.get()?, v.get()?)?;
                    }
                }
                Some(y)
            }
            None => None,
        };
        let tol = pick(args.tol, &job.tol)?.unwrap_or(1e-8);
        Ok(Problem {
            prob,
            y,
            eta: job.eta.clone(),
            tol,
            job,
        })
    }
}
