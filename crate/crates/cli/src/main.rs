//! `qcalc`: command-line front end for qcalc-core.
//!
//! Exit status: 0 success, 1 usage error, 2 domain error, 3 series that did
//! not converge.

use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use qcalc_core::{Error, ParseError, SeriesPolicy};

mod args;
mod commands;
mod job;
mod report;

use args::{Cli, Common};
use report::Report;

#[derive(Debug)]
pub enum CliError {
    Usage { msg: String, hint: String },
    Core(Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>, hint: impl Into<String>) -> CliError {
        CliError::Usage {
            msg: msg.into(),
            hint: hint.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Parse(p) => p.into(),
            other => CliError::Core(other),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(p: ParseError) -> CliError {
        CliError::usage(
            format!("cannot parse function: {p}"),
            "functions use t, u0..u9, + - * / ^, abs sqrt exp ln sin cos min max",
        )
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { msg, hint } => write!(f, "error: {msg}\nhint: {hint}"),
            CliError::Core(e) => write!(f, "error: {e}"),
        }
    }
}

fn policy(c: &Common) -> Result<SeriesPolicy, CliError> {
    let mut p = SeriesPolicy::default();
    if let Some(x) = c.abs_tol {
        p.abs_tol = x;
    }
    if let Some(x) = c.rel_tol {
        p.rel_tol = x;
    }
    if let Some(n) = c.max_terms {
        p.max_terms = n;
    }
    p.validate()
        .map_err(|e| CliError::usage(e.to_string(), "check --abs-tol, --rel-tol and --max-terms"))?;
    Ok(p)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let out = cli.common.output;
    let policy = match policy(&cli.common) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let name = cli.command.name();
    let mut inputs = match &cli.command {
        args::Command::Deriv(a) => serde_json::to_value(a),
        args::Command::Integ(a) => serde_json::to_value(a),
        args::Command::ElCheck(a) => serde_json::to_value(a),
        args::Command::VarCheck(a) => serde_json::to_value(a),
        args::Command::Ineq(a) => serde_json::to_value(a),
        args::Command::Mvt(a) => serde_json::to_value(a),
        args::Command::Leitmann(a) => serde_json::to_value(a),
        args::Command::TsQuery(a) => serde_json::to_value(a),
    }
    .unwrap_or(Value::Null);
    if let Value::Object(m) = &mut inputs {
        m.insert("policy".into(), serde_json::to_value(policy).unwrap_or(Value::Null));
    }
    let base = Report::new(name, inputs);
    let (report, code) = match commands::run(&cli.command, base.clone(), &policy) {
        Ok(r) => {
            let code = if r.converged { 0 } else { 3 };
            (r, code)
        }
        Err(CliError::Core(Error::NonConvergent { partial, terms })) => (
            base.non_convergent(partial, terms)
                .warn("series stopped at the term cap; raise --max-terms or loosen the tolerances"),
            3,
        ),
        Err(e) => {
            eprintln!("{e}");
            let code = if matches!(e, CliError::Usage { .. }) { 1 } else { 2 };
            return ExitCode::from(code);
        }
    };
    // CSV has no room for warnings
    if out == args::Output::Csv {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
    }
    let _ = writeln!(std::io::stdout(), "{}", report.render(out).trim_end());
    ExitCode::from(code)
}
