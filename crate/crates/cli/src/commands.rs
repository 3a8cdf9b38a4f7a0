use qcalc_core::numerics::SeriesResult;
use qcalc_core::quantum::{
    h_backward_derivative, h_forward_derivative, h_integral, hahn_derivative,
    hahn_derivative_higher, hahn_integral, q_derivative,
};
use qcalc_core::symcalc::{
    ab_sym_derivative, ab_sym_integral, alpha_forward_integral, beta_backward_integral,
    hahn_sym_derivative, hahn_sym_integral, inequality_check, integral_mvt_check, mvt_witness,
    q_sym_derivative, q_sym_integral, InequalityKind, MvtKind,
};
use qcalc_core::variational::{
    convexity_sample, el_residual, eval_functional, first_variation, leitmann_check,
};
use qcalc_core::{AlphaBetaParams, ExprFunc, QOmegaParams, SeriesPolicy, TimeScale};
use serde_json::Value;

use crate::args::*;
use crate::job::{function, Problem};
use crate::report::{num, Report};
use crate::CliError;

const HYPOTHESES: &str =
    "regularity hypotheses on L and y are assumed, not verified; residuals are sampled on a finite lattice";

pub fn run(cmd: &Command, rep: Report, policy: &SeriesPolicy) -> Result<Report, CliError> {
    match cmd {
        Command::Deriv(a) => deriv(a, rep),
        Command::Integ(a) => integ(a, rep, policy),
        Command::ElCheck(a) => el_check(a, rep, policy),
        Command::VarCheck(a) => var_check(a, rep, policy),
        Command::Ineq(a) => ineq(a, rep, policy),
        Command::Mvt(a) => mvt(a, rep, policy),
        Command::Leitmann(a) => leitmann(a, rep, policy),
        Command::TsQuery(a) => ts_query(a, rep),
    }
}

fn param(v: Option<f64>, flag: &str, what: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| {
        CliError::usage(
            format!("{what} needs --{flag}"),
            format!("add --{flag} <value>"),
        )
    })
}

fn text<'a>(v: &'a Option<String>, flag: &str, what: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| {
        CliError::usage(format!("{what} needs --{flag}"), format!("add --{flag} \"<expression>\""))
    })
}

fn f_of(func: &FnArgs, what: &str) -> Result<ExprFunc, CliError> {
    function(text(&func.f, "f", what)?, &func.overrides)
}

fn g_of(func: &FnArgs, what: &str) -> Result<ExprFunc, CliError> {
    function(text(&func.g, "g", what)?, &func.g_overrides)
}

fn qw(p: &ParamArgs, what: &str) -> Result<QOmegaParams, CliError> {
    Ok(QOmegaParams::new(param(p.q, "q", what)?, p.omega.unwrap_or(0.0))?)
}

fn ab(p: &ParamArgs, what: &str) -> Result<AlphaBetaParams, CliError> {
    Ok(AlphaBetaParams::new(
        param(p.alpha, "alpha", what)?,
        param(p.beta, "beta", what)?,
    )?)
}

fn scale(spec: &Option<String>, what: &str) -> Result<TimeScale, CliError> {
    let s = text(spec, "scale", what)?;
    s.parse().map_err(|e| {
        CliError::usage(
            format!("bad time scale '{s}': {e}"),
            "e.g. --scale \"union(interval(0,1),points(2,4))\"",
        )
    })
}

fn with_series(rep: Report, s: SeriesResult) -> Report {
    if s.converged {
        rep.value(s.value)
            .est_error(s.est_error)
            .detail("terms_used", s.terms_used)
    } else {
        rep.non_convergent(s.value, s.terms_used)
            .warn("series stopped at the term cap; raise --max-terms or loosen the tolerances")
    }
}

fn deriv(a: &DerivArgs, mut rep: Report) -> Result<Report, CliError> {
    let what = "this operator";
    let f = f_of(&a.func, what)?;
    let p = &a.params;
    let ts = match a.op {
        DerivOp::Delta | DerivOp::Nabla | DerivOp::DiamondAlpha | DerivOp::SymDiamond => {
            Some(scale(&p.scale, what)?)
        }
        _ => None,
    };
    let mut first = None;
    for &t in &a.t {
        let v = match a.op {
            DerivOp::Hahn if a.order == 1 => hahn_derivative(&f, &qw(p, what)?, t)?,
            DerivOp::Hahn => hahn_derivative_higher(&f, &qw(p, what)?, t, a.order)?,
            DerivOp::Q => q_derivative(&f, param(p.q, "q", what)?, t)?,
            DerivOp::HForward => h_forward_derivative(&f, param(p.h, "h", what)?, t)?,
            DerivOp::HBackward => h_backward_derivative(&f, param(p.h, "h", what)?, t)?,
            DerivOp::HahnSym => hahn_sym_derivative(&f, &qw(p, what)?, t)?,
            DerivOp::QSym => q_sym_derivative(&f, param(p.q, "q", what)?, t)?,
            DerivOp::AbSym => ab_sym_derivative(&f, &ab(p, what)?, t)?,
            DerivOp::Delta => ts.as_ref().unwrap().delta_derivative(&f, t)?,
            DerivOp::Nabla => ts.as_ref().unwrap().nabla_derivative(&f, t)?,
            DerivOp::SymDiamond => ts.as_ref().unwrap().sym_diamond_derivative(&f, t)?,
            DerivOp::DiamondAlpha => ts.as_ref().unwrap().diamond_alpha_derivative(
                &f,
                t,
                param(p.weight, "weight", what)?,
            )?,
        };
        first.get_or_insert(v);
        rep.row(&[("t", num(t)), ("value", num(v))]);
    }
    if let (1, Some(v)) = (a.t.len(), first) {
        rep = rep.value(v);
    }
    Ok(rep)
}

fn integ(a: &IntegArgs, rep: Report, policy: &SeriesPolicy) -> Result<Report, CliError> {
    let what = "this integral";
    let f = f_of(&a.func, what)?;
    let p = &a.params;
    let (lo, hi) = (a.a, a.b);
    let series = match a.op {
        IntegOp::Hahn => Some(hahn_integral(&f, &qw(p, what)?, lo, hi, policy)?),
        IntegOp::Jackson => Some(hahn_integral(
            &f,
            &QOmegaParams::q_only(param(p.q, "q", what)?)?,
            lo,
            hi,
            policy,
        )?),
        IntegOp::HahnSym => Some(hahn_sym_integral(&f, &qw(p, what)?, lo, hi, policy)?),
        IntegOp::QSym => Some(q_sym_integral(&f, param(p.q, "q", what)?, lo, hi, policy)?),
        IntegOp::AbSym => Some(ab_sym_integral(&f, &ab(p, what)?, lo, hi, policy)?),
        IntegOp::AlphaForward => Some(alpha_forward_integral(
            &f,
            param(p.alpha, "alpha", what)?,
            lo,
            hi,
            policy,
        )?),
        IntegOp::BetaBackward => Some(beta_backward_integral(
            &f,
            param(p.beta, "beta", what)?,
            lo,
            hi,
            policy,
        )?),
        _ => None,
    };
    if let Some(s) = series {
        return Ok(with_series(rep, s));
    }
    let v = match a.op {
        IntegOp::H => h_integral(&f, param(p.h, "h", what)?, lo, hi)?,
        IntegOp::Delta => scale(&p.scale, what)?.delta_integral(&f, lo, hi)?,
        IntegOp::Nabla => scale(&p.scale, what)?.nabla_integral(&f, lo, hi)?,
        IntegOp::Diamond => scale(&p.scale, what)?.diamond_integral(&f, lo, hi)?,
        IntegOp::DiamondAlpha => scale(&p.scale, what)?.diamond_alpha_integral(
            &f,
            lo,
            hi,
            param(p.weight, "weight", what)?,
        )?,
        _ => unreachable!("series operators handled above"),
    };
    Ok(rep.value(v))
}

fn candidate(pr: &Problem) -> Result<&ExprFunc, CliError> {
    pr.y.as_ref().ok_or_else(|| {
        CliError::usage("the problem has no candidate y", "pass --y or set \"y\" in the job file")
    })
}

fn el_check(a: &ProblemArgs, mut rep: Report, policy: &SeriesPolicy) -> Result<Report, CliError> {
    let pr = Problem::build(a)?;
    let y = candidate(&pr)?;
    let r = el_residual(&pr.prob, y, policy)?;
    for (t, res) in r.points.iter().zip(&r.residuals) {
        rep.row(&[("t", num(*t)), ("residual", num(*res))]);
    }
    let ok = r.max_abs <= pr.tol;
    let mut rep = rep
        .value(r.max_abs)
        .detail("max_abs", num(r.max_abs))
        .detail("functional_value", num(r.functional_value))
        .detail("tol", num(pr.tol))
        .detail("satisfied", ok)
        .detail("depth", pr.prob.depth)
        .warn(HYPOTHESES);
    if !ok {
        rep = rep.warn(format!("max residual {} exceeds tol {}", r.max_abs, pr.tol));
    }
    Ok(rep)
}

fn var_check(a: &VarCheckArgs, rep: Report, policy: &SeriesPolicy) -> Result<Report, CliError> {
    let pr = Problem::build(&a.problem)?;
    let y = candidate(&pr)?;
    let eta_src = a.eta.clone().or(pr.eta.clone()).ok_or_else(|| {
        CliError::usage("var-check needs a variation", "pass --eta or set \"eta\" in the job file")
    })?;
    let eta = function(&eta_src, &[])?;
    let fv = first_variation(&pr.prob, y, &eta, policy)?;
    let fvi = pr.prob.first_variation_integral(y, &eta, policy)?.require()?;
    let value = eval_functional(&pr.prob, y, policy)?.require()?;
    let mut rep = rep
        .value(fv)
        .detail("first_variation", num(fv))
        .detail("first_variation_integral", num(fvi))
        .detail("functional_value", num(value))
        .warn(HYPOTHESES);
    if a.convexity_n > 0 {
        let range = |v: &Vec<f64>, flag: &str| -> Result<(f64, f64), CliError> {
            match v.as_slice() {
                [lo, hi] => Ok((*lo, *hi)),
                _ => Err(CliError::usage(format!("--{flag} needs two values"), format!("e.g. --{flag}=-2,2"))),
            }
        };
        let c = convexity_sample(
            &pr.prob.lagrangian,
            (pr.prob.a, pr.prob.b),
            range(&a.u_range, "u-range")?,
            range(&a.v_range, "v-range")?,
            a.convexity_n,
            a.seed,
        )?;
        rep = rep.detail("convexity", &c);
    }
    Ok(rep)
}

fn ineq_kind(k: IneqKind) -> InequalityKind {
    match k {
        IneqKind::Holder => InequalityKind::Holder,
        IneqKind::CauchySchwarz => InequalityKind::CauchySchwarz,
        IneqKind::Minkowski => InequalityKind::Minkowski,
    }
}

fn ineq(a: &IneqArgs, rep: Report, policy: &SeriesPolicy) -> Result<Report, CliError> {
    let what = "inequality checks";
    let f = f_of(&a.func, what)?;
    let g = g_of(&a.func, what)?;
    let kind = ineq_kind(a.kind);
    let r = if a.params.scale.is_some() {
        scale(&a.params.scale, what)?.diamond_inequality_check(kind, &f, &g, a.a, a.b, a.p)?
    } else {
        inequality_check(kind, &f, &g, &ab(&a.params, what)?, a.a, a.b, a.p, policy)?
    };
    Ok(rep
        .value(r.lhs)
        .detail("lhs", num(r.lhs))
        .detail("rhs", num(r.rhs))
        .detail("holds", r.holds))
}

fn mvt(a: &MvtArgs, rep: Report, policy: &SeriesPolicy) -> Result<Report, CliError> {
    let what = "this mean value check";
    let f = f_of(&a.func, what)?;
    let kind = match a.kind {
        MvtChoice::Fermat => MvtKind::Fermat,
        MvtChoice::Rolle => MvtKind::Rolle,
        MvtChoice::Lagrange => MvtKind::Lagrange,
        MvtChoice::Cauchy => MvtKind::Cauchy,
        MvtChoice::Integral => {
            let g = g_of(&a.func, what)?;
            let r = if a.params.scale.is_some() {
                scale(&a.params.scale, what)?.diamond_mvt_check(&f, &g, a.a, a.b)?
            } else {
                integral_mvt_check(&f, &g, &ab(&a.params, what)?, a.a, a.b, policy)?
            };
            return Ok(rep.value(r.k).detail("report", r).detail("holds", r.holds));
        }
    };
    let g = match kind {
        MvtKind::Cauchy => Some(g_of(&a.func, "the Cauchy witness")?),
        _ => None,
    };
    if kind == MvtKind::Fermat && a.t0.is_none() {
        return Err(CliError::usage("the Fermat witness needs --t0", "add --t0 <interior extremum>"));
    }
    let w = mvt_witness(kind, &f, g.as_ref(), a.a, a.b, a.t0)?;
    Ok(rep
        .value(w.c)
        .detail("alpha", num(w.alpha))
        .detail("beta", num(w.beta))
        .detail("c", num(w.c))
        .detail("residual", num(w.residual)))
}

fn leitmann(a: &LeitmannArgs, rep: Report, policy: &SeriesPolicy) -> Result<Report, CliError> {
    let pr = Problem::build(&a.problem)?;
    let job = &pr.job;
    let get = |flag: &Option<String>, file: &Option<String>, name: &str| -> Result<ExprFunc, CliError> {
        let src = flag.clone().or(file.clone()).ok_or_else(|| {
            CliError::usage(
                format!("leitmann needs '{name}'"),
                format!("pass --{name} or set \"{name}\" in the job file"),
            )
        })?;
        function(&src, &[])
    };
    let lbar = get(&a.lbar, &job.lbar, "lbar")?;
    let z = get(&a.z, &job.z, "z")?;
    let z_inv = get(&a.z_inv, &job.z_inv, "z-inv")?;
    let g = get(&a.g, &job.g, "G")?;
    let samples = a.samples.or(job.samples).unwrap_or(10);
    let seed = a.seed.or(job.seed).unwrap_or(0);
    let r = leitmann_check(&pr.prob, &lbar, &z, &z_inv, &g, samples, seed, policy)?;
    let mut rep = rep
        .value(r.pointwise_max)
        .detail("holds", r.holds)
        .detail("seed", seed)
        .detail("report", &r)
        .warn(HYPOTHESES);
    if let Some(y) = &pr.y {
        let e = el_residual(&pr.prob, y, policy)?;
        rep = rep.detail("candidate_max_abs", num(e.max_abs));
    }
    Ok(rep)
}

fn ts_query(a: &TsQueryArgs, mut rep: Report) -> Result<Report, CliError> {
    let ts = scale(&Some(a.scale.clone()), "ts-query")?;
    for &t in &a.t {
        let j = ts.jump(t)?;
        let w = ts.gamma_weights(t)?;
        rep.row(&[
            ("t", num(j.t)),
            ("sigma", num(j.sigma)),
            ("rho", num(j.rho)),
            ("mu", num(j.mu)),
            ("nu", num(j.nu)),
            ("class", serde_json::to_value(j.classification).unwrap_or(Value::Null)),
            ("gamma1", num(w.gamma1)),
            ("gamma2", num(w.gamma2)),
            ("extended", Value::Bool(w.extended)),
        ]);
    }
    Ok(rep.detail("scale", ts.to_string()))
}
