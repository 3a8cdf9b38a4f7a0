//! Symmetric quantum calculi: the alpha,beta-symmetric difference and
//! Norlund sums, the q-symmetric and Hahn symmetric operators with their
//! integrals, mean value witnesses and integral inequalities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::RealFn;
use crate::numerics::{bisect_root, central_derivative, sum_series, CompensatedSum, SeriesPolicy, SeriesResult};
use crate::quantum::{lattice_steps, QOmegaParams};

/// Largest lattice index accepted by the endpoint checks.
pub const MAX_LATTICE_STEPS: i64 = 1_000_000;

/// Grid intervals used by the mean value witness search.
pub const MVT_GRID: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaBetaParams {
    alpha: f64,
    beta: f64,
}

impl AlphaBetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<AlphaBetaParams> {
        if !(alpha >= 0.0 && beta >= 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::invalid("alpha and beta must be finite and >= 0"));
        }
        if alpha + beta <= 0.0 {
            return Err(Error::invalid("at least one of alpha, beta must be positive"));
        }
        Ok(AlphaBetaParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `(f(t+alpha) - f(t-beta)) / (alpha + beta)`.
pub fn ab_sym_derivative<F: RealFn + ?Sized>(f: &F, p: &AlphaBetaParams, t: f64) -> Result<f64> {
    let (tp, tm) = (t + p.alpha, t - p.beta);
    Ok((f.call(tp)? - f.call(tm)?) / (tp - tm))
}

fn positive_step(name: &str, h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {h} must be positive")))
    }
}

/// Integer lattice steps from `a` to `b`, if any within the search bound.
fn exact_steps(a: f64, b: f64, h: f64) -> Option<i64> {
    lattice_steps(a, b, h)
        .ok()
        .filter(|n| n.abs() <= MAX_LATTICE_STEPS)
}

fn finite_sum<F: RealFn + ?Sized>(f: &F, n: i64, point: impl Fn(i64) -> f64) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for k in 0..n {
        acc.add(f.call(point(k))?);
    }
    Ok(acc.value())
}

/// The Norlund sum `int_a^b f Delta_alpha t`, as the difference of the tails
/// `alpha * sum_k f(x + k alpha)` at `x = a` and `x = b`.
///
/// When `b - a` is a whole number of steps the tails cancel and the finite
/// sum is returned directly.
pub fn alpha_forward_integral<F: RealFn + ?Sized>(
    f: &F,
    alpha: f64,
    a: f64,
    b: f64,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    positive_step("alpha", alpha)?;
    if a == b {
        return Ok(SeriesResult::exact(0.0, 0));
    }
    if let Some(n) = exact_steps(a, b, alpha) {
        let (lo, len, sign) = if n >= 0 { (a, n, 1.0) } else { (b, -n, -1.0) };
        let s = finite_sum(f, len, |k| lo + k as f64 * alpha)?;
        return Ok(SeriesResult::exact(sign * alpha * s, len as usize));
    }
    let tail = |x: f64| {
        sum_series(|k| f.call(x + k as f64 * alpha), policy).map(|r| r.scaled(alpha))
    };
    Ok(tail(a)?.minus(tail(b)?))
}

/// The backward sum `int_a^b f nabla_beta t` with tails
/// `beta * sum_k f(x - k beta)`.
pub fn beta_backward_integral<F: RealFn + ?Sized>(
    f: &F,
    beta: f64,
    a: f64,
    b: f64,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    positive_step("beta", beta)?;
    if a == b {
        return Ok(SeriesResult::exact(0.0, 0));
    }
    if let Some(n) = exact_steps(a, b, beta) {
        let (hi, len, sign) = if n >= 0 { (b, n, 1.0) } else { (a, -n, -1.0) };
        let s = finite_sum(f, len, |k| hi - k as f64 * beta)?;
        return Ok(SeriesResult::exact(sign * beta * s, len as usize));
    }
    let tail = |x: f64| {
        sum_series(|k| f.call(x - k as f64 * beta), policy).map(|r| r.scaled(beta))
    };
    Ok(tail(b)?.minus(tail(a)?))
}

/// `alpha/(alpha+beta) int f Delta_alpha + beta/(alpha+beta) int f nabla_beta`.
/// A part with zero weight is not evaluated.
pub fn ab_sym_integral<F: RealFn + ?Sized>(
    f: &F,
    p: &AlphaBetaParams,
    a: f64,
    b: f64,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    let total = p.alpha + p.beta;
    let zero = SeriesResult::exact(0.0, 0);
    let fwd = if p.alpha > 0.0 {
        alpha_forward_integral(f, p.alpha, a, b, policy)?
    } else {
        zero
    };
    let bwd = if p.beta > 0.0 {
        beta_backward_integral(f, p.beta, a, b, policy)?
    } else {
        zero
    };
    Ok(fwd.combine(bwd, p.alpha / total, p.beta / total))
}

/// `2^-x` on the nonnegative integers and 0 elsewhere.
pub fn ftc_demo_function(x: f64) -> f64 {
    if x >= 0.0 && x.fract() == 0.0 {
        0.5f64.powf(x)
    } else {
        0.0
    }
}

/// The pieces of the failed fundamental theorem for the alpha = beta = 1
/// integral of [`ftc_demo_function`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbFtcDemo {
    pub t: u32,
    /// `F(t-1)` and `F(t+1)` with `F(x) = int_0^x f d_{1,1}`.
    pub primitive_prev: f64,
    pub primitive_next: f64,
    /// `D_{1,1}[F](t)`.
    pub lhs: f64,
    /// `f(t)`.
    pub rhs: f64,
}

/// `F(x) = int_0^x f d_{1,1} tau` for the demo function.
pub fn ab_ftc_primitive(x: f64) -> Result<f64> {
    let p = AlphaBetaParams::new(1.0, 1.0)?;
    let f = |t: f64| -> Result<f64> { Ok(ftc_demo_function(t)) };
    ab_sym_integral(&f, &p, 0.0, x, &SeriesPolicy::default())?.require()
}

pub fn ab_ftc_failure_demo(t: u32) -> Result<AbFtcDemo> {
    if t == 0 {
        return Err(Error::invalid("t must be a positive integer"));
    }
    let p = AlphaBetaParams::new(1.0, 1.0)?;
    let primitive = |x: f64| ab_ftc_primitive(x);
    let lhs = ab_sym_derivative(&primitive, &p, t as f64)?;
    Ok(AbFtcDemo {
        t,
        primitive_prev: ab_ftc_primitive(t as f64 - 1.0)?,
        primitive_next: ab_ftc_primitive(t as f64 + 1.0)?,
        lhs,
        rhs: ftc_demo_function(t as f64),
    })
}

/// `(f(qt) - f(t/q)) / (qt - t/q)`, classical at 0.
pub fn q_sym_derivative<F: RealFn + ?Sized>(f: &F, q: f64, t: f64) -> Result<f64> {
    hahn_sym_derivative(f, &QOmegaParams::q_only(q)?, t)
}

/// `int_a^b f d~_q t` with `int_0^x = (1/q - q) x sum_n q^{2n+1} f(q^{2n+1} x)`.
pub fn q_sym_integral<F: RealFn + ?Sized>(
    f: &F,
    q: f64,
    a: f64,
    b: f64,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    hahn_sym_integral(f, &QOmegaParams::q_only(q)?, a, b, policy)
}

/// `(f(sigma(t)) - f(sigma^-1(t))) / (sigma(t) - sigma^-1(t))`; the classical
/// derivative at `w0`.
pub fn hahn_sym_derivative<F: RealFn + ?Sized>(f: &F, p: &QOmegaParams, t: f64) -> Result<f64> {
    if p.at_fixed_point(t) {
        return central_derivative(f, p.omega0());
    }
    let (s, si) = (p.sigma(t), p.sigma_inv(t));
    Ok((f.call(s)? - f.call(si)?) / (s - si))
}

/// `int_{w0}^x f d~_{q,w}t = (sigma^-1(x) - sigma(x)) sum_n q^{2n+1} f(sigma^{2n+1}(x))`.
pub fn hahn_sym_integral_from_fixed<F: RealFn + ?Sized>(
    f: &F,
    p: &QOmegaParams,
    x: f64,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    if x == p.omega0() {
        return Ok(SeriesResult::exact(0.0, 0));
    }
    let q = p.q();
    let weight = p.sigma_inv(x) - p.sigma(x);
    let series = sum_series(
        |n| {
            let k = 2 * n as i64 + 1;
            Ok(q.powi(k as i32) * f.call(p.sigma_orbit(x, k))?)
        },
        policy,
    )?;
    Ok(series.scaled(weight))
}

pub fn hahn_sym_integral<F: RealFn + ?Sized>(
    f: &F,
    p: &QOmegaParams,
    a: f64,
    b: f64,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    if a == b {
        return Ok(SeriesResult::exact(0.0, 0));
    }
    let fb = hahn_sym_integral_from_fixed(f, p, b, policy)?;
    let fa = hahn_sym_integral_from_fixed(f, p, a, policy)?;
    Ok(fb.minus(fa))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MvtKind {
    Fermat,
    Rolle,
    Lagrange,
    Cauchy,
}

impl std::str::FromStr for MvtKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<MvtKind> {
        match s {
            "fermat" => Ok(MvtKind::Fermat),
            "rolle" => Ok(MvtKind::Rolle),
            "lagrange" => Ok(MvtKind::Lagrange),
            "cauchy" => Ok(MvtKind::Cauchy),
            _ => Err(Error::invalid(format!("unknown mean value kind '{s}'"))),
        }
    }
}

/// `(alpha, beta, c)` with `D_{alpha,beta}[target](c) = residual`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MvtWitness {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub residual: f64,
}

/// Finds an alpha,beta-symmetric mean value witness.
///
/// The target is `f` for Fermat and Rolle, `f - slope*t` for Lagrange and
/// `f - ratio*g` for Cauchy. An extremum `c` of the target is located on a
/// uniform grid (or taken from `t0` for Fermat), and bisection then splits
/// a step `gamma` into `alpha`, `beta` with equal target values at `c+alpha`
/// and `c-beta`.
pub fn mvt_witness<F: RealFn + ?Sized, G: RealFn + ?Sized>(
    kind: MvtKind,
    f: &F,
    g: Option<&G>,
    a: f64,
    b: f64,
    t0: Option<f64>,
) -> Result<MvtWitness> {
    if !(a < b) {
        return Err(Error::invalid("mean value witnesses need a < b"));
    }
    let (fa, fb) = (f.call(a)?, f.call(b)?);
    let (slope, ratio, g) = match kind {
        MvtKind::Fermat | MvtKind::Rolle => (0.0, 0.0, None),
        MvtKind::Lagrange => ((fb - fa) / (b - a), 0.0, None),
        MvtKind::Cauchy => {
            let g = g.ok_or_else(|| Error::invalid("cauchy needs a second function g"))?;
            let (ga, gb) = (g.call(a)?, g.call(b)?);
            if ga == gb {
                return Err(Error::invalid("cauchy needs g(a) != g(b)"));
            }
            (0.0, (fb - fa) / (gb - ga), Some(g))
        }
    };
    let target = |t: f64| -> Result<f64> {
        let mut v = f.call(t)? - slope * t;
        if let Some(g) = g {
            v -= ratio * g.call(t)?;
        }
        Ok(v)
    };

    let (c, gamma) = match kind {
        MvtKind::Fermat => {
            let t0 = t0.ok_or_else(|| Error::invalid("fermat needs the extremum location t0"))?;
            if !(a < t0 && t0 < b) {
                return Err(Error::invalid("fermat needs a < t0 < b"));
            }
            (t0, fermat_step(&target, t0, a, b)?)
        }
        _ => {
            let (ha, hb) = (target(a)?, target(b)?);
            if kind == MvtKind::Rolle && (ha - hb).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "rolle needs f(a) = f(b), got {ha} and {hb}"
                )));
            }
            grid_extremum(&target, a, b, ha)?
        }
    };
    split_step(&target, c, gamma)
}

fn grid_extremum(h: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, ha: f64) -> Result<(f64, f64)> {
    let step = (b - a) / MVT_GRID as f64;
    let mut best = (0usize, 0.0f64);
    for i in 1..MVT_GRID {
        let dev = (h(a + i as f64 * step)? - ha).abs();
        if dev > best.1 {
            best = (i, dev);
        }
    }
    if best.0 == 0 {
        // constant on the grid: any symmetric pair works
        return Ok((a + 0.5 * (b - a), step));
    }
    Ok((a + best.0 as f64 * step, step))
}

fn is_local_extremum(h: &dyn Fn(f64) -> Result<f64>, c: f64, gamma: f64) -> Result<bool> {
    let (hc, hl, hr) = (h(c)?, h(c - gamma)?, h(c + gamma)?);
    Ok((hc >= hl && hc >= hr) || (hc <= hl && hc <= hr))
}

fn fermat_step(h: &dyn Fn(f64) -> Result<f64>, t0: f64, a: f64, b: f64) -> Result<f64> {
    let mut gamma = 0.5 * (t0 - a).min(b - t0);
    for _ in 0..60 {
        if is_local_extremum(h, t0, gamma)? {
            return Ok(gamma);
        }
        gamma *= 0.5;
    }
    Err(Error::NoWitness(format!("{t0} is not a local extremum")))
}

fn split_step(h: &dyn Fn(f64) -> Result<f64>, c: f64, gamma: f64) -> Result<MvtWitness> {
    if !is_local_extremum(h, c, gamma)? {
        return Err(Error::NoWitness(format!(
            "grid point {c} is not an extremum at step {gamma}"
        )));
    }
    let hc = h(c)?;
    let sign = if hc >= h(c - gamma)? && hc >= h(c + gamma)? { 1.0 } else { -1.0 };
    let (hl, hr) = (h(c - gamma)?, h(c + gamma)?);
    let (alpha, beta) = if sign * (hr - hl) <= 0.0 {
        // h(c + rho) crosses h(c - gamma) for some rho in [0, gamma]
        let g = |rho: f64| -> Result<f64> { Ok(sign * (h(c + rho)? - hl)) };
        (bisect_root(&g, 0.0, gamma, 0.0)?, gamma)
    } else {
        let g = |rho: f64| -> Result<f64> { Ok(sign * (h(c - rho)? - hr)) };
        (gamma, bisect_root(&g, 0.0, gamma, 0.0)?)
    };
    if alpha + beta <= 0.0 {
        return Err(Error::NoWitness("degenerate step".into()));
    }
    let residual = (h(c + alpha)? - h(c - beta)?) / (alpha + beta);
    Ok(MvtWitness {
        alpha,
        beta,
        c,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    Holder,
    CauchySchwarz,
    Minkowski,
}

impl std::str::FromStr for InequalityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<InequalityKind> {
        match s {
            "holder" => Ok(InequalityKind::Holder),
            "cauchy_schwarz" | "cauchy-schwarz" => Ok(InequalityKind::CauchySchwarz),
            "minkowski" => Ok(InequalityKind::Minkowski),
            _ => Err(Error::invalid(format!("unknown inequality '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityReport {
    pub(crate) fn new(lhs: f64, rhs: f64) -> InequalityReport {
        InequalityReport {
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-9 * rhs.abs().max(1.0),
        }
    }
}

/// Checks `b = a + k alpha` and `a = b - k beta` for nonnegative integers `k`.
pub fn check_ab_lattice(p: &AlphaBetaParams, a: f64, b: f64) -> Result<()> {
    if a > b {
        return Err(Error::LatticeMismatch(format!("need a <= b, got a = {a}, b = {b}")));
    }
    for (name, h) in [("alpha", p.alpha), ("beta", p.beta)] {
        if h > 0.0 && exact_steps(a, b, h).is_none() {
            return Err(Error::LatticeMismatch(format!(
                "b - a = {} is not a multiple of {name} = {h}",
                b - a
            )));
        }
    }
    Ok(())
}

/// Exponent pair `(p, p/(p-1))`.
pub(crate) fn conjugate(kind: InequalityKind, p_hat: f64) -> Result<(f64, f64)> {
    let p = if kind == InequalityKind::CauchySchwarz { 2.0 } else { p_hat };
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("exponent p = {p} must exceed 1")));
    }
    Ok((p, p / (p - 1.0)))
}

/// Evaluates both sides of an inequality given an integrator.
pub(crate) fn inequality_sides(
    kind: InequalityKind,
    f: &dyn RealFn,
    g: &dyn RealFn,
    p_hat: f64,
    integrate: &dyn Fn(&dyn RealFn) -> Result<f64>,
) -> Result<InequalityReport> {
    let (p, q) = conjugate(kind, p_hat)?;
    let norm = |h: &dyn RealFn, e: f64| -> Result<f64> {
        let pw = |t: f64| -> Result<f64> { Ok(h.call(t)?.abs().powf(e)) };
        Ok(integrate(&pw)?.max(0.0).powf(1.0 / e))
    };
    match kind {
        InequalityKind::Holder | InequalityKind::CauchySchwarz => {
            let fg = |t: f64| -> Result<f64> { Ok((f.call(t)? * g.call(t)?).abs()) };
            Ok(InequalityReport::new(integrate(&fg)?, norm(f, p)? * norm(g, q)?))
        }
        InequalityKind::Minkowski => {
            let sum = |t: f64| -> Result<f64> { Ok(f.call(t)? + g.call(t)?) };
            Ok(InequalityReport::new(norm(&sum, p)?, norm(f, p)? + norm(g, p)?))
        }
    }
}

/// Holder, Cauchy-Schwarz or Minkowski for the alpha,beta-symmetric integral.
/// Endpoints must be lattice compatible; `p_hat` is ignored for
/// Cauchy-Schwarz.
pub fn inequality_check<F: RealFn + ?Sized, G: RealFn + ?Sized>(
    kind: InequalityKind,
    f: &F,
    g: &G,
    p: &AlphaBetaParams,
    a: f64,
    b: f64,
    p_hat: f64,
    policy: &SeriesPolicy,
) -> Result<InequalityReport> {
    check_ab_lattice(p, a, b)?;
    let f: &dyn RealFn = &|t: f64| f.call(t);
    let g: &dyn RealFn = &|t: f64| g.call(t);
    let integrate = |h: &dyn RealFn| ab_sym_integral(h, p, a, b, policy)?.require();
    inequality_sides(kind, f, g, p_hat, &integrate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralMvtReport {
    pub k: f64,
    pub int_fg: f64,
    pub int_g: f64,
    /// Extremes of `f` over the sampled lattice points.
    pub inf_f: f64,
    pub sup_f: f64,
    pub holds: bool,
}

impl IntegralMvtReport {
    pub(crate) fn new(int_fg: f64, int_g: f64, inf_f: f64, sup_f: f64) -> IntegralMvtReport {
        let k = if int_g == 0.0 { 0.0 } else { int_fg / int_g };
        let slack = 1e-9 * k.abs().max(1.0);
        let holds = int_g == 0.0 || (inf_f - slack <= k && k <= sup_f + slack);
        IntegralMvtReport {
            k,
            int_fg,
            int_g,
            inf_f,
            sup_f,
            holds,
        }
    }
}

/// Sample points of `[a, b]` seen by the lattice-compatible integral: up to
/// 256 points `a + k alpha` and 256 points `b - k beta`.
fn ab_sample_points(p: &AlphaBetaParams, a: f64, b: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    if p.alpha > 0.0 {
        let n = exact_steps(a, b, p.alpha).unwrap_or(0).min(256);
        pts.extend((0..n).map(|k| a + k as f64 * p.alpha));
    }
    if p.beta > 0.0 {
        let n = exact_steps(a, b, p.beta).unwrap_or(0).min(256);
        pts.extend((0..n).map(|k| b - k as f64 * p.beta));
    }
    if pts.is_empty() {
        pts.push(a);
    }
    pts
}

/// Mean value theorem for the alpha,beta-symmetric integral:
/// `K = int fg / int g` must lie between the sampled extremes of `f`.
pub fn integral_mvt_check<F: RealFn + ?Sized, G: RealFn + ?Sized>(
    f: &F,
    g: &G,
    p: &AlphaBetaParams,
    a: f64,
    b: f64,
    policy: &SeriesPolicy,
) -> Result<IntegralMvtReport> {
    check_ab_lattice(p, a, b)?;
    let pts = ab_sample_points(p, a, b);
    let (mut inf_f, mut sup_f) = (f64::INFINITY, f64::NEG_INFINITY);
    for &t in &pts {
        if g.call(t)? < 0.0 {
            return Err(Error::invalid(format!("g is negative at lattice point {t}")));
        }
        let v = f.call(t)?;
        inf_f = inf_f.min(v);
        sup_f = sup_f.max(v);
    }
    let fg = |t: f64| -> Result<f64> { Ok(f.call(t)? * g.call(t)?) };
    let int_fg = ab_sym_integral(&fg, p, a, b, policy)?.require()?;
    let int_g = ab_sym_integral(g, p, a, b, policy)?.require()?;
    Ok(IntegralMvtReport::new(int_fg, int_g, inf_f, sup_f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ExprFunc;

    fn f(src: &str) -> ExprFunc {
        ExprFunc::parse(src).unwrap()
    }

    fn pol() -> SeriesPolicy {
        SeriesPolicy::default()
    }

    #[test]
    fn ab_derivative() {
        let p = AlphaBetaParams::new(1.0, 2.0).unwrap();
        assert_eq!(ab_sym_derivative(&f("t^2"), &p, 5.0).unwrap(), 9.0);
        let h = AlphaBetaParams::new(0.5, 0.5).unwrap();
        assert_eq!(ab_sym_derivative(&f("abs(t)"), &h, 0.0).unwrap(), 0.0);
        assert_eq!(ab_sym_derivative(&f("4"), &h, 3.0).unwrap(), 0.0);
        assert!(AlphaBetaParams::new(0.0, 0.0).is_err());
    }

    #[test]
    fn norlund_sums() {
        let e = f("2^(-t)");
        let r = alpha_forward_integral(&e, 1.0, 0.0, 3.0, &pol()).unwrap();
        assert!((r.value - 1.75).abs() < 1e-14);
        assert_eq!(alpha_forward_integral(&e, 1.0, 2.0, 2.0, &pol()).unwrap().value, 0.0);
        let off = alpha_forward_integral(&e, 1.0, 0.0, 3.0 + 1e-3, &pol()).unwrap();
        assert!(off.converged);
        let c = alpha_forward_integral(&f("1"), 1.0, 0.0, 2.5, &pol()).unwrap();
        assert!(!c.converged);
        assert!(matches!(c.require(), Err(Error::NonConvergent { .. })));
        let back = beta_backward_integral(&f("2^t"), 1.0, -3.0, 0.0, &pol()).unwrap();
        assert!((back.value - 1.75).abs() < 1e-14);
    }

    #[test]
    fn ab_integral_examples() {
        let p = AlphaBetaParams::new(2.0, 2.0).unwrap();
        let r = ab_sym_integral(&f("1/t^2"), &p, 1.0, 3.0, &pol()).unwrap();
        assert!((r.value - 10.0 / 9.0).abs() < 1e-12);
        assert_eq!(ab_sym_integral(&f("t"), &p, 1.0, 1.0, &pol()).unwrap().value, 0.0);
        let fwd = AlphaBetaParams::new(1.0, 0.0).unwrap();
        let r = ab_sym_integral(&f("2^(-t)"), &fwd, 0.0, 3.0, &pol()).unwrap();
        assert!((r.value - 1.75).abs() < 1e-14);
    }

    #[test]
    fn ab_ftc_fails() {
        assert!((ab_ftc_primitive(2.0).unwrap() - 9.0 / 8.0).abs() < 1e-15);
        let d = ab_ftc_failure_demo(1).unwrap();
        assert!((d.lhs - 9.0 / 16.0).abs() < 1e-15);
        assert_eq!(d.rhs, 0.5);
        let d = ab_ftc_failure_demo(3).unwrap();
        assert!((d.lhs - 9.0 / 64.0).abs() < 1e-15);
        assert_eq!(d.rhs, 0.125);
    }

    #[test]
    fn q_symmetric() {
        let q = 0.5;
        let t = 3.0;
        assert!((q_sym_derivative(&f("t^2"), q, t).unwrap() - t * (q + 1.0 / q)).abs() < 1e-12);
        assert_eq!(q_sym_derivative(&f("7"), q, t).unwrap(), 0.0);
        assert_eq!(q_sym_derivative(&f("t"), q, t).unwrap(), 1.0);
        let g = f("0")
            .with_t_override(0.5, 1.0)
            .unwrap()
            .with_t_override(1.0 / 6.0, 6.0)
            .unwrap();
        let r = q_sym_integral(&g, q, 1.0 / 3.0, 1.0, &pol()).unwrap();
        assert!((r.value + 0.75).abs() < 1e-12);
        let x = 2.0;
        let r = q_sym_integral(&f("t"), q, 0.0, x, &pol()).unwrap();
        assert!((r.value - q * x * x / (1.0 + q * q)).abs() < 1e-12);
    }

    #[test]
    fn hahn_symmetric() {
        let p = QOmegaParams::new(0.5, 1.0).unwrap();
        assert_eq!(hahn_sym_derivative(&f("t^2"), &p, 4.0).unwrap(), 9.0);
        assert_eq!(hahn_sym_derivative(&f("2"), &p, 4.0).unwrap(), 0.0);
        let q0 = QOmegaParams::q_only(0.5).unwrap();
        let e = f("sin(t)");
        assert_eq!(
            hahn_sym_derivative(&e, &q0, 0.7).unwrap(),
            q_sym_derivative(&e, 0.5, 0.7).unwrap()
        );
        let g = f("0")
            .with_t_override(3.0, 6.0)
            .unwrap()
            .with_t_override(4.0, 1.0)
            .unwrap();
        let r = hahn_sym_integral(&g, &p, 4.0, 6.0, &pol()).unwrap();
        assert!((r.value + 6.0).abs() < 1e-12);
        let r = hahn_sym_integral(&f("1"), &p, 2.0, 4.0, &pol()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn witnesses() {
        let none: Option<&ExprFunc> = None;
        let w = mvt_witness(MvtKind::Rolle, &f("(t-1)*(t-3)"), none, 0.0, 4.0, None).unwrap();
        assert_eq!(w.c, 2.0);
        assert_eq!(w.alpha, w.beta);
        assert_eq!(w.residual, 0.0);
        let w = mvt_witness(MvtKind::Lagrange, &f("t^2"), none, 0.0, 1.0, None).unwrap();
        let p = AlphaBetaParams::new(w.alpha, w.beta).unwrap();
        assert!((ab_sym_derivative(&f("t^2"), &p, w.c).unwrap() - 1.0).abs() < 1e-8);
        let w = mvt_witness(MvtKind::Fermat, &f("-abs(t)"), none, -1.0, 1.0, Some(0.0)).unwrap();
        assert_eq!((w.c, w.residual), (0.0, 0.0));
        assert_eq!(w.alpha, w.beta);
        let g = f("t^3+t");
        let w = mvt_witness(MvtKind::Cauchy, &f("sin(t)"), Some(&g), 0.0, 2.0, None).unwrap();
        assert!(w.residual.abs() < 1e-8);
        assert!(mvt_witness(MvtKind::Rolle, &f("t"), none, 0.0, 1.0, None).is_err());
    }

    #[test]
    fn inequalities() {
        let p = AlphaBetaParams::new(1.0, 1.0).unwrap();
        let (a, b) = (0.0, 4.0);
        let e = f("2^(-t)");
        let r = inequality_check(InequalityKind::CauchySchwarz, &e, &e, &p, a, b, 2.0, &pol()).unwrap();
        assert!(r.holds);
        assert!((r.lhs - r.rhs).abs() < 1e-12);
        let r = inequality_check(InequalityKind::Holder, &e, &f("3^(-t)"), &p, a, b, 2.0, &pol()).unwrap();
        assert!(r.holds);
        let r = inequality_check(InequalityKind::Minkowski, &e, &f("0"), &p, a, b, 3.0, &pol()).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-12);
        assert!(matches!(
            inequality_check(InequalityKind::Holder, &e, &e, &p, 0.0, 2.5, 2.0, &pol()),
            Err(Error::LatticeMismatch(_))
        ));
    }

    #[test]
    fn integral_mvt() {
        let p = AlphaBetaParams::new(1.0, 1.0).unwrap();
        let r = integral_mvt_check(&f("3"), &f("1+t"), &p, 0.0, 4.0, &pol()).unwrap();
        assert!((r.k - 3.0).abs() < 1e-12);
        let r = integral_mvt_check(&f("t"), &f("0"), &p, 0.0, 4.0, &pol()).unwrap();
        assert_eq!((r.k, r.int_fg), (0.0, 0.0));
        let r = integral_mvt_check(&f("2^(-t)"), &f("2^(-t)/(1+t^2)"), &p, 0.0, 4.0, &pol()).unwrap();
        assert!(r.holds && r.inf_f <= r.k && r.k <= r.sup_f);
    }
}
