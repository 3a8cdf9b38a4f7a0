//! Quantum variational problems: functionals, Euler-Lagrange residuals on
//! the orbit lattice, first variations, sampled joint convexity and
//! Leitmann's direct method.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Env, ExprFunc, RealFn, Var};
use crate::numerics::{central_derivative_step, SeriesPolicy, SeriesResult};
use crate::quantum::{hahn_derivative, hahn_integral, nested_hahn, QOmegaParams};
use crate::symcalc::{hahn_sym_derivative, hahn_sym_integral};

/// Orbit points per endpoint in residual lattices.
pub const DEFAULT_DEPTH: usize = 24;

/// Largest order of the higher-order Hahn flavor.
pub const MAX_ORDER: usize = 4;

/// Tolerance for boundary and admissibility checks.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Initial step of the classical derivative taken by the outer operator of
/// a residual at the fixed point, relative to `max(1, |w0|)`.
const OUTER_FIXED_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    HahnHigher,
    QSymmetric,
    HahnSymmetric,
}

impl Flavor {
    pub fn is_symmetric(self) -> bool {
        self != Flavor::HahnHigher
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Flavor> {
        match s.replace('-', "_").as_str() {
            "hahn_higher" => Ok(Flavor::HahnHigher),
            "q_symmetric" => Ok(Flavor::QSymmetric),
            "hahn_symmetric" => Ok(Flavor::HahnSymmetric),
            _ => Err(Error::invalid(format!("unknown flavor '{s}'"))),
        }
    }
}

/// `L[y] = int_a^b L(t, ...) ` over one of the three calculi, with fixed
/// boundary data.
#[derive(Debug, Clone)]
pub struct VariationalProblem {
    pub flavor: Flavor,
    pub params: QOmegaParams,
    pub order: usize,
    pub lagrangian: ExprFunc,
    pub a: f64,
    pub b: f64,
    /// `[alpha_0, beta_0, alpha_1, beta_1, ...]`: the value of `D^i[y]` at
    /// `a` and at `b`.
    pub boundary: Vec<f64>,
    pub depth: usize,
}

impl VariationalProblem {
    pub fn new(
        flavor: Flavor,
        params: QOmegaParams,
        order: usize,
        lagrangian: ExprFunc,
        a: f64,
        b: f64,
        boundary: Vec<f64>,
    ) -> Result<VariationalProblem> {
        if !(a < b) {
            return Err(Error::invalid("the problem needs a < b"));
        }
        if flavor == Flavor::QSymmetric && params.omega() != 0.0 {
            return Err(Error::invalid("the q-symmetric flavor needs omega = 0"));
        }
        if flavor.is_symmetric() && order != 1 {
            return Err(Error::invalid("symmetric flavors are first order"));
        }
        if order == 0 || order > MAX_ORDER {
            return Err(Error::OrderTooHigh {
                order,
                max: MAX_ORDER,
            });
        }
        if let Some(v) = lagrangian
            .free_vars()
            .into_iter()
            .find(|v| matches!(v, Var::U(i) if *i as usize > order))
        {
            return Err(Error::invalid(format!(
                "lagrangian of order {order} may use t, u0..u{order}, found {v}"
            )));
        }
        if boundary.len() != 2 * order {
            return Err(Error::invalid(format!(
                "order {order} needs {} boundary values",
                2 * order
            )));
        }
        Ok(VariationalProblem {
            flavor,
            params,
            order,
            lagrangian,
            a,
            b,
            boundary,
            depth: DEFAULT_DEPTH,
        })
    }

    pub fn with_depth(mut self, depth: usize) -> Result<VariationalProblem> {
        if depth == 0 {
            return Err(Error::invalid("lattice depth must be positive"));
        }
        self.depth = depth;
        Ok(self)
    }

    /// The lattice where residuals are evaluated: the first `depth` points of
    /// the orbits of `a` and `b` (`sigma^n` for the higher-order flavor,
    /// `sigma^{2n+1}` for the symmetric ones) and `w0`.
    pub fn lattice(&self) -> Vec<f64> {
        let p = &self.params;
        let mut pts: Vec<f64> = Vec::new();
        let mut push = |x: f64| {
            if !pts.contains(&x) {
                pts.push(x);
            }
        };
        for s in [self.a, self.b] {
            for n in 0..self.depth as i64 {
                let k = if self.flavor.is_symmetric() { 2 * n + 1 } else { n };
                let x = p.sigma_orbit(s, k);
                push(if p.at_fixed_point(x) { p.omega0() } else { x });
            }
        }
        push(p.omega0());
        pts
    }

    fn d(&self, f: &dyn RealFn, t: f64) -> Result<f64> {
        if self.flavor.is_symmetric() {
            hahn_sym_derivative(f, &self.params, t)
        } else {
            hahn_derivative(f, &self.params, t)
        }
    }

    /// `[t, u0, ..., ur]` fed to the Lagrangian at `t`.
    pub fn arguments(&self, y: &dyn RealFn, t: f64) -> Result<Vec<f64>> {
        let p = &self.params;
        if self.flavor.is_symmetric() {
            return Ok(vec![t, y.call(p.sigma(t))?, self.d(y, t)?]);
        }
        let r = self.order;
        let mut args = vec![t];
        for j in 0..=r {
            let shift = (r - j) as i64;
            let shifted = |x: f64| y.call(p.sigma_orbit(x, shift));
            args.push(nested_hahn(&shifted, p, t, j)?);
        }
        Ok(args)
    }

    pub fn integrand(&self, y: &dyn RealFn, t: f64) -> Result<f64> {
        self.lagrangian.eval(&Env::from_slice(&self.arguments(y, t)?))
    }

    /// `d L / d u_i` along `y` at `t`.
    fn partial(&self, y: &dyn RealFn, i: usize, t: f64) -> Result<f64> {
        let env = Env::from_slice(&self.arguments(y, t)?);
        Ok(self.lagrangian.eval_dual(&env, Var::U(i as u8))?.tangent)
    }

    fn integrate(&self, f: &dyn RealFn, policy: &SeriesPolicy) -> Result<SeriesResult> {
        if self.flavor.is_symmetric() {
            hahn_sym_integral(f, &self.params, self.a, self.b, policy)
        } else {
            hahn_integral(f, &self.params, self.a, self.b, policy)
        }
    }

    /// `i`-fold outer operator used by residuals; at `w0` the classical
    /// derivative uses a wider step since the inner function is itself a
    /// difference quotient.
    fn outer(&self, f: &dyn RealFn, t: f64, i: usize) -> Result<f64> {
        if i == 0 {
            return f.call(t);
        }
        let inner = |x: f64| self.outer(f, x, i - 1);
        let p = &self.params;
        if p.at_fixed_point(t) {
            let h = OUTER_FIXED_STEP * p.omega0().abs().max(1.0);
            return central_derivative_step(&inner, p.omega0(), h);
        }
        self.d(&inner, t)
    }

    /// `D^i[y](x)` for boundary checks.
    fn boundary_derivative(&self, y: &dyn RealFn, x: f64, i: usize) -> Result<f64> {
        if self.flavor.is_symmetric() {
            y.call(x)
        } else {
            nested_hahn(y, &self.params, x, i)
        }
    }

    pub fn check_boundary(&self, y: &dyn RealFn) -> Result<()> {
        for i in 0..self.order {
            for (x, want) in [(self.a, self.boundary[2 * i]), (self.b, self.boundary[2 * i + 1])] {
                let got = self.boundary_derivative(y, x, i)?;
                if (got - want).abs() > BOUNDARY_TOL {
                    return Err(Error::BoundaryViolation(format!(
                        "D^{i}[y]({x}) = {got}, expected {want}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_admissible(&self, eta: &dyn RealFn) -> Result<()> {
        for i in 0..self.order {
            for x in [self.a, self.b] {
                let got = self.boundary_derivative(eta, x, i)?;
                if got.abs() > BOUNDARY_TOL {
                    return Err(Error::InadmissibleVariation(format!(
                        "D^{i}[eta]({x}) = {got} does not vanish"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Euler-Lagrange defect at `t`.
    pub fn residual_at(&self, y: &dyn RealFn, t: f64) -> Result<f64> {
        if self.flavor.is_symmetric() {
            let p = &self.params;
            let inner = |tau: f64| self.partial(y, 1, p.sigma(tau));
            return Ok(self.partial(y, 0, t)? - self.outer(&inner, t, 1)?);
        }
        let q = self.params.q();
        let mut total = 0.0;
        for i in 0..=self.order {
            let inner = |tau: f64| self.partial(y, i, tau);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let weight = sign * q.powi(-((i * i.saturating_sub(1) / 2) as i32));
            total += weight * self.outer(&inner, t, i)?;
        }
        Ok(total)
    }

    /// The integral form of the first variation:
    /// `int sum_i d_{i+2}L * D^i[eta^{sigma^{r-i}}]` (higher order) or
    /// `int (d_2L * eta^sigma + d_3L * D~[eta])` (symmetric).
    pub fn first_variation_integral(
        &self,
        y: &dyn RealFn,
        eta: &dyn RealFn,
        policy: &SeriesPolicy,
    ) -> Result<SeriesResult> {
        let integrand = |t: f64| -> Result<f64> {
            let eta_args = self.arguments(eta, t)?;
            let mut acc = 0.0;
            for i in 0..=self.order {
                acc += self.partial(y, i, t)? * eta_args[i + 1];
            }
            Ok(acc)
        };
        self.integrate(&integrand, policy)
    }
}

pub fn eval_functional(
    prob: &VariationalProblem,
    y: &dyn RealFn,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    let integrand = |t: f64| prob.integrand(y, t);
    prob.integrate(&integrand, policy)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub points: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    pub functional_value: f64,
}

/// Euler-Lagrange residuals of `y` over [`VariationalProblem::lattice`].
pub fn el_residual(
    prob: &VariationalProblem,
    y: &dyn RealFn,
    policy: &SeriesPolicy,
) -> Result<ResidualReport> {
    prob.check_boundary(y)?;
    let points = prob.lattice();
    let residuals = points
        .iter()
        .map(|&t| prob.residual_at(y, t))
        .collect::<Result<Vec<_>>>()?;
    let max_abs = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let functional_value = eval_functional(prob, y, policy)?.require()?;
    Ok(ResidualReport {
        points,
        residuals,
        max_abs,
        functional_value,
    })
}

/// `d/de L[y + e eta]` at `e = 0` by a central difference with step `1e-5`
/// and one Richardson step.
pub fn first_variation(
    prob: &VariationalProblem,
    y: &dyn RealFn,
    eta: &dyn RealFn,
    policy: &SeriesPolicy,
) -> Result<f64> {
    prob.check_admissible(eta)?;
    let phi = |e: f64| -> Result<f64> {
        let moved = |t: f64| -> Result<f64> { Ok(y.call(t)? + e * eta.call(t)?) };
        eval_functional(prob, &moved, policy)?.require()
    };
    central_derivative_step(&phi, 0.0, 1e-5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityViolation {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub u1: f64,
    pub v1: f64,
    /// `L(t,u+u1,v+v1) - L(t,u,v) - d2L u1 - d3L v1`, negative here.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub samples: usize,
    pub seed: u64,
    pub jointly_convex_evidence: bool,
    pub violations: Vec<ConvexityViolation>,
}

/// Samples the subgradient inequality of `L(t, u0, u1)` in `(u0, u1)` at `n`
/// values of `t`, with `n` random pairs each.
pub fn convexity_sample(
    l: &ExprFunc,
    t_range: (f64, f64),
    u_range: (f64, f64),
    v_range: (f64, f64),
    n: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    if n < 2 {
        return Err(Error::invalid("convexity sampling needs n >= 2"));
    }
    for (lo, hi) in [t_range, u_range, v_range] {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("sample ranges need finite lo <= hi"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |(lo, hi): (f64, f64)| if lo == hi { lo } else { rng.random_range(lo..hi) };
    let mut violations = Vec::new();
    for _ in 0..n {
        let t = draw(t_range);
        for _ in 0..n {
            let (u, v) = (draw(u_range), draw(v_range));
            let (u1, v1) = (draw(u_range) - u, draw(v_range) - v);
            let env = Env::t(t).with_u(0, u).with_u(1, v);
            let base = l.eval_dual(&env, Var::U(0))?;
            let du = base.tangent;
            let dv = l.eval_dual(&env, Var::U(1))?.tangent;
            let moved = l.eval(&Env::t(t).with_u(0, u + u1).with_u(1, v + v1))?;
            let gap = moved - base.primal - du * u1 - dv * v1;
            if gap < -1e-9 {
                violations.push(ConvexityViolation { t, u, v, u1, v1, gap });
            }
        }
    }
    Ok(ConvexityReport {
        samples: n * n,
        seed,
        jointly_convex_evidence: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeitmannReport {
    pub samples: usize,
    pub seed: u64,
    /// Largest pointwise defect of the identity over all samples.
    pub pointwise_max: f64,
    /// `L[y] - Lbar[ybar]` per sample.
    pub functional_differences: Vec<f64>,
    /// `G(b, ybar(b)) - G(a, ybar(a))` per sample.
    pub boundary_differences: Vec<f64>,
    pub functional_max_dev: f64,
    pub holds: bool,
}

fn eval2(f: &ExprFunc, t: f64, w: f64) -> Result<f64> {
    f.eval(&Env::t(t).with_u(0, w))
}

/// Checks Leitmann's identity
/// `L(y) - Lbar(ybar) = D~[tau -> G(tau, ybar(tau))]` along random admissible
/// `ybar`, with `y = z(t, ybar)`. `z`, `z_inv` and `G` are functions of
/// `(t, u0)`; `prob` carries `L`, `[a, b]` and the boundary values of `y`.
#[allow(clippy::too_many_arguments)]
pub fn leitmann_check(
    prob: &VariationalProblem,
    lbar: &ExprFunc,
    z: &ExprFunc,
    z_inv: &ExprFunc,
    g: &ExprFunc,
    samples: usize,
    seed: u64,
    policy: &SeriesPolicy,
) -> Result<LeitmannReport> {
    if !prob.flavor.is_symmetric() {
        return Err(Error::invalid("leitmann checks need a symmetric flavor"));
    }
    let bar = VariationalProblem {
        lagrangian: lbar.clone(),
        ..prob.clone()
    };
    let (a, b) = (prob.a, prob.b);
    let ya = eval2(z_inv, a, prob.boundary[0])?;
    let yb = eval2(z_inv, b, prob.boundary[1])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattice = prob.lattice();
    let mut pointwise_max = 0.0f64;
    let mut functional_differences = Vec::with_capacity(samples);
    let mut boundary_differences = Vec::with_capacity(samples);
    for _ in 0..samples {
        let c0: f64 = rng.random_range(-1.0..1.0);
        let c1: f64 = rng.random_range(-1.0..1.0);
        let k: f64 = rng.random_range(0.5..3.0);
        let ybar = move |t: f64| -> Result<f64> {
            let lin = ya + (yb - ya) * (t - a) / (b - a);
            Ok(lin + (t - a) * (b - t) * (c0 + c1 * (k * t).sin()))
        };
        let y = |t: f64| -> Result<f64> { eval2(z, t, ybar(t)?) };
        let gy = |t: f64| -> Result<f64> { eval2(g, t, ybar(t)?) };
        for &t in &lattice {
            let lhs = prob.integrand(&y, t)? - bar.integrand(&ybar, t)?;
            let rhs = prob.d(&gy, t)?;
            pointwise_max = pointwise_max.max((lhs - rhs).abs());
        }
        let diff = eval_functional(prob, &y, policy)?.require()?
            - eval_functional(&bar, &ybar, policy)?.require()?;
        functional_differences.push(diff);
        boundary_differences.push(gy(b)? - gy(a)?);
    }
    let functional_max_dev = functional_differences
        .iter()
        .zip(&boundary_differences)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(LeitmannReport {
        samples,
        seed,
        pointwise_max,
        functional_differences,
        boundary_differences,
        functional_max_dev,
        holds: pointwise_max <= 1e-8 && functional_max_dev <= 1e-7,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(src: &str) -> ExprFunc {
        ExprFunc::parse(src).unwrap()
    }

    fn pol() -> SeriesPolicy {
        SeriesPolicy::default()
    }

    fn problemaq(q: f64) -> VariationalProblem {
        VariationalProblem::new(
            Flavor::QSymmetric,
            QOmegaParams::q_only(q).unwrap(),
            1,
            f("1+u1^2"),
            0.0,
            1.0,
            vec![0.0, 1.0],
        )
        .unwrap()
    }

    fn hahn_example() -> (VariationalProblem, ExprFunc) {
        let prob = VariationalProblem::new(
            Flavor::HahnHigher,
            QOmegaParams::new(0.5, 0.5).unwrap(),
            1,
            f("(u0+1/2)^2*(u1^2-1)^2"),
            -1.0,
            1.0,
            vec![0.0, -1.0],
        )
        .unwrap();
        let y = f("-t")
            .with_t_override(-1.0, 0.0)
            .unwrap()
            .with_t_override(0.0, 1.0)
            .unwrap();
        (prob, y)
    }

    #[test]
    fn higher_order_example() {
        let (prob, y) = hahn_example();
        let r = el_residual(&prob, &y, &pol()).unwrap();
        assert!(r.max_abs <= 1e-7, "{r:?}");
        assert!(r.functional_value.abs() <= 1e-10);
        assert_eq!(prob.lattice()[1], 0.0);
    }

    #[test]
    fn problemaq_extremal() {
        for q in [0.3, 0.5, 0.9] {
            let prob = problemaq(q);
            let r = el_residual(&prob, &f("t"), &pol()).unwrap();
            assert!(r.max_abs <= 1e-8, "q={q}: {r:?}");
            assert!((r.functional_value - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_is_checked() {
        let prob = problemaq(0.5);
        assert!(matches!(
            el_residual(&prob, &f("t^2+1"), &pol()),
            Err(Error::BoundaryViolation(_))
        ));
    }

    #[test]
    fn constant_and_zero_cases() {
        let prob = VariationalProblem::new(
            Flavor::QSymmetric,
            QOmegaParams::q_only(0.5).unwrap(),
            1,
            f("u1^2"),
            0.0,
            1.0,
            vec![2.0, 2.0],
        )
        .unwrap();
        assert_eq!(eval_functional(&prob, &f("2"), &pol()).unwrap().value, 0.0);
        assert_eq!(first_variation(&prob, &f("2"), &f("0"), &pol()).unwrap(), 0.0);
    }

    #[test]
    fn first_variations() {
        let prob = problemaq(0.5);
        let eta = f("t*(1-t)");
        assert!(first_variation(&prob, &f("t"), &eta, &pol()).unwrap().abs() <= 1e-6);
        assert!(first_variation(&prob, &f("t^2"), &eta, &pol()).unwrap().abs() > 1e-3);
        assert!(matches!(
            first_variation(&prob, &f("t"), &f("t"), &pol()),
            Err(Error::InadmissibleVariation(_))
        ));
        let integral = prob.first_variation_integral(&f("t^2"), &eta, &pol()).unwrap().value;
        let numeric = first_variation(&prob, &f("t^2"), &eta, &pol()).unwrap();
        assert!((integral - numeric).abs() < 1e-6);
    }

    #[test]
    fn convexity() {
        let r = convexity_sample(&f("u1^2"), (0.0, 1.0), (-2.0, 2.0), (-2.0, 2.0), 10, 1).unwrap();
        assert!(r.jointly_convex_evidence);
        let r = convexity_sample(&f("-u1^2"), (0.0, 1.0), (-2.0, 2.0), (-2.0, 2.0), 10, 1).unwrap();
        assert!(!r.violations.is_empty());
        let r = convexity_sample(&f("sqrt(1+u1^2)"), (0.0, 1.0), (-2.0, 2.0), (-2.0, 2.0), 10, 1).unwrap();
        assert!(r.jointly_convex_evidence);
    }

    fn leitmann_problem(q: f64, omega: f64, b: f64, alpha: f64, beta: f64) -> VariationalProblem {
        let p = QOmegaParams::new(q, omega).unwrap();
        let a = p.omega0();
        VariationalProblem::new(
            Flavor::HahnSymmetric,
            p,
            1,
            f(&format!("u1^2+{q}*u0+t*u1")),
            a,
            b,
            vec![alpha, beta],
        )
        .unwrap()
    }

    #[test]
    fn leitmann_example() {
        let (q, omega, b, alpha, beta) = (0.9, 0.1, 2.0, 0.0, 1.0);
        let prob = leitmann_problem(q, omega, b, alpha, beta);
        let a = prob.a;
        let c = (alpha - beta) / (a - b);
        let d = (a * beta - b * alpha) / (a - b);
        let y = f(&format!("{c}*t+{d}"));
        assert!(el_residual(&prob, &y, &pol()).unwrap().max_abs <= 1e-8);
        let z = f(&format!("u0+{c}*t+{d}"));
        let z_inv = f(&format!("u0-{c}*t-{d}"));
        let g = f(&format!(
            "2*{c}*u0+({c}^2+{q}*{d})*t+({q}*t+{omega})*u0+{c}*({q}*t+{omega})*t"
        ));
        let r = leitmann_check(&prob, &f("u1^2"), &z, &z_inv, &g, 5, 7, &pol()).unwrap();
        assert!(r.holds, "{r:?}");
        let bad = f(&format!("2*{c}*u0+t"));
        let r = leitmann_check(&prob, &f("u1^2"), &z, &z_inv, &bad, 3, 7, &pol()).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn leitmann_trivial() {
        let prob = leitmann_problem(0.5, 1.0, 4.0, 0.0, 0.0);
        let id = f("u0");
        let r = leitmann_check(&prob, &prob.lagrangian.clone(), &id, &id, &f("0"), 3, 1, &pol()).unwrap();
        assert!(r.holds);
        assert!(r.functional_differences.iter().all(|d| *d == 0.0));
    }

    #[test]
    fn rejects_bad_problems() {
        let p = QOmegaParams::new(0.5, 1.0).unwrap();
        assert!(VariationalProblem::new(Flavor::QSymmetric, p, 1, f("u1"), 0.0, 1.0, vec![0.0, 1.0]).is_err());
        let q = QOmegaParams::q_only(0.5).unwrap();
        assert!(VariationalProblem::new(Flavor::QSymmetric, q, 1, f("u2"), 0.0, 1.0, vec![0.0, 1.0]).is_err());
        assert!(VariationalProblem::new(Flavor::HahnHigher, q, 5, f("u1"), 0.0, 1.0, vec![0.0; 10]).is_err());
        assert!(VariationalProblem::new(Flavor::QSymmetric, q, 1, f("u1"), 1.0, 0.0, vec![0.0, 1.0]).is_err());
    }
}
