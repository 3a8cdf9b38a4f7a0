//! The function-definition language.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' factor)?
//! base   := number | ident | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-t^2`
//! is `-(t^2)`. Variables are `t` and `u0` .. `u9`; functions are `abs`,
//! `sqrt`, `exp`, `ln`, `sin`, `cos`, `min`, `max`.
//!
//! Point overrides replace the value of the expression at finitely many
//! points, which is how piecewise counterexample functions are written.

mod eval;
mod parse;

use std::fmt;

pub use eval::DualValue;
pub use parse::{BinOp, Func, Node, NodeKind, Var};

use crate::error::{Error, ParseError, Result};

/// Default override match tolerance, scaled by `max(1, |coordinate|)`.
pub const DEFAULT_MATCH_EPS: f64 = 1e-12;

/// A real function of one real variable, as consumed by every operator.
pub trait RealFn {
    fn call(&self, t: f64) -> Result<f64>;
}

impl<F: Fn(f64) -> Result<f64>> RealFn for F {
    fn call(&self, t: f64) -> Result<f64> {
        self(t)
    }
}

impl RealFn for ExprFunc {
    fn call(&self, t: f64) -> Result<f64> {
        self.eval_t(t)
    }
}

/// Variable bindings for `t, u0 .. u9`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    vals: [Option<f64>; Var::COUNT],
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn t(t: f64) -> Env {
        Env::new().set(Var::T, t)
    }

    /// Binds `t` and `u0 .. u(k-1)` from a slice `[t, u0, u1, ...]`.
    pub fn from_slice(vals: &[f64]) -> Env {
        let mut env = Env::new();
        for (i, v) in vals.iter().enumerate().take(Var::COUNT) {
            env.vals[i] = Some(*v);
        }
        env
    }

    pub fn set(mut self, var: Var, value: f64) -> Env {
        self.vals[var.index()] = Some(value);
        self
    }

    pub fn with_u(self, i: u8, value: f64) -> Env {
        self.set(Var::U(i), value)
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        self.vals[var.index()]
    }
}

/// Replaces the function value at one point. Coordinates follow the order
/// `t, u0, u1, ...`; a point of length 1 constrains `t` only.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub point: Vec<f64>,
    pub value: f64,
}

/// A parsed function with optional point overrides.
#[derive(Debug, Clone)]
pub struct ExprFunc {
    src: String,
    ast: Node,
    overrides: Vec<Override>,
    match_eps: f64,
}

fn coord_close(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps * a.abs().max(1.0)
}

impl ExprFunc {
    pub fn parse(src: &str) -> std::result::Result<ExprFunc, ParseError> {
        if src.trim().is_empty() {
            return Err(ParseError {
                offset: 0,
                expected: vec!["expression".into()],
                found: "empty input".into(),
            });
        }
        Ok(ExprFunc {
            src: src.to_string(),
            ast: parse::parse_node(src)?,
            overrides: Vec::new(),
            match_eps: DEFAULT_MATCH_EPS,
        })
    }

    /// Adds a point override; points must stay pairwise distinct.
    pub fn with_override(mut self, point: Vec<f64>, value: f64) -> Result<ExprFunc> {
        if point.is_empty() || point.len() > Var::COUNT {
            return Err(Error::invalid("override point needs 1 to 11 coordinates"));
        }
        if !value.is_finite() || point.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("override coordinates and value must be finite"));
        }
        if self.overrides.iter().any(|o| self.points_collide(&o.point, &point)) {
            return Err(Error::invalid(format!(
                "override point {point:?} duplicates an existing override"
            )));
        }
        self.overrides.push(Override { point, value });
        Ok(self)
    }

    /// Shorthand for an override at `t = t0`.
    pub fn with_t_override(self, t0: f64, value: f64) -> Result<ExprFunc> {
        self.with_override(vec![t0], value)
    }

    pub fn with_match_eps(mut self, eps: f64) -> Result<ExprFunc> {
        if !(eps > 0.0) {
            return Err(Error::invalid("match_eps must be positive"));
        }
        self.match_eps = eps;
        Ok(self)
    }

    fn points_collide(&self, a: &[f64], b: &[f64]) -> bool {
        a.iter()
            .zip(b)
            .all(|(x, y)| coord_close(*x, *y, self.match_eps))
    }

    pub fn source(&self) -> &str {
        &self.src
    }

    pub fn ast(&self) -> &Node {
        &self.ast
    }

    pub fn overrides(&self) -> &[Override] {
        &self.overrides
    }

    pub fn match_eps(&self) -> f64 {
        self.match_eps
    }

    /// Variables that occur in the expression tree.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut v = Vec::new();
        self.ast.visit_vars(&mut v);
        v.sort();
        v
    }

    /// The override value matching `env`, if any.
    pub fn override_at(&self, env: &Env) -> Option<f64> {
        self.overrides.iter().find_map(|o| {
            let hit = o.point.iter().enumerate().all(|(i, c)| {
                Var::from_index(i)
                    .and_then(|v| env.get(v))
                    .is_some_and(|x| coord_close(x, *c, self.match_eps))
            });
            hit.then_some(o.value)
        })
    }

    pub fn eval(&self, env: &Env) -> Result<f64> {
        if let Some(v) = self.override_at(env) {
            return Ok(v);
        }
        let v = eval::eval_node::<f64>(&self.ast, &env.vals)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::eval(0, "result is not finite"))
        }
    }

    pub fn eval_t(&self, t: f64) -> Result<f64> {
        self.eval(&Env::t(t))
    }

    /// Value and exact partial derivative with respect to `seed`.
    pub fn eval_dual(&self, env: &Env, seed: Var) -> Result<DualValue> {
        if self.override_at(env).is_some() {
            return Err(Error::OverrideNotDifferentiable);
        }
        let Some(seed_value) = env.get(seed) else {
            return Err(Error::eval(0, format!("seed variable {seed} is not bound")));
        };
        let mut vars: [Option<DualValue>; Var::COUNT] = [None; Var::COUNT];
        for (i, slot) in vars.iter_mut().enumerate() {
            *slot = env.vals[i].map(|x| DualValue {
                primal: x,
                tangent: 0.0,
            });
        }
        vars[seed.index()] = Some(DualValue {
            primal: seed_value,
            tangent: 1.0,
        });
        let d = eval::eval_node(&self.ast, &vars)?;
        if d.primal.is_finite() && d.tangent.is_finite() {
            Ok(d)
        } else {
            Err(Error::eval(0, "value or derivative is not finite"))
        }
    }
}

impl fmt::Display for ExprFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

/// Parses a real number written as a decimal or a fraction such as `1/6`.
pub fn parse_real(text: &str) -> Result<f64> {
    let text = text.trim();
    let bad = || Error::invalid(format!("'{text}' is not a number or fraction"));
    let value = match text.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            n / d
        }
        None => text.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(src: &str) -> ExprFunc {
        ExprFunc::parse(src).unwrap()
    }

    #[test]
    fn evaluates_polynomial() {
        assert_eq!(f("t^2+1").eval_t(2.0).unwrap(), 5.0);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(f("2^3^2").eval_t(0.0).unwrap(), 512.0);
        assert_eq!(f("-t^2").eval_t(3.0).unwrap(), -9.0);
        assert_eq!(f("(-t)^2").eval_t(3.0).unwrap(), 9.0);
        assert_eq!(f("2^-1").eval_t(0.0).unwrap(), 0.5);
        assert_eq!(f("8/2/2").eval_t(0.0).unwrap(), 2.0);
        assert_eq!(f("1-2-3").eval_t(0.0).unwrap(), -4.0);
        assert_eq!(f("min(t, 2, -1)").eval_t(5.0).unwrap(), -1.0);
        assert_eq!(f("max(t, 2)").eval_t(5.0).unwrap(), 5.0);
    }

    #[test]
    fn incomplete_power_reports_offset() {
        let e = ExprFunc::parse("t^").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(e.expected.iter().any(|s| s == "number"));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(ExprFunc::parse("").unwrap_err().offset, 0);
        assert_eq!(ExprFunc::parse("t + x").unwrap_err().offset, 4);
        assert_eq!(ExprFunc::parse("sin(t").unwrap_err().offset, 5);
        assert_eq!(ExprFunc::parse("t t").unwrap_err().offset, 2);
        assert!(ExprFunc::parse("sin(t, t)").is_err());
        assert!(ExprFunc::parse("max(t)").is_err());
        assert!(ExprFunc::parse("t # 2").is_err());
    }

    #[test]
    fn overrides_shadow_base() {
        let g = f("0")
            .with_t_override(0.5, 1.0)
            .unwrap()
            .with_t_override(1.0 / 6.0, 6.0)
            .unwrap();
        assert_eq!(g.eval_t(1.0 / 6.0).unwrap(), 6.0);
        assert_eq!(g.eval_t(0.5).unwrap(), 1.0);
        assert_eq!(g.eval_t(0.3).unwrap(), 0.0);
        assert!(f("0").with_t_override(1.0, 1.0).unwrap().with_t_override(1.0, 2.0).is_err());
    }

    #[test]
    fn eval_errors() {
        assert!(matches!(f("1/t").eval_t(0.0), Err(Error::Eval { .. })));
        assert!(matches!(f("ln(t)").eval_t(-1.0), Err(Error::Eval { .. })));
        assert!(matches!(f("sqrt(t)").eval_t(-1.0), Err(Error::Eval { .. })));
        assert!(matches!(f("t^0.5").eval_t(-1.0), Err(Error::Eval { .. })));
        assert_eq!(f("t^3").eval_t(-2.0).unwrap(), -8.0);
        assert!(matches!(f("u0").eval_t(1.0), Err(Error::Eval { .. })));
        match f("1 + 1/t").eval_t(0.0) {
            Err(Error::Eval { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dual_partials() {
        let d = f("u1^2").eval_dual(&Env::new().with_u(1, 3.0), Var::U(1)).unwrap();
        assert_eq!((d.primal, d.tangent), (9.0, 6.0));
        let env = Env::t(2.0).with_u(0, 5.0);
        let d = f("t*u0").eval_dual(&env, Var::U(0)).unwrap();
        assert_eq!((d.primal, d.tangent), (10.0, 2.0));
        let d = f("sqrt(1+u1^2)").eval_dual(&Env::new().with_u(1, 1.0), Var::U(1)).unwrap();
        assert!((d.primal - 2f64.sqrt()).abs() < 1e-15);
        assert!((d.tangent - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dual_refuses_overrides() {
        let g = f("u0").with_override(vec![0.0, 1.0], 3.0).unwrap();
        let env = Env::t(0.0).with_u(0, 1.0);
        assert_eq!(g.eval(&env).unwrap(), 3.0);
        assert_eq!(g.eval_dual(&env, Var::U(0)), Err(Error::OverrideNotDifferentiable));
    }

    #[test]
    fn fractions() {
        assert_eq!(parse_real("1/6").unwrap(), 1.0 / 6.0);
        assert_eq!(parse_real("-0.5").unwrap(), -0.5);
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("abc").is_err());
    }

    #[test]
    fn printing_round_trips() {
        for src in ["-t^2", "(-t)^2", "a", "2^-t^2", "t-(t-1)", "t/(2*t)", "-(t+1)*3", "--t", "min(t, -t)^2"] {
            if let Ok(e) = ExprFunc::parse(src) {
                let again = ExprFunc::parse(&e.to_string()).unwrap();
                assert_eq!(e.ast(), again.ast(), "{src} -> {e}");
            }
        }
    }
}
