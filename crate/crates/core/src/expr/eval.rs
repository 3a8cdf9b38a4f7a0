use serde::Serialize;

use super::parse::{BinOp, Func, Node, NodeKind, Var};
use crate::error::{Error, Result};

/// Value paired with a directional derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualValue {
    pub primal: f64,
    pub tangent: f64,
}

pub(crate) trait Scalar: Copy {
    fn constant(x: f64) -> Self;
    fn re(self) -> f64;
    /// True when the derivative part vanishes.
    fn is_const(self) -> bool;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn div(self, o: Self) -> Self;
    fn neg(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, y: Self) -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Option<Self>;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

impl Scalar for f64 {
    fn constant(x: f64) -> Self {
        x
    }
    fn re(self) -> f64 {
        self
    }
    fn is_const(self) -> bool {
        true
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn div(self, o: Self) -> Self {
        self / o
    }
    fn neg(self) -> Self {
        -self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, y: Self) -> Self {
        f64::powf(self, y)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Option<Self> {
        Some(f64::sqrt(self))
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

impl DualValue {
    fn d(primal: f64, tangent: f64) -> Self {
        DualValue { primal, tangent }
    }
}

impl Scalar for DualValue {
    fn constant(x: f64) -> Self {
        DualValue::d(x, 0.0)
    }
    fn re(self) -> f64 {
        self.primal
    }
    fn is_const(self) -> bool {
        self.tangent == 0.0
    }
    fn add(self, o: Self) -> Self {
        DualValue::d(self.primal + o.primal, self.tangent + o.tangent)
    }
    fn sub(self, o: Self) -> Self {
        DualValue::d(self.primal - o.primal, self.tangent - o.tangent)
    }
    fn mul(self, o: Self) -> Self {
        DualValue::d(
            self.primal * o.primal,
            self.tangent * o.primal + self.primal * o.tangent,
        )
    }
    fn div(self, o: Self) -> Self {
        let v = self.primal / o.primal;
        DualValue::d(v, (self.tangent - v * o.tangent) / o.primal)
    }
    fn neg(self) -> Self {
        DualValue::d(-self.primal, -self.tangent)
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return DualValue::d(1.0, 0.0);
        }
        DualValue::d(
            self.primal.powi(n),
            n as f64 * self.primal.powi(n - 1) * self.tangent,
        )
    }
    fn powf(self, y: Self) -> Self {
        let v = self.primal.powf(y.primal);
        let tangent = v * (y.tangent * self.primal.ln() + y.primal * self.tangent / self.primal);
        DualValue::d(v, tangent)
    }
    fn abs(self) -> Self {
        let s = if self.primal > 0.0 {
            1.0
        } else if self.primal < 0.0 {
            -1.0
        } else {
            0.0
        };
        DualValue::d(self.primal.abs(), s * self.tangent)
    }
    fn sqrt(self) -> Option<Self> {
        let r = self.primal.sqrt();
        if r == 0.0 {
            return (self.tangent == 0.0).then_some(DualValue::d(0.0, 0.0));
        }
        Some(DualValue::d(r, self.tangent / (2.0 * r)))
    }
    fn exp(self) -> Self {
        let e = self.primal.exp();
        DualValue::d(e, e * self.tangent)
    }
    fn ln(self) -> Self {
        DualValue::d(self.primal.ln(), self.tangent / self.primal)
    }
    fn sin(self) -> Self {
        DualValue::d(self.primal.sin(), self.primal.cos() * self.tangent)
    }
    fn cos(self) -> Self {
        DualValue::d(self.primal.cos(), -self.primal.sin() * self.tangent)
    }
}

pub(crate) fn eval_node<S: Scalar>(node: &Node, vars: &[Option<S>; Var::COUNT]) -> Result<S> {
    let at = node.offset;
    match &node.kind {
        NodeKind::Num(x) => Ok(S::constant(*x)),
        NodeKind::Var(v) => vars[v.index()]
            .ok_or_else(|| Error::eval(at, format!("variable {v} is not bound"))),
        NodeKind::Neg(x) => Ok(eval_node(x, vars)?.neg()),
        NodeKind::Bin(op, l, r) => {
            let a = eval_node(l, vars)?;
            let b = eval_node(r, vars)?;
            match op {
                BinOp::Add => Ok(a.add(b)),
                BinOp::Sub => Ok(a.sub(b)),
                BinOp::Mul => Ok(a.mul(b)),
                BinOp::Div => {
                    if b.re() == 0.0 {
                        Err(Error::eval(at, "division by zero"))
                    } else {
                        Ok(a.div(b))
                    }
                }
                BinOp::Pow => pow(a, b, at),
            }
        }
        NodeKind::Call(func, args) => {
            let x = eval_node(&args[0], vars)?;
            match func {
                Func::Abs => Ok(x.abs()),
                Func::Sqrt => {
                    if x.re() < 0.0 {
                        return Err(Error::eval(at, "sqrt of a negative number"));
                    }
                    x.sqrt()
                        .ok_or_else(|| Error::eval(at, "sqrt is not differentiable at 0"))
                }
                Func::Exp => Ok(x.exp()),
                Func::Ln => {
                    if x.re() <= 0.0 {
                        Err(Error::eval(at, "ln of a nonpositive number"))
                    } else {
                        Ok(x.ln())
                    }
                }
                Func::Sin => Ok(x.sin()),
                Func::Cos => Ok(x.cos()),
                Func::Min | Func::Max => {
                    let mut best = x;
                    for a in &args[1..] {
                        let y = eval_node(a, vars)?;
                        let better = if *func == Func::Min {
                            y.re() < best.re()
                        } else {
                            y.re() > best.re()
                        };
                        if better {
                            best = y;
                        }
                    }
                    Ok(best)
                }
            }
        }
    }
}

fn pow<S: Scalar>(base: S, exp: S, at: usize) -> Result<S> {
    let e = exp.re();
    if exp.is_const() && e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
        let n = e as i32;
        if base.re() == 0.0 && n < 0 {
            return Err(Error::eval(at, "division by zero in power"));
        }
        return Ok(base.powi(n));
    }
    if base.re() > 0.0 {
        Ok(base.powf(exp))
    } else {
        Err(Error::eval(at, "real exponent requires a positive base"))
    }
}
