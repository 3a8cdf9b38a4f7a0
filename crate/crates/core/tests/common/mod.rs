#![allow(dead_code)]

use proptest::prelude::*;
use qcalc_core::ExprFunc;

pub fn f(src: &str) -> ExprFunc {
    ExprFunc::parse(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// Polynomial, trigonometric and Gaussian mix with bounded derivatives.
pub fn smooth() -> impl Strategy<Value = String> {
    (
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        (0.3..2.0f64, -3.0..3.0f64, -1.0..1.0f64, 0.2..2.0f64),
    )
        .prop_map(|((c0, c1, c2, c3), (k, ph, c4, k2))| {
            format!("({c0})+({c1})*t+({c2})*t^2/10+({c3})*sin(({k})*t+({ph}))+({c4})*exp(-({k2})*t^2/25)")
        })
}

/// Nonnegative everywhere.
pub fn nonneg() -> impl Strategy<Value = String> {
    smooth().prop_map(|s| format!("({s})^2"))
}

/// Exponentially decaying as t grows.
pub fn decaying() -> impl Strategy<Value = String> {
    (-2.0..2.0f64, 0.5..2.0f64, -2.0..2.0f64, 0.5..2.0f64, 0.3..3.0f64).prop_map(|(a, ka, b, kb, w)| {
        format!("({a})*exp(-({ka})*t)+({b})*exp(-({kb})*t)*cos(({w})*t)")
    })
}

pub fn close(got: f64, want: f64, tol: f64) -> bool {
    got.is_finite() && (got - want).abs() <= tol * want.abs().max(1.0)
}
