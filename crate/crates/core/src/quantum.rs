//! Forward quantum calculus: h-differences, Jackson q-differences and the
//! Hahn operator `D_{q,w}`, with their series integrals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{RealFn, DEFAULT_MATCH_EPS};
use crate::numerics::{central_derivative, sum_series, SeriesPolicy, SeriesResult};

/// Largest order accepted by [`hahn_derivative_higher`].
pub const MAX_HAHN_ORDER: usize = 6;

/// The pair `(q, w)` with `sigma(t) = q t + w` and fixed point `w0 = w/(1-q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QOmegaParams {
    q: f64,
    omega: f64,
    omega0: f64,
}

impl QOmegaParams {
    pub fn new(q: f64, omega: f64) -> Result<QOmegaParams> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid(format!("q = {q} must lie in (0, 1)")));
        }
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::invalid(format!("omega = {omega} must be finite and >= 0")));
        }
        Ok(QOmegaParams {
            q,
            omega,
            omega0: omega / (1.0 - q),
        })
    }

    /// Pure q-calculus, `w = 0`.
    pub fn q_only(q: f64) -> Result<QOmegaParams> {
        QOmegaParams::new(q, 0.0)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `[n]_q = (1 - q^n)/(1 - q)`, also for negative `n`.
    pub fn q_number(&self, n: i64) -> f64 {
        (1.0 - qpow(self.q, n)) / (1.0 - self.q)
    }

    pub fn sigma(&self, t: f64) -> f64 {
        self.q * t + self.omega
    }

    pub fn sigma_inv(&self, t: f64) -> f64 {
        (t - self.omega) / self.q
    }

    /// `sigma^n(s)` in closed form.
    pub fn sigma_orbit(&self, s: f64, n: i64) -> f64 {
        match n {
            0 => s,
            1 => self.sigma(s),
            -1 => self.sigma_inv(s),
            _ => {
                if self.omega == 0.0 {
                    qpow(self.q, n) * s
                } else {
                    qpow(self.q, n) * (s - self.omega0) + self.omega0
                }
            }
        }
    }

    /// True when `t` is within the override tolerance of `w0`.
    pub fn at_fixed_point(&self, t: f64) -> bool {
        (t - self.omega0).abs() <= DEFAULT_MATCH_EPS * self.omega0.abs().max(1.0)
    }
}

fn qpow(q: f64, n: i64) -> f64 {
    if n.unsigned_abs() <= i32::MAX as u64 {
        q.powi(n as i32)
    } else {
        q.powf(n as f64)
    }
}

/// One point of the orbit `{sigma^n(s)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub generator: f64,
    pub index: i64,
    pub value: f64,
}

impl OrbitPoint {
    pub fn new(p: &QOmegaParams, s: f64, n: i64) -> OrbitPoint {
        OrbitPoint {
            generator: s,
            index: n,
            value: p.sigma_orbit(s, n),
        }
    }

    pub fn next(&self, p: &QOmegaParams) -> OrbitPoint {
        OrbitPoint::new(p, self.generator, self.index + 1)
    }
}

/// `sigma^n(s)`; see [`QOmegaParams::sigma_orbit`].
pub fn sigma_orbit(p: &QOmegaParams, s: f64, n: i64) -> f64 {
    p.sigma_orbit(s, n)
}

/// `D_{q,w}[f](t) = (f(sigma(t)) - f(t)) / (sigma(t) - t)`; the classical
/// derivative at `w0`.
pub fn hahn_derivative<F: RealFn + ?Sized>(f: &F, p: &QOmegaParams, t: f64) -> Result<f64> {
    if p.at_fixed_point(t) {
        return central_derivative(f, p.omega0);
    }
    let s = p.sigma(t);
    Ok((f.call(s)? - f.call(t)?) / (s - t))
}

/// `D^r_{q,w}[f](t)` by recursion on the order, `1 <= r <= 6`.
pub fn hahn_derivative_higher<F: RealFn + ?Sized>(
    f: &F,
    p: &QOmegaParams,
    t: f64,
    r: usize,
) -> Result<f64> {
    if r == 0 {
        return Err(Error::invalid("derivative order must be at least 1"));
    }
    if r > MAX_HAHN_ORDER {
        return Err(Error::OrderTooHigh {
            order: r,
            max: MAX_HAHN_ORDER,
        });
    }
    let f: &dyn RealFn = &|x: f64| f.call(x);
    nested_hahn(f, p, t, r)
}

pub(crate) fn nested_hahn(f: &dyn RealFn, p: &QOmegaParams, t: f64, r: usize) -> Result<f64> {
    if r == 0 {
        return f.call(t);
    }
    let inner = |x: f64| nested_hahn(f, p, x, r - 1);
    hahn_derivative(&inner, p, t)
}

/// The Jackson q-derivative `(f(qt) - f(t)) / (qt - t)`, classical at 0.
pub fn q_derivative<F: RealFn + ?Sized>(f: &F, q: f64, t: f64) -> Result<f64> {
    hahn_derivative(f, &QOmegaParams::q_only(q)?, t)
}

/// `int_{w0}^x f d_{q,w}t = (x - sigma(x)) * sum_k q^k f(sigma^k(x))`.
pub fn hahn_integral_from_fixed<F: RealFn + ?Sized>(
    f: &F,
    p: &QOmegaParams,
    x: f64,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    if x == p.omega0 {
        return Ok(SeriesResult::exact(0.0, 0));
    }
    let weight = x - p.sigma(x);
    let series = sum_series(
        |k| {
            let k = k as i64;
            Ok(qpow(p.q, k) * f.call(p.sigma_orbit(x, k))?)
        },
        policy,
    )?;
    Ok(series.scaled(weight))
}

/// The q,w-integral `int_a^b f d_{q,w}t`. With `w = 0` this is the Jackson
/// integral.
pub fn hahn_integral<F: RealFn + ?Sized>(
    f: &F,
    p: &QOmegaParams,
    a: f64,
    b: f64,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    if a == b {
        return Ok(SeriesResult::exact(0.0, 0));
    }
    let fb = hahn_integral_from_fixed(f, p, b, policy)?;
    let fa = hahn_integral_from_fixed(f, p, a, policy)?;
    Ok(fb.minus(fa))
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("step h = {h} must be positive")))
    }
}

/// `Delta_h[f](t) = (f(t+h) - f(t))/h`.
pub fn h_forward_derivative<F: RealFn + ?Sized>(f: &F, h: f64, t: f64) -> Result<f64> {
    check_step(h)?;
    Ok((f.call(t + h)? - f.call(t)?) / h)
}

/// `nabla_h[f](t) = (f(t) - f(t-h))/h`.
pub fn h_backward_derivative<F: RealFn + ?Sized>(f: &F, h: f64, t: f64) -> Result<f64> {
    check_step(h)?;
    Ok((f.call(t)? - f.call(t - h)?) / h)
}

/// Number of steps `h` from `a` to `b`, when that is an integer.
pub(crate) fn lattice_steps(a: f64, b: f64, h: f64) -> Result<i64> {
    let ratio = (b - a) / h;
    let n = ratio.round();
    if !ratio.is_finite() || (ratio - n).abs() > 1e-9 * ratio.abs().max(1.0) {
        return Err(Error::NotOnLattice { ratio });
    }
    Ok(n as i64)
}

/// `int_a^b f d_h t = h (f(a) + f(a+h) + ... + f(b-h))`, negated for `a > b`.
pub fn h_integral<F: RealFn + ?Sized>(f: &F, h: f64, a: f64, b: f64) -> Result<f64> {
    check_step(h)?;
    let n = lattice_steps(a, b, h)?;
    if n < 0 {
        return Ok(-h_integral(f, h, b, a)?);
    }
    let mut acc = crate::numerics::CompensatedSum::new();
    for k in 0..n {
        acc.add(f.call(a + k as f64 * h)?);
    }
    Ok(h * acc.value())
}
