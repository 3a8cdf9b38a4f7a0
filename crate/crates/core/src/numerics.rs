//! Shared numeric kernel: compensated series summation with a stagnation
//! stopping rule, Richardson-extrapolated difference quotients and bisection.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::RealFn;

/// Truncation policy for the infinite series behind every quantum integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPolicy {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
    /// Consecutive sub-tolerance terms required before stopping.
    pub stagnation_window: usize,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_terms: 100_000,
            stagnation_window: 8,
        }
    }
}

impl SeriesPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol must be positive"));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::invalid("rel_tol must be nonnegative"));
        }
        if self.stagnation_window == 0 || self.max_terms < self.stagnation_window {
            return Err(Error::invalid(
                "need max_terms >= stagnation_window >= 1",
            ));
        }
        Ok(())
    }

    fn threshold(&self, partial: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * partial.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    /// Largest term magnitude in the final stagnation window.
    pub est_error: f64,
    pub converged: bool,
}

impl SeriesResult {
    /// A finite sum, exact up to rounding.
    pub fn exact(value: f64, terms_used: usize) -> Self {
        SeriesResult {
            value,
            terms_used,
            est_error: 0.0,
            converged: true,
        }
    }

    /// Turns a flagged non-convergent result into an error.
    pub fn require(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NonConvergent {
                partial: self.value,
                terms: self.terms_used,
            })
        }
    }

    /// `self - other`, merging the bookkeeping of both series.
    pub fn minus(self, other: SeriesResult) -> SeriesResult {
        self.combine(other, 1.0, -1.0)
    }

    /// `wa * self + wb * other`.
    pub fn combine(self, other: SeriesResult, wa: f64, wb: f64) -> SeriesResult {
        SeriesResult {
            value: wa * self.value + wb * other.value,
            terms_used: self.terms_used + other.terms_used,
            est_error: wa.abs() * self.est_error + wb.abs() * other.est_error,
            converged: self.converged && other.converged,
        }
    }

    pub fn scaled(self, w: f64) -> SeriesResult {
        SeriesResult {
            value: w * self.value,
            est_error: w.abs() * self.est_error,
            ..self
        }
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums `term(0) + term(1) + ...` until `stagnation_window` consecutive terms
/// fall below `max(abs_tol, rel_tol * |partial|)`.
///
/// Reaching `max_terms` is not an error: the partial sum comes back with
/// `converged == false`.
pub fn sum_series(
    mut term: impl FnMut(usize) -> Result<f64>,
    policy: &SeriesPolicy,
) -> Result<SeriesResult> {
    policy.validate()?;
    let window = policy.stagnation_window;
    let mut acc = CompensatedSum::new();
    let mut quiet = 0usize;
    let mut recent = vec![0.0f64; window];
    for n in 0..policy.max_terms {
        let x = term(n)?;
        if !x.is_finite() {
            return Err(Error::invalid(format!("series term {n} is not finite")));
        }
        acc.add(x);
        recent[n % window] = x.abs();
        if x.abs() <= policy.threshold(acc.value()) {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= window {
            return Ok(SeriesResult {
                value: acc.value(),
                terms_used: n + 1,
                est_error: recent.iter().cloned().fold(0.0, f64::max),
                converged: true,
            });
        }
    }
    Ok(SeriesResult {
        value: acc.value(),
        terms_used: policy.max_terms,
        est_error: recent.iter().cloned().fold(0.0, f64::max),
        converged: false,
    })
}

fn central_quotient<F: RealFn + ?Sized>(f: &F, t: f64, h: f64) -> Result<f64> {
    let (tp, tm) = (t + h, t - h);
    Ok((f.call(tp)? - f.call(tm)?) / (tp - tm))
}

/// Symmetric difference quotient with one Richardson step (h, h/2),
/// `h = max(1e-6, 1e-6 |t|)`.
pub fn central_derivative<F: RealFn + ?Sized>(f: &F, t: f64) -> Result<f64> {
    central_derivative_step(f, t, 1e-6_f64.max(1e-6 * t.abs()))
}

/// [`central_derivative`] with an explicit initial step.
pub fn central_derivative_step<F: RealFn + ?Sized>(f: &F, t: f64, h: f64) -> Result<f64> {
    let d1 = central_quotient(f, t, h)?;
    let d2 = central_quotient(f, t, 0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// One-sided difference with one Richardson step. `h > 0` looks right,
/// `h < 0` looks left.
pub fn one_sided_derivative<F: RealFn + ?Sized>(f: &F, t: f64, h: f64) -> Result<f64> {
    let f0 = f.call(t)?;
    let q = |step: f64| -> Result<f64> {
        let s = t + step;
        Ok((f.call(s)? - f0) / (s - t))
    };
    let d1 = q(h)?;
    let d2 = q(0.5 * h)?;
    Ok(2.0 * d2 - d1)
}

/// Bisection on a sign change of `g`. Returns `c` with `|g(c)| <= tol` or a
/// bracket narrower than `tol`; `tol = 0` runs to machine resolution.
pub fn bisect_root<F: RealFn + ?Sized>(g: &F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut glo = g.call(lo)?;
    let ghi = g.call(hi)?;
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let gm = g.call(mid)?;
        if gm.abs() <= tol || hi - lo <= tol || gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
}
