//! Time scales built from finitely many closed intervals and isolated points,
//! with jump operators, delta/nabla/diamond derivatives and integrals, the
//! symmetric diamond derivative and the gamma-weighted diamond integral.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse_real, RealFn, DEFAULT_MATCH_EPS};
use crate::numerics::{central_derivative_step, one_sided_derivative, CompensatedSum};
use crate::symcalc::{inequality_sides, InequalityKind, InequalityReport, IntegralMvtReport};

/// Largest number of isolated points a constructor may create.
pub const MAX_POINTS: usize = 1_000_000;

const SIMPSON_TOL: f64 = 1e-10;
const SIMPSON_DEPTH: u32 = 40;
const SIMPSON_MAX_EVALS: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    Interval { lo: f64, hi: f64 },
    /// A single point. The dense flags mark accumulation points of a
    /// lattice, such as 0 in a q-lattice.
    Point { x: f64, dense_left: bool, dense_right: bool },
}

impl Piece {
    fn lo(&self) -> f64 {
        match *self {
            Piece::Interval { lo, .. } => lo,
            Piece::Point { x, .. } => x,
        }
    }

    fn hi(&self) -> f64 {
        match *self {
            Piece::Interval { hi, .. } => hi,
            Piece::Point { x, .. } => x,
        }
    }

    fn point(x: f64) -> Piece {
        Piece::Point {
            x,
            dense_left: false,
            dense_right: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    Dense,
    LeftScatteredRightDense,
    RightScatteredLeftDense,
    Isolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpInfo {
    /// The query point snapped onto the scale.
    pub t: f64,
    pub sigma: f64,
    pub rho: f64,
    pub mu: f64,
    pub nu: f64,
    pub classification: PointClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaWeights {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Set where the weights come from the formula alone: at the ends of the
    /// scale and at points dense on one side only.
    pub extended: bool,
}

/// A closed subset of the reals made of sorted, disjoint pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    pieces: Vec<Piece>,
}

fn eps_at(t: f64) -> f64 {
    DEFAULT_MATCH_EPS * t.abs().max(1.0)
}

fn finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("time scale parameters must be finite"))
    }
}

impl TimeScale {
    /// Builds a scale from arbitrary pieces: overlapping intervals merge and
    /// points covered by an interval are dropped.
    pub fn from_pieces(mut pieces: Vec<Piece>) -> Result<TimeScale> {
        if pieces.is_empty() {
            return Err(Error::invalid("a time scale must be nonempty"));
        }
        for p in &pieces {
            finite(&[p.lo(), p.hi()])?;
            if p.lo() > p.hi() {
                return Err(Error::invalid(format!(
                    "interval [{}, {}] is empty",
                    p.lo(),
                    p.hi()
                )));
            }
        }
        pieces.sort_by(|x, y| x.lo().total_cmp(&y.lo()).then(x.hi().total_cmp(&y.hi())));
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            let p = match p {
                Piece::Interval { lo, hi } if lo == hi => Piece::point(lo),
                other => other,
            };
            let Some(last) = out.last_mut() else {
                out.push(p);
                continue;
            };
            if p.lo() > last.hi() + eps_at(last.hi()) {
                out.push(p);
                continue;
            }
            *last = match (*last, p) {
                (Piece::Interval { lo, hi }, q) => Piece::Interval {
                    lo,
                    hi: hi.max(q.hi()),
                },
                (
                    Piece::Point { x, dense_left, dense_right },
                    Piece::Point {
                        dense_left: l2,
                        dense_right: r2,
                        ..
                    },
                ) => Piece::Point {
                    x,
                    dense_left: dense_left || l2,
                    dense_right: dense_right || r2,
                },
                (Piece::Point { x, .. }, Piece::Interval { hi, .. }) => Piece::Interval { lo: x, hi },
            };
        }
        Ok(TimeScale { pieces: out })
    }

    /// The real segment `[lo, hi]`.
    pub fn real(lo: f64, hi: f64) -> Result<TimeScale> {
        finite(&[lo, hi])?;
        if !(lo < hi) {
            return Err(Error::invalid("a real segment needs lo < hi"));
        }
        TimeScale::from_pieces(vec![Piece::Interval { lo, hi }])
    }

    /// The multiples of `h` in `[lo, hi]`.
    pub fn hz(h: f64, lo: f64, hi: f64) -> Result<TimeScale> {
        finite(&[h, lo, hi])?;
        if !(h > 0.0) || lo > hi {
            return Err(Error::invalid("hz needs h > 0 and lo <= hi"));
        }
        let first = (lo / h - 1e-9).ceil() as i64;
        let last = (hi / h + 1e-9).floor() as i64;
        if last < first {
            return Err(Error::invalid("hz range contains no multiple of h"));
        }
        if (last - first) as usize >= MAX_POINTS {
            return Err(Error::invalid("hz range has too many points"));
        }
        TimeScale::points(&(first..=last).map(|k| k as f64 * h).collect::<Vec<_>>())
    }

    /// `{q^n c : n in Z} cut to [lo, hi]`, plus the accumulation point 0 when
    /// it lies in range. Points closer to 0 than `1e-14 max(|lo|, |hi|)` are
    /// dropped.
    pub fn qlattice(q: f64, c: f64, lo: f64, hi: f64) -> Result<TimeScale> {
        finite(&[q, c, lo, hi])?;
        if !(q > 0.0 && q < 1.0) || c == 0.0 || lo > hi {
            return Err(Error::invalid("qlattice needs 0 < q < 1, c != 0 and lo <= hi"));
        }
        let floor = 1e-14 * lo.abs().max(hi.abs());
        let mut pieces = Vec::new();
        let mut x = c;
        // walk outward from c, then inward
        while x.abs() <= lo.abs().max(hi.abs()) * (1.0 + 1e-12) {
            if lo <= x && x <= hi {
                pieces.push(Piece::point(x));
            }
            x /= q;
            if pieces.len() > MAX_POINTS {
                return Err(Error::invalid("qlattice range has too many points"));
            }
        }
        let mut x = c * q;
        while x.abs() >= floor && x != 0.0 {
            if lo <= x && x <= hi {
                pieces.push(Piece::point(x));
            }
            x *= q;
            if pieces.len() > MAX_POINTS {
                return Err(Error::invalid("qlattice range has too many points"));
            }
        }
        if lo <= 0.0 && 0.0 <= hi {
            pieces.push(Piece::Point {
                x: 0.0,
                dense_left: c < 0.0,
                dense_right: c > 0.0,
            });
        }
        if pieces.is_empty() {
            return Err(Error::invalid("qlattice range contains no lattice point"));
        }
        TimeScale::from_pieces(pieces)
    }

    /// A finite set of isolated points.
    pub fn points(xs: &[f64]) -> Result<TimeScale> {
        TimeScale::from_pieces(xs.iter().map(|&x| Piece::point(x)).collect())
    }

    pub fn union(scales: &[TimeScale]) -> Result<TimeScale> {
        TimeScale::from_pieces(scales.iter().flat_map(|s| s.pieces.iter().copied()).collect())
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn min(&self) -> f64 {
        self.pieces[0].lo()
    }

    pub fn max(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].hi()
    }

    /// Index of the piece containing `t` and `t` snapped onto it.
    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        if !t.is_finite() {
            return Err(Error::NotInScale(t));
        }
        let e = eps_at(t);
        let i = self.pieces.partition_point(|p| p.hi() < t - e);
        for j in [i, i + 1] {
            let Some(p) = self.pieces.get(j) else { continue };
            if p.lo() - e <= t && t <= p.hi() + e {
                return Ok((j, t.clamp(p.lo(), p.hi())));
            }
        }
        Err(Error::NotInScale(t))
    }

    pub fn contains(&self, t: f64) -> bool {
        self.locate(t).is_ok()
    }

    /// Distances into the dense region on each side of `t` (0 when that side
    /// is scattered).
    fn dense_room(&self, i: usize, t: f64) -> (f64, f64) {
        match self.pieces[i] {
            Piece::Interval { lo, hi } => (t - lo, hi - t),
            Piece::Point {
                dense_left,
                dense_right,
                ..
            } => {
                let left = if dense_left { f64::INFINITY } else { 0.0 };
                let right = if dense_right { f64::INFINITY } else { 0.0 };
                (left, right)
            }
        }
    }

    pub fn jump(&self, t: f64) -> Result<JumpInfo> {
        let (i, t) = self.locate(t)?;
        let (left, right) = self.dense_room(i, t);
        let sigma = if right > 0.0 {
            t
        } else {
            self.pieces.get(i + 1).map_or(t, |p| p.lo())
        };
        let rho = if left > 0.0 {
            t
        } else if i > 0 {
            self.pieces[i - 1].hi()
        } else {
            t
        };
        let (mu, nu) = (sigma - t, t - rho);
        let classification = match (mu > 0.0, nu > 0.0) {
            (false, false) => PointClass::Dense,
            (false, true) => PointClass::LeftScatteredRightDense,
            (true, false) => PointClass::RightScatteredLeftDense,
            (true, true) => PointClass::Isolated,
        };
        Ok(JumpInfo {
            t,
            sigma,
            rho,
            mu,
            nu,
            classification,
        })
    }

    pub fn sigma(&self, t: f64) -> Result<f64> {
        Ok(self.jump(t)?.sigma)
    }

    pub fn rho(&self, t: f64) -> Result<f64> {
        Ok(self.jump(t)?.rho)
    }

    /// Membership in `T^kappa`: everything except a left-scattered maximum.
    pub fn in_upper_kappa(&self, t: f64) -> Result<bool> {
        let j = self.jump(t)?;
        Ok(!(j.t == self.max() && j.nu > 0.0))
    }

    /// Membership in `T_kappa`: everything except a right-scattered minimum.
    pub fn in_lower_kappa(&self, t: f64) -> Result<bool> {
        let j = self.jump(t)?;
        Ok(!(j.t == self.min() && j.mu > 0.0))
    }

    /// Classical slope through the dense side(s) of `t`; central when both
    /// sides are dense, otherwise one-sided toward `prefer_right` if possible.
    fn dense_slope<F: RealFn + ?Sized>(
        &self,
        f: &F,
        i: usize,
        t: f64,
        prefer_right: bool,
    ) -> Result<f64> {
        let (left, right) = self.dense_room(i, t);
        let scale = t.abs().max(1.0);
        if left > 0.0 && right > 0.0 {
            let h = (1e-6 * scale).min(0.5 * left).min(0.5 * right);
            return central_derivative_step(f, t, h);
        }
        let step = |room: f64| (1e-5 * scale).min(0.5 * room);
        match (left > 0.0, right > 0.0) {
            (_, true) if prefer_right || left == 0.0 => one_sided_derivative(f, t, step(right)),
            (true, _) => one_sided_derivative(f, t, -step(left)),
            (false, true) => one_sided_derivative(f, t, step(right)),
            (false, false) => Err(Error::BoundaryExcluded(t)),
        }
    }

    pub fn delta_derivative<F: RealFn + ?Sized>(&self, f: &F, t: f64) -> Result<f64> {
        let (i, t) = self.locate(t)?;
        if !self.in_upper_kappa(t)? {
            return Err(Error::BoundaryExcluded(t));
        }
        let j = self.jump(t)?;
        if j.mu > 0.0 {
            return Ok((f.call(j.sigma)? - f.call(t)?) / j.mu);
        }
        self.dense_slope(f, i, t, true)
    }

    pub fn nabla_derivative<F: RealFn + ?Sized>(&self, f: &F, t: f64) -> Result<f64> {
        let (i, t) = self.locate(t)?;
        if !self.in_lower_kappa(t)? {
            return Err(Error::BoundaryExcluded(t));
        }
        let j = self.jump(t)?;
        if j.nu > 0.0 {
            return Ok((f.call(t)? - f.call(j.rho)?) / j.nu);
        }
        self.dense_slope(f, i, t, false)
    }

    /// `gamma1 = mu/(mu+nu)`, `gamma2 = nu/(mu+nu)`; `(1/2, 1/2)` at dense
    /// points.
    pub fn gamma_weights(&self, t: f64) -> Result<GammaWeights> {
        let j = self.jump(t)?;
        let boundary = j.t == self.min() || j.t == self.max();
        if j.mu == 0.0 && j.nu == 0.0 {
            return Ok(GammaWeights {
                gamma1: 0.5,
                gamma2: 0.5,
                extended: boundary,
            });
        }
        let span = j.sigma - j.rho;
        Ok(GammaWeights {
            gamma1: j.mu / span,
            gamma2: j.nu / span,
            extended: boundary || j.mu == 0.0 || j.nu == 0.0,
        })
    }

    /// The symmetric diamond derivative: `(f(sigma) - f(rho))/(sigma - rho)`
    /// away from dense points, the classical derivative at them.
    pub fn sym_diamond_derivative<F: RealFn + ?Sized>(&self, f: &F, t: f64) -> Result<f64> {
        let (i, t) = self.locate(t)?;
        if !self.in_upper_kappa(t)? || !self.in_lower_kappa(t)? {
            return Err(Error::BoundaryExcluded(t));
        }
        let j = self.jump(t)?;
        if j.mu > 0.0 || j.nu > 0.0 {
            return Ok((f.call(j.sigma)? - f.call(j.rho)?) / (j.sigma - j.rho));
        }
        self.dense_slope(f, i, t, true)
    }

    /// `alpha f^Delta + (1 - alpha) f^nabla`; a part with zero weight is not
    /// evaluated.
    pub fn diamond_alpha_derivative<F: RealFn + ?Sized>(
        &self,
        f: &F,
        t: f64,
        alpha: f64,
    ) -> Result<f64> {
        check_alpha(alpha)?;
        let mut v = 0.0;
        if alpha > 0.0 {
            v += alpha * self.delta_derivative(f, t)?;
        }
        if alpha < 1.0 {
            v += (1.0 - alpha) * self.nabla_derivative(f, t)?;
        }
        Ok(v)
    }

    /// Endpoints snapped onto the scale and ordered, with the orientation sign.
    fn oriented(&self, a: f64, b: f64) -> Result<(f64, f64, f64)> {
        let (_, a) = self.locate(a)?;
        let (_, b) = self.locate(b)?;
        Ok(if a <= b { (a, b, 1.0) } else { (b, a, -1.0) })
    }

    /// Lebesgue part over the intervals inside `[a, b]`.
    fn riemann_part<F: RealFn + ?Sized>(&self, f: &F, a: f64, b: f64) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for p in &self.pieces {
            if let Piece::Interval { lo, hi } = *p {
                let (l, h) = (lo.max(a), hi.min(b));
                if l < h {
                    acc.add(adaptive_simpson(f, l, h, SIMPSON_TOL)?);
                }
            }
        }
        Ok(acc.value())
    }

    /// Scattered points in `[lo, hi]` with their jump data.
    fn scattered_in(&self, lo: f64, hi: f64) -> Result<Vec<JumpInfo>> {
        let mut out = Vec::new();
        let start = self.pieces.partition_point(|p| p.hi() < lo);
        for p in &self.pieces[start..] {
            if p.lo() > hi {
                break;
            }
            for x in [p.lo(), p.hi()] {
                if lo <= x && x <= hi && out.last().map_or(true, |j: &JumpInfo| j.t != x) {
                    let j = self.jump(x)?;
                    if j.mu > 0.0 || j.nu > 0.0 {
                        out.push(j);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `int_a^b w(t) f(t) Delta t` restricted to scattered points, and the
    /// nabla analogue, for weights derived from the jump data.
    fn scattered_sums<F: RealFn + ?Sized>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        delta_w: &dyn Fn(&JumpInfo) -> Result<f64>,
        nabla_w: &dyn Fn(&JumpInfo) -> Result<f64>,
    ) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for j in self.scattered_in(a, b)? {
            if j.mu > 0.0 && j.t < b {
                let w = delta_w(&j)?;
                if w != 0.0 {
                    acc.add(w * j.mu * f.call(j.t)?);
                }
            }
            if j.nu > 0.0 && j.t > a {
                let w = nabla_w(&j)?;
                if w != 0.0 {
                    acc.add(w * j.nu * f.call(j.t)?);
                }
            }
        }
        Ok(acc.value())
    }

    /// `alpha int f Delta t + (1 - alpha) int f nabla t`.
    pub fn diamond_alpha_integral<F: RealFn + ?Sized>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        alpha: f64,
    ) -> Result<f64> {
        check_alpha(alpha)?;
        let (a, b, sign) = self.oriented(a, b)?;
        if a == b {
            return Ok(0.0);
        }
        let dense = self.riemann_part(f, a, b)?;
        let sc = self.scattered_sums(f, a, b, &|_| Ok(alpha), &|_| Ok(1.0 - alpha))?;
        Ok(sign * (dense + sc))
    }

    pub fn delta_integral<F: RealFn + ?Sized>(&self, f: &F, a: f64, b: f64) -> Result<f64> {
        self.diamond_alpha_integral(f, a, b, 1.0)
    }

    pub fn nabla_integral<F: RealFn + ?Sized>(&self, f: &F, a: f64, b: f64) -> Result<f64> {
        self.diamond_alpha_integral(f, a, b, 0.0)
    }

    /// `int gamma1 f Delta t + int gamma2 f nabla t`.
    pub fn diamond_integral<F: RealFn + ?Sized>(&self, f: &F, a: f64, b: f64) -> Result<f64> {
        let (a, b, sign) = self.oriented(a, b)?;
        if a == b {
            return Ok(0.0);
        }
        let dense = self.riemann_part(f, a, b)?;
        let sc = self.scattered_sums(
            f,
            a,
            b,
            &|j| Ok(self.gamma_weights(j.t)?.gamma1),
            &|j| Ok(self.gamma_weights(j.t)?.gamma2),
        )?;
        Ok(sign * (dense + sc))
    }

    /// Points of the scale in `[a, b]` used to estimate extremes: every
    /// scattered point, interval ends and 256 grid points per interval.
    pub fn sample_points(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for p in &self.pieces {
            match *p {
                Piece::Point { x, .. } => {
                    if a <= x && x <= b {
                        out.push(x);
                    }
                }
                Piece::Interval { lo, hi } => {
                    let (l, h) = (lo.max(a), hi.min(b));
                    if l <= h {
                        out.extend((0..=256).map(|k| l + (h - l) * k as f64 / 256.0));
                    }
                }
            }
        }
        out
    }

    /// Holder, Cauchy-Schwarz or Minkowski for the diamond integral.
    pub fn diamond_inequality_check<F: RealFn + ?Sized, G: RealFn + ?Sized>(
        &self,
        kind: InequalityKind,
        f: &F,
        g: &G,
        a: f64,
        b: f64,
        p_hat: f64,
    ) -> Result<InequalityReport> {
        let f: &dyn RealFn = &|t: f64| f.call(t);
        let g: &dyn RealFn = &|t: f64| g.call(t);
        let integrate = |h: &dyn RealFn| self.diamond_integral(h, a, b);
        inequality_sides(kind, f, g, p_hat, &integrate)
    }

    /// Mean value theorem for the diamond integral with `g >= 0`.
    pub fn diamond_mvt_check<F: RealFn + ?Sized, G: RealFn + ?Sized>(
        &self,
        f: &F,
        g: &G,
        a: f64,
        b: f64,
    ) -> Result<IntegralMvtReport> {
        let (lo, hi, _) = self.oriented(a, b)?;
        let (mut inf_f, mut sup_f) = (f64::INFINITY, f64::NEG_INFINITY);
        for t in self.sample_points(lo, hi) {
            if g.call(t)? < 0.0 {
                return Err(Error::invalid(format!("g is negative at {t}")));
            }
            let v = f.call(t)?;
            inf_f = inf_f.min(v);
            sup_f = sup_f.max(v);
        }
        let fg = |t: f64| -> Result<f64> { Ok(f.call(t)? * g.call(t)?) };
        let int_fg = self.diamond_integral(&fg, lo, hi)?;
        let int_g = self.diamond_integral(g, lo, hi)?;
        Ok(IntegralMvtReport::new(int_fg, int_g, inf_f, sup_f))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::invalid(format!("alpha = {alpha} must lie in [0, 1]")))
    }
}

struct Simpson<'a, F: ?Sized> {
    f: &'a F,
    evals: usize,
}

impl<F: RealFn + ?Sized> Simpson<'_, F> {
    fn eval(&mut self, t: f64) -> Result<f64> {
        self.evals += 1;
        if self.evals > SIMPSON_MAX_EVALS {
            return Err(Error::QuadratureFailure("evaluation budget exhausted".into()));
        }
        let v = self.f.call(t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::QuadratureFailure(format!("integrand is not finite at {t}")))
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (self.eval(lm)?, self.eval(rm)?);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if diff.abs() <= 15.0 * tol || diff.abs() <= 1e-15 * (left + right).abs() {
            return Ok(left + right + diff / 15.0);
        }
        if depth == 0 {
            return Err(Error::QuadratureFailure(format!(
                "no convergence on [{a}, {b}] at maximum depth"
            )));
        }
        Ok(self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson<F: RealFn + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut s = Simpson { f, evals: 0 };
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (s.eval(a)?, s.eval(m)?, s.eval(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    s.refine(a, b, fa, fm, fb, whole, tol, SIMPSON_DEPTH)
}

impl fmt::Display for TimeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| match *p {
                Piece::Interval { lo, hi } => format!("interval({lo}, {hi})"),
                Piece::Point { x, .. } => format!("points({x})"),
            })
            .collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "union({})", parts.join(", "))
        }
    }
}

/// A parsed scale description `name(arg, key=value, ...)`.
#[derive(Debug)]
enum SpecArg {
    Num(Option<String>, f64),
    Scale(TimeScale),
}

struct SpecParser<'a> {
    src: &'a str,
    pos: usize,
}

impl SpecParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::invalid(format!("time scale spec at byte {}: {msg}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<&str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 || !rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn call(&mut self) -> Result<TimeScale> {
        let Some(name) = self.ident().map(str::to_ascii_lowercase) else {
            return Err(self.err("expected a scale name"));
        };
        if !self.eat('(') {
            return Err(self.err("expected '('"));
        }
        let mut args = Vec::new();
        if !self.eat(')') {
            loop {
                args.push(self.arg()?);
                if self.eat(')') {
                    break;
                }
                if !self.eat(',') {
                    return Err(self.err("expected ',' or ')'"));
                }
            }
        }
        build_scale(&name, args)
    }

    fn arg(&mut self) -> Result<SpecArg> {
        self.skip_ws();
        let save = self.pos;
        if let Some(id) = self.ident().map(str::to_string) {
            if self.eat('=') {
                return Ok(SpecArg::Num(Some(id), self.number()?));
            }
            self.pos = save;
            return Ok(SpecArg::Scale(self.call()?));
        }
        Ok(SpecArg::Num(None, self.number()?))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find([',', ')']).unwrap_or(rest.len());
        let v = parse_real(&rest[..len]).map_err(|_| self.err("expected a number"))?;
        self.pos += len;
        Ok(v)
    }
}

fn build_scale(name: &str, args: Vec<SpecArg>) -> Result<TimeScale> {
    if name == "union" {
        let mut scales = Vec::new();
        for a in args {
            match a {
                SpecArg::Scale(s) => scales.push(s),
                SpecArg::Num(..) => return Err(Error::invalid("union takes time scales")),
            }
        }
        return TimeScale::union(&scales);
    }
    let mut nums = Vec::new();
    for a in args {
        match a {
            SpecArg::Num(key, v) => nums.push((key, v)),
            SpecArg::Scale(_) => {
                return Err(Error::invalid(format!("{name} takes numbers, not scales")))
            }
        }
    }
    let named = |keys: &[&str]| -> Result<Vec<f64>> {
        if nums.len() != keys.len() {
            return Err(Error::invalid(format!(
                "{name} takes {} arguments ({})",
                keys.len(),
                keys.join(", ")
            )));
        }
        let mut out = vec![f64::NAN; keys.len()];
        for (i, (key, v)) in nums.iter().enumerate() {
            let slot = match key {
                None => i,
                Some(k) => keys
                    .iter()
                    .position(|x| x == k)
                    .ok_or_else(|| Error::invalid(format!("{name} has no argument '{k}'")))?,
            };
            out[slot] = *v;
        }
        if out.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid(format!("{name}: missing argument")));
        }
        Ok(out)
    };
    match name {
        "interval" | "r" => {
            let v = named(&["lo", "hi"])?;
            TimeScale::real(v[0], v[1])
        }
        "hz" => {
            let v = named(&["h", "lo", "hi"])?;
            TimeScale::hz(v[0], v[1], v[2])
        }
        "qlattice" => {
            let v = named(&["q", "c", "lo", "hi"])?;
            TimeScale::qlattice(v[0], v[1], v[2], v[3])
        }
        "points" | "point" => {
            if nums.is_empty() || nums.iter().any(|(k, _)| k.is_some()) {
                return Err(Error::invalid("points takes one or more unnamed numbers"));
            }
            TimeScale::points(&nums.iter().map(|(_, v)| *v).collect::<Vec<_>>())
        }
        _ => Err(Error::invalid(format!("unknown time scale '{name}'"))),
    }
}

impl FromStr for TimeScale {
    type Err = Error;

    /// Parses `interval(lo, hi)`, `r(lo, hi)`, `hz(h, lo, hi)`,
    /// `qlattice(q, c, lo, hi)`, `points(x, ...)` and `union(...)`; numeric
    /// arguments may be given as `key=value`.
    fn from_str(s: &str) -> Result<TimeScale> {
        let mut p = SpecParser { src: s, pos: 0 };
        let scale = p.call()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(scale)
    }
}
