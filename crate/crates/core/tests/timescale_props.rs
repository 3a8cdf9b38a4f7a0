mod common;

use common::{close, f, smooth};
use proptest::prelude::*;
use qcalc_core::timescale::Piece;
use qcalc_core::{RealFn, TimeScale};

/// Between two and five pieces, intervals or isolated points, separated by
/// gaps of at least 0.2.
fn scale() -> impl Strategy<Value = TimeScale> {
    (
        -3.0..0.0f64,
        prop::collection::vec((any::<bool>(), 0.2..1.5f64, 0.3..1.5f64), 2..=5),
    )
        .prop_map(|(start, spec)| {
            let mut x = start;
            let mut pieces = Vec::new();
            for (interval, gap, len) in spec {
                x += gap;
                if interval {
                    pieces.push(Piece::Interval { lo: x, hi: x + len });
                    x += len;
                } else {
                    pieces.push(Piece::Point {
                        x,
                        dense_left: false,
                        dense_right: false,
                    });
                }
            }
            TimeScale::from_pieces(pieces).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn simple_useful_formula(ts in scale(), src in smooth()) {
        let g = f(&src);
        for t in ts.sample_points(ts.min(), ts.max()) {
            let j = ts.jump(t).unwrap();
            if j.mu > 0.0 {
                let delta = ts.delta_derivative(&g, t).unwrap();
                let want = g.eval_t(t).unwrap() + j.mu * delta;
                prop_assert!(close(g.eval_t(j.sigma).unwrap(), want, 1e-9));
            }
        }
    }

    #[test]
    fn gamma_weights_are_convex(ts in scale()) {
        for t in ts.sample_points(ts.min(), ts.max()) {
            let w = ts.gamma_weights(t).unwrap();
            prop_assert!((0.0..=1.0).contains(&w.gamma1) && (0.0..=1.0).contains(&w.gamma2));
            prop_assert!((w.gamma1 + w.gamma2 - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn diamond_is_weighted_delta_and_nabla(ts in scale(), src in smooth()) {
        let g = f(&src);
        for t in ts.sample_points(ts.min(), ts.max()) {
            let (Ok(sym), Ok(delta), Ok(nabla)) = (
                ts.sym_diamond_derivative(&g, t),
                ts.delta_derivative(&g, t),
                ts.nabla_derivative(&g, t),
            ) else {
                continue;
            };
            let w = ts.gamma_weights(t).unwrap();
            let mix = w.gamma1 * delta + w.gamma2 * nabla;
            prop_assert!(close(sym, mix, 1e-8), "at {t}: {sym} vs {mix}");
        }
    }

    #[test]
    fn integral_properties(ts in scale(), fs in smooth(), gs in smooth(), c1 in -2.0..2.0f64, c2 in -2.0..2.0f64, pick in 0.0..1.0f64) {
        let (ff, gg) = (f(&fs), f(&gs));
        let (a, b) = (ts.min(), ts.max());
        let pts = ts.sample_points(a, b);
        let m = pts[((pts.len() - 1) as f64 * pick) as usize];
        let int = |h: &dyn RealFn, lo: f64, hi: f64| ts.diamond_integral(h, lo, hi).unwrap();
        let (fi, gi) = (int(&ff, a, b), int(&gg, a, b));
        let scale = fi.abs() + gi.abs() + 1.0;

        let comb = |t: f64| Ok(c1 * ff.call(t)? + c2 * gg.call(t)?);
        prop_assert!((int(&comb, a, b) - (c1 * fi + c2 * gi)).abs() <= 1e-9 * scale * 4.0);
        prop_assert!((int(&ff, b, a) + fi).abs() <= 1e-9 * scale);
        prop_assert!((int(&ff, a, m) + int(&ff, m, b) - fi).abs() <= 1e-9 * scale);

        let above = |t: f64| Ok(ff.call(t)? + gg.call(t)?.powi(2));
        prop_assert!(fi <= int(&above, a, b) + 1e-9 * scale);
        let abs = |t: f64| Ok(ff.call(t)?.abs());
        prop_assert!(fi.abs() <= int(&abs, a, b) + 1e-9 * scale);
    }

    #[test]
    fn constant_gamma_scales(src in smooth(), h in 0.1..1.0f64, lo in -3.0..0.0f64, n in 3usize..30) {
        let g = f(&src);
        let len = n as f64 * h;
        // the ends of a finite segment carry one-sided weights, so stay inside
        let z = TimeScale::hz(h, lo - h, lo + len + h).unwrap();
        let (a, b) = (z.min() + h, z.max() - h);
        prop_assert!(close(z.diamond_integral(&g, a, b).unwrap(), z.diamond_alpha_integral(&g, a, b, 0.5).unwrap(), 1e-9));
        let r = TimeScale::real(lo, lo + len).unwrap();
        prop_assert!(close(r.diamond_integral(&g, lo, lo + len).unwrap(), r.diamond_alpha_integral(&g, lo, lo + len, 0.5).unwrap(), 1e-9));
    }
}

#[test]
fn chain_rule_fails_on_integers() {
    let z = TimeScale::hz(1.0, -20.0, 20.0).unwrap();
    for t in -3..=3 {
        let t = t as f64;
        let lhs = z.delta_derivative(&f("(3*t)^2"), t).unwrap();
        let rhs = z.delta_derivative(&f("t^2"), 3.0 * t).unwrap() * z.delta_derivative(&f("3*t"), t).unwrap();
        assert_eq!(lhs, 18.0 * t + 9.0);
        assert_eq!(rhs, 18.0 * t + 3.0);
        assert_ne!(lhs, rhs);
    }
}
