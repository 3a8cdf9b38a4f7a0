mod common;

use common::{close, f, nonneg, smooth};
use proptest::prelude::*;
use qcalc_core::symcalc::{
    ab_sym_derivative, hahn_sym_derivative, hahn_sym_integral, q_sym_derivative, q_sym_integral,
};
use qcalc_core::{AlphaBetaParams, QOmegaParams, RealFn, SeriesPolicy};

fn params() -> impl Strategy<Value = QOmegaParams> {
    prop_oneof![
        (0.3..0.8f64).prop_map(|q| QOmegaParams::q_only(q).unwrap()),
        (0.3..0.8f64, 0.0..1.0f64).prop_map(|(q, w)| QOmegaParams::new(q, w).unwrap()),
    ]
}

fn offset() -> impl Strategy<Value = f64> {
    prop_oneof![0.1..3.0f64, -3.0..-0.1f64]
}

fn pol() -> SeriesPolicy {
    SeriesPolicy::default()
}

fn d(g: &dyn RealFn, p: &QOmegaParams, t: f64) -> qcalc_core::Result<f64> {
    if p.omega() == 0.0 {
        q_sym_derivative(g, p.q(), t)
    } else {
        hahn_sym_derivative(g, p, t)
    }
}

fn int(g: &dyn RealFn, p: &QOmegaParams, a: f64, b: f64) -> f64 {
    let r = if p.omega() == 0.0 {
        q_sym_integral(g, p.q(), a, b, &pol())
    } else {
        hahn_sym_integral(g, p, a, b, &pol())
    };
    r.unwrap().require().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ftc_both_directions(src in smooth(), p in params(), dc in offset(), dx in offset()) {
        let g = f(&src);
        let (c, x) = (p.omega0() + dc, p.omega0() + dx);
        let prim = |s: f64| Ok(int(&g, &p, c, s));
        prop_assert!(close(d(&prim, &p, x).unwrap(), g.eval_t(x).unwrap(), 1e-8));
        let dg = |s: f64| d(&g, &p, s);
        prop_assert!(close(int(&dg, &p, c, x), g.eval_t(x).unwrap() - g.eval_t(c).unwrap(), 1e-8));
    }

    #[test]
    fn composition_with_sigma(src in smooth(), p in params(), dt in offset()) {
        let g = f(&src);
        let t = p.omega0() + dt;
        let comp = |s: f64| g.call(p.sigma(s));
        let lhs = d(&comp, &p, t).unwrap();
        let rhs = p.q() * d(&g, &p, p.sigma(t)).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn integration_by_parts(fs in smooth(), gs in smooth(), p in params(), da in offset(), db in offset()) {
        let (ff, gg) = (f(&fs), f(&gs));
        let (a, b) = (p.omega0() + da, p.omega0() + db);
        let at = |h: &dyn RealFn, t: f64| h.call(t).unwrap();
        // int f(sigma^-1 t) D~g = fg | - int D~f g^sigma
        let l1 = |t: f64| Ok(ff.call(p.sigma_inv(t))? * d(&gg, &p, t)?);
        let r1 = |t: f64| Ok(d(&ff, &p, t)? * gg.call(p.sigma(t))?);
        let fg = at(&ff, b) * at(&gg, b) - at(&ff, a) * at(&gg, a);
        let (lhs, rhs) = (int(&l1, &p, a, b), fg - int(&r1, &p, a, b));
        prop_assert!(close(lhs, rhs, 1e-8), "first form {lhs} vs {rhs}");
        // int f D~g = f^sigma g | - q int (D~f)^sigma g^sigma
        let l2 = |t: f64| Ok(ff.call(t)? * d(&gg, &p, t)?);
        let r2 = |t: f64| Ok(p.q() * d(&ff, &p, p.sigma(t))? * gg.call(p.sigma(t))?);
        let fsg = at(&ff, p.sigma(b)) * at(&gg, b) - at(&ff, p.sigma(a)) * at(&gg, a);
        let (lhs, rhs) = (int(&l2, &p, a, b), fsg - int(&r2, &p, a, b));
        prop_assert!(close(lhs, rhs, 1e-8), "second form {lhs} vs {rhs}");
    }

    #[test]
    fn product_rule(fs in smooth(), gs in smooth(), p in params(), dt in offset()) {
        let (ff, gg) = (f(&fs), f(&gs));
        let t = p.omega0() + dt;
        let prod = |s: f64| Ok(ff.call(s)? * gg.call(s)?);
        let lhs = d(&prod, &p, t).unwrap();
        let df = d(&ff, &p, t).unwrap();
        let dg = d(&gg, &p, t).unwrap();
        let one = df * gg.eval_t(p.sigma(t)).unwrap() + ff.eval_t(p.sigma_inv(t)).unwrap() * dg;
        let other = df * gg.eval_t(p.sigma_inv(t)).unwrap() + ff.eval_t(p.sigma(t)).unwrap() * dg;
        prop_assert!(close(lhs, one, 1e-10), "{lhs} vs {one}");
        prop_assert!(close(lhs, other, 1e-10), "{lhs} vs {other}");
    }

    #[test]
    fn orbit_gaps(p in params(), t in -5.0..5.0f64, n in 0i64..=40) {
        let lhs = p.sigma_orbit(t, n + 1) - p.sigma_orbit(t, n - 1);
        let rhs = p.q().powi(n as i32) * (p.sigma(t) - p.sigma_inv(t));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + p.omega0()), "{lhs} vs {rhs}");
    }

    #[test]
    fn positivity_from_zero(src in nonneg(), q in 0.3..0.9f64, c in 0.0..5.0f64) {
        let g = f(&src);
        let r = q_sym_integral(&g, q, 0.0, c, &pol()).unwrap();
        prop_assert!(r.value >= -r.est_error);
    }

    #[test]
    fn ab_derivative_exact_on_lines(m in -5.0..5.0f64, c in -5.0..5.0f64, alpha in 0.0..2.0f64, beta in 0.01..2.0f64, t in -5.0..5.0f64) {
        let p = AlphaBetaParams::new(alpha, beta).unwrap();
        let line = f(&format!("({m})*t+({c})"));
        prop_assert!(close(ab_sym_derivative(&line, &p, t).unwrap(), m, 1e-10));
    }
}
