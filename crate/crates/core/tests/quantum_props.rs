mod common;

use common::{close, f, nonneg, smooth};
use proptest::prelude::*;
use qcalc_core::quantum::{
    h_forward_derivative, hahn_derivative, hahn_integral, hahn_integral_from_fixed, q_derivative,
};
use qcalc_core::{QOmegaParams, RealFn, Result, SeriesPolicy};

fn params() -> impl Strategy<Value = QOmegaParams> {
    (0.3..0.8f64, 0.0..1.0f64).prop_map(|(q, w)| QOmegaParams::new(q, w).unwrap())
}

/// A point at distance at least 0.1 from the fixed point.
fn offset() -> impl Strategy<Value = f64> {
    prop_oneof![0.1..3.0f64, -3.0..-0.1f64]
}

fn pol() -> SeriesPolicy {
    SeriesPolicy::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ftc_forward(src in smooth(), p in params(), dx in offset()) {
        let g = f(&src);
        let x = p.omega0() + dx;
        let prim = |s: f64| hahn_integral_from_fixed(&g, &p, s, &pol())?.require();
        let d = hahn_derivative(&prim, &p, x).unwrap();
        prop_assert!(close(d, g.eval_t(x).unwrap(), 1e-8));
    }

    #[test]
    fn ftc_reverse(src in smooth(), p in params(), da in offset(), db in offset()) {
        let g = f(&src);
        let (a, b) = (p.omega0() + da, p.omega0() + db);
        let dg = |s: f64| hahn_derivative(&g, &p, s);
        let v = hahn_integral(&dg, &p, a, b, &pol()).unwrap().value;
        prop_assert!(close(v, g.eval_t(b).unwrap() - g.eval_t(a).unwrap(), 1e-8));
    }

    #[test]
    fn integration_by_parts(fs in smooth(), gs in smooth(), p in params(), da in offset(), db in offset()) {
        let (ff, gg) = (f(&fs), f(&gs));
        let (a, b) = (p.omega0() + da, p.omega0() + db);
        let lhs_int = |t: f64| Ok(ff.call(t)? * hahn_derivative(&gg, &p, t)?);
        let rhs_int = |t: f64| Ok(hahn_derivative(&ff, &p, t)? * gg.call(p.sigma(t))?);
        let lhs = hahn_integral(&lhs_int, &p, a, b, &pol()).unwrap().value;
        let fg = |t: f64| ff.eval_t(t).unwrap() * gg.eval_t(t).unwrap();
        let rhs = fg(b) - fg(a) - hahn_integral(&rhs_int, &p, a, b, &pol()).unwrap().value;
        prop_assert!(close(lhs, rhs, 1e-8), "{lhs} vs {rhs}");
    }

    #[test]
    fn composition_with_sigma(src in smooth(), p in params(), dt in offset()) {
        let g = f(&src);
        let t = p.omega0() + dt;
        let comp = |s: f64| g.call(p.sigma(s));
        let lhs = hahn_derivative(&comp, &p, t).unwrap();
        let rhs = p.q() * hahn_derivative(&g, &p, p.sigma(t)).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn product_rule(fs in smooth(), gs in smooth(), p in params(), dt in offset()) {
        let (ff, gg) = (f(&fs), f(&gs));
        let t = p.omega0() + dt;
        let prod = |s: f64| Ok(ff.call(s)? * gg.call(s)?);
        let lhs = hahn_derivative(&prod, &p, t).unwrap();
        let rhs = hahn_derivative(&ff, &p, t).unwrap() * gg.eval_t(t).unwrap()
            + ff.eval_t(p.sigma(t)).unwrap() * hahn_derivative(&gg, &p, t).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn omega_zero_is_the_q_quotient(src in smooth(), q in 0.05..0.99f64, t in prop_oneof![0.01..5.0f64, -5.0..-0.01f64]) {
        let g = f(&src);
        let p = QOmegaParams::q_only(q).unwrap();
        let quotient = (g.eval_t(q * t).unwrap() - g.eval_t(t).unwrap()) / (q * t - t);
        prop_assert_eq!(hahn_derivative(&g, &p, t).unwrap(), quotient);
        prop_assert_eq!(q_derivative(&g, q, t).unwrap(), quotient);
    }

    #[test]
    fn limit_q_to_one(src in smooth(), h in 0.05..1.0f64, t in -3.0..3.0f64) {
        let g = f(&src);
        let p = QOmegaParams::new(1.0 - 1e-8, h).unwrap();
        let d = hahn_derivative(&g, &p, t).unwrap();
        let fwd = h_forward_derivative(&g, h, t).unwrap();
        prop_assert!((d - fwd).abs() <= 1e-6);
    }

    #[test]
    fn positivity(src in nonneg(), p in params(), db in 0.0..4.0f64) {
        let g = f(&src);
        let b = p.omega0() + db;
        let r = hahn_integral_from_fixed(&g, &p, b, &pol()).unwrap();
        prop_assert!(r.value >= -r.est_error);
    }
}

#[test]
fn integral_of_constant_is_length() {
    let p = QOmegaParams::new(0.5, 1.0).unwrap();
    let one = |_: f64| -> Result<f64> { Ok(1.0) };
    let v = hahn_integral(&one, &p, 3.0, 7.0, &pol()).unwrap();
    assert!((v.value - 4.0).abs() < 1e-12);
}
