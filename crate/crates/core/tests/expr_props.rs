mod common;

use common::{f, smooth};
use proptest::prelude::*;
use qcalc_core::numerics::central_derivative;
use qcalc_core::{Env, ExprFunc, Var};

fn source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("t".to_string()),
        (0u8..10).prop_map(|i| format!("u{i}")),
        (0.0..100.0f64).prop_map(|x| format!("{x}")),
        (0u32..20).prop_map(|n| n.to_string()),
    ];
    leaf.prop_recursive(4, 40, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "^"]))
                .prop_map(|(a, b, op)| format!("{a}{op}{b}")),
            (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "^"]))
                .prop_map(|(a, b, op)| format!("({a}){op}({b})")),
            inner.clone().prop_map(|a| format!("-{a}")),
            (inner.clone(), prop::sample::select(vec!["abs", "sqrt", "exp", "ln", "sin", "cos"]))
                .prop_map(|(a, name)| format!("{name}({a})")),
            (inner.clone(), inner, prop::sample::select(vec!["min", "max"]))
                .prop_map(|(a, b, name)| format!("{name}({a}, {b})")),
        ]
    })
}

proptest! {
    #[test]
    fn print_round_trip(src in source()) {
        let first = ExprFunc::parse(&src).unwrap();
        let printed = first.to_string();
        let second = ExprFunc::parse(&printed).unwrap();
        prop_assert_eq!(first.ast(), second.ast(), "{} printed as {}", src, printed);
    }

    #[test]
    fn dual_matches_finite_differences(src in smooth(), t in -5.0..5.0f64) {
        let g = f(&src);
        let dual = g.eval_dual(&Env::t(t), Var::T).unwrap();
        prop_assert_eq!(dual.primal, g.eval_t(t).unwrap());
        let fd = central_derivative(&g, t).unwrap();
        prop_assert!((dual.tangent - fd).abs() <= 1e-6 * dual.tangent.abs().max(1.0));
    }

    #[test]
    fn dual_partials_of_lagrangians(
        c in prop::array::uniform3(-2.0..2.0f64),
        x in prop::array::uniform3(-2.0..2.0f64),
    ) {
        let l = f(&format!("({})*u1^2+({})*u0*u1+({})*t*sin(u0)", c[0], c[1], c[2]));
        let env = Env::t(x[0]).with_u(0, x[1]).with_u(1, x[2]);
        let d0 = l.eval_dual(&env, Var::U(0)).unwrap().tangent;
        let d1 = l.eval_dual(&env, Var::U(1)).unwrap().tangent;
        let want0 = c[1] * x[2] + c[2] * x[0] * x[1].cos();
        let want1 = 2.0 * c[0] * x[2] + c[1] * x[1];
        prop_assert!((d0 - want0).abs() <= 1e-12 * want0.abs().max(1.0));
        prop_assert!((d1 - want1).abs() <= 1e-12 * want1.abs().max(1.0));
    }

    #[test]
    fn overrides_shadow_only_their_point(src in smooth(), t0 in -10.0..10.0f64, v in -100.0..100.0f64, off in 3.0..1e6f64) {
        let base = f(&src);
        let g = base.clone().with_t_override(t0, v).unwrap();
        let eps = g.match_eps() * t0.abs().max(1.0);
        prop_assert_eq!(g.eval_t(t0).unwrap(), v);
        prop_assert_eq!(g.eval_t(t0 + 0.5 * eps).unwrap(), v);
        let away = t0 + off * eps;
        prop_assert_eq!(g.eval_t(away).unwrap(), base.eval_t(away).unwrap());
        prop_assert!(g.eval_dual(&Env::t(t0), Var::T).is_err());
        prop_assert!(g.eval_dual(&Env::t(away), Var::T).is_ok());
    }
}
