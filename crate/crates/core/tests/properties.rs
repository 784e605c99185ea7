mod common;

use std::collections::HashMap;

use num_complex::Complex64;
use proptest::prelude::*;
use qorder_core::ordering::StrategyRegistry;
use qorder_core::{
    hermitian_conjugate, hermitize, normal_order, normal_order_with, parse_operator, Convention,
    ParamSymbol, ScalarExpr,
};

fn leaf() -> impl Strategy<Value = ScalarExpr> {
    prop_oneof![
        (-3i64..=3).prop_map(ScalarExpr::integer),
        Just(ScalarExpr::i()),
        Just(ScalarExpr::param("alpha")),
        Just(ScalarExpr::param("hbar")),
        (1i64..=4).prop_map(|d| ScalarExpr::ratio(1, d)),
    ]
}

fn scalar() -> impl Strategy<Value = ScalarExpr> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), inner).prop_map(|(a, b)| if b.is_zero() {
                a
            } else {
                a.div(&b).unwrap()
            }),
        ]
    })
}

fn bindings() -> HashMap<ParamSymbol, Complex64> {
    HashMap::from([
        (ParamSymbol::new("alpha"), Complex64::new(0.37, 0.0)),
        (ParamSymbol::new("hbar"), Complex64::new(1.21, 0.0)),
    ])
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_distributes(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
    }

    #[test]
    fn scalar_division_inverts(a in scalar(), b in scalar()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!(a.div(&b).unwrap().mul(&b), a);
    }

    #[test]
    fn conjugation_is_multiplicative(a in scalar(), b in scalar()) {
        prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        prop_assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn evaluation_respects_products(a in scalar(), b in scalar()) {
        let env = bindings();
        if let (Ok(x), Ok(y), Ok(z)) = (a.eval(&env), b.eval(&env), a.mul(&b).eval(&env)) {
            prop_assert!(close(z, x * y));
        }
    }

    #[test]
    fn printed_words_parse_back(seed in any::<u64>(), momentum in any::<bool>()) {
        let c = if momentum { Convention::MomentumNormal } else { Convention::CoordinateNormal };
        let mut rng = common::seeded(seed);
        let e = common::random_word(&mut rng, c).add(&common::random_word(&mut rng, c));
        let text = e.to_string();
        prop_assert_eq!(parse_operator(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn parse_errors_point_inside_input(garbage in "[xp*^()+ 0-9a-z/-]{1,16}") {
        if let Err(err) = parse_operator(&garbage) {
            prop_assert!(err.span.start <= err.span.end);
            prop_assert!(err.span.end <= garbage.len() + 1);
        }
    }

    #[test]
    fn hermitized_is_self_adjoint(seed in any::<u64>()) {
        let mut rng = common::seeded(seed);
        let e = common::random_word(&mut rng, Convention::CoordinateNormal);
        let h = hermitize(&e);
        prop_assert_eq!(hermitian_conjugate(&h), h);
    }

    #[test]
    fn rewrite_order_is_irrelevant(seed in any::<u64>(), momentum in any::<bool>()) {
        let c = if momentum { Convention::MomentumNormal } else { Convention::CoordinateNormal };
        let mut rng = common::seeded(seed);
        let e = common::random_word(&mut rng, c);
        let reference = normal_order(&e, c).unwrap();
        let registry = StrategyRegistry::default();
        let mut s = registry.create("random", seed).unwrap();
        prop_assert_eq!(normal_order_with(&e, c, s.as_mut()).unwrap(), reference.clone());
        prop_assert!(common::oracle_agrees(&e, &reference.to_operator(), c));
    }
}

#[test]
fn symmetrized_linear_term_is_alpha_free() {
    let alpha = ParamSymbol::new("alpha");
    for word in [
        "x^alpha * p * x^(1-alpha)",
        "x^(2*alpha) * p * x^(2-2*alpha)",
        "x^(1/2*alpha) * p * x^(1/2-1/2*alpha)",
        "f(x)^alpha * p * f(x)^(1-alpha)",
    ] {
        let n = normal_order(
            &hermitize(&parse_operator(word).unwrap()),
            Convention::CoordinateNormal,
        )
        .unwrap();
        for (block, _, c) in n.terms() {
            assert!(c.derivative(&alpha).is_zero(), "{word}: {c}");
            assert!(block.iter().all(|f| !f.exponent.mentions(&alpha)), "{word}");
        }
    }
}
