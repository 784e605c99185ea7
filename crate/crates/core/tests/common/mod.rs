//! Independent checks shared by the integration tests.
//!
//! The oracle realizes the algebra on monomials: in the coordinate
//! representation `p = −iħ d/dx` acts on `x^e`, in the momentum
//! representation `x = iħ d/dp` acts on `p^e`. Exponents may be affine in
//! parameters. Nothing here uses the rewrite engine.

#![allow(dead_code)]

use std::collections::BTreeMap;

use qorder_core::{Base, Convention, ExponentExpr, Factor, OperatorExpr, ScalarExpr};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// `Σ c_e · t^e` keyed by exponent, zero coefficients removed.
pub type TestFunction = BTreeMap<ExponentExpr, ScalarExpr>;

pub fn monomial(m: i64) -> TestFunction {
    BTreeMap::from([(ExponentExpr::integer(m), ScalarExpr::one())])
}

fn insert(f: &mut TestFunction, e: ExponentExpr, c: ScalarExpr) {
    let sum = f.get(&e).map(|old| old.add(&c)).unwrap_or(c);
    if sum.is_zero() {
        f.remove(&e);
    } else {
        f.insert(e, sum);
    }
}

fn roles(c: Convention) -> (Base, Base, ScalarExpr) {
    match c {
        Convention::CoordinateNormal => (Base::P, Base::X, ScalarExpr::i_hbar().neg()),
        Convention::MomentumNormal => (Base::X, Base::P, ScalarExpr::i_hbar()),
    }
}

fn apply_factor(fac: &Factor, c: Convention, f: &TestFunction) -> Option<TestFunction> {
    let (derivation, carrier, unit) = roles(c);
    if fac.base == carrier {
        let mut out = TestFunction::new();
        for (e, k) in f {
            insert(&mut out, e.add(&fac.exponent), k.clone());
        }
        return Some(out);
    }
    if fac.base != derivation {
        return None;
    }
    let n = fac.exponent.as_integer().filter(|n| *n >= 0)?;
    let mut cur = f.clone();
    for _ in 0..n {
        let mut next = TestFunction::new();
        for (e, k) in &cur {
            insert(
                &mut next,
                e.add_integer(-1),
                k.mul(&e.to_scalar()).mul(&unit),
            );
        }
        cur = next;
    }
    Some(cur)
}

/// Applies `e` to `f`; `None` when a factor has no action here.
pub fn apply(e: &OperatorExpr, c: Convention, f: &TestFunction) -> Option<TestFunction> {
    let mut total = TestFunction::new();
    for w in e.words() {
        let mut cur = f.clone();
        for fac in w.factors.iter().rev() {
            cur = apply_factor(fac, c, &cur)?;
        }
        for (exp, k) in cur {
            insert(&mut total, exp, k.mul(&w.coefficient));
        }
    }
    Some(total)
}

/// True when `a` and `b` agree on every monomial of degree 0..=4.
pub fn oracle_agrees(a: &OperatorExpr, b: &OperatorExpr, c: Convention) -> bool {
    (0..=4).all(|m| {
        let f = monomial(m);
        match (apply(a, c, &f), apply(b, c, &f)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    })
}

const CARRIER_EXPONENTS: [&str; 10] = [
    "-2",
    "-1",
    "1",
    "2",
    "3",
    "alpha",
    "1-alpha",
    "1/2",
    "alpha+1/2",
    "-gamma",
];

fn exponent(text: &str) -> ExponentExpr {
    let e = qorder_core::parse_operator(&format!("x^({text})")).expect("pool exponent parses");
    e.words()[0].factors[0].exponent.clone()
}

fn coefficient(rng: &mut StdRng) -> ScalarExpr {
    match rng.gen_range(0..6) {
        0 => ScalarExpr::one(),
        1 => ScalarExpr::integer(-2),
        2 => ScalarExpr::i(),
        3 => ScalarExpr::ratio(1, 3),
        4 => ScalarExpr::param("alpha"),
        _ => ScalarExpr::param("hbar"),
    }
}

/// A random word of length 1..=6 with integer powers on the operator that
/// moves under `c` and pool exponents on the other generator.
pub fn random_word(rng: &mut StdRng, c: Convention) -> OperatorExpr {
    let (derivation, carrier, _) = roles(c);
    let len = rng.gen_range(1..=6);
    let factors = (0..len)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Factor::new(
                    derivation.clone(),
                    ExponentExpr::integer(rng.gen_range(1..=3)),
                )
            } else {
                let text = CARRIER_EXPONENTS[rng.gen_range(0..CARRIER_EXPONENTS.len())];
                Factor::new(carrier.clone(), exponent(text))
            }
        })
        .collect();
    OperatorExpr::word(coefficient(rng), factors)
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
