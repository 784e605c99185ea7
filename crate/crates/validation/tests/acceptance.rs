//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use qorder_core::ordering::StrategyRegistry;
use qorder_core::special::bessel_j_real_order;
use qorder_core::verify::{order_residual, reconstruction_first_zero};
use qorder_core::{
    bessel_j, bessel_j_derivatives, build_two_sided, detect_ambiguity, determine_bessel_order,
    fourier_reconstruct, hermitize, momentum_ode_residual, normal_order, normal_order_with,
    parse_operator, prove_equal, verify_integral_identity, Base, Convention, ExponentExpr,
    MomentumEigenfunction, OperatorExpr, ParamSymbol, QuadratureSpec,
};

type Outcome = Result<String, String>;

fn op(s: &str) -> OperatorExpr {
    parse_operator(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_equal(lhs: &OperatorExpr, rhs: &OperatorExpr, c: Convention) -> Result<(), String> {
    let a = normal_order(lhs, c).map_err(|e| e.to_string())?;
    let b = normal_order(rhs, c).map_err(|e| e.to_string())?;
    ensure(a == b, || format!("{a} != {b}"))
}

fn symmetrized_linear() -> Outcome {
    let cases = [
        ("x^alpha * p * x^(1-alpha)", "x * p - 1/2 * i * hbar"),
        ("x^(2*alpha) * p * x^(2-2*alpha)", "x^2 * p - i * hbar * x"),
        (
            "x^(1/2*alpha) * p * x^(1/2-1/2*alpha)",
            "x^(1/2) * p - 1/4 * i * hbar * x^(-1/2)",
        ),
        (
            "f(x)^alpha * p * f(x)^(1-alpha)",
            "f(x) * p - 1/2 * i * hbar * f'(x)",
        ),
    ];
    for (word, expected) in cases {
        exact_equal(
            &hermitize(&op(word)),
            &op(expected),
            Convention::CoordinateNormal,
        )?;
    }
    Ok("exact for f = x, x^2, x^(1/2), f(x)".into())
}

fn momentum_dual() -> Outcome {
    let c = Convention::MomentumNormal;
    let expected = op("p^2 * x + i * hbar * p");
    exact_equal(
        &hermitize(&op("p^(2*alpha) * x * p^(2-2*alpha)")),
        &expected,
        c,
    )?;
    exact_equal(&hermitize(&op("p^2 * x")), &expected, c)?;
    Ok(normal_order(&expected, c).unwrap().to_string())
}

fn two_sided_survivor() -> Outcome {
    let a = ExponentExpr::param("alpha");
    let g = ExponentExpr::param("gamma");
    let b = ExponentExpr::one().sub(&a).sub(&g);
    let o = build_two_sided([&a, &b, &g], Base::P, Base::X).map_err(|e| e.to_string())?;
    let n = normal_order(&o, Convention::CoordinateNormal).map_err(|e| e.to_string())?;
    let expected = op("x * p^2 - i * hbar * p + alpha * gamma * hbar^2 * x^-1");
    ensure(n.to_operator() == expected, || format!("got {n}"))?;
    let free = [ParamSymbol::new("alpha"), ParamSymbol::new("gamma")];
    let report = detect_ambiguity(&n, &free);
    ensure(report.surviving_terms.len() == 1, || {
        format!("{} surviving terms", report.surviving_terms.len())
    })?;
    ensure(
        report.surviving_terms[0].factors == op("x^-1").words()[0].factors,
        || "wrong surviving term".into(),
    )?;
    let n0 = n
        .substitute(&free[1], &BigRational::zero())
        .map_err(|e| e.to_string())?;
    ensure(!detect_ambiguity(&n0, &free).ambiguous, || {
        "ambiguous at gamma = 0".into()
    })?;
    ensure(
        common::oracle_agrees(&o, &expected, Convention::CoordinateNormal),
        || "test-function oracle disagrees".into(),
    )?;
    Ok(n.to_string())
}

fn weyl_collapse() -> Outcome {
    let c = Convention::CoordinateNormal;
    exact_equal(
        &op("x^alpha * p * x^(1-alpha) * p"),
        &op("x^(1/2) * p * x^(1/2) * p + i * hbar * (alpha - 1/2) * p"),
        c,
    )?;
    exact_equal(
        &op("p * x^(1-alpha) * p * x^alpha"),
        &op("p * x^(1/2) * p * x^(1/2) - i * hbar * (alpha - 1/2) * p"),
        c,
    )?;
    let o_alpha = op("1/2 * x^alpha * p * x^(1-alpha) * p + 1/2 * p * x^(1-alpha) * p * x^alpha");
    let weyl = op("1/2 * x^(1/2) * p * x^(1/2) * p + 1/2 * p * x^(1/2) * p * x^(1/2)");
    ensure(
        prove_equal(&o_alpha, &weyl, c).map_err(|e| e.to_string())?,
        || "O_alpha != O_Weyl".into(),
    )?;
    Ok("both shifts and O_alpha = O_Weyl".into())
}

fn momentum_residual() -> Outcome {
    let psi = MomentumEigenfunction::new(1.0, 1.0).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = [0.1, 0.5, 1.0, 2.0, 10.0]
        .iter()
        .flat_map(|p| [-p, *p])
        .collect();
    let r = momentum_ode_residual(&psi, &grid).map_err(|e| e.to_string())?;
    ensure(r.max <= 1e-12, || format!("max residual {:e}", r.max))?;
    Ok(format!("max residual {:e}", r.max))
}

fn integral_identity() -> Outcome {
    let q = QuadratureSpec::default();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for a in [0.5, 1.0, 2.0] {
        for b in [0.5, 1.0, 2.0] {
            let r = verify_integral_identity(a, b, &q).map_err(|e| e.to_string())?;
            ensure(r.residuals.iter().all(|x| *x <= 1e-6), || {
                format!("a={a} b={b}: {:?}", r.residuals)
            })?;
            worst = worst.max(r.max);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 5.0, || format!("took {elapsed:.2} s"))?;
    Ok(format!("max residual {worst:e} in {elapsed:.3} s"))
}

fn reconstruction() -> Outcome {
    let psi = MomentumEigenfunction::new(1.0, 1.0).map_err(|e| e.to_string())?;
    let q = QuadratureSpec::default();
    let mut ratios = Vec::new();
    for x in [0.0f64, 0.25, 1.0, 2.25, 4.0] {
        let v = fourier_reconstruct(&psi, x, &q)
            .map_err(|e| e.to_string())?
            .value;
        let target = bessel_j(0.0, 2.0 * x.abs().sqrt())
            .map_err(|e| e.to_string())?
            .value;
        ratios.push((x, v / target));
    }
    let reference = ratios[1].1;
    let spread = ratios
        .iter()
        .map(|(_, r)| (r - reference).norm() / reference.norm())
        .fold(0.0, f64::max);
    let z0 = 2.404_825_557_7;
    let expected = (z0 / 2.0f64).powi(2);
    let zero = reconstruction_first_zero(&psi, &q).map_err(|e| e.to_string())?;
    let zero_rel = (zero - expected).abs() / expected;
    let listing: Vec<String> = ratios
        .iter()
        .map(|(x, r)| format!("x={x}: {:.9}i", r.im))
        .collect();
    let detail = format!(
        "ratio spread {spread:.3e} [{}]; first zero {zero:.10} (rel {zero_rel:.1e})",
        listing.join(", ")
    );
    if spread <= 1e-4 && zero_rel <= 1e-4 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn order_determination() -> Outcome {
    let mut fitted = Vec::new();
    for s in [0.0f64, 1.0 / 16.0, 0.25] {
        let nu = determine_bessel_order(s, 1.0, 1.0).map_err(|e| e.to_string())?;
        let expected = 2.0 * s.sqrt();
        ensure((nu - expected).abs() <= 1e-6, || {
            format!("alpha*gamma={s}: fitted {nu}, expected {expected}")
        })?;
        fitted.push(format!("{s} -> {nu:.9}"));
    }
    let printed = order_residual(1.0 / 16.0, 1.0 / 16.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    ensure(printed > 1e-2, || {
        format!("printed index residual {printed:e}")
    })?;
    Ok(format!(
        "{}; printed index residual {printed:.3}",
        fitted.join(", ")
    ))
}

/// `J₀(2) = Σ (−1)^k / (k!)²`, summed exactly over 40 terms.
fn exact_j0_at_two() -> f64 {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    for k in 0..40u32 {
        if k > 0 {
            fact *= BigInt::from(k);
        }
        let term = BigRational::new(BigInt::one(), &fact * &fact);
        sum = if k % 2 == 0 { sum + term } else { sum - term };
    }
    sum.to_f64().expect("finite")
}

fn special_functions() -> Outcome {
    let mut worst_ode: f64 = 0.0;
    let mut worst_rec: f64 = 0.0;
    for nu in [0.0, 0.25, 0.5, 1.0] {
        for k in 1..=400 {
            let z = k as f64 * 0.05;
            let (j, d1, d2) = bessel_j_derivatives(nu, z).map_err(|e| e.to_string())?;
            let terms = [z * z * d2, z * d1, (z * z - nu * nu) * j];
            let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
            worst_ode = worst_ode.max(terms.iter().sum::<f64>().abs() / scale);
            let lower = bessel_j_real_order(nu - 1.0, z)
                .map_err(|e| e.to_string())?
                .value;
            let upper = bessel_j_real_order(nu + 1.0, z)
                .map_err(|e| e.to_string())?
                .value;
            let rhs = 2.0 * nu / z * j;
            let scale = lower
                .abs()
                .max(upper.abs())
                .max(rhs.abs())
                .max(f64::MIN_POSITIVE);
            worst_rec = worst_rec.max((lower + upper - rhs).abs() / scale);
        }
    }
    ensure(worst_ode <= 1e-9, || format!("ODE residual {worst_ode:e}"))?;
    ensure(worst_rec <= 1e-9, || {
        format!("recurrence residual {worst_rec:e}")
    })?;
    let j0 = bessel_j(0.0, 2.0).map_err(|e| e.to_string())?;
    let oracle = exact_j0_at_two();
    ensure((j0.value - oracle).abs() <= 1e-10, || {
        format!("J0(2) = {} vs {oracle}", j0.value)
    })?;
    ensure((j0.value - 0.223_890_779_1).abs() <= 1e-10, || {
        format!("J0(2) = {}", j0.value)
    })?;
    Ok(format!(
        "ODE {worst_ode:.1e}, recurrence {worst_rec:.1e}, J0(2) = {:.12}",
        j0.value
    ))
}

fn engine_soundness() -> Outcome {
    let registry = StrategyRegistry::default();
    let mut rng = common::seeded(20240611);
    for n in 0..200u64 {
        let c = if n % 2 == 0 {
            Convention::CoordinateNormal
        } else {
            Convention::MomentumNormal
        };
        let e = common::random_word(&mut rng, c);
        let reference = normal_order(&e, c).map_err(|err| format!("word {n} `{e}`: {err}"))?;
        ensure(
            common::oracle_agrees(&e, &reference.to_operator(), c),
            || format!("word {n} `{e}`: oracle disagrees with {reference}"),
        )?;
        for name in ["rightmost", "random"] {
            let mut s = registry.create(name, n).expect("registered");
            let other = normal_order_with(&e, c, s.as_mut()).map_err(|err| err.to_string())?;
            ensure(other == reference, || {
                format!("word {n} `{e}`: {name} gives {other}")
            })?;
        }
    }
    Ok("200 words agree with the oracle under three rewrite orders".into())
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "symmetrized linear term", symmetrized_linear),
        (2, "momentum-convention dual", momentum_dual),
        (3, "two-sided ordering survivor", two_sided_survivor),
        (4, "alpha shifts and Weyl collapse", weyl_collapse),
        (5, "momentum ODE residual", momentum_residual),
        (6, "Bessel integral identity", integral_identity),
        (
            7,
            "Fourier reconstruction proportional to J0",
            reconstruction,
        ),
        (8, "Bessel order determination", order_determination),
        (9, "special-function consistency", special_functions),
        (10, "engine soundness and confluence", engine_soundness),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("criterion {id:>2} {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} {name}: FAIL ({detail})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
