//! Named operator identities and integral identities, checked on demand.
//!
//! Each identity implements [`IdentityCheck`] and is registered under a
//! short id (`eq3`, `eq4`, ...). Front ends select them by name.

use serde::Serialize;

use crate::exponent::ExponentExpr;
use crate::operator::{Base, OperatorExpr};
use crate::ordering::{
    build_two_sided, detect_ambiguity, hermitize, normal_order, prove_equal, Convention,
};
use crate::parser::parse_operator;
use crate::poly::ParamSymbol;
use crate::quadrature::QuadratureSpec;
use crate::verify::verify_integral_identity;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityOutcome {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

pub trait IdentityCheck: Send + Sync {
    fn id(&self) -> &str;
    fn run(&self) -> IdentityOutcome;
}

fn outcome(id: &str, result: Result<String, String>) -> IdentityOutcome {
    let (pass, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    IdentityOutcome {
        id: id.to_string(),
        pass,
        detail,
    }
}

fn op(s: &str) -> Result<OperatorExpr, String> {
    parse_operator(s).map_err(|e| format!("cannot parse `{s}`: {e}"))
}

fn equal(lhs: &OperatorExpr, rhs: &OperatorExpr, c: Convention) -> Result<(), String> {
    match prove_equal(lhs, rhs, c) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!(
            "{} != {}",
            normal_order(lhs, c)
                .map(|n| n.to_string())
                .unwrap_or_default(),
            normal_order(rhs, c)
                .map(|n| n.to_string())
                .unwrap_or_default()
        )),
        Err(e) => Err(e.to_string()),
    }
}

/// `½(f^α p f^(1−α) + f^(1−α) p f^α) = f p − (iħ/2) f′` for several `f`.
struct SymmetrizedLinear;

impl IdentityCheck for SymmetrizedLinear {
    fn id(&self) -> &str {
        "eq3"
    }

    fn run(&self) -> IdentityOutcome {
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
        let r = cases.iter().try_for_each(|(lhs, rhs)| {
            equal(
                &hermitize(&op(lhs)?),
                &op(rhs)?,
                Convention::CoordinateNormal,
            )
        });
        outcome(
            self.id(),
            r.map(|_| "alpha-independent for f in {x, x^2, x^(1/2), f}".into()),
        )
    }
}

/// Momentum dual: `½(g^α x g^(1−α) + g^(1−α) x g^α) = g x + (iħ/2) g′`.
struct MomentumDual;

impl IdentityCheck for MomentumDual {
    fn id(&self) -> &str {
        "eq4"
    }

    fn run(&self) -> IdentityOutcome {
        let cases = [
            ("p^alpha * x * p^(1-alpha)", "p * x + 1/2 * i * hbar"),
            ("p^(2*alpha) * x * p^(2-2*alpha)", "p^2 * x + i * hbar * p"),
        ];
        let r = cases.iter().try_for_each(|(lhs, rhs)| {
            equal(&hermitize(&op(lhs)?), &op(rhs)?, Convention::MomentumNormal)
        });
        outcome(
            self.id(),
            r.map(|_| "g = p^2 gives p^2 * x + i * hbar * p".into()),
        )
    }
}

/// Two-sided `O_p` keeps the `αγħ² x^(−1)` term; it vanishes at `γ = 0`.
struct TwoSidedSurvivor;

impl IdentityCheck for TwoSidedSurvivor {
    fn id(&self) -> &str {
        "eq14"
    }

    fn run(&self) -> IdentityOutcome {
        let r = (|| {
            let a = ExponentExpr::param("alpha");
            let g = ExponentExpr::param("gamma");
            let b = ExponentExpr::one().sub(&a).sub(&g);
            let o = build_two_sided([&a, &b, &g], Base::P, Base::X).map_err(|e| e.to_string())?;
            let n = normal_order(&o, Convention::CoordinateNormal).map_err(|e| e.to_string())?;
            let expected = op("x * p^2 - i * hbar * p + alpha * gamma * hbar^2 * x^-1")?;
            if n.to_operator() != expected {
                return Err(format!("normal form {n}"));
            }
            let free = [ParamSymbol::new("alpha"), ParamSymbol::new("gamma")];
            let report = detect_ambiguity(&n, &free);
            if report.surviving_terms.len() != 1 {
                return Err(format!("{} surviving terms", report.surviving_terms.len()));
            }
            let zero = num_rational::BigRational::from_integer(0.into());
            let n0 = n.substitute(&free[1], &zero).map_err(|e| e.to_string())?;
            if detect_ambiguity(&n0, &free).ambiguous {
                return Err("still ambiguous at gamma = 0".into());
            }
            Ok(format!("{n}; ambiguity vanishes at gamma = 0"))
        })();
        outcome(self.id(), r)
    }
}

/// `O_α` for every α against the `α = ½` form.
struct AlphaShift;

impl IdentityCheck for AlphaShift {
    fn id(&self) -> &str {
        "eq18"
    }

    fn run(&self) -> IdentityOutcome {
        let c = Convention::CoordinateNormal;
        let r = (|| {
            equal(
                &op("x^alpha * p * x^(1-alpha) * p")?,
                &op("x^(1/2) * p * x^(1/2) * p + i * hbar * (alpha - 1/2) * p")?,
                c,
            )?;
            equal(
                &op("p * x^(1-alpha) * p * x^alpha")?,
                &op("p * x^(1/2) * p * x^(1/2) - i * hbar * (alpha - 1/2) * p")?,
                c,
            )
        })();
        outcome(
            self.id(),
            r.map(|_| "both shifts hold for symbolic alpha".into()),
        )
    }
}

struct WeylCollapse;

impl IdentityCheck for WeylCollapse {
    fn id(&self) -> &str {
        "eq19"
    }

    fn run(&self) -> IdentityOutcome {
        let r = (|| {
            let o_alpha =
                op("1/2 * x^alpha * p * x^(1-alpha) * p + 1/2 * p * x^(1-alpha) * p * x^alpha")?;
            let weyl = op("1/2 * x^(1/2) * p * x^(1/2) * p + 1/2 * p * x^(1/2) * p * x^(1/2)")?;
            equal(&o_alpha, &weyl, Convention::CoordinateNormal)?;
            let n = normal_order(&weyl, Convention::CoordinateNormal).map_err(|e| e.to_string())?;
            Ok(format!("O_alpha = O_Weyl = {n}"))
        })();
        outcome(self.id(), r)
    }
}

/// Both integrand orderings on `(a, b) ∈ {½, 1, 2}²`.
struct BesselIntegral;

impl IdentityCheck for BesselIntegral {
    fn id(&self) -> &str {
        "eq11"
    }

    fn run(&self) -> IdentityOutcome {
        let q = QuadratureSpec::default().with_env_override();
        let values = [0.5, 1.0, 2.0];
        let mut worst: f64 = 0.0;
        for a in values {
            for b in values {
                match verify_integral_identity(a, b, &q) {
                    Ok(r) if r.pass => worst = worst.max(r.max),
                    Ok(r) => {
                        return outcome(
                            self.id(),
                            Err(format!("a={a} b={b} max residual {:e}", r.max)),
                        )
                    }
                    Err(e) => return outcome(self.id(), Err(format!("a={a} b={b}: {e}"))),
                }
            }
        }
        outcome(self.id(), Ok(format!("max residual {worst:e}")))
    }
}

/// Checks in registration order; ids are unique.
pub struct IdentityRegistry {
    checks: Vec<Box<dyn IdentityCheck>>,
}

impl IdentityRegistry {
    pub fn empty() -> Self {
        IdentityRegistry { checks: Vec::new() }
    }

    pub fn register(&mut self, check: Box<dyn IdentityCheck>) {
        self.checks.retain(|c| c.id() != check.id());
        self.checks.push(check);
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.checks.iter().map(|c| c.id())
    }

    pub fn get(&self, id: &str) -> Option<&dyn IdentityCheck> {
        self.checks
            .iter()
            .find(|c| c.id() == id)
            .map(|c| c.as_ref())
    }

    /// `"all"` runs every registered check in order.
    pub fn run(&self, id: &str) -> Option<Vec<IdentityOutcome>> {
        if id == "all" {
            return Some(self.checks.iter().map(|c| c.run()).collect());
        }
        self.get(id).map(|c| vec![c.run()])
    }
}

impl Default for IdentityRegistry {
    fn default() -> Self {
        let mut r = IdentityRegistry::empty();
        r.register(Box::new(SymmetrizedLinear));
        r.register(Box::new(MomentumDual));
        r.register(Box::new(BesselIntegral));
        r.register(Box::new(TwoSidedSurvivor));
        r.register(Box::new(AlphaShift));
        r.register(Box::new(WeylCollapse));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_passes() {
        let r = IdentityRegistry::default();
        for o in r.run("all").unwrap() {
            assert!(o.pass, "{o:?}");
        }
    }

    #[test]
    fn ids_and_unknown() {
        let r = IdentityRegistry::default();
        assert_eq!(
            r.ids().collect::<Vec<_>>(),
            ["eq3", "eq4", "eq11", "eq14", "eq18", "eq19"]
        );
        assert!(r.run("eq99").is_none());
    }
}
