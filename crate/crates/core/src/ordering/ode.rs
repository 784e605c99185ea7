//! First-order eigenvalue ODEs in the momentum representation.

use std::fmt;

use crate::exponent::ExponentExpr;
use crate::operator::{Base, Factor, OperatorExpr, OperatorWord};
use crate::poly::ParamSymbol;
use crate::scalar::ScalarExpr;

use super::{normal_order, Convention, OrderingError};

/// `a(p) ψ̃′ + b(p) ψ̃ = E ψ̃`, with `a` and `b` sums of `c · p^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdeDescriptor {
    pub derivative_terms: Vec<(ScalarExpr, ExponentExpr)>,
    pub value_terms: Vec<(ScalarExpr, ExponentExpr)>,
    pub eigenvalue: ParamSymbol,
}

/// `ψ̃(p) = N · p^power · exp(phase_coefficient · p^phase_exponent)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentumSolution {
    pub power: ScalarExpr,
    pub phase_coefficient: ScalarExpr,
    pub phase_exponent: ExponentExpr,
}

fn p_series(terms: &[(ScalarExpr, ExponentExpr)]) -> OperatorExpr {
    OperatorExpr::from_words(
        terms
            .iter()
            .filter_map(|(c, e)| OperatorWord::new(c.clone(), vec![Factor::p_pow(e.clone())])),
    )
}

impl OdeDescriptor {
    pub fn derivative_coefficient(&self) -> OperatorExpr {
        p_series(&self.derivative_terms)
    }

    pub fn value_coefficient(&self) -> OperatorExpr {
        p_series(&self.value_terms)
    }

    /// Closed-form solution when `a = A p^m` and `b = B p^(m−1)` (or `b = 0`).
    ///
    /// From `ψ̃′/ψ̃ = (E/A) p^(−m) − (B/A) p^(−1)`.
    pub fn solve(&self) -> Option<MomentumSolution> {
        let [(a, m)] = self.derivative_terms.as_slice() else {
            return None;
        };
        let b = match self.value_terms.as_slice() {
            [] => ScalarExpr::zero(),
            [(b, e)] if *e == m.add_integer(-1) => b.clone(),
            _ => return None,
        };
        let e = ScalarExpr::param(self.eigenvalue.clone());
        let e_over_a = e.div(a).ok()?;
        let mut power = b.div(a).ok()?.neg();
        if *m == ExponentExpr::one() {
            power = power.add(&e_over_a);
            return Some(MomentumSolution {
                power,
                phase_coefficient: ScalarExpr::zero(),
                phase_exponent: ExponentExpr::zero(),
            });
        }
        let phase_exponent = ExponentExpr::one().sub(m);
        let phase_coefficient = e_over_a.div(&phase_exponent.to_scalar()).ok()?;
        Some(MomentumSolution {
            power,
            phase_coefficient,
            phase_exponent,
        })
    }
}

impl fmt::Display for OdeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) * psi' + ({}) * psi = {} * psi",
            self.derivative_coefficient(),
            self.value_coefficient(),
            self.eigenvalue
        )
    }
}

impl fmt::Display for MomentumSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "psi(p) = N * p^({}) * exp(({}) * p^{})",
            self.power, self.phase_coefficient, self.phase_exponent
        )
    }
}

/// Momentum-normal-orders `h` and substitutes `x̂ ↦ iħ d/dp`.
pub fn momentum_rep_ode(
    h: &OperatorExpr,
    eigenvalue: ParamSymbol,
) -> Result<OdeDescriptor, OrderingError> {
    let n = normal_order(h, Convention::MomentumNormal)?;
    let mut derivative_terms = Vec::new();
    let mut value_terms = Vec::new();
    for (block, k, c) in n.terms() {
        let e = match block {
            [] => ExponentExpr::zero(),
            [f] if f.base == Base::P => f.exponent.clone(),
            _ => unreachable!("momentum block holds only p"),
        };
        match k {
            0 => value_terms.push((c.clone(), e)),
            1 => derivative_terms.push((c.mul(&ScalarExpr::i_hbar()), e)),
            _ => return Err(OrderingError::OdeOrder),
        }
    }
    Ok(OdeDescriptor {
        derivative_terms,
        value_terms,
        eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::hermitize;
    use crate::parser::parse_operator;

    fn ode(s: &str) -> OdeDescriptor {
        momentum_rep_ode(&parse_operator(s).unwrap(), "E".into()).unwrap()
    }

    #[test]
    fn hermitized_p2_x() {
        let d =
            momentum_rep_ode(&hermitize(&parse_operator("p^2 * x").unwrap()), "E".into()).unwrap();
        assert_eq!(
            d.derivative_coefficient(),
            parse_operator("i * hbar * p^2").unwrap()
        );
        assert_eq!(
            d.value_coefficient(),
            parse_operator("i * hbar * p").unwrap()
        );
        assert_eq!(
            d.to_string(),
            "(i * hbar * p^2) * psi' + (i * hbar * p) * psi = E * psi"
        );
    }

    #[test]
    fn free_particle_is_multiplicative() {
        let d = ode("p^2");
        assert!(d.derivative_terms.is_empty());
        assert_eq!(d.value_coefficient(), parse_operator("p^2").unwrap());
        assert!(d.solve().is_none());
    }

    #[test]
    fn hermitized_p_x() {
        let d =
            momentum_rep_ode(&hermitize(&parse_operator("p * x").unwrap()), "E".into()).unwrap();
        assert_eq!(
            d.derivative_coefficient(),
            parse_operator("i * hbar * p").unwrap()
        );
        assert_eq!(
            d.value_coefficient(),
            parse_operator("1/2 * i * hbar").unwrap()
        );
        // power law p^(E/(iħ) − 1/2)
        let s = d.solve().unwrap();
        let expected = ScalarExpr::param("E")
            .div(&ScalarExpr::i_hbar())
            .unwrap()
            .sub(&ScalarExpr::ratio(1, 2));
        assert_eq!(s.power, expected);
        assert!(s.phase_coefficient.is_zero());
    }

    #[test]
    fn second_order_rejected() {
        let e = parse_operator("p * x^2").unwrap();
        assert_eq!(
            momentum_rep_ode(&e, "E".into()),
            Err(OrderingError::OdeOrder)
        );
    }

    #[test]
    fn eigenfunction_sign_is_derived() {
        let d =
            momentum_rep_ode(&hermitize(&parse_operator("p^2 * x").unwrap()), "E".into()).unwrap();
        let s = d.solve().unwrap();
        assert_eq!(s.power, ScalarExpr::integer(-1));
        assert_eq!(s.phase_exponent, ExponentExpr::integer(-1));
        // +iE/ħ
        let expected = ScalarExpr::i()
            .mul(&ScalarExpr::param("E"))
            .div(&ScalarExpr::param("hbar"))
            .unwrap();
        assert_eq!(s.phase_coefficient, expected);
    }
}
