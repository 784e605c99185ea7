//! Affine exponents `c + Σ kᵢ·paramᵢ` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{coeff_real, Monomial, ParamSymbol, Polynomial};
use crate::scalar::ScalarExpr;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExponentExpr {
    constant: BigRational,
    linear: BTreeMap<ParamSymbol, BigRational>,
}

impl ExponentExpr {
    pub fn zero() -> Self {
        ExponentExpr::default()
    }

    pub fn one() -> Self {
        ExponentExpr::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        ExponentExpr {
            constant: c,
            linear: BTreeMap::new(),
        }
    }

    pub fn integer(n: i64) -> Self {
        ExponentExpr::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        ExponentExpr::constant(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn param(sym: impl Into<ParamSymbol>) -> Self {
        let mut linear = BTreeMap::new();
        linear.insert(sym.into(), BigRational::one());
        ExponentExpr {
            constant: BigRational::zero(),
            linear,
        }
    }

    pub fn constant_part(&self) -> &BigRational {
        &self.constant
    }

    pub fn linear_part(&self) -> &BTreeMap<ParamSymbol, BigRational> {
        &self.linear
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.linear.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn mentions(&self, sym: &ParamSymbol) -> bool {
        self.linear.contains_key(sym)
    }

    /// Integer value when the exponent is a constant integer.
    pub fn as_integer(&self) -> Option<i64> {
        if self.is_constant() && self.constant.is_integer() {
            self.constant.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn add(&self, other: &ExponentExpr) -> ExponentExpr {
        let mut linear = self.linear.clone();
        for (s, k) in &other.linear {
            let v = linear.entry(s.clone()).or_insert_with(BigRational::zero);
            *v += k;
            if v.is_zero() {
                linear.remove(s);
            }
        }
        ExponentExpr {
            constant: &self.constant + &other.constant,
            linear,
        }
    }

    pub fn neg(&self) -> ExponentExpr {
        self.scale(&-BigRational::one())
    }

    pub fn sub(&self, other: &ExponentExpr) -> ExponentExpr {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> ExponentExpr {
        if k.is_zero() {
            return ExponentExpr::zero();
        }
        ExponentExpr {
            constant: &self.constant * k,
            linear: self
                .linear
                .iter()
                .map(|(s, v)| (s.clone(), v * k))
                .collect(),
        }
    }

    pub fn add_integer(&self, n: i64) -> ExponentExpr {
        self.add(&ExponentExpr::integer(n))
    }

    pub fn substitute(&self, sym: &ParamSymbol, value: &BigRational) -> ExponentExpr {
        let mut out = self.clone();
        if let Some(k) = out.linear.remove(sym) {
            out.constant += k * value;
        }
        out
    }

    /// The exponent as an exact scalar (used for commutator coefficients).
    pub fn to_scalar(&self) -> ScalarExpr {
        let mut p = Polynomial::constant(coeff_real(self.constant.clone()));
        for (s, k) in &self.linear {
            p = p.add(&Polynomial::term(
                coeff_real(k.clone()),
                Monomial::var(s.clone()),
            ));
        }
        ScalarExpr::from_polynomial(p)
    }

    /// Value at a fixed pseudo-generic parameter point; only used for ordering.
    pub fn generic_value(&self) -> f64 {
        let mut v = self.constant.to_f64().unwrap_or(0.0);
        for (s, k) in &self.linear {
            v += k.to_f64().unwrap_or(0.0) * generic_point(s);
        }
        v
    }
}

fn generic_point(sym: &ParamSymbol) -> f64 {
    // Deterministic value in (0, 1) derived from the name.
    let h = sym
        .name()
        .bytes()
        .fold(0x9e37u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
    0.1 + 0.8 * ((h % 9973) as f64 / 9973.0) + 1e-3 * std::f64::consts::FRAC_1_SQRT_2
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ExponentExpr {
    /// Prints in a form the operator grammar accepts after `^`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.linear.is_empty() {
            if self.constant.is_integer() {
                return write!(f, "{}", self.constant.numer());
            }
            return write!(f, "({})", fmt_ratio(&self.constant));
        }
        if self.constant.is_zero() && self.linear.len() == 1 {
            let (s, k) = self.linear.iter().next().unwrap();
            if k.is_one() {
                return write!(f, "{s}");
            }
        }
        let mut out = String::new();
        let mut first = true;
        if !self.constant.is_zero() {
            out.push_str(&fmt_ratio(&self.constant));
            first = false;
        }
        for (s, k) in &self.linear {
            let neg = k.is_negative();
            let mag = k.abs();
            match (first, neg) {
                (true, false) => {}
                (true, true) => out.push('-'),
                (false, false) => out.push_str(" + "),
                (false, true) => out.push_str(" - "),
            }
            if mag.is_one() {
                out.push_str(s.name());
            } else {
                out.push_str(&format!("{} * {}", fmt_ratio(&mag), s));
            }
            first = false;
        }
        write!(f, "({out})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_arithmetic_is_closed() {
        let a = ExponentExpr::param("alpha");
        let g = ExponentExpr::param("gamma");
        let beta = ExponentExpr::one().sub(&a).sub(&g);
        assert_eq!(beta.add(&a).add(&g), ExponentExpr::one());
        assert_eq!(a.sub(&a), ExponentExpr::zero());
    }

    #[test]
    fn display_forms() {
        let a = ExponentExpr::param("alpha");
        assert_eq!(a.to_string(), "alpha");
        assert_eq!(ExponentExpr::integer(-1).to_string(), "-1");
        assert_eq!(ExponentExpr::ratio(1, 2).to_string(), "(1/2)");
        assert_eq!(ExponentExpr::one().sub(&a).to_string(), "(1 - alpha)");
        assert_eq!(
            a.scale(&BigRational::from_integer(2.into())).to_string(),
            "(2 * alpha)"
        );
    }

    #[test]
    fn integer_detection() {
        assert_eq!(ExponentExpr::integer(3).as_integer(), Some(3));
        assert_eq!(ExponentExpr::ratio(1, 2).as_integer(), None);
        assert_eq!(ExponentExpr::param("a").as_integer(), None);
    }
}
