//! Exact scalars: ratios of polynomials over Q(i) in real parameter symbols.
//!
//! A [`ScalarExpr`] is always stored in canonical form: the numerator and
//! denominator share no common factor and the denominator's lex-leading
//! coefficient is 1. Structural equality is therefore mathematical equality.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

use crate::poly::{
    coeff_i, coeff_int, coeff_is_zero, coeff_real, display_terms, fmt_monomial, fmt_signed_term,
    gcd, Coeff, Monomial, ParamSymbol, Polynomial,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("unbound parameter `{0}`")]
    UnboundParameter(ParamSymbol),
    #[error("pole at binding")]
    PoleAtBinding,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarExpr {
    num: Polynomial,
    den: Polynomial,
}

impl Default for ScalarExpr {
    fn default() -> Self {
        ScalarExpr::zero()
    }
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        ScalarExpr::integer(1)
    }

    pub fn integer(n: i64) -> Self {
        ScalarExpr::from_coeff(coeff_int(n))
    }

    pub fn rational(r: BigRational) -> Self {
        ScalarExpr::from_coeff(coeff_real(r))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        ScalarExpr::rational(crate::poly::rat(n, d))
    }

    pub fn i() -> Self {
        ScalarExpr::from_coeff(coeff_i())
    }

    pub fn from_coeff(c: Coeff) -> Self {
        ScalarExpr::from_polynomial(Polynomial::constant(c))
    }

    pub fn param(sym: impl Into<ParamSymbol>) -> Self {
        ScalarExpr::from_polynomial(Polynomial::var(sym.into()))
    }

    /// `i·ħ`, the commutator scale.
    pub fn i_hbar() -> Self {
        ScalarExpr::i().mul(&ScalarExpr::param(ParamSymbol::hbar()))
    }

    pub fn from_polynomial(num: Polynomial) -> Self {
        ScalarExpr {
            num,
            den: Polynomial::one(),
        }
    }

    /// Builds `num / den` in canonical form.
    pub fn from_parts(num: Polynomial, den: Polynomial) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(canonicalize(num, den))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den == Polynomial::one() && self.num == Polynomial::one()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn add(&self, other: &ScalarExpr) -> ScalarExpr {
        if self.den == other.den {
            return canonicalize(self.num.add(&other.num), self.den.clone());
        }
        canonicalize(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> ScalarExpr {
        ScalarExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &ScalarExpr) -> ScalarExpr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() || other.is_zero() {
            return ScalarExpr::zero();
        }
        canonicalize(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &ScalarExpr) -> Result<ScalarExpr, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(canonicalize(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn scale(&self, c: &Coeff) -> ScalarExpr {
        canonicalize(self.num.scale(c), self.den.clone())
    }

    /// Integer power; negative powers invert.
    pub fn pow(&self, n: i64) -> Result<ScalarExpr, ScalarError> {
        let base = if n < 0 {
            ScalarExpr::one().div(self)?
        } else {
            self.clone()
        };
        let k = n.unsigned_abs() as u32;
        Ok(ScalarExpr {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// Complex conjugation: `i ↦ −i`, parameters are real and stay fixed.
    pub fn conj(&self) -> ScalarExpr {
        canonicalize(self.num.conj(), self.den.conj())
    }

    /// Partial derivative with respect to a parameter.
    pub fn derivative(&self, sym: &ParamSymbol) -> ScalarExpr {
        let dn = self.num.derivative(sym);
        let dd = self.den.derivative(sym);
        canonicalize(
            dn.mul(&self.den).sub(&self.num.mul(&dd)),
            self.den.mul(&self.den),
        )
    }

    /// True when the canonical form involves `sym`.
    pub fn depends_on(&self, sym: &ParamSymbol) -> bool {
        self.num.degree_in(sym) > 0 || self.den.degree_in(sym) > 0
    }

    pub fn params(&self) -> std::collections::BTreeSet<ParamSymbol> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn substitute(&self, sym: &ParamSymbol, value: &Coeff) -> Result<ScalarExpr, ScalarError> {
        let den = self.den.substitute(sym, value);
        if den.is_zero() {
            return Err(ScalarError::PoleAtBinding);
        }
        Ok(canonicalize(self.num.substitute(sym, value), den))
    }

    /// Substitutes every binding then divides in floating point.
    pub fn eval(
        &self,
        bindings: &HashMap<ParamSymbol, Complex64>,
    ) -> Result<Complex64, ScalarError> {
        let lookup = |s: &ParamSymbol| bindings.get(s).copied();
        let n = self
            .num
            .eval(&lookup)
            .map_err(ScalarError::UnboundParameter)?;
        let d = self
            .den
            .eval(&lookup)
            .map_err(ScalarError::UnboundParameter)?;
        if d.norm() == 0.0 {
            return Err(ScalarError::PoleAtBinding);
        }
        Ok(n / d)
    }

    /// Sign and body for printing as a coefficient in front of operator
    /// factors. The body is `None` when the magnitude is exactly 1.
    pub(crate) fn signed_parts(&self) -> (bool, Option<String>) {
        let den_part = if self.den == Polynomial::one() {
            None
        } else {
            Some(format!("({})^-1", self.den))
        };
        if self.num.len() == 1 {
            let (m, c) = self.num.terms().next().unwrap();
            let mut s = String::new();
            let mut factors = fmt_monomial(m);
            factors.extend(den_part);
            fmt_signed_term(&mut s, c, &factors, true);
            let neg = s.starts_with('-');
            let body = s.trim_start_matches('-').to_string();
            return (neg, if body == "1" { None } else { Some(body) });
        }
        // Multi-term numerator: factor out a shared power product and a
        // shared `i` when every coefficient is imaginary.
        let terms = display_terms(&self.num);
        let mut shared = terms[0].0.clone();
        for (m, _) in &terms[1..] {
            shared = shared.gcd(m);
        }
        let all_imag = terms.iter().all(|(_, c)| c.re == num_traits::Zero::zero());
        let unit = if all_imag { coeff_i() } else { coeff_int(1) };
        let mut inner = Polynomial::zero();
        for (m, c) in &terms {
            let reduced = m.div(&shared).expect("shared divides every term");
            inner = inner.add(&Polynomial::term((*c) / &unit, reduced));
        }
        let inner_text = inner.to_string();
        let neg = inner_text.starts_with('-');
        let inner_text = if neg {
            inner.neg().to_string()
        } else {
            inner_text
        };
        let mut parts: Vec<String> = Vec::new();
        if all_imag {
            parts.push("i".to_string());
        }
        parts.extend(fmt_monomial(&shared));
        parts.push(format!("({inner_text})"));
        parts.extend(den_part);
        (neg, Some(parts.join(" * ")))
    }
}

fn canonicalize(num: Polynomial, den: Polynomial) -> ScalarExpr {
    debug_assert!(!den.is_zero());
    if num.is_zero() {
        return ScalarExpr::zero();
    }
    if let Some(c) = den.as_constant() {
        let inv = coeff_int(1) / c;
        return ScalarExpr {
            num: num.scale(&inv),
            den: Polynomial::one(),
        };
    }
    let g = gcd(&num, &den);
    let (num, den) = if g == Polynomial::one() {
        (num, den)
    } else {
        (
            num.div_exact(&g).expect("gcd divides numerator"),
            den.div_exact(&g).expect("gcd divides denominator"),
        )
    };
    let lc = den.leading().map(|(_, c)| c.clone()).unwrap();
    let inv = coeff_int(1) / lc;
    let num = num.scale(&inv);
    let den = den.scale(&inv);
    if let Some(c) = den.as_constant() {
        debug_assert!(!coeff_is_zero(&c));
    }
    ScalarExpr { num, den }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let (neg, body) = self.signed_parts();
        if neg {
            f.write_str("-")?;
        }
        f.write_str(body.as_deref().unwrap_or("1"))
    }
}

impl From<Monomial> for ScalarExpr {
    fn from(m: Monomial) -> Self {
        ScalarExpr::from_polynomial(Polynomial::term(coeff_int(1), m))
    }
}
