//! Operator words over the Heisenberg generators `x̂`, `p̂` and abstract
//! functions `f(x̂)` with formal derivatives.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::exponent::ExponentExpr;
use crate::scalar::ScalarExpr;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    X,
    P,
    /// Abstract function of `x̂`; the second field is the derivative order.
    Func(String, u32),
}

impl Base {
    pub fn func(name: impl Into<String>) -> Self {
        Base::Func(name.into(), 0)
    }

    pub fn is_func(&self) -> bool {
        matches!(self, Base::Func(..))
    }

    /// The formal derivative `d/dx̂` of an abstract function base.
    pub fn derivative(&self) -> Option<Base> {
        match self {
            Base::Func(n, d) => Some(Base::Func(n.clone(), d + 1)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub base: Base,
    pub exponent: ExponentExpr,
}

impl Factor {
    pub fn new(base: Base, exponent: ExponentExpr) -> Self {
        Factor { base, exponent }
    }

    pub fn x() -> Self {
        Factor::new(Base::X, ExponentExpr::one())
    }

    pub fn p() -> Self {
        Factor::new(Base::P, ExponentExpr::one())
    }

    pub fn x_pow(e: ExponentExpr) -> Self {
        Factor::new(Base::X, e)
    }

    pub fn p_pow(e: ExponentExpr) -> Self {
        Factor::new(Base::P, e)
    }

    pub fn func(name: &str, e: ExponentExpr) -> Self {
        Factor::new(Base::func(name), e)
    }

    pub fn derivative_order(&self) -> u32 {
        match self.base {
            Base::Func(_, d) => d,
            _ => 0,
        }
    }

    pub fn text(&self) -> String {
        let base = match &self.base {
            Base::X => "x".to_string(),
            Base::P => "p".to_string(),
            Base::Func(n, d) => format!("{}{}(x)", n, "'".repeat(*d as usize)),
        };
        if self.exponent == ExponentExpr::one() {
            base
        } else {
            format!("{}^{}", base, self.exponent)
        }
    }
}

/// Merges adjacent factors with the same base and drops zero exponents.
pub(crate) fn compact(factors: Vec<Factor>) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::with_capacity(factors.len());
    for f in factors {
        if f.exponent.is_zero() {
            continue;
        }
        if let Some(last) = out.last_mut() {
            if last.base == f.base {
                last.exponent = last.exponent.add(&f.exponent);
                if last.exponent.is_zero() {
                    out.pop();
                }
                continue;
            }
        }
        out.push(f);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorWord {
    pub coefficient: ScalarExpr,
    pub factors: Vec<Factor>,
}

impl OperatorWord {
    /// Builds a word, merging adjacent like factors. Returns `None` for a
    /// zero coefficient.
    pub fn new(coefficient: ScalarExpr, factors: Vec<Factor>) -> Option<Self> {
        if coefficient.is_zero() {
            return None;
        }
        Some(OperatorWord {
            coefficient,
            factors: compact(factors),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total exponent of `x̂` evaluated at the generic parameter point.
    pub fn x_degree(&self) -> f64 {
        self.degree_of(&Base::X)
    }

    pub fn p_degree(&self) -> f64 {
        self.degree_of(&Base::P)
    }

    fn degree_of(&self, base: &Base) -> f64 {
        self.factors
            .iter()
            .filter(|f| &f.base == base)
            .map(|f| f.exponent.generic_value())
            .sum()
    }

    pub fn signature(&self) -> String {
        self.factors
            .iter()
            .map(Factor::text)
            .collect::<Vec<_>>()
            .join(" * ")
    }
}

/// Canonical print order: descending x̂-degree, descending p̂-degree, then
/// factor signature text.
pub(crate) fn word_order(a: &OperatorWord, b: &OperatorWord) -> Ordering {
    b.x_degree()
        .partial_cmp(&a.x_degree())
        .unwrap_or(Ordering::Equal)
        .then_with(|| {
            b.p_degree()
                .partial_cmp(&a.p_degree())
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| a.signature().cmp(&b.signature()))
        .then_with(|| a.factors.cmp(&b.factors))
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OperatorExpr {
    words: Vec<OperatorWord>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        OperatorExpr::default()
    }

    pub fn scalar(c: ScalarExpr) -> Self {
        OperatorExpr::from_words(OperatorWord::new(c, Vec::new()))
    }

    pub fn one() -> Self {
        OperatorExpr::scalar(ScalarExpr::one())
    }

    pub fn word(coefficient: ScalarExpr, factors: Vec<Factor>) -> Self {
        OperatorExpr::from_words(OperatorWord::new(coefficient, factors))
    }

    pub fn factor(f: Factor) -> Self {
        OperatorExpr::word(ScalarExpr::one(), vec![f])
    }

    /// Merges words with identical factor sequences and sorts canonically.
    pub fn from_words(words: impl IntoIterator<Item = OperatorWord>) -> Self {
        let mut merged: BTreeMap<Vec<Factor>, ScalarExpr> = BTreeMap::new();
        for w in words {
            let entry = merged.entry(w.factors).or_insert_with(ScalarExpr::zero);
            *entry = entry.add(&w.coefficient);
        }
        let mut words: Vec<OperatorWord> = merged
            .into_iter()
            .filter_map(|(f, c)| OperatorWord::new(c, f))
            .collect();
        words.sort_by(word_order);
        OperatorExpr { words }
    }

    pub fn words(&self) -> &[OperatorWord] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Coefficient when the expression is a pure scalar multiple of 1.
    pub fn as_scalar(&self) -> Option<ScalarExpr> {
        match self.words.as_slice() {
            [] => Some(ScalarExpr::zero()),
            [w] if w.is_identity() => Some(w.coefficient.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &OperatorExpr) -> OperatorExpr {
        OperatorExpr::from_words(self.words.iter().chain(other.words.iter()).cloned())
    }

    pub fn neg(&self) -> OperatorExpr {
        self.scale(&ScalarExpr::integer(-1))
    }

    pub fn sub(&self, other: &OperatorExpr) -> OperatorExpr {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ScalarExpr) -> OperatorExpr {
        OperatorExpr::from_words(
            self.words
                .iter()
                .filter_map(|w| OperatorWord::new(w.coefficient.mul(c), w.factors.clone())),
        )
    }

    /// Noncommutative product; factor order is preserved.
    pub fn mul(&self, other: &OperatorExpr) -> OperatorExpr {
        let mut out = Vec::with_capacity(self.words.len() * other.words.len());
        for a in &self.words {
            for b in &other.words {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                out.extend(OperatorWord::new(
                    a.coefficient.mul(&b.coefficient),
                    factors,
                ));
            }
        }
        OperatorExpr::from_words(out)
    }

    pub fn pow(&self, n: u32) -> OperatorExpr {
        (0..n).fold(OperatorExpr::one(), |acc, _| acc.mul(self))
    }

    /// Replaces a parameter by a rational value in coefficients and exponents.
    pub fn substitute(
        &self,
        sym: &crate::ParamSymbol,
        value: &num_rational::BigRational,
    ) -> Result<OperatorExpr, crate::scalar::ScalarError> {
        let c = crate::poly::coeff_real(value.clone());
        let mut out = Vec::with_capacity(self.words.len());
        for w in &self.words {
            let coefficient = w.coefficient.substitute(sym, &c)?;
            let factors = w
                .factors
                .iter()
                .map(|f| Factor::new(f.base.clone(), f.exponent.substitute(sym, value)))
                .collect();
            out.extend(OperatorWord::new(coefficient, factors));
        }
        Ok(OperatorExpr::from_words(out))
    }
}

impl std::fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::printer::print_operator(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_like_factors_merge() {
        let a = ExponentExpr::param("a");
        let w = OperatorWord::new(
            ScalarExpr::one(),
            vec![
                Factor::x_pow(a.clone()),
                Factor::x_pow(ExponentExpr::one().sub(&a)),
                Factor::p(),
                Factor::p(),
            ],
        )
        .unwrap();
        assert_eq!(
            w.factors,
            vec![Factor::x(), Factor::p_pow(ExponentExpr::integer(2))]
        );
    }

    #[test]
    fn zero_words_are_pruned() {
        assert!(OperatorWord::new(ScalarExpr::zero(), vec![Factor::x()]).is_none());
        let e = OperatorExpr::factor(Factor::x());
        assert!(e.sub(&e).is_zero());
    }

    #[test]
    fn product_is_order_preserving() {
        let x = OperatorExpr::factor(Factor::x());
        let p = OperatorExpr::factor(Factor::p());
        assert_ne!(x.mul(&p), p.mul(&x));
        assert_eq!(x.mul(&p).words()[0].factors, vec![Factor::x(), Factor::p()]);
    }
}
