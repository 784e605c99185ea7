//! Normal ordering in the coordinate or momentum convention, Hermitian
//! orderings, identity proofs and ambiguity detection.
//!
//! The engine rewrites one adjacent pair at a time with
//!
//! ```text
//! p · x^s   = x^s · p − iħ s x^(s−1)
//! p · f^s   = f^s · p − iħ s f^(s−1) f′
//! x · p^t   = p^t · x + iħ t p^(t−1)          (momentum convention)
//! ```
//!
//! The generalized commutator for a symbolic power `s` is taken as an axiom;
//! it holds on smooth test functions for every real `s`.

mod ode;
pub mod strategy;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::exponent::ExponentExpr;
use crate::operator::{compact, Base, Factor, OperatorExpr, OperatorWord};
use crate::poly::ParamSymbol;
use crate::scalar::{ScalarError, ScalarExpr};

pub use ode::{momentum_rep_ode, MomentumSolution, OdeDescriptor};
pub use strategy::{Leftmost, RewriteStrategy, Rightmost, Shuffled, StrategyRegistry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderingError {
    #[error("cannot normal-order symbolic power of the moving operator")]
    SymbolicMovingPower,
    #[error("power of the moving operator must be a nonnegative integer, got {0}")]
    InvalidMovingPower(String),
    #[error("abstract x-functions unsupported in momentum convention")]
    FunctionInMomentum,
    #[error("exponent constraint α+β+γ=1 violated")]
    ExponentConstraint,
    #[error("moving and carrier bases must be distinct generators")]
    InvalidBases,
    #[error("ODE emission limited to first order")]
    OdeOrder,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Convention {
    /// Every `p̂` stands to the right.
    CoordinateNormal,
    /// Every `x̂` stands to the right.
    MomentumNormal,
}

impl Convention {
    pub fn moving(self) -> Base {
        match self {
            Convention::CoordinateNormal => Base::P,
            Convention::MomentumNormal => Base::X,
        }
    }

    /// `λ` in `moving · g = g · moving + λ g′`.
    fn commutator_scale(self) -> ScalarExpr {
        match self {
            Convention::CoordinateNormal => ScalarExpr::i_hbar().neg(),
            Convention::MomentumNormal => ScalarExpr::i_hbar(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::CoordinateNormal => "coordinate",
            Convention::MomentumNormal => "momentum",
        }
    }
}

/// Canonical ordered form. Keys are the sorted commuting block plus the
/// integer power of the moving operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    convention: Convention,
    terms: BTreeMap<(Vec<Factor>, u32), ScalarExpr>,
}

impl NormalForm {
    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Words in canonical print order, block first then the moving power.
    pub fn words(&self) -> Vec<OperatorWord> {
        self.to_operator().words().to_vec()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_operator(&self) -> OperatorExpr {
        let moving = self.convention.moving();
        OperatorExpr::from_words(self.terms.iter().filter_map(|((block, k), c)| {
            let mut factors = block.clone();
            if *k > 0 {
                factors.push(Factor::new(
                    moving.clone(),
                    ExponentExpr::integer(*k as i64),
                ));
            }
            OperatorWord::new(c.clone(), factors)
        }))
    }

    /// Coefficient of the word `block · moving^k`, zero if absent.
    pub fn coefficient(&self, block: &[Factor], k: u32) -> ScalarExpr {
        let mut key = block.to_vec();
        key.sort_by(|a, b| a.base.cmp(&b.base));
        self.terms
            .get(&(key, k))
            .cloned()
            .unwrap_or_else(ScalarExpr::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Factor], u32, &ScalarExpr)> {
        self.terms.iter().map(|((b, k), c)| (b.as_slice(), *k, c))
    }

    pub fn substitute(
        &self,
        sym: &ParamSymbol,
        value: &num_rational::BigRational,
    ) -> Result<NormalForm, OrderingError> {
        normal_order(&self.to_operator().substitute(sym, value)?, self.convention)
    }
}

impl std::fmt::Display for NormalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::printer::print_normal_form(self))
    }
}

fn check_word(w: &OperatorWord, c: Convention) -> Result<(), OrderingError> {
    let moving = c.moving();
    for f in &w.factors {
        if f.base == moving {
            match f.exponent.as_integer() {
                Some(k) if k >= 0 => {}
                _ if !f.exponent.is_constant() => return Err(OrderingError::SymbolicMovingPower),
                _ => return Err(OrderingError::InvalidMovingPower(f.exponent.to_string())),
            }
        }
        if c == Convention::MomentumNormal && f.base.is_func() {
            return Err(OrderingError::FunctionInMomentum);
        }
    }
    Ok(())
}

/// `d/d(carrier)` of a single carrier factor, as a coefficient and factors.
fn differentiate(f: &Factor) -> (ScalarExpr, Vec<Factor>) {
    let s = f.exponent.to_scalar();
    let lowered = Factor::new(f.base.clone(), f.exponent.add_integer(-1));
    match f.base.derivative() {
        Some(d) => (s, vec![lowered, Factor::new(d, ExponentExpr::one())]),
        None => (s, vec![lowered]),
    }
}

fn redexes(factors: &[Factor], moving: &Base) -> Vec<usize> {
    (0..factors.len().saturating_sub(1))
        .filter(|&i| factors[i].base == *moving && factors[i + 1].base != *moving)
        .collect()
}

/// Splits a fully ordered word into its sorted commuting block and the
/// trailing moving power.
fn collect_key(factors: Vec<Factor>, moving: &Base) -> (Vec<Factor>, u32) {
    let mut k = 0u32;
    let mut block: BTreeMap<Base, ExponentExpr> = BTreeMap::new();
    for f in factors {
        if f.base == *moving {
            k += f.exponent.as_integer().expect("validated moving power") as u32;
        } else {
            let e = block.entry(f.base).or_insert_with(ExponentExpr::zero);
            *e = e.add(&f.exponent);
        }
    }
    let block = block
        .into_iter()
        .filter(|(_, e)| !e.is_zero())
        .map(|(b, e)| Factor::new(b, e))
        .collect();
    (block, k)
}

/// Normal-orders `e` with a caller-supplied redex strategy.
pub fn normal_order_with(
    e: &OperatorExpr,
    c: Convention,
    strategy: &mut dyn RewriteStrategy,
) -> Result<NormalForm, OrderingError> {
    for w in e.words() {
        check_word(w, c)?;
    }
    let moving = c.moving();
    let lambda = c.commutator_scale();
    let mut pending: Vec<(ScalarExpr, Vec<Factor>)> = e
        .words()
        .iter()
        .map(|w| (w.coefficient.clone(), w.factors.clone()))
        .collect();
    let mut terms: BTreeMap<(Vec<Factor>, u32), ScalarExpr> = BTreeMap::new();

    while let Some((coeff, factors)) = pending.pop() {
        let candidates = redexes(&factors, &moving);
        if candidates.is_empty() {
            let key = collect_key(factors, &moving);
            let entry = terms.entry(key).or_insert_with(ScalarExpr::zero);
            *entry = entry.add(&coeff);
            continue;
        }
        let i = candidates[strategy.choose(&candidates)];
        let k = factors[i]
            .exponent
            .as_integer()
            .expect("validated moving power");
        let carrier = factors[i + 1].clone();
        let head = &factors[..i];
        let tail = &factors[i + 2..];
        let rest_moving = Factor::new(moving.clone(), ExponentExpr::integer(k - 1));

        // moving^k g = moving^(k-1) g moving + λ moving^(k-1) g′
        let mut swapped = head.to_vec();
        swapped.push(rest_moving.clone());
        swapped.push(carrier.clone());
        swapped.push(Factor::new(moving.clone(), ExponentExpr::one()));
        swapped.extend_from_slice(tail);
        pending.push((coeff.clone(), compact(swapped)));

        let (dcoeff, dfactors) = differentiate(&carrier);
        let c2 = coeff.mul(&lambda).mul(&dcoeff);
        if !c2.is_zero() {
            let mut derived = head.to_vec();
            derived.push(rest_moving);
            derived.extend(dfactors);
            derived.extend_from_slice(tail);
            pending.push((c2, compact(derived)));
        }
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(NormalForm {
        convention: c,
        terms,
    })
}

pub fn normal_order(e: &OperatorExpr, c: Convention) -> Result<NormalForm, OrderingError> {
    normal_order_with(e, c, &mut Leftmost)
}

/// Reverses every word and conjugates its coefficient.
pub fn hermitian_conjugate(e: &OperatorExpr) -> OperatorExpr {
    OperatorExpr::from_words(e.words().iter().filter_map(|w| {
        let mut factors = w.factors.clone();
        factors.reverse();
        OperatorWord::new(w.coefficient.conj(), factors)
    }))
}

/// `(e + e†) / 2`.
pub fn hermitize(e: &OperatorExpr) -> OperatorExpr {
    e.add(&hermitian_conjugate(e))
        .scale(&ScalarExpr::ratio(1, 2))
}

/// `½(c^α m c^β m c^γ + c^γ m c^β m c^α)` with `α + β + γ = 1`.
pub fn build_two_sided(
    exponents: [&ExponentExpr; 3],
    moving: Base,
    carrier: Base,
) -> Result<OperatorExpr, OrderingError> {
    let [a, b, g] = exponents;
    if a.add(b).add(g) != ExponentExpr::one() {
        return Err(OrderingError::ExponentConstraint);
    }
    let valid = matches!(
        (&moving, &carrier),
        (Base::P, Base::X) | (Base::P, Base::Func(..)) | (Base::X, Base::P)
    );
    if !valid {
        return Err(OrderingError::InvalidBases);
    }
    let m = || Factor::new(moving.clone(), ExponentExpr::one());
    let c = |e: &ExponentExpr| Factor::new(carrier.clone(), e.clone());
    let word = OperatorExpr::word(ScalarExpr::one(), vec![c(a), m(), c(b), m(), c(g)]);
    Ok(hermitize(&word))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityReport {
    pub free_params: Vec<ParamSymbol>,
    pub surviving_terms: Vec<OperatorWord>,
    pub ambiguous: bool,
}

/// Words of `n` whose coefficient or exponents depend on a free parameter.
pub fn detect_ambiguity(n: &NormalForm, free: &[ParamSymbol]) -> AmbiguityReport {
    let surviving_terms: Vec<OperatorWord> = n
        .words()
        .into_iter()
        .filter(|w| {
            free.iter().any(|s| {
                w.coefficient.depends_on(s) || w.factors.iter().any(|f| f.exponent.mentions(s))
            })
        })
        .collect();
    AmbiguityReport {
        free_params: free.to_vec(),
        ambiguous: !surviving_terms.is_empty(),
        surviving_terms,
    }
}

/// Decides `a = b` by comparing normal forms.
pub fn prove_equal(
    a: &OperatorExpr,
    b: &OperatorExpr,
    c: Convention,
) -> Result<bool, OrderingError> {
    Ok(normal_order(a, c)? == normal_order(b, c)?)
}

/// Parameters appearing anywhere in a normal form.
pub fn parameters(n: &NormalForm) -> BTreeSet<ParamSymbol> {
    let mut out = BTreeSet::new();
    for (block, _, c) in n.terms() {
        out.extend(c.params());
        for f in block {
            out.extend(f.exponent.linear_part().keys().cloned());
        }
    }
    out
}
