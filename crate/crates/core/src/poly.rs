//! Sparse multivariate polynomials over the Gaussian rationals Q(i).
//!
//! Monomials are kept in lexicographic order on variable names, so the last
//! entry of the term map is the leading term. That order is what the exact
//! division and the primitive-PRS gcd below rely on.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A real parameter symbol such as `alpha`, `E` or `hbar`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamSymbol(String);

impl ParamSymbol {
    pub fn new(name: impl Into<String>) -> Self {
        ParamSymbol(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn hbar() -> Self {
        ParamSymbol::new("hbar")
    }
}

impl fmt::Display for ParamSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ParamSymbol {
    fn from(s: &str) -> Self {
        ParamSymbol::new(s)
    }
}

/// Gaussian rational `a + b i`.
pub type Coeff = Complex<BigRational>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn coeff_real(r: BigRational) -> Coeff {
    Complex::new(r, BigRational::zero())
}

pub fn coeff_int(n: i64) -> Coeff {
    coeff_real(BigRational::from_integer(BigInt::from(n)))
}

pub fn coeff_i() -> Coeff {
    Complex::new(BigRational::zero(), BigRational::one())
}

pub(crate) fn coeff_is_zero(c: &Coeff) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

pub(crate) fn coeff_to_c64(c: &Coeff) -> Complex64 {
    Complex64::new(
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Power product of parameter symbols, sorted by name, every power positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(ParamSymbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(sym: ParamSymbol) -> Self {
        Monomial(vec![(sym, 1)])
    }

    pub fn from_powers(mut powers: Vec<(ParamSymbol, u32)>) -> Self {
        powers.retain(|(_, e)| *e > 0);
        powers.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(ParamSymbol, u32)> = Vec::with_capacity(powers.len());
        for (s, e) in powers {
            match out.last_mut() {
                Some((ls, le)) if *ls == s => *le += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> &[(ParamSymbol, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn degree_in(&self, sym: &ParamSymbol) -> u32 {
        self.0
            .iter()
            .find(|(s, _)| s == sym)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when every power of `other` is dominated.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (s, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *s {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *s {
                let d = other.0[j].1;
                j += 1;
                match e.cmp(&d) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((s.clone(), e - d)),
                }
            } else {
                out.push((s.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Drops `sym`, returning its power and the rest.
    fn split_off(&self, sym: &ParamSymbol) -> (u32, Monomial) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut pow = 0;
        for (s, e) in &self.0 {
            if s == sym {
                pow = *e;
            } else {
                rest.push((s.clone(), *e));
            }
        }
        (pow, Monomial(rest))
    }

    /// Greatest common divisor of two power products.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (s, e) in &self.0 {
            let d = other.degree_in(s);
            if d > 0 {
                out.push((s.clone(), (*e).min(d)));
            }
        }
        Monomial(out)
    }
}

impl Ord for Monomial {
    /// Pure lexicographic order on variable names (`a > b > ...`).
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        o => return o,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Coeff) -> Self {
        Polynomial::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Polynomial::constant(coeff_int(1))
    }

    pub fn var(sym: ParamSymbol) -> Self {
        Polynomial::term(coeff_int(1), Monomial::var(sym))
    }

    pub fn term(c: Coeff, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff_is_zero(&c) {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Coeff> {
        if self.is_zero() {
            return Some(coeff_int(0));
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn vars(&self) -> BTreeSet<ParamSymbol> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(s, _)| s.clone()))
            .collect()
    }

    pub fn degree_in(&self, sym: &ParamSymbol) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_in(sym))
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if coeff_is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = &*existing + c;
                if coeff_is_zero(existing) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        if coeff_is_zero(c) {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_term(&self, c: &Coeff, mono: &Monomial) -> Polynomial {
        if coeff_is_zero(c) {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.mul(mono), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn conj(&self) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.conj()))
                .collect(),
        }
    }

    pub fn derivative(&self, sym: &ParamSymbol) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let (pow, rest) = m.split_off(sym);
            if pow == 0 {
                continue;
            }
            let reduced = rest.mul(&Monomial::from_powers(vec![(sym.clone(), pow - 1)]));
            out.add_term(reduced, c * coeff_int(pow as i64));
        }
        out
    }

    /// Replaces `sym` by the constant `value`.
    pub fn substitute(&self, sym: &ParamSymbol, value: &Coeff) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let (pow, rest) = m.split_off(sym);
            let mut k = c.clone();
            for _ in 0..pow {
                k = k * value;
            }
            out.add_term(rest, k);
        }
        out
    }

    /// Floating evaluation; `None` names the first unbound symbol.
    pub fn eval<F>(&self, lookup: &F) -> Result<Complex64, ParamSymbol>
    where
        F: Fn(&ParamSymbol) -> Option<Complex64>,
    {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = coeff_to_c64(c);
            for (s, e) in &m.0 {
                let x = lookup(s).ok_or_else(|| s.clone())?;
                v *= x.powu(*e);
            }
            total += v;
        }
        Ok(total)
    }

    /// Divides out the leading coefficient so the leading term is monic.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            Some((_, lc)) => {
                let inv = coeff_int(1) / lc;
                self.scale(&inv)
            }
            None => Polynomial::zero(),
        }
    }

    /// Exact multivariate division; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (dm, dc) = divisor.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            rem = rem.sub(&divisor.mul_term(&qc, &qm));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `sym`.
    fn univariate(&self, sym: &ParamSymbol) -> Vec<Polynomial> {
        let deg = self.degree_in(sym) as usize;
        let mut out = vec![Polynomial::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (pow, rest) = m.split_off(sym);
            out[pow as usize].add_term(rest, c.clone());
        }
        out
    }

    fn lead_in(&self, sym: &ParamSymbol) -> Polynomial {
        self.univariate(sym).pop().unwrap_or_default()
    }

    fn content_in(&self, sym: &ParamSymbol) -> Polynomial {
        self.univariate(sym)
            .into_iter()
            .filter(|c| !c.is_zero())
            .fold(Polynomial::zero(), |acc, c| gcd(&acc, &c))
    }

    /// Pseudo-remainder of `self` by `b` as univariate polynomials in `sym`.
    fn pseudo_rem(&self, b: &Polynomial, sym: &ParamSymbol) -> Polynomial {
        let db = b.degree_in(sym);
        let lcb = b.lead_in(sym);
        let mut r = self.clone();
        let mut steps = (self.degree_in(sym) + 1).saturating_sub(db);
        while !r.is_zero() && r.degree_in(sym) >= db && steps > 0 {
            let dr = r.degree_in(sym);
            let shift = Monomial::from_powers(vec![(sym.clone(), dr - db)]);
            let t = r.lead_in(sym).mul_term(&coeff_int(1), &shift);
            r = r.mul(&lcb).sub(&t.mul(b));
            steps -= 1;
        }
        r.mul(&lcb.pow(steps))
    }
}

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one();
    }
    // Pull out the common power product first; cheap and keeps PRS inputs small.
    let mono_a = a
        .terms
        .keys()
        .skip(1)
        .fold(a.terms.keys().next().unwrap().clone(), |g, m| g.gcd(m));
    let mono_b = b
        .terms
        .keys()
        .skip(1)
        .fold(b.terms.keys().next().unwrap().clone(), |g, m| g.gcd(m));
    if !mono_a.is_one() || !mono_b.is_one() {
        let g = mono_a.gcd(&mono_b);
        let one = coeff_int(1);
        let a1 = a.div_exact(&Polynomial::term(one.clone(), mono_a)).unwrap();
        let b1 = b.div_exact(&Polynomial::term(one.clone(), mono_b)).unwrap();
        // a1 and b1 have no monomial divisors, so the power products split off cleanly.
        return Polynomial::term(one, g).mul(&gcd(&a1, &b1)).monic();
    }
    let vars: BTreeSet<ParamSymbol> = a.vars().union(&b.vars()).cloned().collect();
    let v = vars.iter().next().unwrap().clone();
    let (da, db) = (a.degree_in(&v), b.degree_in(&v));
    if da == 0 {
        return gcd(a, &b.content_in(&v));
    }
    if db == 0 {
        return gcd(&a.content_in(&v), b);
    }
    let ca = a.content_in(&v);
    let cb = b.content_in(&v);
    let c = gcd(&ca, &cb);
    let mut pa = a.div_exact(&ca).expect("content divides");
    let mut pb = b.div_exact(&cb).expect("content divides");
    if pa.degree_in(&v) < pb.degree_in(&v) {
        std::mem::swap(&mut pa, &mut pb);
    }
    loop {
        let r = pa.pseudo_rem(&pb, &v);
        if r.is_zero() {
            return c.mul(&pb).monic();
        }
        if r.degree_in(&v) == 0 {
            return c.monic();
        }
        let cr = r.content_in(&v);
        pa = pb;
        pb = r.div_exact(&cr).expect("content divides");
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Splits a coefficient into a sign and a printable magnitude (`None` for 1).
pub(crate) fn coeff_sign_and_body(c: &Coeff) -> (bool, Option<String>) {
    let one = BigRational::one();
    if c.im.is_zero() {
        let neg = c.re.is_negative();
        let mag = c.re.abs();
        if mag == one {
            (neg, None)
        } else {
            (neg, Some(fmt_rational(&mag)))
        }
    } else if c.re.is_zero() {
        let neg = c.im.is_negative();
        let mag = c.im.abs();
        if mag == one {
            (neg, Some("i".to_string()))
        } else {
            (neg, Some(format!("{} * i", fmt_rational(&mag))))
        }
    } else {
        let neg = c.re.is_negative();
        let (re, im) = if neg {
            (-&c.re, -&c.im)
        } else {
            (c.re.clone(), c.im.clone())
        };
        let im_part = if im.abs() == one {
            "i".to_string()
        } else {
            format!("{} * i", fmt_rational(&im.abs()))
        };
        let sep = if im.is_negative() { "-" } else { "+" };
        (
            neg,
            Some(format!("({} {} {})", fmt_rational(&re), sep, im_part)),
        )
    }
}

pub(crate) fn fmt_monomial(m: &Monomial) -> Vec<String> {
    m.0.iter()
        .map(|(s, e)| {
            if *e == 1 {
                s.to_string()
            } else {
                format!("{s}^{e}")
            }
        })
        .collect()
}

/// Display order: ascending total degree, then ascending lex.
pub(crate) fn display_terms(p: &Polynomial) -> Vec<(&Monomial, &Coeff)> {
    let mut v: Vec<_> = p.terms.iter().collect();
    v.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.cmp(b.0)));
    v
}

/// Writes one signed term; `first` controls whether a leading `+` is emitted.
pub(crate) fn fmt_signed_term(out: &mut String, c: &Coeff, factors: &[String], first: bool) {
    let (neg, body) = coeff_sign_and_body(c);
    let mut parts: Vec<String> = Vec::new();
    if let Some(b) = body {
        parts.push(b);
    }
    parts.extend(factors.iter().cloned());
    if parts.is_empty() {
        parts.push("1".to_string());
    }
    match (first, neg) {
        (true, false) => {}
        (true, true) => out.push('-'),
        (false, false) => out.push_str(" + "),
        (false, true) => out.push_str(" - "),
    }
    out.push_str(&parts.join(" * "));
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in display_terms(self).into_iter().enumerate() {
            fmt_signed_term(&mut out, c, &fmt_monomial(m), i == 0);
        }
        f.write_str(&out)
    }
}
