//! Bessel functions of the first kind for real order and real argument.
//!
//! For `z ≤ 30` the power series is summed in double-double arithmetic.
//! Terms peak near `k ≈ z/2` at about `10¹¹` for `z = 30`, so plain `f64`
//! accumulation would lose five digits; the extra 53 bits keep the summed
//! series at full `f64` accuracy. Beyond `z = 30` the Hankel asymptotic
//! expansion is used.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("domain error: {0}")]
    Domain(String),
}

/// Largest argument accepted by the evaluators.
pub const MAX_ARGUMENT: f64 = 1.0e4;
const SERIES_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: f64,
    pub argument: f64,
    pub value: f64,
    pub abs_error_bound: f64,
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn norm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        DoubleDouble::norm(s, e + f)
    }

    fn mul(self, o: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, o.hi);
        DoubleDouble::norm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: DoubleDouble) -> DoubleDouble {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(DoubleDouble::from(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(DoubleDouble::from(-q2)));
        let q3 = r.hi / o.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble { hi: q1, lo: q2 }.add(DoubleDouble::from(q3))
    }

    fn neg(self) -> DoubleDouble {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn abs(self) -> f64 {
        self.hi.abs()
    }
}

/// Lanczos coefficients for `g = 7`, nine terms (relative error ≲ 2e-15).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real `x` (poles return `±∞`).
pub fn gamma(x: f64) -> f64 {
    if x == x.floor() {
        if x <= 0.0 {
            return f64::INFINITY;
        }
        if x <= 23.0 {
            return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
        }
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Relative accuracy assumed for the `(z/2)^μ / Γ(μ+1)` prefactor.
const PREFACTOR_REL: f64 = 1.0e-14;
/// Unit roundoff of double-double arithmetic, padded.
const DD_EPS: f64 = 1.0e-31;

fn series(mu: f64, z: f64) -> BesselEval {
    let half = z / 2.0;
    let q = {
        let (p, e) = two_prod(half, half);
        DoubleDouble { hi: p, lo: e }
    };
    let mut term = DoubleDouble::from(1.0);
    let mut sum = DoubleDouble::from(1.0);
    let mut abs_sum = 1.0;
    let mut k = 0u32;
    let tail = loop {
        let kk = (k + 1) as f64;
        let (s, e) = two_sum(kk, mu);
        let shifted = DoubleDouble::norm(s, e);
        let denom = shifted.mul(DoubleDouble::from(kk));
        term = term.mul(q).div(denom).neg();
        k += 1;
        let past_peak = kk * (kk + mu) > q.hi && kk + mu > 0.0;
        if past_peak && (term.abs() <= DD_EPS * sum.abs() || term.abs() < 1e-300) {
            break term.abs();
        }
        sum = sum.add(term);
        abs_sum += term.abs();
        if k > 500 {
            break term.abs();
        }
    };
    let pref = half.powf(mu) / gamma(mu + 1.0);
    let s = sum.hi + sum.lo;
    let value = pref * s;
    let round = abs_sum * (k as f64 + 4.0) * DD_EPS;
    let bound = pref.abs() * (tail + round) + value.abs() * PREFACTOR_REL;
    BesselEval {
        order: mu,
        argument: z,
        value,
        abs_error_bound: bound,
    }
}

fn asymptotic(mu: f64, z: f64) -> BesselEval {
    let mu4 = 4.0 * mu * mu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut omitted = 0.0;
    for k in 1..60u32 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu4 - odd * odd) / (8.0 * k as f64 * z);
        if next.abs() >= term.abs() && k > 2 {
            omitted = term.abs();
            break;
        }
        term = next;
        // signs follow (−1)^⌊k/2⌋ inside P (even k) and Q (odd k)
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            omitted = term.abs();
            break;
        }
    }
    let chi = z - (mu / 2.0 + 0.25) * PI;
    let amp = (2.0 / (PI * z)).sqrt();
    let value = amp * (p * chi.cos() - q * chi.sin());
    let phase_err = 4.0 * f64::EPSILON * z * (p.abs() + q.abs());
    let bound = amp * (omitted + phase_err + 4.0 * f64::EPSILON * (p.abs() + q.abs()));
    BesselEval {
        order: mu,
        argument: z,
        value,
        abs_error_bound: bound,
    }
}

fn check_argument(z: f64) -> Result<(), SpecialError> {
    if !z.is_finite() || z < 0.0 {
        return Err(SpecialError::Domain(format!("argument {z} must be ≥ 0")));
    }
    if z > MAX_ARGUMENT {
        return Err(SpecialError::Domain(format!(
            "argument {z} exceeds {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

/// `J_μ(z)` for any real order, including negative orders (needed by the
/// derivative recurrences). `z = 0` is rejected for negative non-integer μ.
pub fn bessel_j_real_order(mu: f64, z: f64) -> Result<BesselEval, SpecialError> {
    if !mu.is_finite() {
        return Err(SpecialError::Domain(format!("order {mu} must be finite")));
    }
    check_argument(z)?;
    if mu < 0.0 && mu == mu.floor() {
        let n = -mu;
        let sign = if n % 2.0 == 0.0 { 1.0 } else { -1.0 };
        let e = bessel_j_real_order(n, z)?;
        return Ok(BesselEval {
            order: mu,
            value: sign * e.value,
            ..e
        });
    }
    if z == 0.0 {
        if mu < 0.0 {
            return Err(SpecialError::Domain(format!("J_{mu}(0) is unbounded")));
        }
        let value = if mu == 0.0 { 1.0 } else { 0.0 };
        return Ok(BesselEval {
            order: mu,
            argument: z,
            value,
            abs_error_bound: 0.0,
        });
    }
    Ok(if z <= SERIES_LIMIT {
        series(mu, z)
    } else {
        asymptotic(mu, z)
    })
}

/// `J_ν(z)` for `ν ≥ 0`, `0 ≤ z ≤ 10⁴`.
pub fn bessel_j(nu: f64, z: f64) -> Result<BesselEval, SpecialError> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(SpecialError::Domain(format!("order {nu} must be ≥ 0")));
    }
    bessel_j_real_order(nu, z)
}

/// `(J_ν, J_ν′, J_ν″)`. The first derivative comes from
/// `J_ν′ = (J_{ν−1} − J_{ν+1})/2`, the second from Bessel's equation.
pub fn bessel_j_derivatives(nu: f64, z: f64) -> Result<(f64, f64, f64), SpecialError> {
    let j = bessel_j(nu, z)?.value;
    if z == 0.0 {
        return if nu == 0.0 {
            Ok((1.0, 0.0, -0.5))
        } else if nu == 1.0 {
            Ok((0.0, 0.5, 0.0))
        } else if nu == 2.0 {
            Ok((0.0, 0.0, 0.25))
        } else if nu > 2.0 {
            Ok((0.0, 0.0, 0.0))
        } else {
            Err(SpecialError::Domain(format!(
                "derivative of J_{nu} is unbounded at z = 0"
            )))
        };
    }
    let lower = bessel_j_real_order(nu - 1.0, z)?.value;
    let upper = bessel_j_real_order(nu + 1.0, z)?.value;
    let d1 = 0.5 * (lower - upper);
    let d2 = -(z * d1 + (z * z - nu * nu) * j) / (z * z);
    Ok((j, d1, d2))
}

/// Smallest positive zero of `J_ν`, `0 ≤ ν ≤ 2`, by bracketing and bisection.
pub fn bessel_first_zero(nu: f64) -> Result<f64, SpecialError> {
    if !(0.0..=2.0).contains(&nu) {
        return Err(SpecialError::Domain(format!(
            "first-zero search supports 0 ≤ ν ≤ 2, got {nu}"
        )));
    }
    let f = |z: f64| bessel_j(nu, z).map(|e| e.value);
    let step = 0.05;
    let mut lo = 0.5;
    let mut flo = f(lo)?;
    let mut hi = lo + step;
    let mut fhi = f(hi)?;
    while flo.signum() == fhi.signum() {
        lo = hi;
        flo = fhi;
        hi += step;
        fhi = f(hi)?;
        if hi > 10.0 {
            return Err(SpecialError::Domain("no sign change found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
