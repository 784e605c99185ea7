//! Oscillatory integrals of the form `∫₀^∞ sin(a·u + b/u) du/u`.
//!
//! The integrand oscillates without decay at both ends. The range is split
//! at `p₀ = √(|b|/a)`, where the phase is stationary. Below `p₀` the
//! substitution `u = |b|/p` turns the essential singularity at `0⁺` into a
//! second tail at infinity. Each tail is cut at zeros of its phase into
//! half-period panels, and the alternating partial sums are accelerated
//! with Wynn's epsilon algorithm.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable that overrides [`QuadratureSpec::max_subdivisions`].
pub const MAX_SUBDIV_ENV: &str = "QORDER_MAX_SUBDIV";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature failed to converge (estimate {estimate:e}, error {error:e})")]
    NoConvergence { estimate: f64, error: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Cap on half-period panels per tail.
    pub max_subdivisions: usize,
    /// Panels beyond this abscissa are never evaluated.
    pub p_max: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 400,
            p_max: 1e8,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: usize,
        p_max: f64,
    ) -> Result<Self, QuadratureError> {
        let q = QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
            p_max,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec(
                "tolerances must be positive".into(),
            ));
        }
        if !(self.p_max > 0.0) {
            return Err(QuadratureError::InvalidSpec(
                "P_max must be positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidSpec(
                "max subdivisions must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Applies `QORDER_MAX_SUBDIV` when it holds a positive integer.
    pub fn with_env_override(mut self) -> Self {
        if let Some(n) = std::env::var(MAX_SUBDIV_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            self.max_subdivisions = n;
        }
        self
    }

    fn tolerance_for(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
}

impl Quadrature {
    fn scaled(self, s: f64) -> Quadrature {
        Quadrature {
            value: s * self.value,
            abs_error: s.abs() * self.abs_error,
        }
    }

    fn plus(self, o: Quadrature) -> Quadrature {
        Quadrature {
            value: self.value + o.value,
            abs_error: self.abs_error + o.abs_error,
        }
    }
}

const GL_ORDER: usize = 15;
const MAX_DEPTH: u32 = 40;

/// Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    h * rule().iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>()
}

/// Adaptive bisection on a fixed Gauss–Legendre rule. The bool is false
/// when the depth limit was hit before `tol` was met.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (Quadrature, bool) {
    fn go<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> (Quadrature, bool) {
        let m = 0.5 * (a + b);
        let left = fixed(f, a, m);
        let right = fixed(f, m, b);
        let err = (left + right - whole).abs();
        if err <= tol || depth == 0 || m <= a || m >= b {
            let q = Quadrature {
                value: left + right,
                abs_error: err,
            };
            return (q, err <= tol);
        }
        let (l, lok) = go(f, a, m, left, 0.5 * tol, depth - 1);
        let (r, rok) = go(f, m, b, right, 0.5 * tol, depth - 1);
        (l.plus(r), lok && rok)
    }
    if a == b {
        return (
            Quadrature {
                value: 0.0,
                abs_error: 0.0,
            },
            true,
        );
    }
    let whole = fixed(f, a, b);
    go(f, a, b, whole, tol, MAX_DEPTH)
}

/// Wynn's epsilon algorithm; returns the deepest even-column entry.
pub fn wynn_epsilon(s: &[f64]) -> f64 {
    let Some(&last) = s.last() else {
        return 0.0;
    };
    let mut prev = vec![0.0; s.len() + 1];
    let mut cur = s.to_vec();
    let mut best = last;
    let mut col = 0usize;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                return if col % 2 == 0 {
                    cur[cur.len() - 1]
                } else {
                    best
                };
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            best = cur[cur.len() - 1];
        }
    }
    best
}

const WYNN_WINDOW: usize = 24;

/// `∫_{t0}^∞ sin(k·t + m/t) dt/t` for `k > 0` and `k·t0² ≥ m`, so the
/// phase is nondecreasing on the range.
fn tail(
    k: f64,
    m: f64,
    t0: f64,
    tol: f64,
    q: &QuadratureSpec,
) -> Result<Quadrature, QuadratureError> {
    let phase = |t: f64| k * t + m / t;
    let f = |t: f64| phase(t).sin() / t;
    let zero = |j: f64| {
        let jp = j * PI;
        let disc = (jp * jp - 4.0 * k * m).max(0.0);
        ((jp + disc.sqrt()) / (2.0 * k)).max(t0)
    };
    let panel_tol = (tol * 1e-2).max(1e-16);
    let mut j = (phase(t0) / PI).ceil();
    let mut left = t0;
    let mut sums: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut panel_err = 0.0;
    let mut estimates: Vec<f64> = Vec::new();
    loop {
        let right = zero(j);
        let (piece, _) = adaptive(&f, left, right, panel_tol);
        total += piece.value;
        panel_err += piece.abs_error;
        sums.push(total);
        left = right;
        j += 1.0;
        if sums.len() >= 4 {
            let start = sums.len().saturating_sub(WYNN_WINDOW);
            estimates.push(wynn_epsilon(&sums[start..]));
            if let [.., e2, e1, e0] = estimates[..] {
                let err = (e0 - e1).abs().max((e0 - e2).abs()) + panel_err;
                if err <= tol {
                    return Ok(Quadrature {
                        value: e0,
                        abs_error: err,
                    });
                }
            }
        }
        if sums.len() >= q.max_subdivisions || left > q.p_max {
            let estimate = estimates.last().copied().unwrap_or(total);
            let error = match estimates[..] {
                [.., e1, e0] => (e0 - e1).abs() + panel_err,
                _ => f64::INFINITY,
            };
            return Err(QuadratureError::NoConvergence { estimate, error });
        }
    }
}

/// `∫₀^∞ sin v dv/v` evaluated numerically as a finite panel plus a tail.
fn dirichlet(tol: f64, q: &QuadratureSpec) -> Result<Quadrature, QuadratureError> {
    let sinc = |v: f64| if v == 0.0 { 1.0 } else { v.sin() / v };
    let (head, _) = adaptive(&sinc, 0.0, PI, tol * 1e-2);
    Ok(head.plus(tail(1.0, 0.0, PI, 0.5 * tol, q)?))
}

/// `∫₀^∞ sin(a·u + b/u) du/u` for real `a`, `b`.
pub fn sine_reciprocal_integral(
    a: f64,
    b: f64,
    q: &QuadratureSpec,
) -> Result<Quadrature, QuadratureError> {
    q.validate()?;
    let tol = q.tolerance_for(PI / 2.0);
    if a < 0.0 {
        return sine_reciprocal_integral(-a, -b, q).map(|r| r.scaled(-1.0));
    }
    if a == 0.0 && b == 0.0 {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    if a == 0.0 || b == 0.0 {
        // substitution v = |b|/u (or v = a·u) leaves a Dirichlet integral
        let sign = if a == 0.0 { b.signum() } else { 1.0 };
        return dirichlet(tol, q).map(|r| r.scaled(sign));
    }
    let p0 = (b.abs() / a).sqrt();
    let outer = tail(a, b, p0, 0.5 * tol, q)?;
    let inner = tail(1.0, a * b, (a * b.abs()).sqrt(), 0.5 * tol, q)?.scaled(b.signum());
    Ok(outer.plus(inner))
}
