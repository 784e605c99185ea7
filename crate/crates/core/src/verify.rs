//! Numeric checks of the eigenfunction chain: the momentum-space solution,
//! its Fourier reconstruction, and the coordinate-space Bessel ODE.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{sine_reciprocal_integral, QuadratureError, QuadratureSpec};
use crate::special::{bessel_j, bessel_j_derivatives, SpecialError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("singular point p = 0")]
    SingularPoint,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature failed to converge (estimate {estimate}, error {error:e})")]
    NoConvergence { estimate: Complex64, error: f64 },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quadrature(QuadratureError),
}

fn lift(e: QuadratureError, scale: Complex64) -> VerifyError {
    match e {
        QuadratureError::NoConvergence { estimate, error } => VerifyError::NoConvergence {
            estimate: scale * estimate,
            error: scale.norm() * error,
        },
        other => VerifyError::Quadrature(other),
    }
}

/// `ψ̃(p) = N · exp(iE/(ħp)) / p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumEigenfunction {
    pub energy: f64,
    pub hbar: f64,
    pub normalization: Complex64,
}

impl MomentumEigenfunction {
    pub fn new(energy: f64, hbar: f64) -> Result<Self, VerifyError> {
        if !(energy > 0.0) {
            return Err(VerifyError::Domain("E must be positive".into()));
        }
        if !(hbar > 0.0) {
            return Err(VerifyError::Domain("hbar must be positive".into()));
        }
        Ok(MomentumEigenfunction {
            energy,
            hbar,
            normalization: Complex64::new(1.0, 0.0),
        })
    }

    pub fn with_normalization(mut self, n: Complex64) -> Self {
        self.normalization = n;
        self
    }

    pub fn eval(&self, p: f64) -> Complex64 {
        let phase = Complex64::new(0.0, self.energy / (self.hbar * p)).exp();
        self.normalization * phase / p
    }

    /// `ψ̃′ = ψ̃ · (−iE/(ħp²) − 1/p)`.
    pub fn derivative(&self, p: f64) -> Complex64 {
        let log_d = Complex64::new(-1.0 / p, -self.energy / (self.hbar * p * p));
        self.eval(p) * log_d
    }
}

/// `ψ(x) = A · J_ν(2√(E|x|)/ħ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateEigenfunction {
    pub energy: f64,
    pub hbar: f64,
    pub order: f64,
    pub amplitude: Complex64,
}

impl CoordinateEigenfunction {
    pub fn new(
        energy: f64,
        hbar: f64,
        order: f64,
        amplitude: Complex64,
    ) -> Result<Self, VerifyError> {
        if !(energy > 0.0 && hbar > 0.0) {
            return Err(VerifyError::Domain("E and hbar must be positive".into()));
        }
        if !(order >= 0.0) {
            return Err(VerifyError::Domain("order must be ≥ 0".into()));
        }
        Ok(CoordinateEigenfunction {
            energy,
            hbar,
            order,
            amplitude,
        })
    }

    pub fn argument(&self, x: f64) -> f64 {
        2.0 * (self.energy * x.abs()).sqrt() / self.hbar
    }

    pub fn eval(&self, x: f64) -> Result<Complex64, VerifyError> {
        Ok(self.amplitude * bessel_j(self.order, self.argument(x))?.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub grid: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(grid: Vec<f64>, residuals: Vec<f64>, tolerance: f64) -> Self {
        assert_eq!(grid.len(), residuals.len());
        let max = residuals.iter().copied().fold(0.0, f64::max);
        let mean = if residuals.is_empty() {
            0.0
        } else {
            residuals.iter().sum::<f64>() / residuals.len() as f64
        };
        // NaN residuals must not pass
        let pass = residuals.iter().all(|r| *r <= tolerance);
        ResidualReport {
            grid,
            residuals,
            max,
            mean,
            tolerance,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["point", "residual"])
            .expect("in-memory write");
        for (p, r) in self.grid.iter().zip(&self.residuals) {
            w.write_record([p.to_string(), r.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Largest-term-normalized magnitude of a sum of complex terms.
fn relative_residual(terms: &[Complex64]) -> f64 {
    let sum: Complex64 = terms.iter().sum();
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    sum.norm() / (scale + f64::MIN_POSITIVE)
}

pub const MOMENTUM_TOLERANCE: f64 = 1e-12;

/// Residual of `iħp²ψ̃′ + iħpψ̃ − Eψ̃` relative to its largest term.
pub fn momentum_ode_residual(
    psi: &MomentumEigenfunction,
    grid: &[f64],
) -> Result<ResidualReport, VerifyError> {
    if grid.contains(&0.0) {
        return Err(VerifyError::SingularPoint);
    }
    let ih = Complex64::new(0.0, psi.hbar);
    let residuals = grid
        .iter()
        .map(|&p| {
            let v = psi.eval(p);
            relative_residual(&[ih * p * p * psi.derivative(p), ih * p * v, -psi.energy * v])
        })
        .collect();
    Ok(ResidualReport::new(
        grid.to_vec(),
        residuals,
        MOMENTUM_TOLERANCE,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub x: f64,
    pub value: Complex64,
    pub abs_error: f64,
}

/// `ψ(x) = ∫ ψ̃(p) e^{ipx/ħ} dp` over both momentum sectors.
///
/// Pairing `p` with `−p` folds the sectors into
/// `2iN ∫₀^∞ sin(E/(ħp) + px/ħ) dp/p`.
pub fn fourier_reconstruct(
    psi: &MomentumEigenfunction,
    x: f64,
    q: &QuadratureSpec,
) -> Result<Reconstruction, VerifyError> {
    let scale = 2.0 * Complex64::i() * psi.normalization;
    let r = sine_reciprocal_integral(x / psi.hbar, psi.energy / psi.hbar, q)
        .map_err(|e| lift(e, scale))?;
    Ok(Reconstruction {
        x,
        value: scale * r.value,
        abs_error: scale.norm() * r.abs_error,
    })
}

pub const INTEGRAL_IDENTITY_TOLERANCE: f64 = 1e-6;

/// Both orderings of `∫₀^∞ du/u sin(au)cos(b/u)` and
/// `∫₀^∞ du/u sin(b/u)cos(au)` against `(π/2)·J₀(2(a²b²)^{1/4})`.
/// The report's grid labels the two forms 1 and 2.
pub fn verify_integral_identity(
    a: f64,
    b: f64,
    q: &QuadratureSpec,
) -> Result<ResidualReport, VerifyError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(VerifyError::Domain("a and b must be positive".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let sum = sine_reciprocal_integral(a, b, q)
        .map_err(|e| lift(e, one))?
        .value;
    let diff = sine_reciprocal_integral(a, -b, q)
        .map_err(|e| lift(e, one))?
        .value;
    let target = PI / 2.0 * bessel_j(0.0, 2.0 * (a * b).sqrt())?.value;
    let forms = [0.5 * (sum + diff), 0.5 * (sum - diff)];
    let residuals = forms.iter().map(|f| (f - target).abs()).collect();
    Ok(ResidualReport::new(
        vec![1.0, 2.0],
        residuals,
        INTEGRAL_IDENTITY_TOLERANCE,
    ))
}

pub const COORDINATE_TOLERANCE: f64 = 1e-8;

/// Terms of `x²ψ″ + xψ′ − αγψ + (E/ħ²)xψ` at one point, by the chain rule
/// through `z = 2√(Ex)/ħ` with `dz/dx = z/(2x)`.
fn coordinate_terms(
    psi: &CoordinateEigenfunction,
    alpha_gamma: f64,
    energy: f64,
    hbar: f64,
    x: f64,
) -> Result<[Complex64; 4], VerifyError> {
    let z = psi.argument(x);
    let (j, d1, d2) = bessel_j_derivatives(psi.order, z)?;
    let a = psi.amplitude;
    let x2_psi2 = a * (0.25 * z * z * d2 - 0.25 * z * d1);
    let x_psi1 = a * (0.5 * z * d1);
    Ok([
        x2_psi2,
        x_psi1,
        -alpha_gamma * a * j,
        energy / (hbar * hbar) * x * a * j,
    ])
}

pub fn coordinate_ode_residual(
    psi: &CoordinateEigenfunction,
    alpha_gamma: f64,
    energy: f64,
    hbar: f64,
    grid: &[f64],
) -> Result<ResidualReport, VerifyError> {
    if let Some(x) = grid.iter().find(|x| !(**x > 0.0)) {
        return Err(VerifyError::Domain(format!(
            "grid point x = {x} must be > 0"
        )));
    }
    let residuals = grid
        .iter()
        .map(|&x| {
            coordinate_terms(psi, alpha_gamma, energy, hbar, x).map(|t| relative_residual(&t))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResidualReport::new(
        grid.to_vec(),
        residuals,
        COORDINATE_TOLERANCE,
    ))
}

/// Bessel arguments at which candidate orders are scored.
const ORDER_GRID_Z: [f64; 8] = [0.7, 1.3, 2.1, 3.4, 4.6, 5.9, 7.3, 8.8];

/// The order-scan grid mapped to `x = (ħz/2)²/E`.
pub fn order_grid(energy: f64, hbar: f64) -> Vec<f64> {
    ORDER_GRID_Z
        .iter()
        .map(|z| (hbar * z / 2.0).powi(2) / energy)
        .collect()
}

/// Max coordinate residual of `J_ν` on the order-scan grid.
pub fn order_residual(
    nu: f64,
    alpha_gamma: f64,
    energy: f64,
    hbar: f64,
) -> Result<f64, VerifyError> {
    let psi = CoordinateEigenfunction::new(energy, hbar, nu, Complex64::new(1.0, 0.0))?;
    Ok(coordinate_ode_residual(&psi, alpha_gamma, energy, hbar, &order_grid(energy, hbar))?.max)
}

/// Order `ν ∈ [0, 2]` minimizing the coordinate residual: a coarse scan,
/// then golden-section refinement around the best cell.
pub fn determine_bessel_order(
    alpha_gamma: f64,
    energy: f64,
    hbar: f64,
) -> Result<f64, VerifyError> {
    if !(0.0..=1.0).contains(&alpha_gamma) {
        return Err(VerifyError::Domain(format!(
            "alpha*gamma = {alpha_gamma} outside [0, 1]"
        )));
    }
    let f = |nu: f64| order_residual(nu, alpha_gamma, energy, hbar);
    let step = 0.01;
    let mut best = (0.0, f(0.0)?);
    for i in 1..=200 {
        let nu = i as f64 * step;
        let r = f(nu)?;
        if r < best.1 {
            best = (nu, r);
        }
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(2.0));
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while hi - lo > 1e-12 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    let candidates = [(best.0, best.1), (mid, f(mid)?), (lo, f(lo)?), (hi, f(hi)?)];
    Ok(candidates
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|c| c.0)
        .unwrap_or(mid))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderScanRow {
    pub alpha_gamma: f64,
    pub fitted_order: f64,
    pub derived_order: f64,
    pub printed_order: f64,
    pub fitted_residual: f64,
    pub derived_residual: f64,
    pub printed_residual: f64,
}

/// Compares the fitted order with `2√(αγ)` and with the printed index `αγ`.
pub fn order_scan(alpha_gamma: f64, energy: f64, hbar: f64) -> Result<OrderScanRow, VerifyError> {
    let fitted = determine_bessel_order(alpha_gamma, energy, hbar)?;
    let derived = 2.0 * alpha_gamma.sqrt();
    let r = |nu| order_residual(nu, alpha_gamma, energy, hbar);
    Ok(OrderScanRow {
        alpha_gamma,
        fitted_order: fitted,
        derived_order: derived,
        printed_order: alpha_gamma,
        fitted_residual: r(fitted)?,
        derived_residual: r(derived)?,
        printed_residual: r(alpha_gamma)?,
    })
}

/// First positive zero of the reconstructed `ψ`, bracketed on a grid
/// uniform in `z = 2√(Ex)/ħ` and refined by bisection.
pub fn reconstruction_first_zero(
    psi: &MomentumEigenfunction,
    q: &QuadratureSpec,
) -> Result<f64, VerifyError> {
    let x_of = |z: f64| (psi.hbar * z / 2.0).powi(2) / psi.energy;
    // ψ/(2iN) is real on x > 0
    let g = |x: f64| -> Result<f64, VerifyError> {
        let v = fourier_reconstruct(psi, x, q)?.value / (2.0 * Complex64::i() * psi.normalization);
        Ok(v.re)
    };
    let mut lo = x_of(0.2);
    let mut glo = g(lo)?;
    let mut k = 2;
    let mut hi;
    loop {
        k += 1;
        hi = x_of(0.1 * k as f64);
        let ghi = g(hi)?;
        if ghi.signum() != glo.signum() {
            break;
        }
        lo = hi;
        glo = ghi;
        if k > 200 {
            return Err(VerifyError::Domain(
                "no zero of the reconstruction found".into(),
            ));
        }
    }
    while (hi - lo) > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
