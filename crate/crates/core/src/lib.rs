//! Symbolic engine for operator ordering in the Heisenberg algebra, with a
//! numeric layer that checks the resulting eigenfunctions.
//!
//! The symbolic side works over exact Gaussian-rational scalars with `ħ`
//! kept as a parameter. The numeric side evaluates Bessel functions,
//! oscillatory Fourier integrals and ODE residuals in `f64`.

pub mod exponent;
pub mod identities;
pub mod operator;
pub mod ordering;
pub mod parser;
pub mod poly;
pub mod printer;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod verify;

pub use exponent::ExponentExpr;
pub use identities::{IdentityCheck, IdentityOutcome, IdentityRegistry};
pub use operator::{Base, Factor, OperatorExpr, OperatorWord};
pub use ordering::{
    build_two_sided, detect_ambiguity, hermitian_conjugate, hermitize, momentum_rep_ode,
    normal_order, normal_order_with, prove_equal, AmbiguityReport, Convention, NormalForm,
    OrderingError,
};
pub use parser::{parse_operator, ParseError, SourceSpan};
pub use poly::ParamSymbol;
pub use printer::print_operator;
pub use quadrature::{QuadratureError, QuadratureSpec};
pub use scalar::{ScalarError, ScalarExpr};
pub use special::{bessel_first_zero, bessel_j, bessel_j_derivatives, BesselEval, SpecialError};
pub use verify::{
    coordinate_ode_residual, determine_bessel_order, fourier_reconstruct, momentum_ode_residual,
    verify_integral_identity, CoordinateEigenfunction, MomentumEigenfunction, ResidualReport,
    VerifyError,
};
