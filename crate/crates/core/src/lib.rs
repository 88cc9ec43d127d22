//! Taylor and q-expansion coefficient extraction by circle quadrature, exact
//! Ramanujan tau series and decay-rate analysis.
//!
//! Coefficients of a function analytic on a disc are recovered from `N`
//! equally spaced samples on a circle `|z| = r`; the result differs from the
//! true `a_n` by the aliased tail `Σ_{m≥1} a_{n+mN} r^{mN}`. The same kernel
//! runs on horizontal lines in the upper half-plane for functions of
//! `q = exp(2πiz)`.
//!
//! ```
//! use qdecay_core::{extract, FunctionSpec, QuadratureGrid};
//!
//! let f = FunctionSpec::geometric(2.0.into()).unwrap();
//! let est = extract(&f, &QuadratureGrid::new(0.5, 32).unwrap(), 3).unwrap();
//! assert!((est.value.re - 0.125).abs() <= est.error_budget());
//! ```

// Guards are written as negated comparisons so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod field;
pub mod function;
pub mod halfplane;
pub mod quadrature;
pub mod series;

pub use analysis::{
    delta_sweep, fit_decay, polynomial_bound_constants, rapid_decay_profile, rp_compare,
    smooth_fourier_decay_check, BoundConstant, DecayModel, DecayOptions, DecayReport, DeltaSweep,
    FitTarget, LogFit, RpComparison, SmoothDecayReport, Trend,
};
pub use error::{Error, Result};
pub use field::{Fixed, Real};
pub use function::{FunctionKind, FunctionSpec};
pub use halfplane::{
    cusp_limit_check, height_invariance_check, height_invariance_series, periodicity_check,
    phi_equivalence_check, phi_equivalence_series, strip_extract, strip_extract_series,
    CuspFunctionSpec, StripGrid,
};
pub use quadrature::{
    aliasing_bound, cross_radius_check, cross_radius_series, default_samples, extract,
    extract_coeff, extract_coeffs, extract_in, extract_series, extract_series_in, sample_circle,
    CoefficientEstimate, GridProvenance, InvarianceCheck, QuadratureGrid, TailBound, TailModel,
};
pub use series::{
    closed_form_coeffs, euler_product_pow, ramanujan_tau, CoefficientSeries, Exactness,
    IntegerQSeries,
};
