//! Built-in analytic functions on a disc around the origin.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::{Complex, Complex64};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{complex_from_f64, complex_to_f64, modulus, Real};
use crate::series::{ramanujan_tau, IntegerQSeries};

/// Smallest height `Im z` at which Δ is evaluated on the half-plane.
pub const MIN_DELTA_HEIGHT: f64 = 0.01;

/// Largest tail-series order used to evaluate Δ.
pub const MAX_DELTA_ORDER: usize = 8000;

/// `exp(-2π · MIN_DELTA_HEIGHT)`, the matching disc radius.
pub fn delta_evaluation_limit() -> f64 {
    (-TAU * MIN_DELTA_HEIGHT).exp()
}

type BoxedFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A caller-supplied function with a declared radius of analyticity.
/// Only evaluable in binary64 and carries no coefficient oracle.
#[derive(Clone)]
pub struct CustomFunction {
    name: String,
    radius: f64,
    func: BoxedFn,
}

impl CustomFunction {
    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFunction")
            .field("name", &self.name)
            .field("radius", &self.radius)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum FunctionKind {
    Constant(Complex64),
    Monomial(u32),
    /// Coefficients in increasing degree.
    Polynomial(Vec<Complex64>),
    /// `1 / (1 - z/c)`, with `|c| > 1`.
    Geometric(Complex64),
    /// `Σ τ(n) z^n`, the q-expansion of the discriminant.
    Eta24Delta,
    Sum(Box<FunctionSpec>, Box<FunctionSpec>),
    Scale(Complex64, Box<FunctionSpec>),
    /// `z^k · f(z)`.
    Shift(u32, Box<FunctionSpec>),
    Custom(CustomFunction),
}

#[derive(Debug, Clone)]
pub struct FunctionSpec {
    kind: FunctionKind,
    analytic_radius: f64,
}

impl FunctionSpec {
    fn leaf(kind: FunctionKind, analytic_radius: f64) -> Self {
        FunctionSpec {
            kind,
            analytic_radius,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::leaf(FunctionKind::Constant(c), f64::INFINITY)
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::zero())
    }

    pub fn monomial(k: u32) -> Self {
        Self::leaf(FunctionKind::Monomial(k), f64::INFINITY)
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::leaf(FunctionKind::Polynomial(coeffs), f64::INFINITY)
    }

    pub fn geometric(c: Complex64) -> Result<Self> {
        let radius = c.norm();
        if !(radius > 1.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "geometric pole must satisfy 1 < |c| < ∞, got |c| = {radius}"
            )));
        }
        Ok(Self::leaf(FunctionKind::Geometric(c), radius))
    }

    pub fn eta24_delta() -> Self {
        Self::leaf(FunctionKind::Eta24Delta, 1.0)
    }

    pub fn custom<F>(name: impl Into<String>, analytic_radius: f64, func: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self::leaf(
            FunctionKind::Custom(CustomFunction {
                name: name.into(),
                radius: analytic_radius,
                func: Arc::new(func),
            }),
            analytic_radius,
        )
    }

    pub fn sum(self, other: FunctionSpec) -> Self {
        let radius = self.analytic_radius.min(other.analytic_radius);
        Self::leaf(FunctionKind::Sum(Box::new(self), Box::new(other)), radius)
    }

    pub fn scale(self, factor: Complex64) -> Self {
        let radius = self.analytic_radius;
        Self::leaf(FunctionKind::Scale(factor, Box::new(self)), radius)
    }

    pub fn shift(self, k: u32) -> Self {
        let radius = self.analytic_radius;
        Self::leaf(FunctionKind::Shift(k, Box::new(self)), radius)
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    /// Radius of the open disc on which the function is analytic.
    pub fn analytic_radius(&self) -> f64 {
        self.analytic_radius
    }

    /// Largest modulus at which [`FunctionSpec::eval`] is supported. Equal to
    /// the analytic radius except where Δ's truncated series is involved.
    pub fn evaluation_limit(&self) -> f64 {
        match &self.kind {
            FunctionKind::Eta24Delta => delta_evaluation_limit(),
            FunctionKind::Sum(f, g) => f.evaluation_limit().min(g.evaluation_limit()),
            FunctionKind::Scale(_, f) | FunctionKind::Shift(_, f) => f.evaluation_limit(),
            _ => self.analytic_radius,
        }
    }

    pub fn contains_delta(&self) -> bool {
        match &self.kind {
            FunctionKind::Eta24Delta => true,
            FunctionKind::Sum(f, g) => f.contains_delta() || g.contains_delta(),
            FunctionKind::Scale(_, f) | FunctionKind::Shift(_, f) => f.contains_delta(),
            _ => false,
        }
    }

    pub fn eval_f64(&self, z: Complex64) -> Result<Complex64> {
        self.eval(&z)
    }

    pub fn eval<T: Real>(&self, z: &Complex<T>) -> Result<Complex<T>> {
        let m = modulus(z);
        if !(m < self.analytic_radius) {
            return Err(Error::Domain {
                modulus: m,
                radius: self.analytic_radius,
            });
        }
        self.eval_inner(z, m)
    }

    fn eval_inner<T: Real>(&self, z: &Complex<T>, m: f64) -> Result<Complex<T>> {
        Ok(match &self.kind {
            FunctionKind::Constant(c) => complex_from_f64(*c),
            FunctionKind::Monomial(k) => z.powu(*k),
            FunctionKind::Polynomial(coeffs) => {
                coeffs.iter().rev().fold(Complex::zero(), |acc, c| {
                    acc * z.clone() + complex_from_f64(*c)
                })
            }
            FunctionKind::Geometric(c) => {
                let c: Complex<T> = complex_from_f64(*c);
                c.clone() / (c - z.clone())
            }
            FunctionKind::Eta24Delta => eval_delta(z, m)?,
            FunctionKind::Sum(f, g) => f.eval_inner(z, m)? + g.eval_inner(z, m)?,
            FunctionKind::Scale(s, f) => complex_from_f64::<T>(*s) * f.eval_inner(z, m)?,
            FunctionKind::Shift(k, f) => z.powu(*k) * f.eval_inner(z, m)?,
            FunctionKind::Custom(custom) => {
                if !T::IS_BINARY64 {
                    return Err(Error::UnsupportedBackend(
                        format!("custom function `{}`", custom.name),
                        T::NAME,
                    ));
                }
                complex_from_f64((custom.func)(complex_to_f64(z)))
            }
        })
    }

    /// True when `f(0) = 0`.
    pub fn vanishes_at_origin(&self) -> bool {
        self.eval_f64(Complex64::zero())
            .map(|v| v == Complex64::zero())
            .unwrap_or(false)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Constant(c) => write!(f, "constant({c})"),
            FunctionKind::Monomial(k) => write!(f, "monomial({k})"),
            FunctionKind::Polynomial(c) => {
                write!(f, "polynomial(degree {})", c.len().saturating_sub(1))
            }
            FunctionKind::Geometric(c) => write!(f, "geometric({c})"),
            FunctionKind::Eta24Delta => write!(f, "eta24-delta"),
            FunctionKind::Sum(a, b) => write!(f, "({a} + {b})"),
            FunctionKind::Scale(s, a) => write!(f, "{s}·{a}"),
            FunctionKind::Shift(k, a) => write!(f, "z^{k}·{a}"),
            FunctionKind::Custom(c) => write!(f, "{}", c.name),
        }
    }
}

/// Smallest order `T` with `Σ_{n>T} n^6 r^n < tol`. `|τ(n)| ≤ n^6` holds for
/// all n (it is looser than Deligne's `d(n) n^{11/2}`).
pub fn delta_truncation_order(r: f64, tol: f64) -> Result<usize> {
    if r == 0.0 {
        return Ok(1);
    }
    let log_r = r.ln();
    for order in 1..=MAX_DELTA_ORDER {
        let next = (order + 1) as f64;
        let ratio = ((next + 1.0) / next).powi(6) * r;
        if ratio >= 1.0 {
            continue;
        }
        let head = (6.0 * next.ln() + next * log_r).exp();
        if head / (1.0 - ratio) < tol {
            return Ok(order);
        }
    }
    Err(Error::EvaluationLimit {
        function: "eta24-delta",
        modulus: r,
        limit: delta_evaluation_limit(),
    })
}

fn eval_delta<T: Real>(z: &Complex<T>, m: f64) -> Result<Complex<T>> {
    let limit = delta_evaluation_limit();
    if m > limit {
        return Err(Error::EvaluationLimit {
            function: "eta24-delta",
            modulus: m,
            limit,
        });
    }
    let order = delta_truncation_order(m, T::series_tail_tolerance())?;
    let table = delta_table(order);
    let mut acc = Complex::<T>::zero();
    for n in (1..=order).rev() {
        let c = if T::IS_BINARY64 {
            T::from_f64(table.float[n])
        } else {
            T::from_bigint(&table.exact.coeffs()[n])
        };
        acc = acc * z.clone() + Complex::new(c, T::zero());
    }
    Ok(acc * z.clone())
}

pub(crate) struct DeltaTable {
    pub exact: IntegerQSeries,
    pub float: Vec<f64>,
}

static DELTA_TABLE: Mutex<Option<Arc<DeltaTable>>> = Mutex::new(None);

/// τ(0..=order), cached across calls and grown geometrically.
pub(crate) fn delta_table(order: usize) -> Arc<DeltaTable> {
    let mut guard = DELTA_TABLE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(table) = guard.as_ref() {
        if table.exact.truncation_order() >= order {
            return Arc::clone(table);
        }
    }
    let current = guard.as_ref().map_or(0, |t| t.exact.truncation_order());
    let target = order.max(2 * current).max(256);
    let exact = ramanujan_tau(target).expect("target is positive");
    let float = exact.to_f64();
    let table = Arc::new(DeltaTable { exact, float });
    *guard = Some(Arc::clone(&table));
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fixed;
    use num_traits::One;

    /// Δ from the product `q ∏ (1 - q^n)^24` in binary64.
    fn delta_product(q: Complex64) -> Complex64 {
        let mut prod = Complex64::one();
        let mut qn = q;
        while qn.norm() > 1e-18 {
            prod *= (Complex64::one() - qn).powu(24);
            qn *= q;
        }
        q * prod
    }

    #[test]
    fn radii_of_built_ins() {
        assert_eq!(
            FunctionSpec::geometric(2.0.into())
                .unwrap()
                .analytic_radius(),
            2.0
        );
        assert_eq!(FunctionSpec::monomial(3).analytic_radius(), f64::INFINITY);
        assert_eq!(FunctionSpec::eta24_delta().analytic_radius(), 1.0);
        let mixed = FunctionSpec::geometric(3.0.into())
            .unwrap()
            .sum(FunctionSpec::geometric(Complex64::new(0.0, 1.5)).unwrap());
        assert_eq!(mixed.analytic_radius(), 1.5);
        assert!(FunctionSpec::geometric(0.5.into()).is_err());
        assert!(FunctionSpec::geometric(1.0.into()).is_err());
    }

    #[test]
    fn evaluation_outside_radius_is_a_domain_error() {
        let g = FunctionSpec::geometric(2.0.into()).unwrap();
        let err = g.eval_f64(Complex64::new(2.5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
        assert!(err.is_numerical_guard());
        assert!((g.eval_f64(Complex64::new(-0.5, 0.0)).unwrap() - 0.8).norm() < 1e-15);
    }

    #[test]
    fn delta_series_matches_product_formula() {
        for (r, theta) in [(0.1, 0.3), (0.5, 1.0), (0.8, 2.5), (0.93, -1.2)] {
            let q = Complex64::from_polar(r, theta);
            let series = FunctionSpec::eta24_delta().eval_f64(q).unwrap();
            let product = delta_product(q);
            let scale = product.norm().max(1.0);
            assert!(
                (series - product).norm() < 1e-9 * scale,
                "r={r}: {series} vs {product}"
            );
        }
    }

    #[test]
    fn delta_rejects_moduli_past_the_height_guard() {
        let err = FunctionSpec::eta24_delta()
            .eval_f64(Complex64::new(0.95, 0.0))
            .unwrap_err();
        assert!(matches!(err, Error::EvaluationLimit { .. }));
        assert!(FunctionSpec::eta24_delta()
            .eval_f64(Complex64::new(0.939, 0.0))
            .is_ok());
    }

    #[test]
    fn tau_is_bounded_by_n_to_the_sixth() {
        let table = delta_table(2000);
        for n in 1..=2000 {
            assert!(table.float[n].abs() <= (n as f64).powi(6), "n = {n}");
        }
    }

    #[test]
    fn truncation_order_meets_tolerance() {
        for r in [0.2, 0.5, 0.73, 0.9] {
            let order = delta_truncation_order(r, 1e-14).unwrap();
            let tail: f64 = (order + 1..order + 20_000)
                .map(|n| (n as f64).powi(6) * r.powi(n as i32))
                .sum();
            assert!(tail < 1e-14, "r={r}, order={order}, tail={tail}");
            let shorter: f64 = (order..order + 20_000)
                .map(|n| (n as f64).powi(6) * r.powi(n as i32))
                .sum();
            assert!(
                shorter >= 1e-14 * 0.5,
                "order {order} is far from minimal for r={r}"
            );
        }
    }

    #[test]
    fn extended_evaluation_agrees_with_binary64() {
        let f = FunctionSpec::polynomial(vec![3.0.into(), 0.0.into(), 1.0.into()]).sum(
            FunctionSpec::geometric(Complex64::new(1.5, 1.0))
                .unwrap()
                .shift(2),
        );
        let z = Complex64::new(0.3, -0.4);
        let wide = f.eval(&complex_from_f64::<Fixed>(z)).unwrap();
        assert!((complex_to_f64(&wide) - f.eval_f64(z).unwrap()).norm() < 1e-14);
        let d = FunctionSpec::eta24_delta();
        let z = Complex64::new(0.2, 0.1);
        let wide = d.eval(&complex_from_f64::<Fixed>(z)).unwrap();
        assert!((complex_to_f64(&wide) - d.eval_f64(z).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn custom_functions_stay_in_binary64() {
        let f = FunctionSpec::custom("exp", f64::INFINITY, |z| z.exp());
        assert!((f.eval_f64(Complex64::new(1.0, 0.0)).unwrap().re - 1f64.exp()).abs() < 1e-15);
        let err = f.eval(&complex_from_f64::<Fixed>(Complex64::new(1.0, 0.0)));
        assert!(matches!(err, Err(Error::UnsupportedBackend(..))));
    }

    #[test]
    fn vanishing_at_origin() {
        assert!(FunctionSpec::eta24_delta().vanishes_at_origin());
        assert!(FunctionSpec::monomial(1).vanishes_at_origin());
        assert!(!FunctionSpec::geometric(2.0.into())
            .unwrap()
            .vanishes_at_origin());
    }
}
