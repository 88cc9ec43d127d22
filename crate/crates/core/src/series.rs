//! Exact truncated power series over the integers, and closed-form
//! coefficient tables for the built-in functions.
//!
//! Every operation takes its truncation order explicitly. Asking for more
//! terms than an input carries is an error, never a silent truncation.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{FunctionKind, FunctionSpec};

/// Power series `Σ_{n ≤ N} c_n q^n` with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerQSeries {
    coeffs: Vec<BigInt>,
}

impl IntegerQSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a series needs at least the constant coefficient".into(),
            ));
        }
        Ok(IntegerQSeries { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        IntegerQSeries {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&BigInt> {
        self.coeffs.get(n)
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Drops terms above `order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        check_order(order, self.truncation_order())?;
        Ok(IntegerQSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    /// Multiplies by `q^k`, keeping the truncation order.
    pub fn shift(&self, k: usize) -> Self {
        let order = self.truncation_order();
        let mut out = Self::zero(order);
        for (n, c) in self.coeffs.iter().enumerate() {
            if n + k > order {
                break;
            }
            out.coeffs[n + k] = c.clone();
        }
        out
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

fn check_order(requested: usize, available: usize) -> Result<()> {
    if requested > available {
        Err(Error::Truncation {
            requested,
            available,
        })
    } else {
        Ok(())
    }
}

/// `c_k = Σ_{i+j=k} a_i b_j` for `k ≤ order`.
pub fn poly_mul_truncated(
    a: &IntegerQSeries,
    b: &IntegerQSeries,
    order: usize,
) -> Result<IntegerQSeries> {
    check_order(order, a.truncation_order())?;
    check_order(order, b.truncation_order())?;
    let (a, b) = (&a.coeffs, &b.coeffs);
    let coeffs = (0..=order)
        .into_par_iter()
        .map(|k| {
            let mut acc = BigInt::zero();
            for i in 0..=k {
                if a[i].is_zero() || b[k - i].is_zero() {
                    continue;
                }
                acc += &a[i] * &b[k - i];
            }
            acc
        })
        .collect();
    Ok(IntegerQSeries { coeffs })
}

/// Truncated square, using the symmetry of the convolution.
fn square_truncated(a: &IntegerQSeries, order: usize) -> IntegerQSeries {
    let a = &a.coeffs;
    let coeffs = (0..=order)
        .into_par_iter()
        .map(|k| {
            let mut acc = BigInt::zero();
            for i in 0..k.div_ceil(2) {
                if a[i].is_zero() || a[k - i].is_zero() {
                    continue;
                }
                acc += &a[i] * &a[k - i];
            }
            acc <<= 1;
            if k % 2 == 0 {
                let mid = &a[k / 2];
                acc += mid * mid;
            }
            acc
        })
        .collect();
    IntegerQSeries { coeffs }
}

/// `∏_{n ≥ 1} (1 - q^n)` to the given order, from the pentagonal number
/// theorem.
pub fn pentagonal_series(order: usize) -> IntegerQSeries {
    let mut out = IntegerQSeries::one(order);
    for k in 1usize.. {
        let lower = k * (3 * k - 1) / 2;
        if lower > order {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        out.coeffs[lower] = BigInt::from(sign);
        let upper = k * (3 * k + 1) / 2;
        if upper <= order {
            out.coeffs[upper] = BigInt::from(sign);
        }
    }
    out
}

/// Coefficients of `∏_{n=1}^{order} (1 - q^n)^exponent` up to `q^order`.
///
/// Raises the pentagonal series to the power by repeated squaring, so
/// exponent 24 costs four squarings and one product.
pub fn euler_product_pow(exponent: u32, order: usize) -> IntegerQSeries {
    let mut base = pentagonal_series(order);
    let mut acc: Option<IntegerQSeries> = None;
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(prev) => poly_mul_truncated(&prev, &base, order)
                    .expect("operands share the truncation order"),
            });
        }
        e >>= 1;
        if e > 0 {
            base = square_truncated(&base, order);
        }
    }
    acc.unwrap_or_else(|| IntegerQSeries::one(order))
}

/// Same product, one factor `(1 - q^n)` at a time. Quadratic in the order
/// and linear in the exponent; kept as a reference for the fast path.
pub fn euler_product_pow_naive(exponent: u32, order: usize) -> IntegerQSeries {
    let mut out = IntegerQSeries::one(order);
    for n in 1..=order {
        for _ in 0..exponent {
            for k in (n..=order).rev() {
                let prev = out.coeffs[k - n].clone();
                out.coeffs[k] -= prev;
            }
        }
    }
    out
}

/// Coefficients of `Δ = q ∏ (1 - q^n)^24` for indices `0..=max_n`, so that
/// `coeff(n)` is `τ(n)` and `coeff(0)` is zero.
pub fn ramanujan_tau(max_n: usize) -> Result<IntegerQSeries> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    Ok(euler_product_pow(24, max_n - 1).shift_into(max_n))
}

/// [`ramanujan_tau`] through the naive product.
pub fn ramanujan_tau_naive(max_n: usize) -> Result<IntegerQSeries> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    Ok(euler_product_pow_naive(24, max_n - 1).shift_into(max_n))
}

impl IntegerQSeries {
    /// Multiplies by `q`, extending the order by one.
    fn shift_into(self, order: usize) -> IntegerQSeries {
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(BigInt::zero());
        coeffs.extend(self.coeffs.into_iter().take(order));
        IntegerQSeries { coeffs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    ExactInteger,
    Floating,
}

/// Coefficients `a_0..=a_N` of a function, either exact integers or
/// binary64 complex values.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSeries {
    Exact(IntegerQSeries),
    Floating(Vec<Complex64>),
}

impl CoefficientSeries {
    pub fn exactness(&self) -> Exactness {
        match self {
            CoefficientSeries::Exact(_) => Exactness::ExactInteger,
            CoefficientSeries::Floating(_) => Exactness::Floating,
        }
    }

    pub fn truncation_order(&self) -> usize {
        match self {
            CoefficientSeries::Exact(s) => s.truncation_order(),
            CoefficientSeries::Floating(v) => v.len() - 1,
        }
    }

    pub fn get(&self, n: usize) -> Option<Complex64> {
        match self {
            CoefficientSeries::Exact(s) => s
                .coeff(n)
                .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)),
            CoefficientSeries::Floating(v) => v.get(n).copied(),
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            CoefficientSeries::Exact(s) => s
                .to_f64()
                .into_iter()
                .map(|c| Complex64::new(c, 0.0))
                .collect(),
            CoefficientSeries::Floating(v) => v.clone(),
        }
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.to_complex().iter().map(|c| c.norm()).collect()
    }

    fn into_floating(self) -> Vec<Complex64> {
        match self {
            CoefficientSeries::Floating(v) => v,
            exact => exact.to_complex(),
        }
    }
}

/// Closed-form coefficients `a_0..=a_max_n` of a built-in function.
pub fn closed_form_coeffs(spec: &FunctionSpec, max_n: usize) -> Result<CoefficientSeries> {
    use CoefficientSeries::{Exact, Floating};
    let len = max_n + 1;
    Ok(match spec.kind() {
        FunctionKind::Constant(c) => {
            let mut v = vec![Complex64::zero(); len];
            v[0] = *c;
            Floating(v)
        }
        FunctionKind::Monomial(k) => {
            let mut s = IntegerQSeries::zero(max_n);
            if let Some(c) = s.coeffs.get_mut(*k as usize) {
                *c = BigInt::one();
            }
            Exact(s)
        }
        FunctionKind::Polynomial(coeffs) => {
            let mut v = vec![Complex64::zero(); len];
            for (dst, src) in v.iter_mut().zip(coeffs) {
                *dst = *src;
            }
            Floating(v)
        }
        FunctionKind::Geometric(c) => {
            let mut v = Vec::with_capacity(len);
            let mut term = Complex64::one();
            for _ in 0..len {
                v.push(term);
                term /= c;
            }
            Floating(v)
        }
        FunctionKind::Eta24Delta => Exact(ramanujan_tau(max_n.max(1))?.truncate(max_n)?),
        FunctionKind::Sum(f, g) => {
            match (closed_form_coeffs(f, max_n)?, closed_form_coeffs(g, max_n)?) {
                (Exact(a), Exact(b)) => Exact(IntegerQSeries {
                    coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
                }),
                (a, b) => Floating(
                    a.into_floating()
                        .into_iter()
                        .zip(b.into_floating())
                        .map(|(x, y)| x + y)
                        .collect(),
                ),
            }
        }
        FunctionKind::Scale(s, f) => Floating(
            closed_form_coeffs(f, max_n)?
                .into_floating()
                .into_iter()
                .map(|x| s * x)
                .collect(),
        ),
        FunctionKind::Shift(k, f) => {
            let k = *k as usize;
            match closed_form_coeffs(f, max_n)? {
                Exact(s) => Exact(s.shift(k)),
                Floating(v) => {
                    let mut out = vec![Complex64::zero(); len];
                    for (n, c) in v.into_iter().enumerate().take(len.saturating_sub(k)) {
                        out[n + k] = c;
                    }
                    Floating(out)
                }
            }
        }
        FunctionKind::Custom(custom) => {
            return Err(Error::UnsupportedOracle(format!(
                "custom function `{}`",
                custom.name()
            )))
        }
    })
}
