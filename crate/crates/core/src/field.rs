//! Scalar fields for circle quadrature.
//!
//! Extraction divides the discrete Fourier coefficient by `r^n`, so a
//! coefficient that is small relative to the sampled values loses
//! `log10(r^-n)` digits. [`Real`] abstracts the scalar so the same extraction
//! code runs in binary64 or in the [`Fixed`] extended-precision backend.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_traits::{Num, One, ToPrimitive, Zero};
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub trait Real:
    Clone + fmt::Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const NAME: &'static str;
    const IS_BINARY64: bool;

    fn from_f64(x: f64) -> Self;
    fn from_bigint(x: &BigInt) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;

    /// Unit roundoff, as a binary64 value.
    fn epsilon() -> f64;

    /// Largest `r^-n` rescaling that still leaves meaningful digits.
    fn max_amplification() -> f64;

    /// Target tail mass when a power series is truncated for evaluation.
    fn series_tail_tolerance() -> f64;

    /// `exp(2πij/n)` for `j = 0..n`.
    fn roots_of_unity(n: usize) -> Result<Vec<Complex<Self>>> {
        if !n.is_power_of_two() {
            return Err(Error::UnsupportedBackend(
                format!("{n}-point grids (power of two required)"),
                Self::NAME,
            ));
        }
        let mut roots = Vec::with_capacity(n);
        roots.push(Complex::one());
        if n == 1 {
            return Ok(roots);
        }
        // Start from exp(iπ) and halve the angle until it is 2π/n.
        let two = Self::one() + Self::one();
        let mut cos = -Self::one();
        let mut sin = Self::zero();
        let mut m = 2;
        while m < n {
            let c = ((Self::one() + cos.clone()) / two.clone()).sqrt();
            let s = ((Self::one() - cos) / two.clone()).sqrt();
            cos = c;
            sin = s;
            m *= 2;
        }
        let step = Complex::new(cos, sin);
        for j in 1..n {
            let next = roots[j - 1].clone() * step.clone();
            roots.push(next);
        }
        Ok(roots)
    }

    /// Forward DFT: `X_k = Σ_j x_j exp(-2πijk/n)`.
    fn spectrum(samples: &[Complex<Self>]) -> Result<Vec<Complex<Self>>> {
        let n = samples.len();
        let roots = Self::roots_of_unity(n)?;
        if n.is_power_of_two() {
            let mut out = samples.to_vec();
            radix2_in_place(&mut out, &roots);
            Ok(out)
        } else {
            Ok(naive_dft(samples, &roots))
        }
    }
}

fn naive_dft<T: Real>(samples: &[Complex<T>], roots: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = samples.len();
    (0..n)
        .map(|k| {
            samples
                .iter()
                .enumerate()
                .fold(Complex::zero(), |acc, (j, s)| {
                    acc + s.clone() * roots[(j * k) % n].conj()
                })
        })
        .collect()
}

fn radix2_in_place<T: Real>(data: &mut [Complex<T>], roots: &[Complex<T>]) {
    let n = data.len();
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = roots[k * stride].conj();
                let u = data[start + k].clone();
                let v = data[start + k + half].clone() * w;
                data[start + k] = u.clone() + v.clone();
                data[start + k + half] = u - v;
            }
        }
        len *= 2;
    }
}

impl Real for f64 {
    const NAME: &'static str = "binary64";
    const IS_BINARY64: bool = true;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_bigint(x: &BigInt) -> Self {
        x.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn epsilon() -> f64 {
        f64::EPSILON / 2.0
    }

    fn max_amplification() -> f64 {
        1e12
    }

    fn series_tail_tolerance() -> f64 {
        1e-14
    }

    fn roots_of_unity(n: usize) -> Result<Vec<Complex<f64>>> {
        Ok((0..n)
            .map(|j| Complex::from_polar(1.0, TAU * j as f64 / n as f64))
            .collect())
    }

    fn spectrum(samples: &[Complex<f64>]) -> Result<Vec<Complex<f64>>> {
        let n = samples.len();
        if n.is_power_of_two() {
            let mut out = samples.to_vec();
            FftPlanner::new().plan_fft_forward(n).process(&mut out);
            Ok(out)
        } else {
            Ok(naive_dft(samples, &Self::roots_of_unity(n)?))
        }
    }
}

/// Binary fixed point with [`Fixed::FRACTION_BITS`] fractional bits and an
/// unbounded integer part.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed(BigInt);

impl Fixed {
    pub const FRACTION_BITS: u64 = 1024;

    fn from_raw(raw: BigInt) -> Self {
        Fixed(raw)
    }
}

impl fmt::Debug for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fixed({:e})", self.to_f64())
    }
}

fn ldexp(mut x: f64, mut exp: i64) -> f64 {
    const CHUNK: i64 = 512;
    while exp > CHUNK {
        x *= 2f64.powi(CHUNK as i32);
        exp -= CHUNK;
    }
    while exp < -CHUNK {
        x *= 2f64.powi(-CHUNK as i32);
        exp += CHUNK;
    }
    x * 2f64.powi(exp as i32)
}

impl Real for Fixed {
    const NAME: &'static str = "extended";
    const IS_BINARY64: bool = false;

    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "cannot represent {x} in fixed point");
        if x == 0.0 {
            return Fixed::zero();
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mantissa, exponent) = if biased == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), biased - 1075)
        };
        let mut raw = BigInt::from(mantissa);
        let shift = exponent + Self::FRACTION_BITS as i64;
        if shift >= 0 {
            raw <<= shift as usize;
        } else {
            raw >>= (-shift) as usize;
        }
        if negative {
            raw = -raw;
        }
        Fixed(raw)
    }

    fn from_bigint(x: &BigInt) -> Self {
        Fixed(x << Self::FRACTION_BITS as usize)
    }

    fn to_f64(&self) -> f64 {
        let bits = self.0.bits();
        if bits == 0 {
            return 0.0;
        }
        let frac = Self::FRACTION_BITS as i64;
        if bits > 64 {
            let shift = bits - 64;
            let head = (&self.0 >> shift as usize).to_f64().unwrap_or(f64::NAN);
            ldexp(head, shift as i64 - frac)
        } else {
            ldexp(self.0.to_f64().unwrap_or(f64::NAN), -frac)
        }
    }

    fn sqrt(&self) -> Self {
        assert!(
            self.0.sign() != Sign::Minus,
            "square root of a negative value"
        );
        Fixed((&self.0 << Self::FRACTION_BITS as usize).sqrt())
    }

    fn epsilon() -> f64 {
        ldexp(1.0, 16 - Self::FRACTION_BITS as i64)
    }

    fn max_amplification() -> f64 {
        1e150
    }

    fn series_tail_tolerance() -> f64 {
        1e-290
    }
}

impl Zero for Fixed {
    fn zero() -> Self {
        Fixed(BigInt::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Fixed {
    fn one() -> Self {
        Fixed(BigInt::one() << Self::FRACTION_BITS as usize)
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 + rhs.0)
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 - rhs.0)
    }
}

impl Mul for Fixed {
    type Output = Fixed;
    fn mul(self, rhs: Fixed) -> Fixed {
        Fixed::from_raw((self.0 * rhs.0) >> Self::FRACTION_BITS as usize)
    }
}

impl Div for Fixed {
    type Output = Fixed;
    fn div(self, rhs: Fixed) -> Fixed {
        Fixed::from_raw((self.0 << Self::FRACTION_BITS as usize) / rhs.0)
    }
}

impl Rem for Fixed {
    type Output = Fixed;
    fn rem(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 % rhs.0)
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed(-self.0)
    }
}

impl Num for Fixed {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;

    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        <f64 as Num>::from_str_radix(s, radix).map(<Fixed as Real>::from_f64)
    }
}

/// Modulus of a complex value, computed in the field and reported as binary64.
pub fn modulus<T: Real>(z: &Complex<T>) -> f64 {
    let sq = z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone();
    sq.sqrt().to_f64()
}

pub fn complex_from_f64<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn complex_to_f64<T: Real>(z: &Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// `x^n` by binary powering.
pub fn powu<T: Real>(x: &T, mut n: u64) -> T {
    let mut base = x.clone();
    let mut acc = T::one();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base.clone();
        }
        n >>= 1;
        if n > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_round_trips_binary64() {
        for x in [1.0, -0.3, 1e-200, 7.5e100, f64::MIN_POSITIVE] {
            assert_eq!(Fixed::from_f64(x).to_f64(), x, "{x}");
        }
    }

    #[test]
    fn fixed_arithmetic_matches_exact_rationals() {
        let third = Fixed::one() / Fixed::from_f64(3.0);
        let back = third.clone() * Fixed::from_f64(3.0);
        let err = (back - Fixed::one()).to_f64().abs();
        assert!(err < 1e-300, "{err}");
        let two = Fixed::from_f64(2.0).sqrt();
        let err = (two.clone() * two - Fixed::from_f64(2.0)).to_f64().abs();
        assert!(err < 1e-300, "{err}");
    }

    #[test]
    fn half_angle_roots_match_binary64() {
        let ext = Fixed::roots_of_unity(64).unwrap();
        let dbl = f64::roots_of_unity(64).unwrap();
        for (a, b) in ext.iter().zip(&dbl) {
            assert!((complex_to_f64(a) - b).norm() < 1e-15);
        }
        // ω^n must close the circle to extended precision.
        let closed = ext[63].clone() * ext[1].clone() - Complex::one();
        assert!(modulus(&closed) < 1e-290);
    }

    #[test]
    fn extended_rejects_non_power_of_two() {
        assert!(matches!(
            Fixed::roots_of_unity(12),
            Err(Error::UnsupportedBackend(..))
        ));
    }

    #[test]
    fn radix2_matches_naive_and_rustfft() {
        let xs: Vec<Complex<f64>> = (0..16)
            .map(|j| Complex::new((j as f64 * 0.7).sin(), (j as f64).cos()))
            .collect();
        let fast = f64::spectrum(&xs).unwrap();
        let roots = f64::roots_of_unity(16).unwrap();
        let slow = naive_dft(&xs, &roots);
        let mut generic = xs.clone();
        radix2_in_place(&mut generic, &roots);
        for k in 0..16 {
            assert!((fast[k] - slow[k]).norm() < 1e-13);
            assert!((generic[k] - slow[k]).norm() < 1e-13);
        }
        let ext: Vec<Complex<Fixed>> = xs.iter().map(|z| complex_from_f64(*z)).collect();
        let ext = Fixed::spectrum(&ext).unwrap();
        for k in 0..16 {
            assert!((complex_to_f64(&ext[k]) - slow[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn naive_dft_for_odd_lengths() {
        let xs: Vec<Complex<f64>> = (0..5).map(|j| Complex::new(j as f64, 0.0)).collect();
        let spec = f64::spectrum(&xs).unwrap();
        assert!((spec[0] - Complex::new(10.0, 0.0)).norm() < 1e-14);
    }
}
