//! Taylor coefficients from samples on a circle.
//!
//! The `N`-point trapezoidal rule for `(1/2πi) ∮ f(z) z^{-n-1} dz` on
//! `|z| = r` is the DFT of the samples divided by `N r^n`. It returns
//! `a_n + Σ_{m ≥ 1} a_{n+mN} r^{mN}` exactly (the aliasing law), so the only
//! error is the aliased tail, which a Cauchy estimate on a larger circle
//! bounds.

use std::f64::consts::TAU;

use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::field::{complex_from_f64, complex_to_f64, modulus, powu, Real};
use crate::function::FunctionSpec;
use crate::halfplane::StripGrid;

/// Safety factor applied to the sampled maximum on the tail circle.
pub const TAIL_MAX_INFLATION: f64 = 1.25;

/// Multiple of `ε · log2(N) · max|f| · r^-n` reported as rounding slack.
pub const ROUNDING_SLACK_FACTOR: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    radius: f64,
    samples: usize,
}

impl QuadratureGrid {
    pub fn new(radius: f64, samples: usize) -> Result<Self> {
        if !(radius > 0.0 && radius <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "grid radius must lie in (0, 1], got {radius}"
            )));
        }
        if samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "at least 2 samples required, got {samples}"
            )));
        }
        Ok(QuadratureGrid { radius, samples })
    }

    /// Grid with [`default_samples`] points for indices up to `max_index`.
    pub fn auto(radius: f64, max_index: usize) -> Result<Self> {
        Self::new(radius, default_samples(max_index))
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Checks that `f` is analytic on a neighbourhood of the closed disc
    /// `|z| ≤ r` and evaluable on its boundary.
    pub fn check_function(&self, f: &FunctionSpec) -> Result<()> {
        let analytic = f.analytic_radius();
        if self.radius >= analytic {
            if self.radius == 1.0 {
                return Err(Error::UnitCircleHypothesis {
                    analytic_radius: analytic,
                });
            }
            return Err(Error::Domain {
                modulus: self.radius,
                radius: analytic,
            });
        }
        let limit = f.evaluation_limit();
        if self.radius > limit {
            return Err(Error::EvaluationLimit {
                function: "eta24-delta",
                modulus: self.radius,
                limit,
            });
        }
        Ok(())
    }

    /// `r · exp(2πij/N)` for `j = 0..N`.
    pub fn nodes<T: Real>(&self) -> Result<Vec<Complex<T>>> {
        let r = T::from_f64(self.radius);
        Ok(T::roots_of_unity(self.samples)?
            .into_iter()
            .map(|w| w.scale(r.clone()))
            .collect())
    }
}

/// Smallest power of two `≥ 4 · max_index` (and at least 2).
pub fn default_samples(max_index: usize) -> usize {
    (4 * max_index).max(2).next_power_of_two()
}

/// Circle `|z| = radius` on which `|f| ≤ max_modulus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub radius: f64,
    pub max_modulus: f64,
}

/// A set of candidate tail circles; the aliasing bound for each index uses
/// whichever circle gives the smallest value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TailModel {
    pub circles: Vec<TailBound>,
}

impl TailModel {
    /// Picks tail radii between the grid and the evaluation limit of `f`
    /// and estimates `max |f|` on each (see [`estimate_tail_max`]).
    ///
    /// Heuristic: the circles sit at 1/4, 1/2 and 3/4 of the way to the
    /// limit, or at 1.5r, 2r and 4r for entire functions. Circles that fail
    /// to evaluate are skipped.
    pub fn estimate(f: &FunctionSpec, grid: &QuadratureGrid) -> Self {
        let r = grid.radius;
        let limit = f.evaluation_limit();
        let radii: Vec<f64> = if limit.is_infinite() {
            vec![1.5 * r, 2.0 * r, 4.0 * r]
        } else if limit > r {
            [0.25, 0.5, 0.75]
                .iter()
                .map(|t| r + t * (limit - r))
                .collect()
        } else {
            Vec::new()
        };
        let circles = radii
            .into_iter()
            .filter_map(|rho| {
                estimate_tail_max(f, rho, 4 * grid.samples)
                    .ok()
                    .map(|max_modulus| TailBound {
                        radius: rho,
                        max_modulus,
                    })
            })
            .collect();
        TailModel { circles }
    }

    pub fn from_bound(bound: TailBound) -> Self {
        TailModel {
            circles: vec![bound],
        }
    }

    /// Smallest valid aliasing bound over the candidate circles; infinite
    /// when there are none.
    pub fn bound(&self, grid: &QuadratureGrid, n: usize) -> f64 {
        self.circles
            .iter()
            .filter_map(|&tail| aliasing_bound(tail, grid, n).ok())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `TAIL_MAX_INFLATION · max_j |f(ρ e^{2πij/points})|`.
pub fn estimate_tail_max(f: &FunctionSpec, rho: f64, points: usize) -> Result<f64> {
    let mut max = 0.0f64;
    for j in 0..points {
        let z = Complex64::from_polar(rho, TAU * j as f64 / points as f64);
        max = max.max(f.eval_f64(z)?.norm());
    }
    Ok(TAIL_MAX_INFLATION * max)
}

/// Cauchy-estimate bound on the aliased tail `|Σ_{m≥1} a_{n+mN} r^{mN}|`.
///
/// With `|a_j| ≤ M ρ^{-j}` the tail is at most `M ρ^{-n} q / (1 - q)` where
/// `q = (r/ρ)^N`.
pub fn aliasing_bound(tail: TailBound, grid: &QuadratureGrid, n: usize) -> Result<f64> {
    let (r, rho) = (grid.radius, tail.radius);
    if !(rho > r) {
        return Err(Error::InvalidTailRadius {
            tail_radius: rho,
            radius: r,
        });
    }
    if tail.max_modulus == 0.0 {
        return Ok(0.0);
    }
    let q = (grid.samples as f64 * (r / rho).ln()).exp();
    let scale = (-(n as f64) * rho.ln()).exp();
    Ok(tail.max_modulus * scale * q / (1.0 - q))
}

/// Where an estimate's samples came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridProvenance {
    Circle(QuadratureGrid),
    Strip(StripGrid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientEstimate<T = f64> {
    pub index: usize,
    pub value: Complex<T>,
    /// Bound on the aliased tail; infinite when no tail model was supplied.
    pub aliasing_bound: f64,
    /// Allowance for rounding in the samples and the transform.
    pub rounding_slack: f64,
    pub grid: GridProvenance,
}

impl<T: Real> CoefficientEstimate<T> {
    pub fn value_f64(&self) -> Complex64 {
        complex_to_f64(&self.value)
    }

    /// `aliasing_bound + rounding_slack`.
    pub fn error_budget(&self) -> f64 {
        self.aliasing_bound + self.rounding_slack
    }
}

pub fn sample_circle(f: &FunctionSpec, grid: &QuadratureGrid) -> Result<Vec<Complex64>> {
    sample_circle_in(f, grid)
}

pub fn sample_circle_in<T: Real>(
    f: &FunctionSpec,
    grid: &QuadratureGrid,
) -> Result<Vec<Complex<T>>> {
    grid.check_function(f)?;
    grid.nodes::<T>()?.iter().map(|z| f.eval(z)).collect()
}

pub(crate) fn check_amplification<T: Real>(index: usize, factor: f64) -> Result<()> {
    let limit = T::max_amplification();
    if !(factor <= limit) {
        return Err(Error::Amplification {
            index,
            factor,
            limit,
            backend: T::NAME,
        });
    }
    Ok(())
}

pub(crate) fn rounding_slack<T: Real>(samples: &[Complex<T>], amplification: f64) -> f64 {
    let max = samples.iter().map(modulus).fold(0.0, f64::max);
    let log_n = (samples.len() as f64).log2().max(1.0);
    ROUNDING_SLACK_FACTOR * T::epsilon() * log_n * max * amplification
}

/// Estimate of `a_n` from samples on `grid`.
pub fn extract_coeff<T: Real>(
    samples: &[Complex<T>],
    grid: &QuadratureGrid,
    n: usize,
    tail: Option<&TailModel>,
) -> Result<CoefficientEstimate<T>> {
    if n >= grid.samples {
        return Err(Error::Index {
            index: n,
            samples: grid.samples,
        });
    }
    let mut all = extract_range(samples, grid, n, n, tail)?;
    Ok(all.pop().expect("one index requested"))
}

/// Estimates of `a_0..=a_max_n` from one transform of the samples.
pub fn extract_coeffs<T: Real>(
    samples: &[Complex<T>],
    grid: &QuadratureGrid,
    max_n: usize,
    tail: Option<&TailModel>,
) -> Result<Vec<CoefficientEstimate<T>>> {
    extract_range(samples, grid, 0, max_n, tail)
}

fn extract_range<T: Real>(
    samples: &[Complex<T>],
    grid: &QuadratureGrid,
    first: usize,
    last: usize,
    tail: Option<&TailModel>,
) -> Result<Vec<CoefficientEstimate<T>>> {
    let size = grid.samples;
    if samples.len() != size {
        return Err(Error::InvalidArgument(format!(
            "expected {size} samples, got {}",
            samples.len()
        )));
    }
    if last >= size {
        return Err(Error::Index {
            index: last,
            samples: size,
        });
    }
    let r = grid.radius;
    check_amplification::<T>(last, r.powi(-(last as i32)))?;
    let spectrum = T::spectrum(samples)?;
    let radius = T::from_f64(r);
    let count = T::from_f64(size as f64);
    (first..=last)
        .map(|n| {
            let amplification = r.powi(-(n as i32));
            let denom = count.clone() * powu(&radius, n as u64);
            Ok(CoefficientEstimate {
                index: n,
                value: spectrum[n].clone().unscale(denom),
                aliasing_bound: tail.map_or(f64::INFINITY, |t| t.bound(grid, n)),
                rounding_slack: rounding_slack(samples, amplification),
                grid: GridProvenance::Circle(*grid),
            })
        })
        .collect()
}

/// Samples `f` on `grid` and estimates `a_n` with an aliasing bound.
pub fn extract(f: &FunctionSpec, grid: &QuadratureGrid, n: usize) -> Result<CoefficientEstimate> {
    extract_in(f, grid, n)
}

pub fn extract_in<T: Real>(
    f: &FunctionSpec,
    grid: &QuadratureGrid,
    n: usize,
) -> Result<CoefficientEstimate<T>> {
    if n >= grid.samples {
        return Err(Error::Index {
            index: n,
            samples: grid.samples,
        });
    }
    check_amplification::<T>(n, grid.radius.powi(-(n as i32)))?;
    let samples = sample_circle_in::<T>(f, grid)?;
    let tail = TailModel::estimate(f, grid);
    extract_coeff(&samples, grid, n, Some(&tail))
}

pub fn extract_series(
    f: &FunctionSpec,
    grid: &QuadratureGrid,
    max_n: usize,
) -> Result<Vec<CoefficientEstimate>> {
    extract_series_in(f, grid, max_n)
}

pub fn extract_series_in<T: Real>(
    f: &FunctionSpec,
    grid: &QuadratureGrid,
    max_n: usize,
) -> Result<Vec<CoefficientEstimate<T>>> {
    if max_n >= grid.samples {
        return Err(Error::Index {
            index: max_n,
            samples: grid.samples,
        });
    }
    check_amplification::<T>(max_n, grid.radius.powi(-(max_n as i32)))?;
    let samples = sample_circle_in::<T>(f, grid)?;
    let tail = TailModel::estimate(f, grid);
    extract_coeffs(&samples, grid, max_n, Some(&tail))
}

/// Two extractions of one coefficient and how far apart they may be.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceCheck {
    pub first: CoefficientEstimate,
    pub second: CoefficientEstimate,
    pub discrepancy: f64,
    /// Sum of both error budgets.
    pub allowed: f64,
}

impl InvarianceCheck {
    pub fn new(first: CoefficientEstimate, second: CoefficientEstimate) -> Self {
        let discrepancy = (first.value - second.value).norm();
        let allowed = first.error_budget() + second.error_budget();
        InvarianceCheck {
            first,
            second,
            discrepancy,
            allowed,
        }
    }

    pub fn passes(&self) -> bool {
        self.discrepancy <= self.allowed
    }
}

/// Extracts `a_n` at two radii with the same sample count.
pub fn cross_radius_check(
    f: &FunctionSpec,
    r1: f64,
    r2: f64,
    samples: usize,
    n: usize,
) -> Result<InvarianceCheck> {
    let first = extract(f, &QuadratureGrid::new(r1, samples)?, n)?;
    let second = extract(f, &QuadratureGrid::new(r2, samples)?, n)?;
    Ok(InvarianceCheck::new(first, second))
}

/// [`cross_radius_check`] for `n = 0..=max_n`, sampling each circle once.
pub fn cross_radius_series(
    f: &FunctionSpec,
    r1: f64,
    r2: f64,
    samples: usize,
    max_n: usize,
) -> Result<Vec<InvarianceCheck>> {
    let first = extract_series(f, &QuadratureGrid::new(r1, samples)?, max_n)?;
    let second = extract_series(f, &QuadratureGrid::new(r2, samples)?, max_n)?;
    Ok(first
        .into_iter()
        .zip(second)
        .map(|(a, b)| InvarianceCheck::new(a, b))
        .collect())
}

/// `c` as a complex value in the field; convenience for callers building
/// extended-precision comparisons.
pub fn lift<T: Real>(c: Complex64) -> Complex<T> {
    complex_from_f64(c)
}
