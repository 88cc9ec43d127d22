//! Periodic holomorphic functions on the upper half-plane.
//!
//! A cusp function is a function of `q = exp(2πiz)` with no constant term.
//! Sampling it on the horizontal line `Im z = y` at `x = j/N` gives exactly
//! the disc samples on `|q| = e^{-2πy}`, so the strip extraction carries the
//! same aliasing law with `r = e^{-2πy}`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Real;
use crate::function::{FunctionSpec, MIN_DELTA_HEIGHT};
use crate::quadrature::{
    check_amplification, extract, extract_series, rounding_slack, CoefficientEstimate,
    GridProvenance, InvarianceCheck, QuadratureGrid, TailModel,
};

/// Number of `x` nodes used by [`cusp_limit_check`].
pub const CUSP_LIMIT_NODES: usize = 64;

/// `exp(2πiz)`.
pub fn nome(z: Complex64) -> Complex64 {
    (Complex64::new(0.0, TAU) * z).exp()
}

/// A q-series with zero constant term and radius of convergence at least
/// one, viewed as a function of `z` in the upper half-plane.
#[derive(Debug, Clone)]
pub struct CuspFunctionSpec {
    q_series: FunctionSpec,
}

impl CuspFunctionSpec {
    /// `q^k`, `k ≥ 1`.
    pub fn q_monomial(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "q-monomial exponent must be at least 1 (no constant term)".into(),
            ));
        }
        Ok(CuspFunctionSpec {
            q_series: FunctionSpec::monomial(k),
        })
    }

    /// `Σ c_n q^n`; `coeffs[0]` must be zero.
    pub fn q_polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs
            .first()
            .is_some_and(|c| *c != Complex64::new(0.0, 0.0))
        {
            return Err(Error::InvalidArgument(
                "q-polynomial must have zero constant term".into(),
            ));
        }
        Ok(CuspFunctionSpec {
            q_series: FunctionSpec::polynomial(coeffs),
        })
    }

    /// `q / (1 - q/c)`, coefficients `c^{1-n}` for `n ≥ 1`.
    pub fn q_geometric(c: Complex64) -> Result<Self> {
        Ok(CuspFunctionSpec {
            q_series: FunctionSpec::geometric(c)?.shift(1),
        })
    }

    /// The discriminant `Δ(z) = Σ τ(n) q^n`.
    pub fn delta_eta24() -> Self {
        CuspFunctionSpec {
            q_series: FunctionSpec::eta24_delta(),
        }
    }

    /// Wraps a disc function `f` as `g(z) = f(exp(2πiz))`. Requires
    /// `f(0) = 0` and analyticity on the open unit disc.
    pub fn from_q_series(f: FunctionSpec) -> Result<Self> {
        if f.analytic_radius() < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "{f} is not analytic on the unit disc"
            )));
        }
        if !f.vanishes_at_origin() {
            return Err(Error::InvalidArgument(format!(
                "{f} has a nonzero constant term"
            )));
        }
        Ok(CuspFunctionSpec { q_series: f })
    }

    pub fn sum(self, other: CuspFunctionSpec) -> Self {
        CuspFunctionSpec {
            q_series: self.q_series.sum(other.q_series),
        }
    }

    pub fn scale(self, factor: Complex64) -> Self {
        CuspFunctionSpec {
            q_series: self.q_series.scale(factor),
        }
    }

    /// The disc function `f` with `g = f ∘ exp(2πi·)`.
    pub fn q_series(&self) -> &FunctionSpec {
        &self.q_series
    }

    /// Smallest height at which the function may be evaluated.
    pub fn min_height(&self) -> f64 {
        if self.q_series.contains_delta() {
            MIN_DELTA_HEIGHT
        } else {
            0.0
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane { imag: z.im });
        }
        if z.im < self.min_height() {
            return Err(Error::EvaluationLimit {
                function: "eta24-delta",
                modulus: (-TAU * z.im).exp(),
                limit: (-TAU * self.min_height()).exp(),
            });
        }
        self.q_series.eval_f64(nome(z))
    }
}

impl std::fmt::Display for CuspFunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}∘exp(2πiz)", self.q_series)
    }
}

/// Samples at `x = j/N`, `j = 0..N`, on the line `Im z = height`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripGrid {
    height: f64,
    samples: usize,
}

impl StripGrid {
    pub fn new(height: f64, samples: usize) -> Result<Self> {
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "strip height must be positive, got {height}"
            )));
        }
        if samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "at least 2 samples required, got {samples}"
            )));
        }
        Ok(StripGrid { height, samples })
    }

    /// Strip whose image under `exp(2πiz)` is the circle `|q| = radius`.
    pub fn from_disc_radius(radius: f64, samples: usize) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "disc radius must lie in (0, 1), got {radius}"
            )));
        }
        Self::new(-radius.ln() / TAU, samples)
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// `e^{-2πy}`.
    pub fn disc_radius(&self) -> f64 {
        (-TAU * self.height).exp()
    }

    pub fn disc_grid(&self) -> QuadratureGrid {
        QuadratureGrid::new(self.disc_radius(), self.samples).expect("radius lies in (0, 1)")
    }

    pub fn nodes(&self) -> Vec<Complex64> {
        (0..self.samples)
            .map(|j| Complex64::new(j as f64 / self.samples as f64, self.height))
            .collect()
    }
}

pub fn sample_strip(g: &CuspFunctionSpec, grid: &StripGrid) -> Result<Vec<Complex64>> {
    grid.nodes().into_iter().map(|z| g.eval(z)).collect()
}

/// Estimates `ḡ(n)` for `n = 1..=max_n` from one strip transform.
pub fn strip_extract_series(
    g: &CuspFunctionSpec,
    grid: &StripGrid,
    max_n: usize,
) -> Result<Vec<CoefficientEstimate>> {
    if max_n == 0 {
        return Err(Error::Index {
            index: 0,
            samples: grid.samples,
        });
    }
    if max_n >= grid.samples {
        return Err(Error::Index {
            index: max_n,
            samples: grid.samples,
        });
    }
    let amplification = |n: usize| (TAU * n as f64 * grid.height).exp();
    check_amplification::<f64>(max_n, amplification(max_n))?;
    let samples = sample_strip(g, grid)?;
    let spectrum = f64::spectrum(&samples)?;
    let disc = grid.disc_grid();
    let tail = TailModel::estimate(g.q_series(), &disc);
    let size = grid.samples as f64;
    Ok((1..=max_n)
        .map(|n| {
            let gain = amplification(n);
            CoefficientEstimate {
                index: n,
                value: spectrum[n] * (gain / size),
                aliasing_bound: tail.bound(&disc, n),
                rounding_slack: rounding_slack(&samples, gain),
                grid: GridProvenance::Strip(*grid),
            }
        })
        .collect())
}

/// `e^{2πny} (1/N) Σ_j g(j/N + iy) e^{-2πijn/N}`.
pub fn strip_extract(
    g: &CuspFunctionSpec,
    grid: &StripGrid,
    n: usize,
) -> Result<CoefficientEstimate> {
    if n == 0 || n >= grid.samples {
        return Err(Error::Index {
            index: n,
            samples: grid.samples,
        });
    }
    let mut all = strip_extract_series(g, grid, n)?;
    Ok(all.pop().expect("n ≥ 1"))
}

/// Strip extraction at height `y` against disc extraction at `r = e^{-2πy}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiEquivalence {
    pub strip: CoefficientEstimate,
    pub disc: CoefficientEstimate,
    pub discrepancy: f64,
}

impl PhiEquivalence {
    /// Discrepancy relative to the larger of the two values; zero when
    /// both agree exactly.
    pub fn relative(&self) -> f64 {
        if self.discrepancy == 0.0 {
            return 0.0;
        }
        self.discrepancy / self.strip.value.norm().max(self.disc.value.norm())
    }
}

pub fn phi_equivalence_check(
    g: &CuspFunctionSpec,
    height: f64,
    samples: usize,
    n: usize,
) -> Result<PhiEquivalence> {
    let grid = StripGrid::new(height, samples)?;
    let strip = strip_extract(g, &grid, n)?;
    let disc = extract(g.q_series(), &grid.disc_grid(), n)?;
    let discrepancy = (strip.value - disc.value).norm();
    Ok(PhiEquivalence {
        strip,
        disc,
        discrepancy,
    })
}

/// [`phi_equivalence_check`] for `n = 1..=max_n` from one strip and one
/// disc transform.
pub fn phi_equivalence_series(
    g: &CuspFunctionSpec,
    height: f64,
    samples: usize,
    max_n: usize,
) -> Result<Vec<PhiEquivalence>> {
    let grid = StripGrid::new(height, samples)?;
    let strip = strip_extract_series(g, &grid, max_n)?;
    let disc = extract_series(g.q_series(), &grid.disc_grid(), max_n)?;
    Ok(strip
        .into_iter()
        .zip(disc.into_iter().skip(1))
        .map(|(strip, disc)| {
            let discrepancy = (strip.value - disc.value).norm();
            PhiEquivalence {
                strip,
                disc,
                discrepancy,
            }
        })
        .collect())
}

/// Strip extraction of `ḡ(n)` at two heights.
pub fn height_invariance_check(
    g: &CuspFunctionSpec,
    y1: f64,
    y2: f64,
    samples: usize,
    n: usize,
) -> Result<InvarianceCheck> {
    let first = strip_extract(g, &StripGrid::new(y1, samples)?, n)?;
    let second = strip_extract(g, &StripGrid::new(y2, samples)?, n)?;
    Ok(InvarianceCheck::new(first, second))
}

/// [`height_invariance_check`] for `n = 1..=max_n`.
pub fn height_invariance_series(
    g: &CuspFunctionSpec,
    y1: f64,
    y2: f64,
    samples: usize,
    max_n: usize,
) -> Result<Vec<InvarianceCheck>> {
    let first = strip_extract_series(g, &StripGrid::new(y1, samples)?, max_n)?;
    let second = strip_extract_series(g, &StripGrid::new(y2, samples)?, max_n)?;
    Ok(first
        .into_iter()
        .zip(second)
        .map(|(a, b)| InvarianceCheck::new(a, b))
        .collect())
}

/// `max |g(z+1) - g(z)|` over the points.
pub fn periodicity_check(g: &CuspFunctionSpec, points: &[Complex64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in points {
        if !(z.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane { imag: z.im });
        }
        let shifted = g.eval(z + 1.0)?;
        worst = worst.max((shifted - g.eval(z)?).norm());
    }
    Ok(worst)
}

/// `S(y) = max_j |g(j/64 + iy)|` for each height.
pub fn cusp_limit_check(g: &CuspFunctionSpec, heights: &[f64]) -> Result<Vec<f64>> {
    if heights.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::InvalidArgument("heights must be positive".into()));
    }
    if heights.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("heights must be increasing".into()));
    }
    heights
        .iter()
        .map(|&y| {
            (0..CUSP_LIMIT_NODES).try_fold(0.0f64, |acc, j| {
                let z = Complex64::new(j as f64 / CUSP_LIMIT_NODES as f64, y);
                Ok(acc.max(g.eval(z)?.norm()))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ramanujan_tau;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};

    fn built_ins() -> Vec<CuspFunctionSpec> {
        vec![
            CuspFunctionSpec::q_monomial(1).unwrap(),
            CuspFunctionSpec::q_monomial(3).unwrap(),
            CuspFunctionSpec::q_polynomial(vec![0.0.into(), 2.0.into(), Complex64::new(0.0, -1.0)])
                .unwrap(),
            CuspFunctionSpec::q_geometric(2.0.into()).unwrap(),
            CuspFunctionSpec::delta_eta24(),
            CuspFunctionSpec::q_geometric(3.0.into())
                .unwrap()
                .sum(CuspFunctionSpec::delta_eta24().scale(0.5.into())),
        ]
    }

    fn random_points(count: usize, min_height: f64, seed: u64) -> Vec<Complex64> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                Complex64::new(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(min_height..1.0),
                )
            })
            .collect()
    }

    #[test]
    fn constructors_enforce_the_cusp_condition() {
        assert!(CuspFunctionSpec::q_monomial(0).is_err());
        assert!(CuspFunctionSpec::q_polynomial(vec![1.0.into(), 1.0.into()]).is_err());
        assert!(CuspFunctionSpec::q_geometric(0.5.into()).is_err());
        assert!(
            CuspFunctionSpec::from_q_series(FunctionSpec::geometric(2.0.into()).unwrap()).is_err()
        );
        assert!(CuspFunctionSpec::from_q_series(FunctionSpec::eta24_delta()).is_ok());
        let inner = FunctionSpec::custom("small", 0.5, |z| z);
        assert!(CuspFunctionSpec::from_q_series(inner).is_err());
    }

    #[test]
    fn q_monomial_coefficient() {
        let g = CuspFunctionSpec::q_monomial(1).unwrap();
        let est = strip_extract(&g, &StripGrid::new(0.1, 8).unwrap(), 1).unwrap();
        assert!((est.value - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn q_geometric_coefficient_with_tail() {
        let g = CuspFunctionSpec::q_geometric(2.0.into()).unwrap();
        let grid = StripGrid::from_disc_radius(0.5, 16).unwrap();
        let est = strip_extract(&g, &grid, 2).unwrap();
        // a_{2+16m} r^{16m} = 2^{-1-16m} 2^{-16m}.
        let tail: f64 = (1..6).map(|m| 2f64.powi(-1 - 32 * m)).sum();
        assert!((est.value.re - (0.5 + tail)).abs() < 1e-13);
        assert!(tail <= est.aliasing_bound);
    }

    #[test]
    fn delta_coefficients_from_the_strip() {
        let tau = ramanujan_tau(8).unwrap();
        let grid = StripGrid::new(0.05, 64).unwrap();
        let est = strip_extract(&CuspFunctionSpec::delta_eta24(), &grid, 2).unwrap();
        let err = (est.value - Complex64::new(-24.0, 0.0)).norm();
        // r = e^{-0.1π} ≈ 0.73 leaves a large aliased tail τ(66) r^64 + ...
        assert!(
            err <= est.aliasing_bound,
            "{err:e} vs {:e}",
            est.aliasing_bound
        );
        let half = StripGrid::from_disc_radius(0.5, 64).unwrap();
        let series = strip_extract_series(&CuspFunctionSpec::delta_eta24(), &half, 8).unwrap();
        for e in series {
            let exact = tau.coeff(e.index).unwrap().to_f64().unwrap();
            let err = (e.value - Complex64::new(exact, 0.0)).norm();
            assert!(err <= e.aliasing_bound);
            assert!(err <= 1e-6 * exact.abs());
        }
    }

    #[test]
    fn strip_guards() {
        let g = CuspFunctionSpec::q_monomial(1).unwrap();
        let grid = StripGrid::new(0.5, 16).unwrap();
        assert!(matches!(
            strip_extract(&g, &grid, 16),
            Err(Error::Index { .. })
        ));
        assert!(matches!(
            strip_extract(&g, &grid, 0),
            Err(Error::Index { .. })
        ));
        // e^{2π·9·0.5} ≈ 2e12.
        assert!(matches!(
            strip_extract(&g, &grid, 9),
            Err(Error::Amplification { .. })
        ));
        assert!(strip_extract(&g, &grid, 8).is_ok());
        let low = StripGrid::new(0.005, 16).unwrap();
        assert!(matches!(
            strip_extract(&CuspFunctionSpec::delta_eta24(), &low, 1),
            Err(Error::EvaluationLimit { .. })
        ));
        assert!(StripGrid::new(0.0, 8).is_err());
        assert!(StripGrid::new(0.1, 1).is_err());
    }

    #[test]
    fn phi_equivalence_examples() {
        let g = CuspFunctionSpec::q_monomial(1).unwrap();
        assert!(phi_equivalence_check(&g, 0.2, 16, 1).unwrap().relative() < 1e-14);
        let g = CuspFunctionSpec::q_geometric(2.0.into()).unwrap();
        let y = 2f64.ln() / TAU;
        assert!(phi_equivalence_check(&g, y, 16, 3).unwrap().discrepancy <= 1e-12);
        let d = phi_equivalence_check(&CuspFunctionSpec::delta_eta24(), 0.05, 64, 1).unwrap();
        assert!(d.relative() <= 1e-9);
        assert!((d.strip.value.re - 1.0).abs() <= d.strip.error_budget());
    }

    #[test]
    fn phi_equivalence_across_built_ins() {
        for g in built_ins() {
            for r in [0.1, 0.5, 0.9] {
                let height = -f64::ln(r) / TAU;
                for size in [16, 64, 128] {
                    let max_n = (1..size)
                        .take_while(|&n| (TAU * n as f64 * height).exp() <= 1e12)
                        .last()
                        .unwrap_or(1);
                    for n in 1..=max_n {
                        let check = phi_equivalence_check(&g, height, size, n).unwrap();
                        assert!(
                            check.relative() <= 1e-12,
                            "{g} r={r} N={size} n={n}: {:e}",
                            check.relative()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn series_checks_match_single_index_checks() {
        let g = CuspFunctionSpec::delta_eta24();
        let series = phi_equivalence_series(&g, 0.1, 32, 10).unwrap();
        let heights = height_invariance_series(&g, 0.05, 0.1, 32, 10).unwrap();
        for n in [1, 4, 10] {
            assert_eq!(
                series[n - 1],
                phi_equivalence_check(&g, 0.1, 32, n).unwrap()
            );
            assert_eq!(
                heights[n - 1],
                height_invariance_check(&g, 0.05, 0.1, 32, n).unwrap()
            );
        }
    }

    #[test]
    fn height_invariance_within_budget() {
        for g in built_ins() {
            for n in [1, 2, 5, 9] {
                let check = height_invariance_check(&g, 0.03, 0.08, 64, n).unwrap();
                assert!(check.passes(), "{g} n={n}: {check:?}");
            }
        }
    }

    #[test]
    fn periodicity_of_built_ins() {
        let points = random_points(10, 0.1, 7);
        for g in built_ins() {
            let dev = periodicity_check(&g, &points).unwrap();
            assert!(dev <= 1e-12, "{g}: {dev:e}");
        }
        let low = random_points(10, 0.05, 8);
        let dev =
            periodicity_check(&CuspFunctionSpec::q_geometric(2.0.into()).unwrap(), &low).unwrap();
        assert!(dev <= 1e-13);
        assert!(periodicity_check(&built_ins()[0], &[Complex64::new(0.0, -1.0)]).is_err());
    }

    #[test]
    fn cusp_limit_examples() {
        let g = CuspFunctionSpec::q_monomial(1).unwrap();
        let s = cusp_limit_check(&g, &[1.0, 2.0, 3.0]).unwrap();
        for (y, v) in [1.0, 2.0, 3.0].iter().zip(&s) {
            let expected = (-TAU * y).exp();
            assert!((v - expected).abs() < 1e-14 * expected);
        }
        let zero = CuspFunctionSpec::from_q_series(FunctionSpec::zero()).unwrap();
        assert_eq!(
            cusp_limit_check(&zero, &[0.5, 1.0]).unwrap(),
            vec![0.0, 0.0]
        );

        let s = cusp_limit_check(&CuspFunctionSpec::delta_eta24(), &[0.5, 1.0]).unwrap();
        // Product-formula oracle; at y = 0.5 the τ(2) q² term is not yet
        // negligible, so the ratio is well below e^{-π}.
        assert!((s[1] / s[0] - 0.017090279704280783).abs() < 1e-12);
        let s = cusp_limit_check(&CuspFunctionSpec::delta_eta24(), &[2.0, 3.0]).unwrap();
        let ratio = s[1] / s[0];
        assert!((ratio / (-TAU).exp() - 1.0).abs() < 0.05, "{ratio}");

        assert!(cusp_limit_check(&g, &[1.0, 0.5]).is_err());
        assert!(cusp_limit_check(&g, &[-1.0]).is_err());
    }

    #[test]
    fn cusp_limit_decreases_for_nonzero_built_ins() {
        let heights = [0.1, 0.15, 0.2, 0.3, 0.5, 0.8, 1.2, 2.0];
        for g in built_ins() {
            let s = cusp_limit_check(&g, &heights).unwrap();
            assert!(s.windows(2).all(|w| w[1] < w[0]), "{g}: {s:?}");
        }
    }
}
