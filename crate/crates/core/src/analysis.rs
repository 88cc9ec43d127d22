//! Decay-rate estimation for coefficient sequences.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Real;
use crate::function::FunctionSpec;
use crate::quadrature::{default_samples, sample_circle, QuadratureGrid};
use crate::series::ramanujan_tau;

/// Minimum number of nonzero points a fit needs.
pub const MIN_FIT_POINTS: usize = 8;

/// R² window inside which the exponential model wins.
pub const MODEL_TIE_WINDOW: f64 = 0.01;

/// Relative tolerance under which two candidate maxima count as tied.
pub const ARGMAX_TIE_TOLERANCE: f64 = 1e-12;

/// Least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub points: usize,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> LogFit {
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        1.0 - ss_res / syy
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    LogFit {
        intercept,
        slope,
        r_squared,
        points: xs.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitTarget {
    /// Regress on `|a_n|` directly.
    Raw,
    /// Regress on the running maximum `max_{k ≤ n} |a_k|`, which smooths
    /// sign-oscillating growth.
    RunningMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Decay,
    Growth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayModel {
    /// `|a_n| ≈ A e^{-rate·n}`, `rate > 0`.
    Exponential {
        rate: f64,
    },
    /// `|a_n| ≈ B n^{-exponent}`; a negative exponent is growth.
    Polynomial {
        exponent: f64,
        trend: Trend,
    },
    Undetermined,
}

/// `C_m = max_{onset ≤ n ≤ n_hi} |a_n|·n^m` and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstant {
    pub m: u32,
    pub onset: usize,
    pub constant: f64,
    pub attained_at: usize,
}

/// Exponential fit of `ln|a_n|` against `n` and polynomial fit against
/// `ln n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPair {
    pub exponential: LogFit,
    pub polynomial: LogFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub model: DecayModel,
    /// Inclusive index range `[n_lo, n_hi]`.
    pub fit_range: (usize, usize),
    pub target: FitTarget,
    /// Fits on the selected target.
    pub fits: FitPair,
    /// Fits on the raw magnitudes when the envelope was selected.
    pub raw_fits: Option<FitPair>,
    pub zero_count: usize,
    pub constants: BTreeMap<u32, BoundConstant>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayOptions {
    pub target: FitTarget,
    pub m_list: Vec<u32>,
    /// Onset `D` for the constants; defaults to the first index.
    pub onset: Option<usize>,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions {
            target: FitTarget::Raw,
            m_list: Vec::new(),
            onset: None,
        }
    }
}

fn fit_pair(values: &[f64], first_index: usize) -> Result<(FitPair, usize)> {
    let mut ns = Vec::with_capacity(values.len());
    let mut log_ns = Vec::with_capacity(values.len());
    let mut logs = Vec::with_capacity(values.len());
    let mut zeros = 0;
    for (i, &v) in values.iter().enumerate() {
        if v == 0.0 {
            zeros += 1;
            continue;
        }
        let n = (first_index + i) as f64;
        ns.push(n);
        log_ns.push(n.ln());
        logs.push(v.ln());
    }
    if logs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            available: logs.len(),
            required: MIN_FIT_POINTS,
        });
    }
    Ok((
        FitPair {
            exponential: least_squares(&ns, &logs),
            polynomial: least_squares(&log_ns, &logs),
        },
        zeros,
    ))
}

fn select_model(fits: &FitPair) -> DecayModel {
    let rate = -fits.exponential.slope;
    if rate > 0.0 && fits.exponential.r_squared >= fits.polynomial.r_squared - MODEL_TIE_WINDOW {
        return DecayModel::Exponential { rate };
    }
    let exponent = -fits.polynomial.slope;
    DecayModel::Polynomial {
        exponent,
        trend: if exponent >= 0.0 {
            Trend::Decay
        } else {
            Trend::Growth
        },
    }
}

pub fn running_max(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0f64, |acc, &v| {
            *acc = acc.max(v);
            Some(*acc)
        })
        .collect()
}

/// Classifies `magnitudes[i] = |a_{first_index + i}|` as exponential or
/// polynomial decay.
pub fn fit_decay(
    magnitudes: &[f64],
    first_index: usize,
    options: &DecayOptions,
) -> Result<DecayReport> {
    if first_index == 0 {
        return Err(Error::InvalidArgument("decay fits start at n ≥ 1".into()));
    }
    if magnitudes.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument(
            "magnitudes must be finite and nonnegative".into(),
        ));
    }
    if magnitudes.len() < MIN_FIT_POINTS + 1 {
        return Err(Error::InsufficientData {
            available: magnitudes.len(),
            required: MIN_FIT_POINTS + 1,
        });
    }
    let last = first_index + magnitudes.len() - 1;
    let zero_count = magnitudes.iter().filter(|&&v| v == 0.0).count();
    let (fits, raw_fits) = match options.target {
        FitTarget::Raw => (fit_pair(magnitudes, first_index)?.0, None),
        FitTarget::RunningMax => {
            let envelope = running_max(magnitudes);
            let raw = fit_pair(magnitudes, first_index).ok().map(|p| p.0);
            (fit_pair(&envelope, first_index)?.0, raw)
        }
    };
    let model = if 2 * zero_count > magnitudes.len() {
        DecayModel::Undetermined
    } else {
        select_model(&fits)
    };
    let onset = options.onset.unwrap_or(first_index);
    let constants = options
        .m_list
        .par_iter()
        .map(|&m| polynomial_bound_constants(magnitudes, first_index, m, onset).map(|c| (m, c)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(DecayReport {
        model,
        fit_range: (first_index, last),
        target: options.target,
        fits,
        raw_fits,
        zero_count,
        constants,
    })
}

/// Index and value of the maximum, ties going to the earlier entry.
fn argmax_with_ties(values: impl Iterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (n, v) in values {
        match best {
            Some((_, b)) if v <= b * (1.0 + ARGMAX_TIE_TOLERANCE) => {}
            _ => best = Some((n, v)),
        }
    }
    best
}

/// `max_{onset ≤ n} |a_n|·n^m` over the supplied range.
pub fn polynomial_bound_constants(
    magnitudes: &[f64],
    first_index: usize,
    m: u32,
    onset: usize,
) -> Result<BoundConstant> {
    let last = (first_index + magnitudes.len()).checked_sub(1);
    let empty = || Error::EmptyRange {
        onset,
        last: last.unwrap_or(0),
    };
    if magnitudes.is_empty() || onset < first_index || onset > last.unwrap_or(0) {
        return Err(empty());
    }
    let scan = magnitudes[onset - first_index..]
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let n = onset + i;
            (n, v * (n as f64).powi(m as i32))
        });
    let (attained_at, constant) = argmax_with_ties(scan).ok_or_else(empty)?;
    Ok(BoundConstant {
        m,
        onset,
        constant,
        attained_at,
    })
}

/// One row of a δ sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSweepRow {
    pub delta: f64,
    /// `A_m(δ) = max_n |f̂_{1-δ}(n)|·n^m`.
    pub a_m: f64,
    pub attained_at: usize,
    /// `|f̂_{1-δ}(n)|` for `n = 1..=n_max`.
    pub rescaled: Vec<f64>,
    /// `A_m(δ)·(1-δ)^{-n}·n^{-m}` for `n = 1..=n_max`.
    pub implied: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSweep {
    pub m: u32,
    pub n_max: usize,
    pub samples: usize,
    pub rows: Vec<DeltaSweepRow>,
    /// Minimum over δ of the implied bound at each `n`.
    pub min_implied: Vec<f64>,
    /// The δ attaining each minimum.
    pub best_delta: Vec<f64>,
}

/// For each δ, samples `f` on `|z| = 1-δ`, takes `|f̂_{1-δ}(n)| = |a_n|(1-δ)^n`
/// from the unscaled transform and reports the bound on `|a_n|` it implies.
pub fn delta_sweep(f: &FunctionSpec, n_max: usize, m: u32, deltas: &[f64]) -> Result<DeltaSweep> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be positive".into()));
    }
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("δ grid is empty".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "δ must lie in (0, 1), got {d}"
        )));
    }
    let samples = default_samples(n_max);
    let rows = deltas
        .par_iter()
        .map(|&delta| {
            let radius = 1.0 - delta;
            let grid = QuadratureGrid::new(radius, samples)?;
            let spectrum = f64::spectrum(&sample_circle(f, &grid)?)?;
            let rescaled: Vec<f64> = spectrum[1..=n_max]
                .iter()
                .map(|c| c.norm() / samples as f64)
                .collect();
            let (attained_at, a_m) = argmax_with_ties(
                rescaled
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (i + 1, v * ((i + 1) as f64).powi(m as i32))),
            )
            .expect("n_max ≥ 1");
            let implied = (1..=n_max)
                .map(|n| a_m * (-(n as f64) * radius.ln()).exp() / (n as f64).powi(m as i32))
                .collect();
            Ok(DeltaSweepRow {
                delta,
                a_m,
                attained_at,
                rescaled,
                implied,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut min_implied = vec![f64::INFINITY; n_max];
    let mut best_delta = vec![f64::NAN; n_max];
    for row in &rows {
        for (i, &v) in row.implied.iter().enumerate() {
            if v < min_implied[i] {
                min_implied[i] = v;
                best_delta[i] = row.delta;
            }
        }
    }
    Ok(DeltaSweep {
        m,
        n_max,
        samples,
        rows,
        min_implied,
        best_delta,
    })
}

/// Whether `max_n |a_n|·n^m` settles inside the scanned range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RapidDecayProfile {
    pub m: u32,
    pub max: f64,
    pub attained_at: usize,
    /// True when the maximum is attained in the first half of the range,
    /// so the running maximum is flat over the second half.
    pub stabilized: bool,
}

/// [`RapidDecayProfile`] for each `m`, from `magnitudes[i] = |a_{first_index+i}|`.
pub fn rapid_decay_profile(
    magnitudes: &[f64],
    first_index: usize,
    m_list: &[u32],
) -> Result<Vec<RapidDecayProfile>> {
    if magnitudes.is_empty() {
        return Err(Error::InsufficientData {
            available: 0,
            required: 1,
        });
    }
    let last = first_index + magnitudes.len() - 1;
    let midpoint = first_index + (last - first_index) / 2;
    m_list
        .par_iter()
        .map(|&m| {
            let c = polynomial_bound_constants(magnitudes, first_index, m, first_index)?;
            Ok(RapidDecayProfile {
                m,
                max: c.constant,
                attained_at: c.attained_at,
                stabilized: c.attained_at <= midpoint,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothDecayReport {
    /// `ĝ(n)` for `n = 0..N`, with index `k > N/2` standing for `k - N`.
    pub coefficients: Vec<Complex64>,
    /// `max(|ĝ(n)|, |ĝ(-n)|)` for `n = 1..N/2`.
    pub magnitudes: Vec<f64>,
    pub profiles: Vec<RapidDecayProfile>,
}

/// Fourier coefficients of equally spaced boundary samples
/// `g(2πj/N)` and their rapid-decay profile over `1 ≤ |n| < N/2`.
pub fn smooth_fourier_decay_check(
    samples: &[Complex64],
    m_list: &[u32],
) -> Result<SmoothDecayReport> {
    let size = samples.len();
    if size < 4 {
        return Err(Error::InsufficientData {
            available: size,
            required: 4,
        });
    }
    let coefficients: Vec<Complex64> = f64::spectrum(samples)?
        .into_iter()
        .map(|c| c / size as f64)
        .collect();
    let magnitudes: Vec<f64> = (1..size.div_ceil(2))
        .map(|n| coefficients[n].norm().max(coefficients[size - n].norm()))
        .collect();
    let profiles = rapid_decay_profile(&magnitudes, 1, m_list)?;
    Ok(SmoothDecayReport {
        coefficients,
        magnitudes,
        profiles,
    })
}

/// `g(2πj/N)` for `j = 0..N`.
pub fn sample_periodic<F: Fn(f64) -> Complex64>(g: F, size: usize) -> Vec<Complex64> {
    (0..size)
        .map(|j| g(std::f64::consts::TAU * j as f64 / size as f64))
        .collect()
}

/// `d(n)` for `n = 0..=max_n` (`d(0) = 0`).
pub fn divisor_counts(max_n: usize) -> Vec<u32> {
    let mut d = vec![0u32; max_n + 1];
    for k in 1..=max_n {
        for multiple in (k..=max_n).step_by(k) {
            d[multiple] += 1;
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct RpRow {
    pub n: usize,
    pub tau: BigInt,
    pub abs_tau: f64,
    /// `n^{11/2 + γ}`.
    pub envelope: f64,
    pub ratio: f64,
    pub divisors: u32,
    /// `|τ(n)| / (d(n)·n^{11/2})`.
    pub deligne_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RpComparison {
    pub gamma: f64,
    pub rows: Vec<RpRow>,
    pub max_ratio: f64,
    pub max_ratio_at: usize,
    pub max_deligne_ratio: f64,
    pub max_deligne_ratio_at: usize,
    /// Indices with `|τ(n)| > d(n)·n^{11/2}`.
    pub deligne_violations: Vec<usize>,
}

/// Minimum `tau_range` accepted by [`rp_compare`].
pub const RP_MIN_RANGE: usize = 100;

/// Compares `|τ(n)|` for `n ≤ tau_range` with `n^{11/2+γ}` and with
/// `d(n)·n^{11/2}`.
pub fn rp_compare(tau_range: usize, gamma: f64) -> Result<RpComparison> {
    if tau_range < RP_MIN_RANGE {
        return Err(Error::InvalidArgument(format!(
            "tau range must be at least {RP_MIN_RANGE}, got {tau_range}"
        )));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gamma must be finite and nonnegative, got {gamma}"
        )));
    }
    let tau = ramanujan_tau(tau_range)?;
    let d = divisor_counts(tau_range);
    let rows: Vec<RpRow> = (1..=tau_range)
        .map(|n| {
            let t = tau.coeff(n).expect("within range").clone();
            let abs_tau = t.abs().to_f64().unwrap_or(f64::INFINITY);
            let log_n = (n as f64).ln();
            let envelope = ((5.5 + gamma) * log_n).exp();
            let deligne = d[n] as f64 * (5.5 * log_n).exp();
            RpRow {
                n,
                tau: t,
                abs_tau,
                envelope,
                ratio: abs_tau / envelope,
                divisors: d[n],
                deligne_ratio: abs_tau / deligne,
            }
        })
        .collect();
    let (max_ratio_at, max_ratio) =
        argmax_with_ties(rows.iter().map(|r| (r.n, r.ratio))).expect("nonempty");
    let (max_deligne_ratio_at, max_deligne_ratio) =
        argmax_with_ties(rows.iter().map(|r| (r.n, r.deligne_ratio))).expect("nonempty");
    let deligne_violations = rows
        .iter()
        .filter(|r| r.deligne_ratio > 1.0)
        .map(|r| r.n)
        .collect();
    Ok(RpComparison {
        gamma,
        rows,
        max_ratio,
        max_ratio_at,
        max_deligne_ratio,
        max_deligne_ratio_at,
        deligne_violations,
    })
}
