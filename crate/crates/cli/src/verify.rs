//! The `verify` suites over the built-in functions.

use num_complex::Complex64;
use qdecay_core::{
    cross_radius_series, cusp_limit_check, extract_series_in, height_invariance_series,
    periodicity_check, phi_equivalence_series, CuspFunctionSpec, Fixed, FunctionSpec,
    QuadratureGrid, Result,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::output::{Num, Report};

/// Largest index checked by the invariance suites.
pub const VERIFY_MAX_N: usize = 32;

const PHI_TOLERANCE: f64 = 1e-12;
const PERIODICITY_TOLERANCE: f64 = 1e-12;
const ORACLE_TOLERANCE: f64 = 1e-12;
const FAULT: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub case: String,
    /// Index with the smallest margin.
    pub n: usize,
    pub discrepancy: Num,
    pub allowed: Num,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteSummary>,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

impl Report for VerifyReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["suite", "case", "n", "discrepancy", "allowed", "passed"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    c.suite.to_string(),
                    c.case.clone(),
                    c.n.to_string(),
                    c.discrepancy.to_string(),
                    c.allowed.to_string(),
                    c.passed.to_string(),
                ]
            })
            .collect()
    }
}

/// Folds per-index results into one check, keeping the index whose
/// discrepancy uses the largest share of its allowance.
struct Worst {
    n: usize,
    discrepancy: f64,
    allowed: f64,
    passed: bool,
}

impl Worst {
    fn new() -> Self {
        Worst {
            n: 0,
            discrepancy: 0.0,
            allowed: f64::INFINITY,
            passed: true,
        }
    }

    fn share(discrepancy: f64, allowed: f64) -> f64 {
        if discrepancy == 0.0 {
            0.0
        } else {
            discrepancy / allowed
        }
    }

    fn push(&mut self, n: usize, discrepancy: f64, allowed: f64, passed: bool) {
        let worse = Self::share(discrepancy, allowed) > Self::share(self.discrepancy, self.allowed)
            || (!passed && self.passed);
        if worse || (n == 0 && self.allowed.is_infinite()) {
            self.n = n;
            self.discrepancy = discrepancy;
            self.allowed = allowed;
        }
        self.passed &= passed;
    }

    fn into_check(self, suite: &'static str, case: String) -> Check {
        Check {
            suite,
            case,
            n: self.n,
            discrepancy: Num(self.discrepancy),
            allowed: Num(self.allowed),
            passed: self.passed,
        }
    }
}

pub fn disc_built_ins() -> Vec<(&'static str, FunctionSpec)> {
    vec![
        (
            "polynomial:1,-2,0.5,3i",
            FunctionSpec::polynomial(vec![
                1.0.into(),
                (-2.0).into(),
                0.5.into(),
                Complex64::new(0.0, 3.0),
            ]),
        ),
        ("monomial:5", FunctionSpec::monomial(5)),
        (
            "geometric:2",
            FunctionSpec::geometric(2.0.into()).expect("|c| > 1"),
        ),
        (
            "geometric:-1.5+0.5i",
            FunctionSpec::geometric(Complex64::new(-1.5, 0.5)).expect("|c| > 1"),
        ),
        ("eta24-delta", FunctionSpec::eta24_delta()),
    ]
}

pub fn cusp_built_ins() -> Vec<(&'static str, CuspFunctionSpec)> {
    vec![
        (
            "q-monomial:1",
            CuspFunctionSpec::q_monomial(1).expect("k ≥ 1"),
        ),
        (
            "q-monomial:3",
            CuspFunctionSpec::q_monomial(3).expect("k ≥ 1"),
        ),
        (
            "q-polynomial:0,2,-i",
            CuspFunctionSpec::q_polynomial(vec![0.0.into(), 2.0.into(), Complex64::new(0.0, -1.0)])
                .expect("zero constant term"),
        ),
        (
            "q-geometric:2",
            CuspFunctionSpec::q_geometric(2.0.into()).expect("|c| > 1"),
        ),
        ("delta", CuspFunctionSpec::delta_eta24()),
        (
            "q-geometric:3+delta/2",
            CuspFunctionSpec::q_geometric(3.0.into())
                .expect("|c| > 1")
                .sum(CuspFunctionSpec::delta_eta24().scale(0.5.into())),
        ),
    ]
}

fn cross_radius_suite(inject_fault: bool) -> Result<Vec<Check>> {
    let (r1, r2, samples) = (0.5, 0.8, 64);
    let mut checks = Vec::new();
    for (k, (name, f)) in disc_built_ins().into_iter().enumerate() {
        let mut worst = Worst::new();
        for (n, mut check) in cross_radius_series(&f, r1, r2, samples, VERIFY_MAX_N)?
            .into_iter()
            .enumerate()
        {
            if inject_fault && k == 0 && n == 0 {
                check.first.value += FAULT;
                check.discrepancy = (check.first.value - check.second.value).norm();
            }
            worst.push(n, check.discrepancy, check.allowed, check.passes());
        }
        checks.push(worst.into_check("cross-radius", format!("{name} r={r1},{r2} N={samples}")));
    }
    Ok(checks)
}

fn height_suite() -> Result<Vec<Check>> {
    let (y1, y2, samples) = (0.05, 0.1, 64);
    let mut checks = Vec::new();
    for (name, g) in cusp_built_ins() {
        let mut worst = Worst::new();
        for check in height_invariance_series(&g, y1, y2, samples, VERIFY_MAX_N)? {
            worst.push(
                check.first.index,
                check.discrepancy,
                check.allowed,
                check.passes(),
            );
        }
        checks.push(worst.into_check("height", format!("{name} y={y1},{y2} N={samples}")));
    }
    Ok(checks)
}

fn phi_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, g) in cusp_built_ins() {
        for r in [0.1, 0.5, 0.9] {
            let height = -f64::ln(r) / std::f64::consts::TAU;
            for samples in [16, 64, 128] {
                let mut worst = Worst::new();
                let last = (samples - 1).min(VERIFY_MAX_N);
                let max_n = (1..=last)
                    .take_while(|&n| r.powi(-(n as i32)) <= 1e12)
                    .last()
                    .unwrap_or(1);
                for (k, phi) in phi_equivalence_series(&g, height, samples, max_n)?
                    .iter()
                    .enumerate()
                {
                    let relative = phi.relative();
                    worst.push(k + 1, relative, PHI_TOLERANCE, relative <= PHI_TOLERANCE);
                }
                checks
                    .push(worst.into_check("phi-equivalence", format!("{name} r={r} N={samples}")));
            }
        }
    }
    Ok(checks)
}

fn periodicity_suite(rng: &mut StdRng) -> Result<Vec<Check>> {
    let points: Vec<Complex64> = (0..10)
        .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(0.1..1.0)))
        .collect();
    cusp_built_ins()
        .into_iter()
        .map(|(name, g)| {
            let deviation = periodicity_check(&g, &points)?;
            let mut worst = Worst::new();
            worst.push(
                0,
                deviation,
                PERIODICITY_TOLERANCE,
                deviation <= PERIODICITY_TOLERANCE,
            );
            Ok(worst.into_check("periodicity", format!("{name} 10 points y≥0.1")))
        })
        .collect()
}

fn cusp_limit_suite() -> Result<Vec<Check>> {
    let heights = [0.1, 0.15, 0.2, 0.3, 0.5, 0.8, 1.2, 2.0];
    cusp_built_ins()
        .into_iter()
        .map(|(name, g)| {
            let sup = cusp_limit_check(&g, &heights)?;
            let mut worst = Worst::new();
            for (k, pair) in sup.windows(2).enumerate() {
                let ratio = pair[1] / pair[0];
                worst.push(k + 1, ratio, 1.0, ratio < 1.0);
            }
            Ok(worst.into_check("cusp-limit", format!("{name} S(y_k+1)/S(y_k)")))
        })
        .collect()
}

fn oracle_suite(rng: &mut StdRng) -> Result<Vec<Check>> {
    let samples = 32;
    let mut checks = Vec::new();
    for k in 0..10 {
        let degree = rng.random_range(0..=20usize);
        let coeffs: Vec<Complex64> = (0..=degree)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let f = FunctionSpec::polynomial(coeffs.clone());
        for r in [0.5, 0.9, 1.0] {
            let grid = QuadratureGrid::new(r, samples)?;
            let estimates = extract_series_in::<Fixed>(&f, &grid, degree)?;
            let mut worst = Worst::new();
            for (e, exact) in estimates.iter().zip(&coeffs) {
                let relative = (e.value_f64() - exact).norm() / exact.norm();
                worst.push(
                    e.index,
                    relative,
                    ORACLE_TOLERANCE,
                    relative <= ORACLE_TOLERANCE,
                );
            }
            checks.push(worst.into_check(
                "polynomial-oracle",
                format!("random #{k} degree {degree} r={r} N={samples} extended"),
            ));
        }
    }
    Ok(checks)
}

pub fn run_suites(seed: u64, inject_fault: bool) -> Result<VerifyReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let suites: Vec<(&'static str, Vec<Check>)> = vec![
        ("cross-radius", cross_radius_suite(inject_fault)?),
        ("height", height_suite()?),
        ("phi-equivalence", phi_suite()?),
        ("periodicity", periodicity_suite(&mut rng)?),
        ("cusp-limit", cusp_limit_suite()?),
        ("polynomial-oracle", oracle_suite(&mut rng)?),
    ];
    let summaries = suites
        .iter()
        .map(|(name, checks)| SuiteSummary {
            name,
            passed: checks.iter().filter(|c| c.passed).count(),
            failed: checks.iter().filter(|c| !c.passed).count(),
        })
        .collect();
    let checks: Vec<Check> = suites.into_iter().flat_map(|(_, c)| c).collect();
    Ok(VerifyReport {
        command: "verify",
        seed,
        passed: checks.iter().all(|c| c.passed),
        suites: summaries,
        checks,
    })
}
