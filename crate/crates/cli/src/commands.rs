//! One report type per subcommand.

use std::io::Write;

use num_bigint::BigInt;
use num_complex::Complex64;
use qdecay_core::{
    closed_form_coeffs, default_samples, delta_sweep, extract_series_in, fit_decay, ramanujan_tau,
    rp_compare, strip_extract_series, CoefficientEstimate, DecayModel, DecayOptions, FitTarget,
    Fixed, LogFit, QuadratureGrid, Real, StripGrid, Trend,
};
use serde::Serialize;

use crate::output::{nums, write_report, Num, Report};
use crate::{
    Cli, CliError, Command, DecayArgs, DeltaSweepArgs, ExtractArgs, Precision, RpCompareArgs,
    Samples, TauArgs,
};

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Extract(args) => write_report(&extract(args)?, cli.format, out),
        Command::Tau(args) => write_report(&tau(args)?, cli.format, out),
        Command::Decay(args) => write_report(&decay(args)?, cli.format, out),
        Command::DeltaSweep(args) => write_report(&sweep(args)?, cli.format, out),
        Command::RpCompare(args) => write_report(&rp(args)?, cli.format, out),
        Command::Verify(args) => {
            let report = crate::verify::run_suites(cli.seed, args.inject_fault)?;
            write_report(&report, cli.format, out)?;
            let failed = report.failed();
            if failed > 0 {
                return Err(CliError::VerifyFailed {
                    failed,
                    total: report.checks.len(),
                });
            }
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExtractRow {
    pub n: usize,
    pub re: Num,
    pub im: Num,
    pub abs: Num,
    pub aliasing_bound: Num,
    pub rounding_slack: Num,
    pub log_n: Num,
    pub log_abs: Num,
}

#[derive(Debug, Serialize)]
pub struct ExtractReport {
    pub command: &'static str,
    pub function: String,
    pub precision: &'static str,
    pub radius: Num,
    pub height: Option<Num>,
    pub samples: usize,
    pub rows: Vec<ExtractRow>,
}

impl Report for ExtractReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "n",
            "re",
            "im",
            "abs",
            "aliasing_bound",
            "rounding_slack",
            "log_n",
            "log_abs",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut row = vec![r.n.to_string()];
                row.extend(
                    [
                        r.re,
                        r.im,
                        r.abs,
                        r.aliasing_bound,
                        r.rounding_slack,
                        r.log_n,
                        r.log_abs,
                    ]
                    .iter()
                    .map(Num::to_string),
                );
                row
            })
            .collect()
    }
}

fn extract_row(
    index: usize,
    value: Complex64,
    aliasing_bound: f64,
    rounding_slack: f64,
) -> ExtractRow {
    let abs = value.norm();
    ExtractRow {
        n: index,
        re: Num(value.re),
        im: Num(value.im),
        abs: Num(abs),
        aliasing_bound: Num(aliasing_bound),
        rounding_slack: Num(rounding_slack),
        log_n: Num((index as f64).ln()),
        log_abs: Num(abs.ln()),
    }
}

fn rows_from<T: Real>(estimates: &[CoefficientEstimate<T>]) -> Vec<ExtractRow> {
    estimates
        .iter()
        .map(|e| extract_row(e.index, e.value_f64(), e.aliasing_bound, e.rounding_slack))
        .collect()
}

fn extract(args: &ExtractArgs) -> Result<ExtractReport, CliError> {
    let samples = match args.samples {
        Samples::Auto => default_samples(args.max_n),
        Samples::Count(n) => n,
    };
    let precision = match args.precision {
        Precision::Binary64 => "binary64",
        Precision::Extended => "extended",
    };
    let (radius, height, rows) = match (args.location.radius, args.location.height) {
        (Some(radius), _) => {
            let f = args.function.disc();
            let grid = QuadratureGrid::new(radius, samples)?;
            let rows = match args.precision {
                Precision::Binary64 => rows_from(&extract_series_in::<f64>(&f, &grid, args.max_n)?),
                Precision::Extended => {
                    rows_from(&extract_series_in::<Fixed>(&f, &grid, args.max_n)?)
                }
            };
            (radius, None, rows)
        }
        (None, Some(height)) => {
            let g = args.function.cusp()?;
            let grid = StripGrid::new(height, samples)?;
            let rows = match args.precision {
                Precision::Binary64 => rows_from(&strip_extract_series(&g, &grid, args.max_n)?),
                Precision::Extended => {
                    // Strip samples are the disc samples of the q-series at
                    // r = e^{-2πy}; only n ≥ 1 is reported.
                    let disc = grid.disc_grid();
                    let all = extract_series_in::<Fixed>(g.q_series(), &disc, args.max_n)?;
                    rows_from(&all[1..])
                }
            };
            (grid.disc_radius(), Some(Num(height)), rows)
        }
        (None, None) => unreachable!("clap requires --radius or --height"),
    };
    Ok(ExtractReport {
        command: "extract",
        function: args.function.to_string(),
        precision,
        radius: Num(radius),
        height,
        samples,
        rows,
    })
}

#[derive(Debug, Serialize)]
pub struct TauRow {
    pub n: usize,
    pub tau: String,
}

#[derive(Debug, Serialize)]
pub struct TauReport {
    pub command: &'static str,
    pub max_n: usize,
    pub rows: Vec<TauRow>,
}

impl Report for TauReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["n", "tau"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.n.to_string(), r.tau.clone()])
            .collect()
    }
}

fn tau(args: &TauArgs) -> Result<TauReport, CliError> {
    let series = ramanujan_tau(args.max_n)?;
    Ok(TauReport {
        command: "tau",
        max_n: args.max_n,
        rows: (1..=args.max_n)
            .map(|n| TauRow {
                n,
                tau: series.coeff(n).map(BigInt::to_string).unwrap_or_default(),
            })
            .collect(),
    })
}

#[derive(Debug, Serialize)]
pub struct FitJson {
    pub intercept: Num,
    pub slope: Num,
    pub r_squared: Num,
    pub points: usize,
}

impl From<LogFit> for FitJson {
    fn from(f: LogFit) -> Self {
        FitJson {
            intercept: Num(f.intercept),
            slope: Num(f.slope),
            r_squared: Num(f.r_squared),
            points: f.points,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ModelJson {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend: Option<&'static str>,
}

#[derive(Debug, Serialize)]
pub struct ConstantJson {
    pub m: u32,
    pub onset: usize,
    pub constant: Num,
    pub attained_at: usize,
}

#[derive(Debug, Serialize)]
pub struct DecayJson {
    pub command: &'static str,
    pub function: String,
    pub source: &'static str,
    pub target: &'static str,
    pub model: ModelJson,
    pub fit_range: [usize; 2],
    pub exponential_fit: FitJson,
    pub polynomial_fit: FitJson,
    pub raw_exponential_fit: Option<FitJson>,
    pub raw_polynomial_fit: Option<FitJson>,
    pub zero_count: usize,
    pub constants: Vec<ConstantJson>,
}

impl Report for DecayJson {
    fn csv_header(&self) -> &'static [&'static str] {
        &["field", "value"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<(String, String)> = vec![
            ("function".into(), self.function.clone()),
            ("source".into(), self.source.into()),
            ("target".into(), self.target.into()),
            ("model.kind".into(), self.model.kind.into()),
        ];
        if let Some(rate) = self.model.rate {
            rows.push(("model.rate".into(), rate.to_string()));
        }
        if let Some(exponent) = self.model.exponent {
            rows.push(("model.exponent".into(), exponent.to_string()));
        }
        if let Some(trend) = self.model.trend {
            rows.push(("model.trend".into(), trend.into()));
        }
        rows.push(("fit_range.lo".into(), self.fit_range[0].to_string()));
        rows.push(("fit_range.hi".into(), self.fit_range[1].to_string()));
        let fits = [
            ("exponential_fit", Some(&self.exponential_fit)),
            ("polynomial_fit", Some(&self.polynomial_fit)),
            ("raw_exponential_fit", self.raw_exponential_fit.as_ref()),
            ("raw_polynomial_fit", self.raw_polynomial_fit.as_ref()),
        ];
        for (name, fit) in fits {
            if let Some(fit) = fit {
                rows.push((format!("{name}.intercept"), fit.intercept.to_string()));
                rows.push((format!("{name}.slope"), fit.slope.to_string()));
                rows.push((format!("{name}.r_squared"), fit.r_squared.to_string()));
                rows.push((format!("{name}.points"), fit.points.to_string()));
            }
        }
        rows.push(("zero_count".into(), self.zero_count.to_string()));
        for c in &self.constants {
            rows.push((format!("constants.{}.onset", c.m), c.onset.to_string()));
            rows.push((
                format!("constants.{}.constant", c.m),
                c.constant.to_string(),
            ));
            rows.push((
                format!("constants.{}.attained_at", c.m),
                c.attained_at.to_string(),
            ));
        }
        rows.into_iter().map(|(k, v)| vec![k, v]).collect()
    }
}

fn decay(args: &DecayArgs) -> Result<DecayJson, CliError> {
    if args.min_n == 0 || args.min_n > args.max_n {
        return Err(CliError::Usage(format!(
            "need 1 ≤ min-n ≤ max-n, got min-n {} and max-n {}",
            args.min_n, args.max_n
        )));
    }
    let f = args.function.disc();
    let magnitudes = closed_form_coeffs(&f, args.max_n)?.magnitudes();
    let target = if args.envelope {
        FitTarget::RunningMax
    } else {
        FitTarget::Raw
    };
    let options = DecayOptions {
        target,
        m_list: args.m_list.clone(),
        onset: args.onset,
    };
    let report = fit_decay(&magnitudes[args.min_n..], args.min_n, &options)?;
    let model = match report.model {
        DecayModel::Exponential { rate } => ModelJson {
            kind: "exponential",
            rate: Some(Num(rate)),
            exponent: None,
            trend: None,
        },
        DecayModel::Polynomial { exponent, trend } => ModelJson {
            kind: "polynomial",
            rate: None,
            exponent: Some(Num(exponent)),
            trend: Some(match trend {
                Trend::Decay => "decay",
                Trend::Growth => "growth",
            }),
        },
        DecayModel::Undetermined => ModelJson {
            kind: "undetermined",
            rate: None,
            exponent: None,
            trend: None,
        },
    };
    Ok(DecayJson {
        command: "decay",
        function: args.function.to_string(),
        source: "closed-form",
        target: match target {
            FitTarget::Raw => "raw",
            FitTarget::RunningMax => "running-max",
        },
        model,
        fit_range: [report.fit_range.0, report.fit_range.1],
        exponential_fit: report.fits.exponential.into(),
        polynomial_fit: report.fits.polynomial.into(),
        raw_exponential_fit: report.raw_fits.map(|f| f.exponential.into()),
        raw_polynomial_fit: report.raw_fits.map(|f| f.polynomial.into()),
        zero_count: report.zero_count,
        constants: report
            .constants
            .values()
            .map(|c| ConstantJson {
                m: c.m,
                onset: c.onset,
                constant: Num(c.constant),
                attained_at: c.attained_at,
            })
            .collect(),
    })
}

#[derive(Debug, Serialize)]
pub struct SweepRowJson {
    pub delta: Num,
    pub a_m: Num,
    pub attained_at: usize,
    pub rescaled: Vec<Num>,
    pub implied: Vec<Num>,
}

#[derive(Debug, Serialize)]
pub struct SweepJson {
    pub command: &'static str,
    pub function: String,
    pub m: u32,
    pub max_n: usize,
    pub samples: usize,
    pub deltas: Vec<SweepRowJson>,
    pub min_implied: Vec<Num>,
    pub best_delta: Vec<Num>,
}

impl Report for SweepJson {
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "n",
            "delta",
            "a_m",
            "rescaled",
            "implied",
            "min_implied",
            "best_delta",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for row in &self.deltas {
            for i in 0..self.max_n {
                rows.push(vec![
                    (i + 1).to_string(),
                    row.delta.to_string(),
                    row.a_m.to_string(),
                    row.rescaled[i].to_string(),
                    row.implied[i].to_string(),
                    self.min_implied[i].to_string(),
                    self.best_delta[i].to_string(),
                ]);
            }
        }
        rows
    }
}

fn sweep(args: &DeltaSweepArgs) -> Result<SweepJson, CliError> {
    let f = args.function.disc();
    let result = delta_sweep(&f, args.max_n, args.m, &args.deltas)?;
    Ok(SweepJson {
        command: "delta-sweep",
        function: args.function.to_string(),
        m: result.m,
        max_n: result.n_max,
        samples: result.samples,
        deltas: result
            .rows
            .iter()
            .map(|r| SweepRowJson {
                delta: Num(r.delta),
                a_m: Num(r.a_m),
                attained_at: r.attained_at,
                rescaled: nums(&r.rescaled),
                implied: nums(&r.implied),
            })
            .collect(),
        min_implied: nums(&result.min_implied),
        best_delta: nums(&result.best_delta),
    })
}

#[derive(Debug, Serialize)]
pub struct RpRowJson {
    pub n: usize,
    pub tau: String,
    pub abs_tau: Num,
    pub envelope: Num,
    pub ratio: Num,
    pub divisors: u32,
    pub deligne_ratio: Num,
}

#[derive(Debug, Serialize)]
pub struct RpJson {
    pub command: &'static str,
    pub gamma: Num,
    pub max_n: usize,
    pub max_ratio: Num,
    pub max_ratio_at: usize,
    pub max_deligne_ratio: Num,
    pub max_deligne_ratio_at: usize,
    pub deligne_violations: Vec<usize>,
    pub rows: Vec<RpRowJson>,
}

impl Report for RpJson {
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "n",
            "tau",
            "abs_tau",
            "envelope",
            "ratio",
            "divisors",
            "deligne_ratio",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.tau.clone(),
                    r.abs_tau.to_string(),
                    r.envelope.to_string(),
                    r.ratio.to_string(),
                    r.divisors.to_string(),
                    r.deligne_ratio.to_string(),
                ]
            })
            .collect()
    }
}

fn rp(args: &RpCompareArgs) -> Result<RpJson, CliError> {
    let result = rp_compare(args.max_n, args.gamma)?;
    Ok(RpJson {
        command: "rp-compare",
        gamma: Num(result.gamma),
        max_n: args.max_n,
        max_ratio: Num(result.max_ratio),
        max_ratio_at: result.max_ratio_at,
        max_deligne_ratio: Num(result.max_deligne_ratio),
        max_deligne_ratio_at: result.max_deligne_ratio_at,
        deligne_violations: result.deligne_violations,
        rows: result
            .rows
            .into_iter()
            .map(|r| RpRowJson {
                n: r.n,
                tau: r.tau.to_string(),
                abs_tau: Num(r.abs_tau),
                envelope: Num(r.envelope),
                ratio: Num(r.ratio),
                divisors: r.divisors,
                deligne_ratio: Num(r.deligne_ratio),
            })
            .collect(),
    })
}
