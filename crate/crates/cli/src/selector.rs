//! Function selector strings such as `geometric:2` or `q-monomial:3`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use qdecay_core::{CuspFunctionSpec, FunctionSpec};

use crate::CliError;

/// A parsed `--function` value.
#[derive(Debug, Clone)]
pub enum Selector {
    Disc(FunctionSpec),
    Cusp(CuspFunctionSpec),
}

#[derive(Debug, Clone)]
pub struct FunctionArg {
    pub text: String,
    pub selector: Selector,
}

impl FunctionArg {
    /// The disc function; for cusp selectors, the q-series.
    pub fn disc(&self) -> FunctionSpec {
        match &self.selector {
            Selector::Disc(f) => f.clone(),
            Selector::Cusp(g) => g.q_series().clone(),
        }
    }

    /// The half-plane function; disc selectors must vanish at the origin and
    /// be analytic on the unit disc.
    pub fn cusp(&self) -> Result<CuspFunctionSpec, CliError> {
        match &self.selector {
            Selector::Cusp(g) => Ok(g.clone()),
            Selector::Disc(f) => CuspFunctionSpec::from_q_series(f.clone()).map_err(|e| {
                CliError::Usage(format!(
                    "--height needs a cusp function (q-monomial, q-polynomial, q-geometric, delta): {e}"
                ))
            }),
        }
    }
}

impl fmt::Display for FunctionArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for FunctionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(FunctionArg {
            text: s.to_string(),
            selector: parse_selector(s)?,
        })
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    let bad = || format!("invalid complex number '{s}'");
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(Complex64::from).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn parse_list(args: &str) -> Result<Vec<Complex64>, String> {
    args.split(',').map(parse_complex).collect()
}

fn parse_exponent(args: &str) -> Result<u32, String> {
    args.trim()
        .parse()
        .map_err(|_| format!("invalid exponent '{args}'"))
}

const KNOWN: &str = "constant:c, monomial:k, polynomial:a0,a1,.., geometric:c, eta24-delta, \
                     q-monomial:k, q-polynomial:0,a1,.., q-geometric:c, delta";

pub fn parse_selector(s: &str) -> Result<Selector, String> {
    let (name, args) = match s.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a)),
        None => (s.trim(), None),
    };
    let need = || args.ok_or_else(|| format!("function '{name}' needs an argument"));
    let core = |e: qdecay_core::Error| e.to_string();
    let selector = match name {
        "constant" => Selector::Disc(FunctionSpec::constant(parse_complex(need()?)?)),
        "monomial" => Selector::Disc(FunctionSpec::monomial(parse_exponent(need()?)?)),
        "polynomial" => Selector::Disc(FunctionSpec::polynomial(parse_list(need()?)?)),
        "geometric" => {
            Selector::Disc(FunctionSpec::geometric(parse_complex(need()?)?).map_err(core)?)
        }
        "eta24-delta" if args.is_none() => Selector::Disc(FunctionSpec::eta24_delta()),
        "q-monomial" => {
            Selector::Cusp(CuspFunctionSpec::q_monomial(parse_exponent(need()?)?).map_err(core)?)
        }
        "q-polynomial" => {
            Selector::Cusp(CuspFunctionSpec::q_polynomial(parse_list(need()?)?).map_err(core)?)
        }
        "q-geometric" => {
            Selector::Cusp(CuspFunctionSpec::q_geometric(parse_complex(need()?)?).map_err(core)?)
        }
        "delta" if args.is_none() => Selector::Cusp(CuspFunctionSpec::delta_eta24()),
        _ => return Err(format!("unknown function selector '{s}' (known: {KNOWN})")),
    };
    Ok(selector)
}
