use std::collections::BTreeMap;

use nilcurv::families::{FamilySpec, Sign, Variant, FAMILY_NAMES};
use nilcurv::scalar::{format_rational, parse_rational};
use nilcurv::{Mode, Rational, Scalar};
use num::bigint::BigInt;
use serde_json::Value;

use crate::error::{CliError, Result};
use crate::format::{emit, AlgebraFile, Document, FileScalar};

/// Family parameters as given on the command line; `None` means the
/// family default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FamilyParams {
    pub alpha: Option<String>,
    pub r: Option<String>,
    pub a: Option<String>,
    pub a2: Option<String>,
    pub a3: Option<String>,
    pub p: Option<String>,
    pub eps: Option<Sign>,
    pub sign: Option<Sign>,
}

/// Exact value of `"p/q"`, an integer, or a decimal such as `-0.125` or `2.5e-3`.
pub fn parse_number(s: &str) -> Result<Rational> {
    let bad = || CliError::Flag(format!("`{s}` is not a number"));
    let t = s.trim();
    if t.contains('/') {
        return parse_rational(t).ok_or_else(bad);
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(all);
    let factor = Rational::from_integer(num::pow(ten, scale.unsigned_abs() as usize));
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Ok(if neg { -value } else { value })
}

fn param<T: FileScalar>(given: &Option<String>, default: (i64, i64)) -> Result<T> {
    let q = match given {
        Some(s) => parse_number(s)?,
        None => Rational::new(BigInt::from(default.0), BigInt::from(default.1)),
    };
    let v = if T::is_exact() {
        Value::String(format_rational(&q))
    } else {
        f64::encode(&Scalar::to_f64(&q))
    };
    T::decode(&v, "parameter")
}

fn allowed(name: &str) -> &'static [&'static str] {
    match name {
        "l6_19" => &["alpha"],
        "dim7_147e" => &["r", "a"],
        "qe_dim5" => &["alpha", "eps", "sign"],
        "qe_dim6" | "three_step_dim7" => &["a2", "a3", "eps", "sign"],
        "three_step_dim6_a" | "three_step_dim6_b" => &["alpha", "sign"],
        "example10" => &["p", "r"],
        _ => &[],
    }
}

pub fn family_spec<T: FileScalar>(name: &str, p: &FamilyParams) -> Result<FamilySpec<T>> {
    if !FAMILY_NAMES.contains(&name) {
        return Err(CliError::Flag(format!(
            "unknown family `{name}` (expected one of {})",
            FAMILY_NAMES.join(", ")
        )));
    }
    let given: BTreeMap<&str, bool> = [
        ("alpha", p.alpha.is_some()),
        ("r", p.r.is_some()),
        ("a", p.a.is_some()),
        ("a2", p.a2.is_some()),
        ("a3", p.a3.is_some()),
        ("p", p.p.is_some()),
        ("eps", p.eps.is_some()),
        ("sign", p.sign.is_some()),
    ]
    .into_iter()
    .collect();
    for (flag, set) in given {
        if set && !allowed(name).contains(&flag) {
            return Err(CliError::Flag(format!("--{flag} does not apply to family {name}")));
        }
    }
    let eps = p.eps.unwrap_or(Sign::Plus);
    let sign = p.sign.unwrap_or(Sign::Plus);
    Ok(match name {
        "l6_19" => FamilySpec::L619 {
            alpha: param(&p.alpha, (1, 1))?,
        },
        "dim7_147e" => FamilySpec::Dim7_147e {
            r: param(&p.r, (1, 2))?,
            a: param(&p.a, (1, 1))?,
        },
        "qe_dim5" => FamilySpec::QeDim5 {
            alpha: param(&p.alpha, (1, 1))?,
            eps,
            sign,
        },
        "qe_dim6" => FamilySpec::QeDim6 {
            alpha2: param(&p.a2, (3, 1))?,
            alpha3: param(&p.a3, (4, 1))?,
            eps,
            sign,
        },
        "three_step_dim6_a" | "three_step_dim6_b" => FamilySpec::ThreeStepDim6 {
            alpha: param(&p.alpha, (1, 1))?,
            variant: if name.ends_with('a') { Variant::A } else { Variant::B },
            sign,
        },
        "three_step_dim7" => FamilySpec::ThreeStepDim7 {
            alpha2: param(&p.a2, (3, 1))?,
            alpha3: param(&p.a3, (4, 1))?,
            eps,
            sign,
        },
        "conti8" => FamilySpec::Conti8,
        "example7" => FamilySpec::Example7,
        _ => FamilySpec::Example10 {
            p: param(&p.p, (1, 1))?,
            r: param(&p.r, (1, 1))?,
        },
    })
}

fn build<T: FileScalar>(name: &str, p: &FamilyParams) -> Result<AlgebraFile> {
    let f = family_spec::<T>(name, p)?.build()?;
    Ok(emit(&Document {
        algebra: f.algebra,
        cocycle: f.cocycle,
        tolerance: None,
    }))
}

pub fn family_file(name: &str, p: &FamilyParams, mode: Mode) -> Result<AlgebraFile> {
    match mode {
        Mode::Rational => build::<Rational>(name, p),
        Mode::Float => build::<f64>(name, p),
    }
}
