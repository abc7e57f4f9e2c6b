//! The algebra file: a JSON document holding the metric, the structure
//! constants (1-based, `i < j`) and optionally a 2-cocycle.
//!
//! Rational-mode entries are `"p/q"` strings; float-mode entries are JSON
//! numbers written in shortest round-trip form.

use nilcurv::scalar::{format_rational, parse_rational};
use nilcurv::{CocycleData, LiePresentation, Mat, MetricLieAlgebra, MetricTensor, Mode, Rational, Scalar, Tolerance};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileMode {
    Rational,
    Float,
}

impl From<FileMode> for Mode {
    fn from(m: FileMode) -> Mode {
        match m {
            FileMode::Rational => Mode::Rational,
            FileMode::Float => Mode::Float,
        }
    }
}

impl From<Mode> for FileMode {
    fn from(m: Mode) -> FileMode {
        match m {
            Mode::Rational => FileMode::Rational,
            Mode::Float => FileMode::Float,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    pub mode: FileMode,
    pub metric: Vec<Vec<Value>>,
    pub brackets: Vec<BracketRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<CocycleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// `[e_i, e_j] += c e_k`, 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketRecord {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: Value,
}

/// `ω(u,v) = Σ ⟨S_l u, v⟩ z_l`; each `S_l` is skew for the metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleRecord {
    pub p: usize,
    pub z_metric: Vec<Vec<Value>>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<Vec<Value>>>,
}

/// Scalars with a file encoding.
pub trait FileScalar: Scalar {
    fn encode(&self) -> Value;
    fn decode(v: &Value, at: &str) -> Result<Self>;
}

impl FileScalar for f64 {
    fn encode(&self) -> Value {
        serde_json::Number::from_f64(*self).map_or(Value::Null, Value::Number)
    }

    fn decode(v: &Value, at: &str) -> Result<Self> {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::Validation(format!("{at}: float-mode entries must be finite JSON numbers, got {v}")))
    }
}

impl FileScalar for Rational {
    fn encode(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn decode(v: &Value, at: &str) -> Result<Self> {
        let bad = || CliError::Validation(format!("{at}: rational-mode entries must be \"p/q\" strings, got {v}"));
        match v {
            Value::String(s) => parse_rational(s).ok_or_else(bad),
            Value::Number(n) if n.is_i64() => Ok(Rational::from_i64(n.as_i64().expect("checked"))),
            _ => Err(bad()),
        }
    }
}

/// A validated file in a fixed arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct Document<T: Scalar> {
    pub algebra: MetricLieAlgebra<T>,
    pub cocycle: Option<CocycleData<T>>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyDocument {
    Rational(Document<Rational>),
    Float(Document<f64>),
}

impl AnyDocument {
    pub fn mode(&self) -> Mode {
        match self {
            AnyDocument::Rational(_) => Mode::Rational,
            AnyDocument::Float(_) => Mode::Float,
        }
    }

    pub fn tolerance(&self) -> Option<f64> {
        match self {
            AnyDocument::Rational(d) => d.tolerance,
            AnyDocument::Float(d) => d.tolerance,
        }
    }

    /// Re-expresses the document in `mode`. Floats become the exact dyadic
    /// rationals they denote.
    pub fn into_mode(self, mode: Mode) -> Result<AnyDocument> {
        Ok(match (self, mode) {
            (AnyDocument::Rational(d), Mode::Float) => AnyDocument::Float(convert(&d)?),
            (AnyDocument::Float(d), Mode::Rational) => AnyDocument::Rational(convert(&d)?),
            (same, _) => same,
        })
    }

    pub fn to_file(&self) -> AlgebraFile {
        match self {
            AnyDocument::Rational(d) => emit(d),
            AnyDocument::Float(d) => emit(d),
        }
    }
}

fn convert<T: Scalar, U: Scalar>(d: &Document<T>) -> Result<Document<U>> {
    let map = |m: &Mat<T>| -> Result<Mat<U>> {
        let mut out = Mat::zeros(m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out[(r, c)] = U::from_f64(m[(r, c)].to_f64())
                    .ok_or_else(|| CliError::Validation(format!("entry {} is not finite", m[(r, c)])))?;
            }
        }
        Ok(out)
    };
    let tol = Tolerance::default();
    let algebra = d.algebra.convert(&tol)?;
    let cocycle = match &d.cocycle {
        Some(c) => Some(CocycleData::new(
            c.s.iter().map(map).collect::<Result<_>>()?,
            MetricTensor::new(map(c.z_metric.matrix())?, &tol)?,
        )?),
        None => None,
    };
    Ok(Document {
        algebra,
        cocycle,
        tolerance: d.tolerance,
    })
}

pub fn parse_str(text: &str) -> Result<AlgebraFile> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and validates, in the file's own mode.
pub fn load_str(text: &str) -> Result<AnyDocument> {
    parse_str(text)?.validate()
}

pub fn to_json(file: &AlgebraFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("algebra files serialise");
    s.push('\n');
    s
}

impl AlgebraFile {
    pub fn validate(&self) -> Result<AnyDocument> {
        Ok(match self.mode {
            FileMode::Rational => AnyDocument::Rational(self.document()?),
            FileMode::Float => AnyDocument::Float(self.document()?),
        })
    }

    fn document<T: FileScalar>(&self) -> Result<Document<T>> {
        let n = self.dim;
        if n == 0 {
            return Err(CliError::Validation("dim must be at least 1".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Validation(format!("tolerance must be positive, got {t}")));
            }
        }
        let tol = Tolerance::new(self.tolerance.unwrap_or(nilcurv::scalar::DEFAULT_REL_TOL));
        let metric = MetricTensor::new(symmetric_matrix::<T>(&self.metric, n, "metric")?, &tol)
            .map_err(|e| CliError::Validation(format!("metric: {e}")))?;

        let mut lie = LiePresentation::abelian(n);
        for (idx, b) in self.brackets.iter().enumerate() {
            let at = format!("brackets[{idx}]");
            if b.i < 1 || b.j > n || b.k < 1 || b.k > n {
                return Err(CliError::Validation(format!(
                    "{at}: indices must lie in 1..={n}, got (i, j, k) = ({}, {}, {})",
                    b.i, b.j, b.k
                )));
            }
            if b.i >= b.j {
                return Err(CliError::Validation(format!("{at}: requires i < j, got i = {}, j = {}", b.i, b.j)));
            }
            let c = T::decode(&b.c, &format!("{at}.c"))?;
            lie.add(b.i - 1, b.j - 1, b.k - 1, c);
        }
        let algebra = MetricLieAlgebra::new(lie, metric)?;

        let cocycle = match &self.cocycle {
            None => None,
            Some(rec) => {
                if rec.s.len() != rec.p {
                    return Err(CliError::Validation(format!(
                        "cocycle: p = {} but S has {} matrices",
                        rec.p,
                        rec.s.len()
                    )));
                }
                let z = MetricTensor::new(symmetric_matrix::<T>(&rec.z_metric, rec.p, "cocycle.z_metric")?, &tol)
                    .map_err(|e| CliError::Validation(format!("cocycle.z_metric: {e}")))?;
                let s = rec
                    .s
                    .iter()
                    .enumerate()
                    .map(|(l, rows)| matrix::<T>(rows, n, &format!("cocycle.S[{l}]")))
                    .collect::<Result<Vec<_>>>()?;
                let c = CocycleData::new(s, z)?;
                let scale = c.s.iter().map(|m| m.max_abs().to_f64()).fold(1.0, f64::max);
                if !tol.is_zero(&c.skew_residual(&algebra.metric), scale) {
                    return Err(CliError::Validation("cocycle.S: matrices must be skew for the metric".into()));
                }
                Some(c)
            }
        };
        Ok(Document {
            algebra,
            cocycle,
            tolerance: self.tolerance,
        })
    }
}

fn matrix<T: FileScalar>(rows: &[Vec<Value>], n: usize, what: &str) -> Result<Mat<T>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Validation(format!("{what} must be {n}×{n}")));
    }
    let mut m = Mat::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            m[(r, c)] = T::decode(v, &format!("{what}[{}][{}]", r + 1, c + 1))?;
        }
    }
    Ok(m)
}

fn symmetric_matrix<T: FileScalar>(rows: &[Vec<Value>], n: usize, what: &str) -> Result<Mat<T>> {
    let m = matrix::<T>(rows, n, what)?;
    for i in 0..n {
        for j in i + 1..n {
            if m[(i, j)] != m[(j, i)] {
                return Err(CliError::Validation(format!(
                    "{what} is not symmetric at entries ({}, {}) and ({}, {})",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(m)
}

fn encode_matrix<T: FileScalar>(m: &Mat<T>) -> Vec<Vec<Value>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)].encode()).collect()).collect()
}

pub fn emit<T: FileScalar>(d: &Document<T>) -> AlgebraFile {
    let a = &d.algebra;
    AlgebraFile {
        dim: a.dim(),
        mode: T::MODE.into(),
        metric: encode_matrix(a.metric.matrix()),
        brackets: a
            .lie
            .entries()
            .into_iter()
            .map(|(i, j, k, c)| BracketRecord {
                i: i + 1,
                j: j + 1,
                k: k + 1,
                c: c.encode(),
            })
            .collect(),
        cocycle: d.cocycle.as_ref().map(|c| CocycleRecord {
            p: c.p(),
            z_metric: encode_matrix(c.z_metric.matrix()),
            s: c.s.iter().map(encode_matrix).collect(),
        }),
        tolerance: d.tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEISENBERG: &str = r#"{
        "dim": 3, "mode": "rational",
        "metric": [["1","0","0"],["0","1","0"],["0","0","1/2"]],
        "brackets": [{"i": 1, "j": 2, "k": 3, "c": "3/4"}]
    }"#;

    #[test]
    fn parses_rational_entries() {
        let AnyDocument::Rational(d) = load_str(HEISENBERG).unwrap() else {
            panic!("mode")
        };
        assert_eq!(d.algebra.lie.structure(0, 1, 2), Rational::from_ratio(3, 4));
        assert_eq!(d.algebra.metric.matrix()[(2, 2)], Rational::from_ratio(1, 2));
    }

    #[test]
    fn repeated_records_accumulate() {
        let text = HEISENBERG.replace(
            r#"[{"i": 1, "j": 2, "k": 3, "c": "3/4"}]"#,
            r#"[{"i": 1, "j": 2, "k": 3, "c": "3/4"}, {"i": 1, "j": 2, "k": 3, "c": "1/4"}]"#,
        );
        let AnyDocument::Rational(d) = load_str(&text).unwrap() else {
            panic!("mode")
        };
        assert_eq!(d.algebra.lie.structure(0, 1, 2), Rational::from_i64(1));
    }

    #[test]
    fn rejects_reversed_indices() {
        let text = HEISENBERG.replace(r#""i": 1, "j": 2"#, r#""i": 2, "j": 1"#);
        let err = load_str(&text).unwrap_err().to_string();
        assert!(err.contains("i < j"), "{err}");
    }

    #[test]
    fn rejects_unknown_fields_with_position() {
        let text = HEISENBERG.replace(r#""dim": 3"#, r#""dim": 3, "colour": 1"#);
        match load_str(&text).unwrap_err() {
            CliError::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("colour"), "{message}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn floats_become_exact_dyadics() {
        let text = HEISENBERG
            .replace("\"rational\"", "\"float\"")
            .replace("\"3/4\"", "0.75")
            .replace("\"1/2\"", "0.5")
            .replace("\"1\"", "1")
            .replace("\"0\"", "0");
        let d = load_str(&text).unwrap().into_mode(Mode::Rational).unwrap();
        let AnyDocument::Rational(d) = d else { panic!("mode") };
        assert_eq!(d.algebra.lie.structure(0, 1, 2), Rational::from_ratio(3, 4));
    }
}
