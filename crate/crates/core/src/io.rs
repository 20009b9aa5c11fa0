//! File formats: problem files, matrix files, run reports, and the residual
//! history CSV.
//!
//! Problem and matrix files are JSON. Matrices are row-major arrays of rows;
//! an entry is either a bare real or an `[re, im]` pair.
//!
//! ```json
//! {
//!   "format_version": "gcale-problem/1",
//!   "n": 2,
//!   "a": [[-0.95, 0.0], [0.0, -0.95]],
//!   "b": [[0.54, [0.0, 0.01]], [[0.0, -0.01], 0.54]],
//!   "q": [[2.0, 0.0], [0.0, 2.0]]
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::comparison::{Comparison, IterateError};
use crate::conditions::ConditionReport;
use crate::error::{Error, Result};
use crate::matrix::{AsMatrix, CMatrix, ComplexMatrix, HermitianMatrix, hermitian_project};
use crate::oracle::OracleResult;
use crate::reformulation::ProblemInstance;
use crate::solver::{ResidualRecord, SolveReport, SolveStatus};

pub const PROBLEM_FORMAT: &str = "gcale-problem/1";
pub const MATRIX_FORMAT: &str = "gcale-matrix/1";
pub const REPORT_FORMAT: &str = "gcale-report/1";

/// One matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> Complex64 {
        match self {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    pub fn from_value(z: Complex64) -> Self {
        if z.im == 0.0 { Entry::Real(z.re) } else { Entry::Complex([z.re, z.im]) }
    }
}

pub type MatrixRows = Vec<Vec<Entry>>;

pub fn rows_from_matrix(m: &impl AsMatrix) -> MatrixRows {
    let m = m.as_matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Entry::from_value(m[(i, j)])).collect()).collect()
}

fn format_error(field: &str, message: impl Into<String>) -> Error {
    Error::Format { field: field.to_string(), message: message.into() }
}

pub fn matrix_from_rows(field: &str, rows: &MatrixRows, n: usize) -> Result<ComplexMatrix> {
    if rows.len() != n {
        return Err(format_error(field, format!("expected {n} rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(format_error(&format!("{field}[{i}]"), format!("expected {n} entries, found {}", row.len())));
        }
    }
    ComplexMatrix::new(CMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
        .map_err(|e| format_error(field, e.to_string()))
}

fn parse_json<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| format_error(what, format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn check_version(found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(format_error("format_version", format!("expected \"{expected}\", found \"{found}\"")));
    }
    Ok(())
}

/// On-disk form of a problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub format_version: String,
    pub n: usize,
    pub a: MatrixRows,
    pub b: MatrixRows,
    pub q: MatrixRows,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: Self = parse_json("problem file", text)?;
        check_version(&f.format_version, PROBLEM_FORMAT)?;
        if f.n == 0 {
            return Err(format_error("n", "must be positive"));
        }
        Ok(f)
    }

    pub fn from_instance(p: &ProblemInstance) -> Self {
        Self {
            format_version: PROBLEM_FORMAT.to_string(),
            n: p.dim(),
            a: rows_from_matrix(p.a()),
            b: rows_from_matrix(p.b()),
            q: rows_from_matrix(p.q()),
        }
    }

    /// Validates dimensions and that `q` is Hermitian positive definite.
    pub fn to_instance(&self, asym_tol: f64) -> Result<ProblemInstance> {
        let a = matrix_from_rows("a", &self.a, self.n)?;
        let b = matrix_from_rows("b", &self.b, self.n)?;
        let q = matrix_from_rows("q", &self.q, self.n)?;
        let q = hermitian_project(&q, asym_tol).map_err(|e| format_error("q", e.to_string()))?;
        ProblemInstance::new(a, b, q).map_err(|e| format_error("q", e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("{\n");
        let _ = writeln!(s, "  \"format_version\": {},", json(&self.format_version));
        let _ = writeln!(s, "  \"n\": {},", self.n);
        write_rows(&mut s, "a", &self.a, true);
        write_rows(&mut s, "b", &self.b, true);
        write_rows(&mut s, "q", &self.q, false);
        s.push_str("}\n");
        s
    }
}

/// On-disk form of a single Hermitian matrix (a custom `Q̃` or `M`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub format_version: String,
    pub n: usize,
    pub data: MatrixRows,
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: Self = parse_json("matrix file", text)?;
        check_version(&f.format_version, MATRIX_FORMAT)?;
        Ok(f)
    }

    pub fn from_matrix(m: &impl AsMatrix) -> Self {
        Self { format_version: MATRIX_FORMAT.to_string(), n: m.dim(), data: rows_from_matrix(m) }
    }

    pub fn to_hermitian(&self, asym_tol: f64) -> Result<HermitianMatrix> {
        let m = matrix_from_rows("data", &self.data, self.n)?;
        hermitian_project(&m, asym_tol).map_err(|e| format_error("data", e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("{\n");
        let _ = writeln!(s, "  \"format_version\": {},", json(&self.format_version));
        let _ = writeln!(s, "  \"n\": {},", self.n);
        write_rows(&mut s, "data", &self.data, false);
        s.push_str("}\n");
        s
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn format_entry(e: &Entry) -> String {
    match e {
        Entry::Real(re) => json(re),
        Entry::Complex([re, im]) => format!("[{}, {}]", json(re), json(im)),
    }
}

fn write_rows(s: &mut String, key: &str, rows: &MatrixRows, trailing_comma: bool) {
    let _ = writeln!(s, "  \"{key}\": [");
    for (i, row) in rows.iter().enumerate() {
        let sep = if i + 1 < rows.len() { "," } else { "" };
        let entries: Vec<String> = row.iter().map(format_entry).collect();
        let _ = writeln!(s, "    [{}]{sep}", entries.join(", "));
    }
    let _ = writeln!(s, "  ]{}", if trailing_comma { "," } else { "" });
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub iterations: usize,
    pub status: SolveStatus,
    pub converged: bool,
    pub e_x: f64,
    pub e_y: f64,
    pub e: f64,
    pub delta: f64,
    pub d0_weighted: f64,
    pub d0_spectral: f64,
    pub a_priori_bound_final: Option<f64>,
    pub enclosure_ok: bool,
    pub equation_residual: f64,
    pub x_hat: MatrixRows,
    pub y_final: MatrixRows,
}

impl From<&SolveReport> for SolveSummary {
    fn from(r: &SolveReport) -> Self {
        Self {
            iterations: r.iterations,
            status: r.status,
            converged: r.converged,
            e_x: r.final_residual.e_x,
            e_y: r.final_residual.e_y,
            e: r.final_residual.e,
            delta: r.delta,
            d0_weighted: r.d0_weighted,
            d0_spectral: r.d0_spectral,
            a_priori_bound_final: r.a_priori_bound_final,
            enclosure_ok: r.enclosure_ok,
            equation_residual: r.equation_residual_final,
            x_hat: rows_from_matrix(&r.x_hat),
            y_final: rows_from_matrix(&r.y_final),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub x: MatrixRows,
    pub residual: f64,
    pub hermiticity_defect: f64,
    pub definite: bool,
    pub rcond: f64,
}

impl From<&OracleResult> for OracleSummary {
    fn from(r: &OracleResult) -> Self {
        Self {
            x: rows_from_matrix(&r.x),
            residual: r.residual,
            hermiticity_defect: r.hermiticity_defect,
            definite: r.definite,
            rcond: r.rcond,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub true_error_spectral: f64,
    pub true_error_weighted: f64,
    pub oracle_residual: f64,
    pub bound_checked: bool,
    pub bound_holds: bool,
    pub bound_slack: f64,
}

impl From<&Comparison> for OracleComparison {
    fn from(c: &Comparison) -> Self {
        Self {
            true_error_spectral: c.true_error_spectral,
            true_error_weighted: c.true_error_weighted,
            oracle_residual: c.oracle.residual,
            bound_checked: c.bound_checked,
            bound_holds: c.bound_holds,
            bound_slack: c.bound_slack,
        }
    }
}

/// Everything one CLI invocation produced. Absent sections are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_report: Option<ConditionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve_report: Option<SolveSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_comparison: Option<OracleComparison>,
    /// Wall-clock seconds per phase.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Default for RunReport {
    fn default() -> Self {
        Self {
            format_version: REPORT_FORMAT.to_string(),
            condition_report: None,
            solve_report: None,
            oracle: None,
            oracle_comparison: None,
            timings: None,
        }
    }
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let r: Self = parse_json("report", text)?;
        check_version(&r.format_version, REPORT_FORMAT)?;
        Ok(r)
    }
}

pub const HISTORY_HEADER: &str = "i,E_i(X),E_i(Y),E_i,a_priori_bound_i";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Residual history as CSV. With `errors`, two extra columns carry the
/// weighted-trace-norm distances of `X_i` and `Y_i` to the direct solution.
pub fn history_csv(records: &[ResidualRecord], errors: Option<&[IterateError]>) -> String {
    let mut s = String::from(HISTORY_HEADER);
    if errors.is_some() {
        s.push_str(",err_x_weighted,err_y_weighted");
    }
    s.push('\n');
    for (k, r) in records.iter().enumerate() {
        let _ = write!(s, "{},{:e},{:e},{:e},{}", r.i, r.e_x, r.e_y, r.e, opt(r.a_priori_bound));
        if let Some(errs) = errors {
            let e = errs.get(k).filter(|e| e.n == r.i);
            let _ = write!(s, ",{},{}", opt(e.map(|e| e.err_x)), opt(e.map(|e| e.err_y)));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
  "format_version": "gcale-problem/1",
  "n": 2,
  "a": [
    [-0.95, 0.0],
    [0.0, -0.95]
  ],
  "b": [
    [0.54, [0.0, 0.01]],
    [[0.0, -0.01], 0.54]
  ],
  "q": [
    [2.0, 0.1],
    [0.1, 2.0]
  ]
}
"#;

    #[test]
    fn parse_and_rewrite_is_identity() {
        let f = ProblemFile::parse(EXAMPLE).unwrap();
        assert_eq!(f.to_text(), EXAMPLE);
        let p = f.to_instance(1e-10).unwrap();
        assert_eq!(p.b().as_matrix()[(0, 1)], Complex64::new(0.0, 0.01));
        assert_eq!(ProblemFile::from_instance(&p), f);
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = ProblemFile::parse("{\n  \"n\": 2,\n  oops\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn wrong_shapes_name_the_field() {
        let text = EXAMPLE.replace("[0.1, 2.0]", "[0.1]");
        let err = ProblemFile::parse(&text).unwrap().to_instance(1e-10).unwrap_err();
        assert!(err.to_string().starts_with("q[1]"), "{err}");

        let text = EXAMPLE.replace("\"n\": 2", "\"n\": 3");
        let err = ProblemFile::parse(&text).unwrap().to_instance(1e-10).unwrap_err();
        assert!(err.to_string().starts_with("a:"), "{err}");
    }

    #[test]
    fn q_must_be_hermitian_pd() {
        let text = EXAMPLE.replace("[0.1, 2.0]", "[0.7, 2.0]");
        assert!(ProblemFile::parse(&text).unwrap().to_instance(1e-10).is_err());
        let text = EXAMPLE.replace("[2.0, 0.1]", "[-2.0, 0.1]");
        assert!(ProblemFile::parse(&text).unwrap().to_instance(1e-10).is_err());
    }

    #[test]
    fn version_is_checked() {
        let text = EXAMPLE.replace("gcale-problem/1", "gcale-problem/9");
        assert!(ProblemFile::parse(&text).unwrap_err().to_string().starts_with("format_version"));
    }

    #[test]
    fn history_layout() {
        let rec = [
            ResidualRecord { i: 0, e_x: 2.0, e_y: 0.5, e: 2.0, a_priori_bound: Some(4.0) },
            ResidualRecord { i: 1, e_x: 0.25, e_y: 0.125, e: 0.25, a_priori_bound: None },
        ];
        let csv = history_csv(&rec, None);
        assert_eq!(csv, "i,E_i(X),E_i(Y),E_i,a_priori_bound_i\n0,2e0,5e-1,2e0,4e0\n1,2.5e-1,1.25e-1,2.5e-1,\n");
        let errs = [IterateError { n: 0, err_x: 1.0, err_y: 3.0, bound: Some(4.0) }];
        let csv = history_csv(&rec, Some(&errs));
        assert!(csv.lines().next().unwrap().ends_with(",err_x_weighted,err_y_weighted"));
        assert!(csv.lines().nth(1).unwrap().ends_with(",1e0,3e0"));
        assert!(csv.lines().nth(2).unwrap().ends_with(",,"));
    }
}
