//! CSV reports and plot-data files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use willmore_core::WillmoreReport;

use crate::error::CliError;

pub const THM_HEADER: &str = "# willmore theorem-report v1";
pub const CHECK_HEADER: &str = "# willmore check-report v1";

/// One theorem verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThmRow {
    pub theorem: String,
    pub n: usize,
    pub p: Option<f64>,
    pub r0: f64,
    pub profile: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub rv: f64,
    pub rv_spread: f64,
    pub b: f64,
    pub rho_norm: f64,
    #[serde(rename = "C_total")]
    pub c_total: f64,
    pub pass: bool,
}

impl ThmRow {
    pub fn new(report: &WillmoreReport, tol: f64) -> Self {
        Self {
            theorem: report.theorem.to_string(),
            n: report.n,
            p: report.p,
            r0: report.r0,
            profile: report.profile.clone(),
            lhs: report.lhs,
            rhs: report.rhs,
            margin: report.margin,
            rv: report.rv.rv,
            rv_spread: report.rv.full_spread,
            b: report.constants.b,
            rho_norm: report.constants.rho_norm,
            c_total: report.constants.c_total,
            pass: report.passes(tol),
        }
    }
}

/// One scalar check. `margin` is already relative to the checked bound, so the
/// row passes when `margin >= -tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub command: String,
    pub case: String,
    pub check: String,
    pub value: f64,
    pub margin: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(command: &str, case: &str, check: &str, value: f64, margin: f64, tol: f64) -> Self {
        Self { command: command.into(), case: case.into(), check: check.into(), value, margin, pass: margin >= -tol }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    Theorem(Vec<ThmRow>),
    Check(Vec<CheckRow>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Rows::Theorem(r) => r.len(),
            Rows::Check(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn failures(&self) -> usize {
        match self {
            Rows::Theorem(r) => r.iter().filter(|r| !r.pass).count(),
            Rows::Check(r) => r.iter().filter(|r| !r.pass).count(),
        }
    }

    /// The full CSV document, header comment included.
    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let (comment, body) = match self {
            Rows::Theorem(rows) => (THM_HEADER, serialize(rows)?),
            Rows::Check(rows) => (CHECK_HEADER, serialize(rows)?),
        };
        let mut out = format!("{comment}\n").into_bytes();
        out.extend(body);
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let bytes = self.to_csv().map_err(|source| CliError::Csv { path: path.to_owned(), source })?;
        fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_owned(), source })
    }
}

fn serialize<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// A named `(t, value)` sequence destined for one plot-data file.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    /// File stem.
    pub name: String,
    /// Column labels for the header line.
    pub columns: (String, String),
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, x: &str, y: &str, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), columns: (x.into(), y.into()), points }
    }

    fn render(&self) -> String {
        let mut s = format!("# {}\t{}\n", self.columns.0, self.columns.1);
        for (x, y) in &self.points {
            writeln!(s, "{x:.16e}\t{y:.16e}").expect("writing to a String");
        }
        s
    }
}

/// Writes each series to `<dir>/<name>.dat` with 17 significant digits.
pub fn emit_plot_data(dir: &Path, series: &[Series]) -> Result<Vec<PathBuf>, CliError> {
    if series.is_empty() {
        return Err(CliError::Usage("no plot series to write".into()));
    }
    if let Some(s) = series.iter().find(|s| s.points.is_empty()) {
        return Err(CliError::Usage(format!("plot series `{}` is empty", s.name)));
    }
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
    series
        .iter()
        .map(|s| {
            let path = dir.join(format!("{}.dat", s.name));
            fs::write(&path, s.render()).map_err(|source| CliError::Io { path: path.clone(), source })?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_rows_serialize_with_header() {
        let rows = Rows::Check(vec![CheckRow::new("lemma31", "p=2;q=3", "pointwise", 1.5, -2e-7, 1e-6)]);
        let text = String::from_utf8(rows.to_csv().unwrap()).unwrap();
        assert_eq!(text, "# willmore check-report v1\ncommand,case,check,value,margin,pass\nlemma31,p=2;q=3,pointwise,1.5,-2e-7,true\n");
    }

    #[test]
    fn plot_values_have_seventeen_digits() {
        let s = Series::new("x", "t", "v", vec![(0.1, 1.0 / 3.0)]);
        let line = s.render().lines().nth(1).unwrap().to_owned();
        let (_, v) = line.split_once('\t').unwrap();
        assert_eq!(v, "3.3333333333333331e-1");
        assert_eq!(v.parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn empty_series_is_rejected() {
        let dir = std::env::temp_dir();
        assert!(emit_plot_data(&dir, &[Series::new("e", "t", "v", vec![])]).is_err());
        assert!(emit_plot_data(&dir, &[]).is_err());
    }
}
