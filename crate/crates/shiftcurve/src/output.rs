//! CSV tables and coefficient files.
//!
//! Every table is plain CSV with a single header line. Floats use Rust's
//! shortest round-trip formatting, so identical values always print
//! identically.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use shiftcurve_core::spectral::frequencies;
use shiftcurve_core::{RateStudy, RiskReport, Template};

use crate::error::{AppError, Result};

/// Named CSV files produced by one command.
pub type Bundle = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| AppError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Grid abscissae `x_m = m / grid`.
pub fn abscissae(grid: usize) -> Vec<f64> {
    (0..grid).map(|m| m as f64 / grid as f64).collect()
}

/// One row per curve; the header lists the abscissae.
pub fn curves_table(curves: &[Vec<f64>], grid: usize) -> Table {
    let mut t = Table::new(std::iter::once("curve".to_string()).chain(abscissae(grid).into_iter().map(num)));
    for (j, curve) in curves.iter().enumerate() {
        t.push(
            std::iter::once(j.to_string())
                .chain(curve.iter().map(|&v| num(v)))
                .collect(),
        );
    }
    t
}

/// Column-per-function table over the grid: `x,<name>,...`.
pub fn functions_table(grid: usize, columns: &[(&str, &[f64])]) -> Table {
    let mut t = Table::new(std::iter::once("x").chain(columns.iter().map(|(name, _)| *name)));
    for (m, x) in abscissae(grid).into_iter().enumerate() {
        t.push(
            std::iter::once(num(x))
                .chain(columns.iter().map(|(_, v)| num(v[m])))
                .collect(),
        );
    }
    t
}

/// `k,re,im` for every frequency of the band.
pub fn coefficients_table(coeffs: &[Complex64], max_freq: usize) -> Table {
    let mut t = Table::new(["k", "re", "im"]);
    for (k, c) in frequencies(max_freq).zip(coeffs) {
        t.push(vec![k.to_string(), num(c.re), num(c.im)]);
    }
    t
}

pub fn trace_table(name: &str, values: &[f64], chosen: usize) -> Table {
    let mut t = Table::new(["N", name, "chosen"]);
    for (n, v) in values.iter().enumerate() {
        t.push(vec![n.to_string(), num(*v), u8::from(n == chosen).to_string()]);
    }
    t
}

pub fn risk_curve_table(report: &RiskReport) -> Table {
    let mut t = Table::new(["N", "bias", "v1", "v2", "r", "r_bar", "r_tilde"]);
    for r in &report.rows {
        t.push(vec![
            r.cutoff.to_string(),
            num(r.bias),
            num(r.v1),
            num(r.v2),
            num(r.r),
            num(r.r_bar),
            num(r.r_tilde),
        ]);
    }
    t
}

pub fn rate_table(study: &RateStudy) -> Table {
    let mut t = Table::new(["n", "mise", "stderr"]);
    for ((n, m), s) in study.n_grid.iter().zip(&study.mise).zip(&study.stderr) {
        t.push(vec![n.to_string(), num(*m), num(*s)]);
    }
    t
}

pub fn rate_fit_table(study: &RateStudy) -> Table {
    let mut t = Table::new(["fitted_slope", "theoretical_slope", "s", "beta"]);
    t.push(vec![
        num(study.fitted_slope),
        num(study.theoretical_slope),
        num(study.s),
        num(study.beta),
    ]);
    t
}

/// Reads `k,re,im` rows into a real-valued template on `|k| <= max_freq`.
///
/// Missing frequencies are zero. If only `k >= 0` is listed the negative
/// half is filled in by conjugation; otherwise the rows must already be
/// Hermitian.
pub fn read_coefficients(path: &Path, max_freq: usize) -> Result<Template> {
    let bad = |message: String| AppError::CoefficientFile {
        path: path.to_owned(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["k", "re", "im"] {
        return Err(bad("header must be `k,re,im`".into()));
    }
    let width = 2 * max_freq + 1;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); width];
    let mut seen = vec![false; width];
    let mut any_negative = false;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let row = i + 2;
        let field = |j: usize| record.get(j).unwrap_or("").trim();
        let k: i64 = field(0)
            .parse()
            .map_err(|_| bad(format!("row {row}: bad frequency `{}`", field(0))))?;
        let re: f64 = field(1)
            .parse()
            .map_err(|_| bad(format!("row {row}: bad real part `{}`", field(1))))?;
        let im: f64 = field(2)
            .parse()
            .map_err(|_| bad(format!("row {row}: bad imaginary part `{}`", field(2))))?;
        if k.unsigned_abs() as usize > max_freq {
            return Err(bad(format!("row {row}: |k| = {} exceeds k = {max_freq}", k.abs())));
        }
        let slot = (k + max_freq as i64) as usize;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(bad(format!("row {row}: frequency {k} listed twice")));
        }
        any_negative |= k < 0;
        coeffs[slot] = Complex64::new(re, im);
    }
    let template = if any_negative {
        Template::real_from_coeffs(coeffs)?
    } else {
        let dc = coeffs[max_freq];
        if dc.im != 0.0 {
            return Err(bad("θ_0 must be real".into()));
        }
        Template::from_nonnegative(dc.re, &coeffs[max_freq + 1..])?
    };
    Ok(template.with_label(path.display().to_string()))
}

pub fn write_bundle(dir: &Path, bundle: &Bundle) -> Result<()> {
    let io = |source| AppError::Io {
        path: dir.to_owned(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    for (name, body) in bundle {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|source| AppError::Io { path, source })?;
    }
    Ok(())
}
