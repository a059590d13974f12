//! Rendering of command results as JSON, CSV or aligned text tables.

use std::io::Write;

use collapse_core::qlin::ComplexMatrix;
use collapse_core::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Table {
            title: title.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render(&self, out: &mut String) {
        let ncol = self.headers.len();
        let mut width: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        if !self.title.is_empty() {
            out.push_str(&self.title);
            out.push('\n');
        }
        let line = |cells: &[String], out: &mut String| {
            let padded: Vec<String> = (0..ncol)
                .map(|i| {
                    let c = cells.get(i).map(String::as_str).unwrap_or("");
                    format!("{c:<w$}", w = width[i])
                })
                .collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        };
        if ncol > 0 && !self.headers.iter().all(String::is_empty) {
            line(&self.headers, out);
            let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("  "));
            out.push('\n');
        }
        for r in &self.rows {
            line(r, out);
        }
    }
}

/// Output of one command in all three formats.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: String,
    pub tables: Vec<Table>,
    pub csv: Table,
    /// Set when an internal assertion failed; the report is still written.
    pub violation: Option<String>,
}

impl Report {
    pub fn new<T: Serialize>(body: &T, tables: Vec<Table>, csv: Table) -> Self {
        let mut json = serde_json::to_string_pretty(body).expect("reports serialize");
        json.push('\n');
        Report { json, tables, csv, violation: None }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json.clone(),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.csv.headers).expect("in-memory write");
                for r in &self.csv.rows {
                    w.write_record(r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
            }
            Format::Table => {
                let mut s = String::new();
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        s.push('\n');
                    }
                    t.render(&mut s);
                }
                s
            }
        }
    }

    pub fn write_to(&self, format: Format, out: Option<&std::path::Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match out {
            Some(path) => std::fs::write(path, text),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()
            }
        }
    }
}

/// Seven significant digits; magnitudes below 1e-12 print as 0.
pub fn sig7(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < 1e-12 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..7).contains(&exp) {
        format!("{x:.6e}")
    } else {
        format!("{x:.prec$}", prec = (6 - exp).max(0) as usize)
    }
}

pub fn sig7_opt(x: Option<f64>) -> String {
    x.map(sig7).unwrap_or_else(|| "-".into())
}

/// Shortest round-tripping form for CSV; empty when absent.
pub fn full(x: f64) -> String {
    format!("{x:?}")
}

pub fn full_opt(x: Option<f64>) -> String {
    x.map(full).unwrap_or_default()
}

pub fn complex(z: Complex64) -> String {
    if z.im.abs() < 1e-12 {
        sig7(z.re)
    } else if z.re.abs() < 1e-12 {
        format!("{}i", sig7(z.im))
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", sig7(z.re), sig7(z.im.abs()))
    }
}

pub fn matrix_table(title: &str, m: &ComplexMatrix) -> Table {
    let mut t = Table { title: title.into(), headers: vec![String::new(); m.cols()], rows: Vec::new() };
    for r in 0..m.rows() {
        t.row((0..m.cols()).map(|c| complex(m.get(r, c))).collect());
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_significant_digits() {
        assert_eq!(sig7(2.0 * 2f64.sqrt()), "2.828427");
        assert_eq!(sig7(-std::f64::consts::FRAC_1_SQRT_2), "-0.7071068");
        assert_eq!(sig7(2.0 / 3.0), "0.6666667");
        assert_eq!(sig7(0.4), "0.4000000");
        assert_eq!(sig7(-1.0), "-1.000000");
        assert_eq!(sig7(6e-17), "0");
        assert_eq!(sig7(1234567.0), "1234567");
        assert_eq!(sig7(2.5e-5), "2.500000e-5");
    }

    #[test]
    fn complex_cells() {
        assert_eq!(complex(Complex64::new(0.5, 0.0)), "0.5000000");
        assert_eq!(complex(Complex64::new(0.0, -0.25)), "-0.2500000i");
        assert_eq!(complex(Complex64::new(0.5, -0.25)), "0.5000000-0.2500000i");
    }

    #[test]
    fn table_alignment() {
        let mut t = Table::new("T", &["a", "long"]);
        t.row(vec!["xyz".into(), "1".into()]);
        let mut s = String::new();
        t.render(&mut s);
        assert_eq!(s, "T\na    long\n---  ----\nxyz  1\n");
    }
}
