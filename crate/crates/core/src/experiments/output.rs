//! CSV and manifest writers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Formats `x` with 12 significant digits, `%.12g` style: fixed notation
/// for decimal exponents in `[-5, 12)`, scientific otherwise, trailing
/// zeros removed.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: usize = 12;
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..DIGITS as i32).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        format!("{sign}{}", trim(body))
    } else {
        let m = trim(format!("{}.{}", &digits[..1], &digits[1..]));
        format!("{sign}{m}e{exp}")
    }
}

/// In-memory CSV document with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<&'static str>,
    body: String,
    rows: usize,
}

/// One CSV cell.
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            body: String::new(),
            rows: 0,
        }
    }

    pub fn push(&mut self, cells: impl IntoIterator<Item = Cell>) {
        let mut first = true;
        let mut count = 0;
        for c in cells {
            if !first {
                self.body.push(',');
            }
            first = false;
            count += 1;
            match c {
                Cell::Int(v) => write!(self.body, "{v}").unwrap(),
                Cell::Real(v) => self.body.push_str(&fmt_sig(v)),
            }
        }
        assert_eq!(count, self.header.len(), "row width does not match header");
        self.body.push('\n');
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }
}

/// Record of a finished run; enough to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub experiment: String,
    pub code_version: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    /// Derived seeds by role, e.g. `config[0]`.
    pub seeds: Vec<(String, u64)>,
    pub outputs: Vec<String>,
    pub started_unix_seconds: u64,
    pub wall_clock_seconds: f64,
}

impl Manifest {
    pub const FILE_NAME: &'static str = "manifest.json";

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(Self::FILE_NAME);
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::json(&path, e))?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_like_percent_g() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(6.0), "6");
        assert_eq!(fmt_sig(9.39), "9.39");
        assert_eq!(fmt_sig(-0.25), "-0.25");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(123456.789), "123456.789");
        assert_eq!(fmt_sig(1e-5), "0.00001");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(1e12), "1e12");
        assert_eq!(fmt_sig(999999999999.9), "1e12");
        assert_eq!(fmt_sig(f64::NAN), "nan");
    }

    proptest! {
        #[test]
        fn twelve_digits_survive(x in -1e6f64..1e6) {
            let back: f64 = fmt_sig(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn table_render() {
        let mut t = CsvTable::new(&["k", "p"]);
        t.push([Cell::from(3usize), Cell::from(0.5)]);
        assert_eq!(t.render(), "k,p\n3,0.5\n");
    }
}
