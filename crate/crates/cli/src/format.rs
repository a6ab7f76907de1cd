//! Fixed float formatting and CSV output.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// C's `%.17g`: 17 significant digits, trailing zeros removed, exponent
/// form when the decimal exponent is below -4 or at least 17.
pub fn g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    strip_zeros(&format!("{:.*}", decimals, v)).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A column-major table written as CSV with a header row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub columns: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    /// Undefined entries (masked samples, forbidden regions) are left empty.
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn column<C: Into<Cell>>(mut self, name: &str, values: impl IntoIterator<Item = C>) -> Self {
        self.header.push(name.to_string());
        self.columns.push(values.into_iter().map(Into::into).collect());
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in 0..self.rows() {
            for (c, col) in self.columns.iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                if let Some(Cell::Num(v)) = col.get(r) {
                    let _ = write!(out, "{}", g17(*v));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_file(path, &self.to_csv())
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    let io = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, contents).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (1e-4, "0.0001"),
            (123456789.0, "123456789"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (2.736e34, "2.7359999999999999e+34"),
            (std::f64::consts::PI, "3.1415926535897931"),
            (1.0 / 3.0, "0.33333333333333331"),
            (5e-324, "4.9406564584124654e-324"),
        ];
        for (v, s) in cases {
            assert_eq!(g17(v), s, "{v:e}");
        }
    }

    #[test]
    fn round_trips() {
        for v in [
            0.1,
            1.0 / 3.0,
            6.02214076e23,
            -1.602176634e-19,
            f64::MAX,
            f64::MIN_POSITIVE,
            0.5e-4,
        ] {
            assert_eq!(g17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_layout() {
        let t = Table::new().column("a", [1.0, 2.0]).column("b", [Some(0.5), None]);
        assert_eq!(t.to_csv(), "a,b\n1,0.5\n2,\n");
    }
}
