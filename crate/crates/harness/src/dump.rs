//! Plain-text field dumps.
//!
//! ```text
//! nlac-field v1 N=<int> X=<real> t=<real>
//! <N lines of N space-separated values, row i at fixed x_i>
//! ```
//!
//! Values carry 17 significant digits, so a dump round-trips exactly.

use std::fmt::Write as _;

use nlac_core::{Field, Grid};

use crate::error::{HarnessError, Result};

const MAGIC: &str = "nlac-field";
const VERSION: &str = "v1";
/// Largest grid a dump may declare.
pub const MAX_DUMP_N: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub field: Field,
    pub t: f64,
}

pub fn format_field(field: &Field, t: f64) -> String {
    let grid = field.grid();
    let n = grid.n();
    let mut out = String::with_capacity(n * n * 24 + 64);
    let _ = writeln!(out, "{MAGIC} {VERSION} N={n} X={:?} t={t:?}", grid.extent());
    for row in field.values().chunks(n) {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

fn dump_err(line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Dump { line, message: message.into() }
}

fn header_value<'a>(token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| dump_err(1, format!("expected {key}=<value> in header")))
}

pub fn parse_field(text: &str) -> Result<FieldDump> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| dump_err(1, "empty input"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some(MAGIC) {
        return Err(dump_err(1, format!("missing {MAGIC:?} marker")));
    }
    if tokens.next() != Some(VERSION) {
        return Err(dump_err(1, "unsupported version"));
    }
    let n: usize = header_value(tokens.next(), "N")?.parse().map_err(|_| dump_err(1, "N is not an integer"))?;
    let extent: f64 = header_value(tokens.next(), "X")?.parse().map_err(|_| dump_err(1, "X is not a number"))?;
    let t: f64 = header_value(tokens.next(), "t")?.parse().map_err(|_| dump_err(1, "t is not a number"))?;
    if tokens.next().is_some() {
        return Err(dump_err(1, "trailing header tokens"));
    }
    if n > MAX_DUMP_N {
        return Err(dump_err(1, format!("N={n} exceeds {MAX_DUMP_N}")));
    }
    if !t.is_finite() {
        return Err(dump_err(1, "t must be finite"));
    }
    let grid = Grid::new(n, extent).map_err(|e| dump_err(1, e.to_string()))?;
    let mut values = Vec::new();
    for i in 0..n {
        let line = i + 2;
        let row = lines.next().ok_or_else(|| dump_err(line, format!("expected {n} rows, found {i}")))?;
        let before = values.len();
        for tok in row.split_whitespace() {
            if values.len() - before == n {
                return Err(dump_err(line, format!("more than {n} values")));
            }
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => return Err(dump_err(line, format!("invalid value {tok:?}"))),
            }
        }
        if values.len() - before != n {
            return Err(dump_err(line, format!("expected {n} values, found {}", values.len() - before)));
        }
    }
    if let Some((k, _)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
        return Err(dump_err(n + 2 + k, "unexpected content after the last row"));
    }
    let field = Field::new(grid, values).map_err(|e| dump_err(1, e.to_string()))?;
    Ok(FieldDump { field, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlac_core::sample_function;

    #[test]
    fn round_trip_is_exact() {
        let grid = Grid::new(6, std::f64::consts::TAU).unwrap();
        let u = sample_function(grid, |x, y| (x * 1.3).sin() * y.cos() / 3.0);
        let text = format_field(&u, 0.1 + 0.2);
        let back = parse_field(&text).unwrap();
        assert_eq!(back.field, u);
        assert_eq!(back.t, 0.1 + 0.2);
        assert_eq!(format_field(&back.field, back.t), text);
    }

    #[test]
    fn header_shape() {
        let u = Field::constant(Grid::new(4, 1.0).unwrap(), -1.0);
        let text = format_field(&u, 0.0);
        assert_eq!(text.lines().next().unwrap(), "nlac-field v1 N=4 X=1.0 t=0.0");
        assert_eq!(text.lines().nth(1).unwrap().split(' ').count(), 4);
    }

    #[test]
    fn rejects_damaged_input() {
        let u = Field::constant(Grid::new(4, 1.0).unwrap(), 0.25);
        let good = format_field(&u, 2.0);
        let cases = [
            String::new(),
            good.replace("nlac-field", "field"),
            good.replace("v1", "v2"),
            good.replace("N=4", "N=5"),
            good.replace("N=4", "N=x"),
            good.replace("X=1.0", "X=-1.0"),
            good.replace("t=2.0", "t=inf"),
            good.replacen("2.5000000000000000e-1", "nan", 1),
            good.replacen("2.5000000000000000e-1 ", "", 1),
            format!("{good}0.1\n"),
            good.lines().take(3).collect::<Vec<_>>().join("\n"),
        ];
        for text in cases {
            assert!(parse_field(&text).is_err(), "{text:?}");
        }
    }

    #[test]
    fn reports_row_line() {
        let u = Field::constant(Grid::new(4, 1.0).unwrap(), 0.5);
        let mut lines: Vec<String> = format_field(&u, 0.0).lines().map(String::from).collect();
        lines[2] = lines[2].replacen("5.0000000000000000e-1", "oops", 1);
        let text = lines.join("\n");
        match parse_field(&text) {
            Err(HarnessError::Dump { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
