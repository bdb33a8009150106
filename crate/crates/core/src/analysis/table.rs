//! CSV and markdown renderings of refinement reports.

use std::fmt::Write;

use super::{RefinementReport, RefinementRow};
use crate::error::{FemError, Result};

pub const CSV_HEADER: &str = "N,l2_error,l2_order,h1_error,h1_order";

/// `2.2810E-05` style: four mantissa decimals, signed two-digit exponent.
pub fn format_sci(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0.0000E+00".to_string() } else { format!("{v}") };
    }
    let s = format!("{v:.4E}");
    let (mantissa, exp) = s.split_once('E').expect("LowerExp output has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

pub fn format_order(order: Option<f64>) -> String {
    order.map(|o| format!("{o:.2}")).unwrap_or_default()
}

impl RefinementReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.n,
                format_sci(r.l2_error),
                format_order(r.l2_order),
                format_sci(r.h1_error),
                format_order(r.h1_order)
            );
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let h1 = if self.norm.full_h1 { "H1" } else { "H1 (semi)" };
        let _ = writeln!(out, "Grid refinement: method `{}`, problem `{}`", self.method, self.problem);
        out.push('\n');
        let _ = writeln!(out, "| N | ‖E‖_L2 | Order | ‖E‖_{h1} | Order |");
        out.push_str("|---:|---:|---:|---:|---:|\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                r.n,
                format_sci(r.l2_error),
                format_order(r.l2_order),
                format_sci(r.h1_error),
                format_order(r.h1_order)
            );
        }
        out
    }
}

/// Parse a CSV produced by [`RefinementReport::to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<RefinementRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(FemError::InvalidParameter(format!("unexpected CSV header {other:?}")));
        }
    }
    let bad = |line: &str| FemError::InvalidParameter(format!("malformed CSV row '{line}'"));
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 5 {
                return Err(bad(line));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
            let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
            Ok(RefinementRow {
                n: cells[0].parse().map_err(|_| bad(line))?,
                l2_error: num(cells[1])?,
                l2_order: opt(cells[2])?,
                h1_error: num(cells[3])?,
                h1_order: opt(cells[4])?,
            })
        })
        .collect()
}
