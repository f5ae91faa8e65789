//! Check tables and their CSV / JSON / plot-data renderings.
//!
//! Floats in CSV are written with 17 significant digits in `{:.16e}` form,
//! so identical runs produce identical bytes.

use std::cmp::Ordering;
use std::io::Write;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// One line of a check table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub check_name: String,
    pub parameters: String,
    pub value: f64,
    pub reference: f64,
    pub abs_err: f64,
    pub pass: bool,
    /// Numeric parameter tuple used for ordering.
    #[serde(skip)]
    pub key: Vec<f64>,
}

impl Row {
    /// `value` against `reference`, passing when `|value − reference| <= tol`.
    pub fn compare(name: &str, parameters: String, key: Vec<f64>, value: f64, reference: f64, tol: f64) -> Row {
        let abs_err = (value - reference).abs();
        Row { check_name: name.into(), parameters, value, reference, abs_err, pass: abs_err <= tol, key }
    }

    /// A nonnegative discrepancy compared with zero.
    pub fn deviation(name: &str, parameters: String, key: Vec<f64>, dev: f64, tol: f64) -> Row {
        Row::compare(name, parameters, key, dev, 0.0, tol)
    }

    /// Passes when `value <= bound`. The bound is the reference and
    /// `abs_err` is the amount by which the bound is exceeded.
    pub fn at_most(name: &str, parameters: String, key: Vec<f64>, value: f64, bound: f64) -> Row {
        let excess = (value - bound).max(0.0);
        Row { check_name: name.into(), parameters, value, reference: bound, abs_err: excess, pass: value <= bound, key }
    }

    /// Passes when `value >= bound`; `abs_err` is the shortfall.
    pub fn at_least(name: &str, parameters: String, key: Vec<f64>, value: f64, bound: f64) -> Row {
        let shortfall = (bound - value).max(0.0);
        Row {
            check_name: name.into(),
            parameters,
            value,
            reference: bound,
            abs_err: shortfall,
            pass: value >= bound,
            key,
        }
    }

    fn order(&self, other: &Row) -> Ordering {
        self.check_name.cmp(&other.check_name).then_with(|| {
            self.key
                .iter()
                .zip(&other.key)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or_else(|| self.key.len().cmp(&other.key.len()))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotPoint {
    pub x: f64,
    pub series: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub all_pass: bool,
    pub rows: Vec<Row>,
    #[serde(skip)]
    pub plot: Vec<PlotPoint>,
}

impl Report {
    /// Sorts rows by `(check_name, parameter tuple)` and plot points by
    /// `(series, x)`, so the order of evaluation never shows in the output.
    pub fn new(command: &str, seed: u64, mut rows: Vec<Row>, mut plot: Vec<PlotPoint>) -> Report {
        rows.sort_by(Row::order);
        plot.sort_by(|a, b| a.series.cmp(&b.series).then(a.x.total_cmp(&b.x)));
        let all_pass = rows.iter().all(|r| r.pass);
        Report { schema_version: crate::config::SCHEMA_VERSION, command: command.into(), seed, all_pass, rows, plot }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv_writer(out);
        let ser = |e: csv::Error| CliError::Serialize(e.to_string());
        w.write_record(["check_name", "parameters", "value", "reference", "abs_err", "pass"]).map_err(ser)?;
        for r in &self.rows {
            w.write_record([
                r.check_name.as_str(),
                r.parameters.as_str(),
                &float(r.value),
                &float(r.reference),
                &float(r.abs_err),
                if r.pass { "true" } else { "false" },
            ])
            .map_err(ser)?;
        }
        w.flush().map_err(|e| CliError::Serialize(e.to_string()))
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> CliResult<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| CliError::Serialize(e.to_string()))?;
        out.write_all(b"\n").map_err(|e| CliError::Serialize(e.to_string()))
    }

    /// Long-format `(x, series, value)` table; header only when there is no data.
    pub fn emit_plot_data<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv_writer(out);
        let ser = |e: csv::Error| CliError::Serialize(e.to_string());
        w.write_record(["x", "series", "value"]).map_err(ser)?;
        for p in &self.plot {
            w.write_record([float(p.x).as_str(), p.series.as_str(), float(p.value).as_str()]).map_err(ser)?;
        }
        w.flush().map_err(|e| CliError::Serialize(e.to_string()))
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Short deterministic rendering of a real parameter.
pub fn p(x: f64) -> String {
    format!("{x:.6}")
}

/// `a+bi` rendering of a complex parameter.
pub fn pc(z: clarklab::C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_of(r: &Report) -> String {
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn rows_are_sorted_by_name_then_key() {
        let rows = vec![
            Row::deviation("b", "t=2".into(), vec![2.0], 0.0, 1.0),
            Row::deviation("a", "t=10".into(), vec![10.0], 0.0, 1.0),
            Row::deviation("b", "t=1".into(), vec![1.0], 0.0, 1.0),
        ];
        let r = Report::new("x", 0, rows, Vec::new());
        let order: Vec<_> = r.rows.iter().map(|r| r.parameters.as_str()).collect();
        assert_eq!(order, ["t=10", "t=1", "t=2"]);
    }

    #[test]
    fn csv_uses_seventeen_digits_and_lf() {
        let r = Report::new("x", 0, vec![Row::compare("c", "r=0.5".into(), vec![], 0.5, 1.0 / 3.0, 1.0)], Vec::new());
        let text = csv_of(&r);
        assert_eq!(
            text,
            "check_name,parameters,value,reference,abs_err,pass\n\
             c,r=0.5,5.0000000000000000e-1,3.3333333333333331e-1,1.6666666666666669e-1,true\n"
        );
    }

    #[test]
    fn empty_report_gives_header_only_plot() {
        let mut buf = Vec::new();
        Report::new("x", 0, Vec::new(), Vec::new()).emit_plot_data(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,series,value\n");
    }

    #[test]
    fn bound_rows() {
        assert!(Row::at_most("a", String::new(), vec![], 0.5, 1.0).pass);
        assert_eq!(Row::at_most("a", String::new(), vec![], 0.5, 1.0).abs_err, 0.0);
        let over = Row::at_most("a", String::new(), vec![], 1.5, 1.0);
        assert!(!over.pass && over.abs_err == 0.5);
        assert!(Row::at_least("a", String::new(), vec![], 7.0, 5.0).pass);
        assert!(!Row::at_least("a", String::new(), vec![], 3.0, 5.0).pass);
    }
}
