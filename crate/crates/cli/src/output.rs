//! Comma-separated tables and gnuplot scripts.
//!
//! Floats are written with 17 significant digits so every value reads back
//! bit-for-bit, and nothing time- or host-dependent goes into a data file.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use tradeflow_core::{MoneyState, NormalizedState, Regime, RegionMap};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One sample of a simulated trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub state: NormalizedState,
    pub regime: Regime,
    pub flow: f64,
    pub money: Option<MoneyState>,
}

pub fn series_csv(rows: &[SeriesRow]) -> String {
    let with_money = rows.first().is_some_and(|r| r.money.is_some());
    let mut out = String::from("t,eta_a,eta_b,regime,f");
    if with_money {
        out.push_str(",m_a,m_b");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.state.eta_a),
            fmt_f64(r.state.eta_b),
            r.regime,
            fmt_f64(r.flow)
        );
        if let Some(m) = r.money {
            let _ = write!(out, ",{},{}", fmt_f64(m.m_a), fmt_f64(m.m_b));
        }
        out.push('\n');
    }
    out
}

/// A numeric sample next to the closed form at the same time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub analytic: NormalizedState,
    pub numeric: NormalizedState,
}

impl CompareRow {
    pub fn discrepancy(&self) -> f64 {
        self.analytic.distance(self.numeric)
    }
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from("t,eta_a_analytic,eta_b_analytic,eta_a_numeric,eta_b_numeric,discrepancy\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.analytic.eta_a),
            fmt_f64(r.analytic.eta_b),
            fmt_f64(r.numeric.eta_a),
            fmt_f64(r.numeric.eta_b),
            fmt_f64(r.discrepancy())
        );
    }
    out
}

pub fn region_csv(map: &RegionMap) -> String {
    let mut out = String::from("sigma1,eta_a1,k,dm_a,dm_b,p_a2,p_b1,feasible\n");
    for node in map.nodes() {
        let r = &node.result;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(node.sigma1),
            fmt_f64(node.eta_a1),
            fmt_f64(r.k),
            fmt_f64(r.dm_a),
            fmt_f64(r.dm_b),
            fmt_f64(r.p_a2),
            fmt_f64(r.p_b1),
            r.feasible()
        );
    }
    out
}

/// `data.csv` -> `data<suffix>`, in the same directory.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn data_name(data: &Path) -> String {
    data.file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

/// Gnuplot script for a trajectory table; the data file is referenced by
/// name, so the script is run from the directory holding both.
pub fn series_plot(data: &Path, with_money: bool) -> String {
    let name = data_name(data);
    let mut s = String::from(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 't'\n\
         set ylabel 'stock'\n\
         set arrow from graph 0, first 1 to graph 1, first 1 nohead dashtype 2\n"
    );
    if with_money {
        s.push_str("set y2label 'money'\nset y2tics\nset ytics nomirror\n");
        let _ = writeln!(
            s,
            "plot '{name}' using 1:2 with lines, '' using 1:3 with lines, \
             '' using 1:6 axes x1y2 with lines, '' using 1:7 axes x1y2 with lines"
        );
    } else {
        let _ = writeln!(s, "plot '{name}' using 1:2 with lines, '' using 1:3 with lines");
    }
    s.push_str("pause mouse close\n");
    s
}

/// Gnuplot script marking the feasible nodes of a region table.
pub fn region_plot(data: &Path) -> String {
    let name = data_name(data);
    format!(
        "set datafile separator ','\n\
         set xlabel 'sigma1'\n\
         set ylabel 'eta_a1'\n\
         set key off\n\
         plot '{name}' using 1:(strcol(8) eq 'true' ? $2 : 1/0) with points pointtype 7 pointsize 0.3\n\
         pause mouse close\n"
    )
}

pub fn write(path: &Path, contents: &str) -> io::Result<()> {
    fs::write(path, contents)
}
