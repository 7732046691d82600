//! Reference rejection percentages for the benchmark grid (`σ² = 1`,
//! `K₀ = 0`, level 5%) and the comparison against a reproduced run.

use std::fmt::Write as _;

use super::{Cell, CellResult, McReport};
use crate::acvf_test::CKappa;
use crate::baselines::KpssBandwidth;
use crate::error::{Error, Result};
use crate::models::ModelParams;

/// Column order of [`ReferenceRow::rates`].
pub const COLUMNS: [&str; 5] = ["inf", "0.45", "0.55", "0.65", "kpss"];

/// Truncation setting for each acvf column of [`COLUMNS`].
pub const COLUMN_C_KAPPA: [CKappa; 4] = [
    CKappa::Untruncated,
    CKappa::Finite(0.45),
    CKappa::Finite(0.55),
    CKappa::Finite(0.65),
];

/// Default flagging tolerance in percentage points.
pub const DEFAULT_TOLERANCE: f64 = 3.5;

/// One row of the reference grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub model_id: u8,
    pub params: ModelParams,
    pub half_len: usize,
    /// Percentages in [`COLUMNS`] order.
    pub rates: [f64; 5],
}

impl ReferenceRow {
    /// Block, row and column of the entry in the reference grid.
    pub fn location(&self, column: usize) -> String {
        format!(
            "model {} block, row {} N={}, column {}",
            self.model_id, self.params, self.half_len, COLUMNS[column]
        )
    }
}

const fn row(model_id: u8, params: ModelParams, half_len: usize, rates: [f64; 5]) -> ReferenceRow {
    ReferenceRow {
        model_id,
        params,
        half_len,
        rates,
    }
}

use ModelParams::{Phi, Rho, Rho2};

/// The 63 reference rows.
pub const REFERENCE: [ReferenceRow; 63] = [
    row(1, Rho(0.5), 40, [6.0, 6.0, 6.0, 6.0, 10.4]),
    row(1, Rho(0.5), 70, [6.9, 6.9, 6.9, 6.9, 10.1]),
    row(1, Rho(0.5), 100, [6.1, 6.1, 6.1, 6.1, 10.2]),
    row(1, Rho(0.9), 40, [7.2, 41.9, 30.0, 20.3, 51.2]),
    row(1, Rho(0.9), 70, [7.8, 23.7, 14.6, 10.4, 46.7]),
    row(1, Rho(0.9), 100, [8.5, 12.7, 9.4, 8.6, 49.2]),
    row(1, Rho(-0.5), 40, [7.4, 7.4, 7.4, 7.4, 1.8]),
    row(1, Rho(-0.5), 70, [6.9, 6.9, 6.9, 6.9, 2.5]),
    row(1, Rho(-0.5), 100, [6.4, 6.4, 6.4, 6.4, 1.8]),
    row(2, Phi(0.8, 0.3), 40, [6.2, 6.2, 6.2, 6.2, 7.6]),
    row(2, Phi(0.8, 0.3), 70, [6.4, 6.4, 6.4, 6.4, 6.2]),
    row(2, Phi(0.8, 0.3), 100, [7.2, 7.2, 7.2, 7.2, 7.0]),
    row(2, Phi(0.9, 0.5), 40, [6.7, 6.7, 6.7, 6.7, 8.5]),
    row(2, Phi(0.9, 0.5), 70, [6.5, 6.5, 6.5, 6.5, 8.1]),
    row(2, Phi(0.9, 0.5), 100, [5.6, 5.6, 5.6, 5.6, 7.4]),
    row(2, Phi(0.95, 0.9), 40, [7.2, 7.2, 7.2, 7.2, 9.0]),
    row(2, Phi(0.95, 0.9), 70, [7.1, 7.1, 7.1, 7.1, 7.3]),
    row(2, Phi(0.95, 0.9), 100, [5.5, 5.5, 5.5, 5.5, 8.1]),
    row(3, Rho2(0.4, 0.2), 40, [7.2, 8.2, 7.4, 7.3, 22.5]),
    row(3, Rho2(0.4, 0.2), 70, [7.7, 7.7, 7.7, 7.7, 17.3]),
    row(3, Rho2(0.4, 0.2), 100, [7.2, 7.2, 7.2, 7.2, 18.0]),
    row(3, Rho2(0.5, 0.1), 40, [8.5, 8.9, 8.5, 8.5, 19.6]),
    row(3, Rho2(0.5, 0.1), 70, [8.0, 8.0, 8.0, 8.0, 16.6]),
    row(3, Rho2(0.5, 0.1), 100, [6.3, 6.3, 6.3, 6.3, 17.4]),
    row(3, Rho2(0.6, 0.1), 40, [8.5, 12.7, 9.6, 8.7, 26.2]),
    row(3, Rho2(0.6, 0.1), 70, [7.3, 7.3, 7.3, 7.3, 22.4]),
    row(3, Rho2(0.6, 0.1), 100, [7.6, 7.6, 7.6, 7.6, 20.3]),
    row(4, Rho(0.5), 40, [11.7, 94.2, 88.4, 84.0, 84.2]),
    row(4, Rho(0.5), 70, [11.7, 96.5, 92.9, 88.4, 90.9]),
    row(4, Rho(0.5), 100, [11.3, 98.0, 95.5, 92.2, 95.5]),
    row(4, Rho(0.9), 40, [13.1, 99.2, 97.3, 94.6, 91.1]),
    row(4, Rho(0.9), 70, [14.8, 99.8, 99.1, 97.9, 95.3]),
    row(4, Rho(0.9), 100, [16.4, 99.9, 99.5, 99.1, 97.2]),
    row(4, Rho(-0.5), 40, [5.6, 82.2, 75.1, 67.6, 81.5]),
    row(4, Rho(-0.5), 70, [6.3, 92.1, 86.1, 80.0, 90.1]),
    row(4, Rho(-0.5), 100, [5.8, 94.2, 89.5, 85.2, 94.5]),
    row(5, Phi(0.8, 0.3), 40, [11.8, 94.3, 88.8, 82.3, 82.0]),
    row(5, Phi(0.8, 0.3), 70, [11.8, 96.6, 92.7, 88.3, 90.1]),
    row(5, Phi(0.8, 0.3), 100, [12.1, 98.4, 95.4, 91.8, 95.3]),
    row(5, Phi(0.9, 0.5), 40, [11.8, 95.3, 90.0, 84.2, 83.5]),
    row(5, Phi(0.9, 0.5), 70, [12.2, 97.2, 93.8, 89.8, 89.2]),
    row(5, Phi(0.9, 0.5), 100, [11.6, 98.6, 96.4, 92.7, 94.8]),
    row(5, Phi(0.95, 0.9), 40, [13.1, 95.0, 90.0, 83.9, 83.0]),
    row(5, Phi(0.95, 0.9), 70, [11.6, 97.3, 93.8, 89.7, 90.2]),
    row(5, Phi(0.95, 0.9), 100, [13.7, 99.0, 96.4, 92.3, 95.2]),
    row(6, Rho2(0.4, 0.2), 40, [14.8, 98.0, 95.2, 90.6, 85.9]),
    row(6, Rho2(0.4, 0.2), 70, [15.4, 99.1, 97.0, 93.8, 92.0]),
    row(6, Rho2(0.4, 0.2), 100, [16.6, 99.6, 98.8, 96.5, 96.5]),
    row(6, Rho2(0.5, 0.1), 40, [14.2, 99.1, 95.9, 91.3, 84.7]),
    row(6, Rho2(0.5, 0.1), 70, [14.8, 99.4, 97.2, 94.0, 91.2]),
    row(6, Rho2(0.5, 0.1), 100, [15.0, 99.6, 98.5, 96.2, 95.5]),
    row(6, Rho2(0.6, 0.1), 40, [14.5, 99.2, 97.1, 93.3, 87.2]),
    row(6, Rho2(0.6, 0.1), 70, [15.7, 99.7, 98.5, 96.2, 93.5]),
    row(6, Rho2(0.6, 0.1), 100, [16.4, 99.8, 99.1, 97.7, 95.7]),
    row(7, Phi(0.8, 0.3), 40, [6.7, 100.0, 100.0, 99.9, 98.5]),
    row(7, Phi(0.8, 0.3), 70, [6.3, 100.0, 100.0, 100.0, 99.7]),
    row(7, Phi(0.8, 0.3), 100, [7.0, 100.0, 100.0, 100.0, 99.8]),
    row(7, Phi(0.9, 0.5), 40, [7.0, 100.0, 100.0, 100.0, 98.4]),
    row(7, Phi(0.9, 0.5), 70, [5.5, 100.0, 100.0, 100.0, 99.5]),
    row(7, Phi(0.9, 0.5), 100, [5.9, 100.0, 100.0, 100.0, 99.9]),
    row(7, Phi(0.95, 0.9), 40, [8.0, 100.0, 100.0, 100.0, 98.5]),
    row(7, Phi(0.95, 0.9), 70, [7.3, 100.0, 100.0, 100.0, 99.2]),
    row(7, Phi(0.95, 0.9), 100, [6.1, 100.0, 100.0, 100.0, 99.9]),
];

/// Conjunction of `key=value` terms separated by `,` or `;`.
///
/// Keys: `model`, `N`, `rho`, `rho1`, `rho2`, `phi1`, `phi2`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CellFilter {
    terms: Vec<(String, f64)>,
}

impl CellFilter {
    pub fn parse(expr: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for part in expr.split([',', ';']).map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("filter term {part:?} is not key=value")))?;
            let key = k.trim().to_ascii_lowercase();
            if !matches!(key.as_str(), "model" | "n" | "rho" | "rho1" | "rho2" | "phi1" | "phi2") {
                return Err(Error::Input(format!("unknown filter key {:?}", k.trim())));
            }
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("filter value in {part:?} is not a number")))?;
            terms.push((key, value));
        }
        Ok(Self { terms })
    }

    pub fn matches(&self, r: &ReferenceRow) -> bool {
        self.terms.iter().all(|(key, value)| {
            let actual = match (key.as_str(), r.params) {
                ("model", _) => Some(r.model_id as f64),
                ("n", _) => Some(r.half_len as f64),
                ("rho", Rho(x)) => Some(x),
                ("rho1", Rho2(x, _)) => Some(x),
                ("rho2", Rho2(_, x)) => Some(x),
                ("phi1", Phi(x, _)) => Some(x),
                ("phi2", Phi(_, x)) => Some(x),
                _ => None,
            };
            actual.is_some_and(|a| (a - value).abs() < 1e-9)
        })
    }
}

/// Reference rows selected by `filter`.
pub fn reference_rows(filter: &CellFilter) -> Vec<ReferenceRow> {
    REFERENCE.iter().filter(|r| filter.matches(r)).copied().collect()
}

/// Cells for `rows`, each with `replications` replications.
pub fn reference_cells(rows: &[ReferenceRow], replications: usize) -> Vec<Cell> {
    rows.iter()
        .map(|r| Cell::new(r.model_id, r.params, r.half_len, replications))
        .collect()
}

/// Reproduced-versus-reference percentages for one row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowComparison {
    pub reference: ReferenceRow,
    /// Reproduced acvf columns in [`COLUMN_C_KAPPA`] order.
    pub acvf: [f64; 4],
    /// Reproduced KPSS percentages, `l4` then `l12`.
    pub kpss: [f64; 2],
}

impl RowComparison {
    /// Absolute deviations of the four acvf columns.
    pub fn acvf_deviations(&self) -> [f64; 4] {
        std::array::from_fn(|i| (self.acvf[i] - self.reference.rates[i]).abs())
    }

    /// Absolute deviation of each KPSS rule.
    pub fn kpss_deviations(&self) -> [f64; 2] {
        self.kpss.map(|p| (p - self.reference.rates[4]).abs())
    }
}

/// Summary statistics of absolute deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSummary {
    pub rows: Vec<RowComparison>,
    pub tolerance: f64,
    pub acvf_max: f64,
    pub acvf_mean: f64,
    pub kpss_max: [f64; 2],
    pub kpss_mean: [f64; 2],
    /// Locations of acvf entries beyond `tolerance`.
    pub flagged: Vec<String>,
}

/// Pairs `report` cells with `rows` by position and summarises deviations.
pub fn compare(report: &McReport, rows: &[ReferenceRow], tolerance: f64) -> Result<DeviationSummary> {
    if report.cells.len() != rows.len() {
        return Err(Error::Input(format!(
            "report has {} cells but {} reference rows were given",
            report.cells.len(),
            rows.len()
        )));
    }
    let mut out = Vec::with_capacity(rows.len());
    for (cell, r) in report.cells.iter().zip(rows) {
        out.push(RowComparison {
            reference: *r,
            acvf: std::array::from_fn(|i| acvf_percent(cell, COLUMN_C_KAPPA[i])),
            kpss: [
                kpss_percent(cell, KpssBandwidth::Short),
                kpss_percent(cell, KpssBandwidth::Long),
            ],
        });
    }
    let mut flagged = Vec::new();
    let mut acvf_devs = Vec::new();
    let mut kpss_devs = [Vec::new(), Vec::new()];
    for c in &out {
        for (i, d) in c.acvf_deviations().into_iter().enumerate() {
            if d.is_finite() {
                acvf_devs.push(d);
                if d > tolerance {
                    flagged.push(c.reference.location(i));
                }
            }
        }
        for (i, d) in c.kpss_deviations().into_iter().enumerate() {
            if d.is_finite() {
                kpss_devs[i].push(d);
            }
        }
    }
    let (acvf_max, acvf_mean) = max_mean(&acvf_devs);
    let (k4_max, k4_mean) = max_mean(&kpss_devs[0]);
    let (k12_max, k12_mean) = max_mean(&kpss_devs[1]);
    Ok(DeviationSummary {
        rows: out,
        tolerance,
        acvf_max,
        acvf_mean,
        kpss_max: [k4_max, k12_max],
        kpss_mean: [k4_mean, k12_mean],
        flagged,
    })
}

fn acvf_percent(cell: &CellResult, ck: CKappa) -> f64 {
    cell.acvf
        .iter()
        .find(|r| r.k0 == 0 && r.c_kappa == ck)
        .map_or(f64::NAN, |r| r.percent(cell.replications))
}

fn kpss_percent(cell: &CellResult, bw: KpssBandwidth) -> f64 {
    cell.kpss
        .iter()
        .find(|r| r.bandwidth == bw)
        .map_or(f64::NAN, |r| r.percent(cell.replications))
}

fn max_mean(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let max = v.iter().copied().fold(0.0, f64::max);
    (max, v.iter().sum::<f64>() / v.len() as f64)
}

impl DeviationSummary {
    /// Side-by-side table followed by the summary lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>5} {:<18} {:>4} | {:>11} {:>11} {:>11} {:>11} | {:>11} {:>6} {:>6}",
            "model", "params", "N", "inf", "0.45", "0.55", "0.65", "kpss", "l4", "l12"
        );
        for c in &self.rows {
            let r = &c.reference;
            let _ = write!(s, "{:>5} {:<18} {:>4} |", r.model_id, r.params.to_string(), r.half_len);
            let devs = c.acvf_deviations();
            for i in 0..4 {
                let flag = if devs[i] > self.tolerance { '*' } else { ' ' };
                let _ = write!(s, " {:>5.1}/{:>5.1}{flag}", r.rates[i], c.acvf[i]);
            }
            let _ = writeln!(s, " | {:>11.1} {:>6.1} {:>6.1}", r.rates[4], c.kpss[0], c.kpss[1]);
        }
        let _ = writeln!(s, "cells: reference/reproduced percentages; * beyond {:.1} pp", self.tolerance);
        let _ = writeln!(
            s,
            "acvf deviation: max {:.2} pp, mean {:.2} pp, flagged {}",
            self.acvf_max,
            self.acvf_mean,
            self.flagged.len()
        );
        let _ = writeln!(
            s,
            "kpss deviation: l4 max {:.2} mean {:.2}; l12 max {:.2} mean {:.2}",
            self.kpss_max[0], self.kpss_mean[0], self.kpss_max[1], self.kpss_mean[1]
        );
        for f in &self.flagged {
            let _ = writeln!(s, "flagged: {f}");
        }
        s
    }
}
