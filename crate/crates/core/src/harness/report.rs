use std::fmt::Write as _;

use super::Cell;
use crate::acvf_test::CKappa;
use crate::baselines::KpssBandwidth;
use crate::lrv::LrvOptions;

/// First line of every CSV report.
pub const CSV_SCHEMA: &str = "# urtest-mcreport v1";

const CSV_COLUMNS: &str = "model,params,law,ma,N,reps,test,k0,c_kappa,rejections,percent,event_t_percent,ratio_degenerate,c_star_degenerate,errors";

/// Rejections of the autocovariance test at one `(K₀, c_κ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcvfRate {
    pub k0: usize,
    pub c_kappa: CKappa,
    pub rejections: u64,
    /// Replications in which the event 𝒯 held.
    pub event_t: u64,
}

impl AcvfRate {
    pub fn percent(&self, replications: u64) -> f64 {
        percent(self.rejections, replications)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KpssRate {
    pub bandwidth: KpssBandwidth,
    pub rejections: u64,
}

impl KpssRate {
    pub fn percent(&self, replications: u64) -> f64 {
        percent(self.rejections, replications)
    }
}

/// Counts for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub replications: u64,
    pub acvf: Vec<AcvfRate>,
    pub kpss: Vec<KpssRate>,
    /// Replications whose level/difference ratio hit the degenerate guard.
    pub ratio_degenerate: u64,
    /// Replications with `λ̂(1 + ρ̂) ≤ 0`.
    pub c_star_degenerate: u64,
    /// Replications where the test could not be evaluated.
    pub errors: u64,
}

/// Aggregated Monte Carlo output.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub master_seed: u64,
    pub phi: f64,
    pub lrv_options: LrvOptions,
    pub cells: Vec<CellResult>,
    /// Wall-clock time; reported in text output only.
    pub runtime_secs: f64,
}

pub(crate) fn percent(count: u64, total: u64) -> f64 {
    if total == 0 {
        return f64::NAN;
    }
    count as f64 * 100.0 / total as f64
}

fn options_label(o: &LrvOptions) -> String {
    format!(
        "kernel={} bandwidth={:?} prewhiten={} adjust={}",
        o.kernel.name(),
        o.bandwidth,
        o.prewhiten,
        o.adjust
    )
}

impl McReport {
    /// Versioned CSV: one row per `(cell, K₀, c_κ)` and per KPSS rule.
    /// Contains no timing, so equal plans give byte-identical output.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{CSV_SCHEMA}");
        let _ = writeln!(
            s,
            "# seed={} phi={} {}",
            self.master_seed,
            self.phi,
            options_label(&self.lrv_options)
        );
        let _ = writeln!(s, "{CSV_COLUMNS}");
        for c in &self.cells {
            let cell = &c.cell;
            let prefix = format!(
                "{},\"{}\",{},{},{},{}",
                cell.model_id,
                cell.params,
                cell.law.label(),
                cell.convention,
                cell.half_len,
                c.replications
            );
            for r in &c.acvf {
                let _ = writeln!(
                    s,
                    "{prefix},acvf,{},{},{},{:.4},{:.4},{},{},{}",
                    r.k0,
                    r.c_kappa,
                    r.rejections,
                    r.percent(c.replications),
                    percent(r.event_t, c.replications),
                    c.ratio_degenerate,
                    c.c_star_degenerate,
                    c.errors
                );
            }
            for r in &c.kpss {
                let _ = writeln!(
                    s,
                    "{prefix},kpss-{},,,{},{:.4},,,,",
                    r.bandwidth.label(),
                    r.rejections,
                    r.percent(c.replications)
                );
            }
        }
        s
    }

    /// Aligned table for terminals.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "seed {}  phi {}  {}  runtime {:.2}s",
            self.master_seed,
            self.phi,
            options_label(&self.lrv_options),
            self.runtime_secs
        );
        let _ = writeln!(
            s,
            "{:>5} {:<18} {:<14} {:<8} {:>5} {:>6} {:>3} {:>8} {:>8} {:>8} {:>6} {:>6}",
            "model", "params", "law", "ma", "N", "reps", "k0", "c_kappa", "reject%", "event%", "degen", "errors"
        );
        for c in &self.cells {
            let cell = &c.cell;
            for r in &c.acvf {
                let _ = writeln!(
                    s,
                    "{:>5} {:<18} {:<14} {:<8} {:>5} {:>6} {:>3} {:>8} {:>8.2} {:>8.2} {:>6} {:>6}",
                    cell.model_id,
                    cell.params.to_string(),
                    cell.law.label(),
                    cell.convention.to_string(),
                    cell.half_len,
                    c.replications,
                    r.k0,
                    r.c_kappa.to_string(),
                    r.percent(c.replications),
                    percent(r.event_t, c.replications),
                    c.ratio_degenerate + c.c_star_degenerate,
                    c.errors
                );
            }
            for r in &c.kpss {
                let _ = writeln!(
                    s,
                    "{:>5} {:<18} {:<14} {:<8} {:>5} {:>6} {:>3} {:>8} {:>8.2}",
                    cell.model_id,
                    cell.params.to_string(),
                    cell.law.label(),
                    cell.convention.to_string(),
                    cell.half_len,
                    c.replications,
                    "-",
                    format!("kpss-{}", r.bandwidth.label()),
                    r.percent(c.replications)
                );
            }
        }
        s
    }
}
