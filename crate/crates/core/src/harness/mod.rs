//! Seeded, parallel Monte Carlo driver for rejection-rate experiments.
//!
//! Replication `r` of a cell draws from the stream
//! `SeedSpec::for_cell(master_seed, cell.key(), r)`, so results depend only
//! on the plan and the master seed, never on worker count or on which other
//! cells are in the plan. Per-cell aggregation is a sum of integer counts.

mod config;
mod input;
mod report;
pub mod table1;

use std::time::Instant;

use rayon::prelude::*;

pub use config::{parse_config_file, ConfigMap};
pub use input::{ingest_csv, ColumnSelector};
pub use report::{AcvfRate, CellResult, KpssRate, McReport, CSV_SCHEMA};

use crate::acvf_test::{CKappa, PreparedTest};
use crate::baselines::{kpss_test, KpssBandwidth};
use crate::error::{Error, Result};
use crate::lrv::LrvOptions;
use crate::models::{model_table, simulate_raw, MaConvention, ModelParams, ModelSpec};
use crate::rng::{InnovationLaw, SeedSpec};
use crate::series::TimeSeries;
use crate::Diagnostic;

/// Environment variable capping the worker count.
pub const WORKERS_ENV: &str = "URTEST_WORKERS";

/// The four truncation settings reported per cell.
pub const C_KAPPA_SWEEP: [CKappa; 4] = [
    CKappa::Untruncated,
    CKappa::Finite(0.45),
    CKappa::Finite(0.55),
    CKappa::Finite(0.65),
];

/// One simulation setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub model_id: u8,
    pub params: ModelParams,
    pub law: InnovationLaw,
    pub convention: MaConvention,
    /// Half-sample length `N`; series have `n = 2N` observations.
    pub half_len: usize,
    pub replications: usize,
}

impl Cell {
    pub fn new(model_id: u8, params: ModelParams, half_len: usize, replications: usize) -> Self {
        Self {
            model_id,
            params,
            law: InnovationLaw::default(),
            convention: MaConvention::default(),
            half_len,
            replications,
        }
    }

    /// Stable label; selects the cell's random streams.
    pub fn key(&self) -> String {
        format!(
            "model={};{};law={};ma={};N={}",
            self.model_id,
            self.params,
            self.law.label(),
            self.convention,
            self.half_len
        )
    }

    pub fn spec(&self) -> Result<ModelSpec> {
        model_table(self.model_id, self.params, self.law, self.convention)
    }
}

/// A set of cells and the test settings evaluated on every replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub cells: Vec<Cell>,
    pub k0s: Vec<usize>,
    pub c_kappas: Vec<CKappa>,
    pub phi: f64,
    pub lrv_options: LrvOptions,
    pub kpss_bandwidths: Vec<KpssBandwidth>,
    pub master_seed: u64,
    pub workers: usize,
}

impl ExperimentPlan {
    pub fn new(cells: Vec<Cell>, master_seed: u64) -> Self {
        Self {
            cells,
            k0s: vec![0],
            c_kappas: vec![CKappa::default()],
            phi: 0.05,
            lrv_options: LrvOptions::default(),
            kpss_bandwidths: Vec::new(),
            master_seed,
            workers: default_workers(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k0s.is_empty() || self.c_kappas.is_empty() {
            return Err(Error::Input("plan needs at least one K0 and one c_kappa".into()));
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(Error::Input(format!("nominal level must lie in (0, 1), got {}", self.phi)));
        }
        for ck in &self.c_kappas {
            ck.validate()?;
        }
        if self.workers == 0 {
            return Err(Error::Input("worker count must be at least 1".into()));
        }
        let max_k0 = *self.k0s.iter().max().unwrap_or(&0);
        for cell in &self.cells {
            if cell.replications == 0 {
                return Err(Error::Input(format!("cell {} has no replications", cell.key())));
            }
            let n = 2 * cell.half_len;
            if n < crate::acvf_test::MIN_LENGTH.max(2 * (max_k0 + 1)) {
                return Err(Error::TooShort {
                    needed: crate::acvf_test::MIN_LENGTH.max(2 * (max_k0 + 1)),
                    got: n,
                });
            }
            cell.spec()?;
        }
        Ok(())
    }
}

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn default_workers() -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(w) if w >= 1 => w,
        _ => available,
    }
}

/// Integer counts for one replication or a merged set of them.
#[derive(Debug, Clone, PartialEq, Eq)]
struct CellTally {
    /// `[k0 index][c_kappa index]`.
    rejections: Vec<Vec<u64>>,
    events: Vec<Vec<u64>>,
    kpss: Vec<u64>,
    ratio_degenerate: u64,
    c_star_degenerate: u64,
    errors: u64,
}

impl CellTally {
    fn zero(k: usize, c: usize, b: usize) -> Self {
        Self {
            rejections: vec![vec![0; c]; k],
            events: vec![vec![0; c]; k],
            kpss: vec![0; b],
            ratio_degenerate: 0,
            c_star_degenerate: 0,
            errors: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.rejections.iter_mut().zip(&other.rejections) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.events.iter_mut().zip(&other.events) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (x, y) in self.kpss.iter_mut().zip(&other.kpss) {
            *x += y;
        }
        self.ratio_degenerate += other.ratio_degenerate;
        self.c_star_degenerate += other.c_star_degenerate;
        self.errors += other.errors;
        self
    }
}

fn replicate(plan: &ExperimentPlan, cell: &Cell, spec: &ModelSpec, rep: u64) -> CellTally {
    let mut tally = CellTally::zero(plan.k0s.len(), plan.c_kappas.len(), plan.kpss_bandwidths.len());
    let seed = SeedSpec::for_cell(plan.master_seed, &cell.key(), rep);
    let n = 2 * cell.half_len;
    let series = match simulate_raw(spec, n, seed).and_then(TimeSeries::new) {
        Ok(s) => s,
        Err(_) => {
            tally.errors = 1;
            return tally;
        }
    };
    let max_k0 = *plan.k0s.iter().max().unwrap_or(&0);
    match PreparedTest::new(&series, max_k0, &plan.lrv_options) {
        Ok(prepared) => {
            if prepared.ratio().degenerate {
                tally.ratio_degenerate = 1;
            }
            for (ki, &k0) in plan.k0s.iter().enumerate() {
                let Ok(scale) = prepared.scale(k0, &plan.lrv_options) else {
                    tally.errors = 1;
                    continue;
                };
                for (ci, &ck) in plan.c_kappas.iter().enumerate() {
                    match prepared.decide(&scale, ck, plan.phi) {
                        Ok(out) => {
                            tally.rejections[ki][ci] = out.reject as u64;
                            tally.events[ki][ci] = out.event_t as u64;
                            if out.diagnostics.contains(&Diagnostic::CStarDegenerate) {
                                tally.c_star_degenerate = 1;
                            }
                        }
                        Err(_) => tally.errors = 1,
                    }
                }
            }
        }
        Err(_) => tally.errors = 1,
    }
    for (bi, &bw) in plan.kpss_bandwidths.iter().enumerate() {
        if let Ok(r) = kpss_test(&series, plan.phi, bw) {
            tally.kpss[bi] = r.reject as u64;
        }
    }
    tally
}

/// Runs every cell of `plan` on a pool of `plan.workers` threads.
pub fn run_plan(plan: &ExperimentPlan) -> Result<McReport> {
    plan.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| Error::Input(format!("cannot build worker pool: {e}")))?;
    let (k, c, b) = (plan.k0s.len(), plan.c_kappas.len(), plan.kpss_bandwidths.len());
    let cells = pool.install(|| {
        plan.cells
            .iter()
            .map(|cell| {
                let spec = cell.spec()?;
                let tally = (0..cell.replications as u64)
                    .into_par_iter()
                    .map(|rep| replicate(plan, cell, &spec, rep))
                    .reduce(|| CellTally::zero(k, c, b), CellTally::merge);
                Ok(CellResult::from_counts(plan, cell, tally))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(McReport {
        master_seed: plan.master_seed,
        phi: plan.phi,
        lrv_options: plan.lrv_options,
        cells,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

impl CellResult {
    fn from_counts(plan: &ExperimentPlan, cell: &Cell, t: CellTally) -> Self {
        let mut acvf = Vec::new();
        for (ki, &k0) in plan.k0s.iter().enumerate() {
            for (ci, &ck) in plan.c_kappas.iter().enumerate() {
                acvf.push(AcvfRate {
                    k0,
                    c_kappa: ck,
                    rejections: t.rejections[ki][ci],
                    event_t: t.events[ki][ci],
                });
            }
        }
        let kpss = plan
            .kpss_bandwidths
            .iter()
            .zip(&t.kpss)
            .map(|(&bandwidth, &rejections)| KpssRate {
                bandwidth,
                rejections,
            })
            .collect();
        CellResult {
            cell: cell.clone(),
            replications: cell.replications as u64,
            acvf,
            kpss,
            ratio_degenerate: t.ratio_degenerate,
            c_star_degenerate: t.c_star_degenerate,
            errors: t.errors,
        }
    }
}
