//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use common::{check_acvf_test, check_lrv, check_series, run_cases, series_strategy};
use proptest::prelude::*;
use urtest::harness::{run_plan, Cell, CellResult, ExperimentPlan, McReport, C_KAPPA_SWEEP};
use urtest::{
    acvf, kpss_test, ratio_r, simulate, CKappa, InnovationLaw, KpssBandwidth, ModelParams,
    ModelSpec, SeedSpec,
};

const REPS: usize = 2000;
const SEED: u64 = 1;
const CASES: u32 = 256;

struct Verdicts {
    failed: usize,
}

impl Verdicts {
    fn report(&mut self, id: u32, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} C{id:<2} {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.1}")).collect();
    parts.join("/")
}

fn plan(cells: Vec<Cell>, kpss: bool) -> ExperimentPlan {
    let mut p = ExperimentPlan::new(cells, SEED);
    p.c_kappas = C_KAPPA_SWEEP.to_vec();
    if kpss {
        p.kpss_bandwidths = vec![KpssBandwidth::Short, KpssBandwidth::Long];
    }
    p
}

fn rate(c: &CellResult, ck: CKappa) -> f64 {
    c.acvf
        .iter()
        .find(|r| r.c_kappa == ck && r.k0 == 0)
        .unwrap()
        .percent(c.replications)
}

fn rates(report: &McReport, ck: CKappa) -> Vec<f64> {
    report.cells.iter().map(|c| rate(c, ck)).collect()
}

fn rho_cells(model: u8, rho: f64, sizes: &[usize]) -> Vec<Cell> {
    sizes
        .iter()
        .map(|&n| Cell::new(model, ModelParams::Rho(rho), n, REPS))
        .collect()
}

const C055: CKappa = CKappa::Finite(0.55);

fn size_criteria(v: &mut Verdicts) -> CellResult {
    let start = Instant::now();
    let report = run_plan(&plan(rho_cells(1, 0.5, &[40, 70, 100]), false)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let got = rates(&report, C055);
    let target = [6.0, 6.9, 6.1];
    let ok = got.iter().zip(target).all(|(&g, t)| within(g, t, 2.5)) && secs < 180.0;
    v.report(
        1,
        ok,
        format!(
            "model 1 rho=0.5 c=0.55 N=40/70/100: {} vs {} (+-2.5 pp), {secs:.1}s",
            fmt(&got),
            fmt(&target)
        ),
    );

    let n100 = &report.cells[2];
    let sweep: Vec<f64> = C_KAPPA_SWEEP.iter().map(|&c| rate(n100, c)).collect();
    let spread = sweep.iter().cloned().fold(f64::MIN, f64::max)
        - sweep.iter().cloned().fold(f64::MAX, f64::min);
    v.report(
        2,
        spread <= 1.0,
        format!("model 1 rho=0.5 N=100 over c=inf/0.45/0.55/0.65: {} (spread {spread:.2} pp)", fmt(&sweep)),
    );

    let report = run_plan(&plan(rho_cells(1, 0.9, &[100]), true)).unwrap();
    let got = rate(&report.cells[0], C055);
    v.report(3, within(got, 9.4, 3.0), format!("model 1 rho=0.9 N=100 c=0.55: {got:.1} vs 9.4 (+-3 pp)"));
    report.cells.into_iter().next().unwrap()
}

fn power_criteria(v: &mut Verdicts) {
    let report = run_plan(&plan(rho_cells(4, 0.5, &[40, 70, 100]), false)).unwrap();
    let got = rates(&report, C055);
    let target = [88.4, 92.9, 95.5];
    let close = got.iter().zip(target).all(|(&g, t)| within(g, t, 3.5));
    let monotone = got.windows(2).all(|w| w[1] >= w[0] - 2.0);
    v.report(
        4,
        close && monotone,
        format!(
            "model 4 rho=0.5 c=0.55 N=40/70/100: {} vs {} (+-3.5 pp, monotone {monotone})",
            fmt(&got),
            fmt(&target)
        ),
    );

    let got = rate(&report.cells[2], CKappa::Untruncated);
    v.report(5, within(got, 11.3, 3.0), format!("model 4 rho=0.5 N=100 untruncated: {got:.1} vs 11.3 (+-3 pp)"));

    let cell = Cell::new(7, ModelParams::Phi(0.8, 0.3), 40, REPS);
    let report = run_plan(&plan(vec![cell], false)).unwrap();
    let got = rate(&report.cells[0], C055);
    v.report(6, got >= 99.0, format!("model 7 (0.8, 0.3) N=40 c=0.55: {got:.1} (>= 99)"));
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn growth_slope(spec: &ModelSpec, seed: u64) -> f64 {
    let sizes = [200usize, 400, 800, 1600];
    let mut logs = Vec::new();
    for &n in &sizes {
        let total: f64 = (0..200)
            .map(|r| {
                let y = simulate::<f64>(spec, n, SeedSpec::new(seed, r)).unwrap();
                acvf(&y, 0).unwrap().ln()
            })
            .sum();
        logs.push(total / 200.0);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    slope(&xs, &logs)
}

fn divergence_criteria(v: &mut Verdicts) {
    let start = Instant::now();
    let rw = growth_slope(&ModelSpec::random_walk(), 31);
    let drift = growth_slope(&ModelSpec::random_walk().with_drift(1.0), 32);
    let secs = start.elapsed().as_secs_f64();
    v.report(
        7,
        (0.85..=1.15).contains(&rw) && (1.85..=2.15).contains(&drift) && secs < 60.0,
        format!("log gamma(0) slope: random walk {rw:.3} in [0.85, 1.15], drift {drift:.3} in [1.85, 2.15], {secs:.1}s"),
    );

    let n = 2000;
    let mean: f64 = (0..500)
        .map(|r| {
            let y = simulate::<f64>(&ModelSpec::random_walk(), n, SeedSpec::new(33, r)).unwrap();
            ratio_r(&y).unwrap().value / n as f64
        })
        .sum::<f64>()
        / 500.0;
    v.report(8, (0.28..=0.39).contains(&mean), format!("random walk n=2000 mean R/n: {mean:.4} in [0.28, 0.39]"));
}

fn kpss_criterion(v: &mut Verdicts, rho09: &CellResult) {
    let white = ModelSpec::new(Vec::new(), Vec::new(), 0, InnovationLaw::default());
    let reps = 2000;
    let rejected = (0..reps)
        .filter(|&r| {
            let y = simulate::<f64>(&white, 200, SeedSpec::new(34, r)).unwrap();
            kpss_test(&y, 0.05, KpssBandwidth::Short).unwrap().reject
        })
        .count();
    let size = rejected as f64 * 100.0 / reps as f64;
    let l4 = rho09.kpss[0].percent(rho09.replications);
    let l12 = rho09.kpss[1].percent(rho09.replications);
    let ok = within(size, 5.0, 2.5) && (within(l4, 49.2, 6.0) || within(l12, 49.2, 6.0));
    v.report(
        9,
        ok,
        format!("KPSS iid n=200 size {size:.1} (5 +-2.5); model 1 rho=0.9 N=100 l4 {l4:.1} / l12 {l12:.1} vs 49.2 (+-6)"),
    );
}

fn property_criterion(v: &mut Verdicts) {
    let scales = || prop_oneof![0.2f64..0.8, 1.2f64..3.0, -3.0f64..-0.2];
    let results = [
        (
            "series",
            run_cases(CASES, (series_strategy(4, 30), -50.0f64..50.0, scales()), |(y, s, c)| {
                check_series(&y, s, c)
            }),
        ),
        (
            "lrv",
            run_cases(CASES, (series_strategy(6, 30), 0.3f64..12.0, scales()), |(x, b, c)| {
                check_lrv(&x, b, c)
            }),
        ),
        (
            "acvf_test",
            run_cases(
                CASES,
                (series_strategy(10, 30), 0usize..=3, -20.0f64..20.0, scales()),
                |(y, k0, s, c)| check_acvf_test(&y, k0, s, c),
            ),
        ),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, r) in &results {
        match r {
            Ok(()) => parts.push(format!("{name} ok")),
            Err(e) => {
                ok = false;
                parts.push(format!("{name} failed: {e}"));
            }
        }
    }
    v.report(10, ok, format!("{CASES} cases each, lengths <= 30, oracles at 1e-10: {}", parts.join(", ")));
}

fn reproduce(workers: &str, via_env: bool) -> Vec<u8> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_urtest"));
    cmd.args(["reproduce-table1", "--reps", "200", "--seed", "7", "--csv"]);
    cmd.env_remove("URTEST_WORKERS");
    if via_env {
        cmd.env("URTEST_WORKERS", workers);
    } else {
        cmd.args(["--workers", workers]);
    }
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism_criterion(v: &mut Verdicts) {
    let a = reproduce("1", false);
    let b = reproduce("1", false);
    let c = reproduce("4", false);
    let d = reproduce("3", true);
    let ok = !a.is_empty() && a == b && a == c && a == d;
    v.report(
        11,
        ok,
        format!("reproduce-table1 --reps 200 --seed 7: {} bytes, identical across runs and 1/3/4 workers: {ok}", a.len()),
    );
}

fn main() -> ExitCode {
    let mut v = Verdicts { failed: 0 };
    let rho09 = size_criteria(&mut v);
    power_criteria(&mut v);
    divergence_criteria(&mut v);
    kpss_criterion(&mut v, &rho09);
    property_criterion(&mut v);
    determinism_criterion(&mut v);
    if v.failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria fail", v.failed);
        ExitCode::FAILURE
    }
}
