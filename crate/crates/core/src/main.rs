use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use urtest::harness::table1::{self, CellFilter, DEFAULT_TOLERANCE};
use urtest::harness::{
    default_workers, ingest_csv, parse_config_file, run_plan, Cell, ColumnSelector, ConfigMap,
    ExperimentPlan, C_KAPPA_SWEEP,
};
use urtest::{
    run_test_sweep, CKappa, InnovationLaw, KpssBandwidth, LrvOptions, MaConvention, ModelParams,
    TestConfig, TestOutcome64,
};

#[derive(Parser, Debug)]
#[command(name = "urtest", version, about = "Autocovariance-based unit-root test")]
struct Cli {
    /// Plain `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: URTEST_WORKERS, else all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the test on one column of a CSV file.
    Test(TestArgs),
    /// Monte Carlo rejection rates for one model.
    Simulate(SimulateArgs),
    /// Rerun the benchmark grid and compare with the reference percentages.
    #[command(name = "reproduce-table1")]
    ReproduceTable1(ReproduceArgs),
}

#[derive(Args, Debug)]
struct TestArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Header name or zero-based index.
    #[arg(long)]
    column: Option<String>,
    #[arg(long)]
    phi: Option<f64>,
    /// Single K0 (default: 0 through 4).
    #[arg(long)]
    k0: Option<usize>,
    /// Positive real or `inf`.
    #[arg(long)]
    ckappa: Option<String>,
    /// AR(1) prewhitening in the long-run variances.
    #[arg(long, conflicts_with = "no_prewhiten")]
    prewhiten: bool,
    /// Plain kernel long-run variances (the default).
    #[arg(long)]
    no_prewhiten: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    model: Option<u8>,
    /// e.g. `rho=0.5` or `phi1=0.8,phi2=0.3`.
    #[arg(long)]
    params: Option<String>,
    #[arg(long = "N")]
    half_len: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluate c_kappa = inf, 0.45, 0.55 and 0.65.
    #[arg(long)]
    sweep_ckappa: bool,
    #[arg(long)]
    ckappa: Option<String>,
    /// Comma-separated K0 values.
    #[arg(long)]
    k0: Option<String>,
    /// `gaussian:VAR` or `t:DF`.
    #[arg(long)]
    law: Option<String>,
    #[arg(long)]
    phi: Option<f64>,
    /// `literal` or `shifted` MA indexing for models 5 to 7.
    #[arg(long)]
    ma_convention: Option<String>,
    /// AR(1) prewhitening in the long-run variances.
    #[arg(long, conflicts_with = "no_prewhiten")]
    prewhiten: bool,
    /// Plain kernel long-run variances (the default).
    #[arg(long)]
    no_prewhiten: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// e.g. `model=1` or `model=4,rho=0.5,N=100`.
    #[arg(long)]
    filter: Option<String>,
    /// Flagging threshold in percentage points.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    ma_convention: Option<String>,
    /// AR(1) prewhitening in the long-run variances.
    #[arg(long, conflicts_with = "no_prewhiten")]
    prewhiten: bool,
    /// Plain kernel long-run variances (the default).
    #[arg(long)]
    no_prewhiten: bool,
    /// Print the CSV report instead of the comparison table.
    #[arg(long)]
    csv: bool,
}

type AnyResult<T> = Result<T, String>;

/// Flag value, else config value, else `None`.
fn pick<T: FromStr>(flag: Option<T>, cfg: &ConfigMap, key: &str) -> AnyResult<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| format!("config key {key}: cannot parse {v:?}")),
        None => Ok(None),
    }
}

fn pick_flag(flag: bool, cfg: &ConfigMap, key: &str) -> AnyResult<bool> {
    Ok(flag || pick::<bool>(None, cfg, key)?.unwrap_or(false))
}

fn lrv_options(prewhiten: bool, no_prewhiten: bool, cfg: &ConfigMap) -> AnyResult<LrvOptions> {
    let on = !no_prewhiten && pick(prewhiten.then_some(true), cfg, "prewhiten")?.unwrap_or(false);
    Ok(LrvOptions::default().with_prewhiten(on))
}

fn workers(flag: Option<usize>, cfg: &ConfigMap) -> AnyResult<usize> {
    let w = pick(flag, cfg, "workers")?.unwrap_or_else(default_workers);
    if w == 0 {
        return Err("worker count must be at least 1".into());
    }
    Ok(w)
}

fn parse_phi(phi: Option<f64>) -> AnyResult<f64> {
    let phi = phi.unwrap_or(0.05);
    if phi > 0.0 && phi < 1.0 {
        Ok(phi)
    } else {
        Err(format!("--phi must lie strictly between 0 and 1, got {phi}"))
    }
}

fn opt_display<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn outcome_csv(outcomes: &[TestOutcome64]) -> String {
    let mut s = String::from("# urtest-outcome v1\n");
    s.push_str("k0,c_kappa,phi,statistic,cv,cv_naive,kappa_n,first_half_sum,event_t,ratio,threshold,c_star,lambda_hat,rho_hat,sigma_s2,sigma_l2,b_hat,z_quantile,naive_p_value,decision,diagnostics\n");
    for o in outcomes {
        let diags: Vec<String> = o.diagnostics.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            o.k0,
            o.c_kappa,
            o.phi,
            o.statistic,
            o.cv,
            o.cv_naive,
            o.kappa_n,
            o.first_half_sum,
            o.event_t,
            o.ratio,
            opt_display(o.threshold),
            opt_display(o.c_star),
            opt_display(o.lambda_hat),
            opt_display(o.rho_hat),
            o.sigma_s2,
            opt_display(o.sigma_l2),
            o.b_hat,
            o.z_quantile,
            o.naive_p_value,
            decision(o),
            diags.join(";")
        );
    }
    s
}

fn decision(o: &TestOutcome64) -> &'static str {
    if o.reject {
        "REJECT"
    } else {
        "FAIL-TO-REJECT"
    }
}

fn outcome_text(outcomes: &[TestOutcome64]) -> String {
    let mut s = String::new();
    for o in outcomes {
        let _ = writeln!(s, "K0 = {}  c_kappa = {}  phi = {}", o.k0, o.c_kappa, o.phi);
        let rows: [(&str, String); 17] = [
            ("T_n", format!("{:.6e}", o.statistic)),
            ("cv", format!("{:.6e}", o.cv)),
            ("cv_naive", format!("{:.6e}", o.cv_naive)),
            ("kappa_n", format!("{:.6}", o.kappa_n)),
            ("first_half_sum", format!("{:.6e}", o.first_half_sum)),
            ("event_T", o.event_t.to_string()),
            ("R", format!("{:.6}", o.ratio)),
            ("threshold", opt_display(o.threshold.map(|v| format!("{v:.6}")))),
            ("C*", opt_display(o.c_star.map(|v| format!("{v:.6}")))),
            ("lambda_hat", opt_display(o.lambda_hat.map(|v| format!("{v:.6}")))),
            ("rho_hat", opt_display(o.rho_hat.map(|v| format!("{v:.6}")))),
            ("sigma_s2", format!("{:.6e}", o.sigma_s2)),
            ("sigma_l2", opt_display(o.sigma_l2.map(|v| format!("{v:.6e}")))),
            ("B_hat", format!("{:.6e}", o.b_hat)),
            ("z", format!("{:.10}", o.z_quantile)),
            ("naive p (approx.)", format!("{:.4}", o.naive_p_value)),
            ("decision", decision(o).to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "  {k:<18} {v}");
        }
        for d in &o.diagnostics {
            let _ = writeln!(s, "  diagnostic         {d}");
        }
    }
    s
}

fn cmd_test(args: TestArgs, cfg: &ConfigMap) -> AnyResult<String> {
    let input: PathBuf = pick(args.input, cfg, "input")?.ok_or("--input is required")?;
    let column = pick(args.column, cfg, "column")?.unwrap_or_else(|| "0".into());
    let phi = parse_phi(pick(args.phi, cfg, "phi")?)?;
    let ck = match pick(args.ckappa, cfg, "ckappa")? {
        Some(s) => CKappa::parse(&s).map_err(|e| e.to_string())?,
        None => CKappa::default(),
    };
    let k0s: Vec<usize> = match pick(args.k0, cfg, "k0")? {
        Some(k) => vec![k],
        None => (0..=urtest::acvf_test::DEFAULT_MAX_K0).collect(),
    };
    let csv = pick_flag(args.csv, cfg, "csv")?;

    let series = ingest_csv(&input, &ColumnSelector::parse(&column)).map_err(|e| e.to_string())?;
    let config = TestConfig::default()
        .with_phi(phi)
        .with_c_kappa(ck)
        .with_lrv_options(lrv_options(args.prewhiten, args.no_prewhiten, cfg)?);
    let outcomes = run_test_sweep(&series, &config, &k0s).map_err(|e| e.to_string())?;
    Ok(if csv {
        outcome_csv(&outcomes)
    } else {
        format!("n = {}\n{}", series.len(), outcome_text(&outcomes))
    })
}

fn parse_convention(s: Option<String>) -> AnyResult<MaConvention> {
    match s {
        Some(s) => MaConvention::parse(&s).map_err(|e| e.to_string()),
        None => Ok(MaConvention::default()),
    }
}

fn cmd_simulate(args: SimulateArgs, cfg: &ConfigMap, workers: usize) -> AnyResult<String> {
    let model: u8 = pick(args.model, cfg, "model")?.ok_or("--model is required")?;
    let params = pick(args.params, cfg, "params")?.ok_or("--params is required")?;
    let params = ModelParams::parse(&params).map_err(|e| e.to_string())?;
    let half_len: usize = pick(args.half_len, cfg, "n")?.ok_or("--N is required")?;
    let reps = pick(args.reps, cfg, "reps")?.unwrap_or(2000);
    let seed = pick(args.seed, cfg, "seed")?.unwrap_or(1);
    let phi = parse_phi(pick(args.phi, cfg, "phi")?)?;
    let law = match pick(args.law, cfg, "law")? {
        Some(s) => InnovationLaw::parse(&s).map_err(|e| e.to_string())?,
        None => InnovationLaw::default(),
    };
    let convention = parse_convention(pick(args.ma_convention, cfg, "ma_convention")?)?;
    let c_kappas = if pick_flag(args.sweep_ckappa, cfg, "sweep_ckappa")? {
        C_KAPPA_SWEEP.to_vec()
    } else {
        match pick(args.ckappa, cfg, "ckappa")? {
            Some(s) => vec![CKappa::parse(&s).map_err(|e| e.to_string())?],
            None => vec![CKappa::default()],
        }
    };
    let k0s = match pick(args.k0, cfg, "k0")? {
        Some(s) => s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad K0 value {p:?}")))
            .collect::<AnyResult<Vec<_>>>()?,
        None => vec![0],
    };
    let mut cell = Cell::new(model, params, half_len, reps);
    cell.law = law;
    cell.convention = convention;
    let mut plan = ExperimentPlan::new(vec![cell], seed);
    plan.k0s = k0s;
    plan.c_kappas = c_kappas;
    plan.phi = phi;
    plan.lrv_options = lrv_options(args.prewhiten, args.no_prewhiten, cfg)?;
    plan.kpss_bandwidths = kpss_rules(phi);
    plan.workers = workers;
    let report = run_plan(&plan).map_err(|e| e.to_string())?;
    Ok(if pick_flag(args.csv, cfg, "csv")? {
        report.to_csv()
    } else {
        report.to_text()
    })
}

fn kpss_rules(phi: f64) -> Vec<KpssBandwidth> {
    if urtest::baselines::kpss_critical_value(phi).is_ok() {
        vec![KpssBandwidth::Short, KpssBandwidth::Long]
    } else {
        Vec::new()
    }
}

fn cmd_reproduce(args: ReproduceArgs, cfg: &ConfigMap, workers: usize) -> AnyResult<String> {
    let reps = pick(args.reps, cfg, "reps")?.unwrap_or(2000);
    let seed = pick(args.seed, cfg, "seed")?.unwrap_or(1);
    let filter = match pick(args.filter, cfg, "filter")? {
        Some(f) => CellFilter::parse(&f).map_err(|e| e.to_string())?,
        None => CellFilter::default(),
    };
    let tolerance = pick(args.tolerance, cfg, "tolerance")?.unwrap_or(DEFAULT_TOLERANCE);
    let convention = parse_convention(pick(args.ma_convention, cfg, "ma_convention")?)?;
    let rows = table1::reference_rows(&filter);
    if rows.is_empty() {
        return Err("filter matches no cells".into());
    }
    let mut cells = table1::reference_cells(&rows, reps);
    for c in &mut cells {
        c.convention = convention;
    }
    let mut plan = ExperimentPlan::new(cells, seed);
    plan.c_kappas = table1::COLUMN_C_KAPPA.to_vec();
    plan.lrv_options = lrv_options(args.prewhiten, args.no_prewhiten, cfg)?;
    plan.kpss_bandwidths = vec![KpssBandwidth::Short, KpssBandwidth::Long];
    plan.workers = workers;
    let report = run_plan(&plan).map_err(|e| e.to_string())?;
    if pick_flag(args.csv, cfg, "csv")? {
        return Ok(report.to_csv());
    }
    let summary = table1::compare(&report, &rows, tolerance).map_err(|e| e.to_string())?;
    Ok(format!(
        "seed {seed}  reps {reps}  ma {convention}  prewhiten {}  runtime {:.2}s\n{}",
        plan.lrv_options.prewhiten,
        report.runtime_secs,
        summary.to_text()
    ))
}

fn run(cli: Cli) -> AnyResult<String> {
    let cfg = match &cli.config {
        Some(p) => parse_config_file(p).map_err(|e| e.to_string())?,
        None => ConfigMap::new(),
    };
    match cli.command {
        Command::Test(a) => cmd_test(a, &cfg),
        Command::Simulate(a) => cmd_simulate(a, &cfg, workers(cli.workers, &cfg)?),
        Command::ReproduceTable1(a) => cmd_reproduce(a, &cfg, workers(cli.workers, &cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
