//! Subcommand implementations.

use std::path::{Path, PathBuf};

use eigenpath::homotopy::{HomotopyTrace, PathOptions, DEFAULT_MAX_STEPS};
use eigenpath::linalg::{sample_gaussian_matrix, ComplexMatrix};
use eigenpath::newton::ApproxEigenpair;
use eigenpath::refine::relative_error_refine;
use eigenpath::rng::RngStream;
use eigenpath::solve::{all_eigenpairs, random_eigenpair, single_eigenpair, Solution};
use serde::Serialize;

use crate::experiments::{rows_to_csv, run_bench, BenchConfig};
use crate::io::{complex_pair, emit, read_matrix, read_pair, vector_pairs};
use crate::{CliError, Cli, Command, Format, Options, EXIT_NUMERICAL, EXIT_OK};

/// Stream ids under the master seed.
const MATRIX_STREAM: u64 = 0;
const START_STREAM: u64 = 1;

pub fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let o = &cli.opts;
    match cli.command {
        Command::SolveOne => solve_one(o),
        Command::SolveAll => solve_all(o),
        Command::SolveRandom => solve_random(o),
        Command::Refine => refine(o),
        Command::Bench => bench(o),
    }
}

fn require_seed(o: &Options) -> Result<u64, CliError> {
    o.seed.ok_or_else(|| CliError::Usage("--seed is required for randomized commands".into()))
}

fn load_center(path: &Path, n: usize) -> Result<ComplexMatrix, CliError> {
    let c = read_matrix(path)?;
    if c.shape() != (n, n) {
        return Err(CliError::Usage(format!("center has shape {:?}, expected ({n}, {n})", c.shape())));
    }
    Ok(c)
}

/// The input matrix, or a Gaussian `N(center, sigma^2)` matrix of size `--n`.
fn load_matrix(o: &Options) -> Result<ComplexMatrix, CliError> {
    if let Some(path) = &o.input {
        return read_matrix(path);
    }
    let n = match o.n.as_slice() {
        [n] => *n,
        [] => return Err(CliError::Usage("either --input or --n is required".into())),
        _ => return Err(CliError::Usage("solvers take a single --n".into())),
    };
    if n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    if !(o.sigma > 0.0 && o.sigma.is_finite()) {
        return Err(CliError::Usage("--sigma must be positive".into()));
    }
    let seed = require_seed(o)?;
    let center = o.center.as_deref().map(|p| load_center(p, n)).transpose()?;
    let mut rng = RngStream::new(seed, MATRIX_STREAM);
    Ok(sample_gaussian_matrix(&mut rng, n, n, center.as_ref(), o.sigma))
}

fn path_options(o: &Options) -> PathOptions {
    PathOptions {
        max_steps: o.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
        record_steps: o.trace,
        ..PathOptions::default()
    }
}

#[derive(Serialize)]
struct StepJson {
    s: f64,
    ds: f64,
    r: f64,
    beta: f64,
}

#[derive(Serialize)]
struct TraceJson {
    n: usize,
    seed: Option<u64>,
    steps: u64,
    final_residual: f64,
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_step: Option<Vec<StepJson>>,
}

fn trace_json(n: usize, seed: Option<u64>, residual: f64, t: &HomotopyTrace, full: bool) -> TraceJson {
    TraceJson {
        n,
        seed,
        steps: t.total_steps,
        final_residual: residual,
        alpha: t.alpha,
        per_step: full.then(|| {
            t.steps
                .iter()
                .map(|r| StepJson {
                    s: r.s,
                    ds: r.ds,
                    r: r.r,
                    beta: r.beta,
                })
                .collect()
        }),
    }
}

#[derive(Serialize)]
struct PairOut {
    index: usize,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    zeta: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<serde_json::Value>,
}

impl PairOut {
    fn from_result(index: usize, r: &Result<Solution, eigenpath::EigenError>) -> Self {
        match r {
            Ok(s) => Self {
                index,
                ok: true,
                zeta: Some(complex_pair(s.pair.zeta)),
                w: Some(vector_pairs(&s.pair.w)),
                steps: Some(s.steps),
                residual: Some(s.residual),
                beta: Some(s.beta),
                error: None,
            },
            Err(e) => Self {
                index,
                ok: false,
                zeta: None,
                w: None,
                steps: None,
                residual: None,
                beta: None,
                error: Some(serde_json::json!({"kind": e.kind(), "message": e.to_string()})),
            },
        }
    }
}

/// Shortest round-trip representation, with an exponent for small and large values.
fn fmt_f64(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

fn pairs_csv(pairs: &[PairOut]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
    w.write_record(["index", "zeta_re", "zeta_im", "steps", "residual", "status"]).map_err(err)?;
    for p in pairs {
        let f = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        let status = match &p.error {
            None => "ok".to_string(),
            Some(e) => format!("error:{}", e["kind"].as_str().unwrap_or("unknown")),
        };
        w.write_record([
            p.index.to_string(),
            f(p.zeta.map(|z| z[0])),
            f(p.zeta.map(|z| z[1])),
            p.steps.map(|s| s.to_string()).unwrap_or_default(),
            f(p.residual),
            status,
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))
}

fn write_json<T: Serialize>(o: &Options, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_vec_pretty(value).map_err(|e| CliError::Usage(format!("json: {e}")))?;
    text.push(b'\n');
    emit(o.out.as_deref(), &text)
}

#[derive(Serialize)]
struct SolveOut {
    command: &'static str,
    n: usize,
    #[serde(flatten)]
    pair: PairOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    proposals: Option<u64>,
    trace: TraceJson,
}

fn emit_single(o: &Options, command: &'static str, a: &ComplexMatrix, s: Solution, proposals: Option<u64>) -> Result<i32, CliError> {
    let n = a.rows();
    let trace = trace_json(n, o.seed, s.residual, &s.trace, o.trace);
    let pair = PairOut::from_result(0, &Ok(s));
    match o.format {
        Format::Csv => emit(o.out.as_deref(), &pairs_csv(std::slice::from_ref(&pair))?)?,
        Format::Json => write_json(
            o,
            &SolveOut {
                command,
                n,
                pair,
                proposals,
                trace,
            },
        )?,
    }
    Ok(EXIT_OK)
}

fn solve_one(o: &Options) -> Result<i32, CliError> {
    let a = load_matrix(o)?;
    let s = single_eigenpair(&a, &path_options(o))?;
    emit_single(o, "solve-one", &a, s, None)
}

fn solve_random(o: &Options) -> Result<i32, CliError> {
    let a = load_matrix(o)?;
    let mut rng = RngStream::new(require_seed(o)?, START_STREAM);
    let r = random_eigenpair(&mut rng, &a, &path_options(o))?;
    emit_single(o, "solve-random", &a, r.solution, Some(r.proposals))
}

#[derive(Serialize)]
struct AllOut {
    command: &'static str,
    n: usize,
    distinct: bool,
    pairs: Vec<PairOut>,
}

fn solve_all(o: &Options) -> Result<i32, CliError> {
    let a = load_matrix(o)?;
    let all = all_eigenpairs(&a, &path_options(o))?;
    let pairs: Vec<PairOut> = all.results.iter().enumerate().map(|(i, r)| PairOut::from_result(i, r)).collect();
    let failed = all.results.iter().find_map(|r| r.as_ref().err()).cloned();
    match o.format {
        Format::Csv => emit(o.out.as_deref(), &pairs_csv(&pairs)?)?,
        Format::Json => write_json(
            o,
            &AllOut {
                command: "solve-all",
                n: a.rows(),
                distinct: all.distinct,
                pairs,
            },
        )?,
    }
    if let Some(e) = failed {
        // Partial results are already written; report the first failure.
        let e = CliError::from(e);
        eprintln!("{}", e.to_json());
        return Ok(e.exit_code());
    }
    if !all.distinct {
        eprintln!(
            "{}",
            serde_json::json!({"error": "not_distinct", "message": "two paths reached the same eigenpair"})
        );
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RefineOut {
    command: &'static str,
    n: usize,
    epsilon: f64,
    iterations: u32,
    zeta: [f64; 2],
    w: Vec<[f64; 2]>,
    residual: f64,
}

fn refine(o: &Options) -> Result<i32, CliError> {
    let epsilon = o.epsilon.ok_or_else(|| CliError::Usage("--epsilon is required for refine".into()))?;
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(CliError::Usage(format!("--epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    let a = load_matrix(o)?;
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Err(CliError::Usage("zero matrix".into()));
    }
    let pair = match &o.pair {
        Some(p) => read_pair(p)?,
        None => single_eigenpair(&a, &path_options(o))?.pair,
    };
    if pair.w.dim() != a.rows() {
        return Err(CliError::Usage("pair dimension does not match the matrix".into()));
    }
    let unit = a.scale_real(1.0 / norm);
    let start = ApproxEigenpair::new(pair.zeta / norm, &pair.w)?;
    let out = relative_error_refine(&unit, &start, epsilon)?;
    let zeta = out.pair.zeta * norm;
    let residual = eigenpath::conditioning::residual(&a, zeta, &out.pair.w) / norm;
    let result = RefineOut {
        command: "refine",
        n: a.rows(),
        epsilon,
        iterations: out.iterations,
        zeta: complex_pair(zeta),
        w: vector_pairs(&out.pair.w),
        residual,
    };
    match o.format {
        Format::Json => write_json(o, &result)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let err = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
            w.write_record(["zeta_re", "zeta_im", "iterations", "residual"]).map_err(err)?;
            w.write_record([fmt_f64(zeta.re), fmt_f64(zeta.im), out.iterations.to_string(), fmt_f64(residual)])
                .map_err(err)?;
            emit(o.out.as_deref(), &w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?)?;
        }
    }
    Ok(EXIT_OK)
}

fn report_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".report.json");
    PathBuf::from(name)
}

fn bench(o: &Options) -> Result<i32, CliError> {
    let experiment = o
        .experiment
        .ok_or_else(|| CliError::Usage("--experiment is required for bench".into()))?;
    let mut cfg = BenchConfig::new(experiment, require_seed(o)?);
    if !o.n.is_empty() {
        cfg.sizes = o.n.clone();
    }
    if let Some(t) = o.trials {
        cfg.trials = t;
    }
    cfg.sigma = o.sigma;
    cfg.jobs = o.jobs;
    if let Some(m) = o.max_steps {
        cfg.max_steps = m;
    }
    if let Some(path) = &o.center {
        cfg.center = Some(read_matrix(path)?);
    }
    let (rows, report) = run_bench(&cfg)?;
    let report_text = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Usage(format!("json: {e}")))?;
    match o.format {
        Format::Csv => {
            emit(o.out.as_deref(), &rows_to_csv(&rows)?)?;
            match &o.out {
                Some(out) => emit(Some(&report_path(out)), &report_text)?,
                None => eprintln!("{}", String::from_utf8_lossy(&report_text)),
            }
        }
        Format::Json => write_json(o, &serde_json::json!({"report": report, "rows": rows}))?,
    }
    Ok(EXIT_OK)
}
