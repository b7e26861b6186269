//! Monte-Carlo experiment families run by `eigenpath bench`.

use std::fmt;
use std::time::Instant;

use eigenpath::conditioning::mu_f_av;
use eigenpath::homotopy::{ceiling_audit, PathOptions};
use eigenpath::initial::{sample_omega, single_start};
use eigenpath::linalg::random::truncation_radius;
use eigenpath::linalg::svd::singular_values;
use eigenpath::linalg::{sample_gaussian_matrix, sample_truncated_gaussian, ComplexMatrix};
use eigenpath::newton::ApproxEigenpair;
use eigenpath::rng::RngStream;
use eigenpath::solve::{all_eigenpairs, random_eigenpair, single_eigenpair};
use eigenpath::EigenError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::stats::{summarize, Summary};
use crate::CliError;

/// Quadrature points used for the step-count ceiling.
pub const CEILING_QUADRATURE: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Average condition moments of Gaussian, truncated Gaussian and sphere inputs.
    A,
    /// Determinant moments of square Gaussian matrices.
    B,
    /// Pseudoinverse moment of (n-1) x n Gaussian matrices.
    C,
    /// Proposals per accepted sample of the random initial triple.
    D,
    /// Step counts of the three solvers.
    E,
    /// Observed steps against the step-count ceiling.
    F,
}

impl Experiment {
    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            Self::A | Self::F => vec![6],
            Self::B => vec![2, 3, 4],
            Self::C => vec![3, 4],
            Self::D => vec![4, 8],
            Self::E => vec![4, 8, 16],
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Self::A => 5_000,
            Self::B | Self::C => 100_000,
            Self::D => 10_000,
            Self::E => 10,
            Self::F => 20,
        }
    }

    fn min_size(self) -> usize {
        match self {
            Self::B => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
            Self::D => "d",
            Self::E => "e",
            Self::F => "f",
        };
        f.write_str(c)
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub experiment: Experiment,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub sigma: f64,
    pub center: Option<ComplexMatrix>,
    pub jobs: usize,
    pub max_steps: u64,
}

impl BenchConfig {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        Self {
            experiment,
            sizes: experiment.default_sizes(),
            trials: experiment.default_trials(),
            seed,
            sigma: 1.0,
            center: None,
            jobs: 1,
            max_steps: eigenpath::homotopy::DEFAULT_MAX_STEPS,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(CliError::Usage("sigma must be positive".into()));
        }
        if self.sizes.is_empty() {
            return Err(CliError::Usage("no sizes given".into()));
        }
        for &n in &self.sizes {
            if n < self.experiment.min_size() {
                return Err(CliError::Usage(format!(
                    "experiment {} needs n >= {}",
                    self.experiment,
                    self.experiment.min_size()
                )));
            }
            if let Some(c) = &self.center {
                if c.shape() != (n, n) {
                    return Err(CliError::Usage(format!("center has shape {:?}, expected ({n}, {n})", c.shape())));
                }
                if self.experiment == Experiment::A && c.frobenius_norm() > truncation_radius(n) {
                    return Err(CliError::Usage("center lies outside the truncation ball".into()));
                }
            }
        }
        if self.center.is_some() && matches!(self.experiment, Experiment::C | Experiment::D) {
            return Err(CliError::Usage(format!("experiment {} takes no center", self.experiment)));
        }
        Ok(())
    }

    /// Master seed for size `n`; trial `t` then uses stream `t`.
    pub fn seed_for(&self, n: usize) -> u64 {
        self.seed.wrapping_add((n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// One measurement of one trial. `value` is absent when the trial failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub n: usize,
    pub trial: usize,
    pub metric: String,
    pub value: Option<f64>,
    pub status: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Reference {
    /// Exact expectation.
    Equals(f64),
    /// One-sided bound on the expectation.
    AtMost(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricReport {
    pub n: usize,
    pub metric: String,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub sigma: f64,
    pub centered: bool,
    pub jobs: usize,
    pub wall_seconds: f64,
    pub build: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatsReport {
    pub metrics: Vec<MetricReport>,
    pub metadata: Metadata,
    pub notes: Vec<String>,
}

impl StatsReport {
    pub fn metric(&self, n: usize, name: &str) -> Option<&MetricReport> {
        self.metrics.iter().find(|m| m.n == n && m.metric == name)
    }
}

type Measurement = (&'static str, Result<f64, String>);

fn failure(e: &EigenError) -> String {
    e.kind().to_string()
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

fn trial_a(cfg: &BenchConfig, n: usize, rng: &mut RngStream) -> Vec<Measurement> {
    let center = cfg.center.as_ref();
    let ratio = |a: &ComplexMatrix| -> Result<f64, String> {
        let m = mu_f_av(a).map_err(|e| failure(&e))?;
        if !m.is_finite() {
            return Err("sigma_near".into());
        }
        Ok(m * m / a.frobenius_norm_sqr())
    };
    let g = sample_gaussian_matrix(rng, n, n, center, cfg.sigma);
    let t = sample_truncated_gaussian(rng, n, center, cfg.sigma);
    let s = sample_gaussian_matrix(rng, n, n, None, 1.0);
    let s = s.scale_real(1.0 / s.frobenius_norm());
    vec![
        ("gaussian_mu2_ratio", ratio(&g)),
        ("truncated_mu2_ratio", ratio(&t)),
        // On the unit sphere the ratio is mu_{F,av}^2 itself.
        ("sphere_mu2", ratio(&s)),
    ]
}

fn trial_b(cfg: &BenchConfig, m: usize, rng: &mut RngStream) -> Vec<Measurement> {
    let g = sample_gaussian_matrix(rng, m, m, cfg.center.as_ref(), cfg.sigma);
    let sv2: Vec<f64> = singular_values(&g).iter().map(|s| s * s).collect();
    let det2: f64 = sv2.iter().product();
    // |G^{-1}|_F^2 |det G|^2 = sum_i prod_{j != i} s_j^2, free of divisions.
    let weighted: f64 = (0..m)
        .map(|i| sv2.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x).product::<f64>())
        .sum();
    vec![("det2", Ok(det2)), ("inv_weighted_det2", Ok(weighted))]
}

fn trial_c(cfg: &BenchConfig, n: usize, rng: &mut RngStream) -> Vec<Measurement> {
    let m = sample_gaussian_matrix(rng, n - 1, n, None, cfg.sigma);
    let sv = singular_values(&m);
    let value = if sv.iter().any(|&s| s == 0.0) {
        Err("rank_deficient".into())
    } else {
        Ok(sv.iter().map(|s| 1.0 / (s * s)).sum())
    };
    vec![("pinv_frobenius2", value)]
}

fn trial_d(n: usize, rng: &mut RngStream) -> Vec<Measurement> {
    let value = sample_omega(rng, n).map(|(_, p)| p as f64).map_err(|e| failure(&e));
    vec![("proposals", value)]
}

fn path_options(cfg: &BenchConfig) -> PathOptions {
    PathOptions {
        max_steps: cfg.max_steps,
        record_steps: false,
        ..PathOptions::default()
    }
}

fn trial_e(cfg: &BenchConfig, n: usize, rng: &mut RngStream) -> Vec<Measurement> {
    let opts = path_options(cfg);
    let a = sample_gaussian_matrix(rng, n, n, cfg.center.as_ref(), cfg.sigma);
    let single = single_eigenpair(&a, &opts).map(|s| s.steps as f64).map_err(|e| failure(&e));
    let random = random_eigenpair(rng, &a, &opts);
    let proposals = random.as_ref().map(|r| r.proposals as f64).map_err(failure);
    let random_steps = random.map(|r| r.solution.steps as f64).map_err(|e| failure(&e));
    let (all_total, all_max) = match all_eigenpairs(&a, &opts) {
        Ok(all) => {
            match all.results.iter().map(|r| r.as_ref().map(|s| s.steps)).collect::<Result<Vec<_>, _>>() {
                Ok(steps) => (
                    Ok(steps.iter().sum::<u64>() as f64),
                    Ok(steps.iter().copied().max().unwrap_or(0) as f64),
                ),
                Err(e) => (Err(failure(e)), Err(failure(e))),
            }
        }
        Err(e) => (Err(failure(&e)), Err(failure(&e))),
    };
    vec![
        ("single_steps", single),
        ("random_steps", random_steps),
        ("random_proposals", proposals),
        ("all_steps_total", all_total),
        ("all_steps_max", all_max),
    ]
}

fn trial_f(cfg: &BenchConfig, n: usize, rng: &mut RngStream) -> Vec<Measurement> {
    let a = sample_gaussian_matrix(rng, n, n, cfg.center.as_ref(), cfg.sigma);
    let h = single_start(n).expect("n >= 2");
    let p0 = ApproxEigenpair::new(h.eigenvalue, &h.eigenvector).expect("unit start vector");
    match ceiling_audit(&a, &h.matrix, &p0, CEILING_QUADRATURE, &path_options(cfg)) {
        Ok((_, audit)) => vec![
            ("steps", Ok(audit.steps as f64)),
            ("ceiling", Ok(audit.ceiling.ceil())),
            ("steps_over_ceiling", Ok(audit.steps as f64 / audit.ceiling.ceil())),
            ("min_interval_length", Ok(audit.min_interval_length)),
            ("short_intervals", Ok(audit.short_intervals as f64)),
            ("within_ceiling", Ok(if audit.within_ceiling() { 1.0 } else { 0.0 })),
        ],
        Err(e) => ["steps", "ceiling", "steps_over_ceiling", "min_interval_length", "short_intervals", "within_ceiling"]
            .into_iter()
            .map(|m| (m, Err(failure(&e))))
            .collect(),
    }
}

fn reference(cfg: &BenchConfig, n: usize, metric: &str) -> Option<Reference> {
    let s2 = cfg.sigma * cfg.sigma;
    let centered = cfg.center.is_some();
    match (cfg.experiment, metric) {
        (Experiment::A, "gaussian_mu2_ratio") => Some(Reference::AtMost(n as f64 / s2)),
        (Experiment::A, "sphere_mu2") => Some(Reference::AtMost((n * n * n) as f64)),
        (Experiment::B, "det2") if !centered => Some(Reference::Equals(s2.powi(n as i32) * factorial(n))),
        (Experiment::B, "inv_weighted_det2") if !centered => {
            Some(Reference::Equals(factorial(n) * n as f64 * s2.powi(n as i32 - 1)))
        }
        (Experiment::C, "pinv_frobenius2") => Some(Reference::Equals((n - 1) as f64 / s2)),
        (Experiment::D, "proposals") => Some(Reference::AtMost(4.0 * n as f64)),
        _ => None,
    }
}

fn notes(cfg: &BenchConfig) -> Vec<String> {
    let mut out = Vec::new();
    match cfg.experiment {
        Experiment::A => {
            out.push("smoothed suprema over centers are not evaluated; only the given center is sampled".into());
            out.push("trials whose spectrum is flagged near-degenerate are counted as failures".into());
        }
        Experiment::B if cfg.center.is_some() => {
            out.push("with a nonzero center the weighted moment is bounded by m/sigma^2 times the determinant moment".into());
        }
        Experiment::E => out.push("step-count scaling is reported without a pass/fail threshold".into()),
        Experiment::F => out.push(format!("ceilings use {CEILING_QUADRATURE} quadrature points")),
        _ => {}
    }
    out
}

fn run_trial(cfg: &BenchConfig, n: usize, trial: usize) -> Vec<Measurement> {
    let mut rng = RngStream::new(cfg.seed_for(n), trial as u64);
    match cfg.experiment {
        Experiment::A => trial_a(cfg, n, &mut rng),
        Experiment::B => trial_b(cfg, n, &mut rng),
        Experiment::C => trial_c(cfg, n, &mut rng),
        Experiment::D => trial_d(n, &mut rng),
        Experiment::E => trial_e(cfg, n, &mut rng),
        Experiment::F => trial_f(cfg, n, &mut rng),
    }
}

/// Runs every trial of the configured experiment and aggregates the results.
/// Rows are ordered by size, trial and metric whatever the number of jobs.
pub fn run_bench(cfg: &BenchConfig) -> Result<(Vec<Row>, StatsReport), CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let mut rows = Vec::new();
    let mut metrics = Vec::new();
    for &n in &cfg.sizes {
        let per_trial: Vec<Vec<Measurement>> =
            pool.install(|| (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, n, t)).collect());
        let names: Vec<&'static str> = per_trial[0].iter().map(|m| m.0).collect();
        for (trial, ms) in per_trial.iter().enumerate() {
            for (metric, value) in ms {
                rows.push(Row {
                    experiment: cfg.experiment.to_string(),
                    n,
                    trial,
                    metric: metric.to_string(),
                    value: value.as_ref().ok().copied(),
                    status: match value {
                        Ok(_) => "ok".into(),
                        Err(kind) => format!("error:{kind}"),
                    },
                });
            }
        }
        for (k, name) in names.iter().enumerate() {
            let values: Vec<f64> = per_trial.iter().filter_map(|ms| ms[k].1.as_ref().ok().copied()).collect();
            let failures = cfg.trials - values.len();
            metrics.push(MetricReport {
                n,
                metric: name.to_string(),
                summary: summarize(&values, failures),
                reference: reference(cfg, n, name),
            });
        }
    }
    let report = StatsReport {
        metrics,
        metadata: Metadata {
            experiment: cfg.experiment.to_string(),
            sizes: cfg.sizes.clone(),
            trials: cfg.trials,
            seed: cfg.seed,
            sigma: cfg.sigma,
            centered: cfg.center.is_some(),
            jobs: cfg.jobs,
            wall_seconds: start.elapsed().as_secs_f64(),
            build: format!("{} ({})", env!("CARGO_PKG_VERSION"), env!("EIGENPATH_GIT_DESCRIBE")),
        },
        notes: notes(cfg),
    };
    Ok((rows, report))
}

/// Per-trial rows as CSV with header `experiment,n,trial,metric,value,status`.
pub fn rows_to_csv(rows: &[Row]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))
}
