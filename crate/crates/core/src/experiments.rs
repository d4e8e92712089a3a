//! Seeded Monte Carlo harness: scenario sweeps over the signal-strength
//! grid, per-replication metrics for every requested estimator, aggregation
//! into quantile bands, and CSV / plot-data emission.
//!
//! Determinism contract: a scenario is a pure function of
//! `(config, master_seed)`. Replications are embarrassingly parallel and
//! records are sorted before emission, so output bytes do not depend on the
//! thread count. Timing is off by default because measured wall times would
//! break that contract; enabling `timing` is the documented exception.

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use crate::adaptive::{run_early_stopping, run_iteration_selection, SelectionRecord};
use crate::baselines::{default_lambda_l1, iht_top_s, ista_lasso, StepRule};
use crate::error::{Error, Result};
use crate::iht::{run_nonadaptive, NonAdaptiveConfig};
use crate::model::{
    effective_noise, generate_design, noise_event, sample_signal, synthesize_instance, DesignKind,
    MagnitudeKind, NoiseKind,
};
use crate::rng::{replication_seed, stream_seed};
use crate::sharp::{
    estimation_steps, estimation_threshold, hamming_distance, recovery_steps, recovery_threshold,
    run_fixed_threshold, oracle_least_squares, support_pattern, support_pattern_of_sparse,
};
use crate::trace::IterateTrace;

const TOP_S_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Nonadaptive,
    EarlyStopping,
    IterationSelection,
    SharpEstimation,
    SharpRecovery,
    IhtTopS,
    IstaLasso,
    OracleLs,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Nonadaptive => "nonadaptive",
            EstimatorKind::EarlyStopping => "early_stopping",
            EstimatorKind::IterationSelection => "iteration_selection",
            EstimatorKind::SharpEstimation => "sharp_estimation",
            EstimatorKind::SharpRecovery => "sharp_recovery",
            EstimatorKind::IhtTopS => "iht_top_s",
            EstimatorKind::IstaLasso => "ista_lasso",
            EstimatorKind::OracleLs => "oracle_ls",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "nonadaptive" => EstimatorKind::Nonadaptive,
            "early_stopping" => EstimatorKind::EarlyStopping,
            "iteration_selection" => EstimatorKind::IterationSelection,
            "sharp_estimation" => EstimatorKind::SharpEstimation,
            "sharp_recovery" => EstimatorKind::SharpRecovery,
            "iht_top_s" => EstimatorKind::IhtTopS,
            "ista_lasso" => EstimatorKind::IstaLasso,
            "oracle_ls" => EstimatorKind::OracleLs,
            other => return Err(Error::Config(format!("unknown estimator `{other}`"))),
        })
    }
}

fn default_name() -> String {
    "scenario".to_string()
}
fn default_kappa() -> f64 {
    0.25
}
fn default_epsilon() -> f64 {
    0.25
}
fn default_penalty_const() -> f64 {
    10.0
}
fn default_true() -> bool {
    true
}
fn default_max_iter() -> usize {
    10_000
}
fn default_design_kind() -> DesignKind {
    DesignKind::Gaussian
}
fn default_noise_kind() -> NoiseKind {
    NoiseKind::Gaussian
}
fn default_magnitude_kind() -> MagnitudeKind {
    MagnitudeKind::FlatA
}
fn default_ista_iters() -> usize {
    300
}
fn default_ista_tol() -> f64 {
    1e-8
}

/// One scenario: a point in `(n, p, s, sigma, kappa, epsilon, ...)` space
/// swept over a grid of signal strengths `a / a*`, where
/// `a* = sigma sqrt(2 log(ep/s)) / maxnorm` is the universal separation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub sigma: f64,
    pub a_over_astar: Vec<f64>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_design_kind")]
    pub design_kind: DesignKind,
    #[serde(default = "default_noise_kind")]
    pub noise_kind: NoiseKind,
    #[serde(default = "default_magnitude_kind")]
    pub magnitude_kind: MagnitudeKind,
    pub replications: u64,
    pub master_seed: u64,
    pub estimators: Vec<EstimatorKind>,
    #[serde(default = "default_penalty_const")]
    pub penalty_const: f64,
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Record measured wall times; breaks byte-identical reproducibility.
    #[serde(default)]
    pub timing: bool,
    /// Sharp stage uses the residual noise estimate instead of the true sigma.
    #[serde(default)]
    pub adaptive_sigma_sharp: bool,
    #[serde(default = "default_ista_iters")]
    pub ista_iters: usize,
    #[serde(default = "default_ista_tol")]
    pub ista_tol: f64,
    /// Override for the l1 level; default is the universal choice
    /// `2 sigma sqrt(2 n log p)`.
    #[serde(default)]
    pub lambda_l1: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Re-parses with `key = value` overrides applied on top of the file.
    pub fn from_toml_str_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (key, raw) in overrides {
            // Parse the raw text as a TOML value; bare words fall back to strings.
            let value = match format!("v = {raw}").parse::<toml::Table>() {
                Ok(mut t) => t.remove("v").unwrap(),
                Err(_) => toml::Value::String(raw.clone()),
            };
            table.insert(key.clone(), value);
        }
        let cfg: ScenarioConfig =
            table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    /// The adaptive noise-estimation guarantees are proved under
    /// `n > 14000 s log(ep)`; desk scales sit far below it. Callers may want
    /// to surface a note when adaptive estimators run outside the regime.
    pub fn adaptive_regime_satisfied(&self) -> bool {
        self.n as f64 > 14000.0 * self.s as f64 * (std::f64::consts::E * self.p as f64).ln()
    }

    pub fn uses_adaptive_estimators(&self) -> bool {
        self.estimators.iter().any(|e| {
            matches!(
                e,
                EstimatorKind::EarlyStopping
                    | EstimatorKind::IterationSelection
                    | EstimatorKind::SharpEstimation
                    | EstimatorKind::SharpRecovery
            )
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(',') {
            return Err(Error::Config("scenario name must be nonempty and comma-free".into()));
        }
        if self.n == 0 || self.p == 0 {
            return Err(Error::Config("n and p must be >= 1".into()));
        }
        if self.s == 0 {
            return Err(Error::Config("s must be >= 1".into()));
        }
        if 3 * self.s > self.p {
            return Err(Error::Config(format!(
                "standing assumption s <= p/3 violated: s={}, p={}",
                self.s, self.p
            )));
        }
        if self.sigma < 0.0 {
            return Err(Error::Config("sigma must be >= 0".into()));
        }
        if self.a_over_astar.is_empty() || self.a_over_astar.iter().any(|&a| a < 0.0) {
            return Err(Error::Config("a_over_astar grid must be nonempty and >= 0".into()));
        }
        if !(0.0 < self.kappa && self.kappa < 1.0) {
            return Err(Error::Config("kappa must be in (0,1)".into()));
        }
        if !(0.0 < self.epsilon && self.epsilon < 1.0) {
            return Err(Error::Config("epsilon must be in (0,1)".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("estimators must be nonempty".into()));
        }
        if self.penalty_const <= 0.0 {
            return Err(Error::Config("penalty_const must be > 0".into()));
        }
        Ok(())
    }
}

/// One (replication, estimator, signal-strength) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub scenario: String,
    pub replication: u64,
    pub estimator: EstimatorKind,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub sigma: f64,
    pub a_over_astar: f64,
    pub seed: u64,
    pub l2_error_sq: f64,
    /// `l2_error_sq * maxnorm^2 / sigma^2`; equals `s` at the oracle rate.
    pub normalized_error: f64,
    pub hamming: usize,
    pub exact_recovery: bool,
    pub nnz: usize,
    pub iterations: usize,
    pub event_o: bool,
    pub wall_time_ms: f64,
}

pub const RECORDS_CSV_HEADER: &str = "scenario,replication,estimator,n,p,s,sigma,a_over_astar,seed,l2_error_sq,normalized_error,hamming,exact_recovery,nnz,iterations,event_O,wall_time_ms";

/// Everything replay needs to print a full per-iteration account.
#[derive(Debug, Clone)]
pub struct ReplayDetail {
    pub trace: Option<IterateTrace>,
    pub selection: Vec<SelectionRecord>,
}

struct EstimatorOutcome {
    beta_hat: Array1<f64>,
    iterations: usize,
    detail: ReplayDetail,
}

fn run_estimator(
    cfg: &ScenarioConfig,
    design: &crate::model::DesignMatrix,
    y: &Array1<f64>,
    beta_true: &crate::model::SparseVector,
    estimator: EstimatorKind,
) -> Result<EstimatorOutcome> {
    let p = design.p();
    let maxnorm = design.max_col_norm();
    match estimator {
        EstimatorKind::Nonadaptive => {
            let na = NonAdaptiveConfig {
                max_iter: cfg.max_iter,
                ..NonAdaptiveConfig::new(cfg.s, cfg.sigma, cfg.kappa)
            };
            let trace = run_nonadaptive(design, y, &na, Some(beta_true))?;
            Ok(EstimatorOutcome {
                beta_hat: trace.final_beta(),
                iterations: trace.stop_index,
                detail: ReplayDetail { trace: Some(trace), selection: Vec::new() },
            })
        }
        EstimatorKind::EarlyStopping => {
            let run = run_early_stopping(design, y, cfg.kappa, cfg.max_iter, Some(beta_true))?;
            Ok(EstimatorOutcome {
                beta_hat: run.trace.final_beta(),
                iterations: run.m_bar,
                detail: ReplayDetail { trace: Some(run.trace), selection: Vec::new() },
            })
        }
        EstimatorKind::IterationSelection => {
            let run = run_iteration_selection(
                design,
                y,
                cfg.kappa,
                cfg.penalty_const,
                cfg.max_iter,
                Some(beta_true),
            )?;
            Ok(EstimatorOutcome {
                beta_hat: run.selected_beta(),
                iterations: run.t_hat,
                detail: ReplayDetail { trace: Some(run.trace), selection: run.records },
            })
        }
        EstimatorKind::SharpEstimation | EstimatorKind::SharpRecovery => {
            let warm = run_iteration_selection(
                design,
                y,
                cfg.kappa,
                cfg.penalty_const,
                cfg.max_iter,
                Some(beta_true),
            )?;
            let sigma_used = if cfg.adaptive_sigma_sharp {
                crate::adaptive::residual_sigma(design, y, &warm.selected_beta())
            } else {
                cfg.sigma
            };
            let (lambda, steps) = if estimator == EstimatorKind::SharpEstimation {
                (
                    estimation_threshold(cfg.epsilon, sigma_used, maxnorm, p, cfg.s)?,
                    estimation_steps(p, cfg.s),
                )
            } else {
                (
                    recovery_threshold(cfg.epsilon, sigma_used, maxnorm, p)?,
                    recovery_steps(cfg.s),
                )
            };
            let trace =
                run_fixed_threshold(design, y, &warm.selected_beta(), lambda, steps, Some(beta_true))?;
            Ok(EstimatorOutcome {
                beta_hat: trace.final_beta(),
                iterations: warm.t_hat + steps,
                detail: ReplayDetail { trace: Some(trace), selection: warm.records },
            })
        }
        EstimatorKind::IhtTopS => {
            let res = iht_top_s(design, y, cfg.s, TOP_S_ITERS)?;
            Ok(EstimatorOutcome {
                beta_hat: res.beta_hat,
                iterations: res.iterations_used,
                detail: ReplayDetail { trace: None, selection: Vec::new() },
            })
        }
        EstimatorKind::IstaLasso => {
            let lambda_l1 = cfg
                .lambda_l1
                .unwrap_or_else(|| default_lambda_l1(cfg.sigma, design.n(), p));
            let res = ista_lasso(design, y, lambda_l1, cfg.ista_iters, cfg.ista_tol, StepRule::MaxColNormSq)?;
            Ok(EstimatorOutcome {
                beta_hat: res.beta_hat,
                iterations: res.iterations_used,
                detail: ReplayDetail { trace: None, selection: Vec::new() },
            })
        }
        EstimatorKind::OracleLs => {
            let fit = oracle_least_squares(design, y, &beta_true.support())?;
            Ok(EstimatorOutcome {
                beta_hat: fit,
                iterations: 1,
                detail: ReplayDetail { trace: None, selection: Vec::new() },
            })
        }
    }
}

/// Runs one (replication, a_over_astar) cell for one estimator and returns
/// the record plus, for replay, the full detail.
pub fn run_cell(
    cfg: &ScenarioConfig,
    replication: u64,
    a_over_astar: f64,
    estimator: EstimatorKind,
) -> Result<(ReplicationRecord, ReplayDetail)> {
    let seed = replication_seed(cfg.master_seed, &cfg.name, replication);
    let design = generate_design(
        cfg.design_kind,
        cfg.n,
        cfg.p,
        cfg.normalize,
        stream_seed(seed, "design"),
    )?;
    let astar = cfg.sigma
        * (2.0 * (std::f64::consts::E * cfg.p as f64 / cfg.s as f64).ln()).sqrt()
        / design.max_col_norm();
    let beta_true = sample_signal(
        cfg.p,
        cfg.s,
        a_over_astar * astar,
        cfg.magnitude_kind,
        stream_seed(seed, "signal"),
    )?;
    let instance = synthesize_instance(
        &design,
        &beta_true,
        cfg.sigma,
        cfg.noise_kind,
        stream_seed(seed, "noise"),
    )?;
    let event = noise_event(
        &effective_noise(&instance),
        cfg.s,
        cfg.sigma,
        design.max_col_norm(),
    )?;

    let started = std::time::Instant::now();
    let outcome = run_estimator(cfg, &design, &instance.y, &beta_true, estimator)?;
    let wall_time_ms = if cfg.timing {
        started.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };

    let truth_dense = beta_true.to_dense();
    let l2_error_sq: f64 = outcome
        .beta_hat
        .iter()
        .zip(truth_dense.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let normalized_error = if cfg.sigma > 0.0 {
        l2_error_sq * design.max_col_norm_sq() / (cfg.sigma * cfg.sigma)
    } else if l2_error_sq == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let hamming = hamming_distance(
        &support_pattern(&outcome.beta_hat),
        &support_pattern_of_sparse(&beta_true),
    )?;
    let record = ReplicationRecord {
        scenario: cfg.name.clone(),
        replication,
        estimator,
        n: cfg.n,
        p: cfg.p,
        s: cfg.s,
        sigma: cfg.sigma,
        a_over_astar,
        seed,
        l2_error_sq,
        normalized_error,
        hamming,
        exact_recovery: hamming == 0,
        nnz: outcome.beta_hat.iter().filter(|&&v| v != 0.0).count(),
        iterations: outcome.iterations,
        event_o: event.holds,
        wall_time_ms,
    };
    Ok((record, outcome.detail))
}

/// Runs the full sweep. Replications execute in parallel; the result is
/// sorted by `(scenario, replication, estimator, a_over_astar)` so the
/// emitted bytes are independent of scheduling.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<ReplicationRecord>> {
    cfg.validate()?;
    let reps: Vec<u64> = (0..cfg.replications).collect();
    let mut nested: Vec<Result<Vec<ReplicationRecord>>> = reps
        .par_iter()
        .map(|&rep| {
            let mut rows = Vec::with_capacity(cfg.a_over_astar.len() * cfg.estimators.len());
            for &a in &cfg.a_over_astar {
                for &estimator in &cfg.estimators {
                    let (record, _) = run_cell(cfg, rep, a, estimator)?;
                    rows.push(record);
                }
            }
            Ok(rows)
        })
        .collect();
    let mut records = Vec::with_capacity(reps.len() * cfg.a_over_astar.len() * cfg.estimators.len());
    for chunk in nested.drain(..) {
        records.extend(chunk?);
    }
    records.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then(a.replication.cmp(&b.replication))
            .then(a.estimator.as_str().cmp(b.estimator.as_str()))
            .then(a.a_over_astar.total_cmp(&b.a_over_astar))
    });
    Ok(records)
}

pub fn emit_records_csv<W: Write>(records: &[ReplicationRecord], mut w: W) -> Result<()> {
    writeln!(w, "{RECORDS_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.replication,
            r.estimator.as_str(),
            r.n,
            r.p,
            r.s,
            r.sigma,
            r.a_over_astar,
            r.seed,
            r.l2_error_sq,
            r.normalized_error,
            r.hamming,
            r.exact_recovery,
            r.nnz,
            r.iterations,
            r.event_o,
            r.wall_time_ms
        )?;
    }
    Ok(())
}

/// Reads back a records CSV produced by [`emit_records_csv`].
pub fn read_records_csv<R: std::io::Read>(r: R) -> Result<Vec<ReplicationRecord>> {
    let text = {
        let mut buf = String::new();
        let mut rd = r;
        rd.read_to_string(&mut buf)?;
        buf
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RECORDS_CSV_HEADER => {}
        other => return Err(Error::Parse(format!("bad records header: {other:?}"))),
    }
    let mut out = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 17 {
            return Err(Error::Parse(format!("row {ln}: expected 17 fields, got {}", f.len())));
        }
        let parse_f = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("row {ln}: bad float `{s}`")));
        let parse_u = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("row {ln}: bad int `{s}`")));
        let parse_b = |s: &str| s.parse::<bool>().map_err(|_| Error::Parse(format!("row {ln}: bad bool `{s}`")));
        out.push(ReplicationRecord {
            scenario: f[0].to_string(),
            replication: f[1].parse().map_err(|_| Error::Parse(format!("row {ln}: bad replication")))?,
            estimator: EstimatorKind::parse(f[2])?,
            n: parse_u(f[3])?,
            p: parse_u(f[4])?,
            s: parse_u(f[5])?,
            sigma: parse_f(f[6])?,
            a_over_astar: parse_f(f[7])?,
            seed: f[8].parse().map_err(|_| Error::Parse(format!("row {ln}: bad seed")))?,
            l2_error_sq: parse_f(f[9])?,
            normalized_error: parse_f(f[10])?,
            hamming: parse_u(f[11])?,
            exact_recovery: parse_b(f[12])?,
            nnz: parse_u(f[13])?,
            iterations: parse_u(f[14])?,
            event_o: parse_b(f[15])?,
            wall_time_ms: parse_f(f[16])?,
        });
    }
    Ok(out)
}

/// Quantile summary per `(scenario, estimator, a_over_astar)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub estimator: EstimatorKind,
    pub a_over_astar: f64,
    pub count: usize,
    pub s: usize,
    pub normalized_error_q10: f64,
    pub normalized_error_q50: f64,
    pub normalized_error_q90: f64,
    pub mean_hamming_per_s: f64,
    pub exact_recovery_freq: f64,
    pub mean_iterations: f64,
    pub event_o_freq: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SummaryReport {
    pub rows: Vec<SummaryRow>,
}

/// Linear-interpolation quantile of a sorted slice (same convention as the
/// usual "type 7" estimator).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

pub fn aggregate(records: &[ReplicationRecord]) -> SummaryReport {
    let mut groups: Vec<(String, EstimatorKind, f64)> = records
        .iter()
        .map(|r| (r.scenario.clone(), r.estimator, r.a_over_astar))
        .collect();
    groups.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.as_str().cmp(b.1.as_str()))
            .then(a.2.total_cmp(&b.2))
    });
    groups.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1 && a.2 == b.2);

    let mut rows = Vec::with_capacity(groups.len());
    for (scenario, estimator, a) in groups {
        let members: Vec<&ReplicationRecord> = records
            .iter()
            .filter(|r| r.scenario == scenario && r.estimator == estimator && r.a_over_astar == a)
            .collect();
        let mut errors: Vec<f64> = members.iter().map(|r| r.normalized_error).collect();
        errors.sort_by(|x, y| x.total_cmp(y));
        let count = members.len();
        let s = members[0].s;
        let fcount = count as f64;
        rows.push(SummaryRow {
            scenario,
            estimator,
            a_over_astar: a,
            count,
            s,
            normalized_error_q10: quantile_sorted(&errors, 0.1),
            normalized_error_q50: quantile_sorted(&errors, 0.5),
            normalized_error_q90: quantile_sorted(&errors, 0.9),
            mean_hamming_per_s: members.iter().map(|r| r.hamming as f64 / r.s as f64).sum::<f64>()
                / fcount,
            exact_recovery_freq: members.iter().filter(|r| r.exact_recovery).count() as f64 / fcount,
            mean_iterations: members.iter().map(|r| r.iterations as f64).sum::<f64>() / fcount,
            event_o_freq: members.iter().filter(|r| r.event_o).count() as f64 / fcount,
        });
    }
    SummaryReport { rows }
}

pub const SUMMARY_CSV_HEADER: &str = "scenario,estimator,a_over_astar,count,s,normalized_error_q10,normalized_error_q50,normalized_error_q90,mean_hamming_per_s,exact_recovery_freq,mean_iterations,event_O_freq";

pub fn emit_summary_csv<W: Write>(report: &SummaryReport, mut w: W) -> Result<()> {
    writeln!(w, "{SUMMARY_CSV_HEADER}")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.estimator.as_str(),
            r.a_over_astar,
            r.count,
            r.s,
            r.normalized_error_q10,
            r.normalized_error_q50,
            r.normalized_error_q90,
            r.mean_hamming_per_s,
            r.exact_recovery_freq,
            r.mean_iterations,
            r.event_o_freq
        )?;
    }
    Ok(())
}

pub const PLOT_CSV_HEADER: &str = "scenario,estimator,a_over_astar,y_median,y_lo,y_hi";

/// Rate-curve data: x is signal strength in `a*` units, y is the median
/// normalized error per coordinate with a q10-q90 band, one block per
/// scenario/estimator pair.
pub fn emit_plot_data<W: Write>(report: &SummaryReport, mut w: W) -> Result<()> {
    writeln!(w, "{PLOT_CSV_HEADER}")?;
    for r in &report.rows {
        let s = r.s as f64;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.scenario,
            r.estimator.as_str(),
            r.a_over_astar,
            r.normalized_error_q50 / s,
            r.normalized_error_q10 / s,
            r.normalized_error_q90 / s
        )?;
    }
    Ok(())
}
