//! The gradient map, one hard-thresholded step, and the non-adaptive
//! pipeline for known `(s, sigma)`: data-driven initial threshold, geometric
//! schedule down to the universal floor, and the closed-form stopping time.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::model::{scaled_correlation, DesignMatrix, SparseVector};
use crate::thresholding::{
    hard_threshold, initial_threshold, schedule_value, ThresholdSchedule,
};
use crate::trace::{make_record, IterateTrace, StopReason};

/// `H = beta_prev + X^T (y - X beta_prev) / max_j ||X_j||^2`, computed as two
/// matrix-vector products; the p x p Gram matrix is never formed.
pub fn gradient_map(design: &DesignMatrix, y: &Array1<f64>, beta_prev: &Array1<f64>) -> Array1<f64> {
    let residual = y - &design.values().dot(beta_prev);
    let mut h = design.values().t().dot(&residual);
    let denom = design.max_col_norm_sq();
    h.zip_mut_with(beta_prev, |hi, &bi| *hi = bi + *hi / denom);
    h
}

/// One iteration: gradient map followed by hard thresholding at `lambda`.
pub fn iht_step(
    design: &DesignMatrix,
    y: &Array1<f64>,
    beta_prev: &Array1<f64>,
    lambda: f64,
) -> Array1<f64> {
    hard_threshold(&gradient_map(design, y, beta_prev), lambda)
}

/// Closed-form stopping time
/// `floor(2 log(lambda0^2 maxnorm^2 / (40 sigma^2 log(ep/s))) / log(1/kappa)) + 1`,
/// clamped to at least 1.
pub fn stopping_time(
    lambda0: f64,
    sigma: f64,
    max_col_norm: f64,
    p: usize,
    s: usize,
    kappa: f64,
) -> Result<usize> {
    if sigma <= 0.0 {
        return Err(Error::InvalidArgument("stopping time requires sigma > 0".into()));
    }
    if s == 0 || s > p {
        return Err(Error::SparsityOutOfRange { s, p });
    }
    if !(0.0 < kappa && kappa < 1.0) {
        return Err(Error::InvalidArgument(format!("kappa must be in (0,1), got {kappa}")));
    }
    let log_term = (std::f64::consts::E * p as f64 / s as f64).ln();
    let arg = lambda0 * lambda0 * max_col_norm * max_col_norm / (40.0 * sigma * sigma * log_term);
    let raw = (2.0 * arg.ln() / (1.0 / kappa).ln()).floor() as i64 + 1;
    Ok(raw.max(1) as usize)
}

#[derive(Debug, Clone, Copy)]
pub struct NonAdaptiveConfig {
    pub s: usize,
    pub sigma: f64,
    pub kappa: f64,
    pub max_iter: usize,
    /// Overrides the data-driven initial threshold when set.
    pub lambda0_override: Option<f64>,
}

impl NonAdaptiveConfig {
    pub fn new(s: usize, sigma: f64, kappa: f64) -> Self {
        Self { s, sigma, kappa, max_iter: 10_000, lambda0_override: None }
    }
}

/// Runs the known-`(s, sigma)` pipeline for exactly the closed-form number
/// of steps (or until `max_iter`, flagging the trace). `beta_true` is used
/// for trace metrics only; the estimator path never reads it.
pub fn run_nonadaptive(
    design: &DesignMatrix,
    y: &Array1<f64>,
    cfg: &NonAdaptiveConfig,
    beta_true: Option<&SparseVector>,
) -> Result<IterateTrace> {
    let p = design.p();
    if y.len() != design.n() {
        return Err(Error::Dimension(format!(
            "y has length {}, design has n = {}",
            y.len(),
            design.n()
        )));
    }
    let m_vec = scaled_correlation(design, y);
    let lambda0 = match cfg.lambda0_override {
        Some(v) => v,
        None => initial_threshold(&m_vec, cfg.s, cfg.sigma, design.max_col_norm(), p)?,
    };
    let lambda_inf =
        crate::thresholding::universal_threshold(cfg.s, cfg.sigma, design.max_col_norm(), p)?;
    let schedule = ThresholdSchedule::fixed(lambda0, lambda_inf, cfg.kappa)?;
    let m_hat = if cfg.sigma > 0.0 {
        stopping_time(lambda0, cfg.sigma, design.max_col_norm(), p, cfg.s, cfg.kappa)?
    } else {
        // Noiseless limit: the floor is 0 and the closed form diverges; run
        // until the geometric threshold falls below representable signal
        // scale or max_iter.
        cfg.max_iter
    };

    let precondition_unverified = match (cfg.lambda0_override, beta_true) {
        (Some(l0), Some(truth)) => truth.norm_sq() > (cfg.s as f64) * l0 * l0,
        _ => false,
    };

    let mut beta = Array1::zeros(p);
    let mut records = Vec::with_capacity(m_hat.min(cfg.max_iter) + 1);
    records.push(make_record(
        0,
        schedule_value(&schedule, 0, None)?,
        &beta,
        design,
        y,
        None,
        beta_true,
    ));
    let steps = m_hat.min(cfg.max_iter);
    for m in 1..=steps {
        let lambda_m = schedule_value(&schedule, m, None)?;
        beta = iht_step(design, y, &beta, lambda_m);
        records.push(make_record(m, lambda_m, &beta, design, y, None, beta_true));
        if cfg.sigma == 0.0 && lambda_m < f64::MIN_POSITIVE {
            break;
        }
    }
    let stop_reason = if m_hat > cfg.max_iter { StopReason::MaxIter } else { StopReason::FloorHit };
    let stop_index = records.len() - 1;
    Ok(IterateTrace { records, stop_index, stop_reason, precondition_unverified })
}
