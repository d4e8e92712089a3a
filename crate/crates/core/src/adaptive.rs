//! Fully adaptive procedures: residual-based noise estimation, early
//! stopping against an adaptive floor, and penalized iteration selection.
//! Neither `s` nor `sigma` is consumed anywhere in this module's estimator
//! paths.
//!
//! Ordering convention for the adaptive floor: the noise estimate entering a
//! threshold or a stopping check is always the one computed from the most
//! recent completed iterate. The floor used to build iterate `m` therefore
//! comes from iterate `m-1`, and the stopping predicate at index `m` is
//! evaluated right after iterate `m` completes.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::iht::iht_step;
use crate::model::{scaled_correlation, DesignMatrix, SparseVector};
use crate::thresholding::{adaptive_floor_factor, adaptive_initial_threshold};
use crate::trace::{make_record, IterateTrace, StopReason};

/// Root mean squared residual `||y - X beta|| / sqrt(n)`.
pub fn residual_sigma(design: &DesignMatrix, y: &Array1<f64>, beta: &Array1<f64>) -> f64 {
    let fitted = design.values().dot(beta);
    let ss: f64 = y
        .iter()
        .zip(fitted.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    (ss / design.n() as f64).sqrt()
}

#[derive(Debug, Clone)]
pub struct EarlyStoppingRun {
    pub trace: IterateTrace,
    /// The stopping index (first floor hit, plus one).
    pub m_bar: usize,
    /// Noise estimate at the returned iterate.
    pub sigma_hat: f64,
    pub lambda_bar0: f64,
}

/// Adaptive early stopping: geometric schedule from the adaptive initial
/// threshold, floored per step by the current noise estimate; stops one
/// iteration after the geometric term first falls to the floor.
pub fn run_early_stopping(
    design: &DesignMatrix,
    y: &Array1<f64>,
    kappa: f64,
    max_iter: usize,
    beta_true: Option<&SparseVector>,
) -> Result<EarlyStoppingRun> {
    if !(0.0 < kappa && kappa < 1.0) {
        return Err(Error::InvalidArgument(format!("kappa must be in (0,1), got {kappa}")));
    }
    if y.len() != design.n() {
        return Err(Error::Dimension(format!(
            "y has length {}, design has n = {}",
            y.len(),
            design.n()
        )));
    }
    let p = design.p();
    let n = design.n();
    let maxnorm = design.max_col_norm();
    let floor_factor = adaptive_floor_factor(p);

    let m_vec = scaled_correlation(design, y);
    let mut beta = Array1::zeros(p);
    let mut sigma_hat = (y.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    let lambda_bar0 = adaptive_initial_threshold(&m_vec, sigma_hat, maxnorm, p)?;

    let mut records = Vec::new();
    records.push(make_record(0, lambda_bar0, &beta, design, y, Some(sigma_hat), beta_true));

    let mut m = 0usize;
    loop {
        let floor = sigma_hat * floor_factor / maxnorm;
        let geometric = kappa.powf(m as f64 / 2.0) * lambda_bar0;
        if geometric <= floor {
            // one more iteration, then stop
            m += 1;
            let lambda_m = (kappa.powf(m as f64 / 2.0) * lambda_bar0).max(floor);
            beta = iht_step(design, y, &beta, lambda_m);
            sigma_hat = residual_sigma(design, y, &beta);
            records.push(make_record(m, lambda_m, &beta, design, y, Some(sigma_hat), beta_true));
            let stop_index = records.len() - 1;
            return Ok(EarlyStoppingRun {
                trace: IterateTrace {
                    records,
                    stop_index,
                    stop_reason: StopReason::FloorHit,
                    precondition_unverified: false,
                },
                m_bar: m,
                sigma_hat,
                lambda_bar0,
            });
        }
        if m + 1 > max_iter {
            let stop_index = records.len() - 1;
            return Ok(EarlyStoppingRun {
                trace: IterateTrace {
                    records,
                    stop_index,
                    stop_reason: StopReason::MaxIter,
                    precondition_unverified: false,
                },
                m_bar: m,
                sigma_hat,
                lambda_bar0,
            });
        }
        m += 1;
        let lambda_m = (kappa.powf(m as f64 / 2.0) * lambda_bar0).max(floor);
        beta = iht_step(design, y, &beta, lambda_m);
        sigma_hat = residual_sigma(design, y, &beta);
        records.push(make_record(m, lambda_m, &beta, design, y, Some(sigma_hat), beta_true));
    }
}

/// Residual plus sparsity penalty:
/// `residual_norm_sq / n + penalty_const * sigma_ref^2 * k log(ep/k) / n`,
/// with the `k = 0` penalty defined as 0 by continuity.
pub fn selection_criterion(
    residual_norm_sq: f64,
    n: usize,
    nnz: usize,
    sigma_ref: f64,
    penalty_const: f64,
    p: usize,
) -> f64 {
    let penalty = if nnz == 0 {
        0.0
    } else {
        penalty_const
            * sigma_ref
            * sigma_ref
            * nnz as f64
            * (std::f64::consts::E * p as f64 / nnz as f64).ln()
            / n as f64
    };
    residual_norm_sq / n as f64 + penalty
}

#[derive(Debug, Clone)]
pub struct SelectionRecord {
    pub m: usize,
    pub criterion_value: f64,
    pub nnz: usize,
    pub residual_norm_sq: f64,
}

#[derive(Debug, Clone)]
pub struct SelectionRun {
    /// The warm-started geometric chain, one record per candidate iterate;
    /// `stop_index` is the selected iteration.
    pub trace: IterateTrace,
    pub selected_m: usize,
    /// Horizon: first `m >= 0` with the geometric threshold at or below
    /// `4 sigma_ref / maxnorm`, capped by `max_iter`.
    pub t_hat: usize,
    /// Noise estimate taken from the early-stopping stage.
    pub sigma_ref: f64,
    pub records: Vec<SelectionRecord>,
}

impl SelectionRun {
    pub fn selected_beta(&self) -> Array1<f64> {
        self.trace.records[self.selected_m].beta.to_dense()
    }
}

/// Penalized iteration selection: an early-stopping pass supplies the noise
/// reference, then a pure-geometric chain of iterates (no floor, each warm
/// started from the previous) is scored by [`selection_criterion`] and the
/// argmin is returned; ties go to the smallest index. The zero initial point
/// is candidate `m = 0`.
pub fn run_iteration_selection(
    design: &DesignMatrix,
    y: &Array1<f64>,
    kappa: f64,
    penalty_const: f64,
    max_iter: usize,
    beta_true: Option<&SparseVector>,
) -> Result<SelectionRun> {
    if penalty_const <= 0.0 {
        return Err(Error::InvalidArgument("penalty_const must be > 0".into()));
    }
    let early = run_early_stopping(design, y, kappa, max_iter, beta_true)?;
    let sigma_ref = early.sigma_hat;

    let p = design.p();
    let n = design.n();
    let maxnorm = design.max_col_norm();
    let m_vec = scaled_correlation(design, y);
    let sigma_hat0 = (y.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    let lambda_bar0 = adaptive_initial_threshold(&m_vec, sigma_hat0, maxnorm, p)?;

    let cutoff = 4.0 * sigma_ref / maxnorm;
    let mut t_hat = 0usize;
    let mut truncated = false;
    while kappa.powf(t_hat as f64 / 2.0) * lambda_bar0 > cutoff {
        if t_hat >= max_iter {
            truncated = true;
            break;
        }
        t_hat += 1;
    }

    let mut beta = Array1::zeros(p);
    let mut records = Vec::with_capacity(t_hat + 1);
    let mut trace_records = Vec::with_capacity(t_hat + 1);
    trace_records.push(make_record(0, lambda_bar0, &beta, design, y, None, beta_true));
    let r0 = &trace_records[0];
    records.push(SelectionRecord {
        m: 0,
        criterion_value: selection_criterion(r0.residual_norm_sq, n, 0, sigma_ref, penalty_const, p),
        nnz: 0,
        residual_norm_sq: r0.residual_norm_sq,
    });
    let (mut best_m, mut best_value) = (0usize, records[0].criterion_value);
    for m in 1..=t_hat {
        let lambda_m = kappa.powf(m as f64 / 2.0) * lambda_bar0;
        beta = iht_step(design, y, &beta, lambda_m);
        let rec = make_record(m, lambda_m, &beta, design, y, None, beta_true);
        let nnz = rec.beta.nnz();
        let value = selection_criterion(rec.residual_norm_sq, n, nnz, sigma_ref, penalty_const, p);
        records.push(SelectionRecord {
            m,
            criterion_value: value,
            nnz,
            residual_norm_sq: rec.residual_norm_sq,
        });
        trace_records.push(rec);
        if value < best_value {
            best_value = value;
            best_m = m;
        }
    }

    let trace = IterateTrace {
        records: trace_records,
        stop_index: best_m,
        stop_reason: if truncated { StopReason::MaxIter } else { StopReason::Selection },
        precondition_unverified: false,
    };
    Ok(SelectionRun { trace, selected_m: best_m, t_hat, sigma_ref, records })
}

/// Appends selection records to a trace CSV: columns `(m, criterion_value, nnz)`.
pub fn write_selection_csv<W: std::io::Write>(
    records: &[SelectionRecord],
    mut w: W,
) -> Result<()> {
    writeln!(w, "m,criterion_value,nnz")?;
    for r in records {
        writeln!(w, "{},{},{}", r.m, r.criterion_value, r.nnz)?;
    }
    Ok(())
}
