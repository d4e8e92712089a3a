//! Per-run iterate traces.
//!
//! Every estimator run produces an [`IterateTrace`]: one record per
//! iteration, starting from the initial point (the zero vector for the
//! from-scratch pipelines, the warm start for the fixed-threshold stage).
//! Iterates are held as sparse (index, value) lists; on the good events the
//! guarantees keep them at most 2s-sparse, so traces stay small.

use ndarray::Array1;
use std::io::Write;

use crate::error::Result;
use crate::model::{DesignMatrix, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The geometric part of the schedule reached the floor (scheduled stop).
    FloorHit,
    /// The iteration cap fired before the scheduled stop; trace is truncated.
    MaxIter,
    /// The run ended by penalized iteration selection.
    Selection,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::FloorHit => "floor_hit",
            StopReason::MaxIter => "max_iter",
            StopReason::Selection => "selection",
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterateRecord {
    pub m: usize,
    pub lambda: f64,
    pub beta: SparseVector,
    /// Residual-based noise estimate, recorded by the adaptive runs.
    pub sigma_hat: Option<f64>,
    /// `||beta_hat - beta_true||^2`; only in simulation mode.
    pub l2_error_sq: Option<f64>,
    /// Nonzeros of the iterate outside the true support; simulation mode.
    pub off_support_count: Option<usize>,
    pub residual_norm_sq: f64,
}

#[derive(Debug, Clone)]
pub struct IterateTrace {
    pub records: Vec<IterateRecord>,
    /// Index into `records` of the returned iterate.
    pub stop_index: usize,
    pub stop_reason: StopReason,
    /// Set when a caller-supplied initial threshold failed the
    /// `||beta|| <= sqrt(s) lambda0` check (checkable in simulation mode only).
    pub precondition_unverified: bool,
}

impl IterateTrace {
    pub fn final_record(&self) -> &IterateRecord {
        &self.records[self.stop_index]
    }

    pub fn final_beta(&self) -> Array1<f64> {
        self.final_record().beta.to_dense()
    }

    /// CSV columns:
    /// `replication,m,lambda_m,l2_error_sq,off_support_count,nnz,sigma_hat,residual_norm_sq`.
    /// Optional fields print empty.
    pub fn write_csv<W: Write>(&self, mut w: W, replication: u64) -> Result<()> {
        writeln!(
            w,
            "replication,m,lambda_m,l2_error_sq,off_support_count,nnz,sigma_hat,residual_norm_sq"
        )?;
        for r in &self.records {
            let opt_f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let opt_u = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                replication,
                r.m,
                r.lambda,
                opt_f(r.l2_error_sq),
                opt_u(r.off_support_count),
                r.beta.nnz(),
                opt_f(r.sigma_hat),
                r.residual_norm_sq
            )?;
        }
        Ok(())
    }
}

/// Assembles one trace record, computing the residual and (in simulation
/// mode) the error metrics against the true signal.
pub fn make_record(
    m: usize,
    lambda: f64,
    beta: &Array1<f64>,
    design: &DesignMatrix,
    y: &Array1<f64>,
    sigma_hat: Option<f64>,
    beta_true: Option<&SparseVector>,
) -> IterateRecord {
    let fitted = design.values().dot(beta);
    let residual_norm_sq = y
        .iter()
        .zip(fitted.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let (l2_error_sq, off_support_count) = match beta_true {
        Some(truth) => {
            let dense = truth.to_dense();
            let err = beta
                .iter()
                .zip(dense.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let support: std::collections::HashSet<usize> = truth.support().into_iter().collect();
            let off = beta
                .iter()
                .enumerate()
                .filter(|(j, &v)| v != 0.0 && !support.contains(j))
                .count();
            (Some(err), Some(off))
        }
        None => (None, None),
    };
    IterateRecord {
        m,
        lambda,
        beta: SparseVector::from_dense(beta),
        sigma_hat,
        l2_error_sq,
        off_support_count,
        residual_norm_sq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_design, DesignKind};

    #[test]
    fn record_metrics_against_truth() {
        let d = generate_design(DesignKind::IdentityScaled, 4, 4, false, 0).unwrap();
        let y = Array1::from(vec![2.0, 0.0, 0.0, 0.0]);
        let truth = SparseVector::new(4, vec![(0, 1.0)], 0.0).unwrap();
        let beta = Array1::from(vec![0.0, 0.5, 0.0, 0.0]);
        let rec = make_record(1, 0.3, &beta, &d, &y, None, Some(&truth));
        assert_eq!(rec.l2_error_sq, Some(1.0 + 0.25));
        assert_eq!(rec.off_support_count, Some(1));
        assert_eq!(rec.beta.nnz(), 1);
        // residual = y - 2*I*beta = (2, -1, 0, 0)
        assert_eq!(rec.residual_norm_sq, 5.0);
    }

    #[test]
    fn csv_has_header_and_empty_optionals() {
        let d = generate_design(DesignKind::IdentityScaled, 2, 2, false, 0).unwrap();
        let y = Array1::zeros(2);
        let beta = Array1::zeros(2);
        let rec = make_record(0, 1.0, &beta, &d, &y, None, None);
        let trace = IterateTrace {
            records: vec![rec],
            stop_index: 0,
            stop_reason: StopReason::FloorHit,
            precondition_unverified: false,
        };
        let mut buf = Vec::new();
        trace.write_csv(&mut buf, 3).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "replication,m,lambda_m,l2_error_sq,off_support_count,nnz,sigma_hat,residual_norm_sq"
        );
        assert_eq!(lines.next().unwrap(), "3,0,1,,,0,,0");
    }
}
