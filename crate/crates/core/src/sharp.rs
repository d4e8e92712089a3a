//! Fixed-threshold refinement stage: scaled-minimax estimation from a warm
//! start, support decoding, and the oracle least-squares reference.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::iht::iht_step;
use crate::model::{DesignMatrix, SparseVector};
use crate::trace::{make_record, IterateTrace, StopReason};

/// Sharp estimation threshold `(1 + sqrt(eps)) sigma sqrt(2 log(ep/s)) / maxnorm`.
pub fn estimation_threshold(
    epsilon: f64,
    sigma: f64,
    max_col_norm: f64,
    p: usize,
    s: usize,
) -> Result<f64> {
    if !(0.0 < epsilon && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be in (0,1), got {epsilon}")));
    }
    if s == 0 || s > p {
        return Err(Error::SparsityOutOfRange { s, p });
    }
    Ok((1.0 + epsilon.sqrt())
        * sigma
        * (2.0 * (std::f64::consts::E * p as f64 / s as f64).ln()).sqrt()
        / max_col_norm)
}

/// Support recovery threshold `(1 + sqrt(eps)) sigma sqrt(2 log p) / maxnorm`.
/// Requires `p >= 2`; at `p = 1` the log term vanishes and the threshold is
/// vacuous.
pub fn recovery_threshold(epsilon: f64, sigma: f64, max_col_norm: f64, p: usize) -> Result<f64> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
    }
    if p < 2 {
        return Err(Error::InvalidArgument(format!("recovery threshold needs p >= 2, got {p}")));
    }
    Ok((1.0 + epsilon.sqrt()) * sigma * (2.0 * (p as f64).ln()).sqrt() / max_col_norm)
}

/// Slack substitution for isotropic sub-Gaussian compressed sensing, where
/// the restricted deviation itself scales like `s log(ep/s) / n`.
pub fn compressed_sensing_epsilon(n: usize, p: usize, s: usize) -> f64 {
    s as f64 * (std::f64::consts::E * p as f64 / s as f64).ln() / n as f64
}

/// Default step count for estimation mode: `ceil(log log(ep/s))`, at least 1.
pub fn estimation_steps(p: usize, s: usize) -> usize {
    let ll = (std::f64::consts::E * p as f64 / s as f64).ln().ln();
    (ll.ceil() as i64).max(1) as usize
}

/// Default step count for recovery mode: `ceil(log s)`, at least 1.
pub fn recovery_steps(s: usize) -> usize {
    ((s as f64).ln().ceil() as i64).max(1) as usize
}

/// Runs `m_steps` hard-thresholded gradient steps at constant `lambda` from
/// the warm start; `m_steps = 0` returns the warm start unchanged.
pub fn run_fixed_threshold(
    design: &DesignMatrix,
    y: &Array1<f64>,
    beta_init: &Array1<f64>,
    lambda: f64,
    m_steps: usize,
    beta_true: Option<&SparseVector>,
) -> Result<IterateTrace> {
    if beta_init.len() != design.p() {
        return Err(Error::Dimension(format!(
            "warm start has length {}, design has p = {}",
            beta_init.len(),
            design.p()
        )));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidArgument("lambda must be >= 0".into()));
    }
    let mut beta = beta_init.clone();
    let mut records = Vec::with_capacity(m_steps + 1);
    records.push(make_record(0, lambda, &beta, design, y, None, beta_true));
    for m in 1..=m_steps {
        beta = iht_step(design, y, &beta, lambda);
        records.push(make_record(m, lambda, &beta, design, y, None, beta_true));
    }
    Ok(IterateTrace {
        stop_index: records.len() - 1,
        records,
        stop_reason: StopReason::FloorHit,
        precondition_unverified: false,
    })
}

/// Least squares restricted to a given support: solves the s x s normal
/// equations by Cholesky and returns a dense vector that is zero elsewhere.
/// A non-positive-definite Gram block is reported as
/// [`Error::SingularGramBlock`].
pub fn oracle_least_squares(
    design: &DesignMatrix,
    y: &Array1<f64>,
    support: &[usize],
) -> Result<Array1<f64>> {
    let p = design.p();
    let n = design.n();
    let s = support.len();
    if s > n {
        return Err(Error::Dimension(format!("support size {s} exceeds n = {n}")));
    }
    for &j in support {
        if j >= p {
            return Err(Error::Dimension(format!("support index {j} out of range for p = {p}")));
        }
    }
    let mut out = Array1::zeros(p);
    if s == 0 {
        return Ok(out);
    }
    // Gram block and right-hand side on the support.
    let x = design.values();
    let mut gram = vec![0.0f64; s * s];
    let mut rhs = vec![0.0f64; s];
    for (a, &ja) in support.iter().enumerate() {
        for (b, &jb) in support.iter().enumerate().skip(a) {
            let dot = x.column(ja).dot(&x.column(jb));
            gram[a * s + b] = dot;
            gram[b * s + a] = dot;
        }
        rhs[a] = x.column(ja).dot(y);
    }
    let coef = cholesky_solve(&gram, &rhs, s)
        .ok_or_else(|| Error::SingularGramBlock(support.to_vec()))?;
    for (a, &j) in support.iter().enumerate() {
        out[j] = coef[a];
    }
    Ok(out)
}

/// Dense SPD solve via Cholesky; returns `None` if a pivot is not strictly
/// positive (singular or indefinite block).
fn cholesky_solve(a: &[f64], b: &[f64], s: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0f64; s * s];
    for i in 0..s {
        for j in 0..=i {
            let mut sum = a[i * s + j];
            for k in 0..j {
                sum -= l[i * s + k] * l[j * s + k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i * s + j] = sum.sqrt();
            } else {
                l[i * s + j] = sum / l[j * s + j];
            }
        }
    }
    // forward then backward substitution
    let mut yv = vec![0.0f64; s];
    for i in 0..s {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * s + k] * yv[k];
        }
        yv[i] = sum / l[i * s + i];
    }
    let mut xv = vec![0.0f64; s];
    for i in (0..s).rev() {
        let mut sum = yv[i];
        for k in i + 1..s {
            sum -= l[k * s + i] * xv[k];
        }
        xv[i] = sum / l[i * s + i];
    }
    Some(xv)
}

/// Binary support indicator of a vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPattern {
    indicator: Vec<bool>,
}

impl SupportPattern {
    pub fn dim(&self) -> usize {
        self.indicator.len()
    }

    pub fn popcount(&self) -> usize {
        self.indicator.iter().filter(|&&b| b).count()
    }

    pub fn indicator(&self) -> &[bool] {
        &self.indicator
    }
}

/// `eta_i = 1(v_i != 0)`.
pub fn support_pattern(v: &Array1<f64>) -> SupportPattern {
    SupportPattern { indicator: v.iter().map(|&x| x != 0.0).collect() }
}

pub fn support_pattern_of_sparse(v: &SparseVector) -> SupportPattern {
    let mut indicator = vec![false; v.dim()];
    for &(i, _) in v.entries() {
        indicator[i] = true;
    }
    SupportPattern { indicator }
}

/// Number of positions where the two patterns differ.
pub fn hamming_distance(a: &SupportPattern, b: &SupportPattern) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "pattern dims differ: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.indicator
        .iter()
        .zip(b.indicator.iter())
        .filter(|(x, y)| x != y)
        .count())
}
