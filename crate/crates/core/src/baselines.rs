//! Comparison estimators: classical top-s hard thresholding and a
//! proximal-gradient l1 solver (ISTA) on the objective
//! `||y - X b||^2 / 2 + lambda_l1 ||b||_1`.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::iht::gradient_map;
use crate::model::DesignMatrix;
use crate::thresholding::{soft_threshold, top_s_threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineName {
    IhtTopS,
    IstaLasso,
    OracleLs,
}

impl BaselineName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineName::IhtTopS => "iht_top_s",
            BaselineName::IstaLasso => "ista_lasso",
            BaselineName::OracleLs => "oracle_ls",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BaselineResult {
    pub name: BaselineName,
    pub beta_hat: Array1<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

/// Classical IHT: keep the top-s magnitudes of the gradient map, starting
/// from zero. Convergence means the iterate stopped changing.
pub fn iht_top_s(
    design: &DesignMatrix,
    y: &Array1<f64>,
    s: usize,
    iters: usize,
) -> Result<BaselineResult> {
    let p = design.p();
    if s == 0 || s > p {
        return Err(Error::SparsityOutOfRange { s, p });
    }
    let mut beta = Array1::zeros(p);
    let mut used = 0;
    let mut converged = false;
    for _ in 0..iters {
        let next = top_s_threshold(&gradient_map(design, y, &beta), s)?;
        used += 1;
        if next == beta {
            converged = true;
            beta = next;
            break;
        }
        beta = next;
    }
    Ok(BaselineResult { name: BaselineName::IhtTopS, beta_hat: beta, iterations_used: used, converged })
}

/// Step-size rule for ISTA. The max-column-norm step matches the hard
/// thresholding pipelines; the power-iteration estimate of the full spectral
/// norm is the safe choice when the restricted isometry constant is large.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    MaxColNormSq,
    SpectralEstimate,
}

/// Power iteration on `X^T X` from a fixed deterministic start; returns an
/// estimate of `||X||_op^2`.
pub fn spectral_norm_sq_estimate(design: &DesignMatrix, iters: usize) -> f64 {
    let p = design.p();
    let mut v = Array1::from_iter((0..p).map(|i| ((i + 1) as f64 * 0.7548776662466927).fract() - 0.5));
    let norm = v.dot(&v).sqrt();
    v.mapv_inplace(|x| x / norm);
    let mut lambda = 0.0;
    for _ in 0..iters {
        let xv = design.values().dot(&v);
        let mut w = design.values().t().dot(&xv);
        lambda = w.dot(&v);
        let wn = w.dot(&w).sqrt();
        if wn == 0.0 {
            return 0.0;
        }
        w.mapv_inplace(|x| x / wn);
        v = w;
    }
    lambda
}

/// ISTA with step `1/L`: `b <- soft_threshold(b + X^T(y - Xb)/L, lambda_l1/L)`.
/// Stops when the iterate change (Euclidean) drops below `tol`.
pub fn ista_lasso(
    design: &DesignMatrix,
    y: &Array1<f64>,
    lambda_l1: f64,
    iters: usize,
    tol: f64,
    step_rule: StepRule,
) -> Result<BaselineResult> {
    if lambda_l1 < 0.0 {
        return Err(Error::InvalidArgument("lambda_l1 must be >= 0".into()));
    }
    let lipschitz = match step_rule {
        StepRule::MaxColNormSq => design.max_col_norm_sq(),
        StepRule::SpectralEstimate => spectral_norm_sq_estimate(design, 100).max(design.max_col_norm_sq()),
    };
    let p = design.p();
    let mut beta: Array1<f64> = Array1::zeros(p);
    let mut used = 0;
    let mut converged = false;
    for _ in 0..iters {
        let residual = y - &design.values().dot(&beta);
        let mut grad_step = design.values().t().dot(&residual);
        grad_step.zip_mut_with(&beta, |g, &b| *g = b + *g / lipschitz);
        let next = soft_threshold(&grad_step, lambda_l1 / lipschitz);
        used += 1;
        let change = (&next - &beta).dot(&(&next - &beta)).sqrt();
        beta = next;
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(BaselineResult { name: BaselineName::IstaLasso, beta_hat: beta, iterations_used: used, converged })
}

/// The standard universal l1 level on the unnormalized objective scale.
pub fn default_lambda_l1(sigma: f64, n: usize, p: usize) -> f64 {
    2.0 * sigma * (2.0 * n as f64 * (p as f64).ln()).sqrt()
}

/// The l1-penalized objective, used by the monotonicity checks.
pub fn lasso_objective(design: &DesignMatrix, y: &Array1<f64>, beta: &Array1<f64>, lambda_l1: f64) -> f64 {
    let fitted = design.values().dot(beta);
    let rss: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    rss / 2.0 + lambda_l1 * beta.iter().map(|v| v.abs()).sum::<f64>()
}
