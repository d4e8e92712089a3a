//! Restricted eigenvalue audits.
//!
//! `L_s` / `m_s` are the extreme eigenvalues of s-column Gram blocks over
//! all (exact mode) or sampled (lower-bound mode) supports, and
//! `delta_s = 1 - m_s / L_s`. The contraction check audits the deviation
//! blocks `(X^T X)_SS / maxnorm^2 - I` directly. Blocks are tiny (s up to
//! ~12 in exact mode), so a dense Jacobi sweep is the eigensolver.

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::DesignMatrix;
use crate::rng::rng_from_seed;

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditMethod {
    Exact,
    Sampled,
}

impl AuditMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            AuditMethod::Exact => "exact",
            AuditMethod::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RipReport {
    pub s: usize,
    pub l_s: f64,
    pub m_s: f64,
    /// `1 - m_s / L_s`; a lower bound on the true value in sampled mode.
    pub delta_s: f64,
    pub method: AuditMethod,
    pub supports_examined: u64,
    /// The support attaining the minimum eigenvalue `m_s`.
    pub worst_support: Vec<usize>,
}

impl RipReport {
    /// Condition number `L_s / m_s = 1 / (1 - delta_s)`.
    pub fn gamma(&self) -> f64 {
        self.l_s / self.m_s
    }

    /// Single-line CSV: `s,L_s,m_s,delta_s,gamma_s,method,supports_examined`.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.s,
            self.l_s,
            self.m_s,
            self.delta_s,
            self.gamma(),
            self.method.as_str(),
            self.supports_examined
        )
    }

    pub const CSV_HEADER: &'static str = "s,L_s,m_s,delta_s,gamma_s,method,supports_examined";
}

/// Binomial coefficient with saturation, used for budget checks.
pub fn binomial(p: u64, s: u64) -> u128 {
    if s > p {
        return 0;
    }
    let s = s.min(p - s);
    let mut acc: u128 = 1;
    for i in 0..s {
        acc = acc.saturating_mul((p - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Lexicographic iterator over size-k subsets of `0..p`.
pub struct Combinations {
    p: usize,
    k: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(p: usize, k: usize) -> Self {
        Self { p, k, current: (0..k).collect(), done: k > p }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        // advance to the lexicographic successor
        let k = self.k;
        if k == 0 {
            self.done = true;
            return Some(out);
        }
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] != i + self.p - k {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations; suitable
/// for the small blocks audited here.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut m: Vec<f64> = a.iter().cloned().collect();
    let idx = |i: usize, j: usize| i * n + j;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += m[idx(i, j)] * m[idx(i, j)];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + m.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
        for i in 0..n {
            for j in i + 1..n {
                let apq = m[idx(i, j)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[idx(i, i)];
                let aqq = m[idx(j, j)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let aik = m[idx(i, k)];
                    let ajk = m[idx(j, k)];
                    m[idx(i, k)] = c * aik - s * ajk;
                    m[idx(j, k)] = s * aik + c * ajk;
                }
                for k in 0..n {
                    let aki = m[idx(k, i)];
                    let akj = m[idx(k, j)];
                    m[idx(k, i)] = c * aki - s * akj;
                    m[idx(k, j)] = s * aki + c * akj;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[idx(i, i)]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// The p x p Gram matrix, computed once per audit so each enumerated block
/// is a cheap submatrix extraction.
fn full_gram(design: &DesignMatrix) -> Array2<f64> {
    design.values().t().dot(design.values())
}

fn gram_block(gram: &Array2<f64>, support: &[usize]) -> Array2<f64> {
    let s = support.len();
    let mut block = Array2::zeros((s, s));
    for (a, &ja) in support.iter().enumerate() {
        for (b, &jb) in support.iter().enumerate() {
            block[[a, b]] = gram[[ja, jb]];
        }
    }
    block
}

fn extremes_over<I: Iterator<Item = Vec<usize>>>(
    design: &DesignMatrix,
    supports: I,
    s: usize,
    method: AuditMethod,
) -> RipReport {
    let gram = full_gram(design);
    let mut l_s = f64::NEG_INFINITY;
    let mut m_s = f64::INFINITY;
    let mut worst_support = Vec::new();
    let mut examined = 0u64;
    for support in supports {
        let eig = symmetric_eigenvalues(&gram_block(&gram, &support));
        let lo = eig[0];
        let hi = eig[eig.len() - 1];
        if hi > l_s {
            l_s = hi;
        }
        if lo < m_s {
            m_s = lo;
            worst_support = support;
        }
        examined += 1;
    }
    RipReport {
        s,
        l_s,
        m_s,
        delta_s: 1.0 - m_s / l_s,
        method,
        supports_examined: examined,
        worst_support,
    }
}

/// Exact audit by full enumeration of size-s supports. Refuses (with an
/// instruction to use sampling) when `C(p, s)` exceeds the budget.
pub fn restricted_extremes_exact(
    design: &DesignMatrix,
    s: usize,
    budget: Option<u64>,
) -> Result<RipReport> {
    let p = design.p();
    if s == 0 || s > p.min(design.n()) {
        return Err(Error::SparsityOutOfRange { s, p });
    }
    let budget = budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET);
    let count = binomial(p as u64, s as u64);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { p, s, count, budget });
    }
    Ok(extremes_over(design, Combinations::new(p, s), s, AuditMethod::Exact))
}

/// Monte Carlo audit over `trials` uniform supports; the reported `delta_s`
/// is a lower bound on the true one. Deterministic in `seed`.
pub fn restricted_extremes_sampled(
    design: &DesignMatrix,
    s: usize,
    trials: u64,
    seed: u64,
) -> Result<RipReport> {
    let p = design.p();
    if s == 0 || s > p.min(design.n()) {
        return Err(Error::SparsityOutOfRange { s, p });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let supports = (0..trials).map(move |_| {
        let mut pool: Vec<usize> = (0..p).collect();
        for i in 0..s {
            let j = rng.gen_range(i..p);
            pool.swap(i, j);
        }
        let mut support = pool[..s].to_vec();
        support.sort_unstable();
        support
    });
    Ok(extremes_over(design, supports, s, AuditMethod::Sampled))
}

#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub holds: bool,
    /// Max over enumerated supports of the spectral radius of
    /// `(X^T X)_SS / maxnorm^2 - I`.
    pub worst_abs_eigenvalue: f64,
    pub delta_claim: f64,
    pub supports_examined: u64,
}

/// Enumerates all size-`s_check` supports and bounds the deviation blocks'
/// spectral radius; principal-submatrix interlacing makes the top size
/// dominate all smaller supports.
pub fn contraction_check(
    design: &DesignMatrix,
    s_check: usize,
    delta_claim: f64,
    budget: Option<u64>,
) -> Result<ContractionReport> {
    let p = design.p();
    if s_check == 0 || s_check > p {
        return Err(Error::SparsityOutOfRange { s: s_check, p });
    }
    let budget = budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET);
    let count = binomial(p as u64, s_check as u64);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { p, s: s_check, count, budget });
    }
    let denom = design.max_col_norm_sq();
    let gram = full_gram(design);
    let mut worst = 0.0f64;
    let mut examined = 0u64;
    for support in Combinations::new(p, s_check) {
        let mut block = gram_block(&gram, &support);
        block.mapv_inplace(|v| v / denom);
        for i in 0..s_check {
            block[[i, i]] -= 1.0;
        }
        let eig = symmetric_eigenvalues(&block);
        let radius = eig[0].abs().max(eig[eig.len() - 1].abs());
        if radius > worst {
            worst = radius;
        }
        examined += 1;
    }
    Ok(ContractionReport {
        holds: worst <= delta_claim,
        worst_abs_eigenvalue: worst,
        delta_claim,
        supports_examined: examined,
    })
}
