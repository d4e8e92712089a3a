//! Domain types and synthetic data generation for the sparse linear model
//! `y = X b + sigma * xi`.
//!
//! The key derived quantities live here too: the scaled correlation vector
//! `M = X^T y / max_j ||X_j||^2`, the effective per-coordinate noise
//! `Xi = sigma * X^T xi / max_j ||X_j||^2`, and the high-probability noise
//! concentration event that conditions all deterministic guarantees.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Relative tolerance for cached column norms vs recomputation.
pub const COL_NORM_RTOL: f64 = 1e-12;
/// Relative tolerance for the `normalized` flag (`||X_j|| = sqrt(n)`).
pub const NORMALIZED_RTOL: f64 = 1e-9;

/// An s-sparse signal with an explicit magnitude floor: every stored entry
/// satisfies `|v| >= magnitude_floor` and stored zeros are forbidden, so the
/// number of entries is exactly the l0 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
    magnitude_floor: f64,
}

impl SparseVector {
    pub fn new(dim: usize, mut entries: Vec<(usize, f64)>, magnitude_floor: f64) -> Result<Self> {
        if magnitude_floor < 0.0 {
            return Err(Error::InvalidArgument("magnitude floor must be >= 0".into()));
        }
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate index {} in sparse vector",
                    w[0].0
                )));
            }
        }
        for &(i, v) in &entries {
            if i >= dim {
                return Err(Error::InvalidArgument(format!(
                    "index {i} out of range for dim {dim}"
                )));
            }
            if v == 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "stored zero at index {i}; zeros must be implicit"
                )));
            }
            if magnitude_floor > 0.0 && v.abs() < magnitude_floor {
                return Err(Error::InvalidArgument(format!(
                    "entry {v} at index {i} below magnitude floor {magnitude_floor}"
                )));
            }
        }
        Ok(Self { dim, entries, magnitude_floor })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, entries: Vec::new(), magnitude_floor: 0.0 }
    }

    /// Captures the nonzero pattern of a dense vector (floor 0).
    pub fn from_dense(v: &Array1<f64>) -> Self {
        let entries = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(i, &x)| (i, x))
            .collect();
        Self { dim: v.len(), entries, magnitude_floor: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn magnitude_floor(&self) -> f64 {
        self.magnitude_floor
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// l0 norm.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|&(i, _)| i).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    pub fn to_dense(&self) -> Array1<f64> {
        let mut out = Array1::zeros(self.dim);
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Dense n x p design with cached column norms and `max_col_norm`
/// (the largest Euclidean column norm, used as the gradient step scale).
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    values: Array2<f64>,
    col_norms: Vec<f64>,
    max_col_norm: f64,
    normalized: bool,
}

impl DesignMatrix {
    /// Wraps a dense matrix, computing the column-norm cache. The
    /// `normalized` flag is set from the data itself.
    pub fn from_array(values: Array2<f64>) -> Result<Self> {
        let (n, p) = values.dim();
        if n == 0 || p == 0 {
            return Err(Error::Dimension(format!("design must be nonempty, got {n}x{p}")));
        }
        let col_norms: Vec<f64> = (0..p)
            .map(|j| values.column(j).iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect();
        let max_col_norm = col_norms.iter().cloned().fold(0.0, f64::max);
        let sqrt_n = (n as f64).sqrt();
        let normalized = col_norms
            .iter()
            .all(|&c| (c - sqrt_n).abs() <= NORMALIZED_RTOL * sqrt_n);
        Ok(Self { values, col_norms, max_col_norm, normalized })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn col_norms(&self) -> &[f64] {
        &self.col_norms
    }

    /// `max_j ||X_j||`.
    pub fn max_col_norm(&self) -> f64 {
        self.max_col_norm
    }

    /// `max_j ||X_j||^2`, the gradient step denominator.
    pub fn max_col_norm_sq(&self) -> f64 {
        self.max_col_norm * self.max_col_norm
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Checks the cached norms against recomputation (used by tests and the
    /// audit CLI after loading a design from disk).
    pub fn verify_cache(&self) -> Result<()> {
        for (j, &cached) in self.col_norms.iter().enumerate() {
            let actual = self
                .values
                .column(j)
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
            if (cached - actual).abs() > COL_NORM_RTOL * actual.max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "column norm cache stale at column {j}: {cached} vs {actual}"
                )));
            }
        }
        Ok(())
    }

    /// Writes the design as CSV: first line `n,p`, then one row per line.
    pub fn save_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{},{}", self.n(), self.p())?;
        for i in 0..self.n() {
            let row: Vec<String> = (0..self.p()).map(|j| format!("{}", self.values[[i, j]])).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn save_csv_path(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.save_csv(std::io::BufWriter::new(f))
    }

    /// Reads a design written by [`DesignMatrix::save_csv`].
    pub fn load_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty design file".into()))??;
        let dims: Vec<&str> = header.trim().split(',').collect();
        if dims.len() != 2 {
            return Err(Error::Parse(format!("expected header `n,p`, got `{header}`")));
        }
        let n: usize = dims[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad n in header `{header}`")))?;
        let p: usize = dims[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad p in header `{header}`")))?;
        let mut values = Array2::zeros((n, p));
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {n} data rows, got {i}")))??;
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != p {
                return Err(Error::Parse(format!(
                    "row {i} has {} fields, expected {p}",
                    fields.len()
                )));
            }
            for (j, f) in fields.iter().enumerate() {
                values[[i, j]] = f
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value `{f}` at row {i} col {j}")))?;
            }
        }
        Self::from_array(values)
    }

    pub fn load_csv_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::load_csv(f)
    }
}

/// A fully materialized synthetic instance. `y` is reproducible bit-for-bit
/// from the stored fields via [`compute_response`].
#[derive(Debug, Clone)]
pub struct RegressionInstance {
    pub design: DesignMatrix,
    pub beta_true: SparseVector,
    pub sigma: f64,
    pub noise: Array1<f64>,
    pub y: Array1<f64>,
}

impl RegressionInstance {
    /// Recomputes `y` along the same arithmetic path used at construction.
    pub fn reconstruct_response(&self) -> Array1<f64> {
        compute_response(&self.design, &self.beta_true.to_dense(), self.sigma, &self.noise)
    }
}

/// The per-coordinate statistical error of one gradient step,
/// `sigma * X^T xi / max_j ||X_j||^2`.
#[derive(Debug, Clone)]
pub struct EffectiveNoise {
    pub xi_eff: Array1<f64>,
}

/// The single arithmetic path for `y = X b + sigma * xi`; both construction
/// and reconstruction go through here so they agree exactly.
pub fn compute_response(
    design: &DesignMatrix,
    beta: &Array1<f64>,
    sigma: f64,
    noise: &Array1<f64>,
) -> Array1<f64> {
    let mut y = design.values().dot(beta);
    y.zip_mut_with(noise, |yi, &xi| *yi += sigma * xi);
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    Gaussian,
    Rademacher,
    IdentityScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeKind {
    /// All nonzero entries have magnitude exactly `a`.
    FlatA,
    /// Magnitudes drawn uniformly from `[a, 2a]`.
    Uniform,
    /// One entry at `10a`, the rest at `a`.
    Spiked,
}

/// Draws a design matrix. With `normalize`, every column is rescaled to norm
/// exactly `sqrt(n)`. `identity_scaled` requires `n == p` and gives
/// `sqrt(n) * I`. Deterministic in `seed`.
pub fn generate_design(
    kind: DesignKind,
    n: usize,
    p: usize,
    normalize: bool,
    seed: u64,
) -> Result<DesignMatrix> {
    if n == 0 || p == 0 {
        return Err(Error::Dimension(format!("need n >= 1 and p >= 1, got n={n}, p={p}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut values = Array2::zeros((n, p));
    match kind {
        DesignKind::Gaussian => {
            for v in values.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
        }
        DesignKind::Rademacher => {
            for v in values.iter_mut() {
                *v = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            }
        }
        DesignKind::IdentityScaled => {
            if n != p {
                return Err(Error::Dimension(format!(
                    "identity_scaled requires n == p, got n={n}, p={p}"
                )));
            }
            let sqrt_n = (n as f64).sqrt();
            for i in 0..n {
                values[[i, i]] = sqrt_n;
            }
        }
    }
    if normalize && kind != DesignKind::IdentityScaled {
        let sqrt_n = (n as f64).sqrt();
        for j in 0..p {
            let norm = values.column(j).iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::InvalidArgument(format!("zero column {j} cannot be normalized")));
            }
            let scale = sqrt_n / norm;
            values.column_mut(j).mapv_inplace(|x| x * scale);
        }
    }
    DesignMatrix::from_array(values)
}

/// Draws an s-sparse signal on a uniformly random support with equiprobable
/// signs; magnitudes per `kind`. The result lives in the class of s-sparse
/// vectors with magnitude floor `a`.
pub fn sample_signal(
    p: usize,
    s: usize,
    a: f64,
    kind: MagnitudeKind,
    seed: u64,
) -> Result<SparseVector> {
    if s > p {
        return Err(Error::SparsityOutOfRange { s, p });
    }
    if a < 0.0 {
        return Err(Error::InvalidArgument("magnitude floor a must be >= 0".into()));
    }
    let mut rng = rng_from_seed(seed);
    // Partial Fisher-Yates for a uniform size-s subset.
    let mut pool: Vec<usize> = (0..p).collect();
    for i in 0..s {
        let j = rng.gen_range(i..p);
        pool.swap(i, j);
    }
    let mut support: Vec<usize> = pool[..s].to_vec();
    support.sort_unstable();

    let spike_pos = if s > 0 { rng.gen_range(0..s) } else { 0 };
    let mut entries = Vec::with_capacity(s);
    for (k, &idx) in support.iter().enumerate() {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let mag = match kind {
            MagnitudeKind::FlatA => a,
            MagnitudeKind::Uniform => rng.gen_range(a..=2.0 * a),
            MagnitudeKind::Spiked => {
                if k == spike_pos {
                    10.0 * a
                } else {
                    a
                }
            }
        };
        if mag > 0.0 {
            entries.push((idx, sign * mag));
        }
    }
    SparseVector::new(p, entries, a)
}

/// Draws noise and assembles the full instance. Both noise kinds are
/// 1-subGaussian. Deterministic in `seed`.
pub fn synthesize_instance(
    design: &DesignMatrix,
    beta: &SparseVector,
    sigma: f64,
    noise_kind: NoiseKind,
    seed: u64,
) -> Result<RegressionInstance> {
    if beta.dim() != design.p() {
        return Err(Error::Dimension(format!(
            "signal dim {} != design p {}",
            beta.dim(),
            design.p()
        )));
    }
    if sigma < 0.0 {
        return Err(Error::InvalidArgument("sigma must be >= 0".into()));
    }
    let mut rng = rng_from_seed(seed);
    let n = design.n();
    let mut noise = Array1::zeros(n);
    match noise_kind {
        NoiseKind::Gaussian => {
            for v in noise.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
        }
        NoiseKind::Rademacher => {
            for v in noise.iter_mut() {
                *v = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            }
        }
    }
    let y = compute_response(design, &beta.to_dense(), sigma, &noise);
    Ok(RegressionInstance {
        design: design.clone(),
        beta_true: beta.clone(),
        sigma,
        noise,
        y,
    })
}

/// `M = X^T y / max_j ||X_j||^2`, the one-step estimate from zero.
pub fn scaled_correlation(design: &DesignMatrix, y: &Array1<f64>) -> Array1<f64> {
    let mut m = design.values().t().dot(y);
    let denom = design.max_col_norm_sq();
    m.mapv_inplace(|v| v / denom);
    m
}

/// `Xi = sigma * X^T xi / max_j ||X_j||^2` for a materialized instance.
pub fn effective_noise(instance: &RegressionInstance) -> EffectiveNoise {
    let mut xi_eff = instance.design.values().t().dot(&instance.noise);
    let denom = instance.design.max_col_norm_sq();
    let sigma = instance.sigma;
    xi_eff.mapv_inplace(|v| sigma * v / denom);
    EffectiveNoise { xi_eff }
}

/// Outcome of the noise concentration check: the top-s squared order
/// statistics of `|Xi|` against `10 sigma^2 s log(ep/s) / max||X_j||^2`.
#[derive(Debug, Clone, Copy)]
pub struct NoiseEventCheck {
    pub holds: bool,
    pub statistic: f64,
    pub bound: f64,
}

/// Checks the high-probability event conditioning the deterministic
/// analysis. Errors on `s = 0` (the bound's log term is undefined there).
pub fn noise_event(
    xi_eff: &EffectiveNoise,
    s: usize,
    sigma: f64,
    max_col_norm: f64,
) -> Result<NoiseEventCheck> {
    let p = xi_eff.xi_eff.len();
    if s == 0 || s > p {
        return Err(Error::SparsityOutOfRange { s, p });
    }
    let mut sq: Vec<f64> = xi_eff.xi_eff.iter().map(|v| v * v).collect();
    sq.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let statistic: f64 = sq[..s].iter().sum();
    let bound = 10.0 * sigma * sigma * (s as f64) * (std::f64::consts::E * p as f64 / s as f64).ln()
        / (max_col_norm * max_col_norm);
    Ok(NoiseEventCheck { holds: statistic <= bound, statistic, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_vector_rejects_bad_entries() {
        assert!(SparseVector::new(4, vec![(0, 1.0), (0, 2.0)], 0.0).is_err());
        assert!(SparseVector::new(4, vec![(4, 1.0)], 0.0).is_err());
        assert!(SparseVector::new(4, vec![(1, 0.0)], 0.0).is_err());
        assert!(SparseVector::new(4, vec![(1, 0.5)], 1.0).is_err());
        let v = SparseVector::new(4, vec![(2, -1.5), (0, 3.0)], 1.0).unwrap();
        assert_eq!(v.nnz(), 2);
        assert_eq!(v.support(), vec![0, 2]);
    }

    #[test]
    fn identity_design_has_norm_sqrt_n() {
        let d = generate_design(DesignKind::IdentityScaled, 4, 4, false, 0).unwrap();
        assert_eq!(d.max_col_norm(), 2.0);
        assert!(d.is_normalized());
        assert!(generate_design(DesignKind::IdentityScaled, 4, 5, false, 0).is_err());
    }

    #[test]
    fn normalization_forces_sqrt_n() {
        let d = generate_design(DesignKind::Gaussian, 100, 50, true, 7).unwrap();
        for &c in d.col_norms() {
            assert!((c - 10.0).abs() <= 1e-9 * 10.0, "col norm {c}");
        }
        assert!(d.is_normalized());
    }

    #[test]
    fn unnormalized_gaussian_norms_in_chi_band() {
        // n = 200 dof: sqrt(chi^2_200) concentrates around sqrt(200) ~ 14.1;
        // +-6 sd of the norm is ~ +-6/sqrt(2) around that.
        let d = generate_design(DesignKind::Gaussian, 200, 20, false, 1).unwrap();
        for (j, &c) in d.col_norms().iter().enumerate() {
            let direct = d
                .values()
                .column(j)
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
            assert!((c - direct).abs() <= 1e-12 * direct);
            assert!((10.9..=17.6).contains(&c), "col {j} norm {c} outside band");
        }
    }

    #[test]
    fn sample_signal_respects_floor_and_count() {
        let v = sample_signal(10, 0, 1.0, MagnitudeKind::FlatA, 0).unwrap();
        assert_eq!(v.nnz(), 0);

        let v = sample_signal(10, 10, 2.0, MagnitudeKind::FlatA, 3).unwrap();
        assert_eq!(v.nnz(), 10);
        for &(_, x) in v.entries() {
            assert_eq!(x.abs(), 2.0);
        }

        let v = sample_signal(1000, 10, 0.5, MagnitudeKind::Uniform, 5).unwrap();
        assert_eq!(v.nnz(), 10);
        for &(_, x) in v.entries() {
            assert!(x.abs() >= 0.5 && x.abs() <= 1.0);
        }

        assert!(sample_signal(4, 5, 1.0, MagnitudeKind::FlatA, 0).is_err());
    }

    #[test]
    fn spiked_signal_has_one_big_entry() {
        let v = sample_signal(50, 5, 1.0, MagnitudeKind::Spiked, 11).unwrap();
        let big = v.entries().iter().filter(|&&(_, x)| x.abs() == 10.0).count();
        let small = v.entries().iter().filter(|&&(_, x)| x.abs() == 1.0).count();
        assert_eq!((big, small), (1, 4));
    }

    #[test]
    fn response_reconstruction_is_exact() {
        let d = generate_design(DesignKind::Gaussian, 30, 20, true, 2).unwrap();
        let b = sample_signal(20, 3, 1.0, MagnitudeKind::FlatA, 4).unwrap();
        let inst = synthesize_instance(&d, &b, 0.7, NoiseKind::Gaussian, 9).unwrap();
        let y2 = inst.reconstruct_response();
        for (a, b) in inst.y.iter().zip(y2.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn zero_signal_zero_noise_gives_zero_response() {
        let d = generate_design(DesignKind::Gaussian, 10, 6, true, 0).unwrap();
        let b = SparseVector::zero(6);
        let inst = synthesize_instance(&d, &b, 0.0, NoiseKind::Gaussian, 1).unwrap();
        assert!(inst.y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_instance_response() {
        let d = generate_design(DesignKind::IdentityScaled, 4, 4, false, 0).unwrap();
        let b = SparseVector::new(4, vec![(0, 3.0)], 0.0).unwrap();
        let inst = synthesize_instance(&d, &b, 0.0, NoiseKind::Gaussian, 1).unwrap();
        assert_eq!(inst.y.to_vec(), vec![6.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn residual_energy_concentrates() {
        // ||y - Xb||^2 / n = sigma^2 ||xi||^2 / n stays near 1.
        let d = generate_design(DesignKind::Gaussian, 100, 50, true, 6).unwrap();
        let b = sample_signal(50, 3, 1.0, MagnitudeKind::FlatA, 7).unwrap();
        let inst = synthesize_instance(&d, &b, 1.0, NoiseKind::Gaussian, 11).unwrap();
        let resid = &inst.y - &d.values().dot(&b.to_dense());
        let stat = resid.iter().map(|v| v * v).sum::<f64>() / 100.0;
        assert!((0.5..=1.6).contains(&stat), "residual energy {stat}");
    }

    #[test]
    fn identity_collapse_of_correlation() {
        // With X = sqrt(n) I, M = b + sigma xi / sqrt(n) exactly.
        let n = 8;
        let d = generate_design(DesignKind::IdentityScaled, n, n, false, 0).unwrap();
        let b = sample_signal(n, 2, 1.5, MagnitudeKind::FlatA, 3).unwrap();
        let inst = synthesize_instance(&d, &b, 0.5, NoiseKind::Gaussian, 5).unwrap();
        let m = scaled_correlation(&d, &inst.y);
        let dense = b.to_dense();
        let sqrt_n = (n as f64).sqrt();
        for i in 0..n {
            let expect = (sqrt_n * dense[i] + 0.5 * inst.noise[i]) * sqrt_n / (n as f64);
            assert!((m[i] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn correlation_of_zero_response_is_zero() {
        let d = generate_design(DesignKind::Gaussian, 10, 5, true, 0).unwrap();
        let m = scaled_correlation(&d, &Array1::zeros(10));
        assert!(m.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn effective_noise_identity_case() {
        let n = 6;
        let d = generate_design(DesignKind::IdentityScaled, n, n, false, 0).unwrap();
        let b = SparseVector::zero(n);
        let inst = synthesize_instance(&d, &b, 1.0, NoiseKind::Gaussian, 2).unwrap();
        let xi = effective_noise(&inst);
        let sqrt_n = (n as f64).sqrt();
        for i in 0..n {
            assert!((xi.xi_eff[i] - inst.noise[i] / sqrt_n).abs() < 1e-15);
        }
    }

    #[test]
    fn effective_noise_vanishes_with_sigma_zero() {
        let d = generate_design(DesignKind::Gaussian, 12, 8, true, 1).unwrap();
        let b = sample_signal(8, 2, 1.0, MagnitudeKind::FlatA, 2).unwrap();
        let inst = synthesize_instance(&d, &b, 0.0, NoiseKind::Gaussian, 3).unwrap();
        let xi = effective_noise(&inst);
        assert!(xi.xi_eff.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn noise_event_arithmetic() {
        let xi = EffectiveNoise { xi_eff: Array1::from(vec![3.0, 0.0, 0.0, 0.0]) };
        let check = noise_event(&xi, 2, 1.0, 1.0).unwrap();
        assert_eq!(check.statistic, 9.0);
        let expect_bound = 10.0 * 2.0 * (2.0 * std::f64::consts::E).ln();
        assert!((check.bound - expect_bound).abs() < 1e-12);
        assert!(check.holds);

        let zero = EffectiveNoise { xi_eff: Array1::zeros(4) };
        let check = noise_event(&zero, 2, 1.0, 1.0).unwrap();
        assert!(check.holds);
        assert_eq!(check.statistic, 0.0);

        assert!(noise_event(&zero, 0, 1.0, 1.0).is_err());
    }

    #[test]
    fn design_csv_round_trip() {
        let d = generate_design(DesignKind::Gaussian, 7, 5, true, 13).unwrap();
        let mut buf = Vec::new();
        d.save_csv(&mut buf).unwrap();
        let d2 = DesignMatrix::load_csv(&buf[..]).unwrap();
        assert_eq!(d.values(), d2.values());
        assert_eq!(d.col_norms(), d2.col_norms());

        assert!(DesignMatrix::load_csv(&b"2,2\n1.0,junk\n0,1\n"[..]).is_err());
        assert!(DesignMatrix::load_csv(&b"nonsense\n"[..]).is_err());
    }

    #[test]
    fn per_coordinate_noise_tails() {
        // Marginal subGaussian tails of Xi: fraction with
        // |Xi_i| >= t sigma ||X_i|| / maxnorm^2 should be <= 2 exp(-t^2/2) + slack.
        let n = 200;
        let p = 50;
        let mut counts = [0usize; 3];
        let mut total = 0usize;
        for seed in 0..40 {
            let d = generate_design(DesignKind::Gaussian, n, p, true, seed).unwrap();
            let b = SparseVector::zero(p);
            let inst = synthesize_instance(&d, &b, 1.0, NoiseKind::Gaussian, 1000 + seed).unwrap();
            let xi = effective_noise(&inst);
            let maxsq = d.max_col_norm_sq();
            for (j, &v) in xi.xi_eff.iter().enumerate() {
                let scale = d.col_norms()[j] / maxsq;
                for (k, t) in [1.0f64, 2.0, 3.0].iter().enumerate() {
                    if v.abs() >= t * scale {
                        counts[k] += 1;
                    }
                }
                total += 1;
            }
        }
        for (k, t) in [1.0f64, 2.0, 3.0].iter().enumerate() {
            let frac = counts[k] as f64 / total as f64;
            let bound = 2.0 * (-t * t / 2.0).exp() + 0.01;
            assert!(frac <= bound, "t={t}: frac {frac} > bound {bound}");
        }
    }
}
