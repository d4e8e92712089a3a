//! Shared helpers for the integration suites: construction of certified
//! near-orthogonal designs whose restricted eigenvalue deviation is audited
//! exactly before use.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use adaiht_core::model::DesignMatrix;
use adaiht_core::rip::{contraction_check, restricted_extremes_exact};
use adaiht_core::rng::rng_from_seed;

/// Orthonormalizes a Gaussian draw (two Gram-Schmidt passes), rescales
/// columns to `sqrt(n)`, then adds `perturb`-scaled Gaussian noise and
/// renormalizes. `perturb = 0` gives exactly orthogonal columns.
pub fn near_orthogonal_design(n: usize, p: usize, perturb: f64, seed: u64) -> DesignMatrix {
    assert!(p <= n, "need p <= n for orthogonal columns");
    let mut rng = rng_from_seed(seed);
    let mut x: Array2<f64> = Array2::zeros((n, p));
    for v in x.iter_mut() {
        *v = StandardNormal.sample(&mut rng);
    }
    for _pass in 0..2 {
        for j in 0..p {
            for k in 0..j {
                let proj = x.column(j).dot(&x.column(k));
                let prev = x.column(k).to_owned();
                x.column_mut(j).zip_mut_with(&prev, |a, &b| *a -= proj * b);
            }
            let norm = x.column(j).dot(&x.column(j)).sqrt();
            x.column_mut(j).mapv_inplace(|v| v / norm);
        }
    }
    let sqrt_n = (n as f64).sqrt();
    x.mapv_inplace(|v| v * sqrt_n);
    if perturb > 0.0 {
        for v in x.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += perturb * z;
        }
        for j in 0..p {
            let norm = x.column(j).dot(&x.column(j)).sqrt();
            let scale = sqrt_n / norm;
            x.column_mut(j).mapv_inplace(|v| v * scale);
        }
    }
    DesignMatrix::from_array(x).unwrap()
}

/// A design together with its exact audit at the checked block size.
pub struct CertifiedDesign {
    pub design: DesignMatrix,
    pub delta: f64,
    /// Worst spectral radius of the Gram deviation blocks at `s_check`.
    pub contraction: f64,
}

/// Seed-searches perturbed orthogonal designs until both the exact
/// restricted eigenvalue deviation and the contraction audit at `s_check`
/// fall at or below `delta_target`.
pub fn certified_design(
    n: usize,
    p: usize,
    s_check: usize,
    perturb: f64,
    delta_target: f64,
) -> CertifiedDesign {
    for seed in 0..50 {
        let design = near_orthogonal_design(n, p, perturb, 1000 + seed);
        let report = restricted_extremes_exact(&design, s_check, None).unwrap();
        if report.delta_s > delta_target {
            continue;
        }
        let con = contraction_check(&design, s_check, delta_target, None).unwrap();
        if !con.holds {
            continue;
        }
        return CertifiedDesign {
            design,
            delta: report.delta_s,
            contraction: con.worst_abs_eigenvalue,
        };
    }
    panic!("seed search failed: no ({n},{p}) design with delta_{s_check} <= {delta_target} at perturbation {perturb}");
}

/// Deterministic per-replication sub-seeds for test-local Monte Carlo loops.
pub fn test_seed(tag: &str, replication: u64) -> u64 {
    adaiht_core::rng::stream_seed(
        adaiht_core::rng::replication_seed(0xACCE75, tag, replication),
        "test",
    )
}

#[allow(dead_code)]
pub fn rademacher_vec(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}
