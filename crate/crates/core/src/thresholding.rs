//! Threshold operators and the closed-form threshold values.
//!
//! Hard thresholding keeps boundary values: entry `j` survives iff
//! `|u_j| >= lambda`. Order statistics are taken on absolute values
//! throughout. Comparisons are exact in double precision; no tolerance is
//! applied at the boundary.

use ndarray::Array1;

use crate::error::{Error, Result};

/// Keeps entries with `|u_j| >= lambda` (ties kept), zeroes the rest.
pub fn hard_threshold(u: &Array1<f64>, lambda: f64) -> Array1<f64> {
    u.mapv(|v| if v.abs() >= lambda { v } else { 0.0 })
}

/// Keeps the `s` largest entries by absolute value, ties broken by smallest
/// index. Zeros are never resurrected, so at most `min(s, #nonzeros)`
/// entries survive.
pub fn top_s_threshold(u: &Array1<f64>, s: usize) -> Result<Array1<f64>> {
    let p = u.len();
    if s == 0 || s > p {
        return Err(Error::SparsityOutOfRange { s, p });
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        u[b].abs()
            .partial_cmp(&u[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut out = Array1::zeros(p);
    for &j in order.iter().take(s) {
        if u[j] != 0.0 {
            out[j] = u[j];
        }
    }
    Ok(out)
}

/// `sign(u_j) * max(|u_j| - lambda, 0)` per entry.
pub fn soft_threshold(u: &Array1<f64>, lambda: f64) -> Array1<f64> {
    u.mapv(|v| v.signum() * (v.abs() - lambda).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    /// Floor is the fixed `lambda_inf` for every step.
    FixedFloor,
    /// Floor is supplied per step by the caller (noise-estimate driven).
    AdaptiveFloor,
}

/// Geometric threshold schedule `lambda_m = kappa^{m/2} lambda0 v floor(m)`,
/// nonincreasing in `m`.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdSchedule {
    pub lambda0: f64,
    pub lambda_inf: f64,
    pub kappa: f64,
    pub mode: ScheduleMode,
}

impl ThresholdSchedule {
    pub fn fixed(lambda0: f64, lambda_inf: f64, kappa: f64) -> Result<Self> {
        Self::new(lambda0, lambda_inf, kappa, ScheduleMode::FixedFloor)
    }

    pub fn adaptive(lambda0: f64, kappa: f64) -> Result<Self> {
        Self::new(lambda0, 0.0, kappa, ScheduleMode::AdaptiveFloor)
    }

    fn new(lambda0: f64, lambda_inf: f64, kappa: f64, mode: ScheduleMode) -> Result<Self> {
        if !(0.0 < kappa && kappa < 1.0) {
            return Err(Error::InvalidArgument(format!("kappa must be in (0,1), got {kappa}")));
        }
        if lambda0 < 0.0 || lambda_inf < 0.0 {
            return Err(Error::InvalidArgument("thresholds must be >= 0".into()));
        }
        Ok(Self { lambda0, lambda_inf, kappa, mode })
    }

    /// The geometric term `kappa^{m/2} lambda0` alone.
    pub fn geometric(&self, m: usize) -> f64 {
        self.kappa.powf(m as f64 / 2.0) * self.lambda0
    }
}

/// Evaluates the schedule at step `m`. In adaptive mode the per-step floor
/// must be supplied; in fixed mode it must not be.
pub fn schedule_value(
    schedule: &ThresholdSchedule,
    m: usize,
    adaptive_floor: Option<f64>,
) -> Result<f64> {
    let floor = match (schedule.mode, adaptive_floor) {
        (ScheduleMode::FixedFloor, None) => schedule.lambda_inf,
        (ScheduleMode::AdaptiveFloor, Some(f)) => f,
        (ScheduleMode::FixedFloor, Some(_)) => {
            return Err(Error::InvalidArgument(
                "fixed-floor schedule does not take a per-step floor".into(),
            ))
        }
        (ScheduleMode::AdaptiveFloor, None) => {
            return Err(Error::InvalidArgument(
                "adaptive-floor schedule requires a per-step floor".into(),
            ))
        }
    };
    Ok(schedule.geometric(m).max(floor))
}

fn check_s(s: usize, p: usize) -> Result<()> {
    if s == 0 || s > p {
        return Err(Error::SparsityOutOfRange { s, p });
    }
    Ok(())
}

/// Data-driven initial threshold for known `(s, sigma)`:
/// `sqrt(10 sum_{i<=s} M_(i)^2 / s) v (sigma/maxnorm) sqrt(40 log(ep/s))`,
/// with `M_(i)` the order statistics of `|M|`.
pub fn initial_threshold(
    m_vec: &Array1<f64>,
    s: usize,
    sigma: f64,
    max_col_norm: f64,
    p: usize,
) -> Result<f64> {
    check_s(s, p)?;
    let mut sq: Vec<f64> = m_vec.iter().map(|v| v * v).collect();
    sq.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let top: f64 = sq[..s].iter().sum();
    let data_term = (10.0 * top / s as f64).sqrt();
    let noise_term = universal_threshold(s, sigma, max_col_norm, p)?;
    Ok(data_term.max(noise_term))
}

/// Universal statistical floor `sigma sqrt(40 log(ep/s)) / maxnorm`.
pub fn universal_threshold(s: usize, sigma: f64, max_col_norm: f64, p: usize) -> Result<f64> {
    check_s(s, p)?;
    if sigma < 0.0 {
        return Err(Error::InvalidArgument("sigma must be >= 0".into()));
    }
    Ok(sigma * (40.0 * (std::f64::consts::E * p as f64 / s as f64).ln()).sqrt() / max_col_norm)
}

/// Fully adaptive initial threshold (no knowledge of `s` or `sigma`):
/// `sqrt(20) |M|_(1) v (sigma_hat0/maxnorm) sqrt(160 log(ep))`.
pub fn adaptive_initial_threshold(
    m_vec: &Array1<f64>,
    sigma_hat0: f64,
    max_col_norm: f64,
    p: usize,
) -> Result<f64> {
    if p == 0 {
        return Err(Error::Dimension("p must be >= 1".into()));
    }
    if sigma_hat0 < 0.0 {
        return Err(Error::InvalidArgument("sigma_hat0 must be >= 0".into()));
    }
    let max_abs = m_vec.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let data_term = 20.0f64.sqrt() * max_abs;
    let noise_term = sigma_hat0 * adaptive_floor_factor(p) / max_col_norm;
    Ok(data_term.max(noise_term))
}

/// The adaptive schedule's floor scale `sqrt(160 log(ep))`; multiply by
/// `sigma_hat / maxnorm` for the per-step floor.
pub fn adaptive_floor_factor(p: usize) -> f64 {
    (160.0 * (std::f64::consts::E * p as f64).ln()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use ndarray::array;
    use rand::Rng;
    use std::f64::consts::E;

    #[test]
    fn hard_threshold_examples() {
        let u = array![3.0, 1.0, -2.5];
        assert_eq!(hard_threshold(&u, 2.0).to_vec(), vec![3.0, 0.0, -2.5]);
        assert_eq!(hard_threshold(&u, 0.0).to_vec(), u.to_vec());
        // boundary kept by >=
        let v = array![2.0, -2.0, 1.999];
        assert_eq!(hard_threshold(&v, 2.0).to_vec(), vec![2.0, -2.0, 0.0]);
    }

    #[test]
    fn hard_threshold_idempotent_and_support() {
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            let u: Array1<f64> = Array1::from_iter((0..20).map(|_| rng.gen_range(-3.0..3.0)));
            let lam = rng.gen_range(0.0..2.0);
            let once = hard_threshold(&u, lam);
            let twice = hard_threshold(&once, lam);
            assert_eq!(once, twice);
            for j in 0..20 {
                assert_eq!(once[j] != 0.0, u[j].abs() >= lam && u[j] != 0.0);
            }
        }
    }

    #[test]
    fn top_s_examples() {
        assert_eq!(
            top_s_threshold(&array![3.0, 1.0, -2.5], 2).unwrap().to_vec(),
            vec![3.0, 0.0, -2.5]
        );
        // tie -> smallest index
        assert_eq!(top_s_threshold(&array![2.0, -2.0], 1).unwrap().to_vec(), vec![2.0, 0.0]);
        // zeros never resurrected
        assert_eq!(
            top_s_threshold(&array![0.0, 0.0, 0.0, 5.0], 3).unwrap().to_vec(),
            vec![0.0, 0.0, 0.0, 5.0]
        );
        assert!(top_s_threshold(&array![1.0], 2).is_err());
        assert!(top_s_threshold(&array![1.0], 0).is_err());
    }

    #[test]
    fn top_s_maximizes_kept_energy() {
        // brute force over all size-s subsets for small p
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let p = 8;
            let u: Array1<f64> = Array1::from_iter((0..p).map(|_| rng.gen_range(-2.0..2.0)));
            for s in 1..=4 {
                let kept = top_s_threshold(&u, s).unwrap();
                let kept_energy: f64 = kept.iter().map(|v| v * v).sum();
                let mut best = 0.0f64;
                for mask in 0u32..(1 << p) {
                    if mask.count_ones() as usize != s {
                        continue;
                    }
                    let e: f64 = (0..p)
                        .filter(|&j| mask & (1 << j) != 0)
                        .map(|j| u[j] * u[j])
                        .sum();
                    best = best.max(e);
                }
                assert!((kept_energy - best).abs() < 1e-12);
                assert!(kept.iter().filter(|&&v| v != 0.0).count() <= s);
            }
        }
    }

    #[test]
    fn soft_threshold_examples() {
        let u = array![3.0, -0.5, -3.0];
        let out = soft_threshold(&u, 1.0);
        assert_eq!(out.to_vec(), vec![2.0, 0.0, -2.0]);
    }

    #[test]
    fn schedule_examples() {
        let sch = ThresholdSchedule::fixed(8.0, 1.0, 0.25).unwrap();
        let vals: Vec<f64> = (0..5).map(|m| schedule_value(&sch, m, None).unwrap()).collect();
        assert_eq!(vals, vec![8.0, 4.0, 2.0, 1.0, 1.0]);

        let sch = ThresholdSchedule::fixed(1.0, 5.0, 0.5).unwrap();
        assert_eq!(schedule_value(&sch, 0, None).unwrap(), 5.0);

        let sch = ThresholdSchedule::adaptive(3.0, 0.25).unwrap();
        assert_eq!(schedule_value(&sch, 0, Some(4.0)).unwrap(), 4.0);
        assert!(schedule_value(&sch, 0, None).is_err());
        let fixed = ThresholdSchedule::fixed(1.0, 0.5, 0.25).unwrap();
        assert!(schedule_value(&fixed, 0, Some(1.0)).is_err());
    }

    #[test]
    fn schedule_nonincreasing_and_floor_binding() {
        let sch = ThresholdSchedule::fixed(11.0, 0.3, 0.4).unwrap();
        let mut prev = f64::INFINITY;
        for m in 0..60 {
            let v = schedule_value(&sch, m, None).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        // floor binds for all m >= 2 log(lambda0/floor) / log(1/kappa)
        let m_star = (2.0 * (11.0f64 / 0.3).ln() / (1.0f64 / 0.4).ln()).ceil() as usize;
        for m in m_star..m_star + 20 {
            assert_eq!(schedule_value(&sch, m, None).unwrap(), 0.3);
        }
        assert!(ThresholdSchedule::fixed(1.0, 1.0, 1.0).is_err());
        assert!(ThresholdSchedule::fixed(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn initial_threshold_formula() {
        // zero correlation: noise branch alone
        let m = Array1::zeros(100);
        let got = initial_threshold(&m, 4, 1.0, 10.0, 100).unwrap();
        let expect = (40.0 * (E * 100.0 / 4.0).ln()).sqrt() / 10.0;
        assert!((got - expect).abs() <= 1e-12 * expect);

        // data branch alone (sigma = 0)
        let mut m = Array1::zeros(100);
        for i in 0..4 {
            m[i] = 1.0;
        }
        let got = initial_threshold(&m, 4, 0.0, 10.0, 100).unwrap();
        assert!((got - 10.0f64.sqrt()).abs() <= 1e-12);

        assert!(initial_threshold(&m, 0, 1.0, 10.0, 100).is_err());
    }

    #[test]
    fn universal_threshold_formula() {
        assert_eq!(universal_threshold(3, 0.0, 5.0, 10).unwrap(), 0.0);

        // p = s makes log(ep/s) = 1
        let got = universal_threshold(20, 1.0, 20.0, 20).unwrap();
        let expect = 40.0f64.sqrt() / 20.0;
        assert!((got - expect).abs() <= 1e-12 * expect);

        let got = universal_threshold(10, 2.0, 20.0, 1000).unwrap();
        let expect = 2.0 * (40.0 * (E * 100.0).ln()).sqrt() / 20.0;
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn adaptive_initial_threshold_formula() {
        let m = Array1::zeros(100);
        let got = adaptive_initial_threshold(&m, 1.0, 10.0, 100).unwrap();
        let expect = (160.0 * (E * 100.0).ln()).sqrt() / 10.0;
        assert!((got - expect).abs() <= 1e-12 * expect);

        let m = array![1.0, -5.0, 2.0];
        let got = adaptive_initial_threshold(&m, 0.0, 10.0, 3).unwrap();
        let expect = 20.0f64.sqrt() * 5.0;
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn adaptive_dominates_oracle_when_sigma_hat_dominates() {
        // sqrt(20)|M|_(1) >= sqrt(10 sum_{i<=s} M_(i)^2 / s) and the noise
        // branch constants dominate, so lambda_bar0 >= lambda_hat0 whenever
        // sigma_hat0 >= sigma.
        let mut rng = rng_from_seed(9);
        for _ in 0..200 {
            let p = 40;
            let m: Array1<f64> = Array1::from_iter((0..p).map(|_| rng.gen_range(-4.0..4.0)));
            let s = rng.gen_range(1..=10);
            let sigma = rng.gen_range(0.0..2.0);
            let sigma_hat0 = sigma + rng.gen_range(0.0..1.0);
            let oracle = initial_threshold(&m, s, sigma, 7.0, p).unwrap();
            let adaptive = adaptive_initial_threshold(&m, sigma_hat0, 7.0, p).unwrap();
            assert!(
                adaptive >= oracle - 1e-12,
                "adaptive {adaptive} < oracle {oracle} (s={s})"
            );
        }
    }
}
