//! Comparison discrepancy metrics: Gaussian-kernel MMD and CORAL.

use crate::discrepancy::batch::FeatureBatch;
use crate::error::{CqError, Result};

fn sq_dist(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Biased (V-statistic) maximum mean discrepancy with the Gaussian kernel
/// `exp(-||u-v||^2 / (2 sigma^2))`.
pub fn mmd_gaussian(zs: &FeatureBatch, zt: &FeatureBatch, sigma: f64) -> Result<f64> {
    if zs.n() != zt.n() {
        return Err(CqError::Shape(format!(
            "dimension mismatch {} vs {}",
            zs.n(),
            zt.n()
        )));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(CqError::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let inv = 1.0 / (2.0 * sigma * sigma);
    let k = |u: &[f64], v: &[f64]| (-sq_dist(u, v) * inv).exp();
    let mean_block = |a: &FeatureBatch, b: &FeatureBatch| {
        let mut sum = 0.0;
        for p in a.rows() {
            for q in b.rows() {
                sum += k(p, q);
            }
        }
        sum / (a.m() as f64 * b.m() as f64)
    };
    Ok(mean_block(zs, zs) + mean_block(zt, zt) - 2.0 * mean_block(zs, zt))
}

/// Median of all pairwise Euclidean distances in the pooled batches, the
/// usual kernel bandwidth heuristic. Falls back to 1 when the median is 0.
pub fn median_heuristic_sigma(zs: &FeatureBatch, zt: &FeatureBatch) -> Result<f64> {
    if zs.n() != zt.n() {
        return Err(CqError::Shape("dimension mismatch".into()));
    }
    let pooled: Vec<&Vec<f64>> = zs.rows().iter().chain(zt.rows().iter()).collect();
    let mut dists = Vec::new();
    for i in 0..pooled.len() {
        for j in i + 1..pooled.len() {
            dists.push(sq_dist(pooled[i], pooled[j]).sqrt());
        }
    }
    if dists.is_empty() {
        return Ok(1.0);
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = dists.len() / 2;
    let median = if dists.len() % 2 == 1 {
        dists[mid]
    } else {
        0.5 * (dists[mid - 1] + dists[mid])
    };
    Ok(if median > 0.0 { median } else { 1.0 })
}

/// Analytic gradient of [`mmd_gaussian`] with respect to the flattened
/// entries of `zs` (row-major).
pub fn grad_mmd_zs(zs: &FeatureBatch, zt: &FeatureBatch, sigma: f64) -> Result<Vec<f64>> {
    if zs.n() != zt.n() {
        return Err(CqError::Shape("dimension mismatch".into()));
    }
    let inv = 1.0 / (2.0 * sigma * sigma);
    let k = |u: &[f64], v: &[f64]| (-sq_dist(u, v) * inv).exp();
    let ms = zs.m() as f64;
    let mt = zt.m() as f64;
    let n = zs.n();
    let mut g = vec![0.0; zs.m() * n];
    for (p, zp) in zs.rows().iter().enumerate() {
        for d in 0..n {
            let mut acc = 0.0;
            for zq in zs.rows() {
                // k(z_p, .) appears twice in the symmetric double sum
                acc += 2.0 / (ms * ms) * k(zp, zq) * (-(zp[d] - zq[d]) / (sigma * sigma));
            }
            for zq in zt.rows() {
                acc -= 2.0 / (ms * mt) * k(zp, zq) * (-(zp[d] - zq[d]) / (sigma * sigma));
            }
            g[p * n + d] = acc;
        }
    }
    Ok(g)
}

/// CORAL distance: `||C_S - C_T||_F^2 / (4 n^2)` with sample covariances
/// (divisor M - 1).
pub fn coral_distance(zs: &FeatureBatch, zt: &FeatureBatch) -> Result<f64> {
    if zs.n() != zt.n() {
        return Err(CqError::Shape(format!(
            "dimension mismatch {} vs {}",
            zs.n(),
            zt.n()
        )));
    }
    if zs.m() < 2 || zt.m() < 2 {
        return Err(CqError::InvalidArgument(
            "CORAL needs at least 2 samples per batch".into(),
        ));
    }
    let n = zs.n();
    let cs = covariance(zs);
    let ct = covariance(zt);
    let mut frob = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = cs[i][j] - ct[i][j];
            frob += d * d;
        }
    }
    Ok(frob / (4.0 * (n * n) as f64))
}

fn covariance(z: &FeatureBatch) -> Vec<Vec<f64>> {
    let n = z.n();
    let m = z.m() as f64;
    let mu = z.mean();
    let mut c = vec![vec![0.0; n]; n];
    for r in z.rows() {
        for i in 0..n {
            for j in 0..n {
                c[i][j] += (r[i] - mu[i]) * (r[j] - mu[j]);
            }
        }
    }
    for row in &mut c {
        for v in row.iter_mut() {
            *v /= m - 1.0;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(rows: Vec<Vec<f64>>) -> FeatureBatch {
        FeatureBatch::new(rows).unwrap()
    }

    #[test]
    fn mmd_identical_batches_and_closed_form() {
        let zs = batch(vec![vec![0.3, 1.0], vec![-0.5, 0.2]]);
        assert!(mmd_gaussian(&zs, &zs, 1.0).unwrap().abs() < 1e-15);

        // single samples 0 and x: 2 - 2 exp(-x^2/(2 sigma^2)); x = sigma = 1
        let a = batch(vec![vec![0.0]]);
        let b = batch(vec![vec![1.0]]);
        let got = mmd_gaussian(&a, &b, 1.0).unwrap();
        let expect = 2.0 - 2.0 * (-0.5f64).exp();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 0.786939).abs() < 1e-5);
    }

    #[test]
    fn mmd_vanishes_for_huge_bandwidth() {
        let zs = batch(vec![vec![0.0], vec![1.0]]);
        let zt = batch(vec![vec![5.0], vec![-3.0]]);
        let v = mmd_gaussian(&zs, &zt, 1e9).unwrap();
        assert!(v.abs() < 1e-9, "{v}");
        // coarse monotonicity: far beyond the diameter the value shrinks
        let diam = 8.0;
        let near = mmd_gaussian(&zs, &zt, diam).unwrap();
        let far = mmd_gaussian(&zs, &zt, 10.0 * diam).unwrap();
        assert!(far < near);
    }

    #[test]
    fn median_heuristic_is_a_pooled_median() {
        let zs = batch(vec![vec![0.0]]);
        let zt = batch(vec![vec![3.0], vec![4.0]]);
        // pairwise distances {3, 4, 1} -> median 3
        assert_eq!(median_heuristic_sigma(&zs, &zt).unwrap(), 3.0);
        // degenerate identical points fall back to 1
        let same = batch(vec![vec![2.0], vec![2.0]]);
        assert_eq!(median_heuristic_sigma(&same, &same).unwrap(), 1.0);
    }

    #[test]
    fn coral_cases() {
        let zs = batch(vec![vec![0.0], vec![2.0]]); // variance 2
        assert_eq!(coral_distance(&zs, &zs).unwrap(), 0.0);

        // identical covariance, different means -> 0
        let zt = batch(vec![vec![10.0], vec![12.0]]);
        assert!(coral_distance(&zs, &zt).unwrap().abs() < 1e-12);

        // 1-D: var 1 vs var 2 -> 1/4
        let a = batch(vec![vec![0.0], vec![2.0_f64.sqrt()]]); // var 1
        let b = batch(vec![vec![0.0], vec![2.0]]); // var 2
        let got = coral_distance(&a, &b).unwrap();
        assert!((got - 0.25).abs() < 1e-12, "{got}");

        assert!(coral_distance(&batch(vec![vec![1.0]]), &zs).is_err());
    }
}
