//! Characteristic-function distance between two sample batches: the box
//! kernel, the plain and sliced estimators, mean matching and their
//! combination.

use crate::discrepancy::batch::FeatureBatch;
use crate::error::{CqError, Result};

/// Below this coordinate difference the kernel switches to its limit value
/// `2a`; the relative error of the switch is below 1e-16 (Taylor bound).
const SINC_SWITCH: f64 = 1e-10;

#[inline]
fn kernel_term(delta: f64, a: f64) -> f64 {
    if delta.abs() < SINC_SWITCH {
        2.0 * a
    } else {
        2.0 * (delta * a).sin() / delta
    }
}

/// d/d delta of [`kernel_term`]; analytic near 0 with a vanishing derivative.
#[inline]
fn kernel_term_deriv(delta: f64, a: f64) -> f64 {
    if delta.abs() < 1e-5 {
        // series: -2/3 a^3 d + 1/15 a^5 d^3 + O(d^5)
        -2.0 / 3.0 * a * a * a * delta + a.powi(5) * delta.powi(3) / 15.0
    } else {
        2.0 * (a * delta * (a * delta).cos() - (a * delta).sin()) / (delta * delta)
    }
}

/// The CF box kernel `prod_k 2 sin((u_k - v_k) a) / (u_k - v_k)`, with the
/// limit value `2a` on coordinates where `|u_k - v_k| < 1e-10`.
pub fn cf_kernel(u: &[f64], v: &[f64], a: f64) -> Result<f64> {
    if u.len() != v.len() {
        return Err(CqError::Shape(format!(
            "dimension mismatch {} vs {}",
            u.len(),
            v.len()
        )));
    }
    if !a.is_finite() || a <= 0.0 {
        return Err(CqError::InvalidArgument(format!(
            "box half-width a must be positive, got {a}"
        )));
    }
    Ok(u.iter()
        .zip(v)
        .map(|(&x, &y)| kernel_term(x - y, a))
        .product())
}

/// Estimated squared CF distance over the box `[-a,a]^n`:
/// self terms weighted `1/M_d^2`, the cross term `2/(M_S M_T)`. This equals
/// the integral of `|f_S(t) - f_T(t)|^2` of the empirical characteristic
/// functions exactly.
pub fn cfd_point(zs: &FeatureBatch, zt: &FeatureBatch, a: f64) -> Result<f64> {
    if zs.n() != zt.n() {
        return Err(CqError::Shape(format!(
            "dimension mismatch {} vs {}",
            zs.n(),
            zt.n()
        )));
    }
    if !a.is_finite() || a <= 0.0 {
        return Err(CqError::InvalidArgument(format!(
            "box half-width a must be positive, got {a}"
        )));
    }
    let ms = zs.m() as f64;
    let mt = zt.m() as f64;
    let mut ss = 0.0;
    for p in zs.rows() {
        for q in zs.rows() {
            ss += cf_kernel(p, q, a)?;
        }
    }
    let mut tt = 0.0;
    for p in zt.rows() {
        for q in zt.rows() {
            tt += cf_kernel(p, q, a)?;
        }
    }
    let mut st = 0.0;
    for p in zs.rows() {
        for q in zt.rows() {
            st += cf_kernel(p, q, a)?;
        }
    }
    Ok(ss / (ms * ms) + tt / (mt * mt) - 2.0 * st / (ms * mt))
}

/// Sliced CF distance: the mean of per-coordinate 1-D CF distances.
pub fn sliced_cfd(zs: &FeatureBatch, zt: &FeatureBatch, a: f64) -> Result<f64> {
    if zs.n() != zt.n() {
        return Err(CqError::Shape(format!(
            "dimension mismatch {} vs {}",
            zs.n(),
            zt.n()
        )));
    }
    let n = zs.n();
    let mut sum = 0.0;
    for i in 0..n {
        let s = FeatureBatch::new(zs.column(i).into_iter().map(|x| vec![x]).collect())?;
        let t = FeatureBatch::new(zt.column(i).into_iter().map(|x| vec![x]).collect())?;
        sum += cfd_point(&s, &t, a)?;
    }
    Ok(sum / n as f64)
}

/// Squared distance between batch means.
pub fn mean_loss(zs: &FeatureBatch, zt: &FeatureBatch) -> Result<f64> {
    if zs.n() != zt.n() {
        return Err(CqError::Shape(format!(
            "dimension mismatch {} vs {}",
            zs.n(),
            zt.n()
        )));
    }
    let mu_s = zs.mean();
    let mu_t = zt.mean();
    Ok(mu_s
        .iter()
        .zip(&mu_t)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// `beta1 * sliced_cfd + beta2 * mean_loss`.
pub fn cfd_loss(
    zs: &FeatureBatch,
    zt: &FeatureBatch,
    a: f64,
    beta1: f64,
    beta2: f64,
) -> Result<f64> {
    if beta1 < 0.0 || beta2 < 0.0 {
        return Err(CqError::InvalidArgument(format!(
            "beta weights must be non-negative, got ({beta1}, {beta2})"
        )));
    }
    Ok(beta1 * sliced_cfd(zs, zt, a)? + beta2 * mean_loss(zs, zt)?)
}

/// Analytic gradient of [`cfd_point`] with respect to the flattened entries
/// of `zs` (row-major).
pub fn grad_cfd_point_zs(zs: &FeatureBatch, zt: &FeatureBatch, a: f64) -> Result<Vec<f64>> {
    if zs.n() != zt.n() {
        return Err(CqError::Shape("dimension mismatch".into()));
    }
    let ms = zs.m() as f64;
    let mt = zt.m() as f64;
    let n = zs.n();
    let mut g = vec![0.0; zs.m() * n];
    for (p, zp) in zs.rows().iter().enumerate() {
        for d in 0..n {
            let mut acc = 0.0;
            // self term: k(z_p, z_q) appears at (p,q) and (q,p)
            for zq in zs.rows() {
                let mut prod = 1.0;
                for k in 0..n {
                    if k != d {
                        prod *= kernel_term(zp[k] - zq[k], a);
                    }
                }
                acc += 2.0 / (ms * ms) * prod * kernel_term_deriv(zp[d] - zq[d], a);
            }
            // cross term
            for zq in zt.rows() {
                let mut prod = 1.0;
                for k in 0..n {
                    if k != d {
                        prod *= kernel_term(zp[k] - zq[k], a);
                    }
                }
                acc -= 2.0 / (ms * mt) * prod * kernel_term_deriv(zp[d] - zq[d], a);
            }
            g[p * n + d] = acc;
        }
    }
    Ok(g)
}

/// Analytic gradient of [`mean_loss`] with respect to the flattened entries
/// of `zs` (row-major).
pub fn grad_mean_loss_zs(zs: &FeatureBatch, zt: &FeatureBatch) -> Result<Vec<f64>> {
    if zs.n() != zt.n() {
        return Err(CqError::Shape("dimension mismatch".into()));
    }
    let mu_s = zs.mean();
    let mu_t = zt.mean();
    let ms = zs.m() as f64;
    let n = zs.n();
    let mut g = vec![0.0; zs.m() * n];
    for p in 0..zs.m() {
        for d in 0..n {
            g[p * n + d] = 2.0 * (mu_s[d] - mu_t[d]) / ms;
        }
    }
    Ok(g)
}
