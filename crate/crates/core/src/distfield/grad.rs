//! Central-finite-difference verification of analytic loss gradients.

use crate::distfield::losses::{DICE_EPS, LOG_EPS};
use crate::error::{CqError, Result};

/// Compare an analytic gradient against central finite differences at
/// `point`, returning `max_i |g_fd_i - g_an_i| / max(1, |g_fd_i|)`.
///
/// The loss must be smooth at `point`: keep probabilities away from the
/// clamps and L1 arguments at least `10*h` from their kinks.
pub fn grad_check<F>(loss: F, point: &[f64], analytic: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if point.len() != analytic.len() {
        return Err(CqError::Shape(format!(
            "gradient length {} vs point length {}",
            analytic.len(),
            point.len()
        )));
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(CqError::InvalidArgument("step h must be positive".into()));
    }
    let mut x = point.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let orig = x[i];
        x[i] = orig + h;
        let fp = loss(&x);
        x[i] = orig - h;
        let fm = loss(&x);
        x[i] = orig;
        if !fp.is_finite() || !fm.is_finite() || !analytic[i].is_finite() {
            return Err(CqError::InvalidArgument(
                "non-finite value encountered during the finite-difference sweep".into(),
            ));
        }
        let g_fd = (fp - fm) / (2.0 * h);
        let err = (g_fd - analytic[i]).abs() / g_fd.abs().max(1.0);
        if err > worst {
            worst = err;
        }
    }
    Ok(worst)
}

/// d/d pred of `sum (pred - t) * phi` is just `phi`.
pub fn grad_se_loss_la(phi: &[f64]) -> Vec<f64> {
    phi.to_vec()
}

/// d/d pred of the mean BCE (valid away from the clamps).
pub fn grad_bce(pred: &[f64], target: &[u8]) -> Vec<f64> {
    let n = pred.len() as f64;
    pred.iter()
        .zip(target)
        .map(|(&p, &y)| {
            if y > 0 {
                -1.0 / (p * n)
            } else {
                1.0 / ((1.0 - p) * n)
            }
        })
        .collect()
}

/// d/d pred of the soft Dice loss.
pub fn grad_soft_dice(pred: &[f64], target: &[u8]) -> Vec<f64> {
    let mut inter = 0.0;
    let mut psum = 0.0;
    let mut tsum = 0.0;
    for (&p, &t) in pred.iter().zip(target) {
        let y = if t > 0 { 1.0 } else { 0.0 };
        inter += p * y;
        psum += p;
        tsum += y;
    }
    let num = 2.0 * inter + DICE_EPS;
    let den = psum + tsum + DICE_EPS;
    pred.iter()
        .zip(target)
        .map(|(_, &t)| {
            let y = if t > 0 { 1.0 } else { 0.0 };
            -(2.0 * y * den - num) / (den * den)
        })
        .collect()
}

/// d/d probs (flattened class-major) of the mean cross entropy, ignoring the
/// simplex constraint (the finite-difference probe perturbs coordinates
/// independently, so it must pair with the unchecked evaluation).
pub fn grad_cross_entropy(probs: &[&[f64]], target: &[u8]) -> Vec<f64> {
    let n = target.len();
    let mut g = vec![0.0; probs.len() * n];
    for (v, &t) in target.iter().enumerate() {
        let c = t as usize;
        let p = probs[c][v].max(LOG_EPS);
        g[c * n + v] = -1.0 / (p * n as f64);
    }
    g
}

/// d/d pred (flattened `[normal..., scar...]`) of the SE scar loss.
pub fn grad_se_loss_scar(
    pred_normal: &[f64],
    pred_scar: &[f64],
    tgt_normal: &[f64],
    tgt_scar: &[f64],
) -> Vec<f64> {
    let mut g = Vec::with_capacity(2 * pred_normal.len());
    for (p, t) in pred_normal.iter().zip(tgt_normal) {
        g.push(2.0 * (p - t));
    }
    for (p, t) in pred_scar.iter().zip(tgt_scar) {
        g.push(2.0 * (p - t));
    }
    g
}

/// d/d pred (flattened `[normal..., scar...]`) of the SA loss.
pub fn grad_sa_loss(
    pred_normal: &[f64],
    pred_scar: &[f64],
    tgt_normal: &[f64],
    tgt_scar: &[f64],
    mask: &[f64],
) -> Vec<f64> {
    let n = pred_normal.len();
    let mut g = vec![0.0; 2 * n];
    for v in 0..n {
        let d_pred = pred_normal[v] - pred_scar[v];
        let d_tgt = tgt_normal[v] - tgt_scar[v];
        let common = 2.0 * mask[v] * mask[v] * (d_pred - d_tgt);
        g[v] = common;
        g[n + v] = -common;
    }
    g
}

/// d/d a of `mean |a - b|` (or `mean |a|`), valid away from the kinks.
pub fn grad_l1_mean(a: &[f64], b: Option<&[f64]>) -> Vec<f64> {
    let n = a.len() as f64;
    match b {
        Some(b) => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (x - y).signum() / n)
            .collect(),
        None => a.iter().map(|&x| x.signum() / n).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distfield::losses::*;

    #[test]
    fn quadratic_loss_is_exact_up_to_roundoff() {
        let point = [0.3, -1.7, 2.2];
        let loss = |x: &[f64]| x.iter().map(|v| 1.5 * v * v).sum::<f64>();
        let analytic: Vec<f64> = point.iter().map(|v| 3.0 * v).collect();
        let err = grad_check(loss, &point, &analytic, 1e-4).unwrap();
        assert!(err < 1e-8, "err {err}");
    }

    #[test]
    fn se_la_gradient_is_phi() {
        let phi = [0.4, -2.0, 1.1];
        let point = [0.2, 0.6, 0.9];
        let loss = |x: &[f64]| se_loss_la_slices(x, &phi, 0.5).unwrap();
        let err = grad_check(loss, &point, &grad_se_loss_la(&phi), 1e-4).unwrap();
        assert!(err < 1e-6, "err {err}");
    }

    #[test]
    fn wrong_gradient_is_detected() {
        let phi = [1.0, 2.0, -1.0];
        let point = [0.2, 0.6, 0.9];
        let doubled: Vec<f64> = phi.iter().map(|p| 2.0 * p).collect();
        let loss = |x: &[f64]| se_loss_la_slices(x, &phi, 0.5).unwrap();
        let err = grad_check(loss, &point, &doubled, 1e-4).unwrap();
        assert!(err > 0.5, "a x2 gradient should be flagged, err {err}");
    }

    #[test]
    fn bce_and_dice_gradients() {
        let target = [1u8, 0, 1, 0, 1];
        let pred = [0.7, 0.3, 0.55, 0.2, 0.85];
        let err = grad_check(
            |x| bce_loss_slices(x, &target).unwrap(),
            &pred,
            &grad_bce(&pred, &target),
            1e-4,
        )
        .unwrap();
        assert!(err < 1e-5, "bce err {err}");
        let err = grad_check(
            |x| soft_dice_loss_slices(x, &target).unwrap(),
            &pred,
            &grad_soft_dice(&pred, &target),
            1e-4,
        )
        .unwrap();
        assert!(err < 1e-5, "dice err {err}");
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(grad_check(|_| 0.0, &[1.0], &[1.0, 2.0], 1e-4).is_err());
    }
}
