//! Closed-form distances between mixtures of diagonal Gaussians (variational
//! posterior approximations) and the standard-normal KL prior-matching term.

use crate::discrepancy::batch::GaussianBatch;
use crate::error::{CqError, Result};

/// Mean over the batch of `KL(N(u, diag(lambda)) || N(0, I))
/// = 1/2 sum_l (u_l^2 + lambda_l - 1 - ln lambda_l)`.
pub fn kl_diag_to_std(q: &GaussianBatch) -> Result<f64> {
    let mut sum = 0.0;
    for (u, l) in q.means().iter().zip(q.vars()) {
        for (&ul, &ll) in u.iter().zip(l) {
            sum += 0.5 * (ul * ul + ll - 1.0 - ll.ln());
        }
    }
    Ok(sum / q.m() as f64)
}

/// Analytic gradient of [`kl_diag_to_std`] with respect to the flattened
/// `[means_row_major..., vars_row_major...]` parameters.
pub fn grad_kl_diag_to_std(q: &GaussianBatch) -> Vec<f64> {
    let m = q.m() as f64;
    let mut g = Vec::with_capacity(2 * q.m() * q.n());
    for u in q.means() {
        for &ul in u {
            g.push(ul / m);
        }
    }
    for l in q.vars() {
        for &ll in l {
            g.push(0.5 * (1.0 - 1.0 / ll) / m);
        }
    }
    g
}

/// Overlap integral of two diagonal Gaussians:
/// `int N(z; u_S, diag(l_S)) N(z; u_T, diag(l_T)) dz`.
pub fn varda_kernel(u_s: &[f64], l_s: &[f64], u_t: &[f64], l_t: &[f64]) -> Result<f64> {
    let n = u_s.len();
    if [l_s.len(), u_t.len(), l_t.len()].iter().any(|&l| l != n) {
        return Err(CqError::Shape("parameter length mismatch".into()));
    }
    if l_s.iter().chain(l_t).any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(CqError::InvalidArgument(
            "variances must be strictly positive".into(),
        ));
    }
    let mut expo = 0.0;
    let mut det = 1.0;
    for i in 0..n {
        let s = l_s[i] + l_t[i];
        let d = u_s[i] - u_t[i];
        expo += d * d / s;
        det *= s;
    }
    let tau = 2.0 * std::f64::consts::PI;
    Ok((-0.5 * expo).exp() / (tau.powf(n as f64 / 2.0) * det.sqrt()))
}

/// Squared L2 distance between the Gaussian-mixture posterior approximations
/// of the two domains; self terms weighted `1/M_d^2`, the cross term
/// `2/(M_S M_T)` (this reduces to the single `1/M^2` form when the batch
/// sizes agree).
pub fn varda_distance(qs: &GaussianBatch, qt: &GaussianBatch) -> Result<f64> {
    if qs.n() != qt.n() {
        return Err(CqError::Shape(format!(
            "dimension mismatch {} vs {}",
            qs.n(),
            qt.n()
        )));
    }
    let ms = qs.m() as f64;
    let mt = qt.m() as f64;
    let block = |a: &GaussianBatch, b: &GaussianBatch| -> Result<f64> {
        let mut sum = 0.0;
        for (ua, la) in a.means().iter().zip(a.vars()) {
            for (ub, lb) in b.means().iter().zip(b.vars()) {
                sum += varda_kernel(ua, la, ub, lb)?;
            }
        }
        Ok(sum)
    };
    Ok(block(qs, qs)? / (ms * ms) + block(qt, qt)? / (mt * mt)
        - 2.0 * block(qs, qt)? / (ms * mt))
}

/// Marginal substitution: the sum over coordinates of the 1-D mixture
/// distances.
pub fn varda_marginal_distance(qs: &GaussianBatch, qt: &GaussianBatch) -> Result<f64> {
    if qs.n() != qt.n() {
        return Err(CqError::Shape(format!(
            "dimension mismatch {} vs {}",
            qs.n(),
            qt.n()
        )));
    }
    let mut sum = 0.0;
    for i in 0..qs.n() {
        sum += varda_distance(&qs.coordinate(i), &qt.coordinate(i))?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(means: Vec<Vec<f64>>, vars: Vec<Vec<f64>>) -> GaussianBatch {
        GaussianBatch::new(means, vars).unwrap()
    }

    #[test]
    fn kl_closed_forms() {
        let std_normal = gauss(vec![vec![0.0]], vec![vec![1.0]]);
        assert_eq!(kl_diag_to_std(&std_normal).unwrap(), 0.0);

        let shifted = gauss(vec![vec![1.0]], vec![vec![1.0]]);
        assert!((kl_diag_to_std(&shifted).unwrap() - 0.5).abs() < 1e-15);

        let wide = gauss(vec![vec![0.0]], vec![vec![2.0]]);
        let expect = 0.5 * (2.0 - 1.0 - 2.0f64.ln());
        assert!((kl_diag_to_std(&wide).unwrap() - expect).abs() < 1e-12);
        assert!((kl_diag_to_std(&wide).unwrap() - 0.153426).abs() < 1e-5);
    }

    #[test]
    fn kl_strict_convexity_midpoint() {
        let a = gauss(vec![vec![0.7, -0.4]], vec![vec![0.8, 2.5]]);
        let b = gauss(vec![vec![-0.2, 1.1]], vec![vec![1.9, 0.4]]);
        let mid_means = vec![vec![0.25, 0.35]];
        let mid_vars = vec![vec![1.35, 1.45]];
        let mid = gauss(mid_means, mid_vars);
        let lhs = kl_diag_to_std(&mid).unwrap();
        let rhs = 0.5 * (kl_diag_to_std(&a).unwrap() + kl_diag_to_std(&b).unwrap());
        assert!(lhs < rhs, "{lhs} !< {rhs}");
    }

    #[test]
    fn kernel_closed_forms() {
        // u_S = u_T = 0, lambda = 0.5 both -> 1/sqrt(2 pi)
        let got = varda_kernel(&[0.0], &[0.5], &[0.0], &[0.5]).unwrap();
        let expect = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 0.398942).abs() < 1e-5);

        // u_T = 1 -> e^{-1/2}/sqrt(2 pi)
        let got = varda_kernel(&[0.0], &[0.5], &[1.0], &[0.5]).unwrap();
        let expect = (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 0.241971).abs() < 1e-5);

        // diagonal factorization: 2-D kernel is the product of 1-D kernels
        let k2 = varda_kernel(&[0.1, -0.7], &[0.4, 1.2], &[0.6, 0.2], &[0.9, 0.3]).unwrap();
        let k1a = varda_kernel(&[0.1], &[0.4], &[0.6], &[0.9]).unwrap();
        let k1b = varda_kernel(&[-0.7], &[1.2], &[0.2], &[0.3]).unwrap();
        assert!((k2 - k1a * k1b).abs() < 1e-14);

        // symmetry
        let a = varda_kernel(&[0.3], &[0.7], &[-1.0], &[0.2]).unwrap();
        let b = varda_kernel(&[-1.0], &[0.2], &[0.3], &[0.7]).unwrap();
        assert_eq!(a, b);

        assert!(varda_kernel(&[0.0], &[0.0], &[0.0], &[1.0]).is_err());
    }

    #[test]
    fn distance_worked_example() {
        // M = 1, n = 1, u_S = 0, u_T = 1, lambda = 0.5 both -> 0.313943
        let qs = gauss(vec![vec![0.0]], vec![vec![0.5]]);
        let qt = gauss(vec![vec![1.0]], vec![vec![0.5]]);
        let got = varda_distance(&qs, &qt).unwrap();
        assert!((got - 0.313943).abs() < 1e-6, "{got}");
        assert!(varda_distance(&qs, &qs).unwrap().abs() < 1e-12);
        // symmetry
        assert_eq!(got, varda_distance(&qt, &qs).unwrap());
    }

    #[test]
    fn marginal_reduces_and_sums() {
        let qs = gauss(vec![vec![0.0]], vec![vec![0.5]]);
        let qt = gauss(vec![vec![1.0]], vec![vec![0.5]]);
        assert_eq!(
            varda_marginal_distance(&qs, &qt).unwrap(),
            varda_distance(&qs, &qt).unwrap()
        );

        // independent coordinates: the sum of the two 1-D distances
        let qs2 = gauss(vec![vec![0.0, 3.0]], vec![vec![0.5, 0.7]]);
        let qt2 = gauss(vec![vec![1.0, 2.5]], vec![vec![0.5, 1.1]]);
        let d1 = varda_distance(&qs2.coordinate(0), &qt2.coordinate(0)).unwrap();
        let d2 = varda_distance(&qs2.coordinate(1), &qt2.coordinate(1)).unwrap();
        let got = varda_marginal_distance(&qs2, &qt2).unwrap();
        assert!((got - (d1 + d2)).abs() < 1e-14);
    }
}
