//! Numerical-integration oracles, independent of the closed-form metric
//! implementations they verify.

use crate::discrepancy::{FeatureBatch, GaussianBatch};

/// Adaptive Simpson quadrature with an absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fb, fm, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1)
    }
}

/// Squared modulus of the difference of the two empirical characteristic
/// functions at frequency `t` (1-D batches).
fn ecf_sq_diff(zs: &[f64], zt: &[f64], t: f64) -> f64 {
    let mean_cs = |z: &[f64]| {
        let mut c = 0.0;
        let mut s = 0.0;
        for &x in z {
            c += (t * x).cos();
            s += (t * x).sin();
        }
        (c / z.len() as f64, s / z.len() as f64)
    };
    let (cs, ss) = mean_cs(zs);
    let (ct, st) = mean_cs(zt);
    (cs - ct) * (cs - ct) + (ss - st) * (ss - st)
}

/// `int_{-a}^{a} |f_S(t) - f_T(t)|^2 dt` for 1-D batches by adaptive
/// quadrature.
pub fn cfd_quadrature_1d(zs: &FeatureBatch, zt: &FeatureBatch, a: f64, tol: f64) -> f64 {
    let s: Vec<f64> = zs.column(0);
    let t: Vec<f64> = zt.column(0);
    adaptive_simpson(&|freq| ecf_sq_diff(&s, &t, freq), -a, a, tol)
}

/// The same integral over the box `[-a,a]^2` for 2-D batches, by a composite
/// Simpson tensor grid with `points` nodes per axis (odd).
pub fn cfd_quadrature_2d(zs: &FeatureBatch, zt: &FeatureBatch, a: f64, points: usize) -> f64 {
    assert!(points >= 3 && points % 2 == 1, "need an odd node count");
    let h = 2.0 * a / (points - 1) as f64;
    let weight = |i: usize| -> f64 {
        if i == 0 || i == points - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let ecf = |z: &FeatureBatch, t0: f64, t1: f64| -> (f64, f64) {
        let mut c = 0.0;
        let mut s = 0.0;
        for r in z.rows() {
            let phase = t0 * r[0] + t1 * r[1];
            c += phase.cos();
            s += phase.sin();
        }
        (c / z.m() as f64, s / z.m() as f64)
    };
    let mut sum = 0.0;
    for i in 0..points {
        let t0 = -a + i as f64 * h;
        for j in 0..points {
            let t1 = -a + j as f64 * h;
            let (cs, ss) = ecf(zs, t0, t1);
            let (ct, st) = ecf(zt, t0, t1);
            let v = (cs - ct) * (cs - ct) + (ss - st) * (ss - st);
            sum += weight(i) * weight(j) * v;
        }
    }
    sum * h * h / 9.0
}

fn gauss_pdf(x: f64, u: f64, var: f64) -> f64 {
    let d = x - u;
    (-0.5 * d * d / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// `int N(z; u1, l1) N(z; u2, l2) dz` for 1-D Gaussians by quadrature.
pub fn gaussian_product_integral_1d(u1: f64, l1: f64, u2: f64, l2: f64, tol: f64) -> f64 {
    let spread = 10.0 * (l1.max(l2)).sqrt();
    let lo = u1.min(u2) - spread;
    let hi = u1.max(u2) + spread;
    adaptive_simpson(&|z| gauss_pdf(z, u1, l1) * gauss_pdf(z, u2, l2), lo, hi, tol)
}

/// `int N2(z; u1, diag l1) N2(z; u2, diag l2) dz` for 2-D diagonal Gaussians
/// by a composite Simpson tensor grid.
pub fn gaussian_product_integral_2d(
    u1: &[f64; 2],
    l1: &[f64; 2],
    u2: &[f64; 2],
    l2: &[f64; 2],
    points: usize,
) -> f64 {
    assert!(points >= 3 && points % 2 == 1);
    let bounds = |axis: usize| {
        let spread = 8.0 * l1[axis].max(l2[axis]).sqrt();
        (
            u1[axis].min(u2[axis]) - spread,
            u1[axis].max(u2[axis]) + spread,
        )
    };
    let (x_lo, x_hi) = bounds(0);
    let (y_lo, y_hi) = bounds(1);
    let hx = (x_hi - x_lo) / (points - 1) as f64;
    let hy = (y_hi - y_lo) / (points - 1) as f64;
    let weight = |i: usize| -> f64 {
        if i == 0 || i == points - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut sum = 0.0;
    for i in 0..points {
        let x = x_lo + i as f64 * hx;
        for j in 0..points {
            let y = y_lo + j as f64 * hy;
            let f1 = gauss_pdf(x, u1[0], l1[0]) * gauss_pdf(y, u1[1], l1[1]);
            let f2 = gauss_pdf(x, u2[0], l2[0]) * gauss_pdf(y, u2[1], l2[1]);
            sum += weight(i) * weight(j) * f1 * f2;
        }
    }
    sum * hx * hy / 9.0
}

/// `int (q_S(z) - q_T(z))^2 dz` for two 1-D mixtures of Gaussians given by
/// per-sample means and variances.
pub fn mixture_l2_quadrature_1d(qs: &GaussianBatch, qt: &GaussianBatch, tol: f64) -> f64 {
    let mixture = |q: &GaussianBatch, z: f64| -> f64 {
        let mut acc = 0.0;
        for (u, l) in q.means().iter().zip(q.vars()) {
            acc += gauss_pdf(z, u[0], l[0]);
        }
        acc / q.m() as f64
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for q in [qs, qt] {
        for (u, l) in q.means().iter().zip(q.vars()) {
            lo = lo.min(u[0] - 10.0 * l[0].sqrt());
            hi = hi.max(u[0] + 10.0 * l[0].sqrt());
        }
    }
    adaptive_simpson(
        &|z| {
            let d = mixture(qs, z) - mixture(qt, z);
            d * d
        },
        lo,
        hi,
        tol,
    )
}
