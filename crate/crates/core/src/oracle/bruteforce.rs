//! Brute-force reference implementations: quadratic scans and exhaustive
//! enumerations that the fast paths must reproduce.

use crate::scargraph::{Labeling, SurfaceGraph};
use crate::segmetrics::PointSet;
use crate::volgrid::{Volume, NEIGHBORS_6};

/// Signed DTM by direct nearest-boundary scan: for every voxel, the minimum
/// distance over all boundary voxel centers, signed by region.
pub fn signed_dtm_bruteforce(mask: &Volume, beta: f64) -> Vec<f64> {
    let labels = mask.label_data().expect("mask must be a label volume");
    let dims = mask.dims();
    let mut boundary = Vec::new();
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let idx = mask.linear(i, j, k);
                if labels[idx] == 0 {
                    continue;
                }
                let mut on_s = false;
                for off in &NEIGHBORS_6 {
                    let p = [i as i64 + off[0], j as i64 + off[1], k as i64 + off[2]];
                    if mask.in_bounds(p)
                        && labels[mask.linear(p[0] as usize, p[1] as usize, p[2] as usize)] == 0
                    {
                        on_s = true;
                        break;
                    }
                }
                if on_s {
                    boundary.push((idx, mask.voxel_center(i, j, k)));
                }
            }
        }
    }
    let on_boundary: std::collections::HashSet<usize> =
        boundary.iter().map(|&(idx, _)| idx).collect();

    let mut phi = Vec::with_capacity(labels.len());
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let idx = mask.linear(i, j, k);
                if on_boundary.contains(&idx) {
                    phi.push(0.0);
                    continue;
                }
                let c = mask.voxel_center(i, j, k);
                let mut best = f64::INFINITY;
                for &(_, b) in &boundary {
                    let d0 = c[0] - b[0];
                    let d1 = c[1] - b[1];
                    let d2 = c[2] - b[2];
                    let d = d0 * d0 + d1 * d1 + d2 * d2;
                    if d < best {
                        best = d;
                    }
                }
                let d = best.sqrt();
                let mag = if beta == 1.0 { d } else { d.powf(beta) };
                phi.push(if labels[idx] > 0 { -mag } else { mag });
            }
        }
    }
    phi
}

/// Hausdorff distance by the full quadratic scan with per-pair square roots.
pub fn hausdorff_bruteforce(x: &PointSet, y: &PointSet) -> f64 {
    let directed = |a: &PointSet, b: &PointSet| -> f64 {
        let mut sup = 0.0f64;
        for &p in &a.points {
            let mut inf = f64::INFINITY;
            for &q in &b.points {
                let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2))
                    .sqrt();
                if d < inf {
                    inf = d;
                }
            }
            if inf > sup {
                sup = inf;
            }
        }
        sup
    };
    directed(x, y).max(directed(y, x))
}

/// Average surface distance by the full quadratic scan.
pub fn asd_bruteforce(x: &PointSet, y: &PointSet) -> f64 {
    let mean_min = |a: &PointSet, b: &PointSet| -> f64 {
        let mut sum = 0.0;
        for &p in &a.points {
            let mut inf = f64::INFINITY;
            for &q in &b.points {
                let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2))
                    .sqrt();
                if d < inf {
                    inf = d;
                }
            }
            sum += inf;
        }
        sum / a.points.len() as f64
    };
    0.5 * (mean_min(x, y) + mean_min(y, x))
}

/// Dice by explicit voxel-index set operations.
pub fn dice_bruteforce(seg: &[u8], gd: &[u8]) -> f64 {
    let a: std::collections::HashSet<usize> = seg
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (v > 0).then_some(i))
        .collect();
    let b: std::collections::HashSet<usize> = gd
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (v > 0).then_some(i))
        .collect();
    let inter = a.intersection(&b).count();
    2.0 * inter as f64 / (a.len() + b.len()) as f64
}

/// Generalized Dice by explicit per-label set operations.
pub fn gdice_bruteforce(seg: &[u8], gd: &[u8], labels: &[u8]) -> f64 {
    let mut inter = 0usize;
    let mut total = 0usize;
    for &label in labels {
        let a: std::collections::HashSet<usize> = seg
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v == label).then_some(i))
            .collect();
        let b: std::collections::HashSet<usize> = gd
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v == label).then_some(i))
            .collect();
        inter += a.intersection(&b).count();
        total += a.len() + b.len();
    }
    2.0 * inter as f64 / total as f64
}

/// Exhaustive minimum of the Potts energy over all 2^n labelings. The energy
/// summation mirrors the production order (nodes, then edges) so that equal
/// labelings produce bitwise-equal energies.
pub fn min_energy_bruteforce(g: &SurfaceGraph) -> (f64, Labeling) {
    let n = g.node_count();
    assert!(n <= 20, "exhaustive enumeration limited to small graphs");
    let mut best = f64::INFINITY;
    let mut best_labeling = vec![0u8; n];
    for bits in 0u32..(1u32 << n) {
        let labeling: Labeling = (0..n).map(|i| ((bits >> i) & 1) as u8).collect();
        let mut t_sum = 0.0;
        for (i, &(wf, wb)) in g.tlink.iter().enumerate() {
            t_sum += if labeling[i] > 0 { wf } else { wb };
        }
        let mut n_sum = 0.0;
        for (e, &(i, j)) in g.edges().iter().enumerate() {
            if (labeling[i] > 0) != (labeling[j] > 0) {
                n_sum += g.nlink[e];
            }
        }
        let energy = t_sum + g.lambda * n_sum;
        if energy < best {
            best = energy;
            best_labeling = labeling;
        }
    }
    (best, best_labeling)
}
