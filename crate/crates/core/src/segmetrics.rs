//! Segmentation evaluation metrics over label volumes and point sets:
//! Dice, generalized Dice, accuracy, Hausdorff and average surface distance.

use crate::error::{CqError, Result};
use crate::volgrid::{Volume, NEIGHBORS_6};

/// A set of 3-D points in mm.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<[f64; 3]>,
}

impl PointSet {
    pub fn new(points: Vec<[f64; 3]>) -> Result<Self> {
        if points
            .iter()
            .any(|p| p.iter().any(|x| !x.is_finite()))
        {
            return Err(CqError::InvalidArgument(
                "point set contains non-finite coordinates".into(),
            ));
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Binary classification counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// Tally counts for two equally sized binary label slices.
    pub fn from_binary(seg: &[u8], gd: &[u8]) -> Result<Self> {
        if seg.len() != gd.len() {
            return Err(CqError::Shape(format!(
                "length mismatch {} vs {}",
                seg.len(),
                gd.len()
            )));
        }
        let mut c = ConfusionCounts {
            tp: 0,
            tn: 0,
            fp: 0,
            fn_: 0,
        };
        for (&s, &g) in seg.iter().zip(gd) {
            match (s > 0, g > 0) {
                (true, true) => c.tp += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        Ok(c)
    }
}

/// (TP + TN) / (TP + FP + FN + TN).
pub fn accuracy(c: &ConfusionCounts) -> Result<f64> {
    let total = c.total();
    if total == 0 {
        return Err(CqError::EmptyInput("all confusion counts are zero".into()));
    }
    Ok((c.tp + c.tn) as f64 / total as f64)
}

/// Physical coordinates of all foreground voxels with at least one background
/// 6-neighbor; the grid border counts as background.
pub fn boundary_points(mask: &Volume) -> Result<PointSet> {
    let data = mask.label_data()?;
    if data.iter().all(|&v| v == 0) {
        return Err(CqError::EmptyInput("mask has no foreground".into()));
    }
    let dims = mask.dims();
    let mut points = Vec::new();
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                if data[mask.linear(i, j, k)] == 0 {
                    continue;
                }
                let mut is_boundary = false;
                for off in &NEIGHBORS_6 {
                    let p = [i as i64 + off[0], j as i64 + off[1], k as i64 + off[2]];
                    if !mask.in_bounds(p) {
                        is_boundary = true; // border counts as background
                        break;
                    }
                    if data[mask.linear(p[0] as usize, p[1] as usize, p[2] as usize)] == 0 {
                        is_boundary = true;
                        break;
                    }
                }
                if is_boundary {
                    points.push(mask.voxel_center(i, j, k));
                }
            }
        }
    }
    PointSet::new(points)
}

/// Dice overlap of two binary label slices.
pub fn dice_slices(seg: &[u8], gd: &[u8]) -> Result<f64> {
    if seg.len() != gd.len() {
        return Err(CqError::Shape(format!(
            "length mismatch {} vs {}",
            seg.len(),
            gd.len()
        )));
    }
    let mut inter = 0u64;
    let mut a = 0u64;
    let mut b = 0u64;
    for (&s, &g) in seg.iter().zip(gd) {
        let sf = s > 0;
        let gf = g > 0;
        a += sf as u64;
        b += gf as u64;
        inter += (sf && gf) as u64;
    }
    if a + b == 0 {
        return Err(CqError::EmptyInput(
            "both masks are empty; Dice is undefined".into(),
        ));
    }
    Ok(2.0 * inter as f64 / (a + b) as f64)
}

/// Dice overlap of two binary volumes on the same grid.
pub fn dice(seg: &Volume, gd: &Volume) -> Result<f64> {
    require_same_grid(seg, gd)?;
    dice_slices(seg.label_data()?, gd.label_data()?)
}

/// Generalized Dice pooled over `labels`:
/// `2 * sum_k |S_k ^ G_k| / sum_k (|S_k| + |G_k|)`.
pub fn gdice_slices(seg: &[u8], gd: &[u8], labels: &[u8]) -> Result<f64> {
    if seg.len() != gd.len() {
        return Err(CqError::Shape(format!(
            "length mismatch {} vs {}",
            seg.len(),
            gd.len()
        )));
    }
    if labels.is_empty() {
        return Err(CqError::InvalidArgument("no labels given".into()));
    }
    let mut inter = 0u64;
    let mut total = 0u64;
    for &label in labels {
        for (&s, &g) in seg.iter().zip(gd) {
            let sf = s == label;
            let gf = g == label;
            total += sf as u64 + gf as u64;
            inter += (sf && gf) as u64;
        }
    }
    if total == 0 {
        return Err(CqError::EmptyInput(
            "all classes empty in both volumes; GDice is undefined".into(),
        ));
    }
    Ok(2.0 * inter as f64 / total as f64)
}

/// Generalized Dice for two label volumes on the same grid.
pub fn gdice(seg: &Volume, gd: &Volume, labels: &[u8]) -> Result<f64> {
    require_same_grid(seg, gd)?;
    gdice_slices(seg.label_data()?, gd.label_data()?, labels)
}

/// Hausdorff distance: `max(sup_x inf_y d, sup_y inf_x d)` in mm.
pub fn hausdorff(x: &PointSet, y: &PointSet) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(CqError::EmptyInput(
            "Hausdorff distance needs non-empty point sets".into(),
        ));
    }
    Ok(directed_max_sq(x, y).max(directed_max_sq(y, x)).sqrt())
}

/// Average surface distance: symmetric mean of nearest-neighbor distances.
pub fn asd(x: &PointSet, y: &PointSet) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(CqError::EmptyInput(
            "average surface distance needs non-empty point sets".into(),
        ));
    }
    Ok(0.5 * (directed_mean(x, y) + directed_mean(y, x)))
}

fn sq_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

fn directed_max_sq(x: &PointSet, y: &PointSet) -> f64 {
    let mut worst = 0.0f64;
    for &p in &x.points {
        let mut best = f64::INFINITY;
        for &q in &y.points {
            let d = sq_dist(p, q);
            if d < best {
                best = d;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

fn directed_mean(x: &PointSet, y: &PointSet) -> f64 {
    let mut sum = 0.0;
    for &p in &x.points {
        let mut best = f64::INFINITY;
        for &q in &y.points {
            let d = sq_dist(p, q);
            if d < best {
                best = d;
            }
        }
        sum += best.sqrt();
    }
    sum / x.points.len() as f64
}

fn require_same_grid(a: &Volume, b: &Volume) -> Result<()> {
    if !a.same_grid(b) {
        return Err(CqError::Shape(format!(
            "volumes are on different grids: dims {:?}/{:?}, spacing {:?}/{:?}",
            a.dims(),
            b.dims(),
            a.spacing(),
            b.spacing()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vol(dims: [usize; 3], data: Vec<u8>) -> Volume {
        Volume::label(dims, [1.0; 3], data).unwrap()
    }

    #[test]
    fn dice_identical_and_disjoint() {
        let a = vol([4, 1, 1], vec![1, 1, 0, 0]);
        let b = vol([4, 1, 1], vec![0, 0, 1, 1]);
        assert_eq!(dice(&a, &a).unwrap(), 1.0);
        assert_eq!(dice(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn dice_half_overlap() {
        // |A| = 4, |B| = 4, overlap 2 -> 0.5
        let a = vol([8, 1, 1], vec![1, 1, 1, 1, 0, 0, 0, 0]);
        let b = vol([8, 1, 1], vec![0, 0, 1, 1, 1, 1, 0, 0]);
        assert_eq!(dice(&a, &b).unwrap(), 0.5);
    }

    #[test]
    fn dice_errors() {
        let a = vol([2, 1, 1], vec![0, 0]);
        assert!(dice(&a, &a).is_err()); // both empty
        let b = vol([3, 1, 1], vec![0, 0, 1]);
        assert!(dice(&a, &b).is_err()); // dims mismatch
    }

    #[test]
    fn gdice_identical_is_one_and_mixed_case() {
        let a = vol([4, 1, 1], vec![1, 2, 0, 2]);
        assert_eq!(gdice(&a, &a, &[1, 2]).unwrap(), 1.0);

        // label 1 perfect on 10 voxels, label 2 disjoint 10 vs 10 -> 0.5
        let mut s = vec![0u8; 40];
        let mut g = vec![0u8; 40];
        for i in 0..10 {
            s[i] = 1;
            g[i] = 1;
        }
        s[10..20].fill(2);
        g[20..30].fill(2);
        let sv = vol([40, 1, 1], s);
        let gv = vol([40, 1, 1], g);
        assert_eq!(gdice(&sv, &gv, &[1, 2]).unwrap(), 0.5);
    }

    #[test]
    fn gdice_single_label_reduces_to_dice() {
        let a = vol([8, 1, 1], vec![1, 1, 1, 1, 0, 0, 0, 0]);
        let b = vol([8, 1, 1], vec![0, 0, 1, 1, 1, 1, 0, 0]);
        assert_eq!(
            gdice(&a, &b, &[1]).unwrap(),
            dice(&a, &b).unwrap()
        );
    }

    #[test]
    fn accuracy_cases() {
        let perfect = ConfusionCounts { tp: 8, tn: 2, fp: 0, fn_: 0 };
        assert_eq!(accuracy(&perfect).unwrap(), 1.0);
        let mixed = ConfusionCounts { tp: 3, tn: 3, fp: 2, fn_: 2 };
        assert!((accuracy(&mixed).unwrap() - 0.6).abs() < 1e-15);
        let wrong = ConfusionCounts { tp: 0, tn: 0, fp: 1, fn_: 1 };
        assert_eq!(accuracy(&wrong).unwrap(), 0.0);
        let empty = ConfusionCounts { tp: 0, tn: 0, fp: 0, fn_: 0 };
        assert!(accuracy(&empty).is_err());
    }

    #[test]
    fn accuracy_swap_invariance() {
        let c = ConfusionCounts { tp: 5, tn: 2, fp: 3, fn_: 1 };
        let swapped = ConfusionCounts { tp: 2, tn: 5, fp: 1, fn_: 3 };
        assert_eq!(accuracy(&c).unwrap(), accuracy(&swapped).unwrap());
    }

    #[test]
    fn boundary_of_solid_block_is_its_shell() {
        let mut data = vec![0u8; 125];
        let v0 = vol([5, 5, 5], data.clone());
        for k in 1..4 {
            for j in 1..4 {
                for i in 1..4 {
                    data[v0.linear(i, j, k)] = 1;
                }
            }
        }
        let mask = vol([5, 5, 5], data);
        let pts = boundary_points(&mask).unwrap();
        assert_eq!(pts.len(), 26); // 3^3 block minus its single interior voxel
    }

    #[test]
    fn boundary_single_voxel_and_empty() {
        let mut data = vec![0u8; 27];
        data[13] = 1;
        let mask = vol([3, 3, 3], data);
        let pts = boundary_points(&mask).unwrap();
        assert_eq!(pts.points, vec![[1.0, 1.0, 1.0]]);
        assert!(boundary_points(&vol([2, 2, 2], vec![0; 8])).is_err());
    }

    #[test]
    fn hausdorff_and_asd_basics() {
        let x = PointSet::new(vec![[0.0, 0.0, 0.0]]).unwrap();
        let y = PointSet::new(vec![[3.0, 4.0, 0.0]]).unwrap();
        assert_eq!(hausdorff(&x, &x).unwrap(), 0.0);
        assert_eq!(hausdorff(&x, &y).unwrap(), 5.0);
        let z = PointSet::new(vec![[0.0, 0.0, 2.0]]).unwrap();
        assert_eq!(asd(&x, &z).unwrap(), 2.0);
        assert_eq!(asd(&x, &x).unwrap(), 0.0);
        let empty = PointSet::new(vec![]).unwrap();
        assert!(hausdorff(&x, &empty).is_err());
        assert!(asd(&empty, &x).is_err());
    }
}
