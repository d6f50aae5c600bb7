//! Signed distance transform maps of binary masks.

use crate::error::{CqError, Result};
use crate::volgrid::{Volume, NEIGHBORS_6};

/// A signed distance field phi over a volume grid: `-d^beta` strictly inside
/// the mask, `0` on the boundary set S (foreground voxels with a background
/// 6-neighbor) and `+d^beta` outside, where `d` is the exact Euclidean
/// distance in mm to the nearest boundary voxel center.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    grid: Volume,
    beta: f64,
}

impl DistanceField {
    pub fn grid(&self) -> &Volume {
        &self.grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn phi(&self) -> &[f64] {
        self.grid.scalar_data().expect("distance field is scalar")
    }
}

/// Compute the signed distance transform map of a binary mask.
///
/// Exact: squared distances are propagated by the separable lower-envelope
/// transform along each axis, which handles anisotropic spacing.
pub fn signed_dtm(mask: &Volume, beta: f64) -> Result<DistanceField> {
    if !beta.is_finite() {
        return Err(CqError::InvalidArgument("beta must be finite".into()));
    }
    let labels = mask.label_data()?;
    let fg_count = labels.iter().filter(|&&v| v > 0).count();
    if fg_count == 0 {
        return Err(CqError::EmptyInput("mask is all background".into()));
    }
    if fg_count == labels.len() {
        return Err(CqError::EmptyInput("mask is all foreground".into()));
    }

    let boundary = boundary_voxels(mask, labels);
    let sq = squared_edt(mask, &boundary);

    let mut phi = Vec::with_capacity(labels.len());
    for (idx, &sq_dist) in sq.iter().enumerate() {
        let d = sq_dist.sqrt();
        let mag = if beta == 1.0 { d } else { d.powf(beta) };
        let v = if boundary[idx] {
            0.0
        } else if labels[idx] > 0 {
            -mag
        } else {
            mag
        };
        phi.push(v);
    }
    Ok(DistanceField {
        grid: Volume::scalar(mask.dims(), mask.spacing(), phi)?,
        beta,
    })
}

/// Pointwise `exp(-|phi|)` probability map of a distance field.
pub fn prob_from_dtm(field: &DistanceField) -> Result<Volume> {
    let p: Vec<f64> = field.phi().iter().map(|&x| (-x.abs()).exp()).collect();
    Volume::scalar(field.grid.dims(), field.grid.spacing(), p)
}

/// Marks foreground voxels that have at least one background 6-neighbor.
fn boundary_voxels(mask: &Volume, labels: &[u8]) -> Vec<bool> {
    let dims = mask.dims();
    let mut s = vec![false; labels.len()];
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let idx = mask.linear(i, j, k);
                if labels[idx] == 0 {
                    continue;
                }
                for off in &NEIGHBORS_6 {
                    let p = [i as i64 + off[0], j as i64 + off[1], k as i64 + off[2]];
                    if mask.in_bounds(p)
                        && labels[mask.linear(p[0] as usize, p[1] as usize, p[2] as usize)] == 0
                    {
                        s[idx] = true;
                        break;
                    }
                }
            }
        }
    }
    s
}

/// Exact squared Euclidean distance (mm^2) of every voxel to the nearest
/// seed voxel center, by three 1-D lower-envelope passes.
fn squared_edt(vol: &Volume, seeds: &[bool]) -> Vec<f64> {
    let dims = vol.dims();
    let spacing = vol.spacing();
    let mut g: Vec<f64> = seeds
        .iter()
        .map(|&s| if s { 0.0 } else { f64::INFINITY })
        .collect();

    let mut line: Vec<f64> = Vec::new();
    let mut out_line: Vec<f64> = Vec::new();

    // x-axis
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            line.clear();
            for i in 0..dims[0] {
                line.push(g[vol.linear(i, j, k)]);
            }
            dt_line(&line, spacing[0], &mut out_line);
            for i in 0..dims[0] {
                g[vol.linear(i, j, k)] = out_line[i];
            }
        }
    }
    // y-axis
    for k in 0..dims[2] {
        for i in 0..dims[0] {
            line.clear();
            for j in 0..dims[1] {
                line.push(g[vol.linear(i, j, k)]);
            }
            dt_line(&line, spacing[1], &mut out_line);
            for j in 0..dims[1] {
                g[vol.linear(i, j, k)] = out_line[j];
            }
        }
    }
    // z-axis
    for j in 0..dims[1] {
        for i in 0..dims[0] {
            line.clear();
            for k in 0..dims[2] {
                line.push(g[vol.linear(i, j, k)]);
            }
            dt_line(&line, spacing[2], &mut out_line);
            for k in 0..dims[2] {
                g[vol.linear(i, j, k)] = out_line[k];
            }
        }
    }
    g
}

/// 1-D squared distance transform with sample positions `i * spacing`:
/// `out[i] = min_j ((i-j)^2 spacing^2 + f[j])`.
fn dt_line(f: &[f64], spacing: f64, out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, f64::INFINITY);

    let mut hull: Vec<usize> = Vec::with_capacity(n); // parabola indices
    let mut breaks: Vec<f64> = Vec::with_capacity(n + 1); // hull[i] optimal on (breaks[i], breaks[i+1])

    for q in 0..n {
        if f[q].is_infinite() {
            continue;
        }
        let pq = q as f64 * spacing;
        loop {
            match hull.last() {
                None => {
                    hull.push(q);
                    breaks.clear();
                    breaks.push(f64::NEG_INFINITY);
                    breaks.push(f64::INFINITY);
                    break;
                }
                Some(&p) => {
                    let pp = p as f64 * spacing;
                    // intersection of the parabolas rooted at pp and pq
                    let s = ((f[q] + pq * pq) - (f[p] + pp * pp)) / (2.0 * (pq - pp));
                    if s <= breaks[hull.len() - 1] {
                        hull.pop();
                        breaks.pop();
                    } else {
                        *breaks.last_mut().unwrap() = s;
                        hull.push(q);
                        breaks.push(f64::INFINITY);
                        break;
                    }
                }
            }
        }
    }
    if hull.is_empty() {
        return; // whole line unreachable
    }
    let mut seg = 0usize;
    for (i, slot) in out.iter_mut().enumerate() {
        let x = i as f64 * spacing;
        while breaks[seg + 1] < x {
            seg += 1;
        }
        let p = hull[seg];
        let pp = p as f64 * spacing;
        *slot = (x - pp) * (x - pp) + f[p];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_worked_example() {
        // mask [0,0,1,1,0]: both foreground voxels are boundary
        let mask = Volume::label([5, 1, 1], [1.0; 3], vec![0, 0, 1, 1, 0]).unwrap();
        let field = signed_dtm(&mask, 1.0).unwrap();
        let expect = [2.0, 1.0, 0.0, 0.0, 1.0];
        for (got, want) in field.phi().iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn boundary_voxels_are_zero_and_interior_negative() {
        let mask = Volume::label([5, 1, 1], [1.0; 3], vec![0, 1, 1, 1, 0]).unwrap();
        let field = signed_dtm(&mask, 1.0).unwrap();
        let phi = field.phi();
        assert_eq!(phi[1], 0.0);
        assert_eq!(phi[3], 0.0);
        assert_eq!(phi[2], -1.0); // interior voxel, 1 mm from either boundary voxel
    }

    #[test]
    fn beta_two_squares_magnitudes() {
        let mask = Volume::label([5, 1, 1], [1.0; 3], vec![0, 0, 1, 1, 0]).unwrap();
        let f1 = signed_dtm(&mask, 1.0).unwrap();
        let f2 = signed_dtm(&mask, 2.0).unwrap();
        for (a, b) in f1.phi().iter().zip(f2.phi()) {
            assert!((a.abs() * a.abs() - b.abs()).abs() < 1e-12);
            assert_eq!(a.signum(), b.signum());
        }
    }

    #[test]
    fn spacing_aware_distances() {
        let mask = Volume::label([3, 1, 1], [2.5, 1.0, 1.0], vec![0, 0, 1]).unwrap();
        let field = signed_dtm(&mask, 1.0).unwrap();
        assert!((field.phi()[0] - 5.0).abs() < 1e-12);
        assert!((field.phi()[1] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_masks_are_errors() {
        let all_fg = Volume::label([2, 2, 2], [1.0; 3], vec![1; 8]).unwrap();
        let all_bg = Volume::label([2, 2, 2], [1.0; 3], vec![0; 8]).unwrap();
        assert!(signed_dtm(&all_fg, 1.0).is_err());
        assert!(signed_dtm(&all_bg, 1.0).is_err());
    }

    #[test]
    fn prob_map_values() {
        let mask = Volume::label([5, 1, 1], [1.0; 3], vec![0, 0, 1, 1, 0]).unwrap();
        let field = signed_dtm(&mask, 1.0).unwrap();
        let p = prob_from_dtm(&field).unwrap();
        let d = p.scalar_data().unwrap();
        assert!((d[2] - 1.0).abs() < 1e-15); // phi = 0
        assert!((d[1] - (-1.0f64).exp()).abs() < 1e-12);
        assert!((d[0] - (-2.0f64).exp()).abs() < 1e-12);
        assert!(d.iter().all(|&x| x > 0.0 && x <= 1.0));
    }
}
