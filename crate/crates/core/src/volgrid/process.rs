//! Pre- and post-processing operations on volumes.

use std::collections::VecDeque;

use crate::error::{CqError, Result};
use crate::volgrid::volume::{neighbors_26, Volume, VolumeData, NEIGHBORS_6};

/// Voxel connectivity for component analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Six,
    TwentySix,
}

impl Connectivity {
    fn offsets(self) -> Vec<[i64; 3]> {
        match self {
            Connectivity::Six => NEIGHBORS_6.to_vec(),
            Connectivity::TwentySix => neighbors_26(),
        }
    }
}

/// Standardize a scalar volume to zero mean and unit population variance.
pub fn zscore_normalize(vol: &Volume) -> Result<Volume> {
    let data = vol.scalar_data()?;
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(CqError::InvalidArgument(
            "constant volume has zero variance; z-score is undefined".into(),
        ));
    }
    let std = var.sqrt();
    let out: Vec<f64> = data.iter().map(|&x| (x - mean) / std).collect();
    Volume::scalar(vol.dims(), vol.spacing(), out)
}

/// Crop a region of `size` voxels centered on `center`; regions outside the
/// input read zero. Spacing is preserved.
pub fn crop_roi(vol: &Volume, center: [i64; 3], size: [usize; 3]) -> Result<Volume> {
    if size.contains(&0) {
        return Err(CqError::InvalidArgument(format!(
            "crop size must be positive, got {size:?}"
        )));
    }
    let start: Vec<i64> = (0..3).map(|a| center[a] - (size[a] as i64) / 2).collect();
    let fetch = |i: usize, j: usize, k: usize| -> [i64; 3] {
        [
            start[0] + i as i64,
            start[1] + j as i64,
            start[2] + k as i64,
        ]
    };
    match vol.data() {
        VolumeData::Scalar(src) => {
            let mut out = Vec::with_capacity(size[0] * size[1] * size[2]);
            for k in 0..size[2] {
                for j in 0..size[1] {
                    for i in 0..size[0] {
                        let p = fetch(i, j, k);
                        out.push(if vol.in_bounds(p) {
                            src[vol.linear(p[0] as usize, p[1] as usize, p[2] as usize)]
                        } else {
                            0.0
                        });
                    }
                }
            }
            Volume::scalar(size, vol.spacing(), out)
        }
        VolumeData::Label(src) => {
            let mut out = Vec::with_capacity(size[0] * size[1] * size[2]);
            for k in 0..size[2] {
                for j in 0..size[1] {
                    for i in 0..size[0] {
                        let p = fetch(i, j, k);
                        out.push(if vol.in_bounds(p) {
                            src[vol.linear(p[0] as usize, p[1] as usize, p[2] as usize)]
                        } else {
                            0
                        });
                    }
                }
            }
            Volume::label(size, vol.spacing(), out)
        }
    }
}

/// Connected components of voxels equal to `label`, returned as vectors of
/// linear indices. Deterministic: seeds scan in linear order.
pub fn components_of_label(
    vol: &Volume,
    label: u8,
    connectivity: Connectivity,
) -> Result<Vec<Vec<usize>>> {
    let data = vol.label_data()?;
    let offsets = connectivity.offsets();
    let mut seen = vec![false; data.len()];
    let mut components = Vec::new();
    for seed in 0..data.len() {
        if data[seed] != label || seen[seed] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back(seed);
        seen[seed] = true;
        while let Some(idx) = queue.pop_front() {
            comp.push(idx);
            let c = vol.coords(idx);
            for off in &offsets {
                let p = [
                    c[0] as i64 + off[0],
                    c[1] as i64 + off[1],
                    c[2] as i64 + off[2],
                ];
                if !vol.in_bounds(p) {
                    continue;
                }
                let nidx = vol.linear(p[0] as usize, p[1] as usize, p[2] as usize);
                if data[nidx] == label && !seen[nidx] {
                    seen[nidx] = true;
                    queue.push_back(nidx);
                }
            }
        }
        components.push(comp);
    }
    Ok(components)
}

/// Keep only the largest connected component of `label` (ties broken by the
/// smallest seed linear index); voxels of other labels are untouched. An
/// absent label leaves the volume unchanged.
pub fn largest_component(vol: &Volume, label: u8, connectivity: Connectivity) -> Result<Volume> {
    let components = components_of_label(vol, label, connectivity)?;
    let mut out = vol.label_data()?.to_vec();
    if components.len() > 1 {
        // components are seeded in linear order, so max_by_key keeps the
        // earliest seed among equal sizes
        let keep = components
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap();
        for (ci, comp) in components.iter().enumerate() {
            if ci != keep {
                for &idx in comp {
                    out[idx] = 0;
                }
            }
        }
    }
    Volume::label(vol.dims(), vol.spacing(), out)
}

/// Fill interior holes of a binary mask: every background component not
/// 6-connected to the volume border becomes foreground.
pub fn fill_holes(vol: &Volume) -> Result<Volume> {
    let data = vol.label_data()?;
    if data.iter().any(|&v| v > 1) {
        return Err(CqError::InvalidArgument(
            "fill_holes expects a binary mask".into(),
        ));
    }
    let dims = vol.dims();
    let mut reach = vec![false; data.len()];
    let mut queue = VecDeque::new();
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let border = i == 0
                    || j == 0
                    || k == 0
                    || i == dims[0] - 1
                    || j == dims[1] - 1
                    || k == dims[2] - 1;
                let idx = vol.linear(i, j, k);
                if border && data[idx] == 0 && !reach[idx] {
                    reach[idx] = true;
                    queue.push_back(idx);
                }
            }
        }
    }
    while let Some(idx) = queue.pop_front() {
        let c = vol.coords(idx);
        for off in &NEIGHBORS_6 {
            let p = [
                c[0] as i64 + off[0],
                c[1] as i64 + off[1],
                c[2] as i64 + off[2],
            ];
            if !vol.in_bounds(p) {
                continue;
            }
            let nidx = vol.linear(p[0] as usize, p[1] as usize, p[2] as usize);
            if data[nidx] == 0 && !reach[nidx] {
                reach[nidx] = true;
                queue.push_back(nidx);
            }
        }
    }
    let out: Vec<u8> = data
        .iter()
        .enumerate()
        .map(|(idx, &v)| if v == 0 && !reach[idx] { 1 } else { v })
        .collect();
    Volume::label(vol.dims(), vol.spacing(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vol_from(dims: [usize; 3], data: Vec<u8>) -> Volume {
        Volume::label(dims, [1.0; 3], data).unwrap()
    }

    #[test]
    fn zscore_matches_hand_computation() {
        let vol = Volume::scalar([3, 1, 1], [1.0; 3], vec![1.0, 2.0, 3.0]).unwrap();
        let out = zscore_normalize(&vol).unwrap();
        let d = out.scalar_data().unwrap();
        // mean 2, population sigma = sqrt(2/3)
        let s = (2.0f64 / 3.0).sqrt();
        for (got, expect) in d.iter().zip([-1.0 / s, 0.0, 1.0 / s]) {
            assert!((got - expect).abs() < 1e-12);
        }
        assert!((d[0] + 1.224745).abs() < 1e-6);
    }

    #[test]
    fn zscore_idempotent_and_standardized() {
        let vol =
            Volume::scalar([2, 2, 2], [1.0; 3], vec![3.0, -1.0, 0.5, 2.0, 7.0, 1.0, 0.0, -4.0])
                .unwrap();
        let once = zscore_normalize(&vol).unwrap();
        let twice = zscore_normalize(&once).unwrap();
        let a = once.scalar_data().unwrap();
        let b = twice.scalar_data().unwrap();
        let n = a.len() as f64;
        let mean: f64 = a.iter().sum::<f64>() / n;
        let var: f64 = a.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 1e-9);
        assert!((var - 1.0).abs() < 1e-9);
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn zscore_rejects_constant_volume() {
        let vol = Volume::scalar([3, 1, 1], [1.0; 3], vec![5.0, 5.0, 5.0]).unwrap();
        assert!(zscore_normalize(&vol).is_err());
    }

    #[test]
    fn crop_full_extent_is_identity() {
        let data: Vec<u8> = (0..64).map(|i| (i % 5) as u8).collect();
        let vol = vol_from([4, 4, 4], data.clone());
        let out = crop_roi(&vol, [2, 2, 2], [4, 4, 4]).unwrap();
        assert_eq!(out.label_data().unwrap(), &data[..]);
    }

    #[test]
    fn crop_corner_zero_pads() {
        let data: Vec<u8> = (0..64).map(|i| i as u8).collect();
        let vol = vol_from([4, 4, 4], data);
        let out = crop_roi(&vol, [0, 0, 0], [2, 2, 2]).unwrap();
        let d = out.label_data().unwrap();
        // output voxel (i,j,k) maps to input (i-1, j-1, k-1)
        for k in 0..2usize {
            for j in 0..2usize {
                for i in 0..2usize {
                    let got = d[i + 2 * (j + 2 * k)];
                    let expect = if i == 1 && j == 1 && k == 1 {
                        vol.label_data().unwrap()[vol.linear(0, 0, 0)]
                    } else {
                        0
                    };
                    assert_eq!(got, expect, "at ({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn crop_rejects_zero_size() {
        let vol = vol_from([2, 2, 2], vec![0; 8]);
        assert!(crop_roi(&vol, [0, 0, 0], [0, 1, 1]).is_err());
    }

    #[test]
    fn largest_component_erases_smaller_blob() {
        // 10x1x1 line: blob of 5 at [0,5), blob of 3 at [7,10)
        let mut data = vec![0u8; 10];
        data[0..5].fill(1);
        data[7..10].fill(1);
        let vol = vol_from([10, 1, 1], data);
        let out = largest_component(&vol, 1, Connectivity::Six).unwrap();
        let d = out.label_data().unwrap();
        assert_eq!(&d[0..5], &[1, 1, 1, 1, 1]);
        assert_eq!(&d[5..10], &[0, 0, 0, 0, 0]);
        let comps = components_of_label(&out, 1, Connectivity::Six).unwrap();
        assert_eq!(comps.len(), 1);
    }

    #[test]
    fn largest_component_tie_keeps_smallest_seed() {
        let mut data = vec![0u8; 10];
        data[1] = 1;
        data[2] = 1;
        data[6] = 1;
        data[7] = 1;
        let vol = vol_from([10, 1, 1], data);
        let out = largest_component(&vol, 1, Connectivity::Six).unwrap();
        let d = out.label_data().unwrap();
        assert_eq!(d[1], 1);
        assert_eq!(d[2], 1);
        assert_eq!(d[6], 0);
        assert_eq!(d[7], 0);
    }

    #[test]
    fn largest_component_single_blob_and_absent_label() {
        let mut data = vec![0u8; 8];
        data[0] = 1;
        data[1] = 1;
        let vol = vol_from([2, 2, 2], data.clone());
        let out = largest_component(&vol, 1, Connectivity::Six).unwrap();
        assert_eq!(out.label_data().unwrap(), &data[..]);
        let out = largest_component(&vol, 7, Connectivity::Six).unwrap();
        assert_eq!(out.label_data().unwrap(), &data[..]);
    }

    #[test]
    fn largest_component_leaves_other_labels() {
        let mut data = vec![0u8; 10];
        data[0] = 1;
        data[3] = 1;
        data[4] = 1;
        data[8] = 2;
        let vol = vol_from([10, 1, 1], data);
        let out = largest_component(&vol, 1, Connectivity::Six).unwrap();
        let d = out.label_data().unwrap();
        assert_eq!(d[0], 0);
        assert_eq!(d[3], 1);
        assert_eq!(d[4], 1);
        assert_eq!(d[8], 2);
    }

    #[test]
    fn connectivity_26_bridges_diagonals() {
        let mut data = vec![0u8; 8];
        data[0] = 1; // (0,0,0)
        data[7] = 1; // (1,1,1)
        let vol = vol_from([2, 2, 2], data);
        assert_eq!(
            components_of_label(&vol, 1, Connectivity::Six).unwrap().len(),
            2
        );
        assert_eq!(
            components_of_label(&vol, 1, Connectivity::TwentySix)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn fill_holes_closes_hollow_shell() {
        let mut data = vec![1u8; 27];
        data[13] = 0; // hollow center of a 3x3x3 block
        let vol = vol_from([3, 3, 3], data);
        let out = fill_holes(&vol).unwrap();
        assert!(out.label_data().unwrap().iter().all(|&v| v == 1));
    }

    #[test]
    fn fill_holes_is_idempotent_and_monotone() {
        let mut data = vec![0u8; 125];
        let vol0 = vol_from([5, 5, 5], data.clone());
        assert_eq!(fill_holes(&vol0).unwrap().label_data().unwrap(), &data[..]);

        // solid block stays put
        for k in 1..4 {
            for j in 1..4 {
                for i in 1..4 {
                    data[i + 5 * (j + 5 * k)] = 1;
                }
            }
        }
        let vol = vol_from([5, 5, 5], data.clone());
        let once = fill_holes(&vol).unwrap();
        assert_eq!(once.label_data().unwrap(), &data[..]);
        let twice = fill_holes(&once).unwrap();
        assert_eq!(once.label_data().unwrap(), twice.label_data().unwrap());
        for (orig, filled) in data.iter().zip(once.label_data().unwrap()) {
            assert!(filled >= orig);
        }
    }
}
