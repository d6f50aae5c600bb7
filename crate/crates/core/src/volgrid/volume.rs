//! Dense regular 3-D grids with physical voxel spacing.

use crate::error::{CqError, Result};

/// Whether a volume carries continuous intensities or integer labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeKind {
    Scalar,
    Label,
}

/// Voxel payload, one element per voxel in x-fastest order.
#[derive(Debug, Clone, PartialEq)]
pub enum VolumeData {
    Scalar(Vec<f64>),
    Label(Vec<u8>),
}

/// A regular 3-D scalar or label grid with physical spacing in mm/voxel.
///
/// Voxel `(i, j, k)` is stored at linear index `i + dims[0]*(j + dims[1]*k)`
/// and its center sits at physical position `(i*sx, j*sy, k*sz)` mm.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    dims: [usize; 3],
    spacing: [f64; 3],
    data: VolumeData,
}

impl Volume {
    /// Build a scalar volume, validating the grid invariants.
    pub fn scalar(dims: [usize; 3], spacing: [f64; 3], data: Vec<f64>) -> Result<Self> {
        Self::new(dims, spacing, VolumeData::Scalar(data))
    }

    /// Build a label volume, validating the grid invariants.
    pub fn label(dims: [usize; 3], spacing: [f64; 3], data: Vec<u8>) -> Result<Self> {
        Self::new(dims, spacing, VolumeData::Label(data))
    }

    pub fn new(dims: [usize; 3], spacing: [f64; 3], data: VolumeData) -> Result<Self> {
        if dims.contains(&0) {
            return Err(CqError::InvalidArgument(format!(
                "volume dims must be positive, got {dims:?}"
            )));
        }
        if spacing.iter().any(|&s| !s.is_finite() || s <= 0.0) {
            return Err(CqError::InvalidArgument(format!(
                "voxel spacing must be strictly positive, got {spacing:?}"
            )));
        }
        let expected = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| CqError::InvalidArgument("volume dims overflow".into()))?;
        let actual = match &data {
            VolumeData::Scalar(v) => v.len(),
            VolumeData::Label(v) => v.len(),
        };
        if expected != actual {
            return Err(CqError::Shape(format!(
                "payload length {actual} does not match dims {dims:?} (expected {expected})"
            )));
        }
        Ok(Volume { dims, spacing, data })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        false // dims are validated positive
    }

    pub fn kind(&self) -> VolumeKind {
        match self.data {
            VolumeData::Scalar(_) => VolumeKind::Scalar,
            VolumeData::Label(_) => VolumeKind::Label,
        }
    }

    pub fn data(&self) -> &VolumeData {
        &self.data
    }

    /// Scalar payload, or a shape error for label volumes.
    pub fn scalar_data(&self) -> Result<&[f64]> {
        match &self.data {
            VolumeData::Scalar(v) => Ok(v),
            VolumeData::Label(_) => Err(CqError::InvalidArgument(
                "expected a scalar volume, got a label volume".into(),
            )),
        }
    }

    /// Label payload, or a shape error for scalar volumes.
    pub fn label_data(&self) -> Result<&[u8]> {
        match &self.data {
            VolumeData::Label(v) => Ok(v),
            VolumeData::Scalar(_) => Err(CqError::InvalidArgument(
                "expected a label volume, got a scalar volume".into(),
            )),
        }
    }

    /// Linear index of voxel `(i, j, k)`; caller guarantees bounds.
    #[inline]
    pub fn linear(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    /// Voxel coordinates of a linear index.
    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let j = (idx / self.dims[0]) % self.dims[1];
        let k = idx / (self.dims[0] * self.dims[1]);
        [i, j, k]
    }

    #[inline]
    pub fn in_bounds(&self, p: [i64; 3]) -> bool {
        (0..3).all(|a| p[a] >= 0 && (p[a] as usize) < self.dims[a])
    }

    /// Physical position (mm) of a voxel center.
    #[inline]
    pub fn voxel_center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            i as f64 * self.spacing[0],
            j as f64 * self.spacing[1],
            k as f64 * self.spacing[2],
        ]
    }

    /// Same grid shape and spacing as another volume.
    pub fn same_grid(&self, other: &Volume) -> bool {
        self.dims == other.dims && self.spacing == other.spacing
    }

    /// Trilinear interpolation of a scalar volume at a physical point (mm).
    /// Sample positions outside the grid read 0.
    pub fn sample_trilinear(&self, p: [f64; 3]) -> Result<f64> {
        let data = self.scalar_data()?;
        let q: Vec<f64> = (0..3).map(|a| p[a] / self.spacing[a]).collect();
        let base: Vec<i64> = q.iter().map(|&x| x.floor() as i64).collect();
        let frac: Vec<f64> = (0..3).map(|a| q[a] - base[a] as f64).collect();

        let mut acc = 0.0;
        for corner in 0..8usize {
            let mut w = 1.0;
            let mut idx = [0i64; 3];
            for a in 0..3 {
                let hi = (corner >> a) & 1;
                idx[a] = base[a] + hi as i64;
                w *= if hi == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if w == 0.0 {
                continue;
            }
            let v = if self.in_bounds(idx) {
                data[self.linear(idx[0] as usize, idx[1] as usize, idx[2] as usize)]
            } else {
                0.0
            };
            acc += w * v;
        }
        Ok(acc)
    }
}

/// Offsets of the six face neighbors.
pub const NEIGHBORS_6: [[i64; 3]; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];

/// Offsets of the 26 face, edge and corner neighbors.
pub fn neighbors_26() -> Vec<[i64; 3]> {
    let mut out = Vec::with_capacity(26);
    for dz in -1i64..=1 {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx != 0 || dy != 0 || dz != 0 {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dims_and_spacing() {
        assert!(Volume::scalar([0, 1, 1], [1.0; 3], vec![]).is_err());
        assert!(Volume::scalar([1, 1, 1], [0.0, 1.0, 1.0], vec![1.0]).is_err());
        assert!(Volume::scalar([1, 1, 1], [-1.0, 1.0, 1.0], vec![1.0]).is_err());
        assert!(Volume::scalar([2, 2, 2], [1.0; 3], vec![0.0; 7]).is_err());
    }

    #[test]
    fn trilinear_is_exact_on_linear_fields() {
        // f(x, y, z) = 2x - 3y + z + 5 sampled on voxel centers, anisotropic spacing
        let dims = [5, 4, 3];
        let spacing = [0.7, 1.3, 2.0];
        let mut data = Vec::new();
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let p = [
                        i as f64 * spacing[0],
                        j as f64 * spacing[1],
                        k as f64 * spacing[2],
                    ];
                    data.push(2.0 * p[0] - 3.0 * p[1] + p[2] + 5.0);
                }
            }
        }
        let vol = Volume::scalar(dims, spacing, data).unwrap();
        let p = [1.23, 2.11, 1.97];
        let expect = 2.0 * p[0] - 3.0 * p[1] + p[2] + 5.0;
        let got = vol.sample_trilinear(p).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn out_of_bounds_reads_zero() {
        let vol = Volume::scalar([2, 2, 2], [1.0; 3], vec![3.0; 8]).unwrap();
        assert_eq!(vol.sample_trilinear([-5.0, 0.0, 0.0]).unwrap(), 0.0);
        // halfway outside mixes with zeros
        let v = vol.sample_trilinear([-0.5, 0.0, 0.0]).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
    }
}
