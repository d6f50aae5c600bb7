//! Surface sampling: multi-scale intensity profiles along vertex normals and
//! projection of voxel labels onto mesh vertices.

use crate::error::{CqError, Result};
use crate::volgrid::mesh::SurfaceMesh;
use crate::volgrid::volume::Volume;

/// Intensity profile of one surface node, sampled along its normal at
/// several spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub node_index: usize,
    /// Sample spacings in mm, strictly increasing.
    pub scales: Vec<f64>,
    /// One row per scale, each of length `2*half_width + 1`, centered on the
    /// node.
    pub samples: Vec<Vec<f64>>,
}

/// Sample a multi-scale profile for one mesh vertex: for each scale `s`, the
/// intensities at `vertex + k*s*normal` for `k` in `-half_width..=half_width`
/// via trilinear interpolation (out-of-volume positions read 0).
pub fn sample_msp(
    vol: &Volume,
    mesh: &SurfaceMesh,
    node: usize,
    scales: &[f64],
    half_width: usize,
) -> Result<Profile> {
    if node >= mesh.vertices.len() {
        return Err(CqError::InvalidArgument(format!(
            "node index {node} out of range (vertex count {})",
            mesh.vertices.len()
        )));
    }
    if scales.is_empty() {
        return Err(CqError::InvalidArgument("no scales given".into()));
    }
    if scales.windows(2).any(|w| w[0] >= w[1]) || scales[0] <= 0.0 {
        return Err(CqError::InvalidArgument(format!(
            "scales must be positive and strictly increasing, got {scales:?}"
        )));
    }
    if mesh.normals.len() != mesh.vertices.len() {
        return Err(CqError::Shape("mesh has no per-vertex normals".into()));
    }
    let v = mesh.vertices[node];
    let n = mesh.normals[node];
    let mut samples = Vec::with_capacity(scales.len());
    for &scale in scales {
        let mut row = Vec::with_capacity(2 * half_width + 1);
        for k in -(half_width as i64)..=(half_width as i64) {
            let t = k as f64 * scale;
            let p = [v[0] + t * n[0], v[1] + t * n[1], v[2] + t * n[2]];
            row.push(vol.sample_trilinear(p)?);
        }
        samples.push(row);
    }
    Ok(Profile {
        node_index: node,
        scales: scales.to_vec(),
        samples,
    })
}

/// Convenience: the center sample of every vertex (identical across scales).
pub fn center_intensities(vol: &Volume, mesh: &SurfaceMesh) -> Result<Vec<f64>> {
    mesh.vertices
        .iter()
        .map(|&v| vol.sample_trilinear(v))
        .collect()
}

/// Project voxel labels onto mesh vertices: each vertex takes the label of
/// the nearest labeled voxel found along its +/- normal within `radius` mm,
/// preferring the outside (+normal) direction on ties; vertices with no
/// labeled voxel in range get 0.
pub fn project_labels_to_surface(
    mask: &Volume,
    mesh: &SurfaceMesh,
    radius: f64,
) -> Result<Vec<u8>> {
    let labels = mask.label_data()?;
    if mesh.normals.len() != mesh.vertices.len() {
        return Err(CqError::Shape("mesh has no per-vertex normals".into()));
    }
    let spacing = mask.spacing();
    let step = spacing.iter().cloned().fold(f64::INFINITY, f64::min) / 4.0;
    let steps = (radius / step).floor() as i64;

    let lookup = |p: [f64; 3]| -> u8 {
        let idx = [
            (p[0] / spacing[0]).round() as i64,
            (p[1] / spacing[1]).round() as i64,
            (p[2] / spacing[2]).round() as i64,
        ];
        if mask.in_bounds(idx) {
            labels[mask.linear(idx[0] as usize, idx[1] as usize, idx[2] as usize)]
        } else {
            0
        }
    };

    let mut out = Vec::with_capacity(mesh.vertices.len());
    for (v, n) in mesh.vertices.iter().zip(&mesh.normals) {
        let mut found = 0u8;
        'walk: for s in 0..=steps {
            // outside (+normal) first so ties prefer the outside
            for sign in [1.0, -1.0] {
                if s == 0 && sign < 0.0 {
                    continue;
                }
                let t = sign * s as f64 * step;
                let p = [v[0] + t * n[0], v[1] + t * n[1], v[2] + t * n[2]];
                let l = lookup(p);
                if l > 0 {
                    found = l;
                    break 'walk;
                }
            }
        }
        out.push(found);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_mesh() -> SurfaceMesh {
        // one square in the z=2 plane, normals +z
        let vertices = vec![
            [2.0, 2.0, 2.0],
            [3.0, 2.0, 2.0],
            [3.0, 3.0, 2.0],
            [2.0, 3.0, 2.0],
        ];
        let triangles = vec![[0, 1, 2], [0, 2, 3]];
        let normals = vec![[0.0, 0.0, 1.0]; 4];
        SurfaceMesh::new(vertices, triangles, normals).unwrap()
    }

    fn ramp_volume() -> Volume {
        // f(x,y,z) = z on a 6^3 unit grid
        let mut data = Vec::new();
        for k in 0..6 {
            for _j in 0..6 {
                for _i in 0..6 {
                    data.push(k as f64);
                }
            }
        }
        Volume::scalar([6, 6, 6], [1.0; 3], data).unwrap()
    }

    #[test]
    fn constant_volume_gives_constant_profile() {
        let vol = Volume::scalar([6, 6, 6], [1.0; 3], vec![7.5; 216]).unwrap();
        let p = sample_msp(&vol, &flat_mesh(), 0, &[0.5, 1.0], 1).unwrap();
        for row in &p.samples {
            for &s in row {
                assert!((s - 7.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_ramp_profile_is_exact() {
        let p = sample_msp(&ramp_volume(), &flat_mesh(), 0, &[1.0], 1).unwrap();
        let row = &p.samples[0];
        assert_eq!(row.len(), 3);
        for (got, expect) in row.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
        }
    }

    #[test]
    fn center_sample_shared_across_scales() {
        let p = sample_msp(&ramp_volume(), &flat_mesh(), 1, &[1.0, 2.0], 2).unwrap();
        let c0 = p.samples[0][2];
        let c1 = p.samples[1][2];
        assert_eq!(c0, c1);
    }

    #[test]
    fn invalid_node_and_scales_rejected() {
        let vol = ramp_volume();
        let mesh = flat_mesh();
        assert!(sample_msp(&vol, &mesh, 99, &[1.0], 1).is_err());
        assert!(sample_msp(&vol, &mesh, 0, &[2.0, 1.0], 1).is_err());
        assert!(sample_msp(&vol, &mesh, 0, &[], 1).is_err());
    }

    #[test]
    fn projection_picks_nearest_label_along_normal() {
        // scar voxel at (2,2,3), 1 mm along +normal from vertex (2,2,2)
        let mut data = vec![0u8; 216];
        let vol0 = Volume::label([6, 6, 6], [1.0; 3], data.clone()).unwrap();
        data[vol0.linear(2, 2, 3)] = 2;
        let mask = Volume::label([6, 6, 6], [1.0; 3], data).unwrap();
        let labels = project_labels_to_surface(&mask, &flat_mesh(), 3.0).unwrap();
        assert_eq!(labels[0], 2);
        // vertex (3,3,2) is sqrt(2) away laterally; its normal ray misses
        assert_eq!(labels[2], 0);
    }

    #[test]
    fn projection_empty_mask_gives_zeros() {
        let mask = Volume::label([6, 6, 6], [1.0; 3], vec![0; 216]).unwrap();
        let labels = project_labels_to_surface(&mask, &flat_mesh(), 3.0).unwrap();
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn projection_vertex_inside_scar_voxel() {
        let mut data = vec![0u8; 216];
        let vol0 = Volume::label([6, 6, 6], [1.0; 3], data.clone()).unwrap();
        data[vol0.linear(2, 2, 2)] = 1;
        let mask = Volume::label([6, 6, 6], [1.0; 3], data).unwrap();
        let labels = project_labels_to_surface(&mask, &flat_mesh(), 3.0).unwrap();
        assert_eq!(labels[0], 1);
    }
}
