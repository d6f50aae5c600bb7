//! Marching-cubes isosurface extraction from binary masks.

use std::collections::HashMap;

use crate::error::{CqError, Result};
use crate::volgrid::mesh::{vertex_normals, SurfaceMesh};
use crate::volgrid::tables::{CORNER_OFFSETS, EDGE_CORNERS, TRIANGLE_TABLE};
use crate::volgrid::volume::Volume;

/// Extract the isovalue-0.5 surface of a binary mask as a watertight,
/// consistently oriented triangle mesh in physical (mm) coordinates.
///
/// The grid is padded by one zero voxel on every side, so foreground touching
/// the border still produces a closed mesh. On a binary field every surface
/// crossing is at an edge midpoint; ambiguous saddle configurations are
/// resolved by the case table, which is an approximation of the trilinear
/// topology but keeps neighboring cells consistent.
pub fn extract_isosurface(mask: &Volume) -> Result<SurfaceMesh> {
    let labels = mask.label_data()?;
    if labels.iter().all(|&v| v == 0) {
        return Err(CqError::EmptyInput("mask has no foreground".into()));
    }
    let dims = mask.dims();
    let spacing = mask.spacing();
    // padded grid points: original voxel (i,j,k) lives at padded (i+1,j+1,k+1)
    let pd = [dims[0] + 2, dims[1] + 2, dims[2] + 2];
    let value = |p: [usize; 3]| -> f64 {
        if (0..3).any(|a| p[a] == 0 || p[a] > dims[a]) {
            0.0
        } else {
            let idx = mask.linear(p[0] - 1, p[1] - 1, p[2] - 1);
            if labels[idx] > 0 {
                1.0
            } else {
                0.0
            }
        }
    };
    let point_linear = |p: [usize; 3]| p[0] + pd[0] * (p[1] + pd[1] * p[2]);

    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut edge_vertex: HashMap<(usize, u8), usize> = HashMap::new();

    for z in 0..pd[2] - 1 {
        for y in 0..pd[1] - 1 {
            for x in 0..pd[0] - 1 {
                let cell = [x, y, z];
                let mut corner_vals = [0.0f64; 8];
                let mut cube_index = 0usize;
                for (c, off) in CORNER_OFFSETS.iter().enumerate() {
                    let p = [cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]];
                    corner_vals[c] = value(p);
                    if corner_vals[c] < 0.5 {
                        cube_index |= 1 << c;
                    }
                }
                if cube_index == 0 || cube_index == 255 {
                    continue;
                }
                let row = &TRIANGLE_TABLE[cube_index];
                let mut tri = [0usize; 3];
                let mut filled = 0;
                for &e in row.iter() {
                    if e < 0 {
                        break;
                    }
                    let [c0, c1] = EDGE_CORNERS[e as usize];
                    let p0 = offset_point(cell, CORNER_OFFSETS[c0]);
                    let p1 = offset_point(cell, CORNER_OFFSETS[c1]);
                    let axis = (0..3).find(|&a| p0[a] != p1[a]).unwrap() as u8;
                    let lo = if point_linear(p0) <= point_linear(p1) {
                        p0
                    } else {
                        p1
                    };
                    let key = (point_linear(lo), axis);
                    let vi = *edge_vertex.entry(key).or_insert_with(|| {
                        // binary field: the crossing is exactly the midpoint
                        let pos = [
                            ((p0[0] + p1[0]) as f64 / 2.0 - 1.0) * spacing[0],
                            ((p0[1] + p1[1]) as f64 / 2.0 - 1.0) * spacing[1],
                            ((p0[2] + p1[2]) as f64 / 2.0 - 1.0) * spacing[2],
                        ];
                        vertices.push(pos);
                        vertices.len() - 1
                    });
                    tri[filled] = vi;
                    filled += 1;
                    if filled == 3 {
                        // the table winds triangles facing the low-value side,
                        // which is the background; that is already outward
                        triangles.push(tri);
                        filled = 0;
                    }
                }
            }
        }
    }

    let mesh = SurfaceMesh::new(vertices, triangles, vec![])?;
    vertex_normals(&mesh)
}

fn offset_point(cell: [usize; 3], off: [usize; 3]) -> [usize; 3] {
    [cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]]
}
