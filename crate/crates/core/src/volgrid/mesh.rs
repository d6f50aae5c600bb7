//! Triangulated surface meshes with per-vertex normals.

use std::collections::BTreeMap;

use crate::error::{CqError, Result};

/// A triangle mesh in physical (mm) coordinates, wound so that triangle
/// normals point outward from the enclosed foreground.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub normals: Vec<[f64; 3]>,
}

impl SurfaceMesh {
    /// Validate index ranges and normal lengths. `normals` may be empty
    /// (fill them with [`vertex_normals`]).
    pub fn new(
        vertices: Vec<[f64; 3]>,
        triangles: Vec<[usize; 3]>,
        normals: Vec<[f64; 3]>,
    ) -> Result<Self> {
        let n = vertices.len();
        for t in &triangles {
            if t.iter().any(|&i| i >= n) {
                return Err(CqError::Shape(format!(
                    "triangle {t:?} references a vertex out of range (vertex count {n})"
                )));
            }
        }
        if !normals.is_empty() {
            if normals.len() != n {
                return Err(CqError::Shape(format!(
                    "normal count {} does not match vertex count {n}",
                    normals.len()
                )));
            }
            for nm in &normals {
                let len = norm3(*nm);
                if (len - 1.0).abs() > 1e-6 {
                    return Err(CqError::InvalidArgument(format!(
                        "normal {nm:?} is not unit length"
                    )));
                }
            }
        }
        Ok(SurfaceMesh {
            vertices,
            triangles,
            normals,
        })
    }

    /// Unique undirected edges (i < j), sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = std::collections::BTreeSet::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                set.insert((a.min(b), a.max(b)));
            }
        }
        set.into_iter().collect()
    }

    /// Number of triangles incident to every undirected edge.
    pub fn edge_use_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut counts = BTreeMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Every edge is shared by exactly two triangles.
    pub fn is_watertight(&self) -> bool {
        !self.triangles.is_empty() && self.edge_use_counts().values().all(|&c| c == 2)
    }

    /// V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let e = self.edges().len() as i64;
        let f = self.triangles.len() as i64;
        v - e + f
    }

    /// Enclosed volume by the divergence theorem; positive for outward
    /// winding on a closed mesh.
    pub fn signed_volume(&self) -> f64 {
        let mut six_v = 0.0;
        for t in &self.triangles {
            let a = self.vertices[t[0]];
            let b = self.vertices[t[1]];
            let c = self.vertices[t[2]];
            six_v += dot3(a, cross3(b, c));
        }
        six_v / 6.0
    }
}

/// Recompute per-vertex normals as the normalized area-weighted average of
/// incident triangle normals.
pub fn vertex_normals(mesh: &SurfaceMesh) -> Result<SurfaceMesh> {
    let mut acc = vec![[0.0f64; 3]; mesh.vertices.len()];
    for t in &mesh.triangles {
        let a = mesh.vertices[t[0]];
        let b = mesh.vertices[t[1]];
        let c = mesh.vertices[t[2]];
        // cross product magnitude is twice the triangle area, so summing the
        // raw cross products applies the area weighting
        let n = cross3(sub3(b, a), sub3(c, a));
        for &vi in t {
            for ax in 0..3 {
                acc[vi][ax] += n[ax];
            }
        }
    }
    let mut normals = Vec::with_capacity(acc.len());
    for (vi, n) in acc.iter().enumerate() {
        let len = norm3(*n);
        if len <= 0.0 {
            return Err(CqError::InvalidArgument(format!(
                "vertex {vi} has no incident triangle area; cannot orient a normal"
            )));
        }
        normals.push([n[0] / len, n[1] / len, n[2] / len]);
    }
    SurfaceMesh::new(mesh.vertices.clone(), mesh.triangles.clone(), normals)
}

#[inline]
pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub(crate) fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3(sub3(a, b))
}
