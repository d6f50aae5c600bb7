//! Synthetic test volumes: digital balls and the bright-cap sphere phantom
//! used to exercise the quantification pipeline end to end.

use crate::volgrid::Volume;

/// Binary ball mask: voxels whose centers lie within `radius_mm` of the grid
/// center. Returns the mask and the center in mm.
pub fn digital_ball(dims: [usize; 3], spacing: [f64; 3], radius_mm: f64) -> (Volume, [f64; 3]) {
    let center = [
        (dims[0] as f64 - 1.0) / 2.0 * spacing[0],
        (dims[1] as f64 - 1.0) / 2.0 * spacing[1],
        (dims[2] as f64 - 1.0) / 2.0 * spacing[2],
    ];
    let mut data = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let p = [
                    i as f64 * spacing[0] - center[0],
                    j as f64 * spacing[1] - center[1],
                    k as f64 * spacing[2] - center[2],
                ];
                let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                data.push((r <= radius_mm) as u8);
            }
        }
    }
    (
        Volume::label(dims, spacing, data).expect("ball mask dims are valid"),
        center,
    )
}

/// Configuration of the bright-cap phantom: a ball mask plus an intensity
/// field that is `bright` inside a cone around `axis` and `dark` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct BrightCapConfig {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub radius_mm: f64,
    pub axis: [f64; 3],
    pub cap_angle_deg: f64,
    pub bright: f64,
    pub dark: f64,
}

impl Default for BrightCapConfig {
    fn default() -> Self {
        BrightCapConfig {
            dims: [40, 40, 40],
            spacing: [1.0; 3],
            radius_mm: 14.0,
            axis: [0.0, 0.0, 1.0],
            cap_angle_deg: 26.0,
            bright: 100.0,
            dark: 10.0,
        }
    }
}

/// The generated phantom with its geometry, for ground-truth construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BrightCapPhantom {
    pub image: Volume,
    pub mask: Volume,
    pub center: [f64; 3],
    pub axis: [f64; 3],
    pub cos_cap: f64,
    pub config: BrightCapConfig,
}

/// Build the phantom so that the intensity field realizes the known vertex
/// labels: voxels near the sphere surface take the color of their nearest
/// mesh vertex (whose ground-truth label is the cone test), voxels away from
/// the surface use the cone test directly. Surface samples therefore read
/// their own label's intensity and mix only across the true cap rim.
pub fn bright_cap_phantom(cfg: &BrightCapConfig) -> BrightCapPhantom {
    let (mask, center) = digital_ball(cfg.dims, cfg.spacing, cfg.radius_mm);
    let axis_len = (cfg.axis[0] * cfg.axis[0] + cfg.axis[1] * cfg.axis[1]
        + cfg.axis[2] * cfg.axis[2])
        .sqrt();
    let axis = [
        cfg.axis[0] / axis_len,
        cfg.axis[1] / axis_len,
        cfg.axis[2] / axis_len,
    ];
    let cos_cap = cfg.cap_angle_deg.to_radians().cos();
    let in_cone = |p: [f64; 3]| -> bool {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        r > 0.0 && (p[0] * axis[0] + p[1] * axis[1] + p[2] * axis[2]) / r >= cos_cap
    };

    let mesh = crate::volgrid::extract_isosurface(&mask).expect("ball has foreground");
    let vertex_bright: Vec<bool> = mesh
        .vertices
        .iter()
        .map(|v| in_cone([v[0] - center[0], v[1] - center[1], v[2] - center[2]]))
        .collect();

    // uniform-grid index over vertices for nearest-vertex lookups
    let max_sp = cfg.spacing.iter().cloned().fold(0.0f64, f64::max);
    let cell = 3.0 * max_sp;
    let key = |p: [f64; 3]| -> (i64, i64, i64) {
        (
            (p[0] / cell).floor() as i64,
            (p[1] / cell).floor() as i64,
            (p[2] / cell).floor() as i64,
        )
    };
    let mut buckets: std::collections::HashMap<(i64, i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    for (vi, v) in mesh.vertices.iter().enumerate() {
        buckets.entry(key(*v)).or_default().push(vi);
    }
    let nearest_vertex = |p: [f64; 3]| -> Option<usize> {
        let (kx, ky, kz) = key(p);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = buckets.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &vi in list {
                            let v = mesh.vertices[vi];
                            let d = (v[0] - p[0]) * (v[0] - p[0])
                                + (v[1] - p[1]) * (v[1] - p[1])
                                + (v[2] - p[2]) * (v[2] - p[2]);
                            if best.is_none_or(|(b, _)| d < b) {
                                best = Some((d, vi));
                            }
                        }
                    }
                }
            }
        }
        best.map(|(_, vi)| vi)
    };

    let dims = cfg.dims;
    let shell = 2.0 * max_sp;
    let mut data = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let p = [
                    i as f64 * cfg.spacing[0] - center[0],
                    j as f64 * cfg.spacing[1] - center[1],
                    k as f64 * cfg.spacing[2] - center[2],
                ];
                let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                let bright = if (r - cfg.radius_mm).abs() <= shell {
                    let world = [
                        i as f64 * cfg.spacing[0],
                        j as f64 * cfg.spacing[1],
                        k as f64 * cfg.spacing[2],
                    ];
                    match nearest_vertex(world) {
                        Some(vi) => vertex_bright[vi],
                        None => in_cone(p),
                    }
                } else {
                    in_cone(p)
                };
                data.push(if bright { cfg.bright } else { cfg.dark });
            }
        }
    }
    BrightCapPhantom {
        image: Volume::scalar(dims, cfg.spacing, data).expect("phantom dims are valid"),
        mask,
        center,
        axis,
        cos_cap,
        config: cfg.clone(),
    }
}

/// Ground-truth vertex labels for a mesh over the phantom: 1 inside the cap
/// cone, 0 elsewhere.
pub fn cap_truth_labels(mesh: &crate::volgrid::SurfaceMesh, p: &BrightCapPhantom) -> Vec<u8> {
    mesh.vertices
        .iter()
        .map(|v| {
            let d = [
                v[0] - p.center[0],
                v[1] - p.center[1],
                v[2] - p.center[2],
            ];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if r > 0.0 {
                (((d[0] * p.axis[0] + d[1] * p.axis[1] + d[2] * p.axis[2]) / r) >= p.cos_cap) as u8
            } else {
                0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volgrid::extract_isosurface;

    #[test]
    fn ball_mesh_volume_near_analytic() {
        let (mask, _) = digital_ball([16, 16, 16], [1.0; 3], 5.0);
        let mesh = extract_isosurface(&mask).unwrap();
        assert!(mesh.is_watertight());
        assert_eq!(mesh.euler_characteristic(), 2);
        let analytic = 4.0 / 3.0 * std::f64::consts::PI * 125.0;
        let got = mesh.signed_volume();
        assert!(
            (got - analytic).abs() / analytic < 0.15,
            "mesh volume {got} vs analytic {analytic}"
        );
    }

    #[test]
    fn ball_mesh_normals_roughly_radial() {
        let (mask, center) = digital_ball([16, 16, 16], [1.0; 3], 5.0);
        let mesh = extract_isosurface(&mask).unwrap();
        let limit = 25.0f64.to_radians().cos();
        for (v, n) in mesh.vertices.iter().zip(&mesh.normals) {
            let d = [v[0] - center[0], v[1] - center[1], v[2] - center[2]];
            let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let radial = [d[0] / len, d[1] / len, d[2] / len];
            let cos = n[0] * radial[0] + n[1] * radial[1] + n[2] * radial[2];
            assert!(
                cos >= limit,
                "normal {n:?} deviates more than 25 degrees from radial {radial:?}"
            );
        }
    }

    #[test]
    fn cap_fraction_matches_spherical_cap_area() {
        let p = bright_cap_phantom(&BrightCapConfig::default());
        let mesh = extract_isosurface(&p.mask).unwrap();
        let truth = cap_truth_labels(&mesh, &p);
        let frac = truth.iter().filter(|&&l| l > 0).count() as f64 / truth.len() as f64;
        // spherical cap area fraction (1 - cos theta) / 2
        let expect = (1.0 - p.cos_cap) / 2.0;
        assert!((frac - expect).abs() < 0.03, "{frac} vs {expect}");
    }
}
