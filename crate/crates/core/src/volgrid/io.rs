//! File I/O: the "cqvol" volume format and a Wavefront-OBJ subset for meshes.
//!
//! A cqvol volume is a pair of files: `<name>.json` holding the header and
//! `<name>.raw` holding the payload as little-endian values in x-fastest
//! order (f32 for scalar volumes, u8 for label volumes).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CqError, Result};
use crate::volgrid::mesh::SurfaceMesh;
use crate::volgrid::volume::{Volume, VolumeData};

#[derive(Debug, Serialize, Deserialize)]
struct CqvolHeader {
    dims: [usize; 3],
    spacing: [f64; 3],
    kind: String,
    dtype: String,
    data: String,
}

/// Read a volume from a `.json` cqvol header (payload path is resolved
/// relative to the header's directory).
pub fn read_volume(path: &Path) -> Result<Volume> {
    let text = fs::read_to_string(path)
        .map_err(|e| CqError::Format(format!("cannot read {}: {e}", path.display())))?;
    let header: CqvolHeader = serde_json::from_str(&text)
        .map_err(|e| CqError::Format(format!("bad cqvol header {}: {e}", path.display())))?;
    if header.spacing.iter().any(|&s| !s.is_finite() || s <= 0.0) {
        return Err(CqError::Format(format!(
            "non-positive spacing in {}",
            path.display()
        )));
    }
    let raw_path = sibling(path, &header.data);
    let raw = fs::read(&raw_path)
        .map_err(|e| CqError::Format(format!("cannot read {}: {e}", raw_path.display())))?;
    let count = header
        .dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| CqError::Format("dims overflow".into()))?;

    let data = match (header.kind.as_str(), header.dtype.as_str()) {
        ("scalar", "f32") => {
            if raw.len() != count * 4 {
                return Err(CqError::Format(format!(
                    "payload size {} does not match dims {:?} (expected {} bytes)",
                    raw.len(),
                    header.dims,
                    count * 4
                )));
            }
            let vals: Vec<f64> = raw
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
                .collect();
            VolumeData::Scalar(vals)
        }
        ("label", "u8") => {
            if raw.len() != count {
                return Err(CqError::Format(format!(
                    "payload size {} does not match dims {:?} (expected {count} bytes)",
                    raw.len(),
                    header.dims,
                )));
            }
            VolumeData::Label(raw)
        }
        (k, d) => {
            return Err(CqError::Format(format!(
                "unknown kind/dtype combination {k:?}/{d:?}"
            )))
        }
    };
    Volume::new(header.dims, header.spacing, data)
}

/// Write a volume as a cqvol pair next to `path` (which names the `.json`).
///
/// Scalar payloads are stored as f32; values must be representable (reading
/// back a written file always reproduces the written payload bit-exactly).
pub fn write_volume(path: &Path, vol: &Volume) -> Result<()> {
    let raw_name = raw_file_name(path)?;
    let header = CqvolHeader {
        dims: vol.dims(),
        spacing: vol.spacing(),
        kind: match vol.data() {
            VolumeData::Scalar(_) => "scalar".into(),
            VolumeData::Label(_) => "label".into(),
        },
        dtype: match vol.data() {
            VolumeData::Scalar(_) => "f32".into(),
            VolumeData::Label(_) => "u8".into(),
        },
        data: raw_name.clone(),
    };
    let raw: Vec<u8> = match vol.data() {
        VolumeData::Scalar(v) => v
            .iter()
            .flat_map(|&x| (x as f32).to_le_bytes())
            .collect(),
        VolumeData::Label(v) => v.clone(),
    };
    let json = serde_json::to_string_pretty(&header)
        .map_err(|e| CqError::Format(format!("header serialization: {e}")))?;
    fs::write(path, json)?;
    fs::write(sibling(path, &raw_name), raw)?;
    Ok(())
}

fn raw_file_name(json_path: &Path) -> Result<String> {
    let stem = json_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CqError::Format(format!("bad volume path {}", json_path.display())))?;
    Ok(format!("{stem}.raw"))
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    match path.parent() {
        Some(dir) => dir.join(name),
        None => PathBuf::from(name),
    }
}

/// Write a mesh as Wavefront OBJ using only `v`, `vn` and `f` lines.
pub fn write_obj(path: &Path, mesh: &SurfaceMesh) -> Result<()> {
    let mut out = String::new();
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", v[0], v[1], v[2]));
    }
    for n in &mesh.normals {
        out.push_str(&format!("vn {} {} {}\n", n[0], n[1], n[2]));
    }
    for t in &mesh.triangles {
        out.push_str(&format!(
            "f {}//{} {}//{} {}//{}\n",
            t[0] + 1,
            t[0] + 1,
            t[1] + 1,
            t[1] + 1,
            t[2] + 1,
            t[2] + 1
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read the `v`/`vn`/`f` subset of Wavefront OBJ written by [`write_obj`].
pub fn read_obj(path: &Path) -> Result<SurfaceMesh> {
    let text = fs::read_to_string(path)
        .map_err(|e| CqError::Format(format!("cannot read {}: {e}", path.display())))?;
    let mut vertices = Vec::new();
    let mut normals = Vec::new();
    let mut triangles = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let tag = match it.next() {
            Some(t) => t,
            None => continue,
        };
        let bad = |msg: &str| CqError::Format(format!("OBJ line {}: {msg}", lineno + 1));
        match tag {
            "v" | "vn" => {
                let mut p = [0.0f64; 3];
                for slot in &mut p {
                    *slot = it
                        .next()
                        .ok_or_else(|| bad("missing coordinate"))?
                        .parse()
                        .map_err(|_| bad("bad coordinate"))?;
                }
                if tag == "v" {
                    vertices.push(p);
                } else {
                    normals.push(p);
                }
            }
            "f" => {
                let mut t = [0usize; 3];
                for slot in &mut t {
                    let field = it.next().ok_or_else(|| bad("missing face index"))?;
                    let first = field.split('/').next().unwrap_or("");
                    let idx: usize = first.parse().map_err(|_| bad("bad face index"))?;
                    if idx == 0 {
                        return Err(bad("face indices are 1-based"));
                    }
                    *slot = idx - 1;
                }
                triangles.push(t);
            }
            _ => continue, // ignore comments and unsupported records
        }
    }
    SurfaceMesh::new(vertices, triangles, normals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn roundtrip_scalar_bit_exact() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("vol.json");
        let data: Vec<f64> = (0..24).map(|i| (i as f32 * 0.37 - 1.5) as f64).collect();
        let vol = Volume::scalar([2, 3, 4], [0.7, 0.75, 2.0], data).unwrap();
        write_volume(&p, &vol).unwrap();
        let back = read_volume(&p).unwrap();
        assert_eq!(vol, back);
    }

    #[test]
    fn roundtrip_label() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("mask.json");
        let vol = Volume::label([3, 2, 1], [1.0; 3], vec![0, 1, 2, 0, 1, 3]).unwrap();
        write_volume(&p, &vol).unwrap();
        assert_eq!(read_volume(&p).unwrap(), vol);
    }

    #[test]
    fn payload_size_mismatch_is_an_error() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("vol.json");
        let header = r#"{"dims":[2,2,2],"spacing":[1.0,1.0,1.0],"kind":"label","dtype":"u8","data":"vol.raw"}"#;
        std::fs::write(&p, header).unwrap();
        std::fs::write(dir.path().join("vol.raw"), vec![0u8; 7]).unwrap();
        let err = read_volume(&p).unwrap_err();
        assert!(matches!(err, CqError::Format(_)), "{err}");
    }

    #[test]
    fn handbuilt_single_voxel_label() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("one.json");
        std::fs::write(
            &p,
            r#"{"dims":[1,1,1],"spacing":[1.0,1.0,1.0],"kind":"label","dtype":"u8","data":"one.raw"}"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("one.raw"), vec![3u8]).unwrap();
        let vol = read_volume(&p).unwrap();
        assert_eq!(vol.label_data().unwrap(), &[3]);
    }

    #[test]
    fn unknown_kind_is_an_error() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("vol.json");
        std::fs::write(
            &p,
            r#"{"dims":[1,1,1],"spacing":[1.0,1.0,1.0],"kind":"complex","dtype":"f32","data":"vol.raw"}"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("vol.raw"), vec![0u8; 4]).unwrap();
        assert!(read_volume(&p).is_err());
    }

    #[test]
    fn nonpositive_spacing_rejected_on_read() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("vol.json");
        std::fs::write(
            &p,
            r#"{"dims":[1,1,1],"spacing":[0.0,1.0,1.0],"kind":"label","dtype":"u8","data":"vol.raw"}"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("vol.raw"), vec![1u8]).unwrap();
        assert!(read_volume(&p).is_err());
    }
}
