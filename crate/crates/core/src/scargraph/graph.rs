//! Surface graphs over mesh vertices with terminal and neighbor link weights,
//! and the Potts energy they define.

use std::collections::BTreeSet;

use crate::error::{CqError, Result};
use crate::volgrid::SurfaceMesh;

/// Per-node binary labeling: 1 = scar (foreground), 0 = normal wall.
pub type Labeling = Vec<u8>;

/// A graph over surface nodes. `tlink[i] = (w_fg, w_bg)` is the cost paid
/// when node `i` is labeled foreground respectively background; `nlink[e]`
/// weights the Potts disagreement penalty of edge `e`, scaled by `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGraph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    pub tlink: Vec<(f64, f64)>,
    pub nlink: Vec<f64>,
    pub lambda: f64,
}

impl SurfaceGraph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Build a graph directly from node count and undirected edges, with all
    /// weights zero.
    pub fn with_topology(node_count: usize, edges: Vec<(usize, usize)>, lambda: f64) -> Result<Self> {
        if node_count == 0 {
            return Err(CqError::EmptyInput("graph has no nodes".into()));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(CqError::InvalidArgument(format!(
                "lambda must be a non-negative real, got {lambda}"
            )));
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= node_count || b >= node_count {
                return Err(CqError::Shape(format!(
                    "edge ({a},{b}) references a node out of range (count {node_count})"
                )));
            }
            if a == b {
                return Err(CqError::InvalidArgument(format!("self-loop at node {a}")));
            }
            seen.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<(usize, usize)> = seen.into_iter().collect();
        let nlink = vec![0.0; edges.len()];
        Ok(SurfaceGraph {
            node_count,
            tlink: vec![(0.0, 0.0); node_count],
            nlink,
            edges,
            lambda,
        })
    }

    /// Weights must be finite and non-negative before the energy or the
    /// solver may touch the graph.
    pub fn validate_weights(&self) -> Result<()> {
        for (i, &(wf, wb)) in self.tlink.iter().enumerate() {
            if !wf.is_finite() || !wb.is_finite() || wf < 0.0 || wb < 0.0 {
                return Err(CqError::InvalidArgument(format!(
                    "t-link weights of node {i} are unset or invalid: ({wf}, {wb})"
                )));
            }
        }
        for (e, &w) in self.nlink.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(CqError::InvalidArgument(format!(
                    "n-link weight of edge {e} is unset or invalid: {w}"
                )));
            }
        }
        Ok(())
    }
}

/// One node per mesh vertex, one n-link per unique mesh edge, weights zero.
pub fn build_graph(mesh: &SurfaceMesh, lambda: f64) -> Result<SurfaceGraph> {
    if mesh.vertices.is_empty() {
        return Err(CqError::EmptyInput("mesh has no vertices".into()));
    }
    SurfaceGraph::with_topology(mesh.vertices.len(), mesh.edges(), lambda)
}

/// Set t-links from per-node scar probabilities as negative log-likelihoods:
/// labeling scar costs `-ln p`, labeling normal costs `-ln(1-p)`.
/// Probabilities are clamped to `[1e-6, 1-1e-6]`.
pub fn tlinks_from_probs(g: &mut SurfaceGraph, p_scar: &[f64]) -> Result<()> {
    if p_scar.len() != g.node_count() {
        return Err(CqError::Shape(format!(
            "probability count {} vs node count {}",
            p_scar.len(),
            g.node_count()
        )));
    }
    const EPS: f64 = 1e-6;
    for (slot, &p) in g.tlink.iter_mut().zip(p_scar) {
        let p = p.clamp(EPS, 1.0 - EPS);
        *slot = (-p.ln(), -(1.0 - p).ln());
    }
    Ok(())
}

/// Set n-links from per-node feature vectors:
/// `exp(-||f_i - f_j||^2 / (2 sigma^2)) / dist(i, j)` with the Euclidean
/// vertex distance in mm.
pub fn nlinks_from_similarity(
    g: &mut SurfaceGraph,
    node_features: &[Vec<f64>],
    sigma: f64,
    mesh: &SurfaceMesh,
) -> Result<()> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(CqError::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if node_features.len() != g.node_count() || mesh.vertices.len() != g.node_count() {
        return Err(CqError::Shape(
            "feature or vertex count does not match node count".into(),
        ));
    }
    let inv = 1.0 / (2.0 * sigma * sigma);
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        let dist = crate::volgrid::dist3(mesh.vertices[i], mesh.vertices[j]);
        if dist == 0.0 {
            return Err(CqError::InvalidArgument(format!(
                "coincident vertices {i} and {j}; n-link distance is zero"
            )));
        }
        let fsq: f64 = node_features[i]
            .iter()
            .zip(&node_features[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        g.nlink[e] = (-fsq * inv).exp() / dist;
    }
    Ok(())
}

/// Potts energy of a labeling:
/// `sum_i tlink_i(l_i) + lambda * sum_(i,j) nlink_ij * [l_i != l_j]`.
pub fn energy(g: &SurfaceGraph, labeling: &Labeling) -> Result<f64> {
    g.validate_weights()?;
    if labeling.len() != g.node_count() {
        return Err(CqError::Shape(format!(
            "labeling length {} vs node count {}",
            labeling.len(),
            g.node_count()
        )));
    }
    let mut t_sum = 0.0;
    for (i, &(wf, wb)) in g.tlink.iter().enumerate() {
        t_sum += if labeling[i] > 0 { wf } else { wb };
    }
    let mut n_sum = 0.0;
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        if (labeling[i] > 0) != (labeling[j] > 0) {
            n_sum += g.nlink[e];
        }
    }
    Ok(t_sum + g.lambda * n_sum)
}

/// Number of edges whose endpoints disagree (the label-map boundary length).
pub fn boundary_edge_count(g: &SurfaceGraph, labeling: &Labeling) -> usize {
    g.edges
        .iter()
        .filter(|&&(i, j)| (labeling[i] > 0) != (labeling[j] > 0))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volgrid::SurfaceMesh;

    fn triangle_mesh() -> SurfaceMesh {
        SurfaceMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn triangle_graph_shape() {
        let g = build_graph(&triangle_mesh(), 0.4).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges().len(), 3);
        assert!(g.tlink.iter().all(|&(a, b)| a == 0.0 && b == 0.0));
    }

    #[test]
    fn disjoint_triangles_give_two_components() {
        let mesh = SurfaceMesh::new(
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [5.0, 0.0, 0.0],
                [6.0, 0.0, 0.0],
                [5.0, 1.0, 0.0],
            ],
            vec![[0, 1, 2], [3, 4, 5]],
            vec![],
        )
        .unwrap();
        let g = build_graph(&mesh, 0.0).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edges().len(), 6);
        // no edge crosses the two vertex groups
        assert!(g.edges().iter().all(|&(a, b)| (a < 3) == (b < 3)));
    }

    #[test]
    fn cube_mesh_edge_count_matches_enumeration() {
        // cube made of 12 triangles over 8 vertices
        let vertices = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ];
        let triangles = vec![
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [2, 3, 7],
            [2, 7, 6],
            [1, 2, 6],
            [1, 6, 5],
            [3, 0, 4],
            [3, 4, 7],
        ];
        let mesh = SurfaceMesh::new(vertices, triangles.clone(), vec![]).unwrap();
        let g = build_graph(&mesh, 0.0).unwrap();
        // independent enumeration of unique undirected edges
        let mut set = std::collections::BTreeSet::new();
        for t in &triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                set.insert((a.min(b), a.max(b)));
            }
        }
        assert_eq!(g.edges().len(), set.len());
        assert_eq!(g.edges().len(), 18); // 12 cube edges + 6 face diagonals
    }

    #[test]
    fn tlink_probability_costs() {
        let mut g = SurfaceGraph::with_topology(3, vec![], 0.0).unwrap();
        tlinks_from_probs(&mut g, &[0.5, 0.9, 1.0]).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!((g.tlink[0].0 - ln2).abs() < 1e-12);
        assert!((g.tlink[0].1 - ln2).abs() < 1e-12);
        assert!((g.tlink[1].0 + 0.9f64.ln()).abs() < 1e-12);
        assert!((g.tlink[1].1 + 0.1f64.ln()).abs() < 1e-9);
        // clamped at 1 - 1e-6
        assert!(g.tlink[2].0 < 1e-5);
        assert!((g.tlink[2].1 + 1e-6f64.ln()).abs() < 1e-6);
        assert!(tlinks_from_probs(&mut g, &[0.5]).is_err());
    }

    #[test]
    fn nlink_similarity_and_distance() {
        let mesh = SurfaceMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]],
            vec![[0, 1, 2]],
            vec![],
        )
        .unwrap();
        let mut g = build_graph(&mesh, 1.0).unwrap();
        // identical features: weight = 1/dist
        let feats = vec![vec![5.0], vec![5.0], vec![5.0]];
        nlinks_from_similarity(&mut g, &feats, 1.0, &mesh).unwrap();
        let w01 = g.nlink[g.edges().iter().position(|&e| e == (0, 1)).unwrap()];
        let w02 = g.nlink[g.edges().iter().position(|&e| e == (0, 2)).unwrap()];
        assert!((w01 - 1.0).abs() < 1e-12);
        assert!((w02 - 0.5).abs() < 1e-12);

        // feature gap sigma at unit distance: e^{-1/2}
        let feats = vec![vec![0.0], vec![1.0], vec![0.0]];
        nlinks_from_similarity(&mut g, &feats, 1.0, &mesh).unwrap();
        let w01 = g.nlink[g.edges().iter().position(|&e| e == (0, 1)).unwrap()];
        assert!((w01 - (-0.5f64).exp()).abs() < 1e-12);
        assert!((w01 - 0.606531).abs() < 1e-5);
    }

    #[test]
    fn nlink_rejects_coincident_vertices() {
        let mesh = SurfaceMesh::new(
            vec![[0.0; 3], [0.0; 3], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
            vec![],
        )
        .unwrap();
        let mut g = build_graph(&mesh, 1.0).unwrap();
        let feats = vec![vec![0.0]; 3];
        assert!(nlinks_from_similarity(&mut g, &feats, 1.0, &mesh).is_err());
    }

    #[test]
    fn energy_enumeration_example() {
        // 2 nodes, t-links A:(1,9) B:(9,1), n-link 5, lambda 1
        let mut g = SurfaceGraph::with_topology(2, vec![(0, 1)], 1.0).unwrap();
        g.tlink[0] = (1.0, 9.0);
        g.tlink[1] = (9.0, 1.0);
        g.nlink[0] = 5.0;
        assert_eq!(energy(&g, &vec![1, 0]).unwrap(), 7.0); // 1 + 1 + 5
        assert_eq!(energy(&g, &vec![1, 1]).unwrap(), 10.0);
        assert_eq!(energy(&g, &vec![0, 1]).unwrap(), 23.0);
        assert_eq!(energy(&g, &vec![0, 0]).unwrap(), 10.0);

        // all-background labeling sums w_bg; lambda = 0 ignores n-links for
        // any labeling
        let mut h = SurfaceGraph::with_topology(2, vec![(0, 1)], 0.0).unwrap();
        h.tlink[0] = (3.0, 0.5);
        h.tlink[1] = (4.0, 0.25);
        h.nlink[0] = 100.0;
        assert_eq!(energy(&h, &vec![0, 0]).unwrap(), 0.75);
        assert_eq!(energy(&h, &vec![1, 0]).unwrap(), 3.25);
    }

    #[test]
    fn energy_rejects_unset_weights() {
        let mut g = SurfaceGraph::with_topology(2, vec![(0, 1)], 1.0).unwrap();
        g.tlink[0] = (-1.0, 0.0); // negative sentinel
        assert!(energy(&g, &vec![0, 0]).is_err());
        g.tlink[0] = (0.0, 0.0);
        g.nlink[0] = f64::NAN;
        assert!(energy(&g, &vec![0, 0]).is_err());
    }
}
