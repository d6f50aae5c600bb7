//! Scar quantification by energy minimization on LA surface graphs: graph
//! construction, pluggable weight providers and an exact min-cut solver.

mod graph;
mod maxflow;
mod providers;
mod quantify;

pub use graph::{
    boundary_edge_count, build_graph, energy, nlinks_from_similarity, tlinks_from_probs, Labeling,
    SurfaceGraph,
};
pub use maxflow::{min_cut_solve, min_cut_solve_detailed, MinCutSolution};
pub use providers::{otsu_threshold, read_probability_csv, two_sd_threshold, write_labeling_csv};
pub use quantify::{quantify_scar, MspConfig, QuantifyResult, ScarProvider};
