//! cardioquant: a numerical toolkit for the quantitative side of cardiac
//! LGE MRI analysis.
//!
//! The crate covers five areas:
//!
//! - [`volgrid`] — volumes, meshes, I/O, pre/post-processing and surface
//!   sampling;
//! - [`segmetrics`] — evaluation metrics (Dice, GDice, accuracy, Hausdorff,
//!   average surface distance);
//! - [`distfield`] — signed distance transforms and the SE/SA/BCE/Dice/CE/L1
//!   loss family with gradient checking;
//! - [`scargraph`] — scar quantification as exact min-cut energy
//!   minimization on LA surface graphs;
//! - [`discrepancy`] — explicit domain-discrepancy metrics between latent
//!   feature batches (CF distance, MMD, CORAL, KL, Gaussian-mixture L2).
//!
//! Everything is verified against independent oracles in [`oracle`], wired
//! together by the [`selfcheck`] suite (`cardioquant selfcheck` on the CLI).

pub mod discrepancy;
pub mod distfield;
pub mod error;
pub mod oracle;
pub mod phantom;
pub mod report;
pub mod scargraph;
pub mod segmetrics;
pub mod selfcheck;
pub mod volgrid;

pub use error::{CqError, Result};
