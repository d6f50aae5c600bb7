//! Explicit domain-discrepancy metrics between latent feature batches:
//! characteristic-function distances, mean matching, MMD, CORAL, diagonal
//! Gaussian KL and closed-form posterior-overlap distances.

mod batch;
mod cf;
mod compose;
mod kernels;
mod varda;

pub use batch::{read_feature_csv, write_feature_csv, FeatureBatch, GaussianBatch};
pub use cf::{
    cf_kernel, cfd_loss, cfd_point, grad_cfd_point_zs, grad_mean_loss_zs, mean_loss, sliced_cfd,
};
pub use compose::{
    compose_total, CfdnetComponents, DiscrepancyWeights, TotalScheme, VardaComponents,
};
pub use kernels::{coral_distance, grad_mmd_zs, median_heuristic_sigma, mmd_gaussian};
pub use varda::{
    grad_kl_diag_to_std, kl_diag_to_std, varda_distance, varda_kernel, varda_marginal_distance,
};
