//! Signed distance transforms and the closed-form loss family built on them,
//! with finite-difference gradient verification.

mod dtm;
mod grad;
mod losses;

pub use dtm::{prob_from_dtm, signed_dtm, DistanceField};
pub use grad::{
    grad_bce, grad_check, grad_cross_entropy, grad_l1_mean, grad_sa_loss, grad_se_loss_la,
    grad_se_loss_scar, grad_soft_dice,
};
pub use losses::{
    atrialjsqnet_total, bce_loss, bce_loss_slices, cross_entropy_loss, cross_entropy_slices,
    cross_entropy_slices_unchecked, ddfseg_seg_loss, l1_mean_loss, sa_loss, sa_loss_slices,
    se_loss_la, se_loss_la_slices, se_loss_scar, se_loss_scar_slices, soft_dice_loss,
    soft_dice_loss_slices, JointLossComponents, LossWeights, ProbPair, DICE_EPS, LOG_EPS,
};
