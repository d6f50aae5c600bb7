//! Closed-form segmentation and quantification losses: spatial-encoding (SE)
//! and shape-attention (SA) losses over distance maps, BCE / cross-entropy /
//! soft Dice, L1 reconstruction terms and the composite totals.
//!
//! Conventions: SE and SA losses are sums over voxels as written in their
//! definitions; BCE and cross entropy are means. Probabilities are clamped at
//! `LOG_EPS` before logs; soft Dice is smoothed by `DICE_EPS`.

use crate::distfield::dtm::DistanceField;
use crate::error::{CqError, Result};
use crate::volgrid::Volume;

/// Clamp for probabilities entering a logarithm.
pub const LOG_EPS: f64 = 1e-7;
/// Smoothing constant for the soft Dice denominator.
pub const DICE_EPS: f64 = 1e-6;

/// A two-channel probability map (normal wall, scar) on a shared grid.
///
/// Targets built by [`ProbPair::from_dtms`] carry `exp(-|phi|)` values in
/// (0, 1]; predictions may be any values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbPair {
    pub p_normal: Volume,
    pub p_scar: Volume,
}

impl ProbPair {
    pub fn new(p_normal: Volume, p_scar: Volume) -> Result<Self> {
        if !p_normal.same_grid(&p_scar) {
            return Err(CqError::Shape(
                "probability channels are on different grids".into(),
            ));
        }
        for vol in [&p_normal, &p_scar] {
            if vol
                .scalar_data()?
                .iter()
                .any(|&x| !(0.0..=1.0).contains(&x))
            {
                return Err(CqError::InvalidArgument(
                    "probabilities must lie in [0, 1]".into(),
                ));
            }
        }
        Ok(ProbPair { p_normal, p_scar })
    }

    /// Build the target pair `p = exp(-|phi|)` from the two class DTMs.
    pub fn from_dtms(phi_normal: &DistanceField, phi_scar: &DistanceField) -> Result<Self> {
        let p_normal = crate::distfield::dtm::prob_from_dtm(phi_normal)?;
        let p_scar = crate::distfield::dtm::prob_from_dtm(phi_scar)?;
        ProbPair::new(p_normal, p_scar)
    }

    fn channels(&self) -> Result<(&[f64], &[f64])> {
        Ok((self.p_normal.scalar_data()?, self.p_scar.scalar_data()?))
    }
}

/// Balancing weights of the joint segmentation/quantification total loss,
/// plus the LA threshold and the CE/Dice mix of the translation seg loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub lambda_la: f64,
    pub lambda_scar: f64,
    pub lambda_m1: f64,
    pub lambda_m2: f64,
    pub t_la: f64,
    pub alpha: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            lambda_la: 1.0,
            lambda_scar: 1.0,
            lambda_m1: 1.0,
            lambda_m2: 1.0,
            t_la: 0.5,
            alpha: 1.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.lambda_la,
            self.lambda_scar,
            self.lambda_m1,
            self.lambda_m2,
            self.t_la,
            self.alpha,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(CqError::InvalidArgument("non-finite loss weight".into()));
        }
        if !(0.0 < self.t_la && self.t_la < 1.0) {
            return Err(CqError::InvalidArgument(format!(
                "T_LA must lie in (0,1), got {}",
                self.t_la
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// slice-level cores (also used by the gradient suite)
// ---------------------------------------------------------------------------

/// `sum_i (pred_i - t_la) * phi_i`; negative values reward confident correct
/// predictions.
pub fn se_loss_la_slices(pred: &[f64], phi: &[f64], t_la: f64) -> Result<f64> {
    if pred.len() != phi.len() {
        return Err(CqError::Shape(format!(
            "length mismatch {} vs {}",
            pred.len(),
            phi.len()
        )));
    }
    Ok(pred
        .iter()
        .zip(phi)
        .map(|(&y, &p)| (y - t_la) * p)
        .sum())
}

/// Mean binary cross entropy with predictions clamped to `[LOG_EPS, 1-LOG_EPS]`.
pub fn bce_loss_slices(pred: &[f64], target: &[u8]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(CqError::Shape(format!(
            "length mismatch {} vs {}",
            pred.len(),
            target.len()
        )));
    }
    let n = pred.len() as f64;
    let mut sum = 0.0;
    for (&y_hat, &y) in pred.iter().zip(target) {
        let p = y_hat.clamp(LOG_EPS, 1.0 - LOG_EPS);
        sum -= if y > 0 { p.ln() } else { (1.0 - p).ln() };
    }
    Ok(sum / n)
}

/// `1 - (2 sum(pred*y) + eps) / (sum(pred) + sum(y) + eps)`.
pub fn soft_dice_loss_slices(pred: &[f64], target: &[u8]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(CqError::Shape(format!(
            "length mismatch {} vs {}",
            pred.len(),
            target.len()
        )));
    }
    let mut inter = 0.0;
    let mut psum = 0.0;
    let mut tsum = 0.0;
    for (&p, &t) in pred.iter().zip(target) {
        let y = if t > 0 { 1.0 } else { 0.0 };
        inter += p * y;
        psum += p;
        tsum += y;
    }
    Ok(1.0 - (2.0 * inter + DICE_EPS) / (psum + tsum + DICE_EPS))
}

/// Mean `-log p_hat(true class)` without the row-normalization check; class
/// probabilities are clamped at `LOG_EPS`.
pub fn cross_entropy_slices_unchecked(probs: &[&[f64]], target: &[u8]) -> Result<f64> {
    if probs.is_empty() {
        return Err(CqError::InvalidArgument("no class channels".into()));
    }
    let n = target.len();
    for ch in probs {
        if ch.len() != n {
            return Err(CqError::Shape(format!(
                "class channel length {} vs target {}",
                ch.len(),
                n
            )));
        }
    }
    let classes = probs.len();
    let mut sum = 0.0;
    for (v, &t) in target.iter().enumerate() {
        let c = t as usize;
        if c >= classes {
            return Err(CqError::InvalidArgument(format!(
                "target label {c} outside the {classes} class channels"
            )));
        }
        sum -= probs[c][v].max(LOG_EPS).ln();
    }
    Ok(sum / n as f64)
}

/// Mean cross entropy; per-voxel class probabilities must sum to 1 within 1e-5.
pub fn cross_entropy_slices(probs: &[&[f64]], target: &[u8]) -> Result<f64> {
    if probs.is_empty() {
        return Err(CqError::InvalidArgument("no class channels".into()));
    }
    let n = target.len();
    for v in 0..n {
        let s: f64 = probs.iter().map(|ch| ch[v]).sum();
        if (s - 1.0).abs() > 1e-5 {
            return Err(CqError::InvalidArgument(format!(
                "class probabilities at voxel {v} sum to {s}, not 1"
            )));
        }
    }
    cross_entropy_slices_unchecked(probs, target)
}

/// `sum_i ||pred(x_i) - target(x_i)||^2` over both channels.
pub fn se_loss_scar_slices(
    pred_normal: &[f64],
    pred_scar: &[f64],
    tgt_normal: &[f64],
    tgt_scar: &[f64],
) -> Result<f64> {
    let n = pred_normal.len();
    if [pred_scar.len(), tgt_normal.len(), tgt_scar.len()]
        .iter()
        .any(|&l| l != n)
    {
        return Err(CqError::Shape("channel length mismatch".into()));
    }
    let mut sum = 0.0;
    for v in 0..n {
        let dn = pred_normal[v] - tgt_normal[v];
        let ds = pred_scar[v] - tgt_scar[v];
        sum += dn * dn + ds * ds;
    }
    Ok(sum)
}

/// `sum_i (m_i * ((pn_i - ps_i) - (tn_i - ts_i)))^2` where the channel
/// difference plays the role of the gradient term.
pub fn sa_loss_slices(
    pred_normal: &[f64],
    pred_scar: &[f64],
    tgt_normal: &[f64],
    tgt_scar: &[f64],
    mask: &[f64],
) -> Result<f64> {
    let n = pred_normal.len();
    if [
        pred_scar.len(),
        tgt_normal.len(),
        tgt_scar.len(),
        mask.len(),
    ]
    .iter()
    .any(|&l| l != n)
    {
        return Err(CqError::Shape("channel length mismatch".into()));
    }
    let mut sum = 0.0;
    for v in 0..n {
        let d_pred = pred_normal[v] - pred_scar[v];
        let d_tgt = tgt_normal[v] - tgt_scar[v];
        let r = mask[v] * (d_pred - d_tgt);
        sum += r * r;
    }
    Ok(sum)
}

/// Mean absolute difference `mean |a - b|`, or mean magnitude `mean |a|`
/// when `b` is omitted (the zero-loss form).
pub fn l1_mean_loss(a: &[f64], b: Option<&[f64]>) -> Result<f64> {
    if a.is_empty() {
        return Err(CqError::EmptyInput("empty array".into()));
    }
    match b {
        Some(b) => {
            if b.len() != a.len() {
                return Err(CqError::Shape(format!(
                    "length mismatch {} vs {}",
                    a.len(),
                    b.len()
                )));
            }
            Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
        }
        None => Ok(a.iter().map(|x| x.abs()).sum::<f64>() / a.len() as f64),
    }
}

// ---------------------------------------------------------------------------
// volume-level operations
// ---------------------------------------------------------------------------

/// SE loss for LA segmentation over a prediction volume and its DTM.
pub fn se_loss_la(pred: &Volume, phi: &DistanceField, t_la: f64) -> Result<f64> {
    require_same_grid(pred, phi.grid())?;
    se_loss_la_slices(pred.scalar_data()?, phi.phi(), t_la)
}

/// Mean binary cross entropy of a prediction volume against a binary target.
pub fn bce_loss(pred: &Volume, target: &Volume) -> Result<f64> {
    require_same_grid(pred, target)?;
    bce_loss_slices(pred.scalar_data()?, target.label_data()?)
}

/// Soft Dice loss of a prediction volume against a binary target.
pub fn soft_dice_loss(pred: &Volume, target: &Volume) -> Result<f64> {
    require_same_grid(pred, target)?;
    soft_dice_loss_slices(pred.scalar_data()?, target.label_data()?)
}

/// Mean cross entropy of per-class probability volumes against a label volume.
pub fn cross_entropy_loss(pred: &[Volume], target: &Volume) -> Result<f64> {
    for ch in pred {
        require_same_grid(ch, target)?;
    }
    let channels: Vec<&[f64]> = pred
        .iter()
        .map(|v| v.scalar_data())
        .collect::<Result<_>>()?;
    cross_entropy_slices(&channels, target.label_data()?)
}

/// SE loss for scar quantification between two probability pairs.
pub fn se_loss_scar(pred: &ProbPair, target: &ProbPair) -> Result<f64> {
    let (pn, ps) = pred.channels()?;
    let (tn, ts) = target.channels()?;
    se_loss_scar_slices(pn, ps, tn, ts)
}

/// SA loss between two probability pairs under an attention mask.
pub fn sa_loss(pred: &ProbPair, target: &ProbPair, mask: &Volume) -> Result<f64> {
    require_same_grid(&pred.p_normal, mask)?;
    let m = mask.label_data()?;
    if m.iter().any(|&v| v > 1) {
        return Err(CqError::InvalidArgument(
            "attention mask must be binary".into(),
        ));
    }
    let mask_f: Vec<f64> = m.iter().map(|&v| v as f64).collect();
    let (pn, ps) = pred.channels()?;
    let (tn, ts) = target.channels()?;
    sa_loss_slices(pn, ps, tn, ts, &mask_f)
}

/// Named component values of the joint total loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLossComponents {
    pub bce_la: f64,
    pub se_la: f64,
    pub se_scar: f64,
    pub sa_m1: f64,
    pub sa_m2: f64,
}

/// Total joint loss:
/// `(BCE + lambda_LA*SE_LA) + lambda_scar*SE_scar + lambda_M1*SA_M1 + lambda_M2*SA_M2`.
pub fn atrialjsqnet_total(c: &JointLossComponents, w: &LossWeights) -> Result<f64> {
    w.validate()?;
    let vals = [c.bce_la, c.se_la, c.se_scar, c.sa_m1, c.sa_m2];
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(CqError::InvalidArgument(
            "non-finite loss component".into(),
        ));
    }
    let l_la = c.bce_la + w.lambda_la * c.se_la;
    Ok(l_la + w.lambda_scar * c.se_scar + w.lambda_m1 * c.sa_m1 + w.lambda_m2 * c.sa_m2)
}

/// Translation-style segmentation loss: cross entropy plus `alpha` times the
/// mean per-class soft Dice loss.
pub fn ddfseg_seg_loss(pred: &[Volume], target: &Volume, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(CqError::InvalidArgument("alpha must be finite".into()));
    }
    let ce = cross_entropy_loss(pred, target)?;
    let labels = target.label_data()?;
    let mut dice_sum = 0.0;
    for (k, ch) in pred.iter().enumerate() {
        let indicator: Vec<u8> = labels.iter().map(|&t| (t as usize == k) as u8).collect();
        dice_sum += soft_dice_loss_slices(ch.scalar_data()?, &indicator)?;
    }
    Ok(ce + alpha * dice_sum / pred.len() as f64)
}

fn require_same_grid(a: &Volume, b: &Volume) -> Result<()> {
    if !a.same_grid(b) {
        return Err(CqError::Shape(format!(
            "volumes are on different grids: dims {:?}/{:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn se_la_worked_example() {
        // pred [1,0], T=0.5, phi [-1,2] -> -1.5
        let got = se_loss_la_slices(&[1.0, 0.0], &[-1.0, 2.0], 0.5).unwrap();
        assert!((got + 1.5).abs() < 1e-15);
        // pred == T everywhere -> 0
        assert_eq!(se_loss_la_slices(&[0.5; 4], &[1.0, -2.0, 3.0, 0.0], 0.5).unwrap(), 0.0);
        // phi == 0 -> 0 for any prediction
        assert_eq!(se_loss_la_slices(&[0.9, 0.1], &[0.0, 0.0], 0.5).unwrap(), 0.0);
    }

    #[test]
    fn se_la_superposition() {
        let phi = [0.3, -1.2, 2.0, 0.7];
        let y1 = [0.2, 0.8, 0.5, 0.1];
        let y2 = [0.9, 0.4, 0.3, 0.6];
        let t = 0.5;
        let combined: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| a + b - t).collect();
        let lhs = se_loss_la_slices(&combined, &phi, t).unwrap();
        let rhs = se_loss_la_slices(&y1, &phi, t).unwrap() + se_loss_la_slices(&y2, &phi, t).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn bce_closed_forms() {
        // perfect prediction is bounded by the clamping epsilon
        let loss = bce_loss_slices(&[1.0, 0.0], &[1, 0]).unwrap();
        assert!(loss <= -(1.0f64 - LOG_EPS).ln() + 1e-15);
        // uniform 0.5 -> ln 2
        let loss = bce_loss_slices(&[0.5; 8], &[0, 1, 0, 1, 1, 0, 1, 0]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
        // single voxel 0.9 vs 1 -> -ln 0.9
        let loss = bce_loss_slices(&[0.9], &[1]).unwrap();
        assert!((loss - 0.105360516).abs() < 1e-8);
    }

    #[test]
    fn soft_dice_limits_and_metric_consistency() {
        let target = [1u8, 1, 0, 0];
        assert!(soft_dice_loss_slices(&[1.0, 1.0, 0.0, 0.0], &target).unwrap() < 1e-5);
        assert!(soft_dice_loss_slices(&[0.0, 0.0, 1.0, 1.0], &target).unwrap() > 1.0 - 1e-5);

        // binarized predictions: 1 - soft_dice equals the Dice metric
        let pred = [1.0, 0.0, 1.0, 0.0];
        let pred_labels: Vec<u8> = pred.iter().map(|&p| (p > 0.5) as u8).collect();
        let sd = soft_dice_loss_slices(&pred, &target).unwrap();
        let d = crate::segmetrics::dice_slices(&pred_labels, &target).unwrap();
        assert!(((1.0 - sd) - d).abs() < 1e-6);
    }

    #[test]
    fn cross_entropy_closed_forms() {
        // one-hot correct
        let c0: &[f64] = &[1.0, 0.0];
        let c1: &[f64] = &[0.0, 1.0];
        let ce = cross_entropy_slices(&[c0, c1], &[0, 1]).unwrap();
        assert!(ce < 1e-6);
        // uniform over 3 classes -> ln 3
        let u: Vec<f64> = vec![1.0 / 3.0; 5];
        let ce = cross_entropy_slices(&[&u, &u, &u], &[0, 1, 2, 1, 0]).unwrap();
        assert!((ce - 3.0f64.ln()).abs() < 1e-12);
        // unnormalized rows are rejected
        let bad: &[f64] = &[0.7, 0.7];
        assert!(cross_entropy_slices(&[bad, bad], &[0, 1]).is_err());
    }

    #[test]
    fn two_class_cross_entropy_equals_bce() {
        let p = [0.9, 0.2, 0.65, 0.4];
        let target = [1u8, 0, 1, 0];
        let bg: Vec<f64> = p.iter().map(|&x| 1.0 - x).collect();
        let ce = cross_entropy_slices(&[&bg, &p], &target).unwrap();
        let bce = bce_loss_slices(&p, &target).unwrap();
        assert!((ce - bce).abs() < 1e-9);
    }

    #[test]
    fn se_scar_worked_example_and_scaling() {
        // single voxel (0.5,0.5) vs (1.0, e^{-1})
        let t_scar = (-1.0f64).exp();
        let got = se_loss_scar_slices(&[0.5], &[0.5], &[1.0], &[t_scar]).unwrap();
        assert!((got - (0.25 + (0.5 - t_scar) * (0.5 - t_scar))).abs() < 1e-12);
        assert!((got - 0.267456).abs() < 1e-5);
        // doubling voxel count doubles the loss (sum, not mean)
        let twice =
            se_loss_scar_slices(&[0.5, 0.5], &[0.5, 0.5], &[1.0, 1.0], &[t_scar, t_scar]).unwrap();
        assert!((twice - 2.0 * got).abs() < 1e-12);
        // identical pairs -> 0
        assert_eq!(se_loss_scar_slices(&[0.3], &[0.4], &[0.3], &[0.4]).unwrap(), 0.0);
    }

    #[test]
    fn sa_loss_cases() {
        // masked out -> 0
        assert_eq!(
            sa_loss_slices(&[0.9], &[0.1], &[0.2], &[0.8], &[0.0]).unwrap(),
            0.0
        );
        // equal channel differences -> 0 (dyadic values keep this exact)
        assert_eq!(
            sa_loss_slices(&[0.75], &[0.25], &[0.625], &[0.125], &[1.0]).unwrap(),
            0.0
        );
        // single voxel, grad_pred 0.2, grad_tgt -0.3 -> 0.25
        let got = sa_loss_slices(&[0.6], &[0.4], &[0.2], &[0.5], &[1.0]).unwrap();
        assert!((got - 0.25).abs() < 1e-12);
    }

    #[test]
    fn se_and_sa_losses_vanish_only_on_masked_agreement() {
        // any deviation makes se_loss_scar strictly positive
        let got = se_loss_scar_slices(&[0.3, 0.5], &[0.4, 0.2], &[0.3, 0.5], &[0.4, 0.21]).unwrap();
        assert!(got > 0.0);
        // a masked-in channel-difference deviation makes sa_loss positive,
        // the same deviation masked out does not
        let on = sa_loss_slices(&[0.6, 0.1], &[0.4, 0.1], &[0.2, 0.1], &[0.5, 0.1], &[1.0, 1.0])
            .unwrap();
        let off = sa_loss_slices(&[0.6, 0.1], &[0.4, 0.1], &[0.2, 0.1], &[0.5, 0.1], &[0.0, 1.0])
            .unwrap();
        assert!(on > 0.0);
        assert_eq!(off, 0.0);
    }

    #[test]
    fn joint_total_combination() {
        let w = LossWeights {
            lambda_la: 0.2,
            lambda_scar: 1.0,
            lambda_m1: 0.0,
            lambda_m2: 0.0,
            ..LossWeights::default()
        };
        let c = JointLossComponents {
            bce_la: 0.1,
            se_la: -0.5,
            se_scar: 0.3,
            sa_m1: 0.0,
            sa_m2: 0.0,
        };
        let total = atrialjsqnet_total(&c, &w).unwrap();
        assert!((total - 0.3).abs() < 1e-12);

        let zeros = JointLossComponents {
            bce_la: 0.0,
            se_la: 0.0,
            se_scar: 0.0,
            sa_m1: 0.0,
            sa_m2: 0.0,
        };
        assert_eq!(atrialjsqnet_total(&zeros, &LossWeights::default()).unwrap(), 0.0);

        let only_bce = LossWeights {
            lambda_la: 0.0,
            lambda_scar: 0.0,
            lambda_m1: 0.0,
            lambda_m2: 0.0,
            ..LossWeights::default()
        };
        let c2 = JointLossComponents {
            bce_la: 0.42,
            se_la: 9.0,
            se_scar: 9.0,
            sa_m1: 9.0,
            sa_m2: 9.0,
        };
        assert!((atrialjsqnet_total(&c2, &only_bce).unwrap() - 0.42).abs() < 1e-15);

        let nan = JointLossComponents {
            bce_la: f64::NAN,
            ..zeros
        };
        assert!(atrialjsqnet_total(&nan, &LossWeights::default()).is_err());
    }

    #[test]
    fn l1_cases() {
        assert_eq!(l1_mean_loss(&[1.0, 2.0], Some(&[1.0, 2.0])).unwrap(), 0.0);
        assert_eq!(l1_mean_loss(&[1.0, -3.0], None).unwrap(), 2.0);
        assert_eq!(l1_mean_loss(&[1.0, 2.0], Some(&[0.0, 4.0])).unwrap(), 1.5);
        assert!(l1_mean_loss(&[1.0], Some(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn ddfseg_seg_loss_composition() {
        let dims = [4, 1, 1];
        let sp = [1.0; 3];
        let target = Volume::label(dims, sp, vec![0, 1, 0, 1]).unwrap();
        let p1 = Volume::scalar(dims, sp, vec![0.5; 4]).unwrap();
        let pred = vec![p1.clone(), p1.clone()];

        // alpha = 0 equals plain cross entropy
        let ce = cross_entropy_loss(&pred, &target).unwrap();
        let l0 = ddfseg_seg_loss(&pred, &target, 0.0).unwrap();
        assert!((l0 - ce).abs() < 1e-15);

        // alpha = 1: add the mean per-class soft Dice computed from components
        let ind0 = [1u8, 0, 1, 0];
        let ind1 = [0u8, 1, 0, 1];
        let sd = 0.5
            * (soft_dice_loss_slices(&[0.5; 4], &ind0).unwrap()
                + soft_dice_loss_slices(&[0.5; 4], &ind1).unwrap());
        let l1 = ddfseg_seg_loss(&pred, &target, 1.0).unwrap();
        assert!((l1 - (ce + sd)).abs() < 1e-12);
        assert!((ce - std::f64::consts::LN_2).abs() < 1e-12);

        // perfect one-hot prediction is ~0
        let hot0 = Volume::scalar(dims, sp, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let hot1 = Volume::scalar(dims, sp, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let l = ddfseg_seg_loss(&[hot0, hot1], &target, 1.0).unwrap();
        assert!(l < 1e-5, "{l}");
    }
}
