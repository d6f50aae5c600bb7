//! Weighted composition of externally supplied loss components.

use crate::error::{CqError, Result};

/// Weights of the discrepancy losses and their composite totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyWeights {
    /// Mix of the sliced CF distance and the mean loss.
    pub beta1: f64,
    pub beta2: f64,
    /// CFDNet total: seg, prior, recon, explicit.
    pub alpha: [f64; 4],
    /// VarDA total: source lower bound, target lower bound, discrepancy.
    pub varda_alpha: [f64; 3],
    /// CF box half-width.
    pub a: f64,
}

impl Default for DiscrepancyWeights {
    fn default() -> Self {
        DiscrepancyWeights {
            beta1: 1.0,
            beta2: 1.0,
            alpha: [1.0; 4],
            varda_alpha: [1.0; 3],
            a: 1.0,
        }
    }
}

impl DiscrepancyWeights {
    pub fn validate(&self) -> Result<()> {
        let mut vals = vec![self.beta1, self.beta2, self.a];
        vals.extend_from_slice(&self.alpha);
        vals.extend_from_slice(&self.varda_alpha);
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(CqError::InvalidArgument(
                "non-finite discrepancy weight".into(),
            ));
        }
        if self.a <= 0.0 {
            return Err(CqError::InvalidArgument(format!(
                "box half-width a must be positive, got {}",
                self.a
            )));
        }
        Ok(())
    }
}

/// Component values of the CFDNet total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfdnetComponents {
    pub seg: f64,
    pub prior: f64,
    pub recon: f64,
    pub explicit: f64,
}

/// Component values of the VarDA total (the lower bounds enter negated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VardaComponents {
    pub lb_source: f64,
    pub lb_target: f64,
    pub discrepancy: f64,
}

/// Weighting scheme for [`compose_total`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TotalScheme {
    Cfdnet(CfdnetComponents),
    Varda(VardaComponents),
}

/// Pure weighted combination of externally supplied component values:
/// CFDNet `a1*seg + a2*prior + a3*recon + a4*explicit`;
/// VarDA `-a1*LB_S - a2*LB_T + a3*D`.
pub fn compose_total(scheme: &TotalScheme, w: &DiscrepancyWeights) -> Result<f64> {
    w.validate()?;
    let total = match scheme {
        TotalScheme::Cfdnet(c) => {
            let vals = [c.seg, c.prior, c.recon, c.explicit];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(CqError::InvalidArgument("non-finite component".into()));
            }
            w.alpha[0] * c.seg + w.alpha[1] * c.prior + w.alpha[2] * c.recon
                + w.alpha[3] * c.explicit
        }
        TotalScheme::Varda(c) => {
            let vals = [c.lb_source, c.lb_target, c.discrepancy];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(CqError::InvalidArgument("non-finite component".into()));
            }
            -w.varda_alpha[0] * c.lb_source - w.varda_alpha[1] * c.lb_target
                + w.varda_alpha[2] * c.discrepancy
        }
    };
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_and_single_component() {
        let w = DiscrepancyWeights::default();
        let zero = TotalScheme::Cfdnet(CfdnetComponents {
            seg: 0.0,
            prior: 0.0,
            recon: 0.0,
            explicit: 0.0,
        });
        assert_eq!(compose_total(&zero, &w).unwrap(), 0.0);

        let only_seg = DiscrepancyWeights {
            alpha: [1.0, 0.0, 0.0, 0.0],
            ..w
        };
        let c = TotalScheme::Cfdnet(CfdnetComponents {
            seg: 0.7,
            prior: 5.0,
            recon: 5.0,
            explicit: 5.0,
        });
        assert!((compose_total(&c, &only_seg).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn varda_total_signs() {
        let w = DiscrepancyWeights::default();
        let c = TotalScheme::Varda(VardaComponents {
            lb_source: 2.0,
            lb_target: 3.0,
            discrepancy: 0.5,
        });
        assert!((compose_total(&c, &w).unwrap() + 4.5).abs() < 1e-15);
    }

    #[test]
    fn linearity_in_each_component() {
        let w = DiscrepancyWeights {
            alpha: [0.3, 0.7, 1.1, 2.0],
            ..DiscrepancyWeights::default()
        };
        let base = CfdnetComponents {
            seg: 0.2,
            prior: -0.1,
            recon: 0.5,
            explicit: 0.9,
        };
        let f = |c: CfdnetComponents| compose_total(&TotalScheme::Cfdnet(c), &w).unwrap();
        let bumped = CfdnetComponents {
            prior: base.prior + 2.0,
            ..base
        };
        assert!((f(bumped) - f(base) - 0.7 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let w = DiscrepancyWeights::default();
        let c = TotalScheme::Varda(VardaComponents {
            lb_source: f64::INFINITY,
            lb_target: 0.0,
            discrepancy: 0.0,
        });
        assert!(compose_total(&c, &w).is_err());
    }
}
