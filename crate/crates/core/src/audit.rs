//! Working-precision recommendation from small-size condition numbers.
//!
//! `log10 cond(V)` is measured at a few small sizes, fitted linearly in `L`
//! (quadratically for the interacting chain), extrapolated to the target
//! size, and `P = ceil(log10 cond) + 20` digits are recommended.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig, log10_condition_number};
use crate::manybody::{build_interacting, ManyBodySpec};
use crate::models::{build, ModelSpec};
use crate::mp::Precision;

/// Digits added on top of the predicted loss.
pub const HEADROOM_DIGITS: u32 = 20;
/// Largest allowed misfit of any probe, in decades.
pub const MAX_FIT_RESIDUAL: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AuditModel {
    Single(ModelSpec),
    Interacting(ManyBodySpec),
}

impl AuditModel {
    fn quadratic(&self) -> bool {
        matches!(self, AuditModel::Interacting(_))
    }

    /// Eigenvector condition number of the model resized to `l` sites (the
    /// interacting chain keeps its filling fraction).
    pub fn log10_condition_at(&self, l: usize, ctx: Precision) -> Result<f64> {
        let h = match self {
            AuditModel::Single(spec) => build(&spec.with_sites(l), ctx)?,
            AuditModel::Interacting(spec) => {
                let n = ((spec.n * l) as f64 / spec.l as f64).round() as usize;
                build_interacting(&ManyBodySpec { l, n, ..spec.clone() }, ctx)?
            }
        };
        let s = eig(&h)?;
        log10_condition_number(&s.right_vectors)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// `(L, log10 cond)` per probe.
    pub probes: Vec<(usize, f64)>,
    /// Fit in `x = L` or `x = L^2`.
    pub quadratic: bool,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub target: usize,
    pub extrapolated_log10_cond: f64,
    /// Predicted digits lost, `N`.
    pub lost_digits: u32,
    pub recommended_digits: u32,
}

/// Fits probe data and recommends `P = N + 20`.
pub fn recommend(probes: &[(usize, f64)], target: usize, quadratic: bool) -> Result<AuditReport> {
    if probes.len() < 3 {
        return Err(Error::FitFailure(format!("need at least 3 probe sizes, got {}", probes.len())));
    }
    if probes.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::FitFailure("a probe condition number is infinite".into()));
    }
    let xf = |l: usize| if quadratic { (l * l) as f64 } else { l as f64 };
    let x: Vec<f64> = probes.iter().map(|p| xf(p.0)).collect();
    let y: Vec<f64> = probes.iter().map(|p| p.1).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitFailure("probe sizes must differ".into()));
    }
    let slope = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let max_residual = x.iter().zip(&y).map(|(a, b)| (intercept + slope * a - b).abs()).fold(0.0, f64::max);
    if max_residual > MAX_FIT_RESIDUAL {
        return Err(Error::FitFailure(format!("fit misses a probe by {max_residual:.2} decades")));
    }
    let extrapolated = intercept + slope * xf(target);
    // a perfectly conditioned model extrapolates to ~0 up to round-off
    let lost_digits = (extrapolated - 1e-6).ceil().max(0.0) as u32;
    Ok(AuditReport {
        probes: probes.to_vec(),
        quadratic,
        slope,
        intercept,
        max_residual,
        target,
        extrapolated_log10_cond: extrapolated,
        lost_digits,
        recommended_digits: lost_digits + HEADROOM_DIGITS,
    })
}

/// Measures every probe size at `probe_ctx` and extrapolates to `target`.
pub fn audit_precision(model: &AuditModel, probe_sizes: &[usize], target: usize, probe_ctx: Precision) -> Result<AuditReport> {
    let probes = probe_sizes
        .iter()
        .map(|&l| model.log10_condition_at(l, probe_ctx).map(|c| (l, c)))
        .collect::<Result<Vec<_>>>()?;
    recommend(&probes, target, model.quadratic())
}
