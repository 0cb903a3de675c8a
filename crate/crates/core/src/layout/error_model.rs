//! Long-range gate error and the entanglement-distillation cost model.

use serde::{Deserialize, Serialize};

use super::{LinkResource, LongRangeLink};
use crate::error::{QlutError, Result};
use crate::params::ErrorRates;

/// Error of one long-range operation over `link`.
///
/// GHZ chains fail with m·ε_Q, distilled pairs with min(m·ε_Q, ε_f), and
/// budgeted links are free.
pub fn long_range_error(link: &LongRangeLink, rates: &ErrorRates) -> f64 {
    let ghz = (link.m as f64 * rates.eps_q).min(1.0);
    match link.resource {
        LinkResource::GhzChain => ghz,
        LinkResource::DistilledBell => ghz.min(rates.eps_f),
        LinkResource::FreeBudget => 0.0,
    }
}

/// Constants of the distillation protocol; d̂ = ⌈c₁·log₂ m⌉, n̂ = d̂^pairsExponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct DistillationSettings {
    pub c1: f64,
    pub pairs_exponent: u32,
}

impl Default for DistillationSettings {
    fn default() -> Self {
        Self { c1: 1.0, pairs_exponent: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DistillationPlan {
    /// m·ε_Q, the error of one undistilled pair.
    pub initial_error: f64,
    pub code_distance: u32,
    pub pairs_consumed: u64,
    pub depth_overhead: u32,
    pub eps_f: f64,
}

pub fn distillation_model(m: u64, eps_q: f64, settings: DistillationSettings) -> Result<DistillationPlan> {
    let initial_error = m as f64 * eps_q;
    if !(0.0..1.0).contains(&initial_error) {
        return Err(QlutError::InitialErrorTooLarge(initial_error));
    }
    let code_distance = ((settings.c1 * (m.max(1) as f64).log2()).ceil() as u32).max(1);
    Ok(DistillationPlan {
        initial_error,
        code_distance,
        pairs_consumed: (code_distance as u64).pow(settings.pairs_exponent),
        depth_overhead: code_distance,
        eps_f: initial_error.powi(code_distance as i32),
    })
}
