//! Closed-form cost and infidelity evaluators with every big-O constant set to 1.
//!
//! Logarithms are base 2. Each evaluator reports the coefficient multiplying
//! each error rate, so the first-order infidelity is Σ rate × coefficient.

mod fit;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Decomposition, ResourceCounts};
use crate::error::{QlutError, Result};
use crate::layout::activation_walk;
use crate::params::{ArchParams, ErrorRates, RateKind, Readout};

pub use fit::{fit_exponent, ExponentFit};

/// Survival products of the bucket-brigade analysis, with their exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurvivalFactors {
    pub p_l: f64,
    pub p_s: f64,
    pub p_cs: f64,
    pub p_i: f64,
    pub exponent_l: u64,
    pub exponent_s: u64,
    pub exponent_cs: u64,
    pub exponent_i: u64,
}

impl SurvivalFactors {
    pub fn success(&self) -> f64 {
        self.p_l * self.p_s * self.p_cs * self.p_i
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FidelityBreakdown {
    /// Coefficient of each rate; absent kinds contribute nothing.
    pub terms_by_error_type: BTreeMap<RateKind, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub survival_factors: Option<SurvivalFactors>,
    pub total: f64,
}

impl FidelityBreakdown {
    fn new(terms: BTreeMap<RateKind, f64>, rates: &ErrorRates) -> Self {
        let total = terms.iter().map(|(k, c)| rates.get(*k) * c).sum();
        Self { terms_by_error_type: terms, survival_factors: None, total }
    }

    pub fn coefficient(&self, kind: RateKind) -> f64 {
        self.terms_by_error_type.get(&kind).copied().unwrap_or(0.0)
    }

    /// Rescales each coefficient by a per-rate constant (missing kinds keep 1)
    /// and recomputes the total.
    pub fn with_constants(&self, constants: &BTreeMap<RateKind, f64>, rates: &ErrorRates) -> Self {
        let terms =
            self.terms_by_error_type.iter().map(|(k, c)| (*k, c * constants.get(k).copied().unwrap_or(1.0))).collect();
        Self { survival_factors: self.survival_factors, ..Self::new(terms, rates) }
    }
}

fn p2(e: u32) -> f64 {
    2f64.powi(e as i32)
}

fn require_single(params: &ArchParams) -> Result<()> {
    if params.readout() != Readout::SingleBit {
        return Err(QlutError::InvalidParams("single-bit readout expected".into()));
    }
    Ok(())
}

/// Coefficients of the general single-bit theorem.
fn general_terms(params: &ArchParams) -> BTreeMap<RateKind, f64> {
    let n = params.n() as f64;
    let d = params.d() as f64;
    let dp = params.d_prime() as f64;
    let log_lambda = n - d;
    let big_n = p2(params.n());
    let reps = p2(params.d());
    let gamma = params.gamma() as f64;
    let log_gamma = params.g() as f64;
    BTreeMap::from([
        (RateKind::LongRange, gamma * reps + reps * dp),
        (RateKind::Swap, 2.0 * log_lambda - log_gamma),
        (RateKind::Idle, reps * n * ((n - log_gamma) + gamma + dp) + log_lambda.powi(3)),
        (RateKind::Cnot, gamma * big_n / params.lambda() as f64),
        (RateKind::Ccnot, reps * d),
        (RateKind::Cswap, reps * dp + dp * dp + log_lambda * log_lambda),
    ])
}

pub fn general_infidelity(params: &ArchParams, rates: &ErrorRates) -> Result<FidelityBreakdown> {
    require_single(params)?;
    rates.validate()?;
    Ok(FidelityBreakdown::new(general_terms(params), rates))
}

/// Bucket-brigade tree of depth T = log N: 3(T−1−ℓ) long-range CNOTs out of
/// R_ℓ, 2T local SWAPs, Σ_{ℓ=1}^{T} 2ℓ CSWAPs, and the status-qubit idle steps
/// of the activation walk.
pub fn bucket_brigade_infidelity(n_mem: u64, rates: &ErrorRates) -> Result<FidelityBreakdown> {
    let params = ArchParams::single(n_mem, n_mem, 1)?;
    rates.validate()?;
    let t = params.n() as u64;
    let walk = activation_walk(params.n(), &vec![1; t as usize]);
    let exponent_l = 3 * t * t.saturating_sub(1) / 2;
    let exponent_s = 2 * t;
    let exponent_cs = t * (t + 1);
    let exponent_i: u64 = walk.status_idle.iter().sum();
    let terms = BTreeMap::from([
        (RateKind::LongRange, exponent_l as f64),
        (RateKind::Swap, exponent_s as f64),
        (RateKind::Cswap, exponent_cs as f64),
        (RateKind::Idle, exponent_i as f64),
    ]);
    let survive = |eps: f64, e: u64| (1.0 - eps).powf(e as f64);
    let factors = SurvivalFactors {
        p_l: survive(rates.eps_l, exponent_l),
        p_s: survive(rates.eps_s, exponent_s),
        p_cs: survive(rates.eps_cs, exponent_cs),
        p_i: survive(rates.eps_i, exponent_i),
        exponent_l,
        exponent_s,
        exponent_cs,
        exponent_i,
    };
    let mut out = FidelityBreakdown::new(terms, rates);
    out.survival_factors = Some(factors);
    Ok(out)
}

/// b-bit readout. Parallel: b copies plus the long-range distribution of the
/// d′ address bits and of q_i to the other b − 1 copies. Sequential: b copies
/// plus the extra idling of the longer readout window.
pub fn multi_bit_infidelity(params: &ArchParams, rates: &ErrorRates) -> Result<FidelityBreakdown> {
    rates.validate()?;
    let b = params.b() as f64;
    let single = params.with_readout(Readout::SingleBit, 1)?;
    let mut terms: BTreeMap<RateKind, f64> = general_terms(&single).into_iter().map(|(k, c)| (k, b * c)).collect();
    let n = params.n();
    let d = params.d();
    let dp = params.d_prime() as f64;
    match params.readout() {
        Readout::SingleBit => return Err(QlutError::InvalidParams("multi-bit readout expected".into())),
        Readout::ParallelMultiBit => {
            let spread = 2f64.powf((n - d) as f64 / 2.0);
            *terms.entry(RateKind::LongRange).or_default() += (b - 1.0) * spread * (dp + p2(d));
        }
        Readout::SequentialMultiBit => {
            let window = |bb: f64, ddp: f64| (bb + dp) * (bb + (n - d) as f64 + ddp);
            let extra = window(b, params.d_double_prime() as f64) - window(1.0, 0.0);
            *terms.entry(RateKind::Idle).or_default() += extra;
        }
    }
    Ok(FidelityBreakdown::new(terms, rates))
}

/// General framework with the first k router levels of Stages I and II given
/// free long-range operations; the remaining links use GHZ chains (ε_Q per cell).
pub fn budgeted_infidelity(params: &ArchParams, rates: &ErrorRates, k: u32) -> Result<FidelityBreakdown> {
    require_single(params)?;
    rates.validate()?;
    let max = params.n() - params.d();
    if k > max {
        return Err(QlutError::KOutOfRange { k, max });
    }
    let big_n = p2(params.n());
    let lambda = params.lambda() as f64;
    let gamma = params.gamma() as f64;
    let half = 2f64.powf(-(k as f64) / 2.0);
    let q = if k <= params.d_prime() {
        half * lambda.sqrt() + half * big_n / lambda.sqrt() + gamma * big_n / lambda
    } else {
        2f64.powi(-(k as i32)) * big_n + half * lambda.sqrt()
    };
    let mut terms = general_terms(params);
    terms.remove(&RateKind::LongRange);
    terms.insert(RateKind::Qubit, q);
    Ok(FidelityBreakdown::new(terms, rates))
}

/// Bucket brigade with free long-range operations on its first k levels.
pub fn budgeted_bucket_brigade_infidelity(n_mem: u64, rates: &ErrorRates, k: u32) -> Result<FidelityBreakdown> {
    let params = ArchParams::single(n_mem, n_mem, 1)?;
    rates.validate()?;
    if k > params.n() {
        return Err(QlutError::KOutOfRange { k, max: params.n() });
    }
    let n = params.n() as f64;
    let terms = BTreeMap::from([
        (RateKind::Qubit, 2f64.powf(-(k as f64) / 2.0) * n * p2(params.n()).sqrt()),
        (RateKind::Swap, n),
        (RateKind::Cswap, n * n),
        (RateKind::Idle, n * n),
    ]);
    Ok(FidelityBreakdown::new(terms, rates))
}

/// Leading T count for the readout mode.
pub fn t_count_formula(params: &ArchParams) -> f64 {
    let d = params.d();
    let b = params.b() as f64;
    let reps = p2(d);
    let lambda = params.lambda() as f64;
    match params.readout() {
        Readout::SingleBit => reps * (p2(params.d_prime()) + d as f64) + lambda,
        Readout::ParallelMultiBit => reps * (d as f64 + b * p2(params.d_prime())) + b * lambda,
        Readout::SequentialMultiBit => p2(params.n() - params.g()) + reps * d as f64 + b * lambda,
    }
}

pub fn qubit_count_formula(params: &ArchParams) -> f64 {
    let d = params.d() as f64;
    match params.readout() {
        Readout::SingleBit => d + params.lambda() as f64,
        Readout::ParallelMultiBit | Readout::SequentialMultiBit => d + params.b() as f64 * params.lambda() as f64,
    }
}

/// Modeled query depth: each repetition runs the ladder, the d′ routing levels
/// and the CNOT tree, then Stage III climbs n − d levels.
pub fn depth_formula(params: &ArchParams) -> f64 {
    let per_rep = (params.d() + params.d_prime() + params.g()) as f64;
    p2(params.d()) * per_rep + (params.n() - params.d()) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CostReport {
    pub t_count: f64,
    pub qubit_count: f64,
    pub query_depth: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_counts: Option<ResourceCounts>,
    /// Exact T count divided by the formula value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_calibration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent_fit: Option<ExponentFit>,
}

pub fn cost_report(params: &ArchParams, circuit: Option<&Circuit>, decomposition: Decomposition) -> CostReport {
    let exact = circuit.map(|c| c.count_resources(decomposition));
    let t = t_count_formula(params);
    CostReport {
        t_count: t,
        qubit_count: qubit_count_formula(params),
        query_depth: depth_formula(params),
        t_calibration: exact.as_ref().map(|e| e.t_count as f64 / t),
        exact_counts: exact,
        exponent_fit: None,
    }
}

/// Named parameter families at memory exponent n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Qrom,
    SelectSwapVariant,
    BucketBrigade,
    /// λ = √N, γ = N^{1/4}.
    Unified,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Qrom, Family::SelectSwapVariant, Family::BucketBrigade, Family::Unified];

    /// λ = 2^⌈n/2⌉ and γ = 2^⌈n/4⌉ where a root is taken.
    pub fn params(&self, n: u32) -> Result<ArchParams> {
        let big_n = 1u64 << n;
        let (lambda, gamma) = match self {
            Family::Qrom => (1, 1),
            Family::SelectSwapVariant => (1 << n.div_ceil(2), 1),
            Family::BucketBrigade => (big_n, 1),
            Family::Unified => (1 << n.div_ceil(2), 1 << n.div_ceil(4)),
        };
        ArchParams::single(big_n, lambda, gamma)
    }
}
