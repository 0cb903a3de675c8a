//! Architecture parameters, error rates, data tables and addresses.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QlutError, Result};

/// How a b-bit word leaves the lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Readout {
    #[default]
    SingleBit,
    ParallelMultiBit,
    SequentialMultiBit,
}

/// Named special cases of the unified architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Specialization {
    #[serde(rename = "QROM")]
    Qrom,
    SelectSwapVariant,
    BucketBrigade,
    General,
}

impl fmt::Display for Specialization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Specialization::Qrom => "QROM",
            Specialization::SelectSwapVariant => "SelectSwapVariant",
            Specialization::BucketBrigade => "BucketBrigade",
            Specialization::General => "General",
        };
        f.write_str(s)
    }
}

fn log2_exact(name: &'static str, value: u64) -> Result<u32> {
    if value == 0 || !value.is_power_of_two() {
        return Err(QlutError::NonPowerOfTwo { name, value });
    }
    Ok(value.trailing_zeros())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ArchParamsWire {
    #[serde(rename = "N")]
    n_mem: u64,
    lambda: u64,
    gamma: u64,
    #[serde(default = "one")]
    b: u64,
    #[serde(default)]
    readout: Readout,
    #[serde(default)]
    long_range_budget_k: u32,
    // Derived fields are accepted on input but must agree with the primaries.
    n: Option<u32>,
    d: Option<u32>,
    d_prime: Option<u32>,
    d_double_prime: Option<u32>,
}

fn one() -> u64 {
    1
}

impl TryFrom<ArchParamsWire> for ArchParams {
    type Error = QlutError;

    fn try_from(w: ArchParamsWire) -> Result<Self> {
        let p = ArchParams::new(w.n_mem, w.lambda, w.gamma, w.b, w.readout, w.long_range_budget_k)?;
        let checks = [
            ("n", w.n, p.n),
            ("d", w.d, p.d),
            ("dPrime", w.d_prime, p.d_prime),
            ("dDoublePrime", w.d_double_prime, p.d_double_prime),
        ];
        for (name, given, derived) in checks {
            if let Some(g) = given {
                if g != derived {
                    return Err(QlutError::InvalidParams(format!(
                        "{name} = {g} disagrees with derived value {derived}"
                    )));
                }
            }
        }
        Ok(p)
    }
}

/// The tuning tuple (N, λ, γ, b, readout, k) with its derived exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ArchParamsWire", rename_all = "camelCase")]
pub struct ArchParams {
    #[serde(rename = "N")]
    n_mem: u64,
    lambda: u64,
    gamma: u64,
    b: u64,
    readout: Readout,
    long_range_budget_k: u32,
    n: u32,
    d: u32,
    d_prime: u32,
    d_double_prime: u32,
}

impl ArchParams {
    /// Validates and derives. Accepts d′ > d; see [`ArchParams::check_theorem_domain`].
    pub fn new(n_mem: u64, lambda: u64, gamma: u64, b: u64, readout: Readout, k: u32) -> Result<Self> {
        let n = log2_exact("N", n_mem)?;
        let log_lambda = log2_exact("lambda", lambda)?;
        let log_gamma = log2_exact("gamma", gamma)?;
        let d2 = log2_exact("b", b)?;
        if gamma > lambda {
            return Err(QlutError::OrderingViolation(format!("gamma = {gamma} > lambda = {lambda}")));
        }
        if lambda > n_mem {
            return Err(QlutError::OrderingViolation(format!("lambda = {lambda} > N = {n_mem}")));
        }
        if b > 64 {
            return Err(QlutError::InvalidParams(format!("word size b = {b} exceeds 64 bits")));
        }
        if readout == Readout::SingleBit && b != 1 {
            return Err(QlutError::InvalidParams(format!("SingleBit readout with b = {b}")));
        }
        let d = n - log_lambda;
        let d_prime = log_lambda - log_gamma;
        if k > n - d {
            return Err(QlutError::OrderingViolation(format!("k = {k} > n - d = {}", n - d)));
        }
        Ok(Self { n_mem, lambda, gamma, b, readout, long_range_budget_k: k, n, d, d_prime, d_double_prime: d2 })
    }

    /// Single-bit shorthand.
    pub fn single(n_mem: u64, lambda: u64, gamma: u64) -> Result<Self> {
        Self::new(n_mem, lambda, gamma, 1, Readout::SingleBit, 0)
    }

    /// The infidelity theorem is stated for d′ ≤ d ≤ n only.
    pub fn check_theorem_domain(&self) -> Result<()> {
        if self.d_prime > self.d {
            return Err(QlutError::OrderingViolation(format!("d' = {} > d = {}", self.d_prime, self.d)));
        }
        Ok(())
    }

    pub fn with_k(&self, k: u32) -> Result<Self> {
        Self::new(self.n_mem, self.lambda, self.gamma, self.b, self.readout, k)
    }

    pub fn with_readout(&self, readout: Readout, b: u64) -> Result<Self> {
        Self::new(self.n_mem, self.lambda, self.gamma, b, readout, self.long_range_budget_k)
    }

    pub fn memory_size(&self) -> u64 {
        self.n_mem
    }
    pub fn lambda(&self) -> u64 {
        self.lambda
    }
    pub fn gamma(&self) -> u64 {
        self.gamma
    }
    pub fn b(&self) -> u64 {
        self.b
    }
    pub fn readout(&self) -> Readout {
        self.readout
    }
    pub fn k(&self) -> u32 {
        self.long_range_budget_k
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn d(&self) -> u32 {
        self.d
    }
    pub fn d_prime(&self) -> u32 {
        self.d_prime
    }
    pub fn d_double_prime(&self) -> u32 {
        self.d_double_prime
    }
    /// log2 γ, the CNOT-tree depth.
    pub fn g(&self) -> u32 {
        self.d_prime_total() - self.d_prime
    }
    /// n − d, the depth of the full Stage-III tree.
    pub fn d_prime_total(&self) -> u32 {
        self.n - self.d
    }
    /// Stage-II repetitions N/λ.
    pub fn repetitions(&self) -> u64 {
        self.n_mem / self.lambda
    }

    pub fn specialization(&self) -> Specialization {
        let sqrt_n = (self.n % 2 == 0).then(|| 1u64 << (self.n / 2));
        if self.gamma != 1 {
            Specialization::General
        } else if self.lambda == self.n_mem {
            Specialization::BucketBrigade
        } else if Some(self.lambda) == sqrt_n {
            Specialization::SelectSwapVariant
        } else if self.lambda == 1 {
            Specialization::Qrom
        } else {
            Specialization::General
        }
    }
}

/// Free-function form of [`ArchParams::new`].
pub fn derive_params(n_mem: u64, lambda: u64, gamma: u64, b: u64, readout: Readout, k: u32) -> Result<ArchParams> {
    ArchParams::new(n_mem, lambda, gamma, b, readout, k)
}

/// The seven error classes, one per rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RateKind {
    #[serde(rename = "epsI")]
    Idle,
    #[serde(rename = "epsQ")]
    Qubit,
    #[serde(rename = "epsL")]
    LongRange,
    #[serde(rename = "epsS")]
    Swap,
    #[serde(rename = "epsCS")]
    Cswap,
    #[serde(rename = "epsC")]
    Cnot,
    #[serde(rename = "epsCC")]
    Ccnot,
}

impl RateKind {
    pub const ALL: [RateKind; 7] = [
        RateKind::Idle,
        RateKind::Qubit,
        RateKind::LongRange,
        RateKind::Swap,
        RateKind::Cswap,
        RateKind::Cnot,
        RateKind::Ccnot,
    ];

    pub fn symbol(&self) -> &'static str {
        match self {
            RateKind::Idle => "epsI",
            RateKind::Qubit => "epsQ",
            RateKind::LongRange => "epsL",
            RateKind::Swap => "epsS",
            RateKind::Cswap => "epsCS",
            RateKind::Cnot => "epsC",
            RateKind::Ccnot => "epsCC",
        }
    }
}

impl fmt::Display for RateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Deserialize)]
struct ErrorRatesWire {
    #[serde(rename = "epsI", default)]
    eps_i: f64,
    #[serde(rename = "epsQ", default)]
    eps_q: f64,
    #[serde(rename = "epsL", default)]
    eps_l: f64,
    #[serde(rename = "epsS", default)]
    eps_s: f64,
    #[serde(rename = "epsCS", default)]
    eps_cs: f64,
    #[serde(rename = "epsC", default)]
    eps_c: f64,
    #[serde(rename = "epsCC", default)]
    eps_cc: f64,
    #[serde(rename = "epsF", default)]
    eps_f: f64,
    #[serde(rename = "epsInitial", default)]
    eps_initial: f64,
}

impl TryFrom<ErrorRatesWire> for ErrorRates {
    type Error = QlutError;

    fn try_from(w: ErrorRatesWire) -> Result<Self> {
        let r = ErrorRates {
            eps_i: w.eps_i,
            eps_q: w.eps_q,
            eps_l: w.eps_l,
            eps_s: w.eps_s,
            eps_cs: w.eps_cs,
            eps_c: w.eps_c,
            eps_cc: w.eps_cc,
            eps_f: w.eps_f,
            eps_initial: w.eps_initial,
        };
        r.validate()?;
        Ok(r)
    }
}

/// Per-location error probabilities. Missing JSON fields default to 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "ErrorRatesWire")]
pub struct ErrorRates {
    #[serde(rename = "epsI")]
    pub eps_i: f64,
    #[serde(rename = "epsQ")]
    pub eps_q: f64,
    #[serde(rename = "epsL")]
    pub eps_l: f64,
    #[serde(rename = "epsS")]
    pub eps_s: f64,
    #[serde(rename = "epsCS")]
    pub eps_cs: f64,
    #[serde(rename = "epsC")]
    pub eps_c: f64,
    #[serde(rename = "epsCC")]
    pub eps_cc: f64,
    #[serde(rename = "epsF")]
    pub eps_f: f64,
    #[serde(rename = "epsInitial")]
    pub eps_initial: f64,
}

impl ErrorRates {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Every gate, idle and long-range rate set to `eps`.
    pub fn uniform(eps: f64) -> Self {
        Self {
            eps_i: eps,
            eps_q: eps,
            eps_l: eps,
            eps_s: eps,
            eps_cs: eps,
            eps_c: eps,
            eps_cc: eps,
            eps_f: eps,
            eps_initial: eps,
        }
    }

    /// Only one class active.
    pub fn only(kind: RateKind, eps: f64) -> Self {
        Self::zero().with(kind, eps)
    }

    pub fn with(mut self, kind: RateKind, eps: f64) -> Self {
        match kind {
            RateKind::Idle => self.eps_i = eps,
            RateKind::Qubit => self.eps_q = eps,
            RateKind::LongRange => self.eps_l = eps,
            RateKind::Swap => self.eps_s = eps,
            RateKind::Cswap => self.eps_cs = eps,
            RateKind::Cnot => self.eps_c = eps,
            RateKind::Ccnot => self.eps_cc = eps,
        }
        self
    }

    pub fn get(&self, kind: RateKind) -> f64 {
        match kind {
            RateKind::Idle => self.eps_i,
            RateKind::Qubit => self.eps_q,
            RateKind::LongRange => self.eps_l,
            RateKind::Swap => self.eps_s,
            RateKind::Cswap => self.eps_cs,
            RateKind::Cnot => self.eps_c,
            RateKind::Ccnot => self.eps_cc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("epsI", self.eps_i),
            ("epsQ", self.eps_q),
            ("epsL", self.eps_l),
            ("epsS", self.eps_s),
            ("epsCS", self.eps_cs),
            ("epsC", self.eps_c),
            ("epsCC", self.eps_cc),
            ("epsF", self.eps_f),
            ("epsInitial", self.eps_initial),
        ];
        for (name, value) in fields {
            if !(0.0..=1.0).contains(&value) {
                return Err(QlutError::InvalidRate { name, value });
            }
        }
        Ok(())
    }

    /// ε_L = min(m·ε_Q, ε_f) for a link of length m.
    pub fn derived_eps_l(&self, m: u64) -> f64 {
        (m as f64 * self.eps_q).min(self.eps_f).min(1.0)
    }

    pub fn with_derived_eps_l(mut self, m: u64) -> Self {
        self.eps_l = self.derived_eps_l(m);
        self
    }
}

/// Classical memory: N words of b bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataTable {
    b: u32,
    words: Vec<u64>,
}

impl DataTable {
    pub fn new(words: Vec<u64>, b: u32) -> Result<Self> {
        if words.is_empty() || !words.len().is_power_of_two() {
            return Err(QlutError::InvalidData(format!("length {} is not a power of two", words.len())));
        }
        if b == 0 || b > 64 {
            return Err(QlutError::InvalidData(format!("word size {b}")));
        }
        if b < 64 {
            if let Some((i, w)) = words.iter().enumerate().find(|(_, w)| **w >> b != 0) {
                return Err(QlutError::InvalidData(format!("word {i} = {w} does not fit in {b} bits")));
            }
        }
        Ok(Self { b, words })
    }

    pub fn random<R: Rng + ?Sized>(n_mem: u64, b: u32, rng: &mut R) -> Self {
        let mask = if b >= 64 { u64::MAX } else { (1u64 << b) - 1 };
        let words = (0..n_mem).map(|_| rng.random::<u64>() & mask).collect();
        Self { b, words }
    }

    pub fn zeros(n_mem: u64, b: u32) -> Self {
        Self { b, words: vec![0; n_mem as usize] }
    }

    /// Checks the table against the parameters it will be compiled with.
    pub fn check_for(&self, p: &ArchParams) -> Result<()> {
        if self.words.len() as u64 != p.memory_size() {
            return Err(QlutError::InvalidData(format!(
                "table has {} words, N = {}",
                self.words.len(),
                p.memory_size()
            )));
        }
        if self.b as u64 != p.b() {
            return Err(QlutError::InvalidData(format!("table word size {} but b = {}", self.b, p.b())));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
    pub fn word_size(&self) -> u32 {
        self.b
    }
    pub fn words(&self) -> &[u64] {
        &self.words
    }
    pub fn word(&self, index: u64) -> u64 {
        self.words[index as usize]
    }
    /// Bit w (0 = least significant) of word `index`.
    pub fn bit(&self, index: u64, w: u32) -> bool {
        (self.words[index as usize] >> w) & 1 == 1
    }
}

/// An n-bit address, a_0 most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Address {
    pub n: u32,
    pub value: u64,
}

impl Address {
    pub fn new(n: u32, value: u64) -> Self {
        debug_assert!(n == 64 || value < (1u64 << n));
        Self { n, value }
    }

    /// a_z.
    pub fn bit(&self, z: u32) -> bool {
        (self.value >> (self.n - 1 - z)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.n).map(|z| self.bit(z)).collect()
    }

    /// Integer value of bits a_from … a_{to−1}.
    pub fn field(&self, from: u32, to: u32) -> u64 {
        (from..to).fold(0, |acc, z| (acc << 1) | self.bit(z) as u64)
    }
}
