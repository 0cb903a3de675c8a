//! Exact simulation over a sparse amplitude map.
//!
//! Every gate the builders emit except H maps basis states to basis states
//! (up to sign), so a query on a few addresses stays a handful of terms even
//! when the circuit has hundreds of qubits. The configured qubit cap therefore
//! bounds the number of live terms (2^cap), not the register width.

pub mod containment;
pub mod noise;

use std::collections::HashMap;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind, QubitId};
use crate::error::{QlutError, Result};

/// Widest register the bitset can hold.
pub const MAX_QUBITS: usize = 512;
const WORDS: usize = MAX_QUBITS / 64;

/// Default cap; overridden by the `QLUT_MAX_QUBITS` environment variable.
pub const DEFAULT_QUBIT_CAP: u32 = 24;

pub fn qubit_cap() -> u32 {
    std::env::var("QLUT_MAX_QUBITS").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_QUBIT_CAP)
}

/// One computational basis state.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug, PartialOrd, Ord)]
pub struct Bits([u64; WORDS]);

impl Bits {
    #[inline]
    pub fn get(&self, q: QubitId) -> bool {
        (self.0[q >> 6] >> (q & 63)) & 1 == 1
    }
    #[inline]
    pub fn set(&mut self, q: QubitId, v: bool) {
        if self.get(q) != v {
            self.flip(q);
        }
    }
    #[inline]
    pub fn flip(&mut self, q: QubitId) {
        self.0[q >> 6] ^= 1 << (q & 63);
    }
    #[inline]
    fn swap(&mut self, a: QubitId, b: QubitId) {
        if self.get(a) != self.get(b) {
            self.flip(a);
            self.flip(b);
        }
    }
    pub fn is_zero_except(&self, keep: &[QubitId]) -> bool {
        let mut m = *self;
        for &q in keep {
            m.set(q, false);
        }
        m.0.iter().all(|w| *w == 0)
    }
}

/// Applies a monomial gate to a basis state; returns true when the amplitude changes sign.
#[inline]
pub(crate) fn permute(bits: &mut Bits, g: &Gate) -> bool {
    let o = g.qubits();
    match g.kind {
        GateKind::X => bits.flip(o[0]),
        GateKind::Z => return bits.get(o[0]),
        GateKind::Cnot | GateKind::LongRangeCnot => {
            if bits.get(o[0]) {
                bits.flip(o[1]);
            }
        }
        GateKind::Swap | GateKind::LongRangeSwap => bits.swap(o[0], o[1]),
        GateKind::Cswap { negated } => {
            if bits.get(o[0]) != negated {
                bits.swap(o[1], o[2]);
            }
        }
        GateKind::Ccnot => {
            if bits.get(o[0]) && bits.get(o[1]) {
                bits.flip(o[2]);
            }
        }
        GateKind::ClassicallyControlledX { bit } => {
            if bit {
                bits.flip(o[0]);
            }
        }
        GateKind::H | GateKind::Reset => unreachable!("{:?} is not monomial", g.kind),
    }
    false
}

pub(crate) fn is_monomial(gates: &[Gate]) -> bool {
    gates.iter().all(|g| !matches!(g.kind, GateKind::H | GateKind::Reset))
}

/// Sparse state vector: basis states with nonzero amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    num_qubits: usize,
    terms: Vec<(Bits, Complex64)>,
}

impl SparseState {
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(QlutError::CircuitTooWide(num_qubits));
        }
        Ok(Self { num_qubits, terms: vec![(Bits::default(), Complex64::new(1.0, 0.0))] })
    }

    pub fn from_terms(num_qubits: usize, terms: Vec<(Bits, Complex64)>) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(QlutError::CircuitTooWide(num_qubits));
        }
        Ok(Self { num_qubits, terms })
    }

    /// |a⟩ on the circuit's address register, |0⟩ elsewhere.
    pub fn address(circuit: &Circuit, a: u64) -> Result<Self> {
        Self::address_superposition(circuit, &[(a, Complex64::new(1.0, 0.0))])
    }

    /// Σ α_a |a⟩ on the address register.
    pub fn address_superposition(circuit: &Circuit, amps: &[(u64, Complex64)]) -> Result<Self> {
        let addr = circuit.address_qubits();
        let terms = amps.iter().map(|&(a, amp)| (address_bits(addr, a), amp)).collect();
        Self::from_terms(circuit.num_qubits(), terms)
    }

    /// Uniform superposition over all N addresses.
    pub fn uniform_addresses(circuit: &Circuit) -> Result<Self> {
        let n = circuit.params.memory_size();
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        let amps: Vec<(u64, Complex64)> = (0..n).map(|a| (a, amp)).collect();
        Self::address_superposition(circuit, &amps)
    }

    /// Σ α_a |a⟩|x_a⟩ with |x_a⟩ on the output qubits and everything else |0⟩.
    pub fn lookup_target(circuit: &Circuit, amps: &[(u64, Complex64)]) -> Result<Self> {
        let addr = circuit.address_qubits();
        let terms = amps
            .iter()
            .map(|&(a, amp)| {
                let mut bits = address_bits(addr, a);
                let word = circuit.data.word(a);
                for (w, &q) in circuit.outputs().iter().enumerate() {
                    bits.set(q, (word >> w) & 1 == 1);
                }
                (bits, amp)
            })
            .collect();
        Self::from_terms(circuit.num_qubits(), terms)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    pub fn terms(&self) -> &[(Bits, Complex64)] {
        &self.terms
    }
    pub fn support(&self) -> usize {
        self.terms.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, g: &Gate, cap: u32) -> Result<()> {
        match g.kind {
            GateKind::H => {
                let q = g.qubits()[0];
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let mut acc: HashMap<Bits, Complex64> = HashMap::with_capacity(self.terms.len() * 2);
                for (bits, amp) in &self.terms {
                    let mut zero = *bits;
                    zero.set(q, false);
                    let mut one = zero;
                    one.set(q, true);
                    let sign = if bits.get(q) { -1.0 } else { 1.0 };
                    *acc.entry(zero).or_default() += amp * s;
                    *acc.entry(one).or_default() += amp * (s * sign);
                }
                let mut terms: Vec<(Bits, Complex64)> = acc.into_iter().filter(|(_, a)| a.norm_sqr() > 1e-30).collect();
                terms.sort_by_key(|t| t.0);
                if cap < 64 && terms.len() as u64 > 1u64 << cap {
                    return Err(QlutError::TooManyQubits { support: terms.len(), cap });
                }
                self.terms = terms;
            }
            GateKind::Reset => {
                let q = g.qubits()[0];
                let first = self.terms.first().map(|(b, _)| b.get(q)).unwrap_or(false);
                if self.terms.iter().any(|(b, _)| b.get(q) != first) {
                    return Err(QlutError::Unsupported(format!("reset of qubit {q} would collapse a superposition")));
                }
                for (b, _) in &mut self.terms {
                    b.set(q, false);
                }
            }
            _ => {
                for (bits, amp) in &mut self.terms {
                    if permute(bits, g) {
                        *amp = -*amp;
                    }
                }
            }
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &SparseState) -> Complex64 {
        let map: HashMap<Bits, Complex64> = self.terms.iter().copied().collect();
        other.terms.iter().filter_map(|(b, a)| map.get(b).map(|s| s.conj() * a)).sum()
    }

    /// |⟨self|other⟩|².
    pub fn overlap(&self, other: &SparseState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Probability that the listed qubits read `value` (bit w of `value` on `qubits[w]`).
    pub fn probability_of(&self, qubits: &[QubitId], value: u64) -> f64 {
        self.terms
            .iter()
            .filter(|(b, _)| qubits.iter().enumerate().all(|(w, &q)| b.get(q) == ((value >> w) & 1 == 1)))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Σ_rest |⟨φ_A ⊗ rest|ψ⟩|²: fidelity of the reduced state on `subset` with the
    /// pure state `phi`, whose terms give values for `subset` in order.
    pub fn subsystem_fidelity(&self, subset: &[QubitId], phi: &[(Vec<bool>, Complex64)]) -> f64 {
        let mut groups: HashMap<Bits, Complex64> = HashMap::new();
        for (bits, amp) in &self.terms {
            let mut rest = *bits;
            for &q in subset {
                rest.set(q, false);
            }
            if let Some((_, c)) = phi.iter().find(|(vals, _)| subset.iter().zip(vals).all(|(&q, &v)| bits.get(q) == v))
            {
                *groups.entry(rest).or_default() += c.conj() * amp;
            }
        }
        groups.values().map(|v| v.norm_sqr()).sum()
    }

    /// Values of `qubits` in each term, with probabilities.
    pub fn marginal(&self, qubits: &[QubitId]) -> HashMap<u64, f64> {
        let mut m = HashMap::new();
        for (b, a) in &self.terms {
            let v = qubits.iter().enumerate().fold(0u64, |acc, (w, &q)| acc | ((b.get(q) as u64) << w));
            *m.entry(v).or_insert(0.0) += a.norm_sqr();
        }
        m
    }
}

pub(crate) fn address_bits(addr: &[QubitId], a: u64) -> Bits {
    let n = addr.len();
    let mut bits = Bits::default();
    for (z, &q) in addr.iter().enumerate() {
        bits.set(q, (a >> (n - 1 - z)) & 1 == 1);
    }
    bits
}

/// Runs `gates` on `input` with the given term cap.
pub fn simulate_gates(gates: &[Gate], input: SparseState, cap: u32) -> Result<SparseState> {
    let mut state = input;
    for g in gates {
        if g.qubits().iter().any(|&q| q >= state.num_qubits) {
            return Err(QlutError::CircuitTooWide(state.num_qubits));
        }
        state.apply(g, cap)?;
    }
    Ok(state)
}

/// Exact noiseless execution of a whole circuit.
pub fn simulate_ideal(circuit: &Circuit, input: SparseState) -> Result<SparseState> {
    if circuit.num_qubits() > MAX_QUBITS {
        return Err(QlutError::CircuitTooWide(circuit.num_qubits()));
    }
    if input.support() as u64 > 1u64 << qubit_cap().min(63) {
        return Err(QlutError::TooManyQubits { support: input.support(), cap: qubit_cap() });
    }
    simulate_gates(circuit.gates(), input, qubit_cap())
}

/// Basis-state evaluation of a monomial circuit; returns the output word.
pub fn classical_output(circuit: &Circuit, a: u64) -> u64 {
    let mut bits = address_bits(circuit.address_qubits(), a);
    for g in circuit.gates() {
        permute(&mut bits, g);
    }
    read_word(&bits, circuit.outputs())
}

#[inline]
pub(crate) fn read_word(bits: &Bits, qubits: &[QubitId]) -> u64 {
    qubits.iter().enumerate().fold(0u64, |acc, (w, &q)| acc | ((bits.get(q) as u64) << w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Stage;

    fn g(kind: GateKind, q: &[usize]) -> Gate {
        Gate::new(kind, q, Stage::I)
    }

    #[test]
    fn hadamard_pair_is_identity() {
        let s0 = SparseState::zero(3).unwrap();
        let out = simulate_gates(&[g(GateKind::H, &[1]), g(GateKind::H, &[1])], s0.clone(), 24).unwrap();
        assert!((out.overlap(&s0) - 1.0).abs() < 1e-12);
        assert_eq!(out.support(), 1);
    }

    #[test]
    fn bell_pair() {
        let s0 = SparseState::zero(2).unwrap();
        let out = simulate_gates(&[g(GateKind::H, &[0]), g(GateKind::Cnot, &[0, 1])], s0, 24).unwrap();
        let m = out.marginal(&[0, 1]);
        assert!((m[&0b00] - 0.5).abs() < 1e-12 && (m[&0b11] - 0.5).abs() < 1e-12);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_limits_support() {
        let gates: Vec<Gate> = (0..5).map(|q| g(GateKind::H, &[q])).collect();
        let err = simulate_gates(&gates, SparseState::zero(5).unwrap(), 3).unwrap_err();
        assert!(matches!(err, QlutError::TooManyQubits { cap: 3, .. }));
    }

    #[test]
    fn reset_refuses_superposition() {
        let s = simulate_gates(&[g(GateKind::H, &[0])], SparseState::zero(1).unwrap(), 24).unwrap();
        assert!(simulate_gates(&[g(GateKind::Reset, &[0])], s, 24).is_err());
        let s = simulate_gates(&[g(GateKind::X, &[0]), g(GateKind::Reset, &[0])], SparseState::zero(1).unwrap(), 24)
            .unwrap();
        assert_eq!(s.probability_of(&[0], 0), 1.0);
    }

    #[test]
    fn width_limit() {
        assert!(matches!(SparseState::zero(MAX_QUBITS + 1), Err(QlutError::CircuitTooWide(_))));
    }

    #[test]
    fn z_sign() {
        let out =
            simulate_gates(&[g(GateKind::X, &[0]), g(GateKind::Z, &[0])], SparseState::zero(1).unwrap(), 24).unwrap();
        assert_eq!(out.terms()[0].1, Complex64::new(-1.0, 0.0));
    }
}
