//! Per-location Pauli noise, Monte Carlo trials and exhaustive single-error enumeration.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{address_bits, is_monomial, permute, read_word, Bits, SparseState};
use crate::circuit::{Circuit, GateKind, QubitId};
use crate::error::{QlutError, Result};
use crate::params::{ErrorRates, RateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// X and Y flip the computational-basis value.
    pub fn flips(&self) -> bool {
        !matches!(self, Pauli::Z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum Location {
    /// Error right after gate `index` (position in the layer-ordered gate list).
    Gate { index: usize },
    /// Idle qubit during `layer`.
    Idle { layer: usize, qubit: QubitId },
}

/// A noisy location with its error class and rate multiplier.
#[derive(Debug, Clone, Copy)]
pub struct Site {
    pub location: Location,
    /// Errors are applied just before gate `slot` (or at the end when `slot` = gate count).
    pub slot: usize,
    pub kind: RateKind,
    /// Rate = base rate of `kind` × weight, capped at 1.
    pub weight: f64,
    qubits: [QubitId; 3],
    arity: u8,
    /// Long-range gates depolarize both endpoints.
    pub two_qubit: bool,
}

impl Site {
    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits[..self.arity as usize]
    }
}

/// Rate override for one long-range gate, e.g. m·ε_Q for a GHZ chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRate {
    pub kind: RateKind,
    pub weight: f64,
}

/// Every noisy location of a circuit plus the rates that drive them.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    sites: Vec<Site>,
    by_kind: HashMap<RateKind, Vec<usize>>,
    rates: ErrorRates,
}

impl NoiseModel {
    pub fn new(circuit: &Circuit, rates: ErrorRates) -> Self {
        Self::with_link_rates(circuit, rates, &HashMap::new())
    }

    /// `links` maps gate index to the error class of that long-range gate.
    pub fn with_link_rates(circuit: &Circuit, rates: ErrorRates, links: &HashMap<usize, LinkRate>) -> Self {
        let gates = circuit.gates();
        let mut sites = Vec::new();
        for (index, g) in gates.iter().enumerate() {
            let (kind, weight) = match g.kind {
                GateKind::Swap => (RateKind::Swap, 1.0),
                GateKind::Cswap { .. } => (RateKind::Cswap, 1.0),
                GateKind::Cnot => (RateKind::Cnot, 1.0),
                GateKind::Ccnot => (RateKind::Ccnot, 1.0),
                GateKind::LongRangeCnot | GateKind::LongRangeSwap => match links.get(&index) {
                    Some(l) => (l.kind, l.weight),
                    None => (RateKind::LongRange, 1.0),
                },
                _ => continue,
            };
            let mut qubits = [0; 3];
            qubits[..g.qubits().len()].copy_from_slice(g.qubits());
            sites.push(Site {
                location: Location::Gate { index },
                slot: index + 1,
                kind,
                weight,
                qubits,
                arity: g.qubits().len() as u8,
                two_qubit: g.kind.is_long_range(),
            });
        }

        // Idle steps: layers strictly between a qubit's first and last use in which it is untouched.
        let depth = circuit.depth();
        let mut layer_start = vec![gates.len(); depth + 1];
        for (i, g) in gates.iter().enumerate().rev() {
            layer_start[g.layer] = i;
        }
        let mut uses: Vec<Vec<usize>> = vec![Vec::new(); circuit.num_qubits()];
        for g in gates {
            for &q in g.qubits() {
                uses[q].push(g.layer);
            }
        }
        for (q, layers) in uses.iter().enumerate() {
            for w in layers.windows(2) {
                for (layer, &slot) in layer_start.iter().enumerate().take(w[1]).skip(w[0] + 1) {
                    sites.push(Site {
                        location: Location::Idle { layer, qubit: q },
                        slot,
                        kind: RateKind::Idle,
                        weight: 1.0,
                        qubits: [q, 0, 0],
                        arity: 1,
                        two_qubit: false,
                    });
                }
            }
        }
        sites.sort_by_key(|s| s.slot);
        let mut by_kind: HashMap<RateKind, Vec<usize>> = HashMap::new();
        for (i, s) in sites.iter().enumerate() {
            by_kind.entry(s.kind).or_default().push(i);
        }
        Self { sites, by_kind, rates }
    }

    pub fn with_rates(&self, rates: ErrorRates) -> Self {
        Self { rates, ..self.clone() }
    }

    pub fn rates(&self) -> &ErrorRates {
        &self.rates
    }
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site_count(&self, kind: RateKind) -> usize {
        self.by_kind.get(&kind).map_or(0, Vec::len)
    }

    pub fn rate(&self, site: &Site) -> f64 {
        (self.rates.get(site.kind) * site.weight).clamp(0.0, 1.0)
    }

    /// Draws the firing locations of one trial: geometric skips at the class's
    /// largest rate, then thinning down to each site's own rate.
    fn sample<R: Rng>(&self, rng: &mut R) -> Vec<ErrorEvent> {
        let mut events = Vec::new();
        for kind in RateKind::ALL {
            let Some(idx) = self.by_kind.get(&kind) else { continue };
            let pmax = idx.iter().map(|&i| self.rate(&self.sites[i])).fold(0.0, f64::max);
            if pmax <= 0.0 {
                continue;
            }
            let log_q = (1.0 - pmax).ln();
            let mut pos = 0usize;
            loop {
                if pmax < 1.0 {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    let skip = (u.ln() / log_q).floor();
                    if skip >= (idx.len() - pos) as f64 {
                        break;
                    }
                    pos += skip as usize;
                }
                if pos >= idx.len() {
                    break;
                }
                let site = &self.sites[idx[pos]];
                let r = self.rate(site);
                if r >= pmax || rng.random::<f64>() * pmax < r {
                    events.push(ErrorEvent::draw(site, rng));
                }
                pos += 1;
            }
        }
        events.sort_by_key(|e| e.slot);
        events
    }
}

/// One fired error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorEvent {
    pub location: Location,
    /// Paulis applied, one per affected qubit.
    pub paulis: Vec<(QubitId, Pauli)>,
    pub source_rate: RateKind,
    #[serde(skip)]
    slot: usize,
}

impl ErrorEvent {
    fn draw<R: Rng>(site: &Site, rng: &mut R) -> Self {
        let paulis = if site.two_qubit {
            // One of the 15 non-identity two-qubit Paulis.
            let k = rng.random_range(1..16u8);
            let pick = |v: u8| match v {
                1 => Some(Pauli::X),
                2 => Some(Pauli::Y),
                3 => Some(Pauli::Z),
                _ => None,
            };
            let q = site.qubits();
            [(q[0], pick(k & 3)), (q[1], pick(k >> 2))].into_iter().filter_map(|(q, p)| p.map(|p| (q, p))).collect()
        } else {
            let q = site.qubits()[rng.random_range(0..site.arity as usize)];
            vec![(q, Pauli::ALL[rng.random_range(0..3)])]
        };
        Self { location: site.location, paulis, source_rate: site.kind, slot: site.slot }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialResult {
    pub trial: u64,
    pub address: u64,
    /// Measured output equals the ideal word.
    pub fidelity_indicator: bool,
    /// Probability of reading the ideal word (0 or 1 for basis queries).
    pub overlap: f64,
    pub events: Vec<ErrorEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct McEstimate {
    pub infidelity: f64,
    pub stderr: f64,
    pub trials: u64,
    pub failures: u64,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn expected(circuit: &Circuit, a: u64) -> u64 {
    circuit.data.word(a)
}

/// Runs one basis query with the events inserted; returns the probability of the ideal word.
fn evaluate(circuit: &Circuit, a: u64, events: &[ErrorEvent]) -> Result<f64> {
    let gates = circuit.gates();
    let want = expected(circuit, a);
    if is_monomial(gates) {
        let mut bits = address_bits(circuit.address_qubits(), a);
        let mut e = 0;
        for (i, g) in gates.iter().enumerate() {
            while e < events.len() && events[e].slot == i {
                apply_flips(&mut bits, &events[e]);
                e += 1;
            }
            permute(&mut bits, g);
        }
        for ev in &events[e..] {
            apply_flips(&mut bits, ev);
        }
        return Ok((read_word(&bits, circuit.outputs()) == want) as u8 as f64);
    }
    let mut state = SparseState::address(circuit, a)?;
    let cap = super::qubit_cap();
    let mut e = 0;
    for (i, g) in gates.iter().enumerate() {
        while e < events.len() && events[e].slot == i {
            apply_paulis(&mut state, &events[e]);
            e += 1;
        }
        state.apply(g, cap)?;
    }
    for ev in &events[e..] {
        apply_paulis(&mut state, ev);
    }
    Ok(state.probability_of(circuit.outputs(), want))
}

fn apply_flips(bits: &mut Bits, ev: &ErrorEvent) {
    for &(q, p) in &ev.paulis {
        if p.flips() {
            bits.flip(q);
        }
    }
}

fn apply_paulis(state: &mut SparseState, ev: &ErrorEvent) {
    for &(q, p) in &ev.paulis {
        for (bits, amp) in &mut state.terms {
            let one = bits.get(q);
            match p {
                Pauli::X => bits.flip(q),
                Pauli::Z => {
                    if one {
                        *amp = -*amp;
                    }
                }
                Pauli::Y => {
                    // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩.
                    *amp *= if one { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
                    bits.flip(q);
                }
            }
        }
    }
}

/// One reproducible trial: address and events drawn from the (seed, trial) stream.
pub fn run_trial(circuit: &Circuit, model: &NoiseModel, seed: u64, trial: u64) -> Result<TrialResult> {
    let mut rng = trial_rng(seed, trial);
    let a = rng.random_range(0..circuit.params.memory_size());
    let events = model.sample(&mut rng);
    let overlap = if events.is_empty() { 1.0 } else { evaluate(circuit, a, &events)? };
    Ok(TrialResult { trial, address: a, fidelity_indicator: overlap > 1.0 - 1e-9, overlap, events })
}

/// Same as [`run_trial`] with the given events instead of sampled ones.
pub fn inject_and_simulate(circuit: &Circuit, a: u64, events: &[ErrorEvent]) -> Result<bool> {
    let mut sorted = events.to_vec();
    sorted.sort_by_key(|e| e.slot);
    Ok(evaluate(circuit, a, &sorted)? > 1.0 - 1e-9)
}

/// Builds an event for a site with explicit Paulis (for targeted injections).
pub fn event_at(site: &Site, paulis: Vec<(QubitId, Pauli)>) -> ErrorEvent {
    ErrorEvent { location: site.location, paulis, source_rate: site.kind, slot: site.slot }
}

/// Mean failure rate over `trials` basis queries with uniformly drawn addresses.
pub fn monte_carlo_infidelity(circuit: &Circuit, model: &NoiseModel, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(QlutError::InvalidParams("trials must be at least 1".into()));
    }
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(circuit, model, seed, t).map(|r| (!r.fidelity_indicator) as u64))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = failures as f64 / trials as f64;
    Ok(McEstimate { infidelity: p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), trials, failures })
}

/// Harmful fraction of every site for every address, from exhaustive single-Pauli injection.
#[derive(Debug, Clone)]
pub struct FirstOrderTable {
    kinds: Vec<RateKind>,
    weights: Vec<f64>,
    addresses: usize,
    /// harm[site * addresses + a]
    harm: Vec<f64>,
}

impl FirstOrderTable {
    /// Mean over addresses of Σ weight × harmful fraction: the first-order slope for `kind`.
    pub fn coefficient(&self, kind: RateKind) -> f64 {
        let mut total = 0.0;
        for (s, &k) in self.kinds.iter().enumerate() {
            if k == kind {
                let h: f64 = self.harm[s * self.addresses..(s + 1) * self.addresses].iter().sum();
                total += self.weights[s] * h;
            }
        }
        total / self.addresses as f64
    }

    /// Failure probability with only `kind` active at rate δ, assuming errors never cancel.
    pub fn predicted_infidelity(&self, kind: RateKind, delta: f64) -> f64 {
        let mut total = 0.0;
        for a in 0..self.addresses {
            let mut survive = 1.0;
            for (s, &k) in self.kinds.iter().enumerate() {
                if k == kind {
                    let h = self.harm[s * self.addresses + a];
                    survive *= 1.0 - (delta * self.weights[s]).min(1.0) * h;
                }
            }
            total += 1.0 - survive;
        }
        total / self.addresses as f64
    }

    /// Number of sites of `kind` harmful for at least one Pauli, averaged over addresses.
    pub fn harmful_locations(&self, kind: RateKind) -> f64 {
        let mut count = 0usize;
        for (s, &k) in self.kinds.iter().enumerate() {
            if k == kind {
                count += self.harm[s * self.addresses..(s + 1) * self.addresses].iter().filter(|h| **h > 0.0).count();
            }
        }
        count as f64 / self.addresses as f64
    }

    pub fn harm(&self, site: usize, a: usize) -> f64 {
        self.harm[site * self.addresses + a]
    }
}

/// Basis state before every gate for one query.
pub(crate) fn snapshots(circuit: &Circuit, a: u64) -> Vec<Bits> {
    let mut bits = address_bits(circuit.address_qubits(), a);
    let mut out = Vec::with_capacity(circuit.gates().len() + 1);
    for g in circuit.gates() {
        out.push(bits);
        permute(&mut bits, g);
    }
    out.push(bits);
    out
}

/// Does flipping `qubits` just before gate `slot` change the output word?
pub(crate) fn flip_harms(circuit: &Circuit, snaps: &[Bits], slot: usize, qubits: &[QubitId], want: u64) -> bool {
    let mut bits = snaps[slot];
    for &q in qubits {
        bits.flip(q);
    }
    for g in &circuit.gates()[slot..] {
        permute(&mut bits, g);
    }
    read_word(&bits, circuit.outputs()) != want
}

/// Exhaustive single-error enumeration over every site and address.
///
/// Z components never change a basis query's outcome, so each site reduces to
/// its distinct X-patterns weighted by how many Paulis produce them.
pub fn enumerate_single_errors(circuit: &Circuit, model: &NoiseModel) -> Result<FirstOrderTable> {
    if !is_monomial(circuit.gates()) {
        return Err(QlutError::Unsupported("enumeration needs a monomial circuit".into()));
    }
    let n_addr = circuit.params.memory_size() as usize;
    let sites = model.sites();
    let per_address: Vec<Vec<f64>> = (0..n_addr as u64)
        .into_par_iter()
        .map(|a| {
            let snaps = snapshots(circuit, a);
            let want = expected(circuit, a);
            sites
                .iter()
                .map(|s| {
                    let harms = |qs: &[QubitId]| flip_harms(circuit, &snaps, s.slot, qs, want) as u8 as f64;
                    if s.two_qubit {
                        let q = s.qubits();
                        (4.0 * harms(&[q[0]]) + 4.0 * harms(&[q[1]]) + 4.0 * harms(&[q[0], q[1]])) / 15.0
                    } else {
                        let qs = s.qubits();
                        qs.iter().map(|&q| harms(&[q])).sum::<f64>() * (2.0 / 3.0) / qs.len() as f64
                    }
                })
                .collect()
        })
        .collect();
    let mut harm = vec![0.0; sites.len() * n_addr];
    for (a, row) in per_address.iter().enumerate() {
        for (s, h) in row.iter().enumerate() {
            harm[s * n_addr + a] = *h;
        }
    }
    Ok(FirstOrderTable {
        kinds: sites.iter().map(|s| s.kind).collect(),
        weights: sites.iter().map(|s| s.weight).collect(),
        addresses: n_addr,
        harm,
    })
}
