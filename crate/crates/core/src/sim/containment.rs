//! Error-containment experiments: off-path CSWAP routers and the CNOT-router kickback.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::noise::{flip_harms, snapshots, Pauli};
use super::{is_monomial, simulate_gates, SparseState};
use crate::circuit::{Circuit, Gate, GateKind, QubitId, Stage};
use crate::error::{QlutError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContainmentReport {
    /// Single-Pauli injections tried (X and Y counted separately).
    pub injections: u64,
    pub benign: u64,
    pub harmful: u64,
    /// (address, qubit, layer) of up to 16 harmful injections.
    pub harmful_examples: Vec<(u64, QubitId, usize)>,
}

impl ContainmentReport {
    pub fn benign_fraction(&self) -> f64 {
        if self.injections == 0 {
            1.0
        } else {
            self.benign as f64 / self.injections as f64
        }
    }
}

/// Injects X and Y on every qubit of every router off the query path, before
/// every layer, for every basis address of a bucket-brigade-shaped circuit.
///
/// Routers of tree copy 0 are classified by the address bits that select them;
/// the tree is assumed to be addressed by a_d … a_{n−1}.
pub fn off_path_containment(circuit: &Circuit) -> Result<ContainmentReport> {
    if !is_monomial(circuit.gates()) {
        return Err(QlutError::Unsupported("containment needs a monomial circuit".into()));
    }
    let n = circuit.params.n();
    let d = circuit.params.d();
    let gates = circuit.gates();
    let mut slots: Vec<(usize, usize)> = Vec::new();
    let mut last = usize::MAX;
    for (i, g) in gates.iter().enumerate() {
        if g.layer != last {
            slots.push((i, g.layer));
            last = g.layer;
        }
    }
    slots.push((gates.len(), circuit.depth()));

    let routers: Vec<(QubitId, u32, u64)> = circuit
        .qubits()
        .iter()
        .enumerate()
        .filter_map(|(q, r)| r.router_coords().filter(|c| c.0 == 0).map(|(_, level, pos)| (q, level, pos)))
        .collect();

    // (tried, harmful, examples as (address, qubit, layer)) per address.
    type Tally = (u64, u64, Vec<(u64, QubitId, usize)>);
    let per_address: Vec<Tally> = (0..circuit.params.memory_size())
        .into_par_iter()
        .map(|a| {
            let snaps = snapshots(circuit, a);
            let want = circuit.data.word(a);
            let tree_addr = a & ((1u64 << (n - d)) - 1);
            let depth = n - d;
            let mut tried = 0;
            let mut harmful = 0;
            let mut examples = Vec::new();
            for &(q, level, pos) in &routers {
                let on_path = pos == tree_addr >> (depth - level);
                if on_path {
                    continue;
                }
                for &(slot, layer) in &slots {
                    // X and Y share the same bit-flip pattern; Z never changes a basis outcome.
                    tried += 2;
                    if flip_harms(circuit, &snaps, slot, &[q], want) {
                        harmful += 2;
                        if examples.len() < 16 {
                            examples.push((a, q, layer));
                        }
                    }
                }
            }
            (tried, harmful, examples)
        })
        .collect();
    let mut report = ContainmentReport { injections: 0, benign: 0, harmful: 0, harmful_examples: Vec::new() };
    for (tried, harmful, ex) in per_address {
        report.injections += tried;
        report.harmful += harmful;
        report.benign += tried - harmful;
        for e in ex {
            if report.harmful_examples.len() < 16 {
                report.harmful_examples.push(e);
            }
        }
    }
    Ok(report)
}

/// Preparation of the parent register of the CNOT router.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParentState {
    Zero,
    One,
    /// (|0⟩ + |1⟩)/√2, a superposed address.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CnotRouterOutcome {
    /// Fidelity of the parent's reduced state with its error-free value.
    pub parent_fidelity: f64,
    /// Fidelity of (parent, untouched child) with their error-free state.
    pub other_branch_fidelity: f64,
    /// The parent was corrupted.
    pub harmful: bool,
}

/// Three-qubit CNOT router (parent 0, children 1 and 2): fan out, apply `pauli`
/// on `child`, fan back in, and compare with the error-free run.
pub fn cnot_router_experiment(parent: ParentState, pauli: Pauli, child: usize) -> Result<CnotRouterOutcome> {
    if !(1..=2).contains(&child) {
        return Err(QlutError::InvalidParams(format!("child must be 1 or 2, got {child}")));
    }
    let g = |kind, q: &[usize]| Gate::new(kind, q, Stage::II(0));
    let mut prep = Vec::new();
    match parent {
        ParentState::Zero => {}
        ParentState::One => prep.push(g(GateKind::X, &[0])),
        ParentState::Plus => prep.push(g(GateKind::H, &[0])),
    }
    let fan = [g(GateKind::Cnot, &[0, 1]), g(GateKind::Cnot, &[0, 2])];
    let unfan = [g(GateKind::Cnot, &[0, 2]), g(GateKind::Cnot, &[0, 1])];
    let err: Vec<Gate> = match pauli {
        Pauli::X => vec![g(GateKind::X, &[child])],
        Pauli::Z => vec![g(GateKind::Z, &[child])],
        Pauli::Y => vec![g(GateKind::Z, &[child]), g(GateKind::X, &[child])],
    };
    let ideal_gates: Vec<Gate> = prep.iter().chain(&fan).chain(&unfan).copied().collect();
    let noisy_gates: Vec<Gate> = prep.iter().chain(&fan).chain(&err).chain(&unfan).copied().collect();
    let ideal = simulate_gates(&ideal_gates, SparseState::zero(3)?, 24)?;
    let noisy = simulate_gates(&noisy_gates, SparseState::zero(3)?, 24)?;

    // The error-free run leaves a product state: parent ⊗ |0⟩ ⊗ |0⟩.
    let parent_terms: Vec<(Vec<bool>, Complex64)> = ideal.terms().iter().map(|(b, a)| (vec![b.get(0)], *a)).collect();
    let other = 3 - child;
    let pair_terms: Vec<(Vec<bool>, Complex64)> =
        ideal.terms().iter().map(|(b, a)| (vec![b.get(0), b.get(other)], *a)).collect();
    let parent_fidelity = noisy.subsystem_fidelity(&[0], &parent_terms);
    let other_branch_fidelity = noisy.subsystem_fidelity(&[0, other], &pair_terms);
    Ok(CnotRouterOutcome { parent_fidelity, other_branch_fidelity, harmful: parent_fidelity < 1.0 - 1e-9 })
}
