//! Gate-level IR and the lookup builders.

mod builder;
mod reference;

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::params::{ArchParams, DataTable};

pub use builder::{
    build_lookup, build_multi_bit_parallel, build_multi_bit_sequential, build_uncompute, build_unified_lookup,
    BuildOptions,
};
pub use reference::{
    build_cnot_tree, build_cswap_router, build_linear_routers, build_reference, linear_router_circuit, ReferenceKind,
};

pub type QubitId = usize;

/// What a qubit is for, with its structural coordinates.
///
/// Tree roles carry `copy` (parallel readout replicates the trees), the router
/// `level` and the heap position `pos` within that level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "camelCase")]
pub enum QubitRole {
    AddressBit {
        bit: u32,
        copy: u32,
    },
    RouterStatus {
        copy: u32,
        level: u32,
        pos: u64,
    },
    RouterInput {
        copy: u32,
        level: u32,
        pos: u64,
    },
    RouterLeft {
        copy: u32,
        level: u32,
        pos: u64,
    },
    RouterRight {
        copy: u32,
        level: u32,
        pos: u64,
    },
    LinearRouter {
        z: u32,
    },
    /// Clean ancilla of the multi-controlled-NOT ladder.
    LadderAncilla {
        level: u32,
    },
    ControlQ {
        copy: u32,
    },
    IntermediateQ {
        j: u64,
        word: u32,
    },
    /// Node 0 of every CNOT tree is the CSWAP-tree leaf slot and has no role of its own.
    CnotTreeNode {
        copy: u32,
        block: u64,
        node: u64,
    },
    Bus {
        copy: u32,
        slot: u32,
    },
    Input {
        copy: u32,
    },
    /// Clean target the uncomputed lookup copies its answer into.
    Output {
        bit: u32,
    },
    GhzAncilla {
        link: u64,
    },
    BellAncilla {
        link: u64,
    },
}

impl QubitRole {
    pub fn is_router(&self) -> bool {
        matches!(
            self,
            QubitRole::RouterStatus { .. }
                | QubitRole::RouterInput { .. }
                | QubitRole::RouterLeft { .. }
                | QubitRole::RouterRight { .. }
        )
    }

    /// (copy, level, pos) for router qubits.
    pub fn router_coords(&self) -> Option<(u32, u32, u64)> {
        match *self {
            QubitRole::RouterStatus { copy, level, pos }
            | QubitRole::RouterInput { copy, level, pos }
            | QubitRole::RouterLeft { copy, level, pos }
            | QubitRole::RouterRight { copy, level, pos } => Some((copy, level, pos)),
            _ => None,
        }
    }
}

impl fmt::Display for QubitRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            QubitRole::AddressBit { bit, copy } => write!(f, "a{bit}^{copy}"),
            QubitRole::RouterStatus { copy, level, pos } => write!(f, "t[{copy}:{level}.{pos}]"),
            QubitRole::RouterInput { copy, level, pos } => write!(f, "in[{copy}:{level}.{pos}]"),
            QubitRole::RouterLeft { copy, level, pos } => write!(f, "L[{copy}:{level}.{pos}]"),
            QubitRole::RouterRight { copy, level, pos } => write!(f, "R[{copy}:{level}.{pos}]"),
            QubitRole::LinearRouter { z } => write!(f, "lin{z}"),
            QubitRole::LadderAncilla { level } => write!(f, "anc{level}"),
            QubitRole::ControlQ { copy } => write!(f, "q^{copy}"),
            QubitRole::IntermediateQ { j, word } => write!(f, "q'{j}^{word}"),
            QubitRole::CnotTreeNode { copy, block, node } => write!(f, "c[{copy}:{block}.{node}]"),
            QubitRole::Bus { copy, slot } => write!(f, "bus{copy}.{slot}"),
            QubitRole::Input { copy } => write!(f, "input{copy}"),
            QubitRole::Output { bit } => write!(f, "out{bit}"),
            QubitRole::GhzAncilla { link } => write!(f, "ghz{link}"),
            QubitRole::BellAncilla { link } => write!(f, "bell{link}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Z,
    H,
    Cnot,
    Swap,
    /// Operands (control, a, b). `negated` swaps when the control is |0⟩.
    Cswap {
        negated: bool,
    },
    Ccnot,
    /// Data load resolved at build time: X when `bit`, identity otherwise.
    ClassicallyControlledX {
        bit: bool,
    },
    Reset,
    LongRangeCnot,
    LongRangeSwap,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::X | GateKind::Z | GateKind::H | GateKind::ClassicallyControlledX { .. } | GateKind::Reset => 1,
            GateKind::Cnot | GateKind::Swap | GateKind::LongRangeCnot | GateKind::LongRangeSwap => 2,
            GateKind::Cswap { .. } | GateKind::Ccnot => 3,
        }
    }

    pub fn is_long_range(&self) -> bool {
        matches!(self, GateKind::LongRangeCnot | GateKind::LongRangeSwap)
    }

    /// Operand order does not matter.
    pub fn is_symmetric(&self) -> bool {
        matches!(self, GateKind::Swap | GateKind::LongRangeSwap)
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::Cnot => "CNOT",
            GateKind::Swap => "SWAP",
            GateKind::Cswap { .. } => "CSWAP",
            GateKind::Ccnot => "CCNOT",
            GateKind::ClassicallyControlledX { bit: false } => "CX0",
            GateKind::ClassicallyControlledX { bit: true } => "CX1",
            GateKind::Reset => "RESET",
            GateKind::LongRangeCnot => "LRCNOT",
            GateKind::LongRangeSwap => "LRSWAP",
        }
    }
}

/// Which lookup stage emitted a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    I,
    II(u64),
    III(u32),
    /// Copy of the answer into the clean output register before uncomputing.
    Out,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::I => f.write_str("I"),
            Stage::II(i) => write!(f, "II.{i}"),
            Stage::III(w) => write!(f, "III.{w}"),
            Stage::Out => f.write_str("OUT"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    ops: [QubitId; 3],
    pub layer: usize,
    pub stage: Stage,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[QubitId], stage: Stage) -> Self {
        assert_eq!(qubits.len(), kind.arity(), "{} takes {} operands", kind.name(), kind.arity());
        let mut ops = [0; 3];
        ops[..qubits.len()].copy_from_slice(qubits);
        debug_assert!(
            (0..qubits.len()).all(|i| (i + 1..qubits.len()).all(|j| qubits[i] != qubits[j])),
            "repeated operand in {kind:?} {qubits:?}"
        );
        Self { kind, ops, layer: 0, stage }
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.ops[..self.kind.arity()]
    }
}

/// T gates per non-Clifford gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Decomposition {
    /// Standard Clifford+T: 7 T per CSWAP and per CCNOT.
    #[default]
    #[serde(rename = "t7")]
    T7,
    /// Temporary-AND style accounting: 4 T each.
    #[serde(rename = "t4")]
    T4,
}

impl Decomposition {
    pub fn t_per_cswap(&self) -> u64 {
        match self {
            Decomposition::T7 => 7,
            Decomposition::T4 => 4,
        }
    }
    pub fn t_per_ccnot(&self) -> u64 {
        self.t_per_cswap()
    }
}

impl std::str::FromStr for Decomposition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "t7" => Ok(Decomposition::T7),
            "t4" => Ok(Decomposition::T4),
            _ => Err(format!("unknown decomposition {s:?} (expected t7 or t4)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResourceCounts {
    pub t_count: u64,
    pub qubit_count: usize,
    pub query_depth: usize,
    pub gate_histogram: BTreeMap<String, usize>,
}

/// Which builder produced a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircuitKind {
    Unified,
    Reference(ReferenceKind),
}

/// A built circuit: role table, layer-ordered gates and the classical inputs.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub params: ArchParams,
    pub data: DataTable,
    pub kind: CircuitKind,
    qubits: Vec<QubitRole>,
    gates: Vec<Gate>,
    /// Qubit holding bit w of the answer.
    outputs: Vec<QubitId>,
    /// a_0 … a_{n−1} of the queried address.
    address: Vec<QubitId>,
    uncomputed: bool,
    depth: usize,
}

impl Circuit {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        params: ArchParams,
        data: DataTable,
        kind: CircuitKind,
        qubits: Vec<QubitRole>,
        gates: Vec<Gate>,
        outputs: Vec<QubitId>,
        address: Vec<QubitId>,
        uncomputed: bool,
    ) -> Self {
        let (gates, depth) = schedule_asap(gates, qubits.len());
        Self { params, data, kind, qubits, gates, outputs, address, uncomputed, depth }
    }

    pub fn qubits(&self) -> &[QubitRole] {
        &self.qubits
    }
    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }
    pub fn role(&self, q: QubitId) -> QubitRole {
        self.qubits[q]
    }
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
    pub fn outputs(&self) -> &[QubitId] {
        &self.outputs
    }
    pub fn address_qubits(&self) -> &[QubitId] {
        &self.address
    }
    pub fn is_uncomputed(&self) -> bool {
        self.uncomputed
    }
    /// Number of logical layers.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn find(&self, role: &QubitRole) -> Option<QubitId> {
        self.qubits.iter().position(|r| r == role)
    }

    pub fn role_index(&self) -> HashMap<QubitRole, QubitId> {
        self.qubits.iter().enumerate().map(|(i, r)| (*r, i)).collect()
    }

    /// Stage I and II gates in execution order. Layers interleave stages, but
    /// the subsequence is itself a valid order for those gates.
    pub fn stage_two_prefix(&self) -> Vec<Gate> {
        self.gates.iter().filter(|g| matches!(g.stage, Stage::I | Stage::II(_))).copied().collect()
    }

    pub fn count_resources(&self, decomposition: Decomposition) -> ResourceCounts {
        let mut hist = BTreeMap::new();
        let mut t = 0;
        for g in &self.gates {
            *hist.entry(g.kind.name().to_string()).or_insert(0) += 1;
            t += match g.kind {
                GateKind::Cswap { .. } => decomposition.t_per_cswap(),
                GateKind::Ccnot => decomposition.t_per_ccnot(),
                _ => 0,
            };
        }
        ResourceCounts { t_count: t, qubit_count: self.qubits.len(), query_depth: self.depth, gate_histogram: hist }
    }

    /// Checks that no layer touches a qubit twice.
    pub fn check_layer_disjointness(&self) -> Result<(), String> {
        let mut seen: HashMap<QubitId, usize> = HashMap::new();
        let mut last_layer = 0;
        for (idx, g) in self.gates.iter().enumerate() {
            if g.layer < last_layer {
                return Err(format!("gate {idx} is out of layer order"));
            }
            last_layer = g.layer;
            for &q in g.qubits() {
                if let Some(prev) = seen.insert(q, g.layer) {
                    if prev == g.layer {
                        return Err(format!("qubit {q} used twice in layer {}", g.layer));
                    }
                }
            }
        }
        Ok(())
    }

    /// Gate multiset keyed by kind and operand roles, ignoring ids and layers.
    pub fn role_multiset(&self) -> BTreeMap<(GateKind, Vec<QubitRole>), usize> {
        let mut m = BTreeMap::new();
        for g in &self.gates {
            let mut roles: Vec<QubitRole> = g.qubits().iter().map(|&q| self.qubits[q]).collect();
            if g.kind.is_symmetric() {
                roles.sort();
            }
            *m.entry((g.kind, roles)).or_insert(0) += 1;
        }
        m
    }

    /// One gate per line: `LAYER k STAGE s KIND ids [len=m]`.
    ///
    /// `lengths` maps gate index to the resolved path length of long-range gates.
    pub fn export_gate_list(&self, lengths: Option<&HashMap<usize, u64>>) -> String {
        let mut out = String::new();
        for (idx, g) in self.gates.iter().enumerate() {
            write!(out, "LAYER {} STAGE {} {}", g.layer, g.stage, g.kind.name()).unwrap();
            for (k, q) in g.qubits().iter().enumerate() {
                let neg = matches!(g.kind, GateKind::Cswap { negated: true }) && k == 0;
                write!(out, " {}{}", if neg { "!" } else { "" }, q).unwrap();
            }
            if let Some(m) = lengths.and_then(|l| l.get(&idx)) {
                write!(out, " len={m}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Greedy as-soon-as-possible layering; returns gates stably sorted by layer.
fn schedule_asap(mut gates: Vec<Gate>, num_qubits: usize) -> (Vec<Gate>, usize) {
    let mut free = vec![0usize; num_qubits];
    let mut depth = 0;
    for g in gates.iter_mut() {
        let layer = g.qubits().iter().map(|&q| free[q]).max().unwrap_or(0);
        for &q in g.qubits() {
            free[q] = layer + 1;
        }
        g.layer = layer;
        depth = depth.max(layer + 1);
    }
    gates.sort_by_key(|g| g.layer);
    (gates, depth)
}
