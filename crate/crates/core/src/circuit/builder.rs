//! The unified lookup (Stages I–III), its multi-bit variants and uncompute.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitKind, Gate, GateKind, QubitId, QubitRole, Stage};
use crate::error::{QlutError, Result};
use crate::params::{Address, ArchParams, DataTable, Readout};

/// Optional circuit simplifications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BuildOptions {
    /// Merge each router's `in` and `L` qubits, dropping the |0⟩-controlled CSWAP.
    #[serde(default)]
    pub merged_router: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    L,
    R,
}

/// Qubit allocation by role plus an append-only gate list.
pub(crate) struct Builder {
    roles: Vec<QubitRole>,
    index: HashMap<QubitRole, QubitId>,
    pub(crate) gates: Vec<Gate>,
    pub(crate) stage: Stage,
    pub(crate) merged: bool,
}

impl Builder {
    pub(crate) fn new(merged: bool) -> Self {
        Self { roles: Vec::new(), index: HashMap::new(), gates: Vec::new(), stage: Stage::I, merged }
    }

    pub(crate) fn q(&mut self, role: QubitRole) -> QubitId {
        if let Some(&id) = self.index.get(&role) {
            return id;
        }
        let id = self.roles.len();
        self.roles.push(role);
        self.index.insert(role, id);
        id
    }

    pub(crate) fn push(&mut self, kind: GateKind, ops: &[QubitId]) {
        self.gates.push(Gate::new(kind, ops, self.stage));
    }

    /// Re-emits `gates[from..to]` in reverse order under the current stage.
    /// Every gate the builders use is self-inverse.
    pub(crate) fn push_reversed(&mut self, from: usize, to: usize) {
        let seg: Vec<Gate> = self.gates[from..to].iter().rev().copied().collect();
        for mut g in seg {
            g.stage = self.stage;
            self.gates.push(g);
        }
    }

    pub(crate) fn into_parts(self) -> (Vec<QubitRole>, Vec<Gate>) {
        (self.roles, self.gates)
    }

    // Router qubits.

    pub(crate) fn t(&mut self, copy: u32, level: u32, pos: u64) -> QubitId {
        self.q(QubitRole::RouterStatus { copy, level, pos })
    }
    pub(crate) fn inp(&mut self, copy: u32, level: u32, pos: u64) -> QubitId {
        self.q(QubitRole::RouterInput { copy, level, pos })
    }
    pub(crate) fn arm(&mut self, copy: u32, level: u32, pos: u64, side: Side) -> QubitId {
        match side {
            Side::L if self.merged => self.inp(copy, level, pos),
            Side::L => self.q(QubitRole::RouterLeft { copy, level, pos }),
            Side::R => self.q(QubitRole::RouterRight { copy, level, pos }),
        }
    }
    pub(crate) fn input(&mut self, copy: u32) -> QubitId {
        self.q(QubitRole::Input { copy })
    }

    /// The CSWAP pair of one router.
    pub(crate) fn router(&mut self, copy: u32, level: u32, pos: u64) {
        let t = self.t(copy, level, pos);
        let i = self.inp(copy, level, pos);
        if !self.merged {
            let l = self.arm(copy, level, pos, Side::L);
            self.push(GateKind::Cswap { negated: true }, &[t, i, l]);
        }
        let r = self.arm(copy, level, pos, Side::R);
        self.push(GateKind::Cswap { negated: false }, &[t, i, r]);
    }

    /// Long-range swaps from every level-`k` arm into the child router's input.
    pub(crate) fn links(&mut self, copy: u32, k: u32) {
        for p in 0..(1u64 << k) {
            for (side, child) in [(Side::L, 2 * p), (Side::R, 2 * p + 1)] {
                let a = self.arm(copy, k, p, side);
                let c = self.inp(copy, k + 1, child);
                self.push(GateKind::LongRangeSwap, &[a, c]);
            }
        }
    }

    /// Moves the content of `input` to the `in` qubit of the path router at level `l`.
    pub(crate) fn descend(&mut self, copy: u32, l: u32) {
        let input = self.input(copy);
        let in0 = self.inp(copy, 0, 0);
        self.push(GateKind::Swap, &[input, in0]);
        for k in 0..l {
            for p in 0..(1u64 << k) {
                self.router(copy, k, p);
            }
            self.links(copy, k);
        }
    }

    /// Routes `input` to the leaf slot of a depth-`depth` tree.
    pub(crate) fn route_down(&mut self, copy: u32, depth: u32) {
        if depth == 0 {
            return;
        }
        self.descend(copy, depth - 1);
        for p in 0..(1u64 << (depth - 1)) {
            self.router(copy, depth - 1, p);
        }
    }

    pub(crate) fn route_up(&mut self, copy: u32, depth: u32) {
        let start = self.gates.len();
        self.route_down(copy, depth);
        let end = self.gates.len();
        let seg: Vec<Gate> = self.gates.drain(start..end).rev().collect();
        self.gates.extend(seg);
    }

    /// Leaf slot `j` of a depth-`depth` tree; the input itself when the tree is empty.
    pub(crate) fn leaf(&mut self, copy: u32, depth: u32, j: u64) -> QubitId {
        if depth == 0 {
            return self.input(copy);
        }
        let side = if j % 2 == 0 { Side::L } else { Side::R };
        self.arm(copy, depth - 1, j / 2, side)
    }

    /// Binomial CNOT fan-out from `nodes[0]` to the rest.
    pub(crate) fn fan(&mut self, nodes: &[QubitId]) {
        let mut span = 1;
        while span < nodes.len() {
            for v in 0..span.min(nodes.len() - span) {
                self.push(GateKind::LongRangeCnot, &[nodes[v], nodes[v + span]]);
            }
            span *= 2;
        }
    }

    /// Bucket-brigade address setting: route `addr` to level `l` and park it in the statuses.
    pub(crate) fn load_level(&mut self, copy: u32, l: u32, addr: QubitId) {
        let input = self.input(copy);
        self.push(GateKind::LongRangeSwap, &[addr, input]);
        self.descend(copy, l);
        for p in 0..(1u64 << l) {
            let i = self.inp(copy, l, p);
            let t = self.t(copy, l, p);
            self.push(GateKind::Swap, &[i, t]);
        }
    }
}

/// Bits of repetition index `i`, most significant first, over `d` bits.
fn rep_bit(i: u64, z: u32, d: u32) -> bool {
    Address::new(d, i).bit(z)
}

pub(crate) struct Ladder {
    d: u32,
    pub(crate) lin: Vec<QubitId>,
    /// Target of ladder level k (k ≥ 1, or 0 when d = 1); the last one is q.
    targets: Vec<QubitId>,
}

impl Ladder {
    pub(crate) fn new(b: &mut Builder, d: u32) -> Self {
        let lin = (0..d).map(|z| b.q(QubitRole::LinearRouter { z })).collect();
        let mut targets = vec![usize::MAX; d.max(1) as usize];
        if d >= 1 {
            for k in 1..d.saturating_sub(1) {
                targets[k as usize] = b.q(QubitRole::LadderAncilla { level: k });
            }
            targets[(d - 1) as usize] = b.q(QubitRole::ControlQ { copy: 0 });
        }
        Self { d, lin, targets }
    }

    pub(crate) fn q(&self) -> QubitId {
        self.targets[(self.d - 1) as usize]
    }

    /// Computes (or uncomputes) levels `from..d` for repetition `i`.
    pub(crate) fn levels(&self, b: &mut Builder, i: u64, from: u32, reverse: bool) {
        let d = self.d;
        let from = if d == 1 { 0 } else { from.max(1) };
        let mut flip: Vec<u32> = (from..d).filter(|&z| !rep_bit(i, z, d)).collect();
        if from == 1 && !rep_bit(i, 0, d) {
            flip.insert(0, 0);
        }
        for &z in &flip {
            b.push(GateKind::X, &[self.lin[z as usize]]);
        }
        let mut ops: Vec<(GateKind, Vec<QubitId>)> = Vec::new();
        if d == 1 {
            ops.push((GateKind::Cnot, vec![self.lin[0], self.targets[0]]));
        } else {
            for k in from..d {
                let c1 = if k == 1 { self.lin[0] } else { self.targets[(k - 1) as usize] };
                ops.push((GateKind::Ccnot, vec![c1, self.lin[k as usize], self.targets[k as usize]]));
            }
        }
        if reverse {
            ops.reverse();
        }
        for (kind, o) in ops {
            b.push(kind, &o);
        }
        for &z in &flip {
            b.push(GateKind::X, &[self.lin[z as usize]]);
        }
    }
}

/// First ladder level whose value differs between repetitions `prev` and `next`.
fn first_changed(prev: u64, next: u64, d: u32) -> u32 {
    (0..d).find(|&z| rep_bit(prev, z, d) != rep_bit(next, z, d)).unwrap_or(d)
}

fn check(params: &ArchParams, data: &DataTable, readout: Readout) -> Result<()> {
    if params.readout() != readout {
        return Err(QlutError::InvalidParams(format!(
            "builder expects {readout:?} readout, parameters say {:?}",
            params.readout()
        )));
    }
    data.check_for(params)
}

/// Single-bit unified lookup.
pub fn build_unified_lookup(params: &ArchParams, data: &DataTable) -> Result<Circuit> {
    check(params, data, Readout::SingleBit)?;
    build_general(params, data, BuildOptions::default())
}

/// b copies of the CSWAP/CNOT/Stage-III structure sharing one set of linear routers.
pub fn build_multi_bit_parallel(params: &ArchParams, data: &DataTable) -> Result<Circuit> {
    check(params, data, Readout::ParallelMultiBit)?;
    build_general(params, data, BuildOptions::default())
}

/// Deeper CNOT trees and b Stage-III passes through one tree.
pub fn build_multi_bit_sequential(params: &ArchParams, data: &DataTable) -> Result<Circuit> {
    check(params, data, Readout::SequentialMultiBit)?;
    build_general(params, data, BuildOptions::default())
}

/// Dispatches on the readout mode, with options.
pub fn build_lookup(params: &ArchParams, data: &DataTable, opts: BuildOptions) -> Result<Circuit> {
    data.check_for(params)?;
    build_general(params, data, opts)
}

fn build_general(p: &ArchParams, data: &DataTable, opts: BuildOptions) -> Result<Circuit> {
    let (n, d, dp, dfull) = (p.n(), p.d(), p.d_prime(), p.d_prime_total());
    let gamma = p.gamma();
    let lambda = p.lambda();
    let bw = p.b() as u32;
    let sequential = p.readout() == Readout::SequentialMultiBit;
    let copies = if p.readout() == Readout::ParallelMultiBit { bw } else { 1 };
    // CNOT-tree leaves per block: γ, or γ·b when every leaf feeds b data bits.
    let tree_size = if sequential { gamma * bw as u64 } else { gamma };
    let mut b = Builder::new(opts.merged_router);

    let addr = |b: &mut Builder, z: u32, copy: u32| b.q(QubitRole::AddressBit { bit: z, copy });
    let address: Vec<QubitId> = (0..n).map(|z| addr(&mut b, z, 0)).collect();

    // Stage I.
    b.stage = Stage::I;
    let ladder = (d >= 1).then(|| Ladder::new(&mut b, d));
    if let Some(l) = &ladder {
        for z in 0..d {
            b.push(GateKind::Swap, &[address[z as usize], l.lin[z as usize]]);
        }
    }
    for w in 1..copies {
        for z in d..n {
            let c = addr(&mut b, z, w);
            b.push(GateKind::LongRangeCnot, &[address[z as usize], c]);
        }
    }
    for w in 0..copies {
        for l in 0..dp {
            let a = addr(&mut b, d + l, w);
            b.load_level(w, l, a);
        }
    }

    // Stage II.
    let reps = p.repetitions();
    for i in 0..reps {
        b.stage = Stage::II(i);
        let q0 = match &ladder {
            Some(l) => {
                let from = if i == 0 { 0 } else { first_changed(i - 1, i, d) };
                l.levels(&mut b, i, from, false);
                l.q()
            }
            None => {
                let input = b.input(0);
                b.push(GateKind::X, &[input]);
                input
            }
        };
        let dist_start = b.gates.len();
        let qs: Vec<QubitId> = (0..copies)
            .map(|w| match (w, &ladder) {
                (0, _) => q0,
                (_, Some(_)) => b.q(QubitRole::ControlQ { copy: w }),
                (_, None) => b.input(w),
            })
            .collect();
        for &qw in &qs[1..] {
            b.push(GateKind::LongRangeCnot, &[q0, qw]);
        }
        if ladder.is_some() {
            for (w, &qw) in qs.iter().enumerate() {
                let input = b.input(w as u32);
                b.push(GateKind::LongRangeSwap, &[qw, input]);
            }
        }
        let dist_end = b.gates.len();

        for w in 0..copies {
            let route_start = b.gates.len();
            b.route_down(w, dp);
            let route_end = b.gates.len();
            let fan_start = b.gates.len();
            let mut nodes: Vec<Vec<QubitId>> = Vec::new();
            for s in 0..(1u64 << dp) {
                let root = b.leaf(w, dp, s);
                let mut ns = vec![root];
                ns.extend((1..tree_size).map(|v| b.q(QubitRole::CnotTreeNode { copy: w, block: s, node: v })));
                b.fan(&ns);
                nodes.push(ns);
            }
            let fan_end = b.gates.len();
            for s in 0..(1u64 << dp) {
                for u in 0..gamma {
                    let j = s * gamma + u;
                    let bits: Vec<u32> = if sequential { (0..bw).collect() } else { vec![w] };
                    for wb in bits {
                        let v = if sequential { u * bw as u64 + wb as u64 } else { u };
                        if data.bit(lambda * i + j, wb) {
                            let target = b.q(QubitRole::IntermediateQ { j, word: wb });
                            b.push(GateKind::Cnot, &[nodes[s as usize][v as usize], target]);
                        }
                    }
                }
            }
            b.push_reversed(fan_start, fan_end);
            b.push_reversed(route_start, route_end);
        }
        b.push_reversed(dist_start, dist_end);
        match &ladder {
            Some(l) => {
                let upto = if i + 1 == reps { 0 } else { first_changed(i, i + 1, d) };
                l.levels(&mut b, i, upto, true);
            }
            None => {
                let input = b.input(0);
                b.push(GateKind::X, &[input]);
            }
        }
    }

    // Stage III.
    let mut outputs = vec![usize::MAX; bw as usize];
    let move_op = if p.g() == 0 { GateKind::Swap } else { GateKind::LongRangeSwap };
    if sequential {
        // Allocated on first use so that b = 1 matches the single-bit qubit order.
        let chain = |b: &mut Builder, slot: usize| b.q(QubitRole::Bus { copy: 0, slot: slot as u32 });
        for w in 0..bw {
            b.stage = Stage::III(w);
            if w == 0 {
                for l in dp..dfull {
                    let a = address[(d + l) as usize];
                    b.load_level(0, l, a);
                }
            }
            for j in 0..lambda {
                if w >= 1 {
                    let src = b.q(QubitRole::IntermediateQ { j, word: w });
                    let dst = b.q(QubitRole::IntermediateQ { j, word: 0 });
                    b.push(GateKind::LongRangeSwap, &[src, dst]);
                }
            }
            let move_start = b.gates.len();
            for j in 0..lambda {
                let qj = b.q(QubitRole::IntermediateQ { j, word: 0 });
                let slot = b.leaf(0, dfull, j);
                b.push(move_op, &[qj, slot]);
            }
            let move_end = b.gates.len();
            b.route_up(0, dfull);
            let input = b.input(0);
            let head = chain(&mut b, 0);
            b.push(GateKind::Swap, &[input, head]);
            for c in 0..(bw - 1 - w) as usize {
                let (x, y) = (chain(&mut b, c), chain(&mut b, c + 1));
                b.push(GateKind::Swap, &[x, y]);
            }
            outputs[w as usize] = chain(&mut b, (bw - 1 - w) as usize);
            if w + 1 < bw {
                // Put the untaken leaves back so the next pass starts from parked registers.
                b.route_down(0, dfull);
                b.push_reversed(move_start, move_end);
            }
        }
    } else {
        for w in 0..copies {
            b.stage = Stage::III(w);
            for l in dp..dfull {
                let a = addr(&mut b, d + l, w);
                b.load_level(w, l, a);
            }
            for j in 0..lambda {
                let qj = b.q(QubitRole::IntermediateQ { j, word: w });
                let slot = b.leaf(w, dfull, j);
                b.push(move_op, &[qj, slot]);
            }
            b.route_up(w, dfull);
            let input = b.input(w);
            let bus = b.q(QubitRole::Bus { copy: w, slot: 0 });
            b.push(GateKind::Swap, &[input, bus]);
            outputs[w as usize] = bus;
        }
    }

    let (roles, gates) = b.into_parts();
    Ok(Circuit::assemble(*p, data.clone(), CircuitKind::Unified, roles, gates, outputs, address, false))
}

/// Appends the copy-out, reverse Stage III, a second Stage II and reverse Stage I.
///
/// The result maps |a⟩|0…0⟩ to |a⟩|x_a⟩ on (address, output) with every other qubit back at |0⟩.
pub fn build_uncompute(circuit: &Circuit) -> Result<Circuit> {
    if circuit.is_uncomputed() {
        return Err(QlutError::Unsupported("circuit is already uncomputed".into()));
    }
    let mut b = Builder::new(false);
    for &r in circuit.qubits() {
        b.q(r);
    }
    b.gates = circuit.gates().to_vec();
    let len = b.gates.len();
    let stage_of = |g: &Gate| g.stage;
    let range = |pred: &dyn Fn(Stage) -> bool| -> Vec<usize> {
        (0..len).filter(|&i| pred(stage_of(&circuit.gates()[i]))).collect()
    };
    let s1 = range(&|s| s == Stage::I);
    let s2 = range(&|s| matches!(s, Stage::II(_)));
    let s3 = range(&|s| matches!(s, Stage::III(_)));

    b.stage = Stage::Out;
    let mut outputs = Vec::new();
    for (w, &bus) in circuit.outputs().iter().enumerate() {
        let out = b.q(QubitRole::Output { bit: w as u32 });
        b.push(GateKind::Cnot, &[bus, out]);
        outputs.push(out);
    }
    let emit = |b: &mut Builder, idx: &[usize], reverse: bool| {
        let mut seq: Vec<Gate> = idx.iter().map(|&i| circuit.gates()[i]).collect();
        if reverse {
            seq.reverse();
        }
        for g in seq {
            b.gates.push(g);
        }
    };
    emit(&mut b, &s3, true);
    emit(&mut b, &s2, false);
    emit(&mut b, &s1, true);
    let (roles, gates) = b.into_parts();
    Ok(Circuit::assemble(
        circuit.params,
        circuit.data.clone(),
        circuit.kind,
        roles,
        gates,
        outputs,
        circuit.address_qubits().to_vec(),
        true,
    ))
}
