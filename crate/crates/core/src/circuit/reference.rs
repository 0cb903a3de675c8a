//! Reference architectures and the standalone router primitives.

use serde::{Deserialize, Serialize};

use super::builder::{Builder, Ladder};
use super::{build_lookup, BuildOptions, Circuit, CircuitKind, Gate, GateKind, QubitId, QubitRole, Stage};
use crate::error::{QlutError, Result};
use crate::params::{ArchParams, DataTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReferenceKind {
    FanOut,
    BucketBrigade,
    SelectSwap,
}

/// A gate sequence over its own small register, for exercising primitives alone.
#[derive(Debug, Clone)]
pub struct Fragment {
    pub qubits: Vec<QubitRole>,
    pub gates: Vec<Gate>,
}

impl Fragment {
    fn from_builder(b: Builder) -> Self {
        let (qubits, gates) = b.into_parts();
        Self { qubits, gates }
    }

    pub fn find(&self, role: &QubitRole) -> Option<QubitId> {
        self.qubits.iter().position(|r| r == role)
    }
}

/// CSWAP(¬t: in↔L) then CSWAP(t: in↔R).
pub fn build_cswap_router(t: QubitId, input: QubitId, left: QubitId, right: QubitId) -> Vec<Gate> {
    vec![
        Gate::new(GateKind::Cswap { negated: true }, &[t, input, left], Stage::I),
        Gate::new(GateKind::Cswap { negated: false }, &[t, input, right], Stage::I),
    ]
}

/// Loads a_0 … a_{d−1} into the linear routers and computes q_i = [i = a_0…a_{d−1}].
///
/// The register holds `AddressBit`s, `LinearRouter`s, ladder ancillas and `ControlQ`.
/// With d = 0 the indicator is the constant 1, produced by an X on `ControlQ`.
pub fn build_linear_routers(d: u32, i: u64) -> Fragment {
    let mut b = Builder::new(false);
    let address: Vec<QubitId> = (0..d).map(|z| b.q(QubitRole::AddressBit { bit: z, copy: 0 })).collect();
    if d == 0 {
        let q = b.q(QubitRole::ControlQ { copy: 0 });
        b.push(GateKind::X, &[q]);
        return Fragment::from_builder(b);
    }
    let ladder = Ladder::new(&mut b, d);
    for (&a, &l) in address.iter().zip(&ladder.lin).take(d as usize) {
        b.push(GateKind::Swap, &[a, l]);
    }
    b.stage = Stage::II(i);
    ladder.levels(&mut b, i, 0, false);
    Fragment::from_builder(b)
}

/// Alias kept for callers that think of the linear routers as a circuit.
pub fn linear_router_circuit(d: u32, i: u64) -> Fragment {
    build_linear_routers(d, i)
}

/// Fans `Input{0}` out to γ − 1 `CnotTreeNode`s, CNOTs only.
pub fn build_cnot_tree(gamma: u64) -> Result<Fragment> {
    if gamma == 0 || !gamma.is_power_of_two() {
        return Err(QlutError::NonPowerOfTwo { name: "gamma", value: gamma });
    }
    let mut b = Builder::new(false);
    let mut nodes = vec![b.input(0)];
    nodes.extend((1..gamma).map(|v| b.q(QubitRole::CnotTreeNode { copy: 0, block: 0, node: v })));
    b.stage = Stage::II(0);
    b.fan(&nodes);
    Ok(Fragment::from_builder(b))
}

pub fn build_reference(kind: ReferenceKind, n_mem: u64, data: &DataTable) -> Result<Circuit> {
    match kind {
        ReferenceKind::BucketBrigade => bucket_brigade(n_mem, data),
        ReferenceKind::FanOut => fan_out(n_mem, data),
        ReferenceKind::SelectSwap => {
            let n = ArchParams::single(n_mem, 1, 1)?.n();
            let lambda = 1u64 << n.div_ceil(2);
            let p = ArchParams::single(n_mem, lambda, lambda)?;
            let mut c = build_lookup(&p, data, BuildOptions::default())?;
            c.kind = CircuitKind::Reference(ReferenceKind::SelectSwap);
            Ok(c)
        }
    }
}

fn t(b: &mut Builder, level: u32, pos: u64) -> QubitId {
    b.q(QubitRole::RouterStatus { copy: 0, level, pos })
}
fn inp(b: &mut Builder, level: u32, pos: u64) -> QubitId {
    b.q(QubitRole::RouterInput { copy: 0, level, pos })
}
fn left(b: &mut Builder, level: u32, pos: u64) -> QubitId {
    b.q(QubitRole::RouterLeft { copy: 0, level, pos })
}
fn right(b: &mut Builder, level: u32, pos: u64) -> QubitId {
    b.q(QubitRole::RouterRight { copy: 0, level, pos })
}

fn level_cswaps(b: &mut Builder, level: u32) {
    for p in 0..(1u64 << level) {
        let (tq, iq, lq, rq) = (t(b, level, p), inp(b, level, p), left(b, level, p), right(b, level, p));
        for g in build_cswap_router(tq, iq, lq, rq) {
            b.push(g.kind, g.qubits());
        }
    }
}

fn level_links(b: &mut Builder, level: u32) {
    for p in 0..(1u64 << level) {
        let (lq, rq) = (left(b, level, p), right(b, level, p));
        let (cl, cr) = (inp(b, level + 1, 2 * p), inp(b, level + 1, 2 * p + 1));
        b.push(GateKind::LongRangeSwap, &[lq, cl]);
        b.push(GateKind::LongRangeSwap, &[rq, cr]);
    }
}

/// Gates taking the input qubit to the leaf arms of the depth-n tree.
fn bb_route_down(b: &mut Builder, n: u32) -> Vec<Gate> {
    let start = b.gates.len();
    let input = b.input(0);
    let in0 = inp(b, 0, 0);
    b.push(GateKind::Swap, &[input, in0]);
    for level in 0..n {
        level_cswaps(b, level);
        if level + 1 < n {
            level_links(b, level);
        }
    }
    b.gates.drain(start..).collect()
}

fn leaf_arm(b: &mut Builder, n: u32, j: u64) -> QubitId {
    if j % 2 == 0 {
        left(b, n - 1, j / 2)
    } else {
        right(b, n - 1, j / 2)
    }
}

/// Probe-based bucket brigade: address into a depth-n CSWAP tree, a |1⟩ probe
/// copies the addressed datum into its q′ register, then q′ rides the tree out.
fn bucket_brigade(n_mem: u64, data: &DataTable) -> Result<Circuit> {
    let params = ArchParams::single(n_mem, n_mem, 1)?;
    data.check_for(&params)?;
    let n = params.n();
    if n == 0 {
        return Err(QlutError::InvalidParams("bucket brigade needs N >= 2".into()));
    }
    let mut b = Builder::new(false);
    let address: Vec<QubitId> = (0..n).map(|z| b.q(QubitRole::AddressBit { bit: z, copy: 0 })).collect();
    let input = b.input(0);

    b.stage = Stage::I;
    for level in 0..n {
        b.push(GateKind::LongRangeSwap, &[address[level as usize], input]);
        let in0 = inp(&mut b, 0, 0);
        b.push(GateKind::Swap, &[input, in0]);
        for k in 0..level {
            level_cswaps(&mut b, k);
            level_links(&mut b, k);
        }
        for p in 0..(1u64 << level) {
            let (iq, tq) = (inp(&mut b, level, p), t(&mut b, level, p));
            b.push(GateKind::Swap, &[iq, tq]);
        }
    }

    b.stage = Stage::II(0);
    b.push(GateKind::X, &[input]);
    let down = bb_route_down(&mut b, n);
    b.gates.extend(down.iter().copied());
    for j in 0..n_mem {
        if data.bit(j, 0) {
            let arm = leaf_arm(&mut b, n, j);
            let qj = b.q(QubitRole::IntermediateQ { j, word: 0 });
            b.push(GateKind::Cnot, &[arm, qj]);
        }
    }
    b.gates.extend(down.iter().rev().copied());
    b.push(GateKind::X, &[input]);

    b.stage = Stage::III(0);
    for j in 0..n_mem {
        let qj = b.q(QubitRole::IntermediateQ { j, word: 0 });
        let arm = leaf_arm(&mut b, n, j);
        b.push(GateKind::Swap, &[qj, arm]);
    }
    let up: Vec<Gate> = bb_route_down(&mut b, n)
        .into_iter()
        .rev()
        .map(|mut g| {
            g.stage = Stage::III(0);
            g
        })
        .collect();
    b.gates.extend(up);
    let bus = b.q(QubitRole::Bus { copy: 0, slot: 0 });
    b.push(GateKind::Swap, &[input, bus]);

    let (roles, gates) = b.into_parts();
    Ok(Circuit::assemble(
        params,
        data.clone(),
        CircuitKind::Reference(ReferenceKind::BucketBrigade),
        roles,
        gates,
        vec![bus],
        address,
        false,
    ))
}

/// Fan-out architecture: every level-ℓ router receives a CNOT copy of a_ℓ, the
/// leaves hold the data, and the bus is routed up from the addressed leaf.
///
/// The unaddressed leaves keep their data, so this reference is compute-only.
fn fan_out(n_mem: u64, data: &DataTable) -> Result<Circuit> {
    let params = ArchParams::single(n_mem, n_mem, 1)?;
    data.check_for(&params)?;
    let n = params.n();
    if n == 0 {
        return Err(QlutError::InvalidParams("fan-out needs N >= 2".into()));
    }
    let mut b = Builder::new(false);
    let address: Vec<QubitId> = (0..n).map(|z| b.q(QubitRole::AddressBit { bit: z, copy: 0 })).collect();
    b.stage = Stage::I;
    for level in 0..n {
        let mut nodes = vec![address[level as usize]];
        nodes.extend((0..(1u64 << level)).map(|p| t(&mut b, level, p)));
        b.fan(&nodes);
    }
    b.stage = Stage::II(0);
    for j in 0..n_mem {
        let arm = leaf_arm(&mut b, n, j);
        b.push(GateKind::ClassicallyControlledX { bit: data.bit(j, 0) }, &[arm]);
    }
    b.stage = Stage::III(0);
    let up: Vec<Gate> = bb_route_down(&mut b, n)
        .into_iter()
        .rev()
        .map(|mut g| {
            g.stage = Stage::III(0);
            g
        })
        .collect();
    b.gates.extend(up);
    let input = b.input(0);
    let bus = b.q(QubitRole::Bus { copy: 0, slot: 0 });
    b.push(GateKind::Swap, &[input, bus]);
    let (roles, gates) = b.into_parts();
    Ok(Circuit::assemble(
        params,
        data.clone(),
        CircuitKind::Reference(ReferenceKind::FanOut),
        roles,
        gates,
        vec![bus],
        address,
        false,
    ))
}
