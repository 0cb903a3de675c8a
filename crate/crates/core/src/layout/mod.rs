//! Planar H-tree placement, long-range link classification and the address-setting schedule.

mod error_model;
mod schedule;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, QubitId, QubitRole, Stage};
use crate::error::{QlutError, Result};
use crate::params::{ErrorRates, RateKind, Readout};
use crate::sim::noise::LinkRate;

pub use error_model::{distillation_model, long_range_error, DistillationPlan, DistillationSettings};
pub use schedule::{activation_walk, build_schedule, ActivationWalk, Schedule};

/// Grid point (x, y); y grows upward.
pub type Cell = (i64, i64);

const NEIGHBOURS: [Cell; 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

fn add(a: Cell, b: Cell) -> Cell {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: Cell, b: Cell) -> Cell {
    (a.0 - b.0, a.1 - b.1)
}

fn scale(a: Cell, k: i64) -> Cell {
    (a.0 * k, a.1 * k)
}

/// Left-hand side of a router entered along `v`.
fn perp(v: Cell) -> Cell {
    (v.1, -v.0)
}

pub fn manhattan(a: Cell, b: Cell) -> u64 {
    (a.0 - b.0).unsigned_abs() + (a.1 - b.1).unsigned_abs()
}

/// Router geometry of one H-tree of depth `depth`, root input at the origin.
#[derive(Debug, Clone)]
struct HTree {
    /// Per level, per heap position: (input cell, entry direction).
    nodes: Vec<Vec<(Cell, Cell)>>,
    /// Push every router but the root one column away from x = 0, leaving
    /// the columns beside the bus free.
    widened: bool,
}

impl HTree {
    fn new(depth: u32, widened: bool) -> Self {
        let mut nodes: Vec<Vec<(Cell, Cell)>> = Vec::new();
        if depth == 0 {
            return Self { nodes, widened };
        }
        nodes.push(vec![((0, 0), (0, -1))]);
        for level in 0..depth - 1 {
            let j = depth - 2 - level;
            let offset = 1i64 << (j / 2 + 1);
            let mut next = Vec::with_capacity(nodes[level as usize].len() * 2);
            for &(inp, v) in &nodes[level as usize] {
                for dir in [perp(v), scale(perp(v), -1)] {
                    // The depth-4 tree stretches its upward level-1 links by one
                    // cell to leave room for the address slots above the root.
                    let o = if depth == 4 && level == 1 && dir == (0, 1) { offset + 1 } else { offset };
                    next.push((add(inp, scale(dir, o)), dir));
                }
            }
            nodes.push(next);
        }
        Self { nodes, widened }
    }

    fn spread(&self, c: Cell, level: usize) -> Cell {
        if self.widened && level > 0 {
            (c.0 + c.0.signum(), c.1)
        } else {
            c
        }
    }

    fn cell(&self, role: &QubitRole) -> Option<Cell> {
        let (_, level, pos) = role.router_coords()?;
        let &(inp, v) = self.nodes.get(level as usize)?.get(pos as usize)?;
        let c = match role {
            QubitRole::RouterStatus { .. } => add(inp, v),
            QubitRole::RouterInput { .. } => inp,
            QubitRole::RouterLeft { .. } => add(inp, perp(v)),
            _ => sub(inp, perp(v)),
        };
        Some(self.spread(c, level as usize))
    }

    /// Entry direction of the router owning `role`.
    fn entry(&self, role: &QubitRole) -> Option<Cell> {
        let (_, level, pos) = role.router_coords()?;
        self.nodes.get(level as usize)?.get(pos as usize).map(|n| n.1)
    }

    /// Arm-to-child segments: (arm cell, child input cell).
    fn segments(&self) -> Vec<(Cell, Cell)> {
        let mut out = Vec::new();
        for level in 1..self.nodes.len() {
            for (p, &(child, dir)) in self.nodes[level].iter().enumerate() {
                let parent = self.nodes[level - 1][p / 2].0;
                out.push((self.spread(add(parent, dir), level - 1), self.spread(child, level)));
            }
        }
        out
    }
}

/// Coordinates of every qubit of a circuit on the planar grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridPlacement {
    coords: Vec<Cell>,
    /// Cells kept free for the ancilla chains of the tree links.
    reserved: Vec<Cell>,
    width: i64,
    height: i64,
}

impl GridPlacement {
    pub fn coord(&self, q: QubitId) -> Cell {
        self.coords[q]
    }

    pub fn coords(&self) -> &[Cell] {
        &self.coords
    }

    pub fn reserved(&self) -> &[Cell] {
        &self.reserved
    }

    /// Width × height of the drawn grid: the occupied box plus an empty one-cell border.
    pub fn bounds(&self) -> (i64, i64) {
        (self.width, self.height)
    }

    /// Width × height of the occupied box.
    pub fn footprint(&self) -> (i64, i64) {
        (self.width - 2, self.height - 2)
    }

    /// Cells of the occupied box; the border is drawing margin, not hardware.
    pub fn area(&self) -> i64 {
        let (w, h) = self.footprint();
        w * h
    }

    /// (row, col) with row 0 at the top.
    pub fn row_col(&self, q: QubitId) -> (i64, i64) {
        let (x, y) = self.coords[q];
        (self.height - 1 - y, x)
    }

    pub fn distance(&self, a: QubitId, b: QubitId) -> u64 {
        manhattan(self.coords[a], self.coords[b])
    }

    /// `{"id": [row, col], ...}` in id order.
    pub fn to_json(&self) -> String {
        let map: BTreeMap<QubitId, [i64; 2]> = (0..self.coords.len())
            .map(|q| {
                let (r, c) = self.row_col(q);
                (q, [r, c])
            })
            .collect();
        serde_json::to_string_pretty(&map).expect("placement map serializes")
    }

    /// One character per cell, top row first.
    pub fn to_text_grid(&self, circuit: &Circuit) -> String {
        let mut grid = vec![vec!['.'; self.width as usize]; self.height as usize];
        for &(x, y) in &self.reserved {
            grid[(self.height - 1 - y) as usize][x as usize] = '-';
        }
        for (q, role) in circuit.qubits().iter().enumerate() {
            let (r, c) = self.row_col(q);
            grid[r as usize][c as usize] = role_char(role);
        }
        let mut s = String::new();
        for row in grid {
            s.extend(row);
            s.push('\n');
        }
        s
    }
}

fn role_char(role: &QubitRole) -> char {
    match role {
        QubitRole::AddressBit { .. } => 'a',
        QubitRole::RouterStatus { .. } => 't',
        QubitRole::RouterInput { .. } => 'i',
        QubitRole::RouterLeft { .. } => 'L',
        QubitRole::RouterRight { .. } => 'R',
        QubitRole::LinearRouter { .. } => 'r',
        QubitRole::LadderAncilla { .. } => 'l',
        QubitRole::ControlQ { .. } => 'q',
        QubitRole::IntermediateQ { .. } => 'd',
        QubitRole::CnotTreeNode { .. } => 'c',
        QubitRole::Bus { .. } => 'B',
        QubitRole::Input { .. } => 'I',
        QubitRole::Output { .. } => 'o',
        QubitRole::GhzAncilla { .. } | QubitRole::BellAncilla { .. } => 'g',
    }
}

struct Grid {
    coords: Vec<Option<Cell>>,
    taken: HashMap<Cell, QubitId>,
    reserved: HashSet<Cell>,
    /// Qubits touched only by long-range gates; they may be moved to make room.
    movable: Vec<bool>,
}

impl Grid {
    fn free(&self, c: Cell) -> bool {
        !self.taken.contains_key(&c) && !self.reserved.contains(&c)
    }

    fn put(&mut self, q: QubitId, c: Cell) -> Result<()> {
        if let Some(other) = self.taken.get(&c) {
            return Err(QlutError::PlacementOverflow(format!("qubits {other} and {q} both at {c:?}")));
        }
        if self.reserved.contains(&c) {
            return Err(QlutError::PlacementOverflow(format!("qubit {q} on reserved link cell {c:?}")));
        }
        self.coords[q] = Some(c);
        self.taken.insert(c, q);
        Ok(())
    }

    /// Put `q` at `want` if free, else at the nearest free cell.
    fn put_near(&mut self, q: QubitId, want: Cell) -> Result<()> {
        let c = if self.free(want) { want } else { self.nearest(want, |g, c| g.free(c)) };
        self.put(q, c)
    }

    /// Free cell adjacent to `anchor`, searching outward if none is.
    fn put_adjacent(&mut self, q: QubitId, anchor: Cell, prefer: Option<Cell>) -> Result<()> {
        if let Some(p) = prefer.filter(|&p| self.free(p) && manhattan(p, anchor) == 1) {
            return self.put(q, p);
        }
        if let Some(c) = NEIGHBOURS.iter().map(|&d| add(anchor, d)).find(|&c| self.free(c)) {
            return self.put(q, c);
        }
        let evict = NEIGHBOURS
            .iter()
            .map(|&d| add(anchor, d))
            .find_map(|c| self.taken.get(&c).copied().filter(|&o| self.movable[o]).map(|o| (c, o)));
        match evict {
            Some((c, other)) => {
                self.taken.remove(&c);
                self.coords[other] = None;
                self.put(q, c)?;
                let spot = self.nearest(c, |g, x| g.free(x));
                self.put(other, spot)
            }
            None => Err(QlutError::PlacementOverflow(format!("no room next to {anchor:?} for qubit {q}"))),
        }
    }

    /// Nearest cell to `anchor` satisfying `ok`, rings in a fixed order.
    fn nearest(&self, anchor: Cell, ok: impl Fn(&Self, Cell) -> bool) -> Cell {
        for r in 1i64.. {
            for dx in -r..=r {
                let dy = r - dx.abs();
                for c in [(anchor.0 + dx, anchor.1 + dy), (anchor.0 + dx, anchor.1 - dy)] {
                    if ok(self, c) {
                        return c;
                    }
                }
            }
        }
        unreachable!("the grid is unbounded")
    }

    /// Two adjacent free cells near `anchor`.
    fn free_pair(&self, anchor: Cell) -> (Cell, Cell) {
        let first = self.nearest(anchor, |g, c| g.free(c) && NEIGHBOURS.iter().any(|&d| g.free(add(c, d))));
        let second = NEIGHBOURS.iter().map(|&d| add(first, d)).find(|&c| self.free(c)).expect("checked above");
        (first, second)
    }
}

/// Places the circuit's qubits: one H-tree per tree copy side by side, the
/// input, bus and tree address bits above each root, the linear-router strip
/// above everything, and CNOT-tree nodes paired with their data registers next
/// to the CSWAP-tree leaf slots.
pub fn place_h_tree(circuit: &Circuit) -> Result<GridPlacement> {
    let roles = circuit.qubits();
    let index = circuit.role_index();
    let params = &circuit.params;
    let depth = roles.iter().filter_map(|r| r.router_coords()).map(|c| c.1 + 1).max().unwrap_or(0);
    let copies = roles
        .iter()
        .filter_map(|r| match *r {
            QubitRole::Input { copy } => Some(copy + 1),
            _ => r.router_coords().map(|c| c.0 + 1),
        })
        .max()
        .unwrap_or(1);
    let bus_len = roles.iter().filter(|r| matches!(r, QubitRole::Bus { copy: 0, .. })).count().max(1) as i64;
    let tree = HTree::new(depth, bus_len > 1 || circuit.is_uncomputed());
    let tree_bits = params.n() - params.d();

    // Frame of one copy: routers, input, bus, tree address bits.
    let mut frame: Vec<(QubitRole, Cell)> = Vec::new();
    let mut push_frame = |role: QubitRole, cell: Cell| frame.push((role, cell));
    for (level, nodes) in tree.nodes.iter().enumerate() {
        for pos in 0..nodes.len() as u64 {
            let level = level as u32;
            for role in [
                QubitRole::RouterStatus { copy: 0, level, pos },
                QubitRole::RouterInput { copy: 0, level, pos },
                QubitRole::RouterLeft { copy: 0, level, pos },
                QubitRole::RouterRight { copy: 0, level, pos },
            ] {
                push_frame(role, tree.cell(&role).expect("router inside the tree"));
            }
        }
    }
    push_frame(QubitRole::Input { copy: 0 }, (0, 1));
    for slot in 0..bus_len {
        push_frame(QubitRole::Bus { copy: 0, slot: slot as u32 }, (0, 2 + slot));
    }
    // At N = 2 and N = 16 the address bits sit beside the input and bus.
    let fixed_slots: &[Cell] = match (depth, tree_bits, tree.widened) {
        (1, 1, false) => &[(-1, 1)],
        (4, 4, false) => &[(-1, 2), (1, 2), (-2, 1), (2, 1)],
        _ => &[],
    };
    for i in 0..tree_bits {
        let cell = fixed_slots.get(i as usize).copied().unwrap_or((0, 2 + bus_len + i as i64));
        push_frame(QubitRole::AddressBit { bit: params.d() + i, copy: 0 }, cell);
    }
    let (fx0, fx1) = frame.iter().fold((0, 0), |(lo, hi), (_, c)| (lo.min(c.0), hi.max(c.0)));
    let pitch = fx1 - fx0 + 2;

    let mut movable = vec![true; roles.len()];
    for g in circuit.gates().iter().filter(|g| !g.kind.is_long_range()) {
        for &q in g.qubits() {
            movable[q] = false;
        }
    }
    let mut grid = Grid { coords: vec![None; roles.len()], taken: HashMap::new(), reserved: HashSet::new(), movable };
    let segments = tree.segments();
    for w in 0..copies {
        let shift = (w as i64 * pitch, 0);
        for &(a, b) in &segments {
            if a.0 != b.0 && a.1 != b.1 {
                return Err(QlutError::PlacementOverflow(format!("link {a:?} -> {b:?} is not straight")));
            }
            let step = ((b.0 - a.0).signum(), (b.1 - a.1).signum());
            let mut c = add(a, step);
            while c != b {
                grid.reserved.insert(add(c, shift));
                c = add(c, step);
            }
        }
        for &(role, cell) in &frame {
            let role = with_copy(role, w);
            match index.get(&role) {
                Some(&q) if role.is_router() => grid.put(q, add(cell, shift))?,
                Some(&q) => grid.put_near(q, add(cell, shift))?,
                None => {}
            }
        }
    }

    // Output registers of an uncomputed circuit sit next to the qubit they copy.
    for g in circuit.gates().iter().filter(|g| g.stage == Stage::Out) {
        let (src, out) = (g.qubits()[0], g.qubits()[1]);
        if let (Some(anchor), None) = (grid.coords[src], grid.coords[out]) {
            grid.put_adjacent(out, anchor, None)?;
        }
    }

    // Linear-router strip: ladder row, router row, address row.
    let d = params.d();
    if d > 0 {
        let top = grid.taken.keys().chain(grid.reserved.iter()).map(|c| c.1).max().unwrap_or(0);
        let x0 = -(d as i64) / 2;
        for z in 0..d {
            let x = x0 + z as i64;
            let below =
                if z + 1 == d { QubitRole::ControlQ { copy: 0 } } else { QubitRole::LadderAncilla { level: z } };
            for (role, y) in [
                (below, top + 2),
                (QubitRole::LinearRouter { z }, top + 3),
                (QubitRole::AddressBit { bit: z, copy: 0 }, top + 4),
            ] {
                if let Some(&q) = index.get(&role) {
                    grid.put(q, (x, y))?;
                }
            }
        }
    }

    // CNOT-tree nodes and data registers around each leaf slot.
    let sequential = params.readout() == Readout::SequentialMultiBit;
    let b = params.b();
    let gamma = params.gamma();
    let d_prime = params.d_prime();
    let tree_size = if sequential { gamma * b } else { gamma };
    let blocks = params.lambda() / gamma;
    let mut slots: Vec<(u32, u64, QubitRole, Cell)> = Vec::new();
    for w in 0..copies {
        for s in 0..blocks {
            let slot_role = if d_prime == 0 {
                QubitRole::Input { copy: w }
            } else if s % 2 == 0 && !circuit_is_merged(&index, w) {
                QubitRole::RouterLeft { copy: w, level: d_prime - 1, pos: s / 2 }
            } else if s % 2 == 0 {
                QubitRole::RouterInput { copy: w, level: d_prime - 1, pos: s / 2 }
            } else {
                QubitRole::RouterRight { copy: w, level: d_prime - 1, pos: s / 2 }
            };
            if let Some(&slot) = index.get(&slot_role) {
                slots.push((w, s, slot_role, grid.coords[slot].expect("leaf slots are placed with the tree")));
            }
        }
    }
    // Every slot first gets the register its own leaf writes, then the node pairs.
    for &(w, s, slot_role, anchor) in &slots {
        let word = if sequential { 0 } else { w };
        if let Some(&dq) = index.get(&QubitRole::IntermediateQ { j: s * gamma, word }) {
            let prefer = tree.entry(&slot_role).map(|e| sub(anchor, e));
            grid.put_adjacent(dq, anchor, prefer)?;
        }
    }
    for &(w, s, _, anchor) in &slots {
        for v in 1..tree_size {
            let (u, word) = if sequential { (v / b, (v % b) as u32) } else { (v, w) };
            let data = index.get(&QubitRole::IntermediateQ { j: s * gamma + u, word }).copied();
            let node = index.get(&QubitRole::CnotTreeNode { copy: w, block: s, node: v }).copied();
            match (node, data) {
                (Some(nq), Some(dq)) => {
                    let (c1, c2) = grid.free_pair(anchor);
                    grid.put(nq, c1)?;
                    grid.put(dq, c2)?;
                }
                (Some(nq), None) => grid.put_near(nq, anchor)?,
                _ => {}
            }
        }
    }

    // Everything else goes next to the first placed partner it interacts with.
    for _ in 0..roles.len() {
        let mut progress = false;
        for g in circuit.gates() {
            let ops = g.qubits();
            let Some(&anchor_q) = ops.iter().find(|&&q| grid.coords[q].is_some()) else { continue };
            for &q in ops {
                if grid.coords[q].is_none() {
                    let anchor = grid.coords[anchor_q].expect("anchor is placed");
                    if g.kind.is_long_range() {
                        grid.put_near(q, anchor)?;
                    } else {
                        grid.put_adjacent(q, anchor, None)?;
                    }
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
    }
    for q in 0..roles.len() {
        if grid.coords[q].is_none() {
            grid.put_near(q, (0, 0))?;
        }
    }

    let coords: Vec<Cell> = grid.coords.into_iter().map(|c| c.expect("every qubit placed")).collect();
    let mut reserved: Vec<Cell> = grid.reserved.into_iter().collect();
    reserved.sort_unstable();
    let all = coords.iter().chain(reserved.iter());
    let min_x = all.clone().map(|c| c.0).min().unwrap_or(0);
    let min_y = all.clone().map(|c| c.1).min().unwrap_or(0);
    let shift = |c: &Cell| (c.0 - min_x + 1, c.1 - min_y + 1);
    let coords: Vec<Cell> = coords.iter().map(shift).collect();
    let reserved: Vec<Cell> = reserved.iter().map(shift).collect();
    let max_x = coords.iter().chain(reserved.iter()).map(|c| c.0).max().unwrap_or(0);
    let max_y = coords.iter().chain(reserved.iter()).map(|c| c.1).max().unwrap_or(0);
    Ok(GridPlacement { coords, reserved, width: max_x + 2, height: max_y + 2 })
}

fn circuit_is_merged(index: &HashMap<QubitRole, QubitId>, copy: u32) -> bool {
    index.contains_key(&QubitRole::RouterInput { copy, level: 0, pos: 0 })
        && !index.contains_key(&QubitRole::RouterLeft { copy, level: 0, pos: 0 })
}

fn with_copy(role: QubitRole, w: u32) -> QubitRole {
    match role {
        QubitRole::RouterStatus { level, pos, .. } => QubitRole::RouterStatus { copy: w, level, pos },
        QubitRole::RouterInput { level, pos, .. } => QubitRole::RouterInput { copy: w, level, pos },
        QubitRole::RouterLeft { level, pos, .. } => QubitRole::RouterLeft { copy: w, level, pos },
        QubitRole::RouterRight { level, pos, .. } => QubitRole::RouterRight { copy: w, level, pos },
        QubitRole::Input { .. } => QubitRole::Input { copy: w },
        QubitRole::Bus { slot, .. } => QubitRole::Bus { copy: w, slot },
        QubitRole::AddressBit { bit, .. } => QubitRole::AddressBit { bit, copy: w },
        other => other,
    }
}

/// How a long-range operation obtains its entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkResource {
    GhzChain,
    DistilledBell,
    FreeBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LongRangeLink {
    /// Index into `circuit.gates()`.
    pub gate: usize,
    pub source: QubitId,
    pub target: QubitId,
    /// Cells on the grid path, endpoints included.
    pub m: u64,
    /// Level of the parent router, for tree and CNOT-tree links.
    pub level: Option<u32>,
    pub resource: LinkResource,
}

/// Link options: the free long-range budget k and whether distilled pairs are used.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkPolicy {
    pub budget_k: u32,
    pub distillation: bool,
}

/// Tree level of the link a long-range gate uses, if it is part of a tree.
fn link_level(circuit: &Circuit, a: QubitId, b: QubitId) -> Option<u32> {
    let (ra, rb) = (circuit.role(a), circuit.role(b));
    match (ra, rb) {
        (x, QubitRole::RouterInput { level, .. }) | (QubitRole::RouterInput { level, .. }, x)
            if level > 0 && x.router_coords().is_some_and(|c| c.1 + 1 == level) =>
        {
            Some(level - 1)
        }
        (_, QubitRole::CnotTreeNode { node, .. }) | (QubitRole::CnotTreeNode { node, .. }, _) => {
            Some(circuit.params.d_prime() + node.ilog2())
        }
        _ => None,
    }
}

/// Every long-range gate with its grid length, tree level and resource.
pub fn classify_links(circuit: &Circuit, placement: &GridPlacement, policy: LinkPolicy) -> Vec<LongRangeLink> {
    circuit
        .gates()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.kind.is_long_range())
        .map(|(i, g)| {
            let (source, target) = (g.qubits()[0], g.qubits()[1]);
            let level = link_level(circuit, source, target);
            let budgeted = matches!(g.stage, Stage::I | Stage::II(_)) && level.is_some_and(|l| l < policy.budget_k);
            let resource = if budgeted {
                LinkResource::FreeBudget
            } else if policy.distillation {
                LinkResource::DistilledBell
            } else {
                LinkResource::GhzChain
            };
            LongRangeLink { gate: i, source, target, m: placement.distance(source, target) + 1, level, resource }
        })
        .collect()
}

/// Gates that are neither flagged long-range nor on a connected set of cells.
pub fn locality_violations(circuit: &Circuit, placement: &GridPlacement) -> Vec<usize> {
    circuit
        .gates()
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.kind.is_long_range() && g.kind.arity() > 1)
        .filter(|(_, g)| !connected(g.qubits().iter().map(|&q| placement.coord(q)).collect()))
        .map(|(i, _)| i)
        .collect()
}

fn connected(cells: Vec<Cell>) -> bool {
    let mut reached = vec![false; cells.len()];
    reached[0] = true;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..cells.len() {
            if !reached[j] && manhattan(cells[i], cells[j]) == 1 {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// Per-gate noise weights for the simulator: the qubit rate ε_Q scaled so that
/// each link fails with its modeled long-range error.
pub fn link_rates(links: &[LongRangeLink], rates: &ErrorRates) -> HashMap<usize, LinkRate> {
    links
        .iter()
        .map(|l| {
            let eps = long_range_error(l, rates);
            let weight = if rates.eps_q > 0.0 { eps / rates.eps_q } else { 0.0 };
            (l.gate, LinkRate { kind: RateKind::Qubit, weight })
        })
        .collect()
}

/// Mean m of the tree links leaving each router level.
pub fn mean_link_length_by_level(circuit: &Circuit, links: &[LongRangeLink]) -> Vec<f64> {
    let mut acc: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for l in links {
        let is_tree = [l.source, l.target].iter().all(|&q| circuit.role(q).is_router());
        if let (Some(level), true) = (l.level, is_tree) {
            let e = acc.entry(level).or_default();
            e.0 += l.m;
            e.1 += 1;
        }
    }
    acc.values().map(|&(s, c)| s as f64 / c as f64).collect()
}

/// `source,target,m,level,resource` rows with a header.
pub fn links_to_csv(links: &[LongRangeLink]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["source", "target", "m", "level", "resource"]).map_err(csv_err)?;
    for l in links {
        let level = l.level.map(|v| v.to_string()).unwrap_or_default();
        let resource = format!("{:?}", l.resource);
        w.write_record([l.source.to_string(), l.target.to_string(), l.m.to_string(), level, resource])
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| QlutError::InvalidData(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> QlutError {
    QlutError::InvalidData(e.to_string())
}

/// Short human summary: bounds, area per memory cell, link count and longest link.
pub fn summary(circuit: &Circuit, placement: &GridPlacement, links: &[LongRangeLink]) -> String {
    let (w, h) = placement.footprint();
    let n = circuit.params.memory_size();
    let mut s = String::new();
    let _ = writeln!(s, "grid: {w} x {h} (area {}, {:.2} per memory cell)", w * h, (w * h) as f64 / n as f64);
    let _ = writeln!(s, "long-range links: {}", links.len());
    let _ = writeln!(s, "max m: {}", links.iter().map(|l| l.m).max().unwrap_or(0));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_offsets_halve_every_two_levels() {
        let t = HTree::new(6, false);
        let d = |l: usize| manhattan(t.nodes[l][0].0, t.nodes[l + 1][0].0);
        assert_eq!(d(0), 8);
        assert_eq!(d(2), 4);
        assert_eq!(d(4), 2);
    }

    #[test]
    fn depth_one_is_a_t_shape() {
        let t = HTree::new(1, false);
        let r = |role| t.cell(&role).unwrap();
        assert_eq!(r(QubitRole::RouterInput { copy: 0, level: 0, pos: 0 }), (0, 0));
        assert_eq!(r(QubitRole::RouterStatus { copy: 0, level: 0, pos: 0 }), (0, -1));
        assert_eq!(r(QubitRole::RouterLeft { copy: 0, level: 0, pos: 0 }), (-1, 0));
        assert_eq!(r(QubitRole::RouterRight { copy: 0, level: 0, pos: 0 }), (1, 0));
    }

    #[test]
    fn connectivity_check() {
        assert!(connected(vec![(0, 0), (0, 1), (1, 1)]));
        assert!(!connected(vec![(0, 0), (2, 0)]));
    }
}
