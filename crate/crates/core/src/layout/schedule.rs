//! Staggered address setting along one query branch.
//!
//! Address bit a_ℓ enters the root with a local SWAP, passes routers
//! R_0 … R_{ℓ−1} (two CSWAPs each, then the long-range hop to the next
//! level) and is parked in t_ℓ by a second local SWAP. Bit a_{ℓ+1} follows as
//! soon as each router it needs has finished with a_ℓ, so the loads overlap.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{GridPlacement, LongRangeLink};
use crate::circuit::{Circuit, QubitId, QubitRole};

/// Timing of the walk for a branch of depth T.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ActivationWalk {
    /// Step at which t_ℓ holds a_ℓ.
    pub end: Vec<u64>,
    /// end_ℓ − end_{ℓ−1}.
    pub tau: Vec<u64>,
    /// Steps t_ℓ waits after being set, excluding its own CSWAPs.
    pub status_idle: Vec<u64>,
    /// Long-range CNOTs on the link leaving R_ℓ (three per SWAP).
    pub long_range_cnots: Vec<u64>,
    pub local_swaps: u64,
    pub cswaps: u64,
    pub total_depth: u64,
}

/// Runs the walk; `hop[ℓ]` is the duration of the long-range hop out of R_ℓ.
pub fn activation_walk(depth: u32, hop: &[u64]) -> ActivationWalk {
    let t = depth as usize;
    let mut busy = vec![0u64; t];
    let mut end = Vec::with_capacity(t);
    let mut long_range_cnots = vec![0u64; t];
    let mut cswaps = 0;
    for l in 0..t {
        // SWAP(input, in_0) at R_0.
        let mut now = busy[0] + 1;
        for k in 0..l {
            now = now.max(busy[k]) + 2;
            cswaps += 2;
            now += hop.get(k).copied().unwrap_or(1).max(1);
            long_range_cnots[k] += 3;
            busy[k] = now;
        }
        now = now.max(busy[l]) + 1;
        busy[l] = now;
        end.push(now);
    }
    let total = end.last().copied().unwrap_or(0);
    let tau = end.iter().enumerate().map(|(l, &e)| if l == 0 { e } else { e - end[l - 1] }).collect();
    let status_idle = end.iter().enumerate().map(|(l, &e)| (total - e) - 2 * (t - 1 - l) as u64).collect();
    ActivationWalk { end, tau, status_idle, long_range_cnots, local_swaps: 2 * t as u64, cswaps, total_depth: total }
}

/// The walk placed on a circuit: idle steps keyed by the status qubits of the
/// branch to address 0 in tree copy 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Schedule {
    pub tau: Vec<u64>,
    pub idle: BTreeMap<QubitId, u64>,
    pub total_depth: u64,
    pub walk: ActivationWalk,
}

impl Schedule {
    pub fn total_idle(&self) -> u64 {
        self.idle.values().sum()
    }
}

/// Builds the schedule of the circuit's CSWAP tree. With
/// `include_distillation_depth` each hop lasts ⌈log₂ m⌉ steps (at least one)
/// for the longest link at its level; otherwise distilled pairs are ready.
pub fn build_schedule(
    circuit: &Circuit,
    _placement: &GridPlacement,
    links: &[LongRangeLink],
    include_distillation_depth: bool,
) -> Schedule {
    let depth = circuit.qubits().iter().filter_map(|r| r.router_coords()).map(|c| c.1 + 1).max().unwrap_or(0);
    let hop: Vec<u64> = (0..depth)
        .map(|l| {
            if !include_distillation_depth {
                return 1;
            }
            let m = links
                .iter()
                .filter(|k| {
                    k.level == Some(l) && circuit.role(k.source).is_router() && circuit.role(k.target).is_router()
                })
                .map(|k| k.m)
                .max()
                .unwrap_or(1);
            u64::from(m.max(2).next_power_of_two().ilog2())
        })
        .collect();
    let walk = activation_walk(depth, &hop);
    let idle = (0..depth)
        .filter_map(|level| {
            circuit
                .find(&QubitRole::RouterStatus { copy: 0, level, pos: 0 })
                .map(|q| (q, walk.status_idle[level as usize]))
        })
        .collect();
    Schedule { tau: walk.tau.clone(), idle, total_depth: walk.total_depth, walk }
}
