//! Layout fixture shared by the layout tests and the acceptance harness.

use qlut_core::layout::GridPlacement;
use qlut_core::{Circuit, QubitRole};

pub fn router(i: u64, part: char) -> QubitRole {
    let level = (i + 1).ilog2();
    let pos = i + 1 - (1 << level);
    match part {
        't' => QubitRole::RouterStatus { copy: 0, level, pos },
        'i' => QubitRole::RouterInput { copy: 0, level, pos },
        'L' => QubitRole::RouterLeft { copy: 0, level, pos },
        _ => QubitRole::RouterRight { copy: 0, level, pos },
    }
}

/// Routers R_0…R_14 at N = 16 as (t, in, L, R), x to the right, y up.
pub const N16_ROUTERS: [[(i64, i64); 4]; 15] = [
    [(8, 3), (8, 4), (7, 4), (9, 4)],
    [(3, 4), (4, 4), (4, 5), (4, 3)],
    [(13, 4), (12, 4), (12, 3), (12, 5)],
    [(4, 8), (4, 7), (5, 7), (3, 7)],
    [(4, 1), (4, 2), (3, 2), (5, 2)],
    [(12, 1), (12, 2), (11, 2), (13, 2)],
    [(12, 8), (12, 7), (13, 7), (11, 7)],
    [(7, 7), (6, 7), (6, 6), (6, 8)],
    [(1, 7), (2, 7), (2, 8), (2, 6)],
    [(1, 2), (2, 2), (2, 3), (2, 1)],
    [(7, 2), (6, 2), (6, 1), (6, 3)],
    [(9, 2), (10, 2), (10, 3), (10, 1)],
    [(15, 2), (14, 2), (14, 1), (14, 3)],
    [(15, 7), (14, 7), (14, 6), (14, 8)],
    [(9, 7), (10, 7), (10, 8), (10, 6)],
];

/// Every fixed cell of the N = 16 bucket-brigade placement.
pub fn n16_cells() -> Vec<(QubitRole, (i64, i64))> {
    let mut want = Vec::new();
    for (i, cells) in N16_ROUTERS.iter().enumerate() {
        for (part, &cell) in ['t', 'i', 'L', 'R'].iter().zip(cells) {
            want.push((router(i as u64, *part), cell));
        }
    }
    want.push((QubitRole::Input { copy: 0 }, (8, 5)));
    want.push((QubitRole::Bus { copy: 0, slot: 0 }, (8, 6)));
    for (bit, cell) in [(0, (7, 6)), (1, (9, 6)), (2, (6, 5)), (3, (10, 5))] {
        want.push((QubitRole::AddressBit { bit, copy: 0 }, cell));
    }
    want
}

/// Roles whose cell differs from `want` after translating by the first entry.
pub fn mismatches(c: &Circuit, p: &GridPlacement, want: &[(QubitRole, (i64, i64))]) -> Vec<QubitRole> {
    let Some(q0) = c.find(&want[0].0) else { return vec![want[0].0] };
    let (ox, oy) = (p.coord(q0).0 - want[0].1 .0, p.coord(q0).1 - want[0].1 .1);
    want.iter()
        .filter(|(role, (x, y))| c.find(role).map_or(true, |q| p.coord(q) != (x + ox, y + oy)))
        .map(|(role, _)| *role)
        .collect()
}
