//! Fixed inputs shared by the benchmarks.

use qlut_core::{build_lookup, build_reference, ArchParams, BuildOptions, Circuit, DataTable, ReferenceKind};

/// Unified lookup at λ = √N, γ = N^{1/4} (rounded up) over zero data.
pub fn unified(n: u32) -> Circuit {
    let p = ArchParams::single(1 << n, 1 << n.div_ceil(2), 1 << n.div_ceil(4)).expect("valid exponents");
    build_lookup(&p, &DataTable::zeros(1 << n, 1), BuildOptions::default()).expect("builds")
}

pub fn bucket_brigade(n: u32) -> Circuit {
    build_reference(ReferenceKind::BucketBrigade, 1 << n, &DataTable::zeros(1 << n, 1)).expect("builds")
}
