//! Parameterized quantum lookup tables: circuit builders, planar layouts,
//! a sparse noisy simulator and analytic cost models.

pub mod circuit;
pub mod costs;
pub mod error;
pub mod layout;
pub mod params;
pub mod sim;
pub mod sweep;

pub use circuit::{
    build_lookup, build_multi_bit_parallel, build_multi_bit_sequential, build_reference, build_uncompute,
    build_unified_lookup, BuildOptions, Circuit, CircuitKind, Decomposition, Gate, GateKind, QubitId, QubitRole,
    ReferenceKind, ResourceCounts, Stage,
};
pub use error::{QlutError, Result};
pub use params::{derive_params, Address, ArchParams, DataTable, ErrorRates, RateKind, Readout, Specialization};
pub use costs::{cost_report, general_infidelity, CostReport, FidelityBreakdown};
pub use sweep::{run_sweep, KRule, Metric, SweepSpec, SweepTable};
