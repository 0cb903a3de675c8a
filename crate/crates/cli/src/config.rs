use std::collections::BTreeMap;
use std::path::Path;

use qlut_core::layout::{DistillationSettings, LinkPolicy};
use qlut_core::{ArchParams, DataTable, Decomposition, ErrorRates, RateKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::CliError;

/// File layout: params and rates stay raw until the shape of the whole file
/// is known, so that their validation errors are reported separately.
#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawConfig {
    params: serde_json::Value,
    #[serde(default)]
    rates: Option<serde_json::Value>,
    #[serde(default)]
    data: Option<Vec<u64>>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    decomposition: Option<Decomposition>,
    #[serde(default)]
    link_policy: LinkPolicy,
    #[serde(default)]
    distillation: DistillationSettings,
    #[serde(default)]
    include_distillation_depth: bool,
    #[serde(default)]
    constants: BTreeMap<RateKind, f64>,
    #[serde(default)]
    simulation: SimulationSettings,
}

/// Instance configuration read by `report`, `export-*` and `simulate`.
#[derive(Debug, Clone)]
pub struct Config {
    pub params: ArchParams,
    pub rates: ErrorRates,
    /// Memory words; drawn from `seed` when absent.
    pub data: Option<Vec<u64>>,
    pub seed: u64,
    pub decomposition: Option<Decomposition>,
    pub link_policy: LinkPolicy,
    pub distillation: DistillationSettings,
    pub include_distillation_depth: bool,
    /// Per-rate multipliers for the analytic coefficients (missing rates keep 1).
    pub constants: BTreeMap<RateKind, f64>,
    pub simulation: SimulationSettings,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct SimulationSettings {
    /// Largest N that `report` simulates.
    pub max_n: u64,
    pub trials: u64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self { max_n: 16, trials: 10_000 }
    }
}

impl Config {
    pub fn data(&self) -> Result<DataTable, CliError> {
        let b = self.params.b() as u32;
        match &self.data {
            Some(words) => Ok(DataTable::new(words.clone(), b)?),
            None => Ok(DataTable::random(self.params.memory_size(), b, &mut ChaCha8Rng::seed_from_u64(self.seed))),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let raw: RawConfig = read_json(path)?;
        let invalid = |e: serde_json::Error| CliError::Validation(format!("{}: {e}", path.display()));
        Ok(Self {
            params: serde_json::from_value(raw.params).map_err(invalid)?,
            rates: raw.rates.map(serde_json::from_value).transpose().map_err(invalid)?.unwrap_or_default(),
            data: raw.data,
            seed: raw.seed,
            decomposition: raw.decomposition,
            link_policy: raw.link_policy,
            distillation: raw.distillation,
            include_distillation_depth: raw.include_distillation_depth,
            constants: raw.constants,
            simulation: raw.simulation,
        })
    }
}

/// Reads a JSON file; syntax and shape errors carry serde's line and column.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
