//! Exponent tables over the (d/n, d′/n) grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costs::{budgeted_infidelity, depth_formula, fit_exponent, qubit_count_formula, t_count_formula};
use crate::error::{QlutError, Result};
use crate::params::{ArchParams, ErrorRates};

/// Long-range budget as a fraction of d′, rounded down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KRule {
    Zero,
    QuarterDPrime,
    HalfDPrime,
    ThreeQuarterDPrime,
    FullDPrime,
}

impl KRule {
    pub const ALL: [KRule; 5] =
        [KRule::Zero, KRule::QuarterDPrime, KRule::HalfDPrime, KRule::ThreeQuarterDPrime, KRule::FullDPrime];

    pub fn k(&self, d_prime: u32) -> u32 {
        match self {
            KRule::Zero => 0,
            KRule::QuarterDPrime => d_prime / 4,
            KRule::HalfDPrime => d_prime / 2,
            KRule::ThreeQuarterDPrime => 3 * d_prime / 4,
            KRule::FullDPrime => d_prime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    InfidelityExponent,
    TCountExponent,
    QubitExponent,
    DepthExponent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepSpec {
    pub n_range: Vec<u32>,
    pub d_fractions: Vec<f64>,
    pub d_prime_fractions: Vec<f64>,
    pub k_rule: KRule,
    pub rates: ErrorRates,
    pub metric: Metric,
}

impl SweepSpec {
    /// n = 16, 24, …, 56 and fractions 0, 1/8, …, 1 with all rates equal.
    pub fn eighths(k_rule: KRule, metric: Metric) -> Self {
        let fr: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        Self {
            n_range: (2..=7).map(|i| 8 * i).collect(),
            d_fractions: fr.clone(),
            d_prime_fractions: fr,
            k_rule,
            rates: ErrorRates::uniform(1e-3),
            metric,
        }
    }
}

/// Row i is `d_fractions[i]`, column j is `d_prime_fractions[j]`; `None` where
/// fewer than five sizes were valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepTable {
    pub d_fractions: Vec<f64>,
    pub d_prime_fractions: Vec<f64>,
    pub cells: Vec<Vec<Option<f64>>>,
}

fn whole(frac: f64, n: u32) -> Option<u32> {
    let x = frac * n as f64;
    let r = x.round();
    ((x - r).abs() < 1e-9 && r >= 0.0).then_some(r as u32)
}

/// Metric value at one grid point, or `None` if the point is not a valid
/// parameter set.
fn point(spec: &SweepSpec, n: u32, df: f64, dpf: f64) -> Option<f64> {
    let d = whole(df, n)?;
    let dp = whole(dpf, n)?;
    if d + dp > n || n >= 64 {
        return None;
    }
    let big_n = 1u64 << n;
    let params = ArchParams::single(big_n, big_n >> d, big_n >> (d + dp)).ok()?;
    let v = match spec.metric {
        Metric::InfidelityExponent => budgeted_infidelity(&params, &spec.rates, spec.k_rule.k(dp)).ok()?.total,
        Metric::TCountExponent => t_count_formula(&params),
        Metric::QubitExponent => qubit_count_formula(&params),
        Metric::DepthExponent => depth_formula(&params),
    };
    (v > 0.0).then_some(v)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.rates.validate()?;
    if spec.n_range.is_empty() || spec.d_fractions.is_empty() || spec.d_prime_fractions.is_empty() {
        return Err(QlutError::InvalidParams("empty sweep grid".into()));
    }
    let coords: Vec<(usize, usize)> =
        (0..spec.d_fractions.len()).flat_map(|i| (0..spec.d_prime_fractions.len()).map(move |j| (i, j))).collect();
    let flat: Vec<Option<f64>> = coords
        .par_iter()
        .map(|&(i, j)| {
            let (df, dpf) = (spec.d_fractions[i], spec.d_prime_fractions[j]);
            let (sizes, values): (Vec<f64>, Vec<f64>) =
                spec.n_range.iter().filter_map(|&n| point(spec, n, df, dpf).map(|v| (2f64.powi(n as i32), v))).unzip();
            fit_exponent(&sizes, &values).ok().map(|f| f.slope)
        })
        .collect();
    let cols = spec.d_prime_fractions.len();
    Ok(SweepTable {
        d_fractions: spec.d_fractions.clone(),
        d_prime_fractions: spec.d_prime_fractions.clone(),
        cells: flat.chunks(cols).map(|c| c.to_vec()).collect(),
    })
}

const CORNER: &str = "d/n \\ d'/n";

impl SweepTable {
    pub fn cell(&self, df: f64, dpf: f64) -> Option<f64> {
        let i = self.d_fractions.iter().position(|&x| (x - df).abs() < 1e-12)?;
        let j = self.d_prime_fractions.iter().position(|&x| (x - dpf).abs() < 1e-12)?;
        self.cells[i][j]
    }

    /// Header row of d′/n, then one row per d/n; empty fields are null cells.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![CORNER.to_string()];
        header.extend(self.d_prime_fractions.iter().map(|f| f.to_string()));
        w.write_record(&header).map_err(csv_err)?;
        for (df, row) in self.d_fractions.iter().zip(&self.cells) {
            let mut rec = vec![df.to_string()];
            rec.extend(row.iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| QlutError::InvalidData(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
        let mut records = r.records();
        let header = records.next().ok_or_else(|| QlutError::InvalidData("empty table".into()))?.map_err(csv_err)?;
        let num = |s: &str| s.parse::<f64>().map_err(|e| QlutError::InvalidData(format!("{s:?}: {e}")));
        let d_prime_fractions = header.iter().skip(1).map(num).collect::<Result<Vec<_>>>()?;
        let mut d_fractions = Vec::new();
        let mut cells = Vec::new();
        for rec in records {
            let rec = rec.map_err(csv_err)?;
            let mut fields = rec.iter();
            d_fractions.push(num(fields.next().unwrap_or_default())?);
            let row =
                fields.map(|s| if s.is_empty() { Ok(None) } else { num(s).map(Some) }).collect::<Result<Vec<_>>>()?;
            if row.len() != d_prime_fractions.len() {
                return Err(QlutError::InvalidData("ragged table".into()));
            }
            cells.push(row);
        }
        Ok(Self { d_fractions, d_prime_fractions, cells })
    }
}

fn csv_err(e: csv::Error) -> QlutError {
    QlutError::InvalidData(e.to_string())
}
