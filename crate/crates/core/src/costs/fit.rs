use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{QlutError, Result};

/// Least-squares slope of log₂ value against log₂ N, with a 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub points: usize,
}

pub fn fit_exponent(sizes: &[f64], values: &[f64]) -> Result<ExponentFit> {
    if sizes.len() != values.len() {
        return Err(QlutError::DegenerateInput(format!("{} sizes but {} values", sizes.len(), values.len())));
    }
    if sizes.len() < 5 {
        return Err(QlutError::DegenerateInput(format!("need at least 5 points, got {}", sizes.len())));
    }
    if let Some(bad) = sizes.iter().chain(values).find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(QlutError::DegenerateInput(format!("non-positive or non-finite input {bad}")));
    }
    let x: Vec<f64> = sizes.iter().map(|s| s.log2()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(QlutError::DegenerateInput("all sizes are equal".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = (ssr / (m - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, m - 2.0).expect("dof >= 3").inverse_cdf(0.975);
    Ok(ExponentFit { slope, intercept, ci_low: slope - t * se, ci_high: slope + t * se, points: x.len() })
}
