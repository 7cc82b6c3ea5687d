//! Least-squares power-law fits for the growth experiments.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Result of a log–log least-squares fit. `samples` holds the
/// (log N, log value) pairs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: Vec<(f64, f64)>,
}

impl FitResult {
    /// Below this r² the experiment is reported as inconclusive.
    pub const R2_GATE: f64 = 0.9;

    pub fn conclusive(&self) -> bool {
        self.r_squared >= Self::R2_GATE
    }
}

/// Fits log(value) against log(n) for positive pairs (n, value).
pub fn loglog_fit(pairs: &[(f64, f64)]) -> Result<FitResult> {
    if pairs.len() < 4 {
        return Err(Error::TooFewSamples(pairs.len()));
    }
    let samples: Vec<(f64, f64)> = pairs
        .iter()
        .map(|&(n, v)| {
            debug_assert!(n > 0.0 && v > 0.0);
            (n.ln(), v.ln())
        })
        .collect();
    let m = samples.len() as f64;
    let sx: f64 = samples.iter().map(|p| p.0).sum();
    let sy: f64 = samples.iter().map(|p| p.1).sum();
    let sxx: f64 = samples.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = samples.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;

    let mean_y = sy / m;
    let ss_tot: f64 = samples.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = samples
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else if ss_res <= 1e-24 {
        1.0
    } else {
        0.0
    };

    Ok(FitResult { slope, intercept, r_squared, samples })
}
