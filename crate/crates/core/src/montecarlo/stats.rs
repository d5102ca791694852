//! Small statistical helpers shared by the verification batteries.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of observed bin counts against probabilities.
///
/// Bins with zero expected probability must have zero observations.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::Config("chi-square needs matching bins, at least two".into()));
    }
    let total: u64 = observed.iter().sum();
    let mut statistic = 0.0;
    let mut bins = 0usize;
    for (&o, &pr) in observed.iter().zip(probs) {
        if pr <= 0.0 {
            if o > 0 {
                return Ok(ChiSquare {
                    statistic: f64::INFINITY,
                    dof: observed.len() - 1,
                    p_value: 0.0,
                });
            }
            continue;
        }
        let e = pr * total as f64;
        statistic += (o as f64 - e).powi(2) / e;
        bins += 1;
    }
    let dof = bins.saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Config(e.to_string()))?;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: 1.0 - dist.cdf(statistic),
    })
}

/// Median of a sample (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Normal-theory standard error of a sample covariance between two
/// variables with variances `var_x`, `var_y` and covariance `cov`.
///
/// For `x = y` this is `Var · √(2/(R − 1))`.
pub fn covariance_se(var_x: f64, var_y: f64, cov: f64, samples: u64) -> f64 {
    ((var_x * var_y + cov * cov) / (samples as f64 - 1.0)).sqrt()
}

/// `max(4·SE, floor·|theory|)`.
pub fn stat_tolerance(se: f64, relative_floor: f64, theory: f64) -> f64 {
    (4.0 * se).max(relative_floor * theory.abs())
}
