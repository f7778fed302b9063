use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::protocol::screening_angles;
use std::f64::consts::FRAC_PI_2;

/// `Σ_i sin²(α_i − π/2)` over the screening set: the impersonation error sum.
pub fn ie_sum(n: usize) -> Result<f64> {
    Ok(screening_angles(n)?
        .iter()
        .map(|a| (a.radians() - FRAC_PI_2).sin().powi(2))
        .sum())
}

/// `ie_sum(N) / N`, the per-round average.
pub fn ie_mean(n: usize) -> Result<f64> {
    Ok(ie_sum(n)? / n as f64)
}

/// Probability that two independent uniform screening choices are matched.
pub fn matching_probability(n: usize) -> f64 {
    1.0 / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    pub matching_prob: f64,
    pub ie_sum: f64,
    pub ie_mean: f64,
}

impl Theory {
    pub fn for_n(n: usize) -> Result<Self> {
        Ok(Self {
            matching_prob: matching_probability(n),
            ie_sum: ie_sum(n)?,
            ie_mean: ie_mean(n)?,
        })
    }
}
