//! Correlation between the compared systems' per-item outcomes, and the
//! variance error made by assuming the systems are independent.
//!
//! With positively correlated outcomes the true standard deviation of the
//! result difference is smaller than the independence-based estimate, so
//! tests that assume independence understate significance. For equal
//! per-system deviations the overstatement factor is `1/sqrt(1 - r12)`.

use serde::Serialize;

use crate::data::PairedOutcomes;
use crate::error::{Error, Result};

/// Sample correlation and standard deviations of the paired outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    /// Sample correlation coefficient between the two outcome sequences.
    pub r12: f64,
    /// Sample standard deviation of system 1's outcomes (n-1 denominator).
    pub s1: f64,
    /// Sample standard deviation of system 2's outcomes (n-1 denominator).
    pub s2: f64,
    pub n: usize,
}

/// Estimates r12 = sum_k (y1k - m1)(y2k - m2) / (s1 s2 (n-1)).
///
/// Errors when n < 2 or either sequence is constant (s = 0), in which case
/// the coefficient is undefined and reported as such rather than defaulted.
pub fn estimate_r12(pairs: &PairedOutcomes) -> Result<CorrelationReport> {
    let n = pairs.n();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "correlation needs at least two paired outcomes".into(),
        ));
    }
    let y1: Vec<f64> = pairs.y1().iter().map(|&b| b as u8 as f64).collect();
    let y2: Vec<f64> = pairs.y2().iter().map(|&b| b as u8 as f64).collect();
    let nf = n as f64;
    let m1 = y1.iter().sum::<f64>() / nf;
    let m2 = y2.iter().sum::<f64>() / nf;
    let ss1: f64 = y1.iter().map(|v| (v - m1) * (v - m1)).sum();
    let ss2: f64 = y2.iter().map(|v| (v - m2) * (v - m2)).sum();
    let s1 = (ss1 / (nf - 1.0)).sqrt();
    let s2 = (ss2 / (nf - 1.0)).sqrt();
    if s1 == 0.0 || s2 == 0.0 {
        return Err(Error::Degenerate(
            "r12 undefined: a system's outcomes are constant over the items".into(),
        ));
    }
    let cross: f64 = y1
        .iter()
        .zip(&y2)
        .map(|(a, b)| (a - m1) * (b - m2))
        .sum();
    let r12 = cross / (s1 * s2 * (nf - 1.0));
    Ok(CorrelationReport {
        r12: r12.clamp(-1.0, 1.0),
        s1,
        s2,
        n,
    })
}

/// Standard deviation of the difference:
/// sqrt(s1^2 + s2^2 - 2 r12 s1 s2). The radicand is non-negative by
/// Cauchy-Schwarz; tiny negative round-off is clamped to zero.
pub fn combine_sd(s1: f64, s2: f64, r12: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&r12));
    let radicand = s1 * s1 + s2 * s2 - 2.0 * r12 * s1 * s2;
    radicand.max(0.0).sqrt()
}

/// Factor by which assuming independence inflates the estimated standard
/// deviation of the difference when both systems share one standard
/// deviation: 1/sqrt(1 - r12). Infinite at r12 = 1.
pub fn independence_inflation(r12: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&r12) || r12.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "correlation coefficient must lie in [-1, 1], got {r12}"
        )));
    }
    if r12 == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (1.0 - r12).sqrt())
}

/// Phi coefficient of the 2x2 joint-count table; for binary outcome pairs
/// this equals the sample correlation.
pub fn phi_coefficient(both: u64, only1: u64, only2: u64, neither: u64) -> Option<f64> {
    let (a, b, c, d) = (both as f64, only1 as f64, only2 as f64, neither as f64);
    let denom = ((a + b) * (c + d) * (a + c) * (b + d)).sqrt();
    if denom == 0.0 {
        None
    } else {
        Some((a * d - b * c) / denom)
    }
}
