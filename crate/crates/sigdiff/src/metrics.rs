//! Recall, precision, and balanced F-score as exact rationals.
//!
//! Everything downstream that compares metric differences (in particular the
//! randomization test's "at least as large" criterion) works on exact
//! rationals, so boundary trials are counted deterministically instead of
//! depending on floating-point rounding.

use num::bigint::Sign;
use num::{BigInt, BigRational, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::data::{ResponseCounts, System};
use crate::error::{Error, Result};

/// One of the three compared metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Recall,
    Precision,
    FScore,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MetricKind::Recall => "recall",
            MetricKind::Precision => "precision",
            MetricKind::FScore => "f_score",
        };
        f.write_str(s)
    }
}

/// Recall `a`, precision `b`, and balanced F-score `2ab/(a+b)` for one
/// system. Precision is undefined when the system produced no responses;
/// the F-score is undefined when precision is undefined or `a + b = 0`.
/// Undefined values are carried as `None`, never coerced to 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricTriple {
    pub recall: BigRational,
    pub precision: Option<BigRational>,
    pub f_score: Option<BigRational>,
}

impl MetricTriple {
    pub fn get(&self, which: MetricKind) -> Option<&BigRational> {
        match which {
            MetricKind::Recall => Some(&self.recall),
            MetricKind::Precision => self.precision.as_ref(),
            MetricKind::FScore => self.f_score.as_ref(),
        }
    }
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The value of one metric for one system, as an exact rational.
///
/// Errors with [`Error::UndefinedMetric`] where the metric has no value:
/// precision needs `R + S > 0`, the F-score additionally needs `R > 0`.
/// Recall and F-score need `miss_both` (for the recall denominator).
pub fn metric_value(
    counts: &ResponseCounts,
    system: System,
    which: MetricKind,
) -> Result<BigRational> {
    let r = counts.recalled(system);
    let s = counts.spurious(system);
    let sys_no = match system {
        System::One => 1,
        System::Two => 2,
    };
    match which {
        MetricKind::Recall => {
            let total = counts.require_total()?;
            Ok(ratio(r, total))
        }
        MetricKind::Precision => {
            if r + s == 0 {
                Err(Error::UndefinedMetric(format!(
                    "precision of system {sys_no}: no responses produced"
                )))
            } else {
                Ok(ratio(r, r + s))
            }
        }
        MetricKind::FScore => {
            let total = counts.require_total()?;
            if r + s == 0 {
                Err(Error::UndefinedMetric(format!(
                    "f_score of system {sys_no}: precision undefined"
                )))
            } else if r == 0 {
                Err(Error::UndefinedMetric(format!(
                    "f_score of system {sys_no}: recall and precision are both zero"
                )))
            } else {
                // 2ab/(a+b) with a = R/total, b = R/(R+S) reduces to
                // 2R / (total + R + S).
                Ok(ratio(2 * r, total + r + s))
            }
        }
    }
}

/// All three metrics for one system. Requires at least one item of
/// interest; undefined precision/F are reported as `None`.
pub fn metrics_for(counts: &ResponseCounts, system: System) -> Result<MetricTriple> {
    let total = counts.require_total()?;
    if total == 0 {
        return Err(Error::NoItemsOfInterest);
    }
    let recall = metric_value(counts, system, MetricKind::Recall)?;
    let precision = metric_value(counts, system, MetricKind::Precision).ok();
    let f_score = metric_value(counts, system, MetricKind::FScore).ok();
    Ok(MetricTriple {
        recall,
        precision,
        f_score,
    })
}

/// Signed difference `a - b` of the selected metric, exact.
pub fn metric_difference(
    a: &MetricTriple,
    b: &MetricTriple,
    which: MetricKind,
) -> Result<BigRational> {
    let lhs = a
        .get(which)
        .ok_or_else(|| Error::UndefinedMetric(format!("{which} undefined on left side")))?;
    let rhs = b
        .get(which)
        .ok_or_else(|| Error::UndefinedMetric(format!("{which} undefined on right side")))?;
    Ok(lhs - rhs)
}

/// Renders `value * 100` with `decimals` fractional digits, rounding half
/// away from zero. `render_percent(&(47/103), 1)` is `"45.6"`.
pub fn render_percent(value: &BigRational, decimals: u32) -> String {
    let scale = BigInt::from(10u32).pow(decimals);
    let scaled = value * BigRational::new(BigInt::from(100) * &scale, BigInt::from(1));
    let (num, den) = (scaled.numer().clone(), scaled.denom().clone());
    let negative = num.sign() == Sign::Minus;
    let abs_num = num.abs();
    let q = &abs_num / &den;
    let rem = &abs_num % &den;
    let q = if &rem * 2u32 >= den { q + 1u32 } else { q };
    let digits = q.to_string();
    let d = decimals as usize;
    let mut body = if d == 0 {
        digits
    } else if digits.len() <= d {
        format!("0.{}{}", "0".repeat(d - digits.len()), digits)
    } else {
        let split = digits.len() - d;
        format!("{}.{}", &digits[..split], &digits[split..])
    };
    if negative && body.chars().any(|c| c != '0' && c != '.') {
        body.insert(0, '-');
    }
    body
}

/// Renders the reduced fraction, e.g. `"47/103"`.
pub fn render_fraction(value: &BigRational) -> String {
    if value.denom() == &BigInt::from(1) {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// True when `value` is zero, for callers holding an `Option`.
pub fn is_zero(value: &BigRational) -> bool {
    value.is_zero()
}
