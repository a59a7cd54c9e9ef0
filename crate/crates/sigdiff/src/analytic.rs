//! Closed-form significance tests.
//!
//! Two families. The two-sample t, two-proportion z, and 2x2 chi-squared
//! tests assume the compared results are independent and are flagged as
//! such in every result. The matched-pair t, sign, and Wilcoxon tests work
//! on per-item result differences and need no independence assumption.
//!
//! One-sided p-values are always the upper tail of the signed statistic
//! (alternative: system 1 better); relabel the systems to test the other
//! direction. Two-sided p-values for the discrete tests double the smaller
//! tail and cap at 1.

use num::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::data::PairedOutcomes;
use crate::error::{Error, Result};
use crate::numerics::{
    self, binomial_half_tails, normal_sf, signed_rank_lower_tail, signed_rank_tail, t_sf, PValue,
};

/// Identifier of a significance-testing method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TwoSampleT,
    TwoProportionZ,
    Chi2TwoByTwo,
    MatchedPairT,
    Sign,
    Wilcoxon,
    Randomization,
}

impl Method {
    /// True exactly for the tests that assume the compared results are
    /// independent.
    pub fn assumes_independence(&self) -> bool {
        matches!(
            self,
            Method::TwoSampleT | Method::TwoProportionZ | Method::Chi2TwoByTwo
        )
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::TwoSampleT => "two_sample_t",
            Method::TwoProportionZ => "two_proportion_z",
            Method::Chi2TwoByTwo => "chi2_2x2",
            Method::MatchedPairT => "matched_pair_t",
            Method::Sign => "sign",
            Method::Wilcoxon => "wilcoxon",
            Method::Randomization => "randomization",
        };
        f.write_str(s)
    }
}

/// Whether a p-value covers one or both tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    One,
    Two,
}

impl std::fmt::Display for Sidedness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sidedness::One => "one",
            Sidedness::Two => "two",
        })
    }
}

/// Outcome of one analytic test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub sidedness: Sidedness,
    pub p: PValue,
    /// Degrees of freedom for the t and chi-squared tests, the effective
    /// sample count for the others.
    pub df_or_n: u64,
    pub assumes_independence: bool,
}

fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

fn continuous_p(upper_tail_at_stat: f64, upper_tail_at_abs: f64, sidedness: Sidedness) -> PValue {
    match sidedness {
        Sidedness::One => PValue::approximation(upper_tail_at_stat),
        Sidedness::Two => PValue::approximation(2.0 * upper_tail_at_abs),
    }
}

/// Two-sample t test on the raw per-sample values of each system, pooling
/// the two variance estimates. Assumes independence of the two samples.
pub fn two_sample_t(sample1: &[f64], sample2: &[f64], sidedness: Sidedness) -> Result<TestResult> {
    let (n1, n2) = (sample1.len(), sample2.len());
    if n1 < 2 || n2 < 2 {
        return Err(Error::InvalidArgument(
            "two-sample t needs at least two values per sample".into(),
        ));
    }
    let (m1, s1) = mean_and_sd(sample1);
    let (m2, s2) = mean_and_sd(sample2);
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let pooled = ((n1f - 1.0) * s1 * s1 + (n2f - 1.0) * s2 * s2) / (n1f + n2f - 2.0);
    let sd = (pooled * (n1f + n2f) / (n1f * n2f)).sqrt();
    if sd == 0.0 {
        return Err(Error::Degenerate(
            "two-sample t: pooled variance is zero".into(),
        ));
    }
    let df = (n1 + n2 - 2) as u64;
    let statistic = (m1 - m2) / sd;
    let p = continuous_p(t_sf(statistic, df)?, t_sf(statistic.abs(), df)?, sidedness);
    Ok(TestResult {
        method: Method::TwoSampleT,
        statistic,
        sidedness,
        p,
        df_or_n: df,
        assumes_independence: true,
    })
}

/// Two-proportion z test with pooled variance: compares r1/n1 to r2/n2
/// against the normal approximation of the binomial. Assumes independence.
pub fn two_proportion_z(
    r1: u64,
    n1: u64,
    r2: u64,
    n2: u64,
    sidedness: Sidedness,
) -> Result<TestResult> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument(
            "two-proportion z needs n1, n2 >= 1".into(),
        ));
    }
    if r1 > n1 || r2 > n2 {
        return Err(Error::InvalidArgument(
            "two-proportion z needs r <= n for each system".into(),
        ));
    }
    let pooled = (r1 + r2) as f64 / (n1 + n2) as f64;
    if pooled == 0.0 || pooled == 1.0 {
        return Err(Error::Degenerate(
            "two-proportion z: pooled proportion is 0 or 1".into(),
        ));
    }
    let d = r1 as f64 / n1 as f64 - r2 as f64 / n2 as f64;
    let sd = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    let statistic = d / sd;
    let p = continuous_p(normal_sf(statistic), normal_sf(statistic.abs()), sidedness);
    Ok(TestResult {
        method: Method::TwoProportionZ,
        statistic,
        sidedness,
        p,
        df_or_n: n1 + n2,
        assumes_independence: true,
    })
}

/// 2x2 contingency test of whether R/S differs between the systems:
/// rows (r1, s1) and (r2, s2), chi-squared with one degree of freedom,
/// no Yates adjustment. Inherently two-sided. Assumes independence.
pub fn chi2_2x2(r1: u64, s1: u64, r2: u64, s2: u64) -> Result<TestResult> {
    let row1 = r1 + s1;
    let row2 = r2 + s2;
    let col1 = r1 + r2;
    let col2 = s1 + s2;
    if row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0 {
        return Err(Error::Degenerate(
            "chi-squared 2x2: a marginal total is zero".into(),
        ));
    }
    let n = (row1 + row2) as f64;
    let cross = r1 as f64 * s2 as f64 - s1 as f64 * r2 as f64;
    let statistic = n * cross * cross / (row1 as f64 * row2 as f64 * col1 as f64 * col2 as f64);
    let p = PValue::approximation(numerics::chi2_sf(statistic, 1)?);
    Ok(TestResult {
        method: Method::Chi2TwoByTwo,
        statistic,
        sidedness: Sidedness::Two,
        p,
        df_or_n: 1,
        assumes_independence: true,
    })
}

/// Matched-pair t test on per-sample differences d_k (system 1 minus
/// system 2): statistic mean(d) / (sd(d)/sqrt(n)) with n-1 degrees of
/// freedom.
pub fn matched_pair_t(differences: &[f64], sidedness: Sidedness) -> Result<TestResult> {
    let n = differences.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "matched-pair t needs at least two paired samples".into(),
        ));
    }
    let (mean, sd) = mean_and_sd(differences);
    if sd == 0.0 {
        return Err(Error::Degenerate(format!(
            "matched-pair t: all per-sample differences equal {mean}, so the \
             difference deviation is zero"
        )));
    }
    let statistic = mean / (sd / (n as f64).sqrt());
    let df = (n - 1) as u64;
    let p = continuous_p(t_sf(statistic, df)?, t_sf(statistic.abs(), df)?, sidedness);
    Ok(TestResult {
        method: Method::MatchedPairT,
        statistic,
        sidedness,
        p,
        df_or_n: df,
        assumes_independence: false,
    })
}

/// Matched-pair t over binary paired outcomes.
pub fn matched_pair_t_outcomes(pairs: &PairedOutcomes, sidedness: Sidedness) -> Result<TestResult> {
    matched_pair_t(&pairs.differences(), sidedness)
}

/// Sign test: among items where the systems differ, counts how often
/// system 1 was the better one against Binomial(n, 1/2). Ties must be
/// excluded before the call. The p-value is exact.
pub fn sign_test(n_plus: u64, n_minus: u64, sidedness: Sidedness) -> Result<TestResult> {
    let n = n_plus + n_minus;
    if n == 0 {
        return Err(Error::Degenerate(
            "sign test: no discriminating items (the systems never disagree)".into(),
        ));
    }
    let (p_value, kind_exact) = match binomial_half_tails(n_plus, n) {
        Some((upper, lower)) => {
            let v = match sidedness {
                Sidedness::One => upper,
                Sidedness::Two => {
                    let smaller = upper.min(lower);
                    (smaller * num::BigRational::from(num::BigInt::from(2)))
                        .min(num::BigRational::from(num::BigInt::from(1)))
                }
            };
            (v.to_f64().unwrap_or(1.0), true)
        }
        None => {
            let upper = numerics::binomial_tail(n_plus, n, 0.5)?;
            let v = match sidedness {
                Sidedness::One => upper,
                Sidedness::Two => {
                    let lower = 1.0 - numerics::binomial_tail(n_plus + 1, n, 0.5)?;
                    (2.0 * upper.min(lower)).min(1.0)
                }
            };
            (v, false)
        }
    };
    let p = if kind_exact {
        PValue::exact(p_value)
    } else {
        PValue::approximation(p_value)
    };
    Ok(TestResult {
        method: Method::Sign,
        statistic: n_plus as f64 - n_minus as f64,
        sidedness,
        p,
        df_or_n: n,
        assumes_independence: false,
    })
}

/// Wilcoxon signed-rank test on per-sample differences.
///
/// Zero differences are dropped; absolute differences are ranked with
/// midranks for ties; W is the positive-rank sum. For n up to
/// `exact_limit` the p-value comes from the exact conditional distribution
/// over sign flips of the observed (mid)ranks, which handles ties exactly;
/// past the limit, the normal approximation with tie-corrected variance is
/// used.
pub fn wilcoxon_test_with_limit(
    differences: &[f64],
    sidedness: Sidedness,
    exact_limit: u64,
) -> Result<TestResult> {
    let mut nonzero: Vec<(f64, bool)> = differences
        .iter()
        .filter(|d| **d != 0.0)
        .map(|&d| (d.abs(), d > 0.0))
        .collect();
    if nonzero.is_empty() {
        return Err(Error::Degenerate(
            "wilcoxon: all per-sample differences are zero".into(),
        ));
    }
    nonzero.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("non-NaN differences"));
    let n = nonzero.len();

    // Doubled midranks stay integral: a tie group spanning 0-based sorted
    // positions [i, j] has midrank (i + j)/2 + 1, doubled i + j + 2.
    let mut doubled = vec![0u64; n];
    let mut tie_correction = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && nonzero[j + 1].0 == nonzero[i].0 {
            j += 1;
        }
        let group = (j - i + 1) as f64;
        if group > 1.0 {
            tie_correction += group * group * group - group;
        }
        for d in doubled.iter_mut().take(j + 1).skip(i) {
            *d = (i + j + 2) as u64;
        }
        i = j + 1;
    }

    let w2: u64 = doubled
        .iter()
        .zip(&nonzero)
        .filter(|(_, &(_, positive))| positive)
        .map(|(&d, _)| d)
        .sum();
    let statistic = w2 as f64 / 2.0;

    let nf = n as f64;
    let p = if (n as u64) <= exact_limit.min(63) {
        let upper = signed_rank_tail(&doubled, w2 as f64);
        let v = match sidedness {
            Sidedness::One => upper,
            Sidedness::Two => {
                let lower = signed_rank_lower_tail(&doubled, w2 as f64);
                (2.0 * upper.min(lower)).min(1.0)
            }
        };
        PValue::exact(v)
    } else {
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_correction / 48.0;
        let z = (statistic - mean) / var.sqrt();
        match sidedness {
            Sidedness::One => PValue::approximation(normal_sf(z)),
            Sidedness::Two => PValue::approximation(2.0 * normal_sf(z.abs())),
        }
    };
    Ok(TestResult {
        method: Method::Wilcoxon,
        statistic,
        sidedness,
        p,
        df_or_n: n as u64,
        assumes_independence: false,
    })
}

/// [`wilcoxon_test_with_limit`] at the default exact limit of 50.
pub fn wilcoxon_test(differences: &[f64], sidedness: Sidedness) -> Result<TestResult> {
    wilcoxon_test_with_limit(differences, sidedness, numerics::WILCOXON_EXACT_LIMIT)
}
