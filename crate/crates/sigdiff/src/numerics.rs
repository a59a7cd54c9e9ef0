//! Distribution functions backing the analytic tests.
//!
//! Upper-tail (survival) functions only, since every p-value here is
//! "probability of a result at least this skewed under the null". The
//! incomplete gamma and beta functions are evaluated with a series
//! expansion where it converges fast and a continued fraction (modified
//! Lentz) elsewhere; no continuity corrections are applied anywhere.

use num::{BigInt, BigRational, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A tail probability together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub value: f64,
    pub kind: PValueKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueKind {
    /// An exact tail probability (exact enumeration or integer summation).
    Exact,
    /// An upper bound, e.g. (nc+1)/(nt+1) from sampled randomization trials.
    Bound,
    /// A continuous approximation (normal, t, chi-squared).
    Approximation,
}

impl PValue {
    fn clamped(value: f64, kind: PValueKind) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            kind,
        }
    }

    pub fn exact(value: f64) -> Self {
        Self::clamped(value, PValueKind::Exact)
    }

    pub fn bound(value: f64) -> Self {
        Self::clamped(value, PValueKind::Bound)
    }

    pub fn approximation(value: f64) -> Self {
        Self::clamped(value, PValueKind::Approximation)
    }
}

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 500;

// Lanczos approximation, g = 7, 9 coefficients.
const LANCZOS: [f64; 8] = [
    676.5203681218851,
    -1259.1392167224028,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507343278686905,
    -0.13857109526572012,
    9.984_369_578_019_572e-6,
    1.5056327351493116e-7,
];

/// Natural log of the gamma function, for positive arguments.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = 0.999_999_999_999_809_9;
        let t = x + 7.5;
        for (i, &c) in LANCZOS.iter().enumerate() {
            a += c / (x + (i + 1) as f64);
        }
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

/// Series for the regularized lower incomplete gamma P(a, x), x < a + 1.
fn gamma_series(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Continued fraction for the regularized upper incomplete gamma Q(a, x),
/// x >= a + 1 (modified Lentz).
fn gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub(crate) fn reg_gamma_upper(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b).
pub(crate) fn reg_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_bt = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let bt = ln_bt.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * beta_cf(a, b, x) / a
    } else {
        1.0 - bt * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Upper tail of the standard normal distribution, P(Z >= z).
pub fn normal_sf(z: f64) -> f64 {
    // 0.5 * erfc(z / sqrt(2)), with erfc(y) = Q(1/2, y^2)
    let tail = 0.5 * reg_gamma_upper(0.5, 0.5 * z * z);
    if z >= 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Upper tail of Student's t with `df` degrees of freedom, P(T >= t).
pub fn t_sf(t: f64, df: u64) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidArgument(
            "t distribution needs df >= 1".into(),
        ));
    }
    let nu = df as f64;
    let x = nu / (nu + t * t);
    let half_tail = 0.5 * reg_beta(nu / 2.0, 0.5, x);
    Ok(if t >= 0.0 { half_tail } else { 1.0 - half_tail })
}

/// Upper tail of the chi-squared distribution, P(X >= x).
pub fn chi2_sf(x: f64, df: u64) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidArgument(
            "chi-squared distribution needs df >= 1".into(),
        ));
    }
    if x < 0.0 || x.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "chi-squared statistic must be non-negative, got {x}"
        )));
    }
    Ok(reg_gamma_upper(df as f64 / 2.0, x / 2.0))
}

/// Largest `n` for which the fair-coin binomial tail is summed exactly in
/// integer arithmetic; beyond it the log-space path is used.
pub(crate) const BINOMIAL_EXACT_LIMIT: u64 = 4096;

/// Both tails of Binomial(n, 1/2) as exact rationals with denominator 2^n:
/// `(P(X >= k), P(X <= k))`. `None` when `n` is past the exact limit.
pub(crate) fn binomial_half_tails(k: u64, n: u64) -> Option<(BigRational, BigRational)> {
    if n > BINOMIAL_EXACT_LIMIT {
        return None;
    }
    let mut coeff = BigInt::from(1u32);
    let mut upper = BigInt::from(0u32);
    let mut lower = BigInt::from(0u32);
    for j in 0..=n {
        if j >= k {
            upper += &coeff;
        }
        if j <= k {
            lower += &coeff;
        }
        if j < n {
            // C(n, j+1) = C(n, j) * (n - j) / (j + 1)
            coeff = coeff * BigInt::from(n - j) / BigInt::from(j + 1);
        }
    }
    let denom = BigInt::from(1u32) << n as usize;
    Some((
        BigRational::new(upper, denom.clone()),
        BigRational::new(lower, denom),
    ))
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Upper tail of Binomial(n, p): P(X >= k).
///
/// For p = 1/2 and moderate n the tail is summed exactly over big integers;
/// otherwise terms are accumulated in log space starting from the boundary
/// term, summing the numerically smaller tail.
pub fn binomial_tail(k: u64, n: u64, p: f64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "binomial tail needs k <= n, got k={k}, n={n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "binomial probability must lie in [0, 1], got {p}"
        )));
    }
    if k == 0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    if p == 0.5 {
        if let Some((upper, _)) = binomial_half_tails(k, n) {
            return Ok(upper.to_f64().unwrap_or(0.0));
        }
    }
    let mode = ((n as f64 + 1.0) * p).floor();
    if k as f64 > mode {
        // P(X >= k): terms decrease as j grows.
        let mut acc = 1.0f64;
        let mut t = 1.0f64;
        for j in k..n {
            t *= (n - j) as f64 / (j + 1) as f64 * (p / (1.0 - p));
            acc += t;
            if t < acc * 1e-18 {
                break;
            }
        }
        let ln_t0 = ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln();
        Ok((ln_t0 + acc.ln()).exp().min(1.0))
    } else {
        // 1 - P(X <= k-1): terms of the lower tail decrease as j shrinks.
        let k0 = k - 1;
        let mut acc = 1.0f64;
        let mut t = 1.0f64;
        for j in (1..=k0).rev() {
            t *= j as f64 / (n - j + 1) as f64 * ((1.0 - p) / p);
            acc += t;
            if t < acc * 1e-18 {
                break;
            }
        }
        let ln_t0 = ln_choose(n, k0) + k0 as f64 * p.ln() + (n - k0) as f64 * (1.0 - p).ln();
        Ok((1.0 - (ln_t0 + acc.ln()).exp()).max(0.0))
    }
}

/// Null distribution of the signed-rank sum over the given (integer) rank
/// weights: entry `s` counts the sign patterns whose positive-rank sum is
/// `s`; entries total 2^n.
///
/// Panics if there are more than 63 weights (the counts would overflow).
pub fn signed_rank_distribution(weights: &[u64]) -> Vec<u64> {
    assert!(
        weights.len() <= 63,
        "signed-rank enumeration supports at most 63 ranks"
    );
    let max: u64 = weights.iter().sum();
    let mut dp = vec![0u64; max as usize + 1];
    dp[0] = 1;
    for &w in weights {
        let w = w as usize;
        for s in (w..=max as usize).rev() {
            dp[s] += dp[s - w];
        }
    }
    dp
}

/// P(W >= threshold) where W is the signed-rank sum over `weights`; exact.
pub(crate) fn signed_rank_tail(weights: &[u64], threshold: f64) -> f64 {
    let dist = signed_rank_distribution(weights);
    let total = 2f64.powi(weights.len() as i32);
    let mut count = 0u64;
    for (s, &c) in dist.iter().enumerate() {
        if s as f64 >= threshold {
            count += c;
        }
    }
    count as f64 / total
}

/// P(W <= threshold), the complementary tail.
pub(crate) fn signed_rank_lower_tail(weights: &[u64], threshold: f64) -> f64 {
    let dist = signed_rank_distribution(weights);
    let total = 2f64.powi(weights.len() as i32);
    let mut count = 0u64;
    for (s, &c) in dist.iter().enumerate() {
        if s as f64 <= threshold {
            count += c;
        }
    }
    count as f64 / total
}

/// Default size limit for the exact signed-rank distribution.
pub const WILCOXON_EXACT_LIMIT: u64 = 50;

/// Upper tail P(W >= w) of the untied signed-rank sum over ranks 1..=n.
///
/// Exact dynamic programming for `n <= exact_limit`; otherwise the normal
/// approximation with mean n(n+1)/4 and variance n(n+1)(2n+1)/24, without
/// continuity correction.
pub fn wilcoxon_signed_rank_sf_with_limit(w: f64, n: u64, exact_limit: u64) -> f64 {
    if n <= exact_limit.min(63) {
        let weights: Vec<u64> = (1..=n).collect();
        signed_rank_tail(&weights, w)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
        normal_sf((w - mean) / var.sqrt())
    }
}

/// [`wilcoxon_signed_rank_sf_with_limit`] at the default limit of 50.
pub fn wilcoxon_signed_rank_sf(w: f64, n: u64) -> f64 {
    wilcoxon_signed_rank_sf_with_limit(w, n, WILCOXON_EXACT_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_sf_basics() {
        assert_eq!(normal_sf(0.0), 0.5);
        assert!((normal_sf(1.959964) - 0.025).abs() < 1e-6);
        assert!((normal_sf(-10.0) - 1.0).abs() < 1e-12);
        for z in [-4.0, -1.0, -0.3, 0.0, 0.7, 2.5, 5.0] {
            assert!((normal_sf(z) + normal_sf(-z) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_sf_monotone() {
        let mut prev = normal_sf(-8.0);
        let mut z = -8.0;
        while z <= 8.0 {
            let cur = normal_sf(z);
            assert!(cur <= prev + 1e-15);
            prev = cur;
            z += 0.25;
        }
    }

    #[test]
    fn t_sf_basics() {
        assert_eq!(t_sf(0.0, 7).unwrap(), 0.5);
        // df = 1 is the Cauchy distribution: P(T >= 1) = 1/4.
        assert!((t_sf(1.0, 1).unwrap() - 0.25).abs() < 1e-12);
        assert!((t_sf(2.228, 10).unwrap() - 0.025).abs() < 1e-4);
        assert!(t_sf(1.0, 0).is_err());
    }

    #[test]
    fn t_sf_converges_to_normal() {
        let mut z = -5.0;
        while z <= 5.0 {
            let t = t_sf(z, 1_000_000).unwrap();
            assert!((t - normal_sf(z)).abs() < 1e-6, "z = {z}");
            z += 0.5;
        }
    }

    #[test]
    fn chi2_sf_basics() {
        assert_eq!(chi2_sf(0.0, 1).unwrap(), 1.0);
        let p = chi2_sf(2.38, 1).unwrap();
        assert!((0.10..0.20).contains(&p), "p = {p}");
        assert!((p - 0.1229).abs() < 5e-4);
        assert!(chi2_sf(-1.0, 1).is_err());
        assert!(chi2_sf(1.0, 0).is_err());
    }

    #[test]
    fn chi2_is_squared_normal_for_one_df() {
        for z in [0.3, 1.0, 1.7, 2.38f64.sqrt(), 3.2] {
            let lhs = chi2_sf(z * z, 1).unwrap();
            let rhs = 2.0 * normal_sf(z);
            assert!((lhs - rhs).abs() < 1e-10, "z = {z}");
        }
    }

    #[test]
    fn binomial_tail_exact_values() {
        assert_eq!(binomial_tail(0, 9, 0.3).unwrap(), 1.0);
        assert!((binomial_tail(5, 5, 0.5).unwrap() - 1.0 / 32.0).abs() < 1e-15);
        // Sum of C(34, k) for k in 28..=34 is 1676116.
        let expect = 1676116.0 / (1u64 << 34) as f64;
        assert_eq!(binomial_tail(28, 34, 0.5).unwrap(), expect);
        assert!(binomial_tail(6, 5, 0.5).is_err());
        assert!(binomial_tail(1, 5, 1.5).is_err());
        assert_eq!(binomial_tail(3, 5, 0.0).unwrap(), 0.0);
        assert_eq!(binomial_tail(3, 5, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn binomial_tail_log_path_matches_exact_path() {
        // Same tail computed by the integer path and the log-space path.
        for (k, n, p) in [(60u64, 100u64, 0.5f64), (10, 100, 0.5), (90, 100, 0.5)] {
            let exact = binomial_tail(k, n, p).unwrap();
            // Nudge p off 1/2 so the log path is taken, then compare to a
            // recomputation at 1/2 distance epsilon away; instead compare
            // directly against a big-rational evaluation at p = 1/2.
            let (upper, _) = binomial_half_tails(k, n).unwrap();
            assert!((exact - upper.to_f64().unwrap()).abs() < 1e-12);
        }
        // Off-center p against a direct rational summation.
        let k = 70u64;
        let n = 120u64;
        let p = BigRational::new(BigInt::from(3), BigInt::from(10));
        let q = BigRational::new(BigInt::from(7), BigInt::from(10));
        let mut coeff = BigInt::from(1u32);
        for j in 0..k {
            coeff = coeff * BigInt::from(n - j) / BigInt::from(j + 1);
        }
        let mut term = BigRational::from(coeff)
            * num::pow::pow(p.clone(), k as usize)
            * num::pow::pow(q.clone(), (n - k) as usize);
        let mut sum = BigRational::from(BigInt::from(0));
        for j in k..=n {
            sum += term.clone();
            if j < n {
                term = term * BigRational::new(BigInt::from(n - j), BigInt::from(j + 1)) * &p / &q;
            }
        }
        let oracle = sum.to_f64().unwrap();
        let got = binomial_tail(k, n, 0.3).unwrap();
        assert!(
            ((got - oracle) / oracle).abs() < 1e-9,
            "got {got}, oracle {oracle}"
        );
    }

    #[test]
    fn signed_rank_small_cases() {
        assert_eq!(wilcoxon_signed_rank_sf(1.0, 1), 0.5);
        assert_eq!(wilcoxon_signed_rank_sf(6.0, 3), 1.0 / 8.0);
        assert_eq!(wilcoxon_signed_rank_sf(15.0, 5), 1.0 / 32.0);
        assert_eq!(wilcoxon_signed_rank_sf(0.0, 4), 1.0);
    }

    #[test]
    fn signed_rank_distribution_mass_is_total() {
        for n in 1..=20u64 {
            let weights: Vec<u64> = (1..=n).collect();
            let dist = signed_rank_distribution(&weights);
            let mass: u64 = dist.iter().sum();
            assert_eq!(mass, 1u64 << n);
        }
    }

    #[test]
    fn signed_rank_matches_brute_force_enumeration() {
        for n in 1..=10usize {
            let weights: Vec<u64> = (1..=n as u64).collect();
            let dist = signed_rank_distribution(&weights);
            let max: u64 = weights.iter().sum();
            let mut brute = vec![0u64; max as usize + 1];
            for mask in 0u64..(1 << n) {
                let w: u64 = (0..n)
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| weights[i])
                    .sum();
                brute[w as usize] += 1;
            }
            assert_eq!(dist, brute, "n = {n}");
        }
    }

    #[test]
    fn signed_rank_normal_branch_is_reasonable() {
        // Past the exact limit the approximation should be close to the
        // exact value computed with a raised limit.
        let n = 60u64;
        let w = 1200.0;
        let exact = wilcoxon_signed_rank_sf_with_limit(w, n, 63);
        let approx = wilcoxon_signed_rank_sf(w, n);
        assert!((exact - approx).abs() < 0.01, "{exact} vs {approx}");
    }

    #[test]
    fn survival_functions_monotone_in_statistic() {
        let mut prev = 1.0f64;
        for i in 0..=40 {
            let t = -5.0 + i as f64 * 0.25;
            let cur = t_sf(t, 7).unwrap();
            assert!(cur <= prev + 1e-14);
            prev = cur;
        }
        let mut prev = 1.0f64;
        for i in 0..=40 {
            let x = i as f64;
            let cur = chi2_sf(x, 3).unwrap();
            assert!(cur <= prev + 1e-14);
            prev = cur;
        }
        let mut prev = 1.0f64;
        for k in 0..=30u64 {
            let cur = binomial_tail(k, 30, 0.4).unwrap();
            assert!(cur <= prev + 1e-14);
            prev = cur;
        }
    }
}
