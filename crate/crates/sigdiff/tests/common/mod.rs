//! Slow, independent oracles used by the integration and acceptance tests.
//! Everything here is deliberately written from first principles
//! (quadrature of densities, big-integer summation, explicit enumeration)
//! so it shares no code path with the implementation it checks.

#![allow(dead_code)]

use num::{BigInt, BigRational, Signed};
use sigdiff::data::ResponseCounts;
use sigdiff::metrics::MetricKind;

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // The second disjunct is the floating-point noise floor: past it,
    // further subdivision cannot improve the estimate.
    if depth == 0 || delta.abs() <= 15.0 * tol || delta.abs() <= 1e-16 * whole.abs() {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol` (which
/// should stay a little above machine precision on the integral's scale).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol.max(1e-15), 36)
}

/// Standard normal upper tail by integrating the density.
pub fn normal_sf_oracle(z: f64) -> f64 {
    let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if z >= 0.0 {
        0.5 - integrate(density, 0.0, z, 1e-16)
    } else {
        0.5 + integrate(density, z, 0.0, 1e-16)
    }
}

/// Student t upper tail via the substitution t = sqrt(df) tan(x), under
/// which the density becomes proportional to cos(x)^(df-1) on
/// (-pi/2, pi/2). No gamma function involved.
pub fn t_sf_oracle(t: f64, df: u64) -> f64 {
    let nu = df as f64;
    let g = |x: f64| x.cos().powf(nu - 1.0);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let lo = (t / nu.sqrt()).atan();
    let numer = integrate(g, lo, half_pi, 1e-16);
    let denom = integrate(g, -half_pi, half_pi, 1e-16);
    numer / denom
}

/// Chi-squared upper tail via the substitution x = v^2, under which the
/// density becomes proportional to v^(df-1) exp(-v^2/2) on [0, inf) —
/// finite at 0 for every df >= 1.
pub fn chi2_sf_oracle(x: f64, df: u64) -> f64 {
    let k = df as f64;
    let g = |v: f64| v.powf(k - 1.0) * (-0.5 * v * v).exp();
    let vmax = (x.sqrt() + 14.0).max(16.0);
    let numer = integrate(g, x.sqrt(), vmax, 1e-18);
    let denom = integrate(g, 0.0, vmax, 1e-18);
    numer / denom
}

// ---------------------------------------------------------------------------
// exact combinatorics
// ---------------------------------------------------------------------------

/// Exact upper binomial tail P(X >= k) for rational p = p_num/p_den.
pub fn binomial_tail_oracle(k: u64, n: u64, p_num: u64, p_den: u64) -> BigRational {
    let p = BigRational::new(BigInt::from(p_num), BigInt::from(p_den));
    let q = BigRational::new(BigInt::from(p_den - p_num), BigInt::from(p_den));
    let mut sum = BigRational::new(BigInt::from(0), BigInt::from(1));
    for j in k..=n {
        let mut term = BigRational::new(choose(n, j), BigInt::from(1));
        term *= pow_rat(&p, j);
        term *= pow_rat(&q, n - j);
        sum += term;
    }
    sum
}

pub fn choose(n: u64, k: u64) -> BigInt {
    let mut c = BigInt::from(1u32);
    for j in 0..k {
        c = c * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    c
}

fn pow_rat(r: &BigRational, e: u64) -> BigRational {
    let mut out = BigRational::new(BigInt::from(1), BigInt::from(1));
    for _ in 0..e {
        out *= r;
    }
    out
}

/// Counts of the signed-rank sum over all 2^n sign patterns, by explicit
/// enumeration.
pub fn signed_rank_brute(weights: &[u64]) -> Vec<u64> {
    let n = weights.len();
    assert!(n <= 20);
    let max: u64 = weights.iter().sum();
    let mut counts = vec![0u64; max as usize + 1];
    for mask in 0u64..(1 << n) {
        let w: u64 = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| weights[i])
            .sum();
        counts[w as usize] += 1;
    }
    counts
}

// ---------------------------------------------------------------------------
// randomization enumeration (independent arithmetic)
// ---------------------------------------------------------------------------

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Trial metric difference computed from scratch for an assignment that
/// sends `k_c` of the exclusive correct and `k_s` of the exclusive
/// spurious units to system 1. `None` when undefined for a side.
pub fn oracle_trial_diff(
    counts: &ResponseCounts,
    metric: MetricKind,
    k_c: u64,
    k_s: u64,
) -> Option<BigRational> {
    let c_ex = counts.c_only1 + counts.c_only2;
    let s_ex = counts.s_only1 + counts.s_only2;
    let r1 = counts.c_both + k_c;
    let r2 = counts.c_both + c_ex - k_c;
    let s1 = counts.s_both + k_s;
    let s2 = counts.s_both + s_ex - k_s;
    match metric {
        MetricKind::Recall => {
            let t = counts.total_of_interest()?;
            Some(rat(r1, t) - rat(r2, t))
        }
        MetricKind::Precision => {
            if r1 + s1 == 0 || r2 + s2 == 0 {
                None
            } else {
                Some(rat(r1, r1 + s1) - rat(r2, r2 + s2))
            }
        }
        MetricKind::FScore => {
            let t = counts.total_of_interest()?;
            Some(rat(2 * r1, t + r1 + s1) - rat(2 * r2, t + r2 + s2))
        }
    }
}

/// Literal enumeration of all 2^units assignments: returns (nc, nt) for
/// the inclusive "at least as large" criterion against `observed`.
/// Undefined trials never qualify.
pub fn enumerate_randomization(
    counts: &ResponseCounts,
    metric: MetricKind,
    observed: &BigRational,
    two_sided: bool,
) -> (u64, u64) {
    let c_ex = counts.c_only1 + counts.c_only2;
    let s_ex = counts.s_only1 + counts.s_only2;
    let units = (c_ex + s_ex) as u32;
    assert!(units <= 20);
    let nt = 1u64 << units;
    let mut nc = 0u64;
    for mask in 0..nt {
        let mut k_c = 0u64;
        let mut k_s = 0u64;
        for bit in 0..units as u64 {
            if mask >> bit & 1 == 1 {
                if bit < c_ex {
                    k_c += 1;
                } else {
                    k_s += 1;
                }
            }
        }
        let Some(diff) = oracle_trial_diff(counts, metric, k_c, k_s) else {
            continue;
        };
        let qualifies = if two_sided {
            diff.abs() >= observed.abs()
        } else {
            diff >= *observed
        };
        if qualifies {
            nc += 1;
        }
    }
    (nc, nt)
}

/// The worked two-system comparison used across the acceptance suite:
/// 103 items of interest (19 both / 28 only-1 / 6 only-2 / 50 missed)
/// plus 5/43/9 spurious responses.
pub fn example_counts() -> ResponseCounts {
    ResponseCounts {
        c_both: 19,
        c_only1: 28,
        c_only2: 6,
        miss_both: Some(50),
        s_both: 5,
        s_only1: 43,
        s_only2: 9,
    }
}
