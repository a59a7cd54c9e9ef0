//! Synthetic correlated paired outcomes and rejection-rate studies.
//!
//! Generates bivariate Bernoulli outcomes with chosen marginals and
//! correlation, then tabulates how often each test rejects at a given
//! level. On positively correlated data the matched tests reject genuine
//! differences more often than the tests that assume independence, which
//! is the phenomenon this module makes reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{
    chi2_2x2, matched_pair_t, sign_test, two_proportion_z, two_sample_t, wilcoxon_test, Method,
    Sidedness,
};
use crate::data::PairedOutcomes;
use crate::error::{Error, Result};
use crate::metrics::MetricKind;
use crate::randomization::{build_plan, randomization_test_with_workers};

/// Parameters of one simulation study.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimSpec {
    /// Items of interest per replicate.
    pub n_items: usize,
    /// Marginal success probability of system 1.
    pub p1: f64,
    /// Marginal success probability of system 2.
    pub p2: f64,
    /// Target correlation between the two outcome sequences.
    pub rho: f64,
    pub replicates: usize,
    /// Rejection level for the tabulated rates.
    pub alpha: f64,
    pub seed: u64,
    /// Sampled trials per replicate when the randomization test is among
    /// the studied methods and the replicate is too large for exact mode.
    pub rand_trials: u64,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            n_items: 200,
            p1: 0.6,
            p2: 0.5,
            rho: 0.5,
            replicates: 10_000,
            alpha: 0.05,
            seed: 0,
            rand_trials: 2048,
        }
    }
}

/// Joint cell probabilities of the bivariate Bernoulli.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointCells {
    pub p11: f64,
    pub p10: f64,
    pub p01: f64,
    pub p00: f64,
}

/// The unique joint distribution with the given marginals and correlation:
/// P(1,1) = p1 p2 + rho sqrt(p1 q1 p2 q2), remaining cells by the marginal
/// constraints. Errors when any cell falls outside [0, 1].
pub fn joint_cells(p1: f64, p2: f64, rho: f64) -> Result<JointCells> {
    if !(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "marginal probabilities must lie strictly inside (0, 1), got p1={p1}, p2={p2}"
        )));
    }
    if !(-1.0..=1.0).contains(&rho) || rho.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "correlation must lie in [-1, 1], got {rho}"
        )));
    }
    let p11 = p1 * p2 + rho * (p1 * (1.0 - p1) * p2 * (1.0 - p2)).sqrt();
    let p10 = p1 - p11;
    let p01 = p2 - p11;
    let p00 = 1.0 - p1 - p2 + p11;
    let eps = 1e-12;
    for (name, v) in [("P(1,1)", p11), ("P(1,0)", p10), ("P(0,1)", p01), ("P(0,0)", p00)] {
        if !(-eps..=1.0 + eps).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "rho={rho} is inadmissible for marginals ({p1}, {p2}): {name} = {v}"
            )));
        }
    }
    Ok(JointCells {
        p11: p11.clamp(0.0, 1.0),
        p10: p10.clamp(0.0, 1.0),
        p01: p01.clamp(0.0, 1.0),
        p00: p00.clamp(0.0, 1.0),
    })
}

fn validate(spec: &SimSpec) -> Result<JointCells> {
    if spec.n_items == 0 {
        return Err(Error::InvalidArgument("n_items must be at least 1".into()));
    }
    if spec.replicates == 0 {
        return Err(Error::InvalidArgument(
            "replicates must be at least 1".into(),
        ));
    }
    if !(spec.alpha > 0.0 && spec.alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {}",
            spec.alpha
        )));
    }
    joint_cells(spec.p1, spec.p2, spec.rho)
}

fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

fn generate_with_rng(cells: &JointCells, n: usize, rng: &mut ChaCha8Rng) -> PairedOutcomes {
    let mut y1 = Vec::with_capacity(n);
    let mut y2 = Vec::with_capacity(n);
    let t1 = cells.p11;
    let t2 = t1 + cells.p10;
    let t3 = t2 + cells.p01;
    for _ in 0..n {
        let u: f64 = rng.gen();
        let (a, b) = if u < t1 {
            (true, true)
        } else if u < t2 {
            (true, false)
        } else if u < t3 {
            (false, true)
        } else {
            (false, false)
        };
        y1.push(a);
        y2.push(b);
    }
    PairedOutcomes::new(y1, y2).expect("n >= 1")
}

/// One draw of `n_items` correlated outcome pairs (replicate stream 0 of
/// the seed).
pub fn generate_correlated_pairs(spec: &SimSpec) -> Result<PairedOutcomes> {
    let cells = validate(spec)?;
    let mut rng = replicate_rng(spec.seed, 0);
    Ok(generate_with_rng(&cells, spec.n_items, &mut rng))
}

/// One row of the rejection-rate table.
#[derive(Debug, Clone, Serialize)]
pub struct PowerRow {
    pub method: Method,
    pub rho: f64,
    pub n: usize,
    pub rejections: u64,
    pub replicates: u64,
    pub rejection_rate: f64,
    /// Binomial standard error of the rate.
    pub std_error: f64,
}

/// One-sided p-value of `method` on one replicate (two-sided for the
/// inherently two-sided chi-squared test). `None` when the statistic is
/// degenerate on the replicate, which counts as a non-rejection.
fn replicate_p(method: Method, pairs: &PairedOutcomes, rand_trials: u64, seed: u64) -> Option<f64> {
    let (both, only1, only2, neither) = pairs.joint_counts();
    let n = pairs.n() as u64;
    let r1 = both + only1;
    let r2 = both + only2;
    match method {
        Method::Sign => sign_test(only1, only2, Sidedness::One).ok().map(|r| r.p.value),
        Method::MatchedPairT => matched_pair_t(&pairs.differences(), Sidedness::One)
            .ok()
            .map(|r| r.p.value),
        Method::Wilcoxon => wilcoxon_test(&pairs.differences(), Sidedness::One)
            .ok()
            .map(|r| r.p.value),
        Method::TwoProportionZ => two_proportion_z(r1, n, r2, n, Sidedness::One)
            .ok()
            .map(|r| r.p.value),
        Method::TwoSampleT => {
            let y1: Vec<f64> = pairs.y1().iter().map(|&b| b as u8 as f64).collect();
            let y2: Vec<f64> = pairs.y2().iter().map(|&b| b as u8 as f64).collect();
            two_sample_t(&y1, &y2, Sidedness::One).ok().map(|r| r.p.value)
        }
        // Recalled-vs-missed table; inherently two-sided.
        Method::Chi2TwoByTwo => chi2_2x2(r1, n - r1, r2, n - r2).ok().map(|r| r.p.value),
        Method::Randomization => {
            let counts = crate::data::ResponseCounts {
                c_both: both,
                c_only1: only1,
                c_only2: only2,
                miss_both: Some(neither),
                s_both: 0,
                s_only1: 0,
                s_only2: 0,
            };
            let plan =
                build_plan(&counts, MetricKind::Recall, Sidedness::One, rand_trials, seed).ok()?;
            // Replicates are cheap; a single worker avoids thread churn.
            randomization_test_with_workers(&plan, 1).ok().map(|r| r.p.value)
        }
    }
}

/// Runs `spec.replicates` simulated comparisons and tabulates, for each
/// requested method, how often its p-value is at or below `spec.alpha`.
/// The table is bit-reproducible for a fixed seed.
pub fn power_study(spec: &SimSpec, methods: &[Method]) -> Result<Vec<PowerRow>> {
    let cells = validate(spec)?;
    if methods.is_empty() {
        return Err(Error::InvalidArgument(
            "power study needs at least one method".into(),
        ));
    }
    let mut rejections = vec![0u64; methods.len()];
    for rep in 0..spec.replicates {
        let mut rng = replicate_rng(spec.seed, rep as u64);
        let pairs = generate_with_rng(&cells, spec.n_items, &mut rng);
        // Seed for any inner Monte Carlo, distinct per replicate.
        let inner_seed = spec
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(rep as u64);
        for (slot, &method) in rejections.iter_mut().zip(methods) {
            if let Some(p) = replicate_p(method, &pairs, spec.rand_trials, inner_seed) {
                if p <= spec.alpha {
                    *slot += 1;
                }
            }
        }
    }
    let nrep = spec.replicates as f64;
    Ok(methods
        .iter()
        .zip(rejections)
        .map(|(&method, nrej)| {
            let rate = nrej as f64 / nrep;
            PowerRow {
                method,
                rho: spec.rho,
                n: spec.n_items,
                rejections: nrej,
                replicates: spec.replicates as u64,
                rejection_rate: rate,
                std_error: (rate * (1.0 - rate) / nrep).sqrt(),
            }
        })
        .collect())
}
