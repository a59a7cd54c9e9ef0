//! Stratified-shuffle randomization tests for recall, precision, and
//! F-score differences.
//!
//! Responses produced by both systems or by neither are fixed; each
//! response produced by exactly one system is a shuffleable unit that a
//! trial reassigns to either system with equal probability. A trial
//! qualifies when its metric difference is at least as large as the
//! observed one, compared in exact rational arithmetic so boundary trials
//! are never lost to floating-point rounding.
//!
//! With few units every assignment is enumerated (exact mode, p = nc/nt);
//! otherwise trials are sampled and the reported p is the (nc+1)/(nt+1)
//! upper bound. Per-trial randomness comes from a counter-based ChaCha
//! stream addressed by (master seed, trial index), so aggregate counts are
//! bit-identical for a fixed seed no matter how trials are partitioned
//! across workers.
//!
//! One-sided tests use the fixed direction "system 1 better" (trial
//! difference >= observed difference); swap the system labels to test the
//! other direction. Two-sided tests compare magnitudes.

use num::{BigInt, BigRational, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{sign_test, Sidedness};
use crate::data::{ResponseCounts, System};
use crate::error::{Error, Result};
use crate::metrics::{metric_value, MetricKind};
use crate::numerics::PValue;

/// Exhaustive enumeration vs sampled trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Approximate,
}

/// Unit count at or below which the test enumerates all assignments.
pub const DEFAULT_EXACT_THRESHOLD: u32 = 20;

/// Default number of sampled trials in approximate mode (2^20).
pub const DEFAULT_TRIALS: u64 = 1 << 20;

/// Everything needed to run (and re-run) one randomization test.
#[derive(Debug, Clone)]
pub struct RandomizationPlan {
    metric: MetricKind,
    sidedness: Sidedness,
    /// Flag per shuffleable unit: true when the unit is an item of
    /// interest, false when spurious. Ordered: system 1's exclusive
    /// correct units, system 2's, system 1's exclusive spurious units,
    /// system 2's.
    units: Vec<bool>,
    c_only1: u64,
    c_only2: u64,
    s_only1: u64,
    s_only2: u64,
    shared_correct: u64,
    shared_spurious: u64,
    total_of_interest: Option<u64>,
    observed: BigRational,
    mode: Mode,
    trials: u64,
    master_seed: u64,
    exact_threshold: u32,
}

impl RandomizationPlan {
    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    pub fn units(&self) -> &[bool] {
        &self.units
    }

    pub fn unit_count(&self) -> u64 {
        self.units.len() as u64
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn exact_threshold(&self) -> u32 {
        self.exact_threshold
    }

    /// The observed metric difference (system 1 minus system 2), exact.
    pub fn observed(&self) -> &BigRational {
        &self.observed
    }

    /// The assignment that reproduces the original system attribution.
    pub fn original_assignment(&self) -> Vec<bool> {
        let mut a = Vec::with_capacity(self.units.len());
        a.extend(std::iter::repeat(true).take(self.c_only1 as usize));
        a.extend(std::iter::repeat(false).take(self.c_only2 as usize));
        a.extend(std::iter::repeat(true).take(self.s_only1 as usize));
        a.extend(std::iter::repeat(false).take(self.s_only2 as usize));
        a
    }

    fn c_ex(&self) -> u64 {
        self.c_only1 + self.c_only2
    }

    fn s_ex(&self) -> u64 {
        self.s_only1 + self.s_only2
    }
}

/// Outcome of one randomization run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomizationResult {
    pub metric: MetricKind,
    pub sidedness: Sidedness,
    pub mode: Mode,
    /// Trials whose difference was at least as large as the observed one.
    pub nc: u64,
    /// Total trials (2^units in exact mode).
    pub nt: u64,
    /// nc/nt in exact mode; the (nc+1)/(nt+1) bound in approximate mode.
    pub p: PValue,
    pub seed: u64,
    /// True when there were no shuffleable units, so p is necessarily 1.
    pub degenerate: bool,
}

/// Builds a plan with the default exact threshold.
pub fn build_plan(
    counts: &ResponseCounts,
    metric: MetricKind,
    sidedness: Sidedness,
    trials: u64,
    master_seed: u64,
) -> Result<RandomizationPlan> {
    build_plan_with_threshold(
        counts,
        metric,
        sidedness,
        trials,
        master_seed,
        DEFAULT_EXACT_THRESHOLD,
    )
}

/// Builds a plan, choosing exact mode when the shuffleable-unit count is at
/// most `exact_threshold` (which must be <= 30).
pub fn build_plan_with_threshold(
    counts: &ResponseCounts,
    metric: MetricKind,
    sidedness: Sidedness,
    trials: u64,
    master_seed: u64,
    exact_threshold: u32,
) -> Result<RandomizationPlan> {
    if exact_threshold > 30 {
        return Err(Error::InvalidArgument(format!(
            "exact threshold must be at most 30, got {exact_threshold}"
        )));
    }
    // The observed difference must exist before anything is shuffled.
    let v1 = metric_value(counts, System::One, metric)?;
    let v2 = metric_value(counts, System::Two, metric)?;
    let observed = v1 - v2;

    let unit_count = counts.exclusive_units();
    let n_units = usize::try_from(unit_count)
        .map_err(|_| Error::InvalidArgument("unit count exceeds addressable memory".into()))?;
    let mut units = Vec::with_capacity(n_units);
    units.extend(std::iter::repeat(true).take((counts.c_only1 + counts.c_only2) as usize));
    units.extend(std::iter::repeat(false).take((counts.s_only1 + counts.s_only2) as usize));

    let mode = if unit_count <= exact_threshold as u64 {
        Mode::Exact
    } else {
        Mode::Approximate
    };
    if mode == Mode::Approximate && trials == 0 {
        return Err(Error::InvalidArgument(
            "approximate randomization needs at least one trial".into(),
        ));
    }
    Ok(RandomizationPlan {
        metric,
        sidedness,
        units,
        c_only1: counts.c_only1,
        c_only2: counts.c_only2,
        s_only1: counts.s_only1,
        s_only2: counts.s_only2,
        shared_correct: counts.c_both,
        shared_spurious: counts.s_both,
        total_of_interest: counts.total_of_interest(),
        observed,
        mode,
        trials,
        master_seed,
        exact_threshold,
    })
}

fn ratio_u64(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Metric difference (system 1 minus system 2) of the trial in which `k_c`
/// of the exclusive correct units and `k_s` of the exclusive spurious
/// units go to system 1. `None` when a side's metric is undefined.
///
/// The trial F-score uses the closed form 2R/(total + R + S), which equals
/// the harmonic-mean definition whenever that is defined and extends it
/// continuously (value 0) at R = 0.
fn trial_diff(
    plan: &RandomizationPlan,
    metric: MetricKind,
    k_c: u64,
    k_s: u64,
) -> Option<BigRational> {
    let r1 = plan.shared_correct + k_c;
    let r2 = plan.shared_correct + (plan.c_ex() - k_c);
    let s1 = plan.shared_spurious + k_s;
    let s2 = plan.shared_spurious + (plan.s_ex() - k_s);
    match metric {
        MetricKind::Recall => {
            let total = plan.total_of_interest?;
            let diff = BigInt::from(r1 as i128 - r2 as i128);
            Some(BigRational::new(diff, BigInt::from(total)))
        }
        MetricKind::Precision => {
            if r1 + s1 == 0 || r2 + s2 == 0 {
                return None;
            }
            Some(ratio_u64(r1, r1 + s1) - ratio_u64(r2, r2 + s2))
        }
        MetricKind::FScore => {
            let total = plan.total_of_interest?;
            Some(ratio_u64(2 * r1, total + r1 + s1) - ratio_u64(2 * r2, total + r2 + s2))
        }
    }
}

/// Evaluates one explicit assignment (bit per unit, true = system 1) and
/// returns the trial's exact metric difference.
pub fn run_trial(plan: &RandomizationPlan, assignment: &[bool]) -> Result<BigRational> {
    if assignment.len() != plan.units.len() {
        return Err(Error::InvalidArgument(format!(
            "assignment length {} does not match {} units",
            assignment.len(),
            plan.units.len()
        )));
    }
    let mut k_c = 0u64;
    let mut k_s = 0u64;
    for (&to_one, &of_interest) in assignment.iter().zip(&plan.units) {
        if to_one {
            if of_interest {
                k_c += 1;
            } else {
                k_s += 1;
            }
        }
    }
    trial_diff(plan, plan.metric, k_c, k_s).ok_or_else(|| {
        Error::UndefinedMetric(format!(
            "{} undefined for a system under this assignment",
            plan.metric
        ))
    })
}

/// Qualifying region for one row (fixed k_c) as up to two closed
/// k_s-intervals. The trial difference is monotone non-increasing in k_s,
/// so for any threshold the qualifying set is an interval.
#[derive(Debug, Clone, Copy, Default)]
struct KsIntervals {
    a: Option<(u64, u64)>,
    b: Option<(u64, u64)>,
}

impl KsIntervals {
    #[inline]
    fn contains(&self, ks: u64) -> bool {
        if let Some((lo, hi)) = self.a {
            if (lo..=hi).contains(&ks) {
                return true;
            }
        }
        if let Some((lo, hi)) = self.b {
            if (lo..=hi).contains(&ks) {
                return true;
            }
        }
        false
    }

    /// Number of assignments covered, weighting k_s by C(s_ex, k_s) via
    /// prefix sums of the binomial row.
    fn weighted(&self, prefix: &[u64]) -> u64 {
        let span = |iv: Option<(u64, u64)>| {
            iv.map_or(0, |(lo, hi)| prefix[hi as usize + 1] - prefix[lo as usize])
        };
        span(self.a) + span(self.b)
    }
}

/// Qualification table: one interval row per k_c.
#[derive(Debug, Clone)]
struct QualRows {
    rows: Vec<KsIntervals>,
}

impl QualRows {
    #[inline]
    fn contains(&self, k_c: u64, k_s: u64) -> bool {
        self.rows[k_c as usize].contains(k_s)
    }
}

/// k_s range on which both systems' metrics are defined for this row, or
/// `None` when no cell of the row is defined.
fn defined_range(plan: &RandomizationPlan, metric: MetricKind, k_c: u64) -> Option<(u64, u64)> {
    let s_ex = plan.s_ex();
    match metric {
        MetricKind::Recall | MetricKind::FScore => Some((0, s_ex)),
        MetricKind::Precision => {
            let no_shared = plan.shared_correct == 0 && plan.shared_spurious == 0;
            let mut lo = 0u64;
            let mut hi = s_ex;
            if no_shared && k_c == 0 {
                // system 1 would have zero responses at k_s = 0
                if s_ex == 0 {
                    return None;
                }
                lo = 1;
            }
            if no_shared && k_c == plan.c_ex() {
                // system 2 would have zero responses at k_s = s_ex
                if hi == 0 {
                    return None;
                }
                hi = s_ex - 1;
            }
            if lo <= hi {
                Some((lo, hi))
            } else {
                None
            }
        }
    }
}

fn last_true(lo: u64, hi: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if !pred(lo) {
        return None;
    }
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = a + (b - a + 1) / 2;
        if pred(mid) {
            a = mid;
        } else {
            b = mid - 1;
        }
    }
    Some(a)
}

fn first_true(lo: u64, hi: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if !pred(hi) {
        return None;
    }
    let (mut a, mut b) = (lo, hi);
    while a < b {
        let mid = a + (b - a) / 2;
        if pred(mid) {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    Some(b)
}

/// Builds the qualification table for `metric` against `observed` under
/// the plan's sidedness (or an explicit one for the verification re-use).
fn build_rows(
    plan: &RandomizationPlan,
    metric: MetricKind,
    observed: &BigRational,
    sidedness: Sidedness,
) -> QualRows {
    let c_ex = plan.c_ex();
    let diff = |k_c: u64, k_s: u64| {
        trial_diff(plan, metric, k_c, k_s).expect("cell inside the defined range")
    };
    let rows = (0..=c_ex)
        .map(|k_c| {
            let Some((dlo, dhi)) = defined_range(plan, metric, k_c) else {
                return KsIntervals::default();
            };
            match sidedness {
                Sidedness::One => {
                    let t = last_true(dlo, dhi, |ks| diff(k_c, ks) >= *observed);
                    KsIntervals {
                        a: t.map(|t| (dlo, t)),
                        b: None,
                    }
                }
                Sidedness::Two => {
                    if observed.is_zero() {
                        // |diff| >= 0 holds everywhere in the domain.
                        return KsIntervals {
                            a: Some((dlo, dhi)),
                            b: None,
                        };
                    }
                    let abs = observed.abs();
                    let neg = -abs.clone();
                    let hi_side = last_true(dlo, dhi, |ks| diff(k_c, ks) >= abs);
                    let lo_side = first_true(dlo, dhi, |ks| diff(k_c, ks) <= neg);
                    KsIntervals {
                        a: hi_side.map(|t| (dlo, t)),
                        b: lo_side.map(|t| (t, dhi)),
                    }
                }
            }
        })
        .collect();
    QualRows { rows }
}

fn binom_row(n: u64) -> Vec<u64> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c: u128 = 1;
    for k in 0..=n {
        row.push(u64::try_from(c).expect("binomial coefficient fits u64 for n <= 63"));
        if k < n {
            c = c * (n - k) as u128 / (k + 1) as u128;
        }
    }
    row
}

fn prefix_sums(row: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(row.len() + 1);
    let mut acc = 0u64;
    out.push(0);
    for &v in row {
        acc += v;
        out.push(acc);
    }
    out
}

/// Exact qualifying-assignment counts for each table: assignments with a
/// given (k_c, k_s) number C(c_ex, k_c) * C(s_ex, k_s).
fn exact_counts(plan: &RandomizationPlan, tables: &[QualRows]) -> Vec<u64> {
    let crow = binom_row(plan.c_ex());
    let sprefix = prefix_sums(&binom_row(plan.s_ex()));
    tables
        .iter()
        .map(|t| {
            (0..=plan.c_ex())
                .map(|k_c| crow[k_c as usize] * t.rows[k_c as usize].weighted(&sprefix))
                .sum()
        })
        .collect()
}

#[derive(Clone, Copy)]
struct BitLayout {
    wc: u32,
    ws: u32,
    c_mask: u64,
    s_mask: u64,
}

impl BitLayout {
    fn new(c_ex: u64, s_ex: u64) -> Self {
        let words = |bits: u64| ((bits + 63) / 64) as u32;
        let mask = |bits: u64| {
            if bits % 64 == 0 {
                u64::MAX
            } else {
                (1u64 << (bits % 64)) - 1
            }
        };
        Self {
            wc: words(c_ex),
            ws: words(s_ex),
            c_mask: mask(c_ex),
            s_mask: mask(s_ex),
        }
    }

    fn words_per_trial(&self) -> u64 {
        (self.wc + self.ws) as u64
    }

    /// One fair independent bit per unit; a trial consumes exactly
    /// `words_per_trial` 64-bit words of the stream.
    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> (u64, u64) {
        let mut k_c = 0u32;
        for j in 0..self.wc {
            let mut w = rng.next_u64();
            if j == self.wc - 1 {
                w &= self.c_mask;
            }
            k_c += w.count_ones();
        }
        let mut k_s = 0u32;
        for j in 0..self.ws {
            let mut w = rng.next_u64();
            if j == self.ws - 1 {
                w &= self.s_mask;
            }
            k_s += w.count_ones();
        }
        (k_c as u64, k_s as u64)
    }
}

fn split_ranges(trials: u64, workers: usize) -> Vec<(u64, u64)> {
    let workers = workers.max(1) as u64;
    let base = trials / workers;
    let rem = trials % workers;
    let mut out = Vec::new();
    let mut start = 0;
    for i in 0..workers {
        let len = base + if i < rem { 1 } else { 0 };
        if len > 0 {
            out.push((start, start + len));
        }
        start += len;
    }
    out
}

/// Counts qualifying trials for every table over the same sampled
/// assignments. The ChaCha stream is addressed by absolute trial index, so
/// the totals do not depend on how the range is split across workers.
fn approx_counts(
    seed: u64,
    trials: u64,
    layout: BitLayout,
    tables: &[QualRows],
    workers: usize,
) -> Vec<u64> {
    let ranges = split_ranges(trials, workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(start, end)| {
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_word_pos(start as u128 * layout.words_per_trial() as u128 * 2);
                    let mut counts = vec![0u64; tables.len()];
                    for _ in start..end {
                        let (k_c, k_s) = layout.draw(&mut rng);
                        for (c, t) in counts.iter_mut().zip(tables) {
                            if t.contains(k_c, k_s) {
                                *c += 1;
                            }
                        }
                    }
                    counts
                })
            })
            .collect();
        let mut totals = vec![0u64; tables.len()];
        for h in handles {
            for (t, v) in totals.iter_mut().zip(h.join().expect("worker panicked")) {
                *t += v;
            }
        }
        totals
    })
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

fn result_from_counts(plan: &RandomizationPlan, nc: u64, nt: u64) -> RandomizationResult {
    let p = match plan.mode {
        Mode::Exact => PValue::exact(nc as f64 / nt as f64),
        Mode::Approximate => PValue::bound((nc + 1) as f64 / (nt + 1) as f64),
    };
    RandomizationResult {
        metric: plan.metric,
        sidedness: plan.sidedness,
        mode: plan.mode,
        nc,
        nt,
        p,
        seed: plan.master_seed,
        degenerate: plan.units.is_empty(),
    }
}

/// Runs the randomization test with a default worker count.
pub fn randomization_test(plan: &RandomizationPlan) -> Result<RandomizationResult> {
    randomization_test_with_workers(plan, default_workers())
}

/// Runs the randomization test on a fixed number of workers. The counts
/// (and hence p) are identical for any worker count.
pub fn randomization_test_with_workers(
    plan: &RandomizationPlan,
    workers: usize,
) -> Result<RandomizationResult> {
    let table = build_rows(plan, plan.metric, &plan.observed, plan.sidedness);
    match plan.mode {
        Mode::Exact => {
            let nc = exact_counts(plan, std::slice::from_ref(&table))[0];
            let nt = 1u64 << plan.unit_count();
            Ok(result_from_counts(plan, nc, nt))
        }
        Mode::Approximate => {
            let layout = BitLayout::new(plan.c_ex(), plan.s_ex());
            let nc = approx_counts(
                plan.master_seed,
                plan.trials,
                layout,
                std::slice::from_ref(&table),
                workers,
            )[0];
            Ok(result_from_counts(plan, nc, plan.trials))
        }
    }
}

/// Seed for the verification re-run: injective in the master seed and
/// never equal to it.
pub fn derived_verification_seed(master_seed: u64) -> u64 {
    master_seed ^ 0x9E37_79B9_7F4A_7C15
}

/// Cross-checks of one approximate run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationChecks {
    pub primary: RandomizationResult,
    pub rerun: RandomizationResult,
    pub rerun_seed: u64,
    /// |p_primary - p_rerun|.
    pub p_abs_difference: f64,
    /// One-sided recall result over the primary run's shuffles, when the
    /// recall denominator is known.
    pub recall_primary: Option<RandomizationResult>,
    pub recall_rerun: Option<RandomizationResult>,
    /// Exact one-sided sign-test p over the discriminating items.
    pub sign_p: Option<f64>,
    /// Whether both recall estimates fall within three Monte Carlo
    /// standard errors of the sign-test p.
    pub sign_within_3se: Option<bool>,
}

/// Report of [`verify`]: either the Monte Carlo cross-checks, or a note
/// that the run was exact and needs none.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VerificationReport {
    /// Exact enumeration; verification unnecessary.
    ExactModeUnnecessary,
    Checked(Box<VerificationChecks>),
}

/// Re-runs an approximate randomization under a derived second seed and
/// compares the recall significance over the same shuffles against the
/// analytic sign test.
pub fn verify(plan: &RandomizationPlan) -> Result<VerificationReport> {
    verify_with_workers(plan, default_workers())
}

pub fn verify_with_workers(plan: &RandomizationPlan, workers: usize) -> Result<VerificationReport> {
    if plan.mode == Mode::Exact {
        return Ok(VerificationReport::ExactModeUnnecessary);
    }
    let layout = BitLayout::new(plan.c_ex(), plan.s_ex());
    let metric_table = build_rows(plan, plan.metric, &plan.observed, plan.sidedness);

    // Recall cross-check over one-sided tails, when computable.
    let recall_observed = plan.total_of_interest.map(|t| {
        BigRational::new(
            BigInt::from(plan.c_only1 as i128 - plan.c_only2 as i128),
            BigInt::from(t),
        )
    });
    let recall_table = recall_observed
        .as_ref()
        .map(|obs| build_rows(plan, MetricKind::Recall, obs, Sidedness::One));

    let mut tables = vec![metric_table];
    if let Some(t) = recall_table {
        tables.push(t);
    }

    let rerun_seed = derived_verification_seed(plan.master_seed);
    let counts1 = approx_counts(plan.master_seed, plan.trials, layout, &tables, workers);
    let counts2 = approx_counts(rerun_seed, plan.trials, layout, &tables, workers);

    let primary = result_from_counts(plan, counts1[0], plan.trials);
    let mut rerun = result_from_counts(plan, counts2[0], plan.trials);
    rerun.seed = rerun_seed;

    let recall_result = |nc: u64, seed: u64| RandomizationResult {
        metric: MetricKind::Recall,
        sidedness: Sidedness::One,
        mode: Mode::Approximate,
        nc,
        nt: plan.trials,
        p: PValue::bound((nc + 1) as f64 / (plan.trials + 1) as f64),
        seed,
        degenerate: plan.units.is_empty(),
    };
    let (recall_primary, recall_rerun) = if tables.len() == 2 {
        (
            Some(recall_result(counts1[1], plan.master_seed)),
            Some(recall_result(counts2[1], rerun_seed)),
        )
    } else {
        (None, None)
    };

    let sign_p = if plan.c_only1 + plan.c_only2 > 0 && recall_primary.is_some() {
        Some(
            sign_test(plan.c_only1, plan.c_only2, Sidedness::One)?
                .p
                .value,
        )
    } else {
        None
    };
    let sign_within_3se = sign_p.map(|sp| {
        [&recall_primary, &recall_rerun]
            .into_iter()
            .flatten()
            .all(|r| {
                let p_hat = r.nc as f64 / r.nt as f64;
                // conservative SE from the (nc+1)/(nt+1) bound, never zero
                let p_tilde = (r.nc + 1) as f64 / (r.nt + 1) as f64;
                let se = (p_tilde * (1.0 - p_tilde) / r.nt as f64).sqrt();
                (p_hat - sp).abs() <= 3.0 * se
            })
    });

    let p_abs_difference = (primary.p.value - rerun.p.value).abs();
    Ok(VerificationReport::Checked(Box::new(VerificationChecks {
        primary,
        rerun,
        rerun_seed,
        p_abs_difference,
        recall_primary,
        recall_rerun,
        sign_p,
        sign_within_3se,
    })))
}
