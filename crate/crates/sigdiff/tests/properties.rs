//! Property-based invariants across the crate.

mod common;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use proptest::prelude::*;

use sigdiff::analytic::{sign_test, two_proportion_z, wilcoxon_test, Sidedness};
use sigdiff::correlation::{estimate_r12, phi_coefficient};
use sigdiff::data::{summarize, DetailRecord, PairedOutcomes, ResponseCounts, System};
use sigdiff::metrics::{metrics_for, MetricKind};
use sigdiff::randomization::{build_plan, randomization_test, run_trial};

fn arb_counts() -> impl Strategy<Value = ResponseCounts> {
    (0u64..40, 0u64..40, 0u64..40, 0u64..40, 0u64..20, 0u64..20, 0u64..20).prop_map(
        |(c_both, c_only1, c_only2, miss, s_both, s_only1, s_only2)| ResponseCounts {
            c_both,
            c_only1,
            c_only2,
            miss_both: Some(miss),
            s_both,
            s_only1,
            s_only2,
        },
    )
}

fn records_from_counts(c: &ResponseCounts) -> Vec<DetailRecord> {
    let mut out = Vec::new();
    let mut id = 0usize;
    let mut push = |count: u64, oi: bool, f1: bool, f2: bool, out: &mut Vec<DetailRecord>| {
        for _ in 0..count {
            id += 1;
            out.push(DetailRecord {
                item_id: format!("r{id}"),
                of_interest: oi,
                found_by_1: f1,
                found_by_2: f2,
            });
        }
    };
    push(c.c_both, true, true, true, &mut out);
    push(c.c_only1, true, true, false, &mut out);
    push(c.c_only2, true, false, true, &mut out);
    push(c.miss_both.unwrap_or(0), true, false, false, &mut out);
    push(c.s_both, false, true, true, &mut out);
    push(c.s_only1, false, true, false, &mut out);
    push(c.s_only2, false, false, true, &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Counts -> records -> summarize is the identity, independent of
    /// record order, and the recall complement identity holds.
    #[test]
    fn summarize_round_trips_counts(counts in arb_counts(), seed in any::<u64>()) {
        let mut records = records_from_counts(&counts);
        let n = records.len();
        if n > 1 {
            // cheap deterministic shuffle
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                records.swap(i, (s % (i as u64 + 1)) as usize);
            }
        }
        let back = summarize(&records);
        prop_assert_eq!(back, counts);
        let total = counts.total_of_interest().unwrap();
        prop_assert_eq!(
            counts.recalled(System::One) + counts.c_only2 + counts.miss_both.unwrap(),
            total
        );
    }

    /// Harmonic-mean bound: min(a, b) <= F <= max(a, b); F = a when a = b.
    #[test]
    fn f_score_is_bounded_by_recall_and_precision(counts in arb_counts()) {
        prop_assume!(counts.total_of_interest().unwrap() >= 1);
        for sys in [System::One, System::Two] {
            let m = match metrics_for(&counts, sys) {
                Ok(m) => m,
                Err(_) => continue,
            };
            if let (Some(b), Some(f)) = (m.precision.clone(), m.f_score.clone()) {
                let a = m.recall.clone();
                let lo = a.clone().min(b.clone());
                let hi = a.clone().max(b.clone());
                prop_assert!(lo <= f && f <= hi);
                if a == b {
                    prop_assert_eq!(f, a);
                }
            }
        }
    }

    /// For binary outcomes the sample correlation is the phi coefficient
    /// of the joint 2x2 counts, and is symmetric in the systems.
    #[test]
    fn r12_matches_phi_and_is_symmetric(
        both in 0u64..30, only1 in 0u64..30, only2 in 0u64..30, neither in 0u64..30
    ) {
        prop_assume!(both + only1 + only2 + neither >= 2);
        let pairs = match PairedOutcomes::from_counts(both, only1, only2, neither) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        match estimate_r12(&pairs) {
            Ok(rep) => {
                let phi = phi_coefficient(both, only1, only2, neither).unwrap();
                prop_assert!((rep.r12 - phi).abs() < 1e-10);
                let swapped = estimate_r12(&pairs.swap_systems()).unwrap();
                prop_assert!((rep.r12 - swapped.r12).abs() < 1e-12);
            }
            Err(_) => {
                // constant sequence: phi denominator must vanish too
                prop_assert!(phi_coefficient(both, only1, only2, neither).is_none());
            }
        }
    }

    /// On binary differences the Wilcoxon test collapses to the sign test
    /// exactly (uniform midranks), for both sidedness conventions.
    #[test]
    fn wilcoxon_equals_sign_on_binary_data(np in 0u64..12, nm in 0u64..12, zeros in 0usize..6) {
        prop_assume!(np + nm >= 1);
        let mut d = vec![1.0; np as usize];
        d.extend(std::iter::repeat(-1.0).take(nm as usize));
        d.extend(std::iter::repeat(0.0).take(zeros));
        for sided in [Sidedness::One, Sidedness::Two] {
            let w = wilcoxon_test(&d, sided).unwrap();
            let s = sign_test(np, nm, sided).unwrap();
            prop_assert_eq!(w.p.value, s.p.value);
        }
    }

    /// Swapping the systems negates the z statistic, complements the
    /// one-sided p, and preserves the two-sided p.
    #[test]
    fn two_proportion_z_label_swap(r1 in 0u64..50, r2 in 0u64..50, extra in 1u64..30) {
        let n = 50 + extra;
        prop_assume!(r1 + r2 > 0 && r1 + r2 < 2 * n);
        let a = two_proportion_z(r1, n, r2, n, Sidedness::One).unwrap();
        let b = two_proportion_z(r2, n, r1, n, Sidedness::One).unwrap();
        prop_assert!((a.statistic + b.statistic).abs() < 1e-12);
        prop_assert!((a.p.value + b.p.value - 1.0).abs() < 1e-9);
        let at = two_proportion_z(r1, n, r2, n, Sidedness::Two).unwrap();
        let bt = two_proportion_z(r2, n, r1, n, Sidedness::Two).unwrap();
        prop_assert!((at.p.value - bt.p.value).abs() < 1e-12);
    }
}

fn small_unit_counts() -> impl Strategy<Value = ResponseCounts> {
    (0u64..4, 0u64..5, 0u64..5, 0u64..5, 0u64..3, 0u64..5, 0u64..5)
        .prop_map(
            |(c_both, c_only1, c_only2, miss, s_both, s_only1, s_only2)| ResponseCounts {
                c_both,
                c_only1,
                c_only2,
                miss_both: Some(miss),
                s_both,
                s_only1,
                s_only2,
            },
        )
        .prop_filter("needs items of interest and few units", |c| {
            c.total_of_interest().unwrap() >= 1 && c.exclusive_units() <= 16
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Exact one-sided recall randomization is the fair-coin binomial tail
    /// over the discriminating items, exactly.
    #[test]
    fn exact_recall_randomization_is_binomial(counts in small_unit_counts()) {
        let plan = build_plan(&counts, MetricKind::Recall, Sidedness::One, 16, 0).unwrap();
        let res = randomization_test(&plan).unwrap();
        let c_ex = counts.c_only1 + counts.c_only2;
        let oracle = common::binomial_tail_oracle(counts.c_only1, c_ex, 1, 2);
        let got = BigRational::new(BigInt::from(res.nc), BigInt::from(res.nt));
        prop_assert_eq!(got, oracle);
    }

    /// The identity assignment reproduces the observed difference, and
    /// exact counts match the independent enumeration oracle.
    #[test]
    fn exact_counts_match_enumeration(
        counts in small_unit_counts(),
        metric_idx in 0usize..3,
        two_sided in any::<bool>(),
    ) {
        let metric = [MetricKind::Recall, MetricKind::Precision, MetricKind::FScore][metric_idx];
        let sided = if two_sided { Sidedness::Two } else { Sidedness::One };
        let plan = match build_plan(&counts, metric, sided, 16, 0) {
            Ok(p) => p,
            Err(_) => return Ok(()), // undefined observed metric
        };
        let identity = plan.original_assignment();
        prop_assert_eq!(&run_trial(&plan, &identity).unwrap(), plan.observed());

        let res = randomization_test(&plan).unwrap();
        let (nc, nt) = common::enumerate_randomization(&counts, metric, plan.observed(), two_sided);
        prop_assert_eq!((res.nc, res.nt), (nc, nt));
    }

    /// Counting a longer prefix of the same trial stream never removes
    /// qualifying trials.
    #[test]
    fn approximate_counts_grow_with_the_trial_prefix(seed in any::<u64>()) {
        let counts = common::example_counts();
        let short = build_plan(&counts, MetricKind::FScore, Sidedness::One, 2048, seed).unwrap();
        let long = build_plan(&counts, MetricKind::FScore, Sidedness::One, 4096, seed).unwrap();
        let nc_short = randomization_test(&short).unwrap().nc;
        let nc_long = randomization_test(&long).unwrap().nc;
        prop_assert!(nc_long >= nc_short);
    }

    /// Swapping system labels negates the observed difference and leaves
    /// two-sided counts unchanged.
    #[test]
    fn randomization_two_sided_swap_invariance(counts in small_unit_counts()) {
        let swapped = counts.swap_systems();
        for metric in [MetricKind::Recall, MetricKind::Precision, MetricKind::FScore] {
            let (a, b) = match (
                build_plan(&counts, metric, Sidedness::Two, 16, 0),
                build_plan(&swapped, metric, Sidedness::Two, 16, 0),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            prop_assert!((a.observed().clone() + b.observed().clone()).is_zero());
            let ra = randomization_test(&a).unwrap();
            let rb = randomization_test(&b).unwrap();
            prop_assert_eq!(ra.nc, rb.nc);
        }
    }

    /// Sign-test tails: one-sided p complements under label swap up to the
    /// point mass, and the statistic is antisymmetric.
    #[test]
    fn sign_test_swap_relations(np in 0u64..40, nm in 0u64..40) {
        prop_assume!(np + nm >= 1);
        let n = np + nm;
        let a = sign_test(np, nm, Sidedness::One).unwrap();
        let b = sign_test(nm, np, Sidedness::One).unwrap();
        prop_assert_eq!(a.statistic, -b.statistic);
        // P(X >= np) + P(X >= nm) = 1 + P(X = np) over Binomial(n, 1/2)
        let pmf = common::binomial_tail_oracle(np, n, 1, 2)
            - common::binomial_tail_oracle(np + 1, n, 1, 2);
        let expect = 1.0 + pmf.to_f64().unwrap();
        prop_assert!((a.p.value + b.p.value - expect).abs() < 1e-12);
    }
}
