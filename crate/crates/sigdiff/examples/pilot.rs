// Scratch pilot: randomization windows and power gaps at full scale.

use std::time::Instant;

use sigdiff::analytic::{Method, Sidedness};
use sigdiff::data::ResponseCounts;
use sigdiff::metrics::MetricKind;
use sigdiff::randomization::{build_plan, randomization_test, verify, VerificationReport};
use sigdiff::simulation::{power_study, SimSpec};

fn main() {
    let counts = ResponseCounts {
        c_both: 19,
        c_only1: 28,
        c_only2: 6,
        miss_both: Some(50),
        s_both: 5,
        s_only1: 43,
        s_only2: 9,
    };
    let trials = 1u64 << 20;
    for seed in [0u64, 1, 42] {
        let t0 = Instant::now();
        let recall = randomization_test(
            &build_plan(&counts, MetricKind::Recall, Sidedness::One, trials, seed).unwrap(),
        )
        .unwrap();
        let f = randomization_test(
            &build_plan(&counts, MetricKind::FScore, Sidedness::One, trials, seed).unwrap(),
        )
        .unwrap();
        let prec = randomization_test(
            &build_plan(
                &counts.swap_systems(),
                MetricKind::Precision,
                Sidedness::One,
                trials,
                seed,
            )
            .unwrap(),
        )
        .unwrap();
        let prec2 = randomization_test(
            &build_plan(&counts, MetricKind::Precision, Sidedness::Two, trials, seed).unwrap(),
        )
        .unwrap();
        println!(
            "seed {seed}: recall nc={} p={:.4e} | f nc={} p={:.5} | prec(II) nc={} p={:.5} | prec two-sided nc={} p={:.5} | {:?}",
            recall.nc, recall.p.value, f.nc, f.p.value, prec.nc, prec.p.value, prec2.nc, prec2.p.value,
            t0.elapsed()
        );
    }

    let t0 = Instant::now();
    let plan = build_plan(&counts, MetricKind::FScore, Sidedness::One, trials, 0).unwrap();
    if let VerificationReport::Checked(c) = verify(&plan).unwrap() {
        println!(
            "verify: p1={:.5} p2={:.5} |d|={:.2e} recall1={:?} recall2={:?} sign={:?} ok={:?} | {:?}",
            c.primary.p.value,
            c.rerun.p.value,
            c.p_abs_difference,
            c.recall_primary.map(|r| r.p.value),
            c.recall_rerun.map(|r| r.p.value),
            c.sign_p,
            c.sign_within_3se,
            t0.elapsed()
        );
    }

    for rho in [0.5f64, 0.0] {
        let t0 = Instant::now();
        let spec = SimSpec {
            n_items: 200,
            p1: 0.6,
            p2: 0.5,
            rho,
            replicates: 10_000,
            alpha: 0.05,
            seed: 0,
            rand_trials: 2048,
        };
        let rows = power_study(&spec, &[Method::Sign, Method::TwoProportionZ]).unwrap();
        println!(
            "power rho={rho}: sign={:.4} z={:.4} gap={:.4} | {:?}",
            rows[0].rejection_rate,
            rows[1].rejection_rate,
            rows[0].rejection_rate - rows[1].rejection_rate,
            t0.elapsed()
        );
    }

    // Level validity pilot at the null.
    for rho in [0.0f64, 0.5] {
        let t0 = Instant::now();
        let spec = SimSpec {
            n_items: 200,
            p1: 0.5,
            p2: 0.5,
            rho,
            replicates: 10_000,
            alpha: 0.05,
            seed: 0,
            rand_trials: 2048,
        };
        let methods = [
            Method::Sign,
            Method::MatchedPairT,
            Method::Wilcoxon,
            Method::TwoProportionZ,
            Method::TwoSampleT,
            Method::Chi2TwoByTwo,
            Method::Randomization,
        ];
        let rows = power_study(&spec, &methods).unwrap();
        let rates: Vec<String> = rows
            .iter()
            .map(|r| format!("{}={:.4}", r.method, r.rejection_rate))
            .collect();
        println!("null rho={rho}: {} | {:?}", rates.join(" "), t0.elapsed());
    }
}
