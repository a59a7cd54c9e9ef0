//! `sigdiff` — significance tests for recall/precision/F-score differences
//! between two systems on a shared test set.
//!
//! Exit codes: 0 success, 2 input error, 3 invalid method/metric
//! combination, 4 degenerate statistic.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sigdiff::analytic::{
    chi2_2x2, matched_pair_t_outcomes, sign_test, two_proportion_z, two_sample_t, wilcoxon_test,
    Method, Sidedness, TestResult,
};
use sigdiff::data::{counts_from_json, parse_detail_file, summarize, ResponseCounts, System};
use sigdiff::error::Error;
use sigdiff::metrics::{
    metric_difference, metrics_for, render_fraction, render_percent, MetricKind, MetricTriple,
};
use sigdiff::numerics::PValueKind;
use sigdiff::randomization::{
    build_plan_with_threshold, randomization_test_with_workers, verify_with_workers, Mode,
    RandomizationResult, VerificationReport, DEFAULT_TRIALS,
};
use sigdiff::simulation::{power_study, PowerRow, SimSpec};

#[derive(Parser)]
#[command(
    name = "sigdiff",
    version,
    about = "Statistical significance of recall/precision/F-score differences between two systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show both systems' recall, precision, and F-score.
    Metrics(MetricsArgs),
    /// Run a significance test of the difference between the systems.
    Test(TestArgs),
    /// Simulate correlated comparisons and tabulate rejection rates.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Detail file: item_id<TAB>of_interest<TAB>found_by_1<TAB>found_by_2
    #[arg(long, value_name = "FILE")]
    items: Option<PathBuf>,

    /// Counts as inline JSON (starts with '{') or a path to a JSON file
    #[arg(long, value_name = "JSON|FILE")]
    counts: Option<String>,

    /// Items of interest found by both systems
    #[arg(long, value_name = "N")]
    c_both: Option<u64>,
    /// Items of interest found by system 1 only
    #[arg(long, value_name = "N")]
    c_only1: Option<u64>,
    /// Items of interest found by system 2 only
    #[arg(long, value_name = "N")]
    c_only2: Option<u64>,
    /// Items of interest found by neither system
    #[arg(long, value_name = "N")]
    miss_both: Option<u64>,
    /// Spurious responses produced by both systems
    #[arg(long, value_name = "N")]
    s_both: Option<u64>,
    /// Spurious responses produced by system 1 only
    #[arg(long, value_name = "N")]
    s_only1: Option<u64>,
    /// Spurious responses produced by system 2 only
    #[arg(long, value_name = "N")]
    s_only2: Option<u64>,
    /// Total items of interest (alternative to --miss-both)
    #[arg(long, value_name = "N")]
    total: Option<u64>,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    #[value(name = "two_sample_t", alias = "two-sample-t")]
    TwoSampleT,
    #[value(name = "two_proportion_z", alias = "two-proportion-z", alias = "z")]
    TwoProportionZ,
    #[value(name = "chi2", alias = "chi2_2x2")]
    Chi2,
    #[value(name = "matched_t", alias = "matched_pair_t", alias = "matched-t")]
    MatchedT,
    #[value(name = "sign")]
    Sign,
    #[value(name = "wilcoxon")]
    Wilcoxon,
    #[value(name = "rand", alias = "randomization")]
    Rand,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    #[value(name = "recall")]
    Recall,
    #[value(name = "precision")]
    Precision,
    #[value(name = "f_score", alias = "f-score", alias = "f1")]
    FScore,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Recall => MetricKind::Recall,
            MetricArg::Precision => MetricKind::Precision,
            MetricArg::FScore => MetricKind::FScore,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SidedArg {
    One,
    Two,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    /// Test whether system 1 beats system 2
    #[value(name = "1")]
    One,
    /// Test whether system 2 beats system 1
    #[value(name = "2")]
    Two,
    /// Randomization only: test the direction of the observed difference
    Auto,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Test method
    #[arg(long, value_enum)]
    method: MethodArg,

    /// Metric under test (defaults: precision for chi2, recall otherwise)
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,

    /// One- or two-sided p-value (defaults: two for chi2, one otherwise)
    #[arg(long, value_enum)]
    sided: Option<SidedArg>,

    /// Trials for approximate randomization
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,

    /// Master seed for randomization
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Unit count at or below which randomization enumerates exactly (max 30)
    #[arg(long, default_value_t = 20)]
    exact_threshold: u32,

    /// Worker threads for randomization trials (counts are identical for
    /// any value)
    #[arg(long, default_value_t = 0, value_name = "N", help = "Worker threads (0 = auto)")]
    workers: usize,

    /// Tested direction for one-sided tests
    #[arg(long, value_enum, default_value = "auto")]
    direction: DirectionArg,

    /// Re-run randomization under a second seed and cross-check recall
    /// against the sign test
    #[arg(long)]
    verify: bool,

    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Items of interest per replicate
    #[arg(long, default_value_t = 200)]
    n_items: usize,
    /// Success probability of system 1
    #[arg(long)]
    p1: f64,
    /// Success probability of system 2
    #[arg(long)]
    p2: f64,
    /// Correlation between the systems' outcomes
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
    /// Rejection level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated methods to tabulate
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "sign,matched_t,wilcoxon,two_proportion_z,two_sample_t,chi2"
    )]
    methods: Vec<MethodArg>,
    /// Trials per replicate for the randomization method
    #[arg(long, default_value_t = 2048)]
    rand_trials: u64,
    /// Emit the table as JSON instead of CSV
    #[arg(long)]
    json: bool,
}

// ---------------------------------------------------------------------------
// report structures
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CountsDto {
    c_both: u64,
    c_only1: u64,
    c_only2: u64,
    miss_both: Option<u64>,
    s_both: u64,
    s_only1: u64,
    s_only2: u64,
    total_of_interest: Option<u64>,
}

impl From<&ResponseCounts> for CountsDto {
    fn from(c: &ResponseCounts) -> Self {
        Self {
            c_both: c.c_both,
            c_only1: c.c_only1,
            c_only2: c.c_only2,
            miss_both: c.miss_both,
            s_both: c.s_both,
            s_only1: c.s_only1,
            s_only2: c.s_only2,
            total_of_interest: c.total_of_interest(),
        }
    }
}

#[derive(Serialize)]
struct MetricValueDto {
    fraction: String,
    percent: String,
    value: f64,
}

fn metric_value_dto(v: Option<&sigdiff::num::BigRational>) -> Option<MetricValueDto> {
    use sigdiff::num::ToPrimitive;
    v.map(|r| MetricValueDto {
        fraction: render_fraction(r),
        percent: render_percent(r, 1),
        value: r.to_f64().unwrap_or(f64::NAN),
    })
}

#[derive(Serialize)]
struct SystemMetricsDto {
    system: u8,
    recall: Option<MetricValueDto>,
    precision: Option<MetricValueDto>,
    f_score: Option<MetricValueDto>,
}

fn system_metrics_dto(system: u8, m: &MetricTriple) -> SystemMetricsDto {
    SystemMetricsDto {
        system,
        recall: metric_value_dto(Some(&m.recall)),
        precision: metric_value_dto(m.precision.as_ref()),
        f_score: metric_value_dto(m.f_score.as_ref()),
    }
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Entry {
    Analytic(TestResult),
    Randomization(RandomizationResult),
    Verification(VerificationReport),
}

#[derive(Serialize)]
struct Report {
    version: &'static str,
    invocation: Vec<String>,
    counts: CountsDto,
    metrics: Vec<SystemMetricsDto>,
    /// Signed difference convention of the results: "1-2" means every
    /// statistic and observed difference is system 1 minus system 2.
    direction: &'static str,
    results: Vec<Entry>,
    warnings: Vec<String>,
}

// ---------------------------------------------------------------------------

const INDEPENDENCE_WARNING: &str = "assumes independence between the compared systems' \
results; positively correlated results make it understate significance";

fn resolve_counts(input: &InputArgs) -> Result<ResponseCounts, Error> {
    let inline = [
        input.c_both,
        input.c_only1,
        input.c_only2,
        input.s_both,
        input.s_only1,
        input.s_only2,
    ];
    let any_inline =
        inline.iter().any(Option::is_some) || input.miss_both.is_some() || input.total.is_some();
    let modes = [input.items.is_some(), input.counts.is_some(), any_inline];
    match modes.iter().filter(|&&m| m).count() {
        0 => {
            return Err(Error::InvalidArgument(
                "no input: give --items, --counts, or the inline count flags".into(),
            ))
        }
        1 => {}
        _ => {
            return Err(Error::InvalidArgument(
                "give exactly one of --items, --counts, or the inline count flags".into(),
            ))
        }
    }
    if let Some(path) = &input.items {
        let records = parse_detail_file(path)?;
        return Ok(summarize(&records));
    }
    if let Some(arg) = &input.counts {
        let text = if arg.trim_start().starts_with('{') {
            arg.clone()
        } else {
            std::fs::read_to_string(arg)?
        };
        return counts_from_json(&text);
    }
    let need = |v: Option<u64>, name: &'static str| v.ok_or(Error::MissingCount(name));
    let c_both = need(input.c_both, "c_both")?;
    let c_only1 = need(input.c_only1, "c_only1")?;
    let c_only2 = need(input.c_only2, "c_only2")?;
    let s_both = need(input.s_both, "s_both")?;
    let s_only1 = need(input.s_only1, "s_only1")?;
    let s_only2 = need(input.s_only2, "s_only2")?;
    let miss_both = match (input.miss_both, input.total) {
        (Some(m), Some(t)) => {
            if c_both + c_only1 + c_only2 + m != t {
                return Err(Error::InconsistentCounts(format!(
                    "--miss-both {m} conflicts with --total {t}"
                )));
            }
            Some(m)
        }
        (Some(m), None) => Some(m),
        (None, Some(t)) => {
            let found = c_both + c_only1 + c_only2;
            if t < found {
                return Err(Error::InconsistentCounts(format!(
                    "--total {t} is smaller than the {found} recalled items"
                )));
            }
            Some(t - found)
        }
        (None, None) => None,
    };
    Ok(ResponseCounts {
        c_both,
        c_only1,
        c_only2,
        miss_both,
        s_both,
        s_only1,
        s_only2,
    })
}

fn both_metrics(counts: &ResponseCounts) -> Vec<SystemMetricsDto> {
    match (
        metrics_for(counts, System::One),
        metrics_for(counts, System::Two),
    ) {
        (Ok(m1), Ok(m2)) => vec![system_metrics_dto(1, &m1), system_metrics_dto(2, &m2)],
        _ => Vec::new(),
    }
}

fn base_report(counts: &ResponseCounts, direction: &'static str) -> Report {
    Report {
        version: env!("CARGO_PKG_VERSION"),
        invocation: std::env::args().collect(),
        counts: CountsDto::from(counts),
        metrics: both_metrics(counts),
        direction,
        results: Vec::new(),
        warnings: Vec::new(),
    }
}

fn print_report(report: &Report, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("serializable report"));
        return;
    }
    let c = &report.counts;
    print!(
        "counts: c_both={} c_only1={} c_only2={}",
        c.c_both, c.c_only1, c.c_only2
    );
    match c.miss_both {
        Some(m) => print!(" miss_both={m}"),
        None => print!(" miss_both=?"),
    }
    print!(
        " s_both={} s_only1={} s_only2={}",
        c.s_both, c.s_only1, c.s_only2
    );
    match c.total_of_interest {
        Some(t) => println!(" total_of_interest={t}"),
        None => println!(" total_of_interest=?"),
    }
    if !report.metrics.is_empty() {
        println!("metric      system 1              system 2");
        let cell = |v: &Option<MetricValueDto>| match v {
            Some(m) => format!("{} ({}%)", m.fraction, m.percent),
            None => "undef".to_string(),
        };
        let row = |name: &str, f: &dyn Fn(&SystemMetricsDto) -> String| {
            println!(
                "{:<11} {:<21} {}",
                name,
                f(&report.metrics[0]),
                f(&report.metrics[1])
            );
        };
        row("recall", &|m| cell(&m.recall));
        row("precision", &|m| cell(&m.precision));
        row("f_score", &|m| cell(&m.f_score));
    }
    for entry in &report.results {
        println!();
        match entry {
            Entry::Analytic(t) => {
                println!(
                    "method: {}  sidedness: {}  direction: {}",
                    t.method, t.sidedness, report.direction
                );
                println!("statistic: {:.6}", t.statistic);
                println!("p-value: {} ({})", fmt_p(t.p.value), kind_name(t.p.kind));
                println!("df_or_n: {}", t.df_or_n);
                if t.assumes_independence {
                    println!("assumes_independence: true");
                }
            }
            Entry::Randomization(r) => {
                println!(
                    "method: randomization  metric: {}  sidedness: {}  direction: {}",
                    r.metric, r.sidedness, report.direction
                );
                println!(
                    "mode: {}  trials: {}  seed: {}",
                    match r.mode {
                        Mode::Exact => "exact",
                        Mode::Approximate => "approximate",
                    },
                    r.nt,
                    r.seed
                );
                println!("nc: {}  nt: {}", r.nc, r.nt);
                let how = match r.mode {
                    Mode::Exact => "exact nc/nt",
                    Mode::Approximate => "bound (nc+1)/(nt+1)",
                };
                println!("p-value: {} ({how})", fmt_p(r.p.value));
                if r.degenerate {
                    println!("degenerate: no shuffleable units, p = 1 by construction");
                }
            }
            Entry::Verification(v) => match v {
                VerificationReport::ExactModeUnnecessary => {
                    println!("verification: unnecessary, exact enumeration");
                }
                VerificationReport::Checked(ch) => {
                    println!("verification:");
                    println!(
                        "  rerun seed {}: p {} vs {}  |difference| {:.3e}",
                        ch.rerun_seed,
                        fmt_p(ch.primary.p.value),
                        fmt_p(ch.rerun.p.value),
                        ch.p_abs_difference
                    );
                    if let (Some(r1), Some(r2)) = (&ch.recall_primary, &ch.recall_rerun) {
                        println!(
                            "  recall over the same shuffles: {} and {}",
                            fmt_p(r1.p.value),
                            fmt_p(r2.p.value)
                        );
                    }
                    if let Some(sp) = ch.sign_p {
                        println!(
                            "  sign test (exact): {}  within 3 standard errors: {}",
                            fmt_p(sp),
                            match ch.sign_within_3se {
                                Some(true) => "yes",
                                Some(false) => "NO",
                                None => "n/a",
                            }
                        );
                    }
                }
            },
        }
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
}

fn fmt_p(p: f64) -> String {
    if p >= 1e-3 {
        format!("{p:.6}")
    } else {
        format!("{p:.6e}")
    }
}

fn kind_name(kind: PValueKind) -> &'static str {
    match kind {
        PValueKind::Exact => "exact",
        PValueKind::Bound => "upper bound",
        PValueKind::Approximation => "approximation",
    }
}

fn cmd_metrics(args: &MetricsArgs) -> Result<(), Error> {
    let counts = resolve_counts(&args.input)?;
    // Rendering the table needs the recall denominator.
    counts.require_total()?;
    let report = base_report(&counts, "1-2");
    print_report(&report, args.json);
    Ok(())
}

/// Proportion reading of each metric for the binomial-style tests:
/// (numerator, denominator) per system.
fn proportion_counts(
    counts: &ResponseCounts,
    metric: MetricKind,
    system: System,
) -> Result<(u64, u64), Error> {
    let r = counts.recalled(system);
    let s = counts.spurious(system);
    match metric {
        MetricKind::Recall => Ok((r, counts.require_total()?)),
        MetricKind::Precision => {
            if r + s == 0 {
                Err(Error::UndefinedMetric(
                    "precision: no responses produced".into(),
                ))
            } else {
                Ok((r, r + s))
            }
        }
        MetricKind::FScore => Ok((2 * r, counts.require_total()? + r + s)),
    }
}

fn binary_sample(ones: u64, total: u64) -> Vec<f64> {
    let mut v = vec![1.0; ones as usize];
    v.extend(std::iter::repeat(0.0).take((total - ones) as usize));
    v
}

fn cmd_test(args: &TestArgs) -> Result<(), Error> {
    let mut counts = resolve_counts(&args.input)?;
    let metric: MetricKind = args
        .metric
        .map(Into::into)
        .unwrap_or(if args.method == MethodArg::Chi2 {
            MetricKind::Precision
        } else {
            MetricKind::Recall
        });
    let sided = match (args.sided, args.method) {
        (Some(SidedArg::One), MethodArg::Chi2) => {
            return Err(Error::InvalidCombination(
                "the 2x2 chi-squared test is inherently two-sided".into(),
            ))
        }
        (None, MethodArg::Chi2) => Sidedness::Two,
        (Some(SidedArg::Two), _) => Sidedness::Two,
        (Some(SidedArg::One), _) | (None, _) => Sidedness::One,
    };
    if args.verify && args.method != MethodArg::Rand {
        return Err(Error::InvalidCombination(
            "--verify applies only to --method rand".into(),
        ));
    }

    // Direction: express "system 2 better" by relabeling the systems, so
    // every reported statistic stays on the (first − second) scale of the
    // relabeled pair.
    let mut direction: &'static str = "1-2";
    match args.direction {
        DirectionArg::One | DirectionArg::Auto => {}
        DirectionArg::Two => {
            counts = counts.swap_systems();
            direction = "2-1";
        }
    }
    if args.direction == DirectionArg::Auto
        && args.method == MethodArg::Rand
        && sided == Sidedness::One
    {
        // Test the direction of the observed difference, the way each
        // one-sided question is framed.
        use sigdiff::num::Signed;
        let m1 = metrics_for(&counts, System::One);
        let m2 = metrics_for(&counts, System::Two);
        if let (Ok(m1), Ok(m2)) = (m1, m2) {
            if let Ok(d) = metric_difference(&m1, &m2, metric) {
                if d.is_negative() {
                    counts = counts.swap_systems();
                    direction = "2-1";
                }
            }
        }
    }

    let mut report = base_report(&counts, direction);

    let recall_only = |m: MetricKind, name: &str| -> Result<(), Error> {
        if m != MetricKind::Recall {
            return Err(Error::InvalidCombination(format!(
                "{name} is a matched-pair test over the items of interest and applies to \
                 recall only; use --method rand for {m}"
            )));
        }
        Ok(())
    };

    match args.method {
        MethodArg::Sign => {
            recall_only(metric, "sign")?;
            let r = sign_test(counts.c_only1, counts.c_only2, sided)?;
            report.results.push(Entry::Analytic(r));
        }
        MethodArg::MatchedT => {
            recall_only(metric, "matched_t")?;
            let pairs = counts.paired_outcomes()?;
            let r = matched_pair_t_outcomes(&pairs, sided)?;
            report.results.push(Entry::Analytic(r));
        }
        MethodArg::Wilcoxon => {
            recall_only(metric, "wilcoxon")?;
            // Zero differences are dropped by the test, so only the
            // discriminating items matter.
            let mut diffs = vec![1.0; counts.c_only1 as usize];
            diffs.extend(std::iter::repeat(-1.0).take(counts.c_only2 as usize));
            if diffs.is_empty() {
                return Err(Error::Degenerate(
                    "wilcoxon: the systems never disagree on an item of interest".into(),
                ));
            }
            let r = wilcoxon_test(&diffs, sided)?;
            report.results.push(Entry::Analytic(r));
        }
        MethodArg::TwoProportionZ => {
            let (r1, n1) = proportion_counts(&counts, metric, System::One)?;
            let (r2, n2) = proportion_counts(&counts, metric, System::Two)?;
            let r = two_proportion_z(r1, n1, r2, n2, sided)?;
            report.warnings.push(INDEPENDENCE_WARNING.into());
            report.results.push(Entry::Analytic(r));
        }
        MethodArg::TwoSampleT => {
            let (r1, n1) = proportion_counts(&counts, metric, System::One)?;
            let (r2, n2) = proportion_counts(&counts, metric, System::Two)?;
            let r = two_sample_t(&binary_sample(r1, n1), &binary_sample(r2, n2), sided)?;
            report.warnings.push(INDEPENDENCE_WARNING.into());
            report.results.push(Entry::Analytic(r));
        }
        MethodArg::Chi2 => {
            let (a, b, c, d) = match metric {
                MetricKind::Precision => (
                    counts.recalled(System::One),
                    counts.spurious(System::One),
                    counts.recalled(System::Two),
                    counts.spurious(System::Two),
                ),
                MetricKind::Recall => {
                    let t = counts.require_total()?;
                    let r1 = counts.recalled(System::One);
                    let r2 = counts.recalled(System::Two);
                    (r1, t - r1, r2, t - r2)
                }
                MetricKind::FScore => {
                    return Err(Error::InvalidCombination(
                        "chi2 has no 2x2 table form for f_score; use --method rand".into(),
                    ))
                }
            };
            let r = chi2_2x2(a, b, c, d)?;
            report.warnings.push(INDEPENDENCE_WARNING.into());
            report.results.push(Entry::Analytic(r));
        }
        MethodArg::Rand => {
            let plan = build_plan_with_threshold(
                &counts,
                metric,
                sided,
                args.trials,
                args.seed,
                args.exact_threshold,
            )?;
            let workers = if args.workers == 0 {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
                    .min(8)
            } else {
                args.workers
            };
            let r = randomization_test_with_workers(&plan, workers)?;
            report.results.push(Entry::Randomization(r));
            if args.verify {
                let v = verify_with_workers(&plan, workers)?;
                report.results.push(Entry::Verification(v));
            }
        }
    }
    print_report(&report, args.json);
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let spec = SimSpec {
        n_items: args.n_items,
        p1: args.p1,
        p2: args.p2,
        rho: args.rho,
        replicates: args.replicates,
        alpha: args.alpha,
        seed: args.seed,
        rand_trials: args.rand_trials,
    };
    let methods: Vec<Method> = args
        .methods
        .iter()
        .map(|m| match m {
            MethodArg::TwoSampleT => Method::TwoSampleT,
            MethodArg::TwoProportionZ => Method::TwoProportionZ,
            MethodArg::Chi2 => Method::Chi2TwoByTwo,
            MethodArg::MatchedT => Method::MatchedPairT,
            MethodArg::Sign => Method::Sign,
            MethodArg::Wilcoxon => Method::Wilcoxon,
            MethodArg::Rand => Method::Randomization,
        })
        .collect();
    let rows: Vec<PowerRow> = power_study(&spec, &methods)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("serializable rows"));
    } else {
        println!("method,rho,n,rejection_rate,std_error");
        for r in rows {
            println!(
                "{},{},{},{:.6},{:.6}",
                r.method, r.rho, r.n, r.rejection_rate, r.std_error
            );
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> i32 {
    if err.is_invalid_combination() {
        3
    } else if err.is_degenerate() {
        4
    } else {
        2
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Metrics(args) => cmd_metrics(args),
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
