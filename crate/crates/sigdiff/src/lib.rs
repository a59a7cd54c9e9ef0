//! Significance testing for recall, precision, and balanced F-score
//! differences between two systems evaluated on a shared test set.
//!
//! Tests that assume the compared results are independent (two-sample t,
//! two-proportion z, 2x2 chi-squared) tend to understate significance when
//! the systems' per-item outcomes are positively correlated, which is the
//! usual situation when both systems run on the same test set. This crate
//! implements those tests (flagged as independence-assuming), the
//! matched-pair tests that avoid the assumption (matched-pair t, sign,
//! Wilcoxon signed-rank), and a stratified-shuffle randomization test that
//! handles precision and F-score, whose composite form puts them out of
//! reach of the matched-pair analytics. The [`correlation`] module
//! quantifies the correlation and the variance overstatement, and
//! [`simulation`] reproduces the phenomenon on synthetic data.
//!
//! ```
//! use sigdiff::{
//!     analytic::{sign_test, Sidedness},
//!     data::ResponseCounts,
//!     metrics::MetricKind,
//!     randomization::{build_plan, randomization_test},
//! };
//!
//! // Two systems on 103 items of interest: 19 found by both, 28 by
//! // system 1 only, 6 by system 2 only; 5/43/9 spurious responses.
//! let counts = ResponseCounts {
//!     c_both: 19, c_only1: 28, c_only2: 6, miss_both: Some(50),
//!     s_both: 5, s_only1: 43, s_only2: 9,
//! };
//!
//! // Exact sign test on the 28-vs-6 discriminating items.
//! let sign = sign_test(counts.c_only1, counts.c_only2, Sidedness::One)?;
//! assert!(sign.p.value < 1e-4);
//!
//! // Randomization test of the F-score difference (sampled trials).
//! let plan = build_plan(&counts, MetricKind::FScore, Sidedness::One, 1 << 16, 42)?;
//! let result = randomization_test(&plan)?;
//! assert!(result.p.value < 0.05);
//! # Ok::<(), sigdiff::Error>(())
//! ```

pub mod analytic;
pub mod correlation;
pub mod data;
pub mod error;
pub mod metrics;
pub mod numerics;
pub mod randomization;
pub mod simulation;

// Exact rationals appear in the public API; re-export the crate behind them.
pub use num;

pub use analytic::{Method, Sidedness, TestResult};
pub use data::{DetailRecord, PairedOutcomes, ResponseCounts, System};
pub use error::{Error, Result};
pub use metrics::{MetricKind, MetricTriple};
pub use numerics::{PValue, PValueKind};
pub use randomization::{RandomizationPlan, RandomizationResult, VerificationReport};
pub use simulation::{PowerRow, SimSpec};
