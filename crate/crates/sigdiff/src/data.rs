//! Evaluation data model: per-item detail records, paired binary outcomes,
//! and the seven-count summary that every test in this crate consumes.
//!
//! Two systems are compared on one test set. Each response is either an item
//! of interest (it should be found) or spurious (found but not wanted). The
//! detail format records, per item, which of the two systems produced it;
//! [`summarize`] collapses the records into [`ResponseCounts`], and
//! [`to_paired_outcomes`] extracts the per-item-of-interest success pairs.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of a detail file: an item and which systems found it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetailRecord {
    pub item_id: String,
    /// True if the item should be found (counts toward recall denominators);
    /// false for spurious responses.
    pub of_interest: bool,
    pub found_by_1: bool,
    pub found_by_2: bool,
}

/// Per-item binary success records for the two systems over the items of
/// interest. Entry `k` is 1 when the system found item `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedOutcomes {
    y1: Vec<bool>,
    y2: Vec<bool>,
}

impl PairedOutcomes {
    pub fn new(y1: Vec<bool>, y2: Vec<bool>) -> Result<Self> {
        if y1.len() != y2.len() {
            return Err(Error::InvalidArgument(format!(
                "paired outcome sequences differ in length ({} vs {})",
                y1.len(),
                y2.len()
            )));
        }
        if y1.is_empty() {
            return Err(Error::NoItemsOfInterest);
        }
        Ok(Self { y1, y2 })
    }

    /// Builds the pairing from the four-way partition of the items of
    /// interest: found by both, by system 1 only, by system 2 only, by
    /// neither.
    pub fn from_counts(c_both: u64, c_only1: u64, c_only2: u64, miss_both: u64) -> Result<Self> {
        let n = c_both + c_only1 + c_only2 + miss_both;
        if n == 0 {
            return Err(Error::NoItemsOfInterest);
        }
        let cap = usize::try_from(n)
            .map_err(|_| Error::InvalidArgument("counts exceed addressable memory".into()))?;
        let mut y1 = Vec::with_capacity(cap);
        let mut y2 = Vec::with_capacity(cap);
        let mut push = |count: u64, a: bool, b: bool| {
            for _ in 0..count {
                y1.push(a);
                y2.push(b);
            }
        };
        push(c_both, true, true);
        push(c_only1, true, false);
        push(c_only2, false, true);
        push(miss_both, false, false);
        Ok(Self { y1, y2 })
    }

    pub fn n(&self) -> usize {
        self.y1.len()
    }

    pub fn y1(&self) -> &[bool] {
        &self.y1
    }

    pub fn y2(&self) -> &[bool] {
        &self.y2
    }

    pub fn mean1(&self) -> f64 {
        self.y1.iter().filter(|&&b| b).count() as f64 / self.n() as f64
    }

    pub fn mean2(&self) -> f64 {
        self.y2.iter().filter(|&&b| b).count() as f64 / self.n() as f64
    }

    /// Per-item differences `y1 - y2` as reals in {-1, 0, +1}.
    pub fn differences(&self) -> Vec<f64> {
        self.y1
            .iter()
            .zip(&self.y2)
            .map(|(&a, &b)| (a as i8 - b as i8) as f64)
            .collect()
    }

    /// Joint counts (both, only system 1, only system 2, neither).
    pub fn joint_counts(&self) -> (u64, u64, u64, u64) {
        let mut c = (0u64, 0u64, 0u64, 0u64);
        for (&a, &b) in self.y1.iter().zip(&self.y2) {
            match (a, b) {
                (true, true) => c.0 += 1,
                (true, false) => c.1 += 1,
                (false, true) => c.2 += 1,
                (false, false) => c.3 += 1,
            }
        }
        c
    }

    /// Swaps the system labels.
    pub fn swap_systems(&self) -> Self {
        Self {
            y1: self.y2.clone(),
            y2: self.y1.clone(),
        }
    }
}

/// The seven-count summary of a two-system comparison.
///
/// `miss_both` is optional because tests that never touch a recall
/// denominator (for example the 2x2 precision table) do not need it.
/// When it is known, the number of items of interest is
/// `c_both + c_only1 + c_only2 + miss_both`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResponseCounts {
    /// Items of interest found by both systems.
    pub c_both: u64,
    /// Items of interest found by system 1 only.
    pub c_only1: u64,
    /// Items of interest found by system 2 only.
    pub c_only2: u64,
    /// Items of interest found by neither system, when known.
    pub miss_both: Option<u64>,
    /// Spurious responses produced by both systems.
    pub s_both: u64,
    /// Spurious responses produced by system 1 only.
    pub s_only1: u64,
    /// Spurious responses produced by system 2 only.
    pub s_only2: u64,
}

/// Selector for one of the two compared systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum System {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl ResponseCounts {
    /// Total number of items of interest, when `miss_both` is known.
    pub fn total_of_interest(&self) -> Option<u64> {
        self.miss_both
            .map(|m| self.c_both + self.c_only1 + self.c_only2 + m)
    }

    pub fn require_total(&self) -> Result<u64> {
        self.total_of_interest()
            .ok_or(Error::MissingCount("miss_both"))
    }

    /// R for the given system: items of interest it found.
    pub fn recalled(&self, system: System) -> u64 {
        match system {
            System::One => self.c_both + self.c_only1,
            System::Two => self.c_both + self.c_only2,
        }
    }

    /// S for the given system: spurious responses it produced.
    pub fn spurious(&self, system: System) -> u64 {
        match system {
            System::One => self.s_both + self.s_only1,
            System::Two => self.s_both + self.s_only2,
        }
    }

    /// Number of responses produced by exactly one system, i.e. the
    /// shuffleable units of the randomization test.
    pub fn exclusive_units(&self) -> u64 {
        self.c_only1 + self.c_only2 + self.s_only1 + self.s_only2
    }

    /// Relabels system 1 as system 2 and vice versa.
    pub fn swap_systems(&self) -> Self {
        Self {
            c_both: self.c_both,
            c_only1: self.c_only2,
            c_only2: self.c_only1,
            miss_both: self.miss_both,
            s_both: self.s_both,
            s_only1: self.s_only2,
            s_only2: self.s_only1,
        }
    }

    /// Paired outcomes over the items of interest; requires `miss_both`.
    pub fn paired_outcomes(&self) -> Result<PairedOutcomes> {
        let miss = self.require_total()? - self.c_both - self.c_only1 - self.c_only2;
        PairedOutcomes::from_counts(self.c_both, self.c_only1, self.c_only2, miss)
    }
}

fn parse_flag(field: &str, line: usize, name: &str) -> Result<bool> {
    match field {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::MalformedLine {
            line,
            msg: format!("{name} must be 0 or 1, got `{other}`"),
        }),
    }
}

/// Parses detail records from text. Lines are
/// `item_id<TAB>of_interest<TAB>found_by_1<TAB>found_by_2` with flags in
/// {0,1}; `#` starts a comment line; blank lines are skipped; LF and CRLF
/// both accepted.
pub fn parse_detail_str(text: &str) -> Result<Vec<DetailRecord>> {
    let mut records = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::MalformedLine {
                line: line_no,
                msg: format!("expected 4 tab-separated fields, got {}", fields.len()),
            });
        }
        let item_id = fields[0].trim();
        if item_id.is_empty() {
            return Err(Error::MalformedLine {
                line: line_no,
                msg: "empty item id".into(),
            });
        }
        let of_interest = parse_flag(fields[1].trim(), line_no, "of_interest")?;
        let found_by_1 = parse_flag(fields[2].trim(), line_no, "found_by_1")?;
        let found_by_2 = parse_flag(fields[3].trim(), line_no, "found_by_2")?;
        if !of_interest && !found_by_1 && !found_by_2 {
            return Err(Error::SpuriousUnfound {
                line: line_no,
                id: item_id.to_string(),
            });
        }
        if !seen.insert(item_id.to_string()) {
            return Err(Error::DuplicateId {
                line: line_no,
                id: item_id.to_string(),
            });
        }
        records.push(DetailRecord {
            item_id: item_id.to_string(),
            of_interest,
            found_by_1,
            found_by_2,
        });
    }
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    Ok(records)
}

/// Reads and parses a detail file (UTF-8).
pub fn parse_detail_file<P: AsRef<Path>>(path: P) -> Result<Vec<DetailRecord>> {
    let text = std::fs::read_to_string(path)?;
    parse_detail_str(&text)
}

/// Collapses validated records into the seven-count summary. The counts
/// partition the records; permutation of the input leaves the result
/// unchanged.
pub fn summarize(records: &[DetailRecord]) -> ResponseCounts {
    let mut c = ResponseCounts {
        c_both: 0,
        c_only1: 0,
        c_only2: 0,
        miss_both: Some(0),
        s_both: 0,
        s_only1: 0,
        s_only2: 0,
    };
    let mut miss = 0u64;
    for r in records {
        match (r.of_interest, r.found_by_1, r.found_by_2) {
            (true, true, true) => c.c_both += 1,
            (true, true, false) => c.c_only1 += 1,
            (true, false, true) => c.c_only2 += 1,
            (true, false, false) => miss += 1,
            (false, true, true) => c.s_both += 1,
            (false, true, false) => c.s_only1 += 1,
            (false, false, true) => c.s_only2 += 1,
            (false, false, false) => {
                // rejected at parse time; tolerate hand-built records
                debug_assert!(false, "spurious record found by neither system");
            }
        }
    }
    c.miss_both = Some(miss);
    c
}

/// Extracts one (y1, y2) success pair per item of interest; spurious
/// records are excluded.
pub fn to_paired_outcomes(records: &[DetailRecord]) -> Result<PairedOutcomes> {
    let mut y1 = Vec::new();
    let mut y2 = Vec::new();
    for r in records.iter().filter(|r| r.of_interest) {
        y1.push(r.found_by_1);
        y2.push(r.found_by_2);
    }
    PairedOutcomes::new(y1, y2)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsJson {
    c_both: u64,
    c_only1: u64,
    c_only2: u64,
    #[serde(default)]
    miss_both: Option<u64>,
    s_both: u64,
    s_only1: u64,
    s_only2: u64,
    #[serde(default)]
    total_of_interest: Option<u64>,
}

/// Parses counts from a JSON object with the `ResponseCounts` field names.
/// `miss_both` and `total_of_interest` are each optional; when both present
/// they must agree, and either one determines the other.
pub fn counts_from_json(text: &str) -> Result<ResponseCounts> {
    let j: CountsJson = serde_json::from_str(text)?;
    let recalled_any = j.c_both + j.c_only1 + j.c_only2;
    let miss = match (j.miss_both, j.total_of_interest) {
        (Some(m), Some(t)) => {
            if recalled_any + m != t {
                return Err(Error::InconsistentCounts(format!(
                    "c_both + c_only1 + c_only2 + miss_both = {} but total_of_interest = {t}",
                    recalled_any + m
                )));
            }
            Some(m)
        }
        (Some(m), None) => Some(m),
        (None, Some(t)) => {
            if t < recalled_any {
                return Err(Error::InconsistentCounts(format!(
                    "total_of_interest = {t} is smaller than the {recalled_any} recalled items"
                )));
            }
            Some(t - recalled_any)
        }
        (None, None) => None,
    };
    if let Some(t) = miss.map(|m| recalled_any + m) {
        if t == 0 {
            return Err(Error::InconsistentCounts(
                "total_of_interest must be positive".into(),
            ));
        }
    }
    Ok(ResponseCounts {
        c_both: j.c_both,
        c_only1: j.c_only1,
        c_only2: j.c_only2,
        miss_both: miss,
        s_both: j.s_both,
        s_only1: j.s_only1,
        s_only2: j.s_only2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Worked comparison used throughout the crate's tests: 103 items of
    /// interest split 19/28/6/50, plus 5/43/9 spurious responses.
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

    fn example_detail_text() -> String {
        let mut out = String::from("# two extraction systems on the modifier subset\n");
        let mut k = 0;
        let mut push = |count: u64, oi: u8, f1: u8, f2: u8, out: &mut String| {
            for _ in 0..count {
                k += 1;
                out.push_str(&format!("item{k}\t{oi}\t{f1}\t{f2}\n"));
            }
        };
        push(19, 1, 1, 1, &mut out);
        push(28, 1, 1, 0, &mut out);
        push(6, 1, 0, 1, &mut out);
        push(50, 1, 0, 0, &mut out);
        push(5, 0, 1, 1, &mut out);
        push(43, 0, 1, 0, &mut out);
        push(9, 0, 0, 1, &mut out);
        out
    }

    #[test]
    fn parses_example_detail_file() {
        let records = parse_detail_str(&example_detail_text()).unwrap();
        assert_eq!(records.len(), 160);
        let counts = summarize(&records);
        assert_eq!(counts, example_counts());
        assert_eq!(counts.total_of_interest(), Some(103));
        assert_eq!(counts.recalled(System::One), 47);
        assert_eq!(counts.spurious(System::One), 48);
        assert_eq!(counts.recalled(System::Two), 25);
        assert_eq!(counts.spurious(System::Two), 14);
        assert_eq!(counts.exclusive_units(), 86);
    }

    #[test]
    fn crlf_and_comments_accepted() {
        let text = "# c\r\na\t1\t1\t0\r\n\r\nb\t0\t0\t1\r\n";
        let records = parse_detail_str(text).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records[0].found_by_1 && !records[0].found_by_2);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_detail_str(""), Err(Error::NoRecords)));
        assert!(matches!(
            parse_detail_str("# only a comment\n"),
            Err(Error::NoRecords)
        ));
    }

    #[test]
    fn spurious_found_by_neither_is_rejected_with_line_number() {
        let text = "a\t1\t1\t1\nx7\t0\t0\t0\n";
        match parse_detail_str(text) {
            Err(Error::SpuriousUnfound { line, id }) => {
                assert_eq!(line, 2);
                assert_eq!(id, "x7");
            }
            other => panic!("expected SpuriousUnfound, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        let text = "a\t1\t1\t0\na\t1\t0\t1\n";
        assert!(matches!(
            parse_detail_str(text),
            Err(Error::DuplicateId { line: 2, .. })
        ));
    }

    #[test]
    fn malformed_lines_report_position() {
        for (text, line) in [
            ("a\t1\t1\n", 1),
            ("a\t1\t1\t0\nb\t2\t1\t0\n", 2),
            ("a\t1\ttrue\t0\n", 1),
            ("\t1\t1\t0\n", 1),
        ] {
            match parse_detail_str(text) {
                Err(Error::MalformedLine { line: l, .. }) => assert_eq!(l, line),
                other => panic!("expected MalformedLine for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn paired_outcomes_partition_matches() {
        let records = parse_detail_str(&example_detail_text()).unwrap();
        let pairs = to_paired_outcomes(&records).unwrap();
        assert_eq!(pairs.n(), 103);
        assert_eq!(pairs.joint_counts(), (19, 28, 6, 50));
    }

    #[test]
    fn paired_outcomes_require_an_item_of_interest() {
        let records = vec![DetailRecord {
            item_id: "a".into(),
            of_interest: false,
            found_by_1: true,
            found_by_2: false,
        }];
        assert!(matches!(
            to_paired_outcomes(&records),
            Err(Error::NoItemsOfInterest)
        ));
    }

    #[test]
    fn summarize_is_permutation_invariant() {
        let mut records = parse_detail_str(&example_detail_text()).unwrap();
        records.reverse();
        assert_eq!(summarize(&records), example_counts());
        let pairs = to_paired_outcomes(&records).unwrap();
        assert_eq!(pairs.joint_counts(), (19, 28, 6, 50));
    }

    #[test]
    fn counts_json_round_trips_and_reconciles() {
        let full = r#"{"c_both":19,"c_only1":28,"c_only2":6,"miss_both":50,
                       "s_both":5,"s_only1":43,"s_only2":9,"total_of_interest":103}"#;
        assert_eq!(counts_from_json(full).unwrap(), example_counts());

        let via_total = r#"{"c_both":19,"c_only1":28,"c_only2":6,
                            "s_both":5,"s_only1":43,"s_only2":9,"total_of_interest":103}"#;
        assert_eq!(counts_from_json(via_total).unwrap(), example_counts());

        let no_miss = r#"{"c_both":0,"c_only1":47,"c_only2":25,"s_both":0,"s_only1":48,"s_only2":14}"#;
        let c = counts_from_json(no_miss).unwrap();
        assert_eq!(c.miss_both, None);
        assert_eq!(c.recalled(System::One), 47);
        assert!(c.require_total().is_err());
    }

    #[test]
    fn counts_json_rejects_conflicts_and_unknown_fields() {
        let bad = r#"{"c_both":1,"c_only1":1,"c_only2":1,"miss_both":1,
                      "s_both":0,"s_only1":1,"s_only2":1,"total_of_interest":5}"#;
        assert!(matches!(
            counts_from_json(bad),
            Err(Error::InconsistentCounts(_))
        ));
        let unknown = r#"{"c_both":1,"c_only1":1,"c_only2":1,"s_both":0,"s_only1":1,"s_only2":1,"bogus":3}"#;
        assert!(matches!(counts_from_json(unknown), Err(Error::Json(_))));
        let negative = r#"{"c_both":-1,"c_only1":1,"c_only2":1,"s_both":0,"s_only1":1,"s_only2":1}"#;
        assert!(counts_from_json(negative).is_err());
    }

    #[test]
    fn identical_systems_and_single_miss() {
        let records: Vec<DetailRecord> = (0..4)
            .map(|i| DetailRecord {
                item_id: format!("i{i}"),
                of_interest: true,
                found_by_1: true,
                found_by_2: true,
            })
            .collect();
        let c = summarize(&records);
        assert_eq!((c.c_both, c.exclusive_units()), (4, 0));

        let miss = vec![DetailRecord {
            item_id: "m".into(),
            of_interest: true,
            found_by_1: false,
            found_by_2: false,
        }];
        let c = summarize(&miss);
        assert_eq!(c.miss_both, Some(1));
        assert_eq!(c.total_of_interest(), Some(1));
    }
}
