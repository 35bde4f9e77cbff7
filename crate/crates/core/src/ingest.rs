//! Ranking-indicator tables: parsing, validation and slicing.
//!
//! The expected input is the comma-separated export of a ranking worksheet
//! with one row per university. Header matching ignores case, spaces,
//! underscores and `%` signs, so `PP_top 10%` and `pp_top10` name the same
//! column. Proportions may be given on the percent scale; they are stored as
//! fractions.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::pairstats::Interval;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Counting {
    Fractional,
    Full,
}

impl Counting {
    pub fn parse(raw: &str) -> Option<Self> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "1" | "true" | "yes" | "fractional" | "frac" => Some(Counting::Fractional),
            "0" | "false" | "no" | "full" | "whole" => Some(Counting::Full),
            _ => None,
        }
    }
}

impl fmt::Display for Counting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Counting::Fractional => "fractional",
            Counting::Full => "full",
        })
    }
}

/// Where a record's stability interval came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundsSource {
    /// Read from the input table.
    #[default]
    Published,
    /// Estimated with the binomial resampling surrogate.
    Resampled,
    /// Neither published nor estimable.
    Unavailable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversityRecord {
    pub university: String,
    pub country: String,
    pub field: String,
    pub period: String,
    pub counting: Counting,
    /// Number of publications (non-integer under fractional counting).
    pub p: f64,
    /// Number of publications in the top-10% layer.
    pub p_top10: f64,
    /// Share of publications in the top-10% layer, as a fraction.
    pub pp_top10: f64,
    pub ci_lower: Option<f64>,
    pub ci_upper: Option<f64>,
    #[serde(default)]
    pub bounds_source: BoundsSource,
}

impl UniversityRecord {
    /// The stability interval, when both bounds are known.
    pub fn interval(&self) -> Option<Interval> {
        match (self.ci_lower, self.ci_upper) {
            (Some(lower), Some(upper)) => Some(Interval { lower, upper }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub records: Vec<UniversityRecord>,
    pub source: String,
}

/// Predicates for [`Dataset::filter`]. `None` matches everything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selection {
    pub country: Option<String>,
    pub field: Option<String>,
    pub period: Option<String>,
    pub counting: Option<Counting>,
}

impl Selection {
    pub fn country(name: impl Into<String>) -> Self {
        Selection {
            country: Some(name.into()),
            ..Selection::default()
        }
    }

    pub fn matches(&self, record: &UniversityRecord) -> bool {
        fn eq(want: &Option<String>, have: &str) -> bool {
            want.as_deref()
                .is_none_or(|w| w.trim().eq_ignore_ascii_case(have.trim()))
        }
        eq(&self.country, &record.country)
            && eq(&self.field, &record.field)
            && eq(&self.period, &record.period)
            && self.counting.is_none_or(|c| c == record.counting)
    }
}

impl Dataset {
    pub fn new(records: Vec<UniversityRecord>, source: impl Into<String>) -> Self {
        Dataset {
            records,
            source: source.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records matching every predicate of `selection`, in original order.
    pub fn filter(&self, selection: &Selection) -> Dataset {
        Dataset {
            records: self
                .records
                .iter()
                .filter(|r| selection.matches(r))
                .cloned()
                .collect(),
            source: self.source.clone(),
        }
    }

    /// Distinct country names, sorted.
    pub fn countries(&self) -> Vec<String> {
        let mut out: Vec<String> = self.records.iter().map(|r| r.country.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn labels(&self) -> Vec<String> {
        self.records.iter().map(|r| r.university.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Column {
    University,
    Country,
    Field,
    Period,
    Counting,
    P,
    PTop10,
    PpTop10,
    Lower,
    Upper,
}

impl Column {
    fn name(self) -> &'static str {
        match self {
            Column::University => "university",
            Column::Country => "country",
            Column::Field => "field",
            Column::Period => "period",
            Column::Counting => "fractional",
            Column::P => "p",
            Column::PTop10 => "p_top10",
            Column::PpTop10 => "pp_top10",
            Column::Lower => "pp_top10_lb",
            Column::Upper => "pp_top10_ub",
        }
    }

    fn from_header(raw: &str) -> Option<Self> {
        let key: String = raw
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        Some(match key.as_str() {
            "university" | "universityname" => Column::University,
            "country" => Column::Country,
            "field" => Column::Field,
            "period" => Column::Period,
            "fractional" | "fraccounting" | "fractionalcounting" | "counting" | "countingmethod" => {
                Column::Counting
            }
            "p" => Column::P,
            "ptop10" => Column::PTop10,
            "pptop10" => Column::PpTop10,
            "pptop10lb" | "pptop10lower" | "pptop10lowerbound" | "cilower" | "lower"
            | "lowerbound" | "lb" => Column::Lower,
            "pptop10ub" | "pptop10upper" | "pptop10upperbound" | "ciupper" | "upper"
            | "upperbound" | "ub" => Column::Upper,
            _ => return None,
        })
    }
}

const REQUIRED: [Column; 7] = [
    Column::University,
    Column::Country,
    Column::Field,
    Column::Period,
    Column::Counting,
    Column::P,
    Column::PpTop10,
];

pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_csv(file, path.display().to_string())
}

/// Parses a comma-separated ranking table.
///
/// `p_top10` and the two bound columns are optional. A missing `p_top10` is
/// reconstructed as `pp_top10 * p`; missing bounds stay `None` and can be
/// estimated later with [`crate::bootstrap::fill_missing_bounds`].
pub fn parse_csv<R: Read>(input: R, source: impl Into<String>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let mut columns: HashMap<Column, usize> = HashMap::new();
    for (idx, header) in reader.headers()?.iter().enumerate() {
        if let Some(col) = Column::from_header(header) {
            columns.entry(col).or_insert(idx);
        }
    }
    for col in REQUIRED {
        if !columns.contains_key(&col) {
            return Err(Error::MissingColumn(col.name()));
        }
    }

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        records.push(parse_row(&row, &columns, i + 1)?);
    }
    Ok(Dataset::new(records, source))
}

fn parse_row(
    row: &csv::StringRecord,
    columns: &HashMap<Column, usize>,
    row_no: usize,
) -> Result<UniversityRecord> {
    let malformed = |col: Column, message: String| Error::MalformedRow {
        row: row_no,
        column: col.name().to_string(),
        message,
    };
    let cell = |col: Column| -> Option<&str> {
        columns
            .get(&col)
            .and_then(|&idx| row.get(idx))
            .filter(|s| !s.is_empty())
    };
    let text = |col: Column| -> Result<String> {
        cell(col)
            .map(str::to_string)
            .ok_or_else(|| malformed(col, "missing value".into()))
    };
    let number = |col: Column| -> Result<Option<f64>> {
        match cell(col) {
            None => Ok(None),
            Some(raw) => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
                Ok(v) => Err(malformed(col, format!("expected a nonnegative number, got {v}"))),
                Err(_) => Err(malformed(col, format!("`{raw}` is not a number"))),
            },
        }
    };

    let university = text(Column::University)?;
    let country = text(Column::Country)?;
    let field = text(Column::Field)?;
    let period = text(Column::Period)?;
    let counting_raw = text(Column::Counting)?;
    let counting = Counting::parse(&counting_raw)
        .ok_or_else(|| malformed(Column::Counting, format!("unknown counting `{counting_raw}`")))?;
    let p = number(Column::P)?.ok_or_else(|| malformed(Column::P, "missing value".into()))?;
    let pp = number(Column::PpTop10)?
        .ok_or_else(|| malformed(Column::PpTop10, "missing value".into()))?;
    let lower = number(Column::Lower)?;
    let upper = number(Column::Upper)?;

    let (pp, lower, upper) = normalize_scale(pp, lower, upper, row_no)?;
    for (col, v) in [
        (Column::PpTop10, Some(pp)),
        (Column::Lower, lower),
        (Column::Upper, upper),
    ] {
        if let Some(v) = v {
            if v > 1.0 {
                return Err(malformed(col, format!("proportion {v} exceeds 100%")));
            }
        }
    }

    let p_top10 = number(Column::PTop10)?.unwrap_or(pp * p);
    let bounds_source = if lower.is_some() && upper.is_some() {
        BoundsSource::Published
    } else {
        BoundsSource::Unavailable
    };

    Ok(UniversityRecord {
        university,
        country,
        field,
        period,
        counting,
        p,
        p_top10,
        pp_top10: pp,
        ci_lower: lower,
        ci_upper: upper,
        bounds_source,
    })
}

/// Converts a percent-scale triple to fractions. Any value above 1 marks the
/// whole triple as percent.
fn normalize_scale(
    pp: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    row: usize,
) -> Result<(f64, Option<f64>, Option<f64>)> {
    let values = [Some(pp), lower, upper];
    let above = values.iter().flatten().filter(|&&v| v > 1.0).count();
    if above == 0 {
        return Ok((pp, lower, upper));
    }
    let scaled = (pp / 100.0, lower.map(|v| v / 100.0), upper.map(|v| v / 100.0));
    let present = values.iter().flatten().count();
    if above < present {
        // A triple mixing scales is only accepted when the percent reading
        // still keeps pp between its bounds.
        let lo = scaled.1.unwrap_or(f64::NEG_INFINITY);
        let hi = scaled.2.unwrap_or(f64::INFINITY);
        if !(lo <= scaled.0 && scaled.0 <= hi) {
            return Err(Error::InconsistentScale { row });
        }
    }
    Ok(scaled)
}

/// Writes the canonical form read back by [`parse_csv`].
pub fn write_csv<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "university",
        "country",
        "field",
        "period",
        "fractional",
        "p",
        "p_top10",
        "pp_top10",
        "pp_top10_lb",
        "pp_top10_ub",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &dataset.records {
        writer.write_record([
            r.university.clone(),
            r.country.clone(),
            r.field.clone(),
            r.period.clone(),
            match r.counting {
                Counting::Fractional => "1".into(),
                Counting::Full => "0".into(),
            },
            r.p.to_string(),
            r.p_top10.to_string(),
            r.pp_top10.to_string(),
            opt(r.ci_lower),
            opt(r.ci_upper),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    NegativeCount,
    TopCountExceedsTotal,
    ProportionOutOfRange,
    CountProportionMismatch,
    BoundsOrder,
    DuplicateLabel,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::NegativeCount => "counts must be nonnegative",
            Rule::TopCountExceedsTotal => "p_top10 must not exceed p",
            Rule::ProportionOutOfRange => "proportions must lie in [0, 1]",
            Rule::CountProportionMismatch => "p_top10 must agree with pp_top10 * p",
            Rule::BoundsOrder => "ci_lower must not exceed ci_upper",
            Rule::DuplicateLabel => "university labels must be unique within a slice",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub university: String,
    pub rule: Rule,
    pub observed: String,
}

/// Rounding step of a share given as a one-decimal percentage.
const PP_GRAIN: f64 = 0.001;

/// Checks the soft record invariants. Violations are reported, never fatal.
pub fn validate(dataset: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |r: &UniversityRecord, rule, observed: String| {
        out.push(Violation {
            university: r.university.clone(),
            rule,
            observed,
        })
    };

    for r in &dataset.records {
        if r.p < 0.0 || r.p_top10 < 0.0 {
            push(r, Rule::NegativeCount, format!("p={} p_top10={}", r.p, r.p_top10));
        }
        if r.p_top10 > r.p {
            push(r, Rule::TopCountExceedsTotal, format!("p={} p_top10={}", r.p, r.p_top10));
        }
        let props = [Some(r.pp_top10), r.ci_lower, r.ci_upper];
        if props.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            push(
                r,
                Rule::ProportionOutOfRange,
                format!("pp_top10={} ci=[{:?}, {:?}]", r.pp_top10, r.ci_lower, r.ci_upper),
            );
        }
        // Shares are usually published as percentages with one decimal.
        let expected = r.pp_top10 * r.p;
        if (r.p_top10 - expected).abs() > 0.5 + PP_GRAIN / 2.0 * r.p {
            push(
                r,
                Rule::CountProportionMismatch,
                format!("p_top10={} pp_top10*p={expected}", r.p_top10),
            );
        }
        if let (Some(lo), Some(hi)) = (r.ci_lower, r.ci_upper) {
            if lo > hi {
                push(r, Rule::BoundsOrder, format!("ci_lower={lo} ci_upper={hi}"));
            }
        }
    }

    let mut seen: HashMap<(&str, &str, &str, Counting, &str), usize> = HashMap::new();
    for r in &dataset.records {
        let key = (
            r.country.as_str(),
            r.field.as_str(),
            r.period.as_str(),
            r.counting,
            r.university.as_str(),
        );
        let count = seen.entry(key).or_insert(0);
        *count += 1;
        if *count == 2 {
            out.push(Violation {
                university: r.university.clone(),
                rule: Rule::DuplicateLabel,
                observed: format!("{} / {} / {} / {}", r.country, r.field, r.period, r.counting),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str =
        "university,country,field,period,fractional,p,p_top10,pp_top10,pp_top10_lb,pp_top10_ub\n";

    fn parse(text: &str) -> Result<Dataset> {
        parse_csv(text.as_bytes(), "test")
    }

    #[test]
    fn parses_percent_scale_row() {
        let ds = parse(&format!(
            "{HEADER}Leiden University,Netherlands,All sciences,2012-2015,1,6368,878.784,13.8,13.10,14.50\n"
        ))
        .unwrap();
        let r = &ds.records[0];
        assert_eq!(r.university, "Leiden University");
        assert_eq!(r.counting, Counting::Fractional);
        assert_eq!(r.p, 6368.0);
        assert_eq!(r.p_top10, 878.784);
        assert!((r.pp_top10 - 0.138).abs() < 1e-12);
        assert!((r.ci_lower.unwrap() - 0.1310).abs() < 1e-12);
        assert!((r.ci_upper.unwrap() - 0.1450).abs() < 1e-12);
        assert_eq!(r.bounds_source, BoundsSource::Published);
    }

    #[test]
    fn header_only_is_empty() {
        let ds = parse(HEADER).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn fraction_scale_matches_percent_scale() {
        let pct = parse(&format!("{HEADER}A,NL,All sciences,2012-2015,1,6368,878.784,13.8,13.10,14.50\n"))
            .unwrap();
        let frac = parse(&format!("{HEADER}A,NL,All sciences,2012-2015,1,6368,878.784,0.138,0.131,0.145\n"))
            .unwrap();
        let (a, b) = (&pct.records[0], &frac.records[0]);
        assert!((a.pp_top10 - b.pp_top10).abs() < 1e-15);
        assert!((a.ci_lower.unwrap() - b.ci_lower.unwrap()).abs() < 1e-15);
        assert!((a.ci_upper.unwrap() - b.ci_upper.unwrap()).abs() < 1e-15);
    }

    #[test]
    fn header_matching_is_lenient() {
        let text = "PP_top 10%,University,Country,Field,Period,Fractional,P,PP top10 LB,PP top10 UB\n\
                    13.8,Universität Göttingen,Germany,All sciences,2012-2015,1,100,10,20\n";
        let ds = parse(text).unwrap();
        let r = &ds.records[0];
        assert_eq!(r.university, "Universität Göttingen");
        assert!((r.p_top10 - 13.8).abs() < 1e-9, "reconstructed from pp * p");
    }

    #[test]
    fn missing_column_is_reported() {
        let err = parse("university,country,field,period,fractional,p\n").unwrap_err();
        assert!(matches!(err, Error::MissingColumn("pp_top10")));
    }

    #[test]
    fn malformed_number_reports_row() {
        let err = parse(&format!(
            "{HEADER}A,NL,All,2012-2015,1,100,10,0.1,0.09,0.11\nB,NL,All,2012-2015,1,abc,10,0.1,0.09,0.11\n"
        ))
        .unwrap_err();
        match err {
            Error::MalformedRow { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "p");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mixed_scale_is_rejected() {
        let err = parse(&format!("{HEADER}A,NL,All,2012-2015,1,100,13.8,13.8,0.131,0.145\n")).unwrap_err();
        assert!(matches!(err, Error::InconsistentScale { row: 1 }));
    }

    #[test]
    fn small_percent_values_with_large_bound_are_accepted() {
        // 0.8% with bounds 0.5%..1.2%: only the upper bound exceeds 1.
        let ds = parse(&format!("{HEADER}A,NL,All,2012-2015,1,1000,8,0.8,0.5,1.2\n")).unwrap();
        let r = &ds.records[0];
        assert!((r.pp_top10 - 0.008).abs() < 1e-15);
        assert!((r.ci_upper.unwrap() - 0.012).abs() < 1e-15);
    }

    #[test]
    fn empty_bounds_stay_missing() {
        let ds = parse(&format!("{HEADER}A,NL,All,2012-2015,0,100,,0.1,,\n")).unwrap();
        let r = &ds.records[0];
        assert_eq!(r.counting, Counting::Full);
        assert_eq!(r.interval(), None);
        assert_eq!(r.bounds_source, BoundsSource::Unavailable);
        assert!((r.p_top10 - 10.0).abs() < 1e-12);
    }

    fn record(name: &str, country: &str) -> UniversityRecord {
        UniversityRecord {
            university: name.into(),
            country: country.into(),
            field: "All sciences".into(),
            period: "2012-2015".into(),
            counting: Counting::Fractional,
            p: 1000.0,
            p_top10: 100.0,
            pp_top10: 0.1,
            ci_lower: Some(0.09),
            ci_upper: Some(0.11),
            bounds_source: BoundsSource::Published,
        }
    }

    #[test]
    fn filter_by_country() {
        let ds = Dataset::new(
            vec![record("a", "Germany"), record("b", "Brazil"), record("c", "Germany")],
            "t",
        );
        let de = ds.filter(&Selection::country("germany"));
        assert_eq!(de.labels(), ["a", "c"]);
        assert!(ds.filter(&Selection::country("Atlantis")).is_empty());
        assert_eq!(ds.filter(&Selection::default()).len(), 3);
        assert_eq!(ds.countries(), ["Brazil", "Germany"]);
    }

    #[test]
    fn validate_flags_constructed_violations() {
        let mut bad_top = record("a", "X");
        bad_top.p_top10 = 2000.0;
        bad_top.pp_top10 = 1.0;
        bad_top.ci_upper = Some(1.0);
        let report = validate(&Dataset::new(vec![bad_top], "t"));
        let rules: Vec<Rule> = report.iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::TopCountExceedsTotal));

        let mut swapped = record("b", "X");
        swapped.ci_lower = Some(0.2);
        let report = validate(&Dataset::new(vec![swapped], "t"));
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].rule, Rule::BoundsOrder);
    }

    #[test]
    fn leiden_amsterdam_pair_is_clean() {
        let text = format!(
            "{HEADER}Leiden University,Netherlands,All sciences,2012-2015,1,6368,878.784,13.8,13.10,14.50\n\
             University of Amsterdam,Netherlands,All sciences,2012-2015,1,8519,1235.255,14.5,13.90,15.10\n"
        );
        assert!(validate(&parse(&text).unwrap()).is_empty());
    }

    #[test]
    fn count_check_allows_one_decimal_rounding() {
        let mut r = record("a", "X");
        r.p = 20_000.0;
        r.pp_top10 = 0.138;
        r.p_top10 = 0.1384 * 20_000.0;
        assert!(validate(&Dataset::new(vec![r.clone()], "t")).is_empty());
        r.p_top10 = 2800.0;
        let report = validate(&Dataset::new(vec![r], "t"));
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].rule, Rule::CountProportionMismatch);
    }

    #[test]
    fn duplicate_label_flagged_once() {
        let ds = Dataset::new(vec![record("a", "X"), record("a", "X"), record("a", "Y")], "t");
        let report = validate(&ds);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].rule, Rule::DuplicateLabel);
    }

    fn arb_record() -> impl Strategy<Value = UniversityRecord> {
        (
            "[A-Za-zäöüé ,\"]{1,20}",
            prop_oneof![Just("Germany"), Just("Brazil"), Just("United Kingdom")],
            1.0f64..50_000.0,
            0.0f64..=1.0,
            proptest::option::of((0.0f64..=1.0, 0.0f64..=1.0)),
            any::<bool>(),
        )
            .prop_map(|(name, country, p, pp, bounds, frac)| {
                let (lo, hi) = match bounds {
                    Some((a, b)) => (Some(a.min(b)), Some(a.max(b))),
                    None => (None, None),
                };
                UniversityRecord {
                    university: name.trim().to_string() + "U",
                    country: country.into(),
                    field: "All sciences".into(),
                    period: "2012-2015".into(),
                    counting: if frac { Counting::Fractional } else { Counting::Full },
                    p,
                    p_top10: pp * p,
                    pp_top10: pp,
                    ci_lower: lo,
                    ci_upper: hi,
                    bounds_source: if lo.is_some() {
                        BoundsSource::Published
                    } else {
                        BoundsSource::Unavailable
                    },
                }
            })
    }

    proptest! {
        #[test]
        fn canonical_csv_round_trips(records in proptest::collection::vec(arb_record(), 0..12)) {
            let ds = Dataset::new(records, "t");
            let mut buf = Vec::new();
            write_csv(&ds, &mut buf).unwrap();
            let back = parse_csv(buf.as_slice(), "t").unwrap();
            prop_assert_eq!(back.records, ds.records);
        }

        #[test]
        fn filters_compose(records in proptest::collection::vec(arb_record(), 0..20), full in any::<bool>()) {
            let ds = Dataset::new(records, "t");
            let a = Selection::country("Germany");
            let b = Selection {
                counting: Some(if full { Counting::Full } else { Counting::Fractional }),
                ..Selection::default()
            };
            let both = Selection { country: a.country.clone(), counting: b.counting, ..Selection::default() };
            prop_assert_eq!(ds.filter(&a).filter(&b), ds.filter(&both));
        }

        #[test]
        fn stored_proportions_are_fractions(pp in 0.0f64..100.0, lo in 0.0f64..100.0, hi in 0.0f64..100.0) {
            let (lo, hi) = (lo.min(hi), lo.max(hi));
            let pp = pp.clamp(lo, hi);
            let text = format!("{HEADER}A,NL,All,2012-2015,1,100,,{pp},{lo},{hi}\n");
            let ds = parse(&text).unwrap();
            let r = &ds.records[0];
            for v in [r.pp_top10, r.ci_lower.unwrap(), r.ci_upper.unwrap()] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
