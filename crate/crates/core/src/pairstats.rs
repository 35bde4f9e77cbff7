//! Two-proportion statistics between universities.
//!
//! For a pair with publication counts `n1`, `n2` and top-10% shares `p1`,
//! `p2` this module provides the pooled z-test, the 2×2 contingency table of
//! top versus non-top papers, its Pearson χ² (no continuity correction),
//! Cohen's w, and the overlap relation between stability intervals.
//!
//! Counts stay real-valued throughout: under fractional counting a
//! university can have 878.784 top papers.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::ingest::{Dataset, UniversityRecord};
use crate::{Error, Result};

/// Expected share of top-10% papers.
pub const BASELINE_SHARE: f64 = 0.1;

/// Two-sided critical values of the standard normal.
pub const Z_05: f64 = 1.96;
pub const Z_01: f64 = 2.576;
pub const Z_001: f64 = 3.29;

fn check_sizes(n1: f64, n2: f64) -> Result<()> {
    if n1 > 0.0 && n2 > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveSize { n1, n2 })
    }
}

/// `(n1·p1 + n2·p2) / (n1 + n2)`.
pub fn pooled_proportion(n1: f64, p1: f64, n2: f64, p2: f64) -> Result<f64> {
    check_sizes(n1, n2)?;
    Ok((n1 * p1 + n2 * p2) / (n1 + n2))
}

/// Pooled two-proportion z statistic, signed as `p1 - p2`.
pub fn z_pair(n1: f64, p1: f64, n2: f64, p2: f64) -> Result<f64> {
    let pooled = pooled_proportion(n1, p1, n2, p2)?;
    if p1 == p2 {
        return Ok(0.0);
    }
    let variance = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2);
    if variance <= 0.0 {
        return Err(Error::DegenerateVariance { pooled });
    }
    Ok((p1 - p2) / variance.sqrt())
}

/// z of one university against an expected share, with `n1 = n2`.
pub fn z_baseline(n: f64, p: f64, expected: f64) -> Result<f64> {
    z_pair(n, p, n, expected)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable2x2 {
    /// Rows are the two universities; columns are top and non-top counts.
    pub cells: [[f64; 2]; 2],
}

impl ContingencyTable2x2 {
    pub fn new(cells: [[f64; 2]; 2]) -> Self {
        ContingencyTable2x2 { cells }
    }

    pub fn row_total(&self, row: usize) -> f64 {
        self.cells[row][0] + self.cells[row][1]
    }

    pub fn col_total(&self, col: usize) -> f64 {
        self.cells[0][col] + self.cells[1][col]
    }

    pub fn grand_total(&self) -> f64 {
        self.row_total(0) + self.row_total(1)
    }

    /// Cell counts expected under independence of rows and columns.
    pub fn expected(&self) -> [[f64; 2]; 2] {
        let n = self.grand_total();
        let mut out = [[0.0; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = self.row_total(r) * self.col_total(c) / n;
            }
        }
        out
    }
}

/// Observed top / non-top table `[t1, n1-t1; t2, n2-t2]` with `t = p·n`.
pub fn contingency(n1: f64, p1: f64, n2: f64, p2: f64) -> Result<ContingencyTable2x2> {
    check_sizes(n1, n2)?;
    let t1 = p1 * n1;
    let t2 = p2 * n2;
    Ok(ContingencyTable2x2::new([[t1, n1 - t1], [t2, n2 - t2]]))
}

/// Pearson χ² over the four cells, without continuity correction.
pub fn chi_square(table: &ContingencyTable2x2) -> Result<f64> {
    let margins = [
        table.row_total(0),
        table.row_total(1),
        table.col_total(0),
        table.col_total(1),
    ];
    if margins.iter().any(|&m| m <= 0.0) {
        return Err(Error::DegenerateTable);
    }
    let expected = table.expected();
    let mut chi2 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let d = table.cells[r][c] - expected[r][c];
            chi2 += d * d / expected[r][c];
        }
    }
    Ok(chi2)
}

/// Cohen's w: the square root of the summed squared deviations between
/// observed and expected cell proportions, each divided by the expected
/// proportion.
pub fn cohen_w(table: &ContingencyTable2x2) -> Result<f64> {
    // Validates the margins.
    chi_square(table)?;
    let n = table.grand_total();
    let expected = table.expected();
    let mut sum = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let p1 = table.cells[r][c] / n;
            let p0 = expected[r][c] / n;
            sum += (p1 - p0) * (p1 - p0) / p0;
        }
    }
    Ok(sum.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectSize {
    Negligible,
    Small,
    Medium,
    Large,
}

impl fmt::Display for EffectSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectSize::Negligible => "negligible",
            EffectSize::Small => "small",
            EffectSize::Medium => "medium",
            EffectSize::Large => "large",
        })
    }
}

/// Cohen's conventional labels, lower bounds inclusive.
pub fn effect_label(w: f64) -> EffectSize {
    if w >= 0.5 {
        EffectSize::Large
    } else if w >= 0.3 {
        EffectSize::Medium
    } else if w >= 0.1 {
        EffectSize::Small
    } else {
        EffectSize::Negligible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower > upper || lower.is_nan() || upper.is_nan() {
            return Err(Error::InvalidInterval { lower, upper });
        }
        Ok(Interval { lower, upper })
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapClass {
    None,
    Weak,
    Strong,
}

impl fmt::Display for OverlapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OverlapClass::None => "none",
            OverlapClass::Weak => "weak",
            OverlapClass::Strong => "strong",
        })
    }
}

/// Strong when either interval contains the other, weak when the closed
/// intervals merely intersect.
pub fn overlap_class(a: Interval, b: Interval) -> Result<OverlapClass> {
    Interval::new(a.lower, a.upper)?;
    Interval::new(b.lower, b.upper)?;
    Ok(if a.contains(&b) || b.contains(&a) {
        OverlapClass::Strong
    } else if a.intersects(&b) {
        OverlapClass::Weak
    } else {
        OverlapClass::None
    })
}

pub fn bonferroni(alpha: f64, comparisons: u64) -> f64 {
    alpha / comparisons.max(1) as f64
}

/// Two-sided critical |z| for significance level `alpha`.
pub fn z_critical(alpha: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

/// Two-sided significance level whose critical |z| is `z`.
pub fn two_sided_alpha(z: f64) -> f64 {
    2.0 * Normal::standard().sf(z.abs())
}

/// Number of unordered pairs among `k` items.
pub fn pair_count(k: usize) -> u64 {
    let k = k as u64;
    k * k.saturating_sub(1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairFlag {
    NonPositiveSize,
    DegenerateVariance,
    DegenerateTable,
}

/// All statistics for one pair of universities.
///
/// `u` is the lexicographically smaller label; `z_signed` follows
/// `pp(u) - pp(v)`. Flagged pairs carry NaN statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResult {
    pub u: String,
    pub v: String,
    /// Record positions of `u` and `v` in the source dataset.
    #[serde(skip)]
    pub u_index: usize,
    #[serde(skip)]
    pub v_index: usize,
    pub z_signed: f64,
    pub chi2: f64,
    pub w: f64,
    pub pooled_p: f64,
    pub overlap: Option<OverlapClass>,
    pub flag: Option<PairFlag>,
}

impl PairResult {
    pub fn is_valid(&self) -> bool {
        self.flag.is_none()
    }

    pub fn abs_z(&self) -> f64 {
        self.z_signed.abs()
    }
}

/// Statistics for one ordered pair of records.
pub fn compare(a: &UniversityRecord, b: &UniversityRecord) -> PairResult {
    let overlap = match (a.interval(), b.interval()) {
        (Some(ia), Some(ib)) => overlap_class(ia, ib).ok(),
        _ => None,
    };
    let mut out = PairResult {
        u: a.university.clone(),
        v: b.university.clone(),
        u_index: 0,
        v_index: 0,
        z_signed: f64::NAN,
        chi2: f64::NAN,
        w: f64::NAN,
        pooled_p: f64::NAN,
        overlap,
        flag: None,
    };
    let (n1, p1, n2, p2) = (a.p, a.pp_top10, b.p, b.pp_top10);
    match pooled_proportion(n1, p1, n2, p2) {
        Ok(pooled) => out.pooled_p = pooled,
        Err(_) => {
            out.flag = Some(PairFlag::NonPositiveSize);
            return out;
        }
    }
    if p1 == p2 {
        out.z_signed = 0.0;
        out.chi2 = 0.0;
        out.w = 0.0;
        return out;
    }
    let table = match contingency(n1, p1, n2, p2) {
        Ok(t) => t,
        Err(_) => {
            out.flag = Some(PairFlag::NonPositiveSize);
            return out;
        }
    };
    match (z_pair(n1, p1, n2, p2), chi_square(&table), cohen_w(&table)) {
        (Ok(z), Ok(chi2), Ok(w)) => {
            out.z_signed = z;
            out.chi2 = chi2;
            out.w = w;
        }
        (Err(Error::DegenerateVariance { .. }), _, _) => {
            out.flag = Some(PairFlag::DegenerateVariance)
        }
        _ => out.flag = Some(PairFlag::DegenerateTable),
    }
    out
}

/// Every unordered pair of records, `k(k-1)/2` results sorted by
/// `(u, v)` label order.
pub fn all_pairs(dataset: &Dataset) -> Vec<PairResult> {
    let records = &dataset.records;
    let k = records.len();
    let index_pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();

    let one = |&(i, j): &(usize, usize)| {
        let (i, j) = if records[j].university < records[i].university {
            (j, i)
        } else {
            (i, j)
        };
        let mut r = compare(&records[i], &records[j]);
        r.u_index = i;
        r.v_index = j;
        r
    };

    #[cfg(feature = "parallel")]
    let mut pairs: Vec<PairResult> = {
        use rayon::prelude::*;
        index_pairs.par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut pairs: Vec<PairResult> = index_pairs.iter().map(one).collect();

    pairs.sort_by(|a, b| {
        (&a.u, &a.v, a.u_index, a.v_index).cmp(&(&b.u, &b.v, b.u_index, b.v_index))
    });
    pairs
}

/// Audit export: `u,v,z,chi2,w,overlap,pooled_p,flag`.
pub fn write_pairs_csv<W: Write>(pairs: &[PairResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["u", "v", "z", "chi2", "w", "overlap", "pooled_p", "flag"])?;
    for p in pairs {
        w.write_record([
            p.u.clone(),
            p.v.clone(),
            p.z_signed.to_string(),
            p.chi2.to_string(),
            p.w.to_string(),
            p.overlap.map(|o| o.to_string()).unwrap_or_default(),
            p.pooled_p.to_string(),
            p.flag
                .map(|f| format!("{f:?}").to_lowercase())
                .unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{BoundsSource, Counting};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const LEIDEN: (f64, f64) = (6368.0, 0.138);
    const AMSTERDAM: (f64, f64) = (8519.0, 0.145);

    /// χ² from the shortcut `N (ad - bc)² / (r1 r2 c1 c2)`.
    fn chi2_shortcut(t: &ContingencyTable2x2) -> f64 {
        let [[a, b], [c, d]] = t.cells;
        let n = a + b + c + d;
        n * (a * d - b * c).powi(2) / ((a + b) * (c + d) * (a + c) * (b + d))
    }

    #[test]
    fn pooled_proportion_examples() {
        let p = pooled_proportion(LEIDEN.0, LEIDEN.1, AMSTERDAM.0, AMSTERDAM.1).unwrap();
        assert_abs_diff_eq!(p, 0.1420, epsilon = 1e-4);
        assert_abs_diff_eq!(pooled_proportion(50.0, 0.3, 50.0, 0.3).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(pooled_proportion(100.0, 0.0, 300.0, 0.2).unwrap(), 0.15, epsilon = 1e-15);
        assert!(matches!(
            pooled_proportion(0.0, 0.1, 10.0, 0.1),
            Err(Error::NonPositiveSize { .. })
        ));
    }

    #[test]
    fn z_pair_examples() {
        let z = z_pair(LEIDEN.0, LEIDEN.1, AMSTERDAM.0, AMSTERDAM.1).unwrap();
        assert_abs_diff_eq!(z.abs(), 1.211, epsilon = 1e-3);
        assert!(z < 0.0);
        assert_eq!(z_pair(10.0, 0.3, 77.0, 0.3).unwrap(), 0.0);
        assert_eq!(z_pair(10.0, 0.0, 77.0, 0.0).unwrap(), 0.0);
        assert_eq!(
            z_pair(6368.0, 0.138, 6368.0, 0.1).unwrap(),
            z_baseline(6368.0, 0.138, 0.1).unwrap()
        );
    }

    #[test]
    fn z_baseline_examples() {
        assert_eq!(z_baseline(500.0, 0.1, BASELINE_SHARE).unwrap(), 0.0);
        // pooled 0.125; sqrt(0.125 * 0.875 * 2 / 1000) = 0.0147902...
        let oracle = 0.05 / (0.125f64 * 0.875 * 0.002).sqrt();
        let z = z_baseline(1000.0, 0.15, BASELINE_SHARE).unwrap();
        assert_abs_diff_eq!(z, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(z, 3.3806, epsilon = 1e-4);
        assert!(z_baseline(1000.0, 0.05, BASELINE_SHARE).unwrap() < 0.0);
    }

    #[test]
    fn degenerate_variance() {
        // A proportion above one is corrupt input; the pooled share hits 1.
        assert!(matches!(
            z_pair(1.0, 1.5, 1.0, 0.5),
            Err(Error::DegenerateVariance { .. })
        ));
    }

    #[test]
    fn contingency_examples() {
        let t = contingency(LEIDEN.0, LEIDEN.1, AMSTERDAM.0, AMSTERDAM.1).unwrap();
        assert_abs_diff_eq!(t.cells[0][0], 878.784, epsilon = 1e-9);
        assert_abs_diff_eq!(t.cells[0][1], 5489.216, epsilon = 1e-9);
        assert_abs_diff_eq!(t.cells[1][0], 1235.255, epsilon = 1e-9);
        assert_abs_diff_eq!(t.cells[1][1], 7283.745, epsilon = 1e-9);
        assert_eq!(contingency(10.0, 0.0, 10.0, 0.0).unwrap().cells, [[0.0, 10.0], [0.0, 10.0]]);
        assert_eq!(contingency(50.0, 1.0, 50.0, 0.5).unwrap().cells, [[50.0, 0.0], [25.0, 25.0]]);
    }

    #[test]
    fn leiden_amsterdam_expected_counts() {
        let t = contingency(LEIDEN.0, LEIDEN.1, AMSTERDAM.0, AMSTERDAM.1).unwrap();
        let e = t.expected();
        assert_abs_diff_eq!(e[0][0], 904.2924, epsilon = 1e-3);
        assert_abs_diff_eq!(e[0][1], 5463.708, epsilon = 1e-3);
        assert_abs_diff_eq!(e[1][0], 1209.747, epsilon = 1e-3);
        assert_abs_diff_eq!(e[1][1], 7309.253, epsilon = 1e-3);
    }

    #[test]
    fn chi_square_examples() {
        let t = contingency(LEIDEN.0, LEIDEN.1, AMSTERDAM.0, AMSTERDAM.1).unwrap();
        assert_abs_diff_eq!(chi_square(&t).unwrap(), 1.465, epsilon = 1e-3);
        let equal = contingency(300.0, 0.2, 700.0, 0.2).unwrap();
        assert_abs_diff_eq!(chi_square(&equal).unwrap(), 0.0, epsilon = 1e-12);
        let hand = ContingencyTable2x2::new([[20.0, 80.0], [10.0, 90.0]]);
        // 2·25/15 + 2·25/85
        assert_abs_diff_eq!(chi_square(&hand).unwrap(), 50.0 / 15.0 + 50.0 / 85.0, epsilon = 1e-12);
        assert_abs_diff_eq!(chi_square(&hand).unwrap(), 3.9216, epsilon = 1e-4);
        let empty_col = contingency(10.0, 0.0, 10.0, 0.0).unwrap();
        assert!(matches!(chi_square(&empty_col), Err(Error::DegenerateTable)));
    }

    #[test]
    fn cohen_w_examples() {
        let t = contingency(LEIDEN.0, LEIDEN.1, AMSTERDAM.0, AMSTERDAM.1).unwrap();
        let w = cohen_w(&t).unwrap();
        // The summed proportion contributions are 0.000098; their root is
        // 0.0099, consistent with sqrt(chi2 / N) = sqrt(1.465 / 14887).
        assert_abs_diff_eq!(w * w, 0.000098, epsilon = 5e-7);
        assert_abs_diff_eq!(w, (1.465f64 / 14887.0).sqrt(), epsilon = 5e-6);
        let equal = contingency(300.0, 0.2, 700.0, 0.2).unwrap();
        assert_abs_diff_eq!(cohen_w(&equal).unwrap(), 0.0, epsilon = 1e-12);
        let hand = ContingencyTable2x2::new([[20.0, 80.0], [10.0, 90.0]]);
        assert_abs_diff_eq!(cohen_w(&hand).unwrap(), 0.1400, epsilon = 1e-4);
    }

    #[test]
    fn effect_labels() {
        assert_eq!(effect_label(0.099), EffectSize::Negligible);
        assert_eq!(effect_label(0.1), EffectSize::Small);
        assert_eq!(effect_label(0.30), EffectSize::Medium);
        assert_eq!(effect_label(0.41), EffectSize::Medium);
        assert_eq!(effect_label(0.5), EffectSize::Large);
    }

    #[test]
    fn overlap_examples() {
        let iv = |a, b| Interval::new(a, b).unwrap();
        assert_eq!(overlap_class(iv(0.1310, 0.1450), iv(0.1390, 0.1510)).unwrap(), OverlapClass::Weak);
        assert_eq!(overlap_class(iv(0.10, 0.20), iv(0.12, 0.18)).unwrap(), OverlapClass::Strong);
        assert_eq!(overlap_class(iv(0.10, 0.12), iv(0.13, 0.15)).unwrap(), OverlapClass::None);
        assert_eq!(overlap_class(iv(0.10, 0.12), iv(0.12, 0.15)).unwrap(), OverlapClass::Weak);
        let bad = Interval { lower: 0.2, upper: 0.1 };
        assert!(matches!(overlap_class(bad, iv(0.0, 1.0)), Err(Error::InvalidInterval { .. })));
    }

    #[test]
    fn bonferroni_examples() {
        assert_eq!(bonferroni(0.05, 1), 0.05);
        assert_eq!(pair_count(902), 406_351);
        assert_abs_diff_eq!(bonferroni(0.05, pair_count(902)), 1.2304e-7, epsilon = 1e-11);
        assert_eq!(pair_count(47), 1081);
        assert_abs_diff_eq!(bonferroni(0.01, 1081), 9.2507e-6, epsilon = 1e-10);
    }

    #[test]
    fn critical_values() {
        assert_abs_diff_eq!(z_critical(0.05), Z_05, epsilon = 1e-3);
        assert_abs_diff_eq!(z_critical(0.01), Z_01, epsilon = 1e-3);
        assert_abs_diff_eq!(z_critical(0.001), Z_001, epsilon = 1e-2);
        assert_abs_diff_eq!(two_sided_alpha(z_critical(0.02)), 0.02, epsilon = 1e-12);
        assert!(z_critical(bonferroni(0.05, 1081)) > 4.0);
    }

    fn rec(name: &str, p: f64, pp: f64) -> UniversityRecord {
        UniversityRecord {
            university: name.into(),
            country: "X".into(),
            field: "All sciences".into(),
            period: "2012-2015".into(),
            counting: Counting::Fractional,
            p,
            p_top10: p * pp,
            pp_top10: pp,
            ci_lower: None,
            ci_upper: None,
            bounds_source: BoundsSource::Unavailable,
        }
    }

    #[test]
    fn all_pairs_counts_and_order() {
        let names = ["d", "b", "a", "c"];
        let ds = Dataset::new(
            names.iter().enumerate().map(|(i, n)| rec(n, 100.0 + i as f64, 0.1 + 0.01 * i as f64)).collect(),
            "t",
        );
        let pairs = all_pairs(&ds);
        assert_eq!(pairs.len(), 6);
        let keys: Vec<(String, String)> = pairs.iter().map(|p| (p.u.clone(), p.v.clone())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(pairs.iter().all(|p| p.u < p.v));
        for p in &pairs {
            assert_eq!(ds.records[p.u_index].university, p.u);
            assert_eq!(ds.records[p.v_index].university, p.v);
        }
        assert_eq!(all_pairs(&Dataset::new(vec![rec("a", 1.0, 0.1), rec("b", 2.0, 0.2)], "t")).len(), 1);
    }

    #[test]
    fn all_pairs_flags_bad_sizes_without_aborting() {
        let ds = Dataset::new(vec![rec("a", 0.0, 0.1), rec("b", 10.0, 0.2), rec("c", 20.0, 0.3)], "t");
        let pairs = all_pairs(&ds);
        assert_eq!(pairs.len(), 3);
        assert_eq!(pairs.iter().filter(|p| p.flag == Some(PairFlag::NonPositiveSize)).count(), 2);
        assert!(pairs.iter().any(|p| p.is_valid()));
    }

    fn arb_pair() -> impl Strategy<Value = (f64, f64, f64, f64)> {
        (1.0f64..50_000.0, 0.0f64..=1.0, 1.0f64..50_000.0, 0.0f64..=1.0)
            .prop_filter("non-degenerate", |&(n1, p1, n2, p2)| {
                let pooled = (n1 * p1 + n2 * p2) / (n1 + n2);
                pooled > 0.0 && pooled < 1.0 && (p1 - p2).abs() > 1e-6
            })
    }

    proptest! {
        #[test]
        fn z_squared_is_chi_square((n1, p1, n2, p2) in arb_pair()) {
            let z = z_pair(n1, p1, n2, p2).unwrap();
            let t = contingency(n1, p1, n2, p2).unwrap();
            let chi2 = chi_square(&t).unwrap();
            prop_assert!(((z * z) - chi2).abs() <= 1e-9 * chi2.max(1e-300));
            prop_assert!((chi2 - chi2_shortcut(&t)).abs() <= 1e-8 * chi2.max(1e-12));
            let w = cohen_w(&t).unwrap();
            prop_assert!((w - (chi2 / t.grand_total()).sqrt()).abs() <= 1e-12);
        }

        #[test]
        fn z_is_antisymmetric((n1, p1, n2, p2) in arb_pair()) {
            let a = z_pair(n1, p1, n2, p2).unwrap();
            let b = z_pair(n2, p2, n1, p1).unwrap();
            prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
            let wa = cohen_w(&contingency(n1, p1, n2, p2).unwrap()).unwrap();
            let wb = cohen_w(&contingency(n2, p2, n1, p1).unwrap()).unwrap();
            prop_assert!((wa - wb).abs() <= 1e-12);
        }

        #[test]
        fn scaling_sizes_scales_z_not_w((n1, p1, n2, p2) in arb_pair(), c in 1.0f64..100.0) {
            let z = z_pair(n1, p1, n2, p2).unwrap();
            let zc = z_pair(c * n1, p1, c * n2, p2).unwrap();
            prop_assert!((zc - c.sqrt() * z).abs() <= 1e-9 * zc.abs().max(1.0));
            let w = cohen_w(&contingency(n1, p1, n2, p2).unwrap()).unwrap();
            let wc = cohen_w(&contingency(c * n1, p1, c * n2, p2).unwrap()).unwrap();
            prop_assert!((w - wc).abs() <= 1e-9);
        }

        #[test]
        fn w_is_bounded_and_zero_only_at_equality((n1, p1, n2, p2) in arb_pair()) {
            let w = cohen_w(&contingency(n1, p1, n2, p2).unwrap()).unwrap();
            // For a 2x2 table w equals |phi| and cannot exceed one.
            prop_assert!(w > 0.0 && w <= 1.0 + 1e-12);
        }

        #[test]
        fn overlap_is_symmetric(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, d in 0.0f64..1.0) {
            let x = Interval::new(a.min(b), a.max(b)).unwrap();
            let y = Interval::new(c.min(d), c.max(d)).unwrap();
            let xy = overlap_class(x, y).unwrap();
            prop_assert_eq!(xy, overlap_class(y, x).unwrap());
            if xy == OverlapClass::Strong {
                prop_assert!(x.intersects(&y));
            }
        }
    }
}
