//! Agreement between classifications and the spread of effect sizes.

use std::io::Write;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::community::Classification;
use crate::ingest::Dataset;
use crate::pairstats::PairResult;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CramersV {
    pub v: f64,
    pub chi2: f64,
    pub df: usize,
    pub p_value: f64,
    /// Set when either partition has a single group; V is then reported
    /// as 0 with p = 1.
    pub degenerate: bool,
}

/// Cramér's V of the joint group-membership table of two partitions of the
/// same vertices, with the asymptotic χ² p-value.
pub fn cramers_v(a: &Classification, b: &Classification) -> Result<CramersV> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (ga, gb) = (a.group_count(), b.group_count());
    if ga < 2 || gb < 2 {
        return Ok(CramersV {
            v: 0.0,
            chi2: 0.0,
            df: 0,
            p_value: 1.0,
            degenerate: true,
        });
    }
    let mut table = vec![vec![0.0f64; gb]; ga];
    for (&x, &y) in a.labels.iter().zip(&b.labels) {
        table[x as usize - 1][y as usize - 1] += 1.0;
    }
    let n = a.len() as f64;
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..gb).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let mut chi2 = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &observed) in row.iter().enumerate() {
            let expected = rows[i] * cols[j] / n;
            if expected > 0.0 {
                chi2 += (observed - expected).powi(2) / expected;
            }
        }
    }
    let df = (ga - 1) * (gb - 1);
    let p_value = ChiSquared::new(df as f64)
        .map(|d| d.sf(chi2))
        .unwrap_or(f64::NAN);
    let v = (chi2 / (n * (ga.min(gb) - 1) as f64)).sqrt().clamp(0.0, 1.0);
    Ok(CramersV {
        v,
        chi2,
        df,
        p_value,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcordanceMatrix {
    pub methods: Vec<String>,
    pub v: Vec<Vec<f64>>,
    pub p_value: Vec<Vec<f64>>,
    pub n: usize,
}

impl ConcordanceMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.methods.iter().position(|m| m == a)?;
        let j = self.methods.iter().position(|m| m == b)?;
        Some(self.v[i][j])
    }

    /// Square matrix with `***` marking p < .001 off the diagonal.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["cramers_v".to_string()];
        header.extend(self.methods.iter().cloned());
        w.write_record(&header)?;
        for (i, name) in self.methods.iter().enumerate() {
            let mut row = vec![name.clone()];
            for j in 0..self.methods.len() {
                let mark = if i == j { "" } else { stars(self.p_value[i][j]) };
                row.push(format!("{:.3}{mark}", self.v[i][j]));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else {
        ""
    }
}

pub fn concordance_matrix(classifications: &[(String, Classification)]) -> Result<ConcordanceMatrix> {
    let k = classifications.len();
    let n = classifications.first().map_or(0, |(_, c)| c.len());
    let mut v = vec![vec![1.0; k]; k];
    let mut p_value = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = cramers_v(&classifications[i].1, &classifications[j].1)?;
            v[i][j] = r.v;
            v[j][i] = r.v;
            p_value[i][j] = r.p_value;
            p_value[j][i] = r.p_value;
        }
    }
    Ok(ConcordanceMatrix {
        methods: classifications.iter().map(|(m, _)| m.clone()).collect(),
        v,
        p_value,
        n,
    })
}

/// Members of the group with the highest publication-weighted mean share
/// `Σ p·pp / Σ p`, sorted alphabetically. Ties go to the lower group id.
pub fn top_group(classification: &Classification, dataset: &Dataset) -> Result<Vec<String>> {
    if classification.len() != dataset.len() {
        return Err(Error::LengthMismatch {
            expected: dataset.len(),
            found: classification.len(),
        });
    }
    let groups = classification.groups();
    let score = |members: &Vec<usize>| {
        let (top, total) = members.iter().fold((0.0, 0.0), |(t, n), &i| {
            let r = &dataset.records[i];
            (t + r.p * r.pp_top10, n + r.p)
        });
        if total > 0.0 {
            top / total
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut best: Option<(f64, &Vec<usize>)> = None;
    for members in &groups {
        let s = score(members);
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, members));
        }
    }
    let mut names: Vec<String> = best
        .map(|(_, m)| m.iter().map(|&i| dataset.records[i].university.clone()).collect())
        .unwrap_or_default();
    names.sort();
    Ok(names)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEffect {
    pub rank: usize,
    pub w: f64,
    pub u: String,
    pub v: String,
}

/// Pairwise w values in decreasing order; ties ordered by label pair.
/// Flagged pairs are left out.
pub fn w_distribution(pairs: &[PairResult]) -> Vec<RankedEffect> {
    let mut valid: Vec<&PairResult> = pairs.iter().filter(|p| p.is_valid()).collect();
    valid.sort_by(|a, b| b.w.total_cmp(&a.w).then_with(|| (&a.u, &a.v).cmp(&(&b.u, &b.v))));
    valid
        .into_iter()
        .enumerate()
        .map(|(i, p)| RankedEffect {
            rank: i + 1,
            w: p.w,
            u: p.u.clone(),
            v: p.v.clone(),
        })
        .collect()
}

pub fn write_distribution_csv<W: Write>(curve: &[RankedEffect], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "w"])?;
    for e in curve {
        w.write_record([e.rank.to_string(), e.w.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Share of valid pairs with `w <= cut`.
pub fn proportion_at_most(pairs: &[PairResult], cut: f64) -> f64 {
    let valid = pairs.iter().filter(|p| p.is_valid());
    let (hit, total) = valid.fold((0usize, 0usize), |(h, t), p| (h + usize::from(p.w <= cut), t + 1));
    if total == 0 {
        return f64::NAN;
    }
    hit as f64 / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::Method;
    use crate::ingest::{BoundsSource, Counting, UniversityRecord};
    use crate::pairstats::all_pairs;
    use proptest::prelude::*;

    fn class(labels: &[u32]) -> Classification {
        Classification::from_groups(labels, 0.0, Method::External, None)
    }

    #[test]
    fn identical_partitions() {
        let a = class(&[1, 1, 2, 2, 3, 3, 3]);
        let r = cramers_v(&a, &a).unwrap();
        assert!((r.v - 1.0).abs() < 1e-12);
        assert!(!r.degenerate);
        assert_eq!(r.df, 4);
    }

    #[test]
    fn perfect_two_by_two() {
        let mut la = vec![1; 10];
        la.extend(vec![2; 10]);
        let a = class(&la);
        let r = cramers_v(&a, &a).unwrap();
        assert!((r.chi2 - 20.0).abs() < 1e-12);
        assert!((r.v - 1.0).abs() < 1e-12);
        // χ²(1) survival at 20 is about 7.74e-6.
        assert!(r.p_value < 1e-5 && r.p_value > 7e-6);
    }

    #[test]
    fn single_group_is_degenerate() {
        let r = cramers_v(&class(&[1, 1, 1]), &class(&[1, 2, 3])).unwrap();
        assert!(r.degenerate);
        assert_eq!((r.v, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn independent_partitions_have_zero_v() {
        let a = class(&[1, 1, 2, 2]);
        let b = class(&[1, 2, 1, 2]);
        let r = cramers_v(&a, &b).unwrap();
        assert!(r.v.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_with_more_groups_is_below_one() {
        let coarse = class(&[1, 1, 1, 2, 2, 2]);
        let fine = class(&[1, 1, 2, 3, 3, 4]);
        assert!(cramers_v(&coarse, &fine).unwrap().v > 0.99);
        let finer = class(&[1, 1, 2, 3, 3, 3]);
        let r = cramers_v(&class(&[1, 1, 1, 2, 2, 2]), &finer).unwrap();
        assert!((r.v - 1.0).abs() < 1e-12, "every row of the joint table has one column per group");
        let unequal = class(&[1, 2, 3, 4, 5, 6]);
        assert!(cramers_v(&unequal, &class(&[1, 1, 2, 2, 3, 3])).unwrap().v < 1.0 + 1e-12);
    }

    #[test]
    fn matrix_shape_and_csv() {
        let a = class(&[1, 1, 2, 2, 2]);
        let m = concordance_matrix(&[("a".into(), a.clone()), ("b".into(), a)]).unwrap();
        assert_eq!(m.v, vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(m.get("a", "b"), Some(1.0));
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("cramers_v,a,b\n"));
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
    fn top_group_examples() {
        let ds = Dataset::new(
            vec![rec("d", 100.0, 0.05), rec("b", 100.0, 0.20), rec("c", 300.0, 0.05), rec("a", 50.0, 0.20)],
            "t",
        );
        assert_eq!(top_group(&class(&[1, 2, 1, 2]), &ds).unwrap(), ["a", "b"]);
        assert_eq!(top_group(&class(&[1, 1, 1, 1]), &ds).unwrap(), ["a", "b", "c", "d"]);
    }

    #[test]
    fn distribution_and_proportions() {
        let ds = Dataset::new(
            vec![rec("a", 1000.0, 0.1), rec("b", 1000.0, 0.3), rec("c", 500.0, 0.1)],
            "t",
        );
        let pairs = all_pairs(&ds);
        let curve = w_distribution(&pairs);
        assert_eq!(curve.len(), 3);
        assert!(curve.windows(2).all(|w| w[0].w >= w[1].w));
        assert_eq!(curve.last().unwrap().w, 0.0);
        assert_eq!(proportion_at_most(&pairs, f64::INFINITY), 1.0);
        assert!((proportion_at_most(&pairs, 0.0) - 1.0 / 3.0).abs() < 1e-12);

        let same = Dataset::new(vec![rec("a", 10.0, 0.2), rec("b", 30.0, 0.2), rec("c", 50.0, 0.2)], "t");
        let pairs = all_pairs(&same);
        assert!(w_distribution(&pairs).iter().all(|e| e.w == 0.0));
        assert_eq!(proportion_at_most(&pairs, 0.0), 1.0);
    }

    fn arb_labels() -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
        (2usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec(1u32..5, n),
                proptest::collection::vec(1u32..6, n),
            )
        })
    }

    proptest! {
        #[test]
        fn v_is_symmetric_bounded_and_label_invariant((la, lb) in arb_labels(), shift in 1u32..50) {
            let (a, b) = (class(&la), class(&lb));
            let ab = cramers_v(&a, &b).unwrap();
            let ba = cramers_v(&b, &a).unwrap();
            prop_assert!((ab.v - ba.v).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab.v));
            let relabeled: Vec<u32> = la.iter().map(|&x| 100 - x * shift % 97).collect();
            let c = cramers_v(&class(&relabeled), &b).unwrap();
            if class(&relabeled).group_count() == a.group_count() {
                prop_assert!((c.v - ab.v).abs() < 1e-12);
            }
        }

        #[test]
        fn distribution_is_a_sorted_permutation(pps in proptest::collection::vec(0.01f64..0.4, 2..15), cut_a in 0.0f64..0.3, cut_b in 0.0f64..0.3) {
            let ds = Dataset::new(
                pps.iter().enumerate().map(|(i, &pp)| rec(&format!("u{i:02}"), 200.0 + i as f64, pp)).collect(),
                "t",
            );
            let pairs = all_pairs(&ds);
            let curve = w_distribution(&pairs);
            let mut got: Vec<f64> = curve.iter().map(|e| e.w).collect();
            let mut want: Vec<f64> = pairs.iter().map(|p| p.w).collect();
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            prop_assert_eq!(got, want);
            let (lo, hi) = (cut_a.min(cut_b), cut_a.max(cut_b));
            prop_assert!(proportion_at_most(&pairs, lo) <= proportion_at_most(&pairs, hi));
        }
    }
}
