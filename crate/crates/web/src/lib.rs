//! Browser bindings for the demo page in `www/`.
//!
//! Each export returns a JSON string so the page needs no generated
//! TypeScript types. The `*_json` functions are plain Rust and carry the
//! logic; the `#[wasm_bindgen]` wrappers only convert errors.

use rankgroup::bootstrap::{fill_missing_bounds, replicate_shares, stability_interval, BootstrapConfig};
use rankgroup::community::{isolates, louvain, LouvainConfig};
use rankgroup::concordance::w_distribution;
use rankgroup::ingest::{parse_csv, BoundsSource, Counting, UniversityRecord};
use rankgroup::netbuild::{build_overlap_network, build_w_network, build_z_network, StatNetwork};
use rankgroup::pairstats::{compare, effect_label};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn record(name: &str, n: f64, p: f64, bounds: Option<(f64, f64)>) -> UniversityRecord {
    UniversityRecord {
        university: name.to_string(),
        country: String::new(),
        field: String::new(),
        period: String::new(),
        counting: Counting::Fractional,
        p: n,
        p_top10: n * p,
        pp_top10: p,
        ci_lower: bounds.map(|b| b.0),
        ci_upper: bounds.map(|b| b.1),
        bounds_source: if bounds.is_some() {
            BoundsSource::Published
        } else {
            BoundsSource::Unavailable
        },
    }
}

fn bounds(lower: f64, upper: f64) -> Option<(f64, f64)> {
    (lower.is_finite() && upper.is_finite()).then_some((lower, upper))
}

/// Statistics for one pair. Shares are proportions; pass NaN bounds when
/// no interval is known.
#[allow(clippy::too_many_arguments)]
pub fn pair_stats_json(
    n1: f64,
    p1: f64,
    lower1: f64,
    upper1: f64,
    n2: f64,
    p2: f64,
    lower2: f64,
    upper2: f64,
) -> Result<String, String> {
    let a = record("a", n1, p1, bounds(lower1, upper1));
    let b = record("b", n2, p2, bounds(lower2, upper2));
    let r = compare(&a, &b);
    if let Some(flag) = r.flag {
        return Err(format!("{flag:?}"));
    }
    Ok(json!({
        "pooled_p": r.pooled_p,
        "z": r.z_signed,
        "abs_z": r.abs_z(),
        "chi2": r.chi2,
        "w": r.w,
        "effect": effect_label(r.w).to_string(),
        "overlap": r.overlap.map(|o| o.to_string()),
    })
    .to_string())
}

#[derive(Serialize)]
struct Bin {
    share: f64,
    count: usize,
}

/// Resampled interval plus a histogram of replicate shares.
pub fn bootstrap_json(n: f64, p: f64, replicates: usize, coverage: f64, seed: u64) -> Result<String, String> {
    let config = BootstrapConfig {
        replicates,
        coverage,
        seed,
    };
    let iv = stability_interval(n, p, &config).map_err(|e| e.to_string())?;
    let shares = replicate_shares(n, p, &config).map_err(|e| e.to_string())?;
    let mut bins: Vec<Bin> = Vec::new();
    for s in shares {
        match bins.last_mut() {
            Some(b) if b.share == s => b.count += 1,
            _ => bins.push(Bin { share: s, count: 1 }),
        }
    }
    Ok(json!({ "lower": iv.lower, "upper": iv.upper, "histogram": bins }).to_string())
}

/// Groups the universities of a CSV table by one criterion.
pub fn group_csv_json(csv: &str, criterion: &str, threshold: f64, seed: u64) -> Result<String, String> {
    let ds = parse_csv(csv.as_bytes(), "input").map_err(|e| e.to_string())?;
    if ds.is_empty() {
        return Err("the table has no rows".into());
    }
    let pairs = rankgroup::pairstats::all_pairs(&ds);
    let net: StatNetwork = match criterion {
        "overlap" => {
            let filled = fill_missing_bounds(
                &ds,
                &BootstrapConfig {
                    seed,
                    ..BootstrapConfig::default()
                },
            )
            .map_err(|e| e.to_string())?;
            let pairs = rankgroup::pairstats::all_pairs(&filled);
            build_overlap_network(&pairs, &filled).map_err(|e| e.to_string())?
        }
        "z" => build_z_network(&pairs, &ds, threshold),
        "w" => {
            let mut net = build_w_network(&pairs, &ds);
            net.edges.retain(|e| e.value < threshold);
            net
        }
        other => return Err(format!("unknown criterion {other:?}")),
    };
    let c = louvain(
        &net,
        &LouvainConfig {
            seed,
            ..LouvainConfig::default()
        },
    );
    let curve: Vec<f64> = w_distribution(&pairs).iter().map(|r| r.w).collect();
    Ok(json!({
        "nodes": net.nodes,
        "shares": ds.records.iter().map(|r| r.pp_top10).collect::<Vec<_>>(),
        "groups": c.labels,
        "group_count": c.group_count(),
        "q": c.q,
        "isolates": isolates(&net),
        "edges": net.edges.iter().map(|e| [e.source, e.target]).collect::<Vec<_>>(),
        "w_curve": curve,
    })
    .to_string())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn pair_stats(
    n1: f64,
    p1: f64,
    lower1: f64,
    upper1: f64,
    n2: f64,
    p2: f64,
    lower2: f64,
    upper2: f64,
) -> Result<String, JsValue> {
    pair_stats_json(n1, p1, lower1, upper1, n2, p2, lower2, upper2).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bootstrap(n: f64, p: f64, replicates: usize, coverage: f64, seed: u32) -> Result<String, JsValue> {
    bootstrap_json(n, p, replicates, coverage, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn group_csv(csv: &str, criterion: &str, threshold: f64, seed: u32) -> Result<String, JsValue> {
    group_csv_json(csv, criterion, threshold, seed.into()).map_err(|e| JsValue::from_str(&e))
}
