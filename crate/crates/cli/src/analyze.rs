use std::process::ExitCode;

use rankgroup::bootstrap::{fill_missing_bounds, RNG_ALGORITHM};
use rankgroup::community::{self, isolates, louvain, weak_components, LouvainConfig, NamedClassification};
use rankgroup::ingest::{self, BoundsSource, Dataset};
use rankgroup::netbuild::{
    baseline_annotations, build_overlap_network, build_w_network, build_z_network, EdgeWeights,
    StatNetwork,
};
use rankgroup::pairstats::{all_pairs, bonferroni, pair_count, two_sided_alpha, write_pairs_csv, z_critical};
use rankgroup::pajek::{bundle_names, format_number, render_clu, render_net, render_vec};
use rayon::prelude::*;

use crate::report::{self, ClassRow, RunSummary, ScopeSummary};
use crate::{load, scopes, write_files, InputArgs, RunConfig};

/// Everything computed for one scope, rendered but not yet written.
pub struct ScopeResult {
    pub summary: ScopeSummary,
    /// Louvain partitions in method order, for concordance.
    pub methods: Vec<NamedClassification>,
    pub files: Vec<(String, Vec<u8>)>,
    pub warnings: usize,
}

fn below(network: &StatNetwork, max: f64) -> StatNetwork {
    let mut out = network.clone();
    out.edges.retain(|e| e.value < max);
    out
}

/// Effective |z| cut-off for a scope with `k` universities.
pub fn effective_z(threshold: f64, k: usize, cfg: &RunConfig) -> f64 {
    if cfg.bonferroni {
        z_critical(bonferroni(two_sided_alpha(threshold), pair_count(k)))
    } else {
        threshold
    }
}

struct Collector<'a> {
    cfg: &'a RunConfig,
    rows: Vec<ClassRow>,
    groups: Vec<NamedClassification>,
    methods: Vec<NamedClassification>,
}

impl Collector<'_> {
    fn classify(&mut self, net: &StatNetwork, name: String, threshold: Option<f64>) {
        let lv = LouvainConfig {
            seed: self.cfg.seed,
            resolution: self.cfg.resolution,
            weights: self.cfg.weights,
        };
        let isolated = isolates(net);
        let found = [
            (name.clone(), louvain(net, &lv)),
            (format!("{name}/components"), weak_components(net, self.cfg.weights)),
        ];
        for (i, (label, c)) in found.into_iter().enumerate() {
            self.rows.push(ClassRow {
                name: label.clone(),
                criterion: net.criterion.to_string(),
                threshold,
                method: c.method.to_string(),
                edges: net.edge_count(),
                groups: c.group_count(),
                q: c.q,
                isolates: isolated.clone(),
            });
            let named = NamedClassification {
                name: label,
                nodes: net.nodes.clone(),
                classification: c,
            };
            if i == 0 {
                self.methods.push(named.clone());
            }
            self.groups.push(named);
        }
    }
}

pub fn analyze_scope(scope: &str, ds: &Dataset, cfg: &RunConfig) -> anyhow::Result<ScopeResult> {
    let pairs = all_pairs(ds);
    let names = bundle_names(scope, cfg.slugify);
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut notes = Vec::new();
    let mut warnings = 0;
    let mut col = Collector {
        cfg,
        rows: Vec::new(),
        groups: Vec::new(),
        methods: Vec::new(),
    };

    if ds.len() < 2 {
        notes.push("insufficient pairs".to_string());
    }
    let flagged = pairs.iter().filter(|p| !p.is_valid()).count();
    if flagged > 0 {
        notes.push(format!("{flagged} pairs without valid statistics"));
    }
    let resampled = ds
        .records
        .iter()
        .filter(|r| r.bounds_source == BoundsSource::Resampled)
        .count();

    if cfg.overlap {
        match build_overlap_network(&pairs, ds) {
            Ok(net) => {
                files.push((names.overlap_net.clone(), render_net(&net).into_bytes()));
                col.classify(&net, "overlap".into(), None);
            }
            Err(e) => {
                notes.push(format!("overlap network skipped: {e}"));
                warnings += 1;
            }
        }
    }
    if cfg.z {
        let k = ds.len();
        let widest = effective_z(cfg.z_thresholds[0], k, cfg);
        files.push((
            names.z_net.clone(),
            render_net(&build_z_network(&pairs, ds, widest)).into_bytes(),
        ));
        for &t in &cfg.z_thresholds {
            let eff = effective_z(t, k, cfg);
            let net = build_z_network(&pairs, ds, eff);
            col.classify(&net, format!("z<{}", format_number(t)), Some(eff));
        }
    }
    if cfg.w {
        let full = build_w_network(&pairs, ds);
        files.push((names.w_net.clone(), render_net(&full).into_bytes()));
        for &t in &cfg.w_thresholds {
            col.classify(&below(&full, t), format!("w<{}", format_number(t)), Some(t));
        }
    }

    let base = baseline_annotations(ds);
    files.push((names.vec.clone(), render_vec(&base.vector)?.into_bytes()));
    files.push((names.clu.clone(), render_clu(&base.partition).into_bytes()));

    let root = names.clu.trim_end_matches(".clu");
    let mut buf = Vec::new();
    write_pairs_csv(&pairs, &mut buf)?;
    files.push((format!("{root}_pairs.csv"), buf));
    let mut buf = Vec::new();
    community::write_groups_csv(&mut buf, &col.groups)?;
    files.push((format!("{root}_groups.csv"), buf));

    Ok(ScopeResult {
        summary: ScopeSummary {
            scope: scope.to_string(),
            universities: ds.len(),
            pairs: pairs.len(),
            flagged_pairs: flagged,
            resampled_bounds: resampled,
            notes,
            files: files.iter().map(|(n, _)| n.clone()).collect(),
            classifications: col.rows,
        },
        methods: col.methods,
        files,
        warnings,
    })
}

/// Loads, fills missing bounds on the whole selection, then analyzes each
/// scope. Filling before slicing keeps a university's bounds identical in
/// its country and in the world scope.
pub fn prepare(input: &InputArgs, cfg: &RunConfig) -> anyhow::Result<(Dataset, usize)> {
    let ds = load(input)?;
    let violations = ingest::validate(&ds);
    for v in &violations {
        eprintln!("warning: {}: {} ({})", v.university, v.rule, v.observed);
    }
    let needs_overlap = cfg.overlap && ds.records.iter().any(|r| r.interval().is_none());
    let ds = if needs_overlap {
        fill_missing_bounds(&ds, &cfg.bootstrap)?
    } else {
        ds
    };
    Ok((ds, violations.len()))
}

pub fn run(input: &InputArgs, cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    let (ds, violations) = prepare(input, cfg)?;
    let scoped = scopes(&ds, input)?;
    let results: Vec<ScopeResult> = scoped
        .par_iter()
        .map(|(name, slice)| analyze_scope(name, slice, cfg))
        .collect::<anyhow::Result<_>>()?;

    let mut warnings = violations;
    let mut summaries = Vec::new();
    for r in results {
        write_files(&input.out, &r.files)?;
        warnings += r.warnings;
        println!(
            "{}: {} universities, {} pairs, {} files",
            r.summary.scope,
            r.summary.universities,
            r.summary.pairs,
            r.files.len()
        );
        summaries.push(r.summary);
    }

    let summary = RunSummary {
        input: input.input.display().to_string(),
        rng: RNG_ALGORITHM,
        seed: cfg.seed,
        bootstrap_replicates: cfg.bootstrap.replicates,
        coverage: cfg.bootstrap.coverage,
        edge_weights: match cfg.weights {
            EdgeWeights::Binary => "binary".into(),
            EdgeWeights::Raw => "raw".into(),
        },
        resolution: cfg.resolution,
        bonferroni: cfg.bonferroni,
        validation_warnings: violations,
        scopes: summaries,
    };
    write_files(
        &input.out,
        &[
            ("summary.json".into(), report::write_json(&summary)?),
            ("summary.csv".into(), report::write_csv(&summary)?),
        ],
    )?;
    Ok(if warnings > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

