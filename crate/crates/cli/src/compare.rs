use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use rankgroup::community::{read_groups_csv, Classification, NamedClassification};
use rankgroup::concordance::{concordance_matrix, stars, top_group, w_distribution, write_distribution_csv};
use rankgroup::ingest::Dataset;
use rankgroup::pairstats::all_pairs;
use rankgroup::pajek::bundle_names;

use crate::analyze::{analyze_scope, prepare};
use crate::{load, scopes, write_files, InputArgs, RunConfig};

fn file_root(scope: &str, slugify: bool) -> String {
    bundle_names(scope, slugify).clu.trim_end_matches(".clu").to_string()
}

type Aligned = (Vec<String>, Vec<(String, Classification)>);

/// Reorders every classification onto the node order of the first one.
fn align(items: Vec<NamedClassification>) -> anyhow::Result<Aligned> {
    let Some(first) = items.first() else {
        bail!("no classifications to compare");
    };
    let nodes = first.nodes.clone();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::new();
    for item in items {
        let position: HashMap<&str, usize> = item.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        if position.len() != nodes.len() || nodes.iter().any(|n| !position.contains_key(n.as_str())) {
            bail!("classification {:?} does not cover the same universities", item.name);
        }
        let groups: Vec<u32> = nodes
            .iter()
            .map(|n| item.classification.labels[position[n.as_str()]])
            .collect();
        let c = &item.classification;
        let aligned = Classification::from_groups(&groups, c.q, c.method, c.seed);
        let count = seen.entry(item.name.clone()).or_default();
        *count += 1;
        let name = if *count == 1 {
            item.name
        } else {
            format!("{}#{}", item.name, count)
        };
        out.push((name, aligned));
    }
    Ok((nodes, out))
}

fn toplists_csv(methods: &[(String, Classification)], ds: &Dataset) -> anyhow::Result<Vec<u8>> {
    let lists: Vec<Vec<String>> = methods
        .iter()
        .map(|(_, c)| top_group(c, ds))
        .collect::<Result<_, _>>()?;
    let depth = lists.iter().map(Vec::len).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(methods.iter().map(|(m, _)| m.as_str()))?;
    for row in 0..depth {
        w.write_record(lists.iter().map(|l| l.get(row).map_or("", String::as_str)))?;
    }
    Ok(w.into_inner()?)
}

fn print_matrix(scope: &str, methods: &[(String, Classification)]) -> anyhow::Result<Vec<u8>> {
    let m = concordance_matrix(methods)?;
    println!("{scope} (n = {})", m.n);
    for (i, a) in m.methods.iter().enumerate() {
        let cells: Vec<String> = (0..m.methods.len())
            .map(|j| {
                let mark = if i == j { "" } else { stars(m.p_value[i][j]) };
                format!("{:.3}{mark}", m.v[i][j])
            })
            .collect();
        println!("  {a:<20} {}", cells.join("  "));
    }
    let mut buf = Vec::new();
    m.write_csv(&mut buf)?;
    Ok(buf)
}

/// Dataset rows in `nodes` order, for top lists of external groupings.
fn records_for(nodes: &[String], ds: &Dataset) -> anyhow::Result<Dataset> {
    let by_name: BTreeMap<&str, usize> = ds
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.university.as_str(), i))
        .collect();
    let mut records = Vec::with_capacity(nodes.len());
    for n in nodes {
        let Some(&i) = by_name.get(n.as_str()) else {
            bail!("university {n:?} is not in the input table");
        };
        records.push(ds.records[i].clone());
    }
    Ok(Dataset::new(records, ds.source.clone()))
}

fn read_classifications(paths: &[PathBuf]) -> anyhow::Result<Vec<NamedClassification>> {
    let mut items = Vec::new();
    for path in paths {
        let stem = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("groups");
        let file = File::open(path).with_context(|| format!("reading {}", path.display()))?;
        items.extend(read_groups_csv(file, stem)?);
    }
    Ok(items)
}

pub fn run_compare(input: &InputArgs, cfg: &RunConfig, classifications: &[PathBuf]) -> anyhow::Result<ExitCode> {
    if !classifications.is_empty() {
        let (nodes, methods) = align(read_classifications(classifications)?)?;
        if methods.len() < 2 {
            bail!("need at least two classifications, found {}", methods.len());
        }
        let mut files = vec![("concordance.csv".to_string(), print_matrix("input", &methods)?)];
        let ds = load(input)?;
        files.push(("toplists.csv".into(), toplists_csv(&methods, &records_for(&nodes, &ds)?)?));
        write_files(&input.out, &files)?;
        return Ok(ExitCode::SUCCESS);
    }

    let (ds, _) = prepare(input, cfg)?;
    for (scope, slice) in scopes(&ds, input)? {
        let result = analyze_scope(&scope, &slice, cfg)?;
        let methods: Vec<(String, Classification)> = result
            .methods
            .into_iter()
            .map(|m| (m.name, m.classification))
            .collect();
        if methods.len() < 2 {
            bail!("{scope}: need at least two classifications, found {}", methods.len());
        }
        let root = file_root(&scope, input.slugify);
        let files = [
            (format!("{root}_concordance.csv"), print_matrix(&scope, &methods)?),
            (format!("{root}_toplists.csv"), toplists_csv(&methods, &slice)?),
        ];
        write_files(&input.out, &files)?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn run_distribution(input: &InputArgs) -> anyhow::Result<ExitCode> {
    let ds = load(input)?;
    for (scope, slice) in scopes(&ds, input)? {
        let curve = w_distribution(&all_pairs(&slice));
        let mut buf = Vec::new();
        write_distribution_csv(&curve, &mut buf)?;
        let name = format!("{}_wdist.csv", file_root(&scope, input.slugify));
        println!("{scope}: {} pairs", curve.len());
        write_files(&input.out, &[(name, buf)])?;
    }
    Ok(ExitCode::SUCCESS)
}
