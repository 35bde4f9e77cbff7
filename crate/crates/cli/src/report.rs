use serde::Serialize;

/// One partition of one network.
#[derive(Debug, Clone, Serialize)]
pub struct ClassRow {
    pub name: String,
    pub criterion: String,
    /// Effective cut-off, after any Bonferroni adjustment.
    pub threshold: Option<f64>,
    pub method: String,
    pub edges: usize,
    pub groups: usize,
    pub q: f64,
    pub isolates: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScopeSummary {
    pub scope: String,
    pub universities: usize,
    pub pairs: usize,
    pub flagged_pairs: usize,
    pub resampled_bounds: usize,
    pub notes: Vec<String>,
    pub files: Vec<String>,
    pub classifications: Vec<ClassRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub input: String,
    pub rng: &'static str,
    pub seed: u64,
    pub bootstrap_replicates: usize,
    pub coverage: f64,
    pub edge_weights: String,
    pub resolution: f64,
    pub bonferroni: bool,
    pub validation_warnings: usize,
    pub scopes: Vec<ScopeSummary>,
}

pub fn write_json(summary: &RunSummary) -> anyhow::Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(summary)?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_csv(summary: &RunSummary) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scope",
        "classification",
        "criterion",
        "threshold",
        "method",
        "universities",
        "edges",
        "pairs",
        "groups",
        "q",
        "isolates",
        "notes",
    ])?;
    for s in &summary.scopes {
        let notes = s.notes.join("; ");
        if s.classifications.is_empty() {
            let (n, pairs) = (s.universities.to_string(), s.pairs.to_string());
            w.write_record([&s.scope, "", "", "", "", &n, "0", &pairs, "", "", "", &notes])?;
        }
        for c in &s.classifications {
            w.write_record([
                s.scope.clone(),
                c.name.clone(),
                c.criterion.clone(),
                c.threshold.map(|t| t.to_string()).unwrap_or_default(),
                c.method.clone(),
                s.universities.to_string(),
                c.edges.to_string(),
                s.pairs.to_string(),
                c.groups.to_string(),
                c.q.to_string(),
                c.isolates.join("; "),
                notes.clone(),
            ])?;
        }
    }
    Ok(w.into_inner()?)
}
