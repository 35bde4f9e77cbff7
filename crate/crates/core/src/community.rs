//! Decomposing indistinguishability networks into groups.
//!
//! Two decompositions are offered: connected ("weak") components, and
//! Louvain modularity optimization. Both report Newman–Girvan modularity
//!
//! ```text
//! Q = 1/(2m) · Σ_ij [A_ij − γ·k_i·k_j/(2m)] · δ(c_i, c_j)
//! ```
//!
//! for their partition, with γ = 1 unless a resolution is given.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::netbuild::{EdgeWeights, StatNetwork};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Components,
    Louvain,
    External,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Components => "components",
            Method::Louvain => "louvain",
            Method::External => "external",
        })
    }
}

impl Method {
    fn parse(raw: &str) -> Self {
        match raw.trim().to_ascii_lowercase().as_str() {
            "components" => Method::Components,
            "louvain" => Method::Louvain,
            _ => Method::External,
        }
    }
}

/// A partition of a network's vertices. Group ids are dense, starting at 1,
/// and numbered by first appearance in vertex order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub labels: Vec<u32>,
    pub q: f64,
    pub method: Method,
    pub seed: Option<u64>,
}

impl Classification {
    /// Renumbers arbitrary group keys densely by first appearance.
    pub fn from_groups<K: Ord + Clone>(groups: &[K], q: f64, method: Method, seed: Option<u64>) -> Self {
        let mut ids: BTreeMap<K, u32> = BTreeMap::new();
        let labels = groups
            .iter()
            .map(|k| {
                let next = ids.len() as u32 + 1;
                *ids.entry(k.clone()).or_insert(next)
            })
            .collect();
        Classification {
            labels,
            q,
            method,
            seed,
        }
    }

    pub fn group_count(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Vertex indices per group; index 0 holds group 1.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.group_count()];
        for (v, &g) in self.labels.iter().enumerate() {
            out[g as usize - 1].push(v);
        }
        out
    }
}

/// Symmetric weighted adjacency with an explicit diagonal. Off-diagonal
/// entries appear in both endpoint lists.
#[derive(Debug, Clone)]
struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    degree: Vec<f64>,
    /// Σ k_i = 2m.
    total: f64,
}

impl Graph {
    fn from_network(network: &StatNetwork, weights: EdgeWeights) -> Self {
        let n = network.node_count();
        let mut adj = vec![Vec::new(); n];
        for e in &network.edges {
            let w = network.weight(e, weights);
            adj[e.source].push((e.target, w));
            adj[e.target].push((e.source, w));
        }
        Graph::new(adj, vec![0.0; n])
    }

    fn new(adj: Vec<Vec<(usize, f64)>>, diag: Vec<f64>) -> Self {
        let degree: Vec<f64> = adj
            .iter()
            .zip(&diag)
            .map(|(row, d)| d + row.iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        let total = degree.iter().sum();
        Graph {
            adj,
            diag,
            degree,
            total,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, community: &[usize], resolution: f64) -> f64 {
        if self.total <= 0.0 {
            return 0.0;
        }
        let k = community.iter().copied().max().map_or(0, |c| c + 1);
        let mut inside = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for i in 0..self.len() {
            let c = community[i];
            tot[c] += self.degree[i];
            inside[c] += self.diag[i];
            for &(j, w) in &self.adj[i] {
                if community[j] == c {
                    inside[c] += w;
                }
            }
        }
        inside
            .iter()
            .zip(&tot)
            .map(|(&a, &t)| a / self.total - resolution * (t / self.total).powi(2))
            .sum()
    }

    /// Collapses each community into one vertex.
    fn aggregate(&self, community: &[usize], count: usize) -> Graph {
        let mut diag = vec![0.0; count];
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
        for i in 0..self.len() {
            let c = community[i];
            diag[c] += self.diag[i];
            for &(j, w) in &self.adj[i] {
                let d = community[j];
                if c == d {
                    diag[c] += w;
                } else {
                    *rows[c].entry(d).or_insert(0.0) += w;
                }
            }
        }
        let adj = rows.into_iter().map(|r| r.into_iter().collect()).collect();
        Graph::new(adj, diag)
    }
}

/// Renumbers community ids densely in order of first appearance.
fn compact(community: &mut [usize]) -> usize {
    let size = community.iter().copied().max().map_or(0, |m| m + 1);
    let mut map = vec![usize::MAX; size];
    let mut next = 0;
    for c in community.iter_mut() {
        if map[*c] == usize::MAX {
            map[*c] = next;
            next += 1;
        }
        *c = map[*c];
    }
    next
}

const GAIN_EPS: f64 = 1e-12;

/// Local moving phase. Returns the compacted communities, their count and
/// whether any vertex moved.
fn local_moves(graph: &Graph, resolution: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, usize, bool) {
    let n = graph.len();
    let mut community: Vec<usize> = (0..n).collect();
    let mut tot = graph.degree.clone();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }

    let mut links = vec![0.0; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;
    loop {
        let mut moves = 0;
        for &i in &order {
            let own = community[i];
            let ki = graph.degree[i];
            touched.clear();
            for &(j, w) in &graph.adj[i] {
                let c = community[j];
                if !seen[c] {
                    seen[c] = true;
                    touched.push(c);
                }
                links[c] += w;
            }
            tot[own] -= ki;
            let gain = |c: usize, links: &[f64]| links[c] - resolution * tot[c] * ki / graph.total;

            let mut best = own;
            let mut best_gain = gain(own, &links);
            touched.sort_unstable();
            for &c in &touched {
                let g = gain(c, &links);
                if c != own && g > best_gain + GAIN_EPS {
                    best = c;
                    best_gain = g;
                }
            }
            for &c in &touched {
                links[c] = 0.0;
                seen[c] = false;
            }
            tot[best] += ki;
            if best != own {
                community[i] = best;
                moves += 1;
            }
        }
        if moves == 0 {
            break;
        }
        moved_any = true;
    }
    let count = compact(&mut community);
    (community, count, moved_any)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LouvainConfig {
    pub seed: u64,
    pub resolution: f64,
    pub weights: EdgeWeights,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig {
            seed: 0,
            resolution: 1.0,
            weights: EdgeWeights::Binary,
        }
    }
}

/// Louvain modularity optimization: local moves from singletons, then
/// aggregation of communities into vertices, repeated until a level makes
/// no move. The visit order of each level is shuffled by a generator seeded
/// with `config.seed`; among equally good target communities the lowest id
/// wins.
pub fn louvain(network: &StatNetwork, config: &LouvainConfig) -> Classification {
    let base = Graph::from_network(network, config.weights);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut membership: Vec<usize> = (0..base.len()).collect();
    let mut graph = base.clone();
    if base.total > 0.0 {
        loop {
            let (community, count, moved) = local_moves(&graph, config.resolution, &mut rng);
            for m in membership.iter_mut() {
                *m = community[*m];
            }
            if !moved {
                break;
            }
            graph = graph.aggregate(&community, count);
        }
    }
    compact(&mut membership);
    let q = base.modularity(&membership, config.resolution);
    Classification::from_groups(&membership, q, Method::Louvain, Some(config.seed))
}

/// Connected components, ignoring edge values.
pub fn weak_components(network: &StatNetwork, weights: EdgeWeights) -> Classification {
    let n = network.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &network.edges {
        let (a, b) = (find(&mut parent, e.source), find(&mut parent, e.target));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let roots: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    let mut c = Classification::from_groups(&roots, 0.0, Method::Components, None);
    c.q = modularity(network, &c.labels, weights);
    c
}

/// Newman–Girvan modularity of `labels` on `network` (resolution 1).
/// Networks without links have Q = 0.
pub fn modularity(network: &StatNetwork, labels: &[u32], weights: EdgeWeights) -> f64 {
    modularity_with_resolution(network, labels, weights, 1.0)
}

pub fn modularity_with_resolution(
    network: &StatNetwork,
    labels: &[u32],
    weights: EdgeWeights,
    resolution: f64,
) -> f64 {
    assert_eq!(labels.len(), network.node_count(), "labels must cover every vertex");
    let graph = Graph::from_network(network, weights);
    let mut community: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
    compact(&mut community);
    graph.modularity(&community, resolution)
}

/// Vertices without links.
pub fn isolates(network: &StatNetwork) -> Vec<String> {
    network
        .degrees()
        .iter()
        .zip(&network.nodes)
        .filter(|(&d, _)| d == 0)
        .map(|(_, name)| name.clone())
        .collect()
}

/// One named classification over a list of universities.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedClassification {
    pub name: String,
    pub nodes: Vec<String>,
    pub classification: Classification,
}

/// Long-format export: `university,group,q,method,seed,classification`.
pub fn write_groups_csv<W: Write>(out: W, items: &[NamedClassification]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["university", "group", "q", "method", "seed", "classification"])?;
    for item in items {
        let c = &item.classification;
        for (node, group) in item.nodes.iter().zip(&c.labels) {
            w.write_record([
                node.clone(),
                group.to_string(),
                c.q.to_string(),
                c.method.to_string(),
                c.seed.map(|s| s.to_string()).unwrap_or_default(),
                item.name.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads [`write_groups_csv`] output, or any CSV with `university` and
/// `group` columns. Rows are split by the `classification` column when
/// present.
pub fn read_groups_csv<R: Read>(input: R, default_name: &str) -> Result<Vec<NamedClassification>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let uni = find("university").ok_or(Error::MissingColumn("university"))?;
    let grp = find("group").ok_or(Error::MissingColumn("group"))?;
    let (q_col, method_col, seed_col, name_col) =
        (find("q"), find("method"), find("seed"), find("classification"));

    struct Acc {
        nodes: Vec<String>,
        groups: Vec<String>,
        q: f64,
        method: Method,
        seed: Option<u64>,
    }
    let mut order: Vec<String> = Vec::new();
    let mut acc: BTreeMap<String, Acc> = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let get = |c: Option<usize>| c.and_then(|c| row.get(c)).unwrap_or("");
        let name = match get(name_col) {
            "" => default_name.to_string(),
            s => s.to_string(),
        };
        let entry = acc.entry(name.clone()).or_insert_with(|| {
            order.push(name.clone());
            Acc {
                nodes: Vec::new(),
                groups: Vec::new(),
                q: get(q_col).parse().unwrap_or(f64::NAN),
                method: Method::parse(get(method_col)),
                seed: get(seed_col).parse().ok(),
            }
        });
        let group = get(Some(grp));
        if group.is_empty() {
            return Err(Error::Parse {
                line: i + 2,
                message: "empty group".into(),
            });
        }
        entry.nodes.push(get(Some(uni)).to_string());
        entry.groups.push(group.to_string());
    }
    Ok(order
        .into_iter()
        .map(|name| {
            let a = acc.remove(&name).expect("accumulated");
            // Numeric group keys keep their numeric order.
            let keys: Vec<(u64, String)> = a
                .groups
                .iter()
                .map(|g| (g.parse().unwrap_or(u64::MAX), g.clone()))
                .collect();
            NamedClassification {
                name,
                nodes: a.nodes,
                classification: Classification::from_groups(&keys, a.q, a.method, a.seed),
            }
        })
        .collect())
}
