//! Indistinguishability networks.
//!
//! Universities are vertices. A link means the criterion could not tell two
//! universities apart: `|z|` below a critical value, any Cohen's w (to be
//! thresholded later), or overlapping stability intervals (value 1, or 2
//! when one interval contains the other).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ingest::Dataset;
use crate::pairstats::{z_baseline, OverlapClass, PairResult, BASELINE_SHARE};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Z,
    W,
    Overlap,
    /// Read from a file; the value semantics are unknown.
    External,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Z => "z",
            Criterion::W => "w",
            Criterion::Overlap => "overlap",
            Criterion::External => "external",
        })
    }
}

/// How edge values enter modularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeWeights {
    /// Every link counts 1. Small z and w values mean *more* similar, so
    /// using them as weights would invert the similarity.
    #[default]
    Binary,
    Raw,
}

/// Undirected edge between 0-based vertices, `source < target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineAnnotations {
    /// z of each university against the 10% expectation.
    pub z: Vec<f64>,
    /// `max(0, z)`, for network tools that only handle positive sizes.
    pub vector: Vec<f64>,
    /// 2 where z > 0, otherwise 1.
    pub partition: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatNetwork {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub criterion: Criterion,
    pub baseline: Option<BaselineAnnotations>,
}

impl StatNetwork {
    /// Builds a network from arbitrary edges: endpoints are ordered,
    /// self-loops dropped and duplicate pairs merged keeping the larger
    /// value. Edges come out sorted.
    pub fn from_edges(
        nodes: Vec<String>,
        edges: impl IntoIterator<Item = Edge>,
        criterion: Criterion,
    ) -> Self {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .filter(|e| e.source != e.target)
            .map(|e| Edge {
                source: e.source.min(e.target),
                target: e.source.max(e.target),
                value: e.value,
            })
            .collect();
        edges.sort_by(|a, b| {
            (a.source, a.target)
                .cmp(&(b.source, b.target))
                .then(b.value.total_cmp(&a.value))
        });
        edges.dedup_by(|later, first| later.source == first.source && later.target == first.target);
        StatNetwork {
            nodes,
            edges,
            criterion,
            baseline: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.source] += 1;
            deg[e.target] += 1;
        }
        deg
    }

    pub fn weight(&self, edge: &Edge, mode: EdgeWeights) -> f64 {
        match mode {
            EdgeWeights::Binary => 1.0,
            EdgeWeights::Raw => edge.value,
        }
    }

    pub fn edge_set(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.source, e.target)).collect()
    }
}

/// Per-university z against the 10% expectation, clamped vector and sign
/// partition. Records without a usable size get z = 0.
pub fn baseline_annotations(dataset: &Dataset) -> BaselineAnnotations {
    let z: Vec<f64> = dataset
        .records
        .iter()
        .map(|r| z_baseline(r.p, r.pp_top10, BASELINE_SHARE).unwrap_or(0.0))
        .collect();
    let vector = z.iter().map(|&z| z.max(0.0)).collect();
    let partition = z.iter().map(|&z| if z > 0.0 { 2 } else { 1 }).collect();
    BaselineAnnotations { z, vector, partition }
}

fn build(
    pairs: &[PairResult],
    dataset: &Dataset,
    criterion: Criterion,
    mut value: impl FnMut(&PairResult) -> Option<f64>,
) -> StatNetwork {
    let edges = pairs.iter().filter_map(|p| {
        value(p).map(|v| Edge {
            source: p.u_index,
            target: p.v_index,
            value: v,
        })
    });
    let mut net = StatNetwork::from_edges(dataset.labels(), edges.collect::<Vec<_>>(), criterion);
    net.baseline = Some(baseline_annotations(dataset));
    net
}

/// Links pairs whose `|z|` stays strictly below `z_max`.
pub fn build_z_network(pairs: &[PairResult], dataset: &Dataset, z_max: f64) -> StatNetwork {
    build(pairs, dataset, Criterion::Z, |p| {
        (p.is_valid() && p.abs_z() < z_max).then(|| p.abs_z())
    })
}

/// Complete graph valued by Cohen's w.
pub fn build_w_network(pairs: &[PairResult], dataset: &Dataset) -> StatNetwork {
    build(pairs, dataset, Criterion::W, |p| p.is_valid().then_some(p.w))
}

/// 2 for containment, 1 for intersection, no link otherwise.
pub fn build_overlap_network(pairs: &[PairResult], dataset: &Dataset) -> Result<StatNetwork> {
    if let Some(r) = dataset.records.iter().find(|r| r.interval().is_none()) {
        return Err(Error::MissingBounds(r.university.clone()));
    }
    Ok(build(pairs, dataset, Criterion::Overlap, |p| match p.overlap {
        Some(OverlapClass::Strong) => Some(2.0),
        Some(OverlapClass::Weak) => Some(1.0),
        _ => None,
    }))
}

/// Drops links with value above `max_value`.
pub fn filter_edges(network: &StatNetwork, max_value: f64) -> StatNetwork {
    StatNetwork {
        edges: network
            .edges
            .iter()
            .filter(|e| e.value <= max_value)
            .copied()
            .collect(),
        ..network.clone()
    }
}
