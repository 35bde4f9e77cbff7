//! Pajek `.net`, `.vec` and `.clu` files.
//!
//! Output is canonical: `*Vertices N`, one `i "label"` line per vertex
//! (1-based), `*Edges`, then one `i j value` line per edge. Numbers carry at
//! most six significant digits, never use exponent notation, and drop
//! trailing zeros. Files are UTF-8 with `\n` line endings.

use std::fs;
use std::path::Path;

use crate::netbuild::{Criterion, Edge, StatNetwork};
use crate::{Error, Result};

/// Formats `value` with up to six significant digits and no exponent.
pub fn format_number(value: f64) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    if value == 0.0 {
        return "0".into();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{value:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn quote(label: &str) -> String {
    // Pajek has no escape for quotes inside labels.
    format!("\"{}\"", label.replace('"', "'"))
}

/// Serializes `network` as a `.net` document.
pub fn render_net(network: &StatNetwork) -> String {
    let mut out = format!("*Vertices {}\n", network.node_count());
    for (i, label) in network.nodes.iter().enumerate() {
        out.push_str(&format!("{} {}\n", i + 1, quote(label)));
    }
    out.push_str("*Edges\n");
    for e in &network.edges {
        out.push_str(&format!("{} {} {}\n", e.source + 1, e.target + 1, format_number(e.value)));
    }
    out
}

pub fn write_net(network: &StatNetwork, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, render_net(network))?;
    Ok(())
}

pub fn render_vec(values: &[f64]) -> Result<String> {
    if let Some((vertex, &value)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeVector { vertex: vertex + 1, value });
    }
    let mut out = format!("*Vertices {}\n", values.len());
    for &v in values {
        out.push_str(&format_number(v));
        out.push('\n');
    }
    Ok(out)
}

/// Writes a vector file. `vertex_count` guards against writing a vector
/// that does not belong to the network next to it.
pub fn write_vec(values: &[f64], vertex_count: usize, path: impl AsRef<Path>) -> Result<()> {
    if values.len() != vertex_count {
        return Err(Error::LengthMismatch {
            expected: vertex_count,
            found: values.len(),
        });
    }
    fs::write(path, render_vec(values)?)?;
    Ok(())
}

pub fn render_clu(classes: &[u32]) -> String {
    let mut out = format!("*Vertices {}\n", classes.len());
    for c in classes {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

pub fn write_clu(classes: &[u32], vertex_count: usize, path: impl AsRef<Path>) -> Result<()> {
    if classes.len() != vertex_count {
        return Err(Error::LengthMismatch {
            expected: vertex_count,
            found: classes.len(),
        });
    }
    fs::write(path, render_clu(classes))?;
    Ok(())
}

pub fn read_net(path: impl AsRef<Path>) -> Result<StatNetwork> {
    parse_net(&fs::read_to_string(path)?)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Vertices,
    Lines,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits a vertex line into its id and label. The label may be quoted;
/// anything after it (coordinates, shapes) is ignored.
fn parse_vertex(text: &str, line: usize) -> Result<(usize, String)> {
    let text = text.trim();
    let split = text.find(char::is_whitespace).unwrap_or(text.len());
    let id: usize = text[..split]
        .parse()
        .map_err(|_| parse_err(line, format!("bad vertex id in `{text}`")))?;
    let rest = text[split..].trim_start();
    let label = if let Some(stripped) = rest.strip_prefix('"') {
        let end = stripped
            .find('"')
            .ok_or_else(|| parse_err(line, "unterminated vertex label"))?;
        stripped[..end].to_string()
    } else {
        rest.split_whitespace().next().unwrap_or("").to_string()
    };
    Ok((id, label))
}

/// Parses a `.net` document. `*Arcs` are folded into undirected edges
/// keeping the larger value per vertex pair; missing values default to 1.
pub fn parse_net(text: &str) -> Result<StatNetwork> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut section = Section::Preamble;
    let mut declared: Option<usize> = None;
    let mut nodes: Vec<String> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('*') {
            let mut parts = trimmed.split_whitespace();
            let keyword = parts.next().unwrap_or("").to_ascii_lowercase();
            match keyword.as_str() {
                "*vertices" => {
                    let n: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err(line, "`*Vertices` needs a count"))?;
                    declared = Some(n);
                    nodes = (1..=n).map(|i| i.to_string()).collect();
                    section = Section::Vertices;
                }
                "*edges" | "*arcs" => {
                    if declared.is_none() {
                        return Err(parse_err(line, "links before `*Vertices`"));
                    }
                    section = Section::Lines;
                }
                other => return Err(parse_err(line, format!("unsupported section `{other}`"))),
            }
            continue;
        }
        match section {
            Section::Preamble => return Err(parse_err(line, "content before `*Vertices`")),
            Section::Vertices => {
                let (id, label) = parse_vertex(trimmed, line)?;
                let n = declared.unwrap_or(0);
                if id == 0 || id > n {
                    return Err(parse_err(line, format!("vertex {id} outside 1..={n}")));
                }
                nodes[id - 1] = label;
            }
            Section::Lines => {
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() < 2 {
                    return Err(parse_err(line, "link needs two endpoints"));
                }
                let n = declared.unwrap_or(0);
                let endpoint = |s: &str| -> Result<usize> {
                    match s.parse::<usize>() {
                        Ok(v) if v >= 1 && v <= n => Ok(v - 1),
                        _ => Err(parse_err(line, format!("bad endpoint `{s}`"))),
                    }
                };
                let (a, b) = (endpoint(fields[0])?, endpoint(fields[1])?);
                let value = match fields.get(2) {
                    Some(s) => s
                        .parse::<f64>()
                        .map_err(|_| parse_err(line, format!("bad link value `{s}`")))?,
                    None => 1.0,
                };
                edges.push(Edge { source: a, target: b, value });
            }
        }
    }

    match (declared, section) {
        (None, _) => Err(parse_err(last_line.max(1), "missing `*Vertices`")),
        (Some(_), Section::Vertices) => Err(parse_err(last_line, "file ends before the link section")),
        _ => Ok(StatNetwork::from_edges(nodes, edges, Criterion::External)),
    }
}

/// Whole-dataset networks use this scope name.
pub const WORLD: &str = "world";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleNames {
    pub z_net: String,
    pub w_net: String,
    pub overlap_net: String,
    pub vec: String,
    pub clu: String,
}

impl BundleNames {
    pub fn net_for(&self, criterion: Criterion) -> &str {
        match criterion {
            Criterion::W => &self.w_net,
            Criterion::Overlap => &self.overlap_net,
            Criterion::Z | Criterion::External => &self.z_net,
        }
    }
}

/// File names for one scope: `<Scope>.net`, `<Scope>_w.net`,
/// `<Scope>_o.net`, `<Scope>.vec`, `<Scope>.clu`. With `slugify`, spaces
/// become underscores.
pub fn bundle_names(scope: &str, slugify: bool) -> BundleNames {
    let root = if slugify {
        scope.split_whitespace().collect::<Vec<_>>().join("_")
    } else {
        scope.to_string()
    };
    BundleNames {
        z_net: format!("{root}.net"),
        w_net: format!("{root}_w.net"),
        overlap_net: format!("{root}_o.net"),
        vec: format!("{root}.vec"),
        clu: format!("{root}.clu"),
    }
}
