//! Graph file formats.
//!
//! * Edge list: first line `n`, then one `u v [mult]` line per edge (1-based,
//!   multiplicity defaults to 1). Blank lines and `#` comments are skipped.
//! * JSON: `{"schema": 1, "n": 6, "edges": [[1, 2, 1], ...]}`. `schema` is
//!   optional on input; a missing multiplicity means 1.
//! * DOT: undirected `graph`, one line per vertex and one line per unit of
//!   edge multiplicity.
//!
//! The readers reject loops. Writers emit loops when the graph has them
//! (inverse graphs).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub n: usize,
    pub edges: Vec<Vec<u64>>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson {
            schema: Some(SCHEMA_VERSION),
            n: g.n(),
            edges: g
                .edges()
                .into_iter()
                .map(|(u, v, m)| vec![u as u64, v as u64, m])
                .collect(),
        }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(json: GraphJson) -> Result<Self> {
        if let Some(s) = json.schema {
            if s != SCHEMA_VERSION {
                return Err(GraphError::Json(format!("unsupported schema version {s}")));
            }
        }
        let mut triples = Vec::with_capacity(json.edges.len());
        for e in &json.edges {
            let (u, v, m) = match e.as_slice() {
                [u, v] => (*u, *v, 1),
                [u, v, m] => (*u, *v, *m),
                _ => return Err(GraphError::Json(format!("edge {e:?} must have 2 or 3 entries"))),
            };
            triples.push((u as usize, v as usize, m));
        }
        Graph::from_edges(json.n, &triples)
    }
}

pub fn to_json_value(g: &Graph) -> serde_json::Value {
    serde_json::to_value(GraphJson::from(g)).expect("graph JSON serializes")
}

pub fn to_json(g: &Graph) -> String {
    serde_json::to_string(&GraphJson::from(g)).expect("graph JSON serializes")
}

pub fn from_json(text: &str) -> Result<Graph> {
    let json: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
    Graph::try_from(json)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing vertex count".into(),
    })?;
    let n: usize = header.parse().map_err(|_| GraphError::Parse {
        line: first,
        msg: format!("bad vertex count {header:?}"),
    })?;
    let mut g = Graph::empty(n);
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<u64>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("bad number {s:?}"),
            })
        };
        let (u, v, m) = match fields.as_slice() {
            [u, v] => (parse(u)?, parse(v)?, 1),
            [u, v, m] => (parse(u)?, parse(v)?, parse(m)?),
            _ => {
                return Err(GraphError::Parse {
                    line,
                    msg: "expected `u v [mult]`".into(),
                })
            }
        };
        g.add_edge(u as usize, v as usize, m)?;
    }
    Ok(g)
}

pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n());
    for (u, v, m) in g.edges() {
        if m == 1 {
            let _ = writeln!(out, "{u} {v}");
        } else {
            let _ = writeln!(out, "{u} {v} {m}");
        }
    }
    out
}

/// Reads either format; JSON is recognised by a leading `{`.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        parse_edge_list(text)
    }
}

pub fn to_dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for v in 1..=g.n() {
        let _ = writeln!(out, "  {v};");
    }
    for (u, v, m) in g.edges() {
        for _ in 0..m {
            let _ = writeln!(out, "  {u} -- {v};");
        }
    }
    out.push_str("}\n");
    out
}

/// Reads back the DOT subset produced by [`to_dot`].
pub fn parse_dot(text: &str) -> Result<Graph> {
    let mut vertices = 0usize;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim().trim_end_matches(';').trim();
        if line.is_empty() || line.starts_with("graph") || line == "}" {
            continue;
        }
        let bad = || GraphError::Parse {
            line: i + 1,
            msg: format!("unexpected DOT statement {raw:?}"),
        };
        if let Some((u, v)) = line.split_once("--") {
            let u: usize = u.trim().parse().map_err(|_| bad())?;
            let v: usize = v.trim().parse().map_err(|_| bad())?;
            vertices = vertices.max(u).max(v);
            edges.push((u, v, 1));
        } else {
            let v: usize = line.parse().map_err(|_| bad())?;
            vertices = vertices.max(v);
        }
    }
    Graph::from_edges(vertices, &edges)
}
