//! Line-oriented text format.
//!
//! ```text
//! # theta graph
//! v 0
//! v 1
//! e 0 0 1 1/1
//! e 1 0 1 1/2
//! e 2 1 0 0.75
//! ```
//!
//! Lengths may be given as `p/q`, integers or finite decimals; they are always
//! emitted as reduced `p/q`.

use std::fmt::Write;

use super::{EdgeId, GraphError, MetricGraph, VertexId};
use crate::scalar::{format_rational, parse_rational, Scalar};

pub fn parse_graph<T: Scalar>(text: &str) -> Result<MetricGraph<T>, GraphError> {
    let mut g = MetricGraph::new();
    let mut pending = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let err = |message: String| GraphError::Parse { line, message };
        let id = |s: &str| s.parse::<u32>().map_err(|_| err(format!("bad id `{s}`")));
        match fields.as_slice() {
            ["v", v] => g.add_vertex(VertexId(id(v)?)).map_err(|e| err(e.to_string()))?,
            ["e", e, u, w, len] => {
                let length = parse_rational(len).ok_or_else(|| err(format!("bad length `{len}`")))?;
                pending.push((line, EdgeId(id(e)?), VertexId(id(u)?), VertexId(id(w)?), length));
            }
            _ => return Err(err(format!("unrecognized record `{content}`"))),
        }
    }
    for (line, e, u, w, length) in pending {
        g.add_edge(e, u, w, T::from_rational(&length))
            .map_err(|err| GraphError::Parse { line, message: err.to_string() })?;
    }
    Ok(g)
}

/// Normalized rendering: vertices then edges, both in id order.
pub fn emit_graph<T: Scalar>(g: &MetricGraph<T>) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        writeln!(out, "v {v}").expect("string write");
    }
    for e in g.edges() {
        writeln!(out, "e {} {} {} {}", e.id, e.ends.0, e.ends.1, format_rational(&e.length.to_rational()))
            .expect("string write");
    }
    out
}
