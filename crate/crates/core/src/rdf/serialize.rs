use std::fmt::Write;

use super::{Graph, Term};
use crate::vocab;

/// Writes `graph` as Turtle: prefix declarations followed by one subject
/// block per run of triples sharing a subject. IRIs are written in full.
pub fn to_turtle(graph: &Graph) -> String {
    let mut out = String::new();
    for (prefix, ns) in graph.prefixes() {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    if !graph.prefixes().is_empty() {
        out.push('\n');
    }
    let mut current: Option<&Term> = None;
    for t in graph {
        if current == Some(&t.subject) {
            out.push_str(" ;\n    ");
        } else {
            if current.is_some() {
                out.push_str(" .\n");
            }
            let _ = write!(out, "{} ", t.subject);
            current = Some(&t.subject);
        }
        if t.predicate.as_str() == vocab::RDF_TYPE {
            out.push('a');
        } else {
            let _ = write!(out, "{}", t.predicate);
        }
        let _ = write!(out, " {}", t.object);
    }
    if current.is_some() {
        out.push_str(" .\n");
    }
    out
}
