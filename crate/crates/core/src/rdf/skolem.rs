use std::collections::{HashMap, HashSet};

use super::{Graph, Iri, Term, Triple};

pub const DEFAULT_BASE: &str = "http://rdfforge.localhost";

/// Replaces blank nodes with IRIs under `<base>/.well-known/genid/`.
#[derive(Debug, Clone)]
pub struct Skolemizer {
    base: String,
    deterministic: bool,
}

impl Default for Skolemizer {
    fn default() -> Self {
        Skolemizer::new(DEFAULT_BASE, false)
    }
}

impl Skolemizer {
    /// With `deterministic` set, labels are numbered in order of first
    /// appearance; otherwise each gets a random UUID.
    pub fn new(base: impl Into<String>, deterministic: bool) -> Self {
        let base = base.into().trim_end_matches('/').to_string();
        Skolemizer { base, deterministic }
    }

    pub fn prefix(&self) -> String {
        format!("{}/.well-known/genid/", self.base)
    }

    /// A fresh IRI for a resource created outside of any input graph.
    pub fn mint(&self) -> Iri {
        Iri::new_unchecked(format!("{}{}", self.prefix(), uuid::Uuid::new_v4()))
    }

    pub fn apply(&self, graph: &Graph) -> Graph {
        if !graph.has_blank_nodes() {
            return graph.clone();
        }
        let taken: HashSet<&str> = graph
            .iter()
            .flat_map(|t| [&t.subject, &t.object])
            .filter_map(|t| t.as_iri().map(Iri::as_str))
            .collect();
        let prefix = self.prefix();
        let mut counter = 0u64;
        let mut mapping: HashMap<String, Iri> = HashMap::new();
        let mut fresh = |label: &str| -> Term {
            let iri = mapping.entry(label.to_string()).or_insert_with(|| {
                if self.deterministic {
                    loop {
                        counter += 1;
                        let candidate = format!("{prefix}{counter}");
                        if !taken.contains(candidate.as_str()) {
                            break Iri::new_unchecked(candidate);
                        }
                    }
                } else {
                    Iri::new_unchecked(format!("{prefix}{}", uuid::Uuid::new_v4()))
                }
            });
            Term::Iri(iri.clone())
        };

        let mut out = Graph::new();
        for (prefix, ns) in graph.prefixes() {
            out.set_prefix(prefix.clone(), ns.clone());
        }
        for t in graph {
            let subject = match &t.subject {
                Term::Blank(label) => fresh(label),
                other => other.clone(),
            };
            let object = match &t.object {
                Term::Blank(label) => fresh(label),
                other => other.clone(),
            };
            out.insert(Triple { subject, predicate: t.predicate.clone(), object });
        }
        out
    }
}

/// Skolemizes with random UUID-based IRIs under the default base.
pub fn skolemize(graph: &Graph) -> Graph {
    Skolemizer::default().apply(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_ntriples;

    #[test]
    fn no_blank_nodes_is_identity() {
        let g = parse_ntriples("<urn:a> <urn:p> <urn:b> .").unwrap();
        let s = skolemize(&g);
        assert_eq!(s, g);
        assert_eq!(s.triples(), g.triples());
    }

    #[test]
    fn same_label_same_iri() {
        let g = parse_ntriples("_:b1 <urn:p> <urn:o> .\n<urn:s> <urn:q> _:b1 .").unwrap();
        let s = skolemize(&g);
        assert!(!s.has_blank_nodes());
        assert_eq!(s.len(), 2);
        assert_eq!(s.triples()[0].subject, s.triples()[1].object);
        assert!(s.triples()[0].subject.as_iri().unwrap().as_str().contains("/.well-known/genid/"));
    }

    #[test]
    fn distinct_labels_distinct_iris() {
        let g = parse_ntriples("_:b1 <urn:p> _:b2 .").unwrap();
        let s = skolemize(&g);
        assert_ne!(s.triples()[0].subject, s.triples()[0].object);
    }

    #[test]
    fn deterministic_numbering_skips_taken_iris() {
        let g = parse_ntriples(
            "_:x <urn:p> <http://b/.well-known/genid/1> .\n_:y <urn:p> _:x .",
        )
        .unwrap();
        let s = Skolemizer::new("http://b/", true).apply(&g);
        let subjects: Vec<_> = s.iter().map(|t| t.subject.as_iri().unwrap().as_str().to_string()).collect();
        assert_eq!(subjects, ["http://b/.well-known/genid/2", "http://b/.well-known/genid/3"]);
        assert_eq!(s.triples()[1].object, s.triples()[0].subject);
    }

    #[test]
    fn idempotent_on_skolemized_graph() {
        let g = parse_ntriples("_:b1 <urn:p> \"v\" .").unwrap();
        let once = Skolemizer::new("urn:x", true).apply(&g);
        let twice = Skolemizer::new("urn:x", true).apply(&once);
        assert_eq!(once.triples(), twice.triples());
    }
}
