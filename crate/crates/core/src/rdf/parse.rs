use std::path::Path;

use oxrdf::{NamedOrBlankNode, Term as OxTerm};
use oxttl::{NTriplesParser, TurtleParser, TurtleSyntaxError};

use super::{Graph, Iri, Literal, Term, Triple};
use crate::vocab;

/// Input serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Syntax {
    NTriples,
    Turtle,
}

impl Syntax {
    /// `.nt` is N-Triples, everything else is read as Turtle.
    pub fn from_path(path: &Path) -> Syntax {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("nt") => Syntax::NTriples,
            _ => Syntax::Turtle,
        }
    }

    pub fn parse(self, text: &str) -> Result<Graph, ParseError> {
        match self {
            Syntax::NTriples => parse_ntriples(text),
            Syntax::Turtle => parse_turtle(text),
        }
    }
}

/// Syntax error. `line` and `column` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: u64,
    pub column: u64,
    pub message: String,
}

impl From<TurtleSyntaxError> for ParseError {
    fn from(err: TurtleSyntaxError) -> Self {
        let start = err.location().start;
        ParseError {
            line: start.line + 1,
            column: start.column + 1,
            message: err.message().to_string(),
        }
    }
}

pub fn parse_ntriples(text: &str) -> Result<Graph, ParseError> {
    let mut graph = Graph::new();
    for triple in NTriplesParser::new().for_slice(text) {
        graph.insert(convert(triple?));
    }
    Ok(graph)
}

pub fn parse_turtle(text: &str) -> Result<Graph, ParseError> {
    let mut graph = Graph::new();
    let mut parser = TurtleParser::new().for_slice(text);
    for triple in parser.by_ref() {
        graph.insert(convert(triple?));
    }
    for (prefix, namespace) in parser.prefixes() {
        graph.set_prefix(prefix, namespace);
    }
    Ok(graph)
}

fn convert(triple: oxrdf::Triple) -> Triple {
    let subject = match triple.subject {
        NamedOrBlankNode::NamedNode(n) => Term::Iri(Iri::new_unchecked(n.into_string())),
        NamedOrBlankNode::BlankNode(b) => Term::Blank(b.into_string()),
    };
    let object = match triple.object {
        OxTerm::NamedNode(n) => Term::Iri(Iri::new_unchecked(n.into_string())),
        OxTerm::BlankNode(b) => Term::Blank(b.into_string()),
        OxTerm::Literal(l) => {
            let (value, datatype, lang) = l.destruct();
            Term::Literal(match (datatype, lang) {
                (_, Some(lang)) => Literal::lang_tagged(value, lang),
                (Some(dt), None) if dt.as_str() != vocab::RDF_LANG_STRING => {
                    Literal::typed(value, Iri::new_unchecked(dt.into_string()))
                }
                _ => Literal::plain(value),
            })
        }
    };
    Triple {
        subject,
        predicate: Iri::new_unchecked(triple.predicate.into_string()),
        object,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_ntriples_statement() {
        let g = parse_ntriples("<urn:a> <urn:p> \"x\" .\n").unwrap();
        assert_eq!(g.len(), 1);
        let lit = g.triples()[0].object.as_literal().unwrap();
        assert_eq!(lit.lexical(), "x");
        assert!(lit.datatype().is_none() && lit.lang().is_none());
    }

    #[test]
    fn empty_document() {
        assert!(parse_ntriples("").unwrap().is_empty());
        assert!(parse_turtle("").unwrap().is_empty());
    }

    #[test]
    fn blank_node_label_preserved() {
        let g = parse_ntriples("_:b1 <urn:p> <urn:o> .").unwrap();
        assert_eq!(g.triples()[0].subject, Term::Blank("b1".into()));
    }

    #[test]
    fn ntriples_error_reports_line() {
        let err = parse_ntriples("<urn:a> <urn:p> <urn:o> .\n<urn:a> <urn:p> .\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn ntriples_rejects_relative_iri() {
        assert!(parse_ntriples("<a> <urn:p> <urn:o> .").is_err());
    }

    #[test]
    fn turtle_a_keyword() {
        let g = parse_turtle("@prefix ex: <urn:ex:> . ex:s a ex:C .").unwrap();
        assert_eq!(g.len(), 1);
        let t = &g.triples()[0];
        assert!(t.is_type());
        assert_eq!(t.object, Term::iri("urn:ex:C"));
        assert_eq!(g.prefixes().get("ex").map(String::as_str), Some("urn:ex:"));
    }

    #[test]
    fn turtle_lang_literal() {
        let g = parse_turtle("@prefix ex: <urn:ex:> . ex:s ex:p \"hi\"@EN .").unwrap();
        assert_eq!(g.triples()[0].object.as_literal().unwrap().lang(), Some("en"));
    }

    #[test]
    fn turtle_predicate_and_object_lists() {
        let g = parse_turtle(
            "@prefix ex: <urn:ex:> .\nex:s ex:p ex:a, ex:b ;\n  ex:q \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> .",
        )
        .unwrap();
        assert_eq!(g.len(), 3);
        let lit = g.triples()[2].object.as_literal().unwrap();
        assert_eq!(lit.datatype().unwrap().as_str(), vocab::XSD_INTEGER);
    }

    #[test]
    fn turtle_undefined_prefix_is_an_error() {
        let err = parse_turtle("ex:s a ex:C .").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("ex"), "{}", err.message);
    }

    #[test]
    fn turtle_error_position() {
        let err = parse_turtle("@prefix ex: <urn:ex:> .\nex:s ex:p .\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.column >= 1);
    }

    #[test]
    fn syntax_from_extension() {
        assert_eq!(Syntax::from_path(Path::new("a/b.nt")), Syntax::NTriples);
        assert_eq!(Syntax::from_path(Path::new("a/b.ttl")), Syntax::Turtle);
    }
}
