use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::{infer_storage_class, Classes, StorageClass};
use crate::par::Exec;
use crate::rdf::{Graph, Iri, Literal, Term, Triple};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cardinality {
    OneToOne,
    OneToMany,
    ManyToOne,
    ManyToMany,
}

impl Cardinality {
    /// Partial order OneToOne < {OneToMany, ManyToOne} < ManyToMany.
    pub fn le(self, other: Cardinality) -> bool {
        use Cardinality::*;
        match (self, other) {
            (a, b) if a == b => true,
            (OneToOne, _) | (_, ManyToMany) => true,
            _ => false,
        }
    }
}

/// What the object position of a profile ranges over.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "class")]
pub enum Range {
    /// Resources typed with this class.
    Class(Iri),
    /// Literal values.
    Literal,
    /// Resources without any type (dangling).
    Untyped,
    /// The classes of the subject itself (`rdf:type`).
    Types,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    Object,
    Datatype,
    LangString,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyProfile {
    pub property: Iri,
    pub domain: Iri,
    pub range: Range,
    pub kind: PropertyKind,
    pub cardinality: Cardinality,
    pub storage_class: Option<StorageClass>,
    pub dangling: bool,
    /// Number of statements matching this (property, domain, range).
    pub statements: usize,
}

impl PropertyProfile {
    pub fn is_type(&self) -> bool {
        self.range == Range::Types
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Classification {
    /// Sorted by (property, domain, range); type profiles included.
    pub profiles: Vec<PropertyProfile>,
    /// Non-type statements whose subject has no type.
    pub orphan_statements: usize,
}

impl Classification {
    pub fn entity_profiles(&self) -> impl Iterator<Item = &PropertyProfile> {
        self.profiles.iter().filter(|p| !p.is_type())
    }
}

/// Cardinality from observed (subject, object) pairs: the maximum number of
/// distinct objects per subject and of distinct subjects per object decide
/// the "many" side of each axis.
pub fn cardinality_of<'a, I>(pairs: I) -> Cardinality
where
    I: IntoIterator<Item = (&'a Term, &'a Term)>,
{
    let mut per_subject: HashMap<&Term, HashSet<&Term>> = HashMap::new();
    let mut per_object: HashMap<&Term, HashSet<&Term>> = HashMap::new();
    for (s, o) in pairs {
        per_subject.entry(s).or_default().insert(o);
        per_object.entry(o).or_default().insert(s);
    }
    let max_objects = per_subject.values().map(HashSet::len).max().unwrap_or(0);
    let max_subjects = per_object.values().map(HashSet::len).max().unwrap_or(0);
    match (max_objects > 1, max_subjects > 1) {
        (false, false) => Cardinality::OneToOne,
        (true, false) => Cardinality::OneToMany,
        (false, true) => Cardinality::ManyToOne,
        (true, true) => Cardinality::ManyToMany,
    }
}

/// Ranges an object falls into: one per type of a typed resource, `Literal`
/// for literals, `Untyped` otherwise.
pub(crate) fn object_ranges(classes: &Classes, object: &Term) -> Vec<Range> {
    match object {
        Term::Literal(_) => vec![Range::Literal],
        other => match classes.term_types(other) {
            Some(types) => types.iter().cloned().map(Range::Class).collect(),
            None => vec![Range::Untyped],
        },
    }
}

pub(crate) fn statement_matches(classes: &Classes, t: &Triple, domain: &Iri, range: &Range) -> bool {
    let typed_with_domain = classes.term_types(&t.subject).is_some_and(|ts| ts.contains(domain));
    if !typed_with_domain {
        return false;
    }
    match range {
        Range::Types => t.is_type(),
        Range::Literal => !t.is_type() && matches!(t.object, Term::Literal(_)),
        Range::Untyped => {
            !t.is_type() && !matches!(t.object, Term::Literal(_)) && classes.term_types(&t.object).is_none()
        }
        Range::Class(c) => !t.is_type() && classes.term_types(&t.object).is_some_and(|ts| ts.contains(c)),
    }
}

/// Rescans the graph for one profile. `rdf:type` is always many-to-many.
pub fn infer_cardinality(graph: &Graph, classes: &Classes, property: &Iri, domain: &Iri, range: &Range) -> Cardinality {
    if property.as_str() == vocab::RDF_TYPE || *range == Range::Types {
        return Cardinality::ManyToMany;
    }
    cardinality_of(
        graph
            .iter()
            .filter(|t| &t.predicate == property && statement_matches(classes, t, domain, range))
            .map(|t| (&t.subject, &t.object)),
    )
}

pub fn classify_properties(graph: &Graph, classes: &Classes) -> Classification {
    classify_properties_with(graph, classes, Exec::default())
}

pub fn classify_properties_with(graph: &Graph, classes: &Classes, exec: Exec) -> Classification {
    let mut by_predicate: BTreeMap<&Iri, Vec<&Triple>> = BTreeMap::new();
    let mut orphan_statements = 0;
    for t in graph {
        if t.is_type() {
            continue;
        }
        if classes.term_types(&t.subject).is_none() {
            orphan_statements += 1;
            continue;
        }
        by_predicate.entry(&t.predicate).or_default().push(t);
    }

    let groups: Vec<(&Iri, Vec<&Triple>)> = by_predicate.into_iter().collect();
    let mut profiles: Vec<PropertyProfile> = exec
        .map(&groups, |(property, triples)| profile_predicate(classes, property, triples))
        .into_iter()
        .flatten()
        .collect();

    // Every rdf:type statement of an instance of C witnesses C's type profile.
    for class in classes.iter() {
        let statements = class
            .instances
            .iter()
            .map(|i| classes.types_of(i).map_or(0, |t| t.len()))
            .sum();
        profiles.push(PropertyProfile {
            property: Iri::new_unchecked(vocab::RDF_TYPE),
            domain: class.class_iri.clone(),
            range: Range::Types,
            kind: PropertyKind::Object,
            cardinality: Cardinality::ManyToMany,
            storage_class: None,
            dangling: false,
            statements,
        });
    }
    profiles.sort_by(|a, b| (&a.property, &a.domain, &a.range).cmp(&(&b.property, &b.domain, &b.range)));
    Classification { profiles, orphan_statements }
}

#[derive(Default)]
struct Witness<'a> {
    pairs: Vec<(&'a Term, &'a Term)>,
    literals: Vec<&'a Literal>,
}

fn profile_predicate(classes: &Classes, property: &Iri, triples: &[&Triple]) -> Vec<PropertyProfile> {
    let mut groups: BTreeMap<(&Iri, Range), Witness<'_>> = BTreeMap::new();
    for t in triples {
        let Some(domains) = classes.term_types(&t.subject) else { continue };
        let ranges = object_ranges(classes, &t.object);
        for domain in domains {
            for range in &ranges {
                let w = groups.entry((domain, range.clone())).or_default();
                w.pairs.push((&t.subject, &t.object));
                if let Term::Literal(lit) = &t.object {
                    w.literals.push(lit);
                }
            }
        }
    }
    groups
        .into_iter()
        .map(|((domain, range), w)| {
            let (kind, storage_class) = match range {
                Range::Literal if w.literals.iter().any(|l| l.lang().is_some()) => {
                    (PropertyKind::LangString, Some(StorageClass::Text))
                }
                Range::Literal => (PropertyKind::Datatype, Some(infer_storage_class(w.literals.iter().copied()))),
                _ => (PropertyKind::Object, None),
            };
            PropertyProfile {
                property: property.clone(),
                domain: domain.clone(),
                dangling: range == Range::Untyped,
                range,
                kind,
                cardinality: cardinality_of(w.pairs.iter().copied()),
                storage_class,
                statements: w.pairs.len(),
            }
        })
        .collect()
}
