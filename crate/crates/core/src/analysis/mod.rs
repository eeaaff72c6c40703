//! A-Box analysis: classes and instances, multi-typed instances, property
//! profiles per distinct (property, domain, range), cardinalities and
//! storage classes.

mod profile;
mod stats;
mod storage;

pub use profile::{
    cardinality_of, classify_properties, classify_properties_with, infer_cardinality, Cardinality,
    Classification, PropertyKind, PropertyProfile, Range,
};
pub use stats::{compute_stats, DatasetStats};
pub use storage::{infer_storage_class, StorageClass};
pub(crate) use profile::statement_matches;
pub(crate) use storage::{is_binary_hex as storage_is_hex, is_temporal as storage_is_temporal};

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::rdf::{Graph, Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassInfo {
    pub class_iri: Iri,
    pub instances: BTreeSet<Iri>,
}

/// Classes found in the A-Box plus the reverse instance → types index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classes {
    classes: BTreeMap<Iri, ClassInfo>,
    types: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn get(&self, class: &Iri) -> Option<&ClassInfo> {
        self.classes.get(class)
    }

    /// Classes in IRI order.
    pub fn iter(&self) -> impl Iterator<Item = &ClassInfo> {
        self.classes.values()
    }

    /// Types asserted for `resource`; empty when it is untyped.
    pub fn types_of(&self, resource: &Iri) -> Option<&BTreeSet<Iri>> {
        self.types.get(resource)
    }

    pub fn term_types(&self, term: &Term) -> Option<&BTreeSet<Iri>> {
        term.as_iri().and_then(|iri| self.types.get(iri))
    }

    pub fn is_typed(&self, resource: &Iri) -> bool {
        self.types.contains_key(resource)
    }

    /// Every typed resource with its types, in IRI order.
    pub fn typed_resources(&self) -> impl Iterator<Item = (&Iri, &BTreeSet<Iri>)> {
        self.types.iter()
    }
}

/// Collects one class per distinct IRI object of an `rdf:type` statement.
/// Statements with blank or literal terms in either position are skipped;
/// the graph is expected to be skolemized.
pub fn discover_classes(graph: &Graph) -> Classes {
    let mut out = Classes::default();
    for t in graph.iter().filter(|t| t.is_type()) {
        let (Some(instance), Some(class)) = (t.subject.as_iri(), t.object.as_iri()) else {
            continue;
        };
        out.classes
            .entry(class.clone())
            .or_insert_with(|| ClassInfo { class_iri: class.clone(), instances: BTreeSet::new() })
            .instances
            .insert(instance.clone());
        out.types.entry(instance.clone()).or_default().insert(class.clone());
    }
    out
}

/// Instances with two or more types, and the mean and population standard
/// deviation of their type counts (`None` when there are none).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiTyped {
    pub instances: BTreeSet<Iri>,
    pub avg: Option<f64>,
    pub std: Option<f64>,
}

pub fn detect_multityped(classes: &Classes) -> MultiTyped {
    let counts: Vec<(Iri, usize)> = classes
        .typed_resources()
        .filter(|(_, types)| types.len() >= 2)
        .map(|(iri, types)| (iri.clone(), types.len()))
        .collect();
    let (avg, std) = mean_std(counts.iter().map(|(_, n)| *n));
    MultiTyped { instances: counts.into_iter().map(|(iri, _)| iri).collect(), avg, std }
}

/// Mean and population standard deviation of counts, from exact integer
/// sums so that the result does not depend on summation order.
pub(crate) fn mean_std(counts: impl Iterator<Item = usize>) -> (Option<f64>, Option<f64>) {
    let (mut n, mut s1, mut s2) = (0u128, 0u128, 0u128);
    for c in counts {
        n += 1;
        s1 += c as u128;
        s2 += (c as u128) * (c as u128);
    }
    if n == 0 {
        return (None, None);
    }
    let mean = s1 as f64 / n as f64;
    let var = (n * s2 - s1 * s1) as f64 / (n * n) as f64;
    (Some(mean), Some(var.sqrt()))
}
