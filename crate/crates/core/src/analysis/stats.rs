use std::collections::BTreeMap;

use serde::Serialize;

use super::{detect_multityped, mean_std, Cardinality, Classes, Classification, PropertyKind};
use crate::rdf::{Graph, Iri};
use crate::relational::RelationalSchema;

/// Dataset and generated-database characteristics. Averages are `None`
/// when there is nothing to average.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DatasetStats {
    pub stmts: usize,
    pub cls: usize,
    pub mt: usize,
    pub avg_mt: Option<f64>,
    pub avg_mt_std: Option<f64>,
    pub op: usize,
    pub dp: usize,
    pub oo: usize,
    pub mo: usize,
    pub om: usize,
    pub mm: usize,
    pub et: usize,
    pub mmt: usize,
    pub avg_col: Option<f64>,
    pub avg_col_std: Option<f64>,
}

/// Property counts (`op`, `dp`) are per predicate: a predicate is an object
/// property if any of its profiles has resource objects. Cardinality counts
/// are per entity profile; `rdf:type` profiles are excluded. `avgCol`
/// counts the `id` column.
pub fn compute_stats(graph: &Graph, classes: &Classes, classification: &Classification, schema: &RelationalSchema) -> DatasetStats {
    let multityped = detect_multityped(classes);

    let mut predicates: BTreeMap<&Iri, bool> = BTreeMap::new();
    let (mut oo, mut om, mut mo, mut mm) = (0, 0, 0, 0);
    for p in classification.entity_profiles() {
        *predicates.entry(&p.property).or_default() |= p.kind == PropertyKind::Object;
        match p.cardinality {
            Cardinality::OneToOne => oo += 1,
            Cardinality::OneToMany => om += 1,
            Cardinality::ManyToOne => mo += 1,
            Cardinality::ManyToMany => mm += 1,
        }
    }
    let op = predicates.values().filter(|o| **o).count();

    let (avg_col, avg_col_std) = mean_std(schema.entity_tables.iter().map(|t| t.columns.len()));
    DatasetStats {
        stmts: graph.len(),
        cls: classes.len(),
        mt: multityped.instances.len(),
        avg_mt: multityped.avg,
        avg_mt_std: multityped.std,
        op,
        dp: predicates.len() - op,
        oo,
        mo,
        om,
        mm,
        et: schema.entity_tables.len(),
        mmt: schema.mm_tables.len(),
        avg_col,
        avg_col_std,
    }
}
