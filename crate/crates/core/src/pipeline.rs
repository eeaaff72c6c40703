//! End-to-end conversion: parse, skolemize, analyze, build the schema and
//! populate it.

use std::path::Path;

use serde::Serialize;

use crate::analysis::{classify_properties_with, compute_stats, discover_classes, Classes, Classification, DatasetStats};
use crate::par::Exec;
use crate::rdf::{Graph, ParseError, Skolemizer, Syntax, DEFAULT_BASE};
use crate::relational::{assign_ids, build_schema, populate_with, Record, RelationalSchema, ResourceIdMap};
use crate::sql::{self, DbError};

#[derive(Debug, Clone)]
pub struct Options {
    /// Namespace for skolem IRIs.
    pub base: String,
    /// Counter-based skolem IRIs instead of random UUIDs.
    pub deterministic: bool,
    pub exec: Exec,
}

impl Default for Options {
    fn default() -> Self {
        Options { base: DEFAULT_BASE.to_string(), deterministic: false, exec: Exec::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

/// Reads a `.nt` (N-Triples) or any other (Turtle) file.
pub fn load(path: &Path) -> Result<Graph, LoadError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
    Syntax::from_path(path).parse(&text).map_err(|source| LoadError::Parse { path: shown, source })
}

#[derive(Debug, Clone)]
pub struct Conversion {
    /// Skolemized input.
    pub graph: Graph,
    pub classes: Classes,
    pub classification: Classification,
    pub schema: RelationalSchema,
    pub ids: ResourceIdMap,
    pub records: Vec<Record>,
}

/// Schema report written by `analyze`.
#[derive(Debug, Serialize)]
pub struct Analysis<'a> {
    pub classification: &'a Classification,
    pub schema: &'a RelationalSchema,
}

pub fn convert(graph: &Graph, options: &Options) -> Conversion {
    let graph = Skolemizer::new(options.base.clone(), options.deterministic).apply(graph);
    let classes = discover_classes(&graph);
    let classification = classify_properties_with(&graph, &classes, options.exec);
    let schema = build_schema(&classes, &classification);
    let ids = assign_ids(&graph);
    let records = populate_with(&graph, &classes, &schema, &ids, options.exec);
    Conversion { graph, classes, classification, schema, ids, records }
}

impl Conversion {
    pub fn stats(&self) -> DatasetStats {
        compute_stats(&self.graph, &self.classes, &self.classification, &self.schema)
    }

    pub fn analysis(&self) -> Analysis<'_> {
        Analysis { classification: &self.classification, schema: &self.schema }
    }

    pub fn dump(&self) -> String {
        sql::emit_dump(&self.schema, &self.records, &self.ids)
    }

    pub fn write_database(&self, path: &Path) -> Result<(), DbError> {
        sql::create_database(path, &self.schema, &self.records, &self.ids)
    }
}
