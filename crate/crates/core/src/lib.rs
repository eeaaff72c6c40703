//! Converts RDF(S) datasets into type-store relational databases and
//! provides the filter language used by the generated REST API.

pub mod analysis;
pub mod entity;
pub mod par;
pub mod pipeline;
pub mod rdf;
pub mod relational;
pub mod rql;
pub mod sql;
pub mod vocab;

pub use par::Exec;
