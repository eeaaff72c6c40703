//! Type-store relational model: one entity table per class, foreign-key
//! columns or many-to-many tables depending on cardinality, a global
//! resource id map and the populated records.

pub mod naming;
mod populate;
mod value;

pub use populate::{populate, populate_with, Record};
pub use value::{coerce_literal, epoch_millis, Value};

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::analysis::{Cardinality, Classes, Classification, PropertyKind, PropertyProfile, Range, StorageClass};
use crate::rdf::{Graph, Iri, Term};
use naming::{camel_case, claim_group, pascal_case, snake_case, Scope};

pub const RES_ID_TABLE: &str = "_res_id";

/// Where a column's value comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnOrigin {
    pub property: Iri,
    pub domain: Iri,
    pub range: Range,
    /// Set for one-to-many columns placed in the range table: the value is
    /// the id of the referring subject.
    pub inverse: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Id,
    Literal,
    /// IRI of a dangling resource, stored as text.
    Uri,
    /// Numeric id of a record in `references`.
    Ref,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    pub storage_class: StorageClass,
    pub kind: ColumnKind,
    pub references: Option<String>,
    pub nullable: bool,
    pub origin: Option<ColumnOrigin>,
}

impl Column {
    fn id() -> Column {
        Column {
            name: "id".into(),
            storage_class: StorageClass::Integer,
            kind: ColumnKind::Id,
            references: None,
            nullable: false,
            origin: None,
        }
    }

    pub fn property(&self) -> Option<&Iri> {
        self.origin.as_ref().map(|o| &o.property)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityTable {
    pub name: String,
    pub class_iri: Iri,
    /// `id` first.
    pub columns: Vec<Column>,
}

impl EntityTable {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    EntityRef,
    DanglingUri,
    Value,
    LangValue,
    TypeRef,
}

impl ObjectKind {
    /// Name of the object column in the table.
    pub fn object_column(self) -> &'static str {
        match self {
            ObjectKind::EntityRef => "object",
            ObjectKind::TypeRef => "type",
            ObjectKind::DanglingUri => "uri",
            ObjectKind::Value | ObjectKind::LangValue => "value",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManyToManyTable {
    pub name: String,
    /// JSON attribute under which the rows appear on the subject entity.
    pub attribute: String,
    pub subject_table: String,
    pub property: Iri,
    pub domain: Iri,
    pub range: Range,
    pub object_kind: ObjectKind,
    pub object_table: Option<String>,
    pub value_class: StorageClass,
    pub lang_column: bool,
}

impl ManyToManyTable {
    pub fn subject_column(&self) -> &'static str {
        "subject"
    }

    pub fn object_column(&self) -> &'static str {
        self.object_kind.object_column()
    }

    /// Data columns in table order.
    pub fn columns(&self) -> Vec<&'static str> {
        let mut cols = vec![self.subject_column(), self.object_column()];
        if self.lang_column {
            cols.push("lang");
        }
        cols
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RelationalSchema {
    /// Sorted by name.
    pub entity_tables: Vec<EntityTable>,
    /// Sorted by name.
    pub mm_tables: Vec<ManyToManyTable>,
}

impl RelationalSchema {
    pub fn entity_table(&self, name: &str) -> Option<&EntityTable> {
        self.entity_tables.iter().find(|t| t.name == name)
    }

    pub fn table_for_class(&self, class: &Iri) -> Option<&EntityTable> {
        self.entity_tables.iter().find(|t| &t.class_iri == class)
    }

    pub fn mm_table(&self, name: &str) -> Option<&ManyToManyTable> {
        self.mm_tables.iter().find(|t| t.name == name)
    }

    /// Many-to-many tables joinable on their subject column.
    pub fn mm_tables_of<'a>(&'a self, subject_table: &'a str) -> impl Iterator<Item = &'a ManyToManyTable> + 'a {
        self.mm_tables.iter().filter(move |m| m.subject_table == subject_table)
    }

    pub fn table_count(&self) -> usize {
        self.entity_tables.len() + self.mm_tables.len()
    }
}

/// Bijection between resource IRIs and positive integer ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourceIdMap {
    ids: HashMap<Iri, i64>,
    /// Index `i` holds the IRI with id `i + 1`.
    iris: Vec<Iri>,
}

impl ResourceIdMap {
    pub fn id(&self, iri: &Iri) -> Option<i64> {
        self.ids.get(iri).copied()
    }

    pub fn term_id(&self, term: &Term) -> Option<i64> {
        term.as_iri().and_then(|iri| self.id(iri))
    }

    pub fn iri(&self, id: i64) -> Option<&Iri> {
        usize::try_from(id).ok().and_then(|i| i.checked_sub(1)).and_then(|i| self.iris.get(i))
    }

    pub fn len(&self) -> usize {
        self.iris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iris.is_empty()
    }

    /// `(iri, id)` in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&Iri, i64)> {
        self.iris.iter().enumerate().map(|(i, iri)| (iri, i as i64 + 1))
    }
}

/// Numbers every resource IRI in subject or object position (classes
/// included, predicates and datatypes excluded) from 1 in lexicographic
/// order.
pub fn assign_ids(graph: &Graph) -> ResourceIdMap {
    let mut iris: Vec<Iri> = graph
        .iter()
        .flat_map(|t| [&t.subject, &t.object])
        .filter_map(|t| t.as_iri().cloned())
        .collect();
    iris.sort();
    iris.dedup();
    let ids = iris.iter().enumerate().map(|(i, iri)| (iri.clone(), i as i64 + 1)).collect();
    ResourceIdMap { ids, iris }
}

enum Placement<'a> {
    Column { table: &'a str, column: Column, qualifier: String, profile: &'a PropertyProfile },
    ManyToMany { kind: ObjectKind, object_table: Option<&'a str>, profile: &'a PropertyProfile },
}

/// Entity table per class, then columns and many-to-many tables per
/// profile according to its cardinality.
///
/// An `rdf:type` table `mn_<table>_type` is only materialized for entity
/// tables holding at least one multi-typed instance; otherwise table
/// membership already carries the type.
pub fn build_schema(classes: &Classes, classification: &Classification) -> RelationalSchema {
    let mut global = Scope::with_reserved([RES_ID_TABLE]);
    let table_names: BTreeMap<&Iri, String> = classes
        .iter()
        .map(|c| (&c.class_iri, global.claim(&snake_case(&c.class_iri.local_name()))))
        .collect();
    let instance_count = |range: &Range| match range {
        Range::Class(c) => classes.get(c).map_or(0, |ci| ci.instances.len()),
        _ => 0,
    };

    let mut placements = Vec::new();
    for profile in &classification.profiles {
        let domain_table = table_names[&profile.domain].as_str();
        if profile.is_type() {
            let multityped = classes
                .get(&profile.domain)
                .is_some_and(|c| c.instances.iter().any(|i| classes.types_of(i).is_some_and(|t| t.len() > 1)));
            if multityped {
                placements.push(Placement::ManyToMany { kind: ObjectKind::TypeRef, object_table: None, profile });
            }
            continue;
        }
        let functional = matches!(profile.cardinality, Cardinality::OneToOne | Cardinality::ManyToOne);
        let placement = match (&profile.range, profile.kind) {
            (_, PropertyKind::LangString) => {
                Placement::ManyToMany { kind: ObjectKind::LangValue, object_table: None, profile }
            }
            (Range::Literal, _) if functional => Placement::Column {
                table: domain_table,
                column: data_column(profile.storage_class.unwrap_or(StorageClass::Text), ColumnKind::Literal, None, profile, false),
                qualifier: "value".into(),
                profile,
            },
            (Range::Literal, _) => Placement::ManyToMany { kind: ObjectKind::Value, object_table: None, profile },
            (Range::Untyped, _) if functional => Placement::Column {
                table: domain_table,
                column: data_column(StorageClass::Text, ColumnKind::Uri, None, profile, false),
                qualifier: "uri".into(),
                profile,
            },
            (Range::Untyped, _) => Placement::ManyToMany { kind: ObjectKind::DanglingUri, object_table: None, profile },
            (Range::Class(range), _) => {
                let range_table = table_names[range].as_str();
                match profile.cardinality {
                    Cardinality::OneToOne | Cardinality::ManyToOne => Placement::Column {
                        table: domain_table,
                        column: data_column(StorageClass::Integer, ColumnKind::Ref, Some(range_table), profile, false),
                        qualifier: range_table.to_string(),
                        profile,
                    },
                    Cardinality::OneToMany => Placement::Column {
                        table: range_table,
                        column: data_column(StorageClass::Integer, ColumnKind::Ref, Some(domain_table), profile, true),
                        qualifier: domain_table.to_string(),
                        profile,
                    },
                    Cardinality::ManyToMany => {
                        Placement::ManyToMany { kind: ObjectKind::EntityRef, object_table: Some(range_table), profile }
                    }
                }
            }
            (Range::Types, _) => unreachable!("type profiles handled above"),
        };
        placements.push(placement);
    }

    // Candidates sharing a base name are ordered so that type tables, then
    // the best-witnessed profile, keep the bare name.
    let preference = |p: &PropertyProfile| (!p.is_type(), std::cmp::Reverse(p.statements), std::cmp::Reverse(instance_count(&p.range)));

    let mut columns_by_table: BTreeMap<&str, BTreeMap<String, Vec<(Column, String, &PropertyProfile)>>> = BTreeMap::new();
    let mut mm_groups: BTreeMap<String, Vec<(ObjectKind, Option<&str>, &PropertyProfile)>> = BTreeMap::new();
    for placement in placements {
        match placement {
            Placement::Column { table, column, qualifier, profile } => {
                let base = snake_case(&profile.property.local_name());
                columns_by_table.entry(table).or_default().entry(base).or_default().push((column, qualifier, profile));
            }
            Placement::ManyToMany { kind, object_table, profile } => {
                let subject_table = &table_names[&profile.domain];
                let base = if kind == ObjectKind::TypeRef {
                    format!("mn_{subject_table}_type")
                } else {
                    format!("mn_{subject_table}_{}", snake_case(&profile.property.local_name()))
                };
                mm_groups.entry(base).or_default().push((kind, object_table, profile));
            }
        }
    }

    let mut entity_tables: Vec<EntityTable> = classes
        .iter()
        .map(|c| EntityTable { name: table_names[&c.class_iri].clone(), class_iri: c.class_iri.clone(), columns: vec![Column::id()] })
        .collect();
    for table in &mut entity_tables {
        let Some(groups) = columns_by_table.remove(table.name.as_str()) else { continue };
        let mut scope = Scope::with_reserved(["id"]);
        let mut named = Vec::new();
        for (base, mut group) in groups {
            group.sort_by_key(|(_, _, p)| preference(p));
            let qualifiers: Vec<String> = group.iter().map(|(_, q, _)| q.clone()).collect();
            for ((mut column, _, _), name) in group.into_iter().zip(claim_group(&mut scope, &base, &qualifiers)) {
                column.name = name;
                named.push(column);
            }
        }
        named.sort_by(|a, b| a.name.cmp(&b.name));
        table.columns.extend(named);
    }

    let mut mm_tables = Vec::new();
    for (base, mut group) in mm_groups {
        group.sort_by_key(|(_, _, p)| preference(p));
        let qualifiers: Vec<String> = group
            .iter()
            .map(|(kind, object_table, _)| match kind {
                ObjectKind::EntityRef => object_table.unwrap_or_default().to_string(),
                other => other.object_column().to_string(),
            })
            .collect();
        for ((kind, object_table, profile), name) in group.into_iter().zip(claim_group(&mut global, &base, &qualifiers)) {
            let subject_table = table_names[&profile.domain].clone();
            mm_tables.push(ManyToManyTable {
                name,
                attribute: String::new(),
                subject_table,
                property: profile.property.clone(),
                domain: profile.domain.clone(),
                range: profile.range.clone(),
                object_kind: kind,
                object_table: object_table.map(str::to_string),
                value_class: match kind {
                    ObjectKind::EntityRef | ObjectKind::TypeRef => StorageClass::Integer,
                    ObjectKind::Value => profile.storage_class.unwrap_or(StorageClass::Text),
                    ObjectKind::DanglingUri | ObjectKind::LangValue => StorageClass::Text,
                },
                lang_column: kind == ObjectKind::LangValue,
            });
        }
    }
    entity_tables.sort_by(|a, b| a.name.cmp(&b.name));
    mm_tables.sort_by(|a, b| a.name.cmp(&b.name));

    let mut schema = RelationalSchema { entity_tables, mm_tables };
    assign_attributes(&mut schema);
    schema
}

fn data_column(
    storage_class: StorageClass,
    kind: ColumnKind,
    references: Option<&str>,
    profile: &PropertyProfile,
    inverse: bool,
) -> Column {
    Column {
        name: String::new(),
        storage_class,
        kind,
        references: references.map(str::to_string),
        nullable: true,
        origin: Some(ColumnOrigin {
            property: profile.property.clone(),
            domain: profile.domain.clone(),
            range: profile.range.clone(),
            inverse,
        }),
    }
}

/// Base JSON attribute for a many-to-many table: `type` for the type
/// relation, camel(property) + Pascal(range table) for entity references,
/// camel(property) otherwise.
pub fn mm_attribute_base(kind: ObjectKind, property: &Iri, object_table: Option<&str>) -> String {
    let prop = camel_case(&snake_case(&property.local_name()));
    match kind {
        ObjectKind::TypeRef => "type".to_string(),
        ObjectKind::EntityRef => format!("{prop}{}", pascal_case(object_table.unwrap_or_default())),
        _ => prop,
    }
}

/// JSON attribute names of an entity: `id`, then camel(column) for every
/// column, then the list attributes. Clashes get a numeric suffix.
pub fn entity_attributes<'a>(columns: impl IntoIterator<Item = &'a str>, lists: &[String]) -> (Vec<String>, Vec<String>) {
    let mut scope = Scope::with_reserved(["id"]);
    let cols = columns
        .into_iter()
        .filter(|c| *c != "id")
        .map(|c| scope.claim_with(&camel_case(c), ""))
        .collect();
    let lists = lists.iter().map(|l| scope.claim_with(l, "")).collect();
    (cols, lists)
}

fn assign_attributes(schema: &mut RelationalSchema) {
    for table in &schema.entity_tables {
        let mut idx: Vec<usize> = schema
            .mm_tables
            .iter()
            .enumerate()
            .filter(|(_, m)| m.subject_table == table.name)
            .map(|(i, _)| i)
            .collect();
        // type list first, then by table name
        idx.sort_by_key(|&i| (schema.mm_tables[i].object_kind != ObjectKind::TypeRef, schema.mm_tables[i].name.clone()));
        let bases: Vec<String> = idx
            .iter()
            .map(|&i| {
                let m = &schema.mm_tables[i];
                mm_attribute_base(m.object_kind, &m.property, m.object_table.as_deref())
            })
            .collect();
        let (_, lists) = entity_attributes(table.columns.iter().map(|c| c.name.as_str()), &bases);
        for (i, attr) in idx.into_iter().zip(lists) {
            schema.mm_tables[i].attribute = attr;
        }
    }
}
