use std::collections::HashMap;

use serde::Serialize;

use super::{coerce_literal, ColumnKind, EntityTable, ManyToManyTable, ObjectKind, RelationalSchema, ResourceIdMap, Value};
use crate::analysis::{statement_matches, Classes};
use crate::par::Exec;
use crate::rdf::{Graph, Iri, Term, Triple};

/// One row of a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub table: String,
    /// In table column order.
    pub values: Vec<(String, Value)>,
}

impl Record {
    pub fn get(&self, column: &str) -> Option<&Value> {
        self.values.iter().find(|(c, _)| c == column).map(|(_, v)| v)
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Null => s.serialize_none(),
            Value::Integer(i) => s.serialize_i64(*i),
            Value::Real(r) => s.serialize_f64(*r),
            Value::Text(t) => s.serialize_str(t),
            Value::Blob(b) => s.serialize_str(&hex::encode_upper(b)),
        }
    }
}

struct Index<'g> {
    out: HashMap<(&'g Term, &'g Iri), Vec<&'g Triple>>,
    inc: HashMap<(&'g Term, &'g Iri), Vec<&'g Triple>>,
    by_predicate: HashMap<&'g Iri, Vec<&'g Triple>>,
}

impl<'g> Index<'g> {
    fn new(graph: &'g Graph) -> Self {
        let mut index = Index { out: HashMap::new(), inc: HashMap::new(), by_predicate: HashMap::new() };
        for t in graph {
            index.out.entry((&t.subject, &t.predicate)).or_default().push(t);
            index.inc.entry((&t.object, &t.predicate)).or_default().push(t);
            index.by_predicate.entry(&t.predicate).or_default().push(t);
        }
        index
    }
}

/// Fills every table: one record per (instance, type) in entity tables and
/// one row per matching statement in many-to-many tables. Records are
/// ordered by table name, then id (entity tables) or subject and object.
pub fn populate(graph: &Graph, classes: &Classes, schema: &RelationalSchema, ids: &ResourceIdMap) -> Vec<Record> {
    populate_with(graph, classes, schema, ids, Exec::default())
}

pub fn populate_with(
    graph: &Graph,
    classes: &Classes,
    schema: &RelationalSchema,
    ids: &ResourceIdMap,
    exec: Exec,
) -> Vec<Record> {
    let index = Index::new(graph);
    let ctx = Ctx { classes, ids, index: &index };

    enum Job<'a> {
        Entity(&'a EntityTable),
        Mm(&'a ManyToManyTable),
    }
    let mut jobs: Vec<(&str, Job<'_>)> = schema
        .entity_tables
        .iter()
        .map(|t| (t.name.as_str(), Job::Entity(t)))
        .chain(schema.mm_tables.iter().map(|m| (m.name.as_str(), Job::Mm(m))))
        .collect();
    jobs.sort_by(|a, b| a.0.cmp(b.0));
    exec.map(&jobs, |(_, job)| match job {
        Job::Entity(t) => ctx.entity_records(t),
        Job::Mm(m) => ctx.mm_records(m),
    })
    .into_iter()
    .flatten()
    .collect()
}

struct Ctx<'a, 'g> {
    classes: &'a Classes,
    ids: &'a ResourceIdMap,
    index: &'a Index<'g>,
}

impl Ctx<'_, '_> {
    fn entity_records(&self, table: &EntityTable) -> Vec<Record> {
        let Some(class) = self.classes.get(&table.class_iri) else { return Vec::new() };
        let mut rows: Vec<(i64, Record)> = class
            .instances
            .iter()
            .filter_map(|instance| {
                let id = self.ids.id(instance)?;
                let subject = Term::Iri(instance.clone());
                let values = table
                    .columns
                    .iter()
                    .map(|col| {
                        let v = match (&col.kind, &col.origin) {
                            (ColumnKind::Id, _) | (_, None) => Value::Integer(id),
                            (kind, Some(origin)) if origin.inverse => {
                                let _ = kind;
                                self.index
                                    .inc
                                    .get(&(&subject, &origin.property))
                                    .into_iter()
                                    .flatten()
                                    .find(|t| statement_matches(self.classes, t, &origin.domain, &origin.range))
                                    .and_then(|t| self.ids.term_id(&t.subject))
                                    .map_or(Value::Null, Value::Integer)
                            }
                            (kind, Some(origin)) => self
                                .index
                                .out
                                .get(&(&subject, &origin.property))
                                .into_iter()
                                .flatten()
                                .filter(|t| statement_matches(self.classes, t, &origin.domain, &origin.range))
                                .min_by(|a, b| a.object.cmp(&b.object))
                                .map_or(Value::Null, |t| self.encode_object(*kind, col.storage_class, &t.object)),
                        };
                        (col.name.clone(), v)
                    })
                    .collect();
                Some((id, Record { table: table.name.clone(), values }))
            })
            .collect();
        rows.sort_by_key(|(id, _)| *id);
        rows.into_iter().map(|(_, r)| r).collect()
    }

    fn encode_object(&self, kind: ColumnKind, class: crate::analysis::StorageClass, object: &Term) -> Value {
        match (kind, object) {
            (ColumnKind::Ref, o) => self.ids.term_id(o).map_or(Value::Null, Value::Integer),
            (ColumnKind::Uri, Term::Iri(iri)) => Value::Text(iri.as_str().to_string()),
            (_, Term::Literal(lit)) => coerce_literal(lit, class),
            (_, other) => Value::Text(other.to_string()),
        }
    }

    fn mm_records(&self, mm: &ManyToManyTable) -> Vec<Record> {
        let cols = mm.columns();
        let mut rows: Vec<Vec<Value>> = Vec::new();
        if mm.object_kind == ObjectKind::TypeRef {
            if let Some(class) = self.classes.get(&mm.domain) {
                for instance in &class.instances {
                    let Some(id) = self.ids.id(instance) else { continue };
                    for ty in self.classes.types_of(instance).into_iter().flatten() {
                        if let Some(type_id) = self.ids.id(ty) {
                            rows.push(vec![Value::Integer(id), Value::Integer(type_id)]);
                        }
                    }
                }
            }
        } else {
            for t in self.index.by_predicate.get(&mm.property).into_iter().flatten() {
                if !statement_matches(self.classes, t, &mm.domain, &mm.range) {
                    continue;
                }
                let Some(subject) = self.ids.term_id(&t.subject) else { continue };
                let mut row = vec![Value::Integer(subject)];
                match (&mm.object_kind, &t.object) {
                    (ObjectKind::EntityRef, o) => row.push(self.ids.term_id(o).map_or(Value::Null, Value::Integer)),
                    (ObjectKind::DanglingUri, Term::Iri(iri)) => row.push(Value::Text(iri.as_str().to_string())),
                    (ObjectKind::LangValue, Term::Literal(lit)) => {
                        row.push(Value::Text(lit.lexical().to_string()));
                        row.push(lit.lang().map_or(Value::Null, |l| Value::Text(l.to_string())));
                    }
                    (ObjectKind::Value, Term::Literal(lit)) => row.push(coerce_literal(lit, mm.value_class)),
                    (_, other) => row.push(Value::Text(other.to_string())),
                }
                rows.push(row);
            }
        }
        rows.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        rows.into_iter()
            .map(|row| Record {
                table: mm.name.clone(),
                values: cols.iter().map(|c| c.to_string()).zip(row).collect(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{classify_properties, discover_classes};
    use crate::relational::{assign_ids, build_schema};
    use crate::rdf::parse_turtle;

    fn run(body: &str) -> (RelationalSchema, ResourceIdMap, Vec<Record>) {
        let g = parse_turtle(&format!(
            "@prefix ex: <urn:ex:> .\n@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n{body}"
        ))
        .unwrap();
        let c = discover_classes(&g);
        let schema = build_schema(&c, &classify_properties(&g, &c));
        let ids = assign_ids(&g);
        let records = populate(&g, &c, &schema, &ids);
        (schema, ids, records)
    }

    fn rows<'a>(records: &'a [Record], table: &str) -> Vec<&'a Record> {
        records.iter().filter(|r| r.table == table).collect()
    }

    #[test]
    fn multityped_instance_is_duplicated() {
        let (_, _, records) = run("ex:tim a ex:Person , ex:Male ; ex:name \"Tim\" .");
        let person = rows(&records, "person");
        let male = rows(&records, "male");
        assert_eq!(person.len(), 1);
        assert_eq!(male.len(), 1);
        assert_eq!(person[0].values, male[0].values);
    }

    #[test]
    fn range_mismatch_is_not_inserted() {
        let (schema, ids, records) = run(
            "ex:a a ex:C ; ex:p ex:x1 , ex:x2 , ex:y1 . ex:b a ex:C ; ex:p ex:x1 , ex:x2 .
             ex:x1 a ex:X . ex:x2 a ex:X . ex:y1 a ex:Y .",
        );
        let mm = schema.mm_tables.iter().find(|m| m.object_table.as_deref() == Some("x")).unwrap();
        let mm_rows = rows(&records, &mm.name);
        assert_eq!(mm_rows.len(), 4);
        let y1 = ids.id(&Iri::new("urn:ex:y1").unwrap()).unwrap();
        assert!(mm_rows.iter().all(|r| r.get("object") != Some(&Value::Integer(y1))));
    }

    #[test]
    fn typed_rows_and_dates() {
        let (_, _, records) = run(
            "ex:o a ex:Offer ; ex:price \"12.5\"^^xsd:double ; ex:validTo \"2008-06-20T00:00:00\"^^xsd:dateTime ;
                 ex:deliveryDays \"3\"^^xsd:integer ; ex:seeAlso <http://elsewhere/x> .",
        );
        let offer = rows(&records, "offer")[0];
        assert_eq!(offer.get("price"), Some(&Value::Real(12.5)));
        assert_eq!(offer.get("valid_to"), Some(&Value::Integer(1_213_920_000_000)));
        assert_eq!(offer.get("delivery_days"), Some(&Value::Integer(3)));
        assert_eq!(offer.get("see_also"), Some(&Value::Text("http://elsewhere/x".into())));
    }

    #[test]
    fn one_to_many_column_holds_referrer() {
        let (_, ids, records) = run(
            "ex:bulba a ex:Species ; ex:speciesOf ex:p1 , ex:p2 . ex:p1 a ex:Pokemon . ex:p2 a ex:Pokemon . ex:p3 a ex:Pokemon .",
        );
        let bulba = ids.id(&Iri::new("urn:ex:bulba").unwrap()).unwrap();
        let pokemon = rows(&records, "pokemon");
        assert_eq!(pokemon.len(), 3);
        assert_eq!(pokemon[0].get("species_of"), Some(&Value::Integer(bulba)));
        assert_eq!(pokemon[1].get("species_of"), Some(&Value::Integer(bulba)));
        assert_eq!(pokemon[2].get("species_of"), Some(&Value::Null));
    }

    #[test]
    fn lang_rows_carry_tags() {
        let (_, _, records) = run("ex:r a ex:Review ; ex:text \"good\"@en , \"gut\"@de .");
        let text = rows(&records, "mn_review_text");
        assert_eq!(text.len(), 2);
        assert_eq!(text[0].get("value"), Some(&Value::Text("good".into())));
        assert_eq!(text[0].get("lang"), Some(&Value::Text("en".into())));
    }

    #[test]
    fn sequential_matches_parallel() {
        let body = "ex:a a ex:C , ex:D ; ex:p ex:b , ex:c ; ex:q \"1\" . ex:b a ex:D ; ex:p ex:a . ex:c a ex:D ; ex:p ex:a .";
        let g = parse_turtle(&format!("@prefix ex: <urn:ex:> .\n{body}")).unwrap();
        let c = discover_classes(&g);
        let schema = build_schema(&c, &classify_properties(&g, &c));
        let ids = assign_ids(&g);
        assert_eq!(
            populate_with(&g, &c, &schema, &ids, Exec::Sequential),
            populate_with(&g, &c, &schema, &ids, Exec::Parallel)
        );
    }
}
