//! SQL text for the generated schema and records, and direct creation of
//! the SQLite database file.

use std::fmt::Write as _;
use std::path::Path;

use rusqlite::Connection;

use crate::entity::attribute_comment;
use crate::relational::{ColumnKind, ManyToManyTable, ObjectKind, Record, RelationalSchema, ResourceIdMap, Value, RES_ID_TABLE};

#[derive(Debug, thiserror::Error)]
pub enum DbError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("database error: {0}")]
    Sqlite(#[from] rusqlite::Error),
}

pub fn quote_ident(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\"\""))
}

fn mm_ddl(m: &ManyToManyTable) -> String {
    let subject = format!(
        "{} INTEGER NOT NULL REFERENCES {}(\"id\")",
        quote_ident(m.subject_column()),
        quote_ident(&m.subject_table)
    );
    let object = match (m.object_kind, &m.object_table) {
        (ObjectKind::EntityRef, Some(t)) => format!("{} INTEGER NOT NULL REFERENCES {}(\"id\")", quote_ident("object"), quote_ident(t)),
        (kind, _) => format!("{} {} NOT NULL", quote_ident(kind.object_column()), m.value_class.sql_type()),
    };
    let mut cols = vec![subject, object];
    if m.lang_column {
        cols.push(format!("{} TEXT", quote_ident("lang")));
    }
    format!("CREATE TABLE {} ({} {});", quote_ident(&m.name), attribute_comment(&m.attribute), cols.join(", "))
}

/// `CREATE TABLE` statements, one per line: `_res_id`, entity tables, then
/// many-to-many tables. Foreign keys are declared, not enforced.
pub fn emit_ddl(schema: &RelationalSchema) -> String {
    let mut out = format!(
        "CREATE TABLE {} (\"uri\" TEXT PRIMARY KEY, \"id\" INTEGER UNIQUE);\n",
        quote_ident(RES_ID_TABLE)
    );
    for t in &schema.entity_tables {
        let cols: Vec<String> = t
            .columns
            .iter()
            .map(|c| match (c.kind, &c.references) {
                (ColumnKind::Id, _) => format!("{} INTEGER PRIMARY KEY", quote_ident(&c.name)),
                (_, Some(r)) => format!("{} INTEGER REFERENCES {}(\"id\")", quote_ident(&c.name), quote_ident(r)),
                _ => format!("{} {}", quote_ident(&c.name), c.storage_class.sql_type()),
            })
            .collect();
        let _ = writeln!(out, "CREATE TABLE {} ({});", quote_ident(&t.name), cols.join(", "));
    }
    for m in &schema.mm_tables {
        out.push_str(&mm_ddl(m));
        out.push('\n');
    }
    out
}

fn res_id_records(ids: &ResourceIdMap) -> impl Iterator<Item = Record> + '_ {
    ids.iter().map(|(iri, id)| Record {
        table: RES_ID_TABLE.to_string(),
        values: vec![("uri".into(), Value::Text(iri.as_str().to_string())), ("id".into(), Value::Integer(id))],
    })
}

fn insert_line(r: &Record) -> String {
    let cols: Vec<String> = r.values.iter().map(|(c, _)| quote_ident(c)).collect();
    let vals: Vec<String> = r.values.iter().map(|(_, v)| v.to_sql_literal()).collect();
    format!("INSERT INTO {} ({}) VALUES ({});", quote_ident(&r.table), cols.join(","), vals.join(","))
}

/// One `INSERT` per line, ordered by table name, `_res_id` rows by id and
/// the other records in the order [`crate::relational::populate`] yields.
pub fn emit_dml(records: &[Record], ids: &ResourceIdMap) -> String {
    let mut tables: Vec<&str> = records.iter().map(|r| r.table.as_str()).collect();
    tables.push(RES_ID_TABLE);
    tables.sort_unstable();
    tables.dedup();
    let mut out = String::new();
    for table in tables {
        if table == RES_ID_TABLE {
            for r in res_id_records(ids) {
                out.push_str(&insert_line(&r));
                out.push('\n');
            }
        }
        for r in records.iter().filter(|r| r.table == table) {
            out.push_str(&insert_line(r));
            out.push('\n');
        }
    }
    out
}

/// Full script: DDL then DML inside one transaction, with foreign key
/// enforcement off since rows load in table name order.
pub fn emit_dump(schema: &RelationalSchema, records: &[Record], ids: &ResourceIdMap) -> String {
    format!("PRAGMA foreign_keys=OFF;\n{}BEGIN TRANSACTION;\n{}COMMIT;\n", emit_ddl(schema), emit_dml(records, ids))
}

/// Writes a fresh database at `path`, replacing any existing file. Rows go
/// through prepared statements, not through the dump text.
pub fn create_database(
    path: &Path,
    schema: &RelationalSchema,
    records: &[Record],
    ids: &ResourceIdMap,
) -> Result<(), DbError> {
    match std::fs::remove_file(path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e.into()),
        _ => {}
    }
    let mut conn = Connection::open(path)?;
    conn.pragma_update(None, "foreign_keys", false)?;
    conn.execute_batch(&emit_ddl(schema))?;
    let tx = conn.transaction()?;
    for r in res_id_records(ids).chain(records.iter().cloned()) {
        let cols: Vec<String> = r.values.iter().map(|(c, _)| quote_ident(c)).collect();
        let marks: Vec<String> = (1..=r.values.len()).map(|i| format!("?{i}")).collect();
        let sql = format!("INSERT INTO {} ({}) VALUES ({})", quote_ident(&r.table), cols.join(","), marks.join(","));
        let mut stmt = tx.prepare_cached(&sql)?;
        stmt.execute(rusqlite::params_from_iter(r.values.iter().map(|(_, v)| v)))?;
    }
    tx.commit()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{classify_properties, discover_classes};
    use crate::relational::{assign_ids, build_schema, populate};
    use crate::rdf::parse_turtle;

    #[test]
    fn empty_schema_has_only_res_id() {
        let ddl = emit_ddl(&RelationalSchema::default());
        assert_eq!(ddl, "CREATE TABLE \"_res_id\" (\"uri\" TEXT PRIMARY KEY, \"id\" INTEGER UNIQUE);\n");
        assert_eq!(emit_dml(&[], &ResourceIdMap::default()), "");
    }

    #[test]
    fn escaping_in_inserts() {
        let r = Record {
            table: "x".into(),
            values: vec![("id".into(), Value::Integer(1)), ("label".into(), Value::Text("O'Brien".into()))],
        };
        assert_eq!(insert_line(&r), "INSERT INTO \"x\" (\"id\",\"label\") VALUES (1,'O''Brien');");
    }

    #[test]
    fn lang_table_ddl() {
        let g = parse_turtle("@prefix ex: <urn:ex:> . ex:r a ex:Review ; ex:text \"good\"@en .").unwrap();
        let c = discover_classes(&g);
        let s = build_schema(&c, &classify_properties(&g, &c));
        let ddl = emit_ddl(&s);
        assert!(ddl.contains(
            "CREATE TABLE \"mn_review_text\" (/* attribute=text */ \"subject\" INTEGER NOT NULL REFERENCES \"review\"(\"id\"), \"value\" TEXT NOT NULL, \"lang\" TEXT);"
        ));
    }

    #[test]
    fn database_matches_dump() {
        let g = parse_turtle(
            "@prefix ex: <urn:ex:> . ex:a a ex:Order ; ex:note \"x\\ny\" ; ex:p ex:b , ex:c . ex:b a ex:Order ; ex:p ex:a . ex:c a ex:Order ; ex:p ex:a .",
        )
        .unwrap();
        let c = discover_classes(&g);
        let s = build_schema(&c, &classify_properties(&g, &c));
        let ids = assign_ids(&g);
        let records = populate(&g, &c, &s, &ids);
        let dir = tempfile::tempdir().unwrap();
        let direct = dir.path().join("direct.db");
        create_database(&direct, &s, &records, &ids).unwrap();
        let reloaded = Connection::open_in_memory().unwrap();
        reloaded.execute_batch(&emit_dump(&s, &records, &ids)).unwrap();
        let direct = Connection::open(&direct).unwrap();
        let dump_rows = |conn: &Connection, table: &str| -> Vec<Vec<Value>> {
            let mut stmt = conn.prepare(&format!("SELECT * FROM {}", quote_ident(table))).unwrap();
            let n = stmt.column_count();
            stmt.query_map([], |r| (0..n).map(|i| r.get(i)).collect()).unwrap().map(Result::unwrap).collect()
        };
        let tables: Vec<&str> = s.entity_tables.iter().map(|t| t.name.as_str()).chain(s.mm_tables.iter().map(|m| m.name.as_str())).collect();
        assert_eq!(tables, ["order", "mn_order_p"]);
        for table in tables.into_iter().chain(["_res_id"]) {
            assert_eq!(dump_rows(&direct, table), dump_rows(&reloaded, table), "{table}");
        }
        assert_eq!(dump_rows(&direct, "_res_id").len(), 4);
    }
}
