use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rdfforge_core::entity::{entity_to_json, json_to_entity, shapes_from_db, EntityPatch, EntityShape, Item, JsonEntity};
use rdfforge_core::rdf::Skolemizer;
use rdfforge_core::relational::{ObjectKind, Value, RES_ID_TABLE};
use rdfforge_core::rql::{Expr, Filter};
use rdfforge_core::sql::quote_ident;
use rdfforge_core::Exec;
use rusqlite::{params, Connection, OpenFlags, OptionalExtension};
use serde_json::Value as Json;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Conflict(String),
    #[error("database has no `{RES_ID_TABLE}` table; was it generated by rdfforge?")]
    MissingResId,
    #[error("database error: {0}")]
    Db(#[from] rusqlite::Error),
}

pub type Result<T> = std::result::Result<T, StoreError>;

/// Access to a generated database. Reads open their own read-only
/// connection; writes are serialized through one connection.
pub struct Store {
    path: PathBuf,
    writer: Mutex<Connection>,
    shapes: BTreeMap<String, EntityShape>,
    skolem: Skolemizer,
}

impl Store {
    /// Fails when the file lacks `_res_id`. `base` is the namespace of IRIs
    /// minted for created entities.
    pub fn open(path: &Path, base: &str) -> Result<Store> {
        let writer = Connection::open_with_flags(path, OpenFlags::SQLITE_OPEN_READ_WRITE | OpenFlags::SQLITE_OPEN_NO_MUTEX)?;
        writer.busy_timeout(std::time::Duration::from_secs(5))?;
        // referential integrity is maintained by the store itself
        writer.pragma_update(None, "foreign_keys", false)?;
        let has_res_id: bool = writer.query_row(
            "SELECT EXISTS (SELECT 1 FROM sqlite_master WHERE type = 'table' AND name = ?1)",
            [RES_ID_TABLE],
            |r| r.get(0),
        )?;
        if !has_res_id {
            return Err(StoreError::MissingResId);
        }
        let shapes = shapes_from_db(&writer)?.into_iter().map(|s| (s.table.clone(), s)).collect();
        Ok(Store { path: path.to_path_buf(), writer: Mutex::new(writer), shapes, skolem: Skolemizer::new(base, false) })
    }

    /// Entity table names in order.
    pub fn tables(&self) -> impl Iterator<Item = &str> {
        self.shapes.keys().map(String::as_str)
    }

    pub fn shape(&self, table: &str) -> Result<&EntityShape> {
        self.shapes.get(table).ok_or_else(|| StoreError::NotFound(format!("no table `{table}`")))
    }

    fn reader(&self) -> Result<Connection> {
        let conn = Connection::open_with_flags(&self.path, OpenFlags::SQLITE_OPEN_READ_ONLY | OpenFlags::SQLITE_OPEN_NO_MUTEX)?;
        conn.busy_timeout(std::time::Duration::from_secs(5))?;
        Ok(conn)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Connection> {
        self.writer.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Entities in id order, filtered, then windowed.
    pub fn list(&self, table: &str, filter: Option<&Expr>, offset: usize, limit: usize, exec: Exec) -> Result<Vec<Json>> {
        let shape = self.shape(table)?;
        let filter = filter
            .map(|e| Filter::compile(e, shape))
            .transpose()
            .map_err(|e| StoreError::BadRequest(e.to_string()))?;
        let mut entities = load(&self.reader()?, shape, None)?;
        if let Some(f) = filter {
            entities = f.apply(entities, exec);
        }
        Ok(entities.iter().skip(offset).take(limit).map(|e| entity_to_json(shape, e)).collect())
    }

    pub fn get(&self, table: &str, id: i64) -> Result<Json> {
        let shape = self.shape(table)?;
        get_one(&self.reader()?, shape, id)
    }

    pub fn resolve(&self, uri: &str) -> Result<i64> {
        self.reader()?
            .query_row(&format!("SELECT \"id\" FROM {} WHERE \"uri\" = ?1", quote_ident(RES_ID_TABLE)), [uri], |r| r.get(0))
            .optional()?
            .ok_or_else(|| StoreError::NotFound(format!("unknown URI <{uri}>")))
    }

    pub fn create(&self, table: &str, body: &Json) -> Result<Json> {
        let shape = self.shape(table)?;
        let entity = parse_body(shape, body)?.into_entity(0);
        let mut conn = self.lock();
        let tx = conn.transaction()?;
        check_references(&tx, shape, &entity.columns.iter().cloned().map(Some).collect::<Vec<_>>(), &entity.lists.iter().cloned().map(Some).collect::<Vec<_>>())?;
        let id: i64 = tx.query_row(
            &format!("SELECT COALESCE(MAX(\"id\"), 0) + 1 FROM {}", quote_ident(RES_ID_TABLE)),
            [],
            |r| r.get(0),
        )?;
        tx.execute(
            &format!("INSERT INTO {} (\"uri\", \"id\") VALUES (?1, ?2)", quote_ident(RES_ID_TABLE)),
            params![self.skolem.mint().as_str(), id],
        )?;
        let mut cols = vec![quote_ident("id")];
        cols.extend(shape.columns.iter().map(|c| quote_ident(&c.name)));
        let marks: Vec<String> = (1..=cols.len()).map(|i| format!("?{i}")).collect();
        let mut values = vec![Value::Integer(id)];
        values.extend(entity.columns.iter().cloned());
        tx.execute(
            &format!("INSERT INTO {} ({}) VALUES ({})", quote_ident(table), cols.join(", "), marks.join(", ")),
            rusqlite::params_from_iter(values.iter()),
        )?;
        for (list, items) in shape.lists.iter().zip(&entity.lists) {
            insert_items(&tx, list, id, items)?;
        }
        tx.commit()?;
        get_one(&conn, shape, id)
    }

    /// PUT replaces every member (absent → null or empty); PATCH only the
    /// present ones.
    pub fn update(&self, table: &str, id: i64, body: &Json, total: bool) -> Result<Json> {
        let shape = self.shape(table)?;
        let mut patch = parse_body(shape, body)?;
        if total {
            let e = patch.into_entity(id);
            patch = EntityPatch { columns: e.columns.into_iter().map(Some).collect(), lists: e.lists.into_iter().map(Some).collect() };
        }
        let mut conn = self.lock();
        let tx = conn.transaction()?;
        if !exists(&tx, table, id)? {
            return Err(not_found(table, id));
        }
        check_references(&tx, shape, &patch.columns, &patch.lists)?;
        let sets: Vec<(String, &Value)> = shape
            .columns
            .iter()
            .zip(&patch.columns)
            .filter_map(|(c, v)| v.as_ref().map(|v| (c.name.clone(), v)))
            .collect();
        if !sets.is_empty() {
            let assignments: Vec<String> =
                sets.iter().enumerate().map(|(i, (c, _))| format!("{} = ?{}", quote_ident(c), i + 2)).collect();
            let mut values: Vec<&Value> = Vec::new();
            let id_value = Value::Integer(id);
            values.push(&id_value);
            values.extend(sets.iter().map(|(_, v)| *v));
            tx.execute(
                &format!("UPDATE {} SET {} WHERE \"id\" = ?1", quote_ident(table), assignments.join(", ")),
                rusqlite::params_from_iter(values),
            )?;
        }
        for (list, items) in shape.lists.iter().zip(&patch.lists) {
            if let Some(items) = items {
                tx.execute(&format!("DELETE FROM {} WHERE \"subject\" = ?1", quote_ident(&list.table)), [id])?;
                insert_items(&tx, list, id, items)?;
            }
        }
        tx.commit()?;
        get_one(&conn, shape, id)
    }

    /// Removes the record, the list rows of this table's entity and the
    /// list rows pointing at it, and nulls columns referring to it. The
    /// `_res_id` entry stays so the id is never reused.
    pub fn delete(&self, table: &str, id: i64) -> Result<()> {
        self.shape(table)?;
        let mut conn = self.lock();
        let tx = conn.transaction()?;
        if !exists(&tx, table, id)? {
            return Err(not_found(table, id));
        }
        tx.execute(&format!("DELETE FROM {} WHERE \"id\" = ?1", quote_ident(table)), [id])?;
        for shape in self.shapes.values() {
            for list in &shape.lists {
                if shape.table == table {
                    tx.execute(&format!("DELETE FROM {} WHERE \"subject\" = ?1", quote_ident(&list.table)), [id])?;
                }
                if list.object_kind == ObjectKind::EntityRef && list.object_table.as_deref() == Some(table) {
                    tx.execute(&format!("DELETE FROM {} WHERE \"object\" = ?1", quote_ident(&list.table)), [id])?;
                }
            }
            for col in shape.columns.iter().filter(|c| c.references.as_deref() == Some(table)) {
                tx.execute(
                    &format!("UPDATE {} SET {} = NULL WHERE {} = ?1", quote_ident(&shape.table), quote_ident(&col.name), quote_ident(&col.name)),
                    [id],
                )?;
            }
        }
        tx.commit()?;
        Ok(())
    }
}

fn not_found(table: &str, id: i64) -> StoreError {
    StoreError::NotFound(format!("no `{table}` with id {id}"))
}

fn parse_body(shape: &EntityShape, body: &Json) -> Result<EntityPatch> {
    json_to_entity(shape, body).map_err(|e| StoreError::BadRequest(e.to_string()))
}

fn exists(conn: &Connection, table: &str, id: i64) -> Result<bool> {
    Ok(conn.query_row(&format!("SELECT EXISTS (SELECT 1 FROM {} WHERE \"id\" = ?1)", quote_ident(table)), [id], |r| r.get(0))?)
}

fn check_references(conn: &Connection, shape: &EntityShape, columns: &[Option<Value>], lists: &[Option<Vec<Item>>]) -> Result<()> {
    let require = |table: &str, id: i64| -> Result<()> {
        if exists(conn, table, id)? {
            Ok(())
        } else {
            Err(StoreError::Conflict(format!("referenced `{table}` id {id} does not exist")))
        }
    };
    for (col, v) in shape.columns.iter().zip(columns) {
        if let (Some(table), Some(Value::Integer(id))) = (&col.references, v) {
            require(table, *id)?;
        }
    }
    for (list, items) in shape.lists.iter().zip(lists) {
        let target = match (list.object_kind, &list.object_table) {
            (ObjectKind::EntityRef, Some(t)) => t.as_str(),
            (ObjectKind::TypeRef, _) => RES_ID_TABLE,
            _ => continue,
        };
        for item in items.iter().flatten() {
            if let Item::Value(Value::Integer(id)) = item {
                require(target, *id)?;
            }
        }
    }
    Ok(())
}

fn insert_items(conn: &Connection, list: &rdfforge_core::entity::ShapeList, subject: i64, items: &[Item]) -> Result<()> {
    for item in items {
        match item {
            Item::Lang { string, lang } => conn.execute(
                &format!("INSERT INTO {} (\"subject\", \"value\", \"lang\") VALUES (?1, ?2, ?3)", quote_ident(&list.table)),
                params![subject, string, lang],
            )?,
            Item::Value(v) => conn.execute(
                &format!("INSERT INTO {} (\"subject\", {}) VALUES (?1, ?2)", quote_ident(&list.table), quote_ident(list.object_column())),
                params![subject, v],
            )?,
        };
    }
    Ok(())
}

fn get_one(conn: &Connection, shape: &EntityShape, id: i64) -> Result<Json> {
    load(conn, shape, Some(id))?
        .first()
        .map(|e| entity_to_json(shape, e))
        .ok_or_else(|| not_found(&shape.table, id))
}

/// Entities of one table with their lists, in id order.
pub(crate) fn load(conn: &Connection, shape: &EntityShape, id: Option<i64>) -> Result<Vec<JsonEntity>> {
    let filter = if id.is_some() { " WHERE \"id\" = ?1" } else { "" };
    let mut cols = vec![quote_ident("id")];
    cols.extend(shape.columns.iter().map(|c| quote_ident(&c.name)));
    let n = shape.columns.len();
    let mut stmt = conn.prepare(&format!("SELECT {} FROM {}{filter} ORDER BY \"id\"", cols.join(", "), quote_ident(&shape.table)))?;
    let params = rusqlite::params_from_iter(id);
    let mut entities: Vec<JsonEntity> = stmt
        .query_map(params, |r| {
            Ok(JsonEntity {
                id: r.get(0)?,
                columns: (1..=n).map(|i| r.get(i)).collect::<rusqlite::Result<_>>()?,
                lists: vec![Vec::new(); shape.lists.len()],
            })
        })?
        .collect::<rusqlite::Result<_>>()?;
    let index: HashMap<i64, usize> = entities.iter().enumerate().map(|(i, e)| (e.id, i)).collect();
    let filter = if id.is_some() { " WHERE \"subject\" = ?1" } else { "" };
    for (li, list) in shape.lists.iter().enumerate() {
        let lang = list.object_kind == ObjectKind::LangValue;
        let extra = if lang { ", \"lang\"" } else { "" };
        let mut stmt = conn.prepare(&format!(
            "SELECT \"subject\", {}{extra} FROM {}{filter} ORDER BY \"subject\", rowid",
            quote_ident(list.object_column()),
            quote_ident(&list.table)
        ))?;
        let rows = stmt.query_map(rusqlite::params_from_iter(id), |r| {
            let subject: i64 = r.get(0)?;
            let item = if lang {
                let string: Value = r.get(1)?;
                Item::Lang { string: string.to_string(), lang: r.get(2)? }
            } else {
                Item::Value(r.get(1)?)
            };
            Ok((subject, item))
        })?;
        for row in rows {
            let (subject, item) = row?;
            if let Some(&i) = index.get(&subject) {
                entities[i].lists[li].push(item);
            }
        }
    }
    Ok(entities)
}
