//! JSON view of entity records: the shape of an entity table (columns plus
//! joinable many-to-many lists) and conversion in both directions.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use rusqlite::Connection;
use serde_json::{Map, Number, Value as Json};

use crate::analysis::StorageClass;
use crate::relational::{entity_attributes, ObjectKind, RelationalSchema, Value, RES_ID_TABLE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeColumn {
    pub name: String,
    pub attribute: String,
    pub storage_class: StorageClass,
    /// Entity table referenced by this column's ids.
    pub references: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeList {
    /// Many-to-many table name.
    pub table: String,
    pub attribute: String,
    pub object_kind: ObjectKind,
    pub value_class: StorageClass,
    pub object_table: Option<String>,
}

impl ShapeList {
    pub fn object_column(&self) -> &'static str {
        self.object_kind.object_column()
    }
}

/// Attribute layout of one entity table: `id`, the columns, then the
/// lists with the type list first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityShape {
    pub table: String,
    /// Without `id`.
    pub columns: Vec<ShapeColumn>,
    pub lists: Vec<ShapeList>,
}

impl EntityShape {
    pub fn column(&self, attribute: &str) -> Option<(usize, &ShapeColumn)> {
        self.columns.iter().enumerate().find(|(_, c)| c.attribute == attribute)
    }

    pub fn list(&self, attribute: &str) -> Option<(usize, &ShapeList)> {
        self.lists.iter().enumerate().find(|(_, l)| l.attribute == attribute)
    }
}

fn list_order(kind: ObjectKind, table: &str) -> (bool, String) {
    (kind != ObjectKind::TypeRef, table.to_string())
}

/// Shapes of every entity table, in table name order.
pub fn shapes_from_schema(schema: &RelationalSchema) -> Vec<EntityShape> {
    schema
        .entity_tables
        .iter()
        .map(|t| {
            let (attrs, _) = entity_attributes(t.columns.iter().map(|c| c.name.as_str()), &[]);
            let columns = t
                .columns
                .iter()
                .filter(|c| c.name != "id")
                .zip(attrs)
                .map(|(c, attribute)| ShapeColumn {
                    name: c.name.clone(),
                    attribute,
                    storage_class: c.storage_class,
                    references: c.references.clone(),
                })
                .collect();
            let mut lists: Vec<ShapeList> = schema
                .mm_tables_of(&t.name)
                .map(|m| ShapeList {
                    table: m.name.clone(),
                    attribute: m.attribute.clone(),
                    object_kind: m.object_kind,
                    value_class: m.value_class,
                    object_table: m.object_table.clone(),
                })
                .collect();
            lists.sort_by_key(|l| list_order(l.object_kind, &l.table));
            EntityShape { table: t.name.clone(), columns, lists }
        })
        .collect()
}

/// Marker embedded in many-to-many DDL carrying the list attribute name.
pub(crate) fn attribute_comment(attribute: &str) -> String {
    format!("/* attribute={attribute} */")
}

fn parse_attribute_comment(sql: &str) -> Option<String> {
    let start = sql.find("/* attribute=")? + "/* attribute=".len();
    let end = sql[start..].find(" */")?;
    Some(sql[start..start + end].to_string())
}

struct TableInfo {
    name: String,
    sql: String,
    /// (name, declared type)
    columns: Vec<(String, String)>,
    /// column → referenced table
    foreign_keys: Vec<(String, String)>,
}

fn table_info(conn: &Connection, name: String, sql: String) -> rusqlite::Result<TableInfo> {
    let quoted = name.replace('"', "\"\"");
    let columns = conn
        .prepare(&format!("PRAGMA table_info(\"{quoted}\")"))?
        .query_map([], |r| Ok((r.get::<_, String>(1)?, r.get::<_, String>(2)?)))?
        .collect::<Result<_, _>>()?;
    let foreign_keys = conn
        .prepare(&format!("PRAGMA foreign_key_list(\"{quoted}\")"))?
        .query_map([], |r| Ok((r.get::<_, String>(3)?, r.get::<_, String>(2)?)))?
        .collect::<Result<_, _>>()?;
    Ok(TableInfo { name, sql, columns, foreign_keys })
}

/// Rebuilds the entity shapes from a generated database alone. Entity
/// tables are the ones with an `id` column; the others are many-to-many
/// tables whose object column name gives their kind.
pub fn shapes_from_db(conn: &Connection) -> rusqlite::Result<Vec<EntityShape>> {
    let tables: Vec<(String, String)> = conn
        .prepare("SELECT name, sql FROM sqlite_master WHERE type = 'table' AND name <> ?1 ORDER BY name")?
        .query_map([RES_ID_TABLE], |r| Ok((r.get(0)?, r.get(1)?)))?
        .collect::<Result<_, _>>()?;
    let infos: Vec<TableInfo> =
        tables.into_iter().map(|(n, s)| table_info(conn, n, s)).collect::<Result<_, _>>()?;
    let fk = |info: &TableInfo, column: &str| {
        info.foreign_keys.iter().find(|(c, _)| c == column).map(|(_, t)| t.clone())
    };
    let has = |info: &TableInfo, column: &str| info.columns.iter().any(|(c, _)| c == column);

    let mut lists: Vec<(String, ShapeList)> = Vec::new();
    for info in infos.iter().filter(|i| !has(i, "id")) {
        let Some(subject_table) = fk(info, "subject") else { continue };
        let (kind, column) = if has(info, "object") {
            (ObjectKind::EntityRef, "object")
        } else if has(info, "type") {
            (ObjectKind::TypeRef, "type")
        } else if has(info, "uri") {
            (ObjectKind::DanglingUri, "uri")
        } else if has(info, "lang") {
            (ObjectKind::LangValue, "value")
        } else {
            (ObjectKind::Value, "value")
        };
        let declared = info.columns.iter().find(|(c, _)| c == column).map_or("", |(_, t)| t.as_str());
        lists.push((
            subject_table,
            ShapeList {
                table: info.name.clone(),
                attribute: parse_attribute_comment(&info.sql).unwrap_or_else(|| column.to_string()),
                object_kind: kind,
                value_class: StorageClass::from_sql_type(declared),
                object_table: fk(info, column),
            },
        ));
    }

    Ok(infos
        .iter()
        .filter(|i| has(i, "id"))
        .map(|info| {
            let names: Vec<&str> = info.columns.iter().map(|(c, _)| c.as_str()).collect();
            let (attrs, _) = entity_attributes(names.iter().copied(), &[]);
            let columns = info
                .columns
                .iter()
                .filter(|(c, _)| c != "id")
                .zip(attrs)
                .map(|((name, declared), attribute)| ShapeColumn {
                    name: name.clone(),
                    attribute,
                    storage_class: StorageClass::from_sql_type(declared),
                    references: fk(info, name),
                })
                .collect();
            let mut own: Vec<ShapeList> =
                lists.iter().filter(|(s, _)| *s == info.name).map(|(_, l)| l.clone()).collect();
            own.sort_by_key(|l| list_order(l.object_kind, &l.table));
            EntityShape { table: info.name.clone(), columns, lists: own }
        })
        .collect())
}

/// One element of a list attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Value(Value),
    Lang { string: String, lang: Option<String> },
}

/// An entity positionally aligned with its [`EntityShape`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonEntity {
    pub id: i64,
    pub columns: Vec<Value>,
    pub lists: Vec<Vec<Item>>,
}

/// Members present in a request body; `None` marks an absent member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityPatch {
    pub columns: Vec<Option<Value>>,
    pub lists: Vec<Option<Vec<Item>>>,
}

impl EntityPatch {
    /// Total form: absent columns become null, absent lists empty.
    pub fn into_entity(self, id: i64) -> JsonEntity {
        JsonEntity {
            id,
            columns: self.columns.into_iter().map(|c| c.unwrap_or(Value::Null)).collect(),
            lists: self.lists.into_iter().map(Option::unwrap_or_default).collect(),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("request body must be a JSON object")]
    NotAnObject,
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute `{attribute}` expects {expected}")]
    TypeMismatch { attribute: String, expected: &'static str },
}

fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Null => Json::Null,
        Value::Integer(i) => Json::from(*i),
        Value::Real(r) => Number::from_f64(*r).map_or(Json::Null, Json::Number),
        Value::Text(s) => Json::from(s.as_str()),
        Value::Blob(b) => Json::from(BASE64.encode(b)),
    }
}

fn item_to_json(item: &Item) -> Json {
    match item {
        Item::Value(v) => value_to_json(v),
        Item::Lang { string, lang } => {
            let mut m = Map::new();
            m.insert("string".into(), Json::from(string.as_str()));
            m.insert("lang".into(), lang.as_deref().map_or(Json::Null, Json::from));
            Json::Object(m)
        }
    }
}

pub fn entity_to_json(shape: &EntityShape, entity: &JsonEntity) -> Json {
    let mut m = Map::new();
    m.insert("id".into(), Json::from(entity.id));
    for (col, v) in shape.columns.iter().zip(&entity.columns) {
        m.insert(col.attribute.clone(), value_to_json(v));
    }
    for (list, items) in shape.lists.iter().zip(&entity.lists) {
        m.insert(list.attribute.clone(), Json::Array(items.iter().map(item_to_json).collect()));
    }
    Json::Object(m)
}

/// Cell value for a JSON scalar. Strings are accepted in numeric columns
/// because values that failed coercion are stored as text.
fn json_to_value(j: &Json, class: StorageClass, is_ref: bool, attribute: &str) -> Result<Value, ShapeError> {
    let mismatch = |expected| ShapeError::TypeMismatch { attribute: attribute.to_string(), expected };
    if is_ref {
        return j.as_i64().map(Value::Integer).ok_or_else(|| mismatch("an integer id"));
    }
    match (class, j) {
        (StorageClass::Integer, Json::Number(n)) => n.as_i64().map(Value::Integer).ok_or_else(|| mismatch("an integer")),
        (StorageClass::Real, Json::Number(n)) => n.as_f64().map(Value::Real).ok_or_else(|| mismatch("a number")),
        (StorageClass::Blob, Json::String(s)) => Ok(BASE64.decode(s).map_or_else(|_| Value::Text(s.clone()), Value::Blob)),
        (_, Json::String(s)) => Ok(Value::Text(s.clone())),
        (StorageClass::Integer, _) => Err(mismatch("an integer")),
        (StorageClass::Real, _) => Err(mismatch("a number")),
        (StorageClass::Blob, _) => Err(mismatch("a base64 string")),
        (StorageClass::Text, _) => Err(mismatch("a string")),
    }
}

fn json_to_item(j: &Json, list: &ShapeList) -> Result<Item, ShapeError> {
    let mismatch = |expected| ShapeError::TypeMismatch { attribute: list.attribute.clone(), expected };
    match list.object_kind {
        ObjectKind::EntityRef | ObjectKind::TypeRef => {
            j.as_i64().map(|i| Item::Value(Value::Integer(i))).ok_or_else(|| mismatch("an array of integer ids"))
        }
        ObjectKind::DanglingUri => {
            j.as_str().map(|s| Item::Value(Value::Text(s.to_string()))).ok_or_else(|| mismatch("an array of URI strings"))
        }
        ObjectKind::LangValue => {
            let obj = j.as_object().ok_or_else(|| mismatch("an array of {string, lang} objects"))?;
            let string = obj.get("string").and_then(Json::as_str).ok_or_else(|| mismatch("a `string` member"))?;
            let lang = match obj.get("lang") {
                None | Some(Json::Null) => None,
                Some(Json::String(l)) => Some(l.to_ascii_lowercase()),
                Some(_) => return Err(mismatch("a string or null `lang` member")),
            };
            if obj.keys().any(|k| k != "string" && k != "lang") {
                return Err(mismatch("only `string` and `lang` members"));
            }
            Ok(Item::Lang { string: string.to_string(), lang })
        }
        ObjectKind::Value if j.is_null() => Err(mismatch("non-null values")),
        ObjectKind::Value => json_to_value(j, list.value_class, false, &list.attribute).map(Item::Value),
    }
}

/// Parses a request body. An `id` member is accepted and ignored; the
/// target id comes from the route.
pub fn json_to_entity(shape: &EntityShape, body: &Json) -> Result<EntityPatch, ShapeError> {
    let obj = body.as_object().ok_or(ShapeError::NotAnObject)?;
    let mut patch = EntityPatch { columns: vec![None; shape.columns.len()], lists: vec![None; shape.lists.len()] };
    for (key, j) in obj {
        if key == "id" {
            continue;
        }
        if let Some((i, col)) = shape.column(key) {
            patch.columns[i] = Some(if j.is_null() {
                Value::Null
            } else {
                json_to_value(j, col.storage_class, col.references.is_some(), key)?
            });
        } else if let Some((i, list)) = shape.list(key) {
            let arr = j.as_array().ok_or_else(|| ShapeError::TypeMismatch { attribute: key.clone(), expected: "an array" })?;
            patch.lists[i] = Some(arr.iter().map(|item| json_to_item(item, list)).collect::<Result<_, _>>()?);
        } else {
            return Err(ShapeError::UnknownAttribute(key.clone()));
        }
    }
    Ok(patch)
}
