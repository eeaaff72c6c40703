use std::cmp::Ordering;

use regex::Regex;

use super::{Comparison, Expr, Op, RqlError};
use crate::analysis::StorageClass;
use crate::entity::{EntityShape, Item, JsonEntity};
use crate::par::Exec;
use crate::relational::{ObjectKind, Value};

#[derive(Debug, Clone, Copy)]
enum Target {
    Id,
    Column(usize),
    List(usize),
}

#[derive(Debug, Clone)]
enum Arg {
    Num(f64),
    Text(String),
}

#[derive(Debug, Clone)]
enum Node {
    And(Vec<Node>),
    Or(Vec<Node>),
    Cmp { target: Target, op: Op, args: Vec<Arg>, regex: Option<Regex> },
}

/// An expression resolved against one entity shape. All selector, operator
/// and argument errors surface at compile time; matching cannot fail.
#[derive(Debug, Clone)]
pub struct Filter {
    root: Node,
}

impl Filter {
    pub fn compile(expr: &Expr, shape: &EntityShape) -> Result<Filter, RqlError> {
        Ok(Filter { root: compile(expr, shape)? })
    }

    pub fn matches(&self, entity: &JsonEntity) -> bool {
        eval(&self.root, entity)
    }

    /// Keeps matching entities in input order.
    pub fn apply(&self, entities: Vec<JsonEntity>, exec: Exec) -> Vec<JsonEntity> {
        exec.try_filter(entities, |e| Ok::<_, std::convert::Infallible>(self.matches(e))).unwrap_or_else(|e| match e {})
    }
}

/// Compiles and evaluates in one step.
pub fn evaluate(expr: &Expr, shape: &EntityShape, entity: &JsonEntity) -> Result<bool, RqlError> {
    Filter::compile(expr, shape).map(|f| f.matches(entity))
}

fn compile(expr: &Expr, shape: &EntityShape) -> Result<Node, RqlError> {
    match expr {
        Expr::And(c) => c.iter().map(|e| compile(e, shape)).collect::<Result<_, _>>().map(Node::And),
        Expr::Or(c) => c.iter().map(|e| compile(e, shape)).collect::<Result<_, _>>().map(Node::Or),
        Expr::Comparison(c) => compile_cmp(c, shape),
    }
}

fn compile_cmp(c: &Comparison, shape: &EntityShape) -> Result<Node, RqlError> {
    let incompatible = || RqlError::Incompatible { selector: c.selector.clone(), op: c.op.token() };
    let (target, class, list_kind) = if c.selector == "id" {
        (Target::Id, StorageClass::Integer, None)
    } else if let Some((i, col)) = shape.column(&c.selector) {
        let class = if col.references.is_some() { StorageClass::Integer } else { col.storage_class };
        (Target::Column(i), class, None)
    } else if let Some((i, list)) = shape.list(&c.selector) {
        let class = match list.object_kind {
            ObjectKind::EntityRef | ObjectKind::TypeRef => StorageClass::Integer,
            ObjectKind::Value => list.value_class,
            ObjectKind::DanglingUri | ObjectKind::LangValue => StorageClass::Text,
        };
        (Target::List(i), class, Some(list.object_kind))
    } else {
        return Err(RqlError::UnknownSelector(c.selector.clone()));
    };

    match c.op {
        Op::Lt | Op::Gt | Op::Le | Op::Ge if list_kind.is_some() => return Err(incompatible()),
        Op::Lang if list_kind != Some(ObjectKind::LangValue) => return Err(incompatible()),
        _ => {}
    }

    let mut regex = None;
    let args = match c.op {
        Op::Regex => {
            let pattern = &c.args[0];
            regex = Some(Regex::new(pattern).map_err(|e| RqlError::Regex { pattern: pattern.clone(), message: e.to_string() })?);
            Vec::new()
        }
        Op::Lang => vec![Arg::Text(c.args[0].to_ascii_lowercase())],
        _ if class.is_numeric() => c
            .args
            .iter()
            .map(|a| {
                a.parse::<f64>()
                    .ok()
                    .filter(|f| !f.is_nan())
                    .map(Arg::Num)
                    .ok_or_else(|| RqlError::BadArgument { selector: c.selector.clone(), arg: a.clone() })
            })
            .collect::<Result<_, _>>()?,
        _ => c.args.iter().cloned().map(Arg::Text).collect(),
    };
    Ok(Node::Cmp { target, op: c.op, args, regex })
}

/// `None` when the cell is null.
fn compare(cell: &Value, arg: &Arg) -> Option<Ordering> {
    match (cell, arg) {
        (Value::Null, _) => None,
        (Value::Integer(i), Arg::Num(n)) => (*i as f64).partial_cmp(n),
        (Value::Real(r), Arg::Num(n)) => r.partial_cmp(n),
        // text left over from failed coercion in a numeric column
        (other, Arg::Num(n)) => Some(other.to_string().cmp(&n.to_string())),
        (other, Arg::Text(s)) => Some(other.to_string().as_str().cmp(s.as_str())),
    }
}

fn scalar_holds(op: Op, cell: &Value, args: &[Arg], regex: Option<&Regex>) -> bool {
    let eq_any = || args.iter().any(|a| compare(cell, a) == Some(Ordering::Equal));
    let ord = || compare(cell, &args[0]);
    match op {
        Op::Eq | Op::In => eq_any(),
        Op::Ne | Op::Out => !eq_any(),
        Op::Lt => ord() == Some(Ordering::Less),
        Op::Gt => ord() == Some(Ordering::Greater),
        Op::Le => matches!(ord(), Some(Ordering::Less | Ordering::Equal)),
        Op::Ge => matches!(ord(), Some(Ordering::Greater | Ordering::Equal)),
        Op::Regex => !cell.is_null() && regex.is_some_and(|r| r.is_match(&cell.to_string())),
        Op::Lang => false,
    }
}

fn item_value(item: &Item) -> Value {
    match item {
        Item::Value(v) => v.clone(),
        Item::Lang { string, .. } => Value::Text(string.clone()),
    }
}

fn eval(node: &Node, e: &JsonEntity) -> bool {
    match node {
        Node::And(c) => c.iter().all(|n| eval(n, e)),
        Node::Or(c) => c.iter().any(|n| eval(n, e)),
        Node::Cmp { target, op, args, regex } => match target {
            Target::Id => scalar_holds(*op, &Value::Integer(e.id), args, regex.as_ref()),
            Target::Column(i) => scalar_holds(*op, &e.columns[*i], args, regex.as_ref()),
            Target::List(i) => {
                let items = &e.lists[*i];
                let any = |op| items.iter().any(|it| scalar_holds(op, &item_value(it), args, regex.as_ref()));
                match op {
                    Op::Eq | Op::In => any(Op::In),
                    Op::Ne | Op::Out => !any(Op::In),
                    Op::Regex => any(Op::Regex),
                    Op::Lang => {
                        let Arg::Text(tag) = &args[0] else { return false };
                        items.iter().any(|it| matches!(it, Item::Lang { lang: Some(l), .. } if l == tag))
                    }
                    Op::Lt | Op::Gt | Op::Le | Op::Ge => unreachable!("rejected at compile time"),
                }
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::{ShapeColumn, ShapeList};
    use crate::rql::parse_rql;

    fn shape() -> EntityShape {
        let col = |name: &str, class| ShapeColumn { name: name.into(), attribute: name.into(), storage_class: class, references: None };
        EntityShape {
            table: "product".into(),
            columns: vec![col("label", StorageClass::Text), col("price", StorageClass::Real), col("days", StorageClass::Integer)],
            lists: vec![
                ShapeList {
                    table: "mn_product_product_feature".into(),
                    attribute: "productFeatureProductFeature".into(),
                    object_kind: ObjectKind::EntityRef,
                    value_class: StorageClass::Integer,
                    object_table: Some("product_feature".into()),
                },
                ShapeList {
                    table: "mn_product_text".into(),
                    attribute: "text".into(),
                    object_kind: ObjectKind::LangValue,
                    value_class: StorageClass::Text,
                    object_table: None,
                },
            ],
        }
    }

    fn entity() -> JsonEntity {
        JsonEntity {
            id: 3,
            columns: vec![Value::Text("red shoe".into()), Value::Real(9.5), Value::Null],
            lists: vec![
                vec![Item::Value(Value::Integer(4)), Item::Value(Value::Integer(9))],
                vec![Item::Lang { string: "good".into(), lang: Some("en".into()) }],
            ],
        }
    }

    fn eval(q: &str) -> Result<bool, RqlError> {
        evaluate(&parse_rql(q).unwrap(), &shape(), &entity())
    }

    #[test]
    fn list_membership() {
        assert_eq!(eval("productFeatureProductFeature=in=(4)"), Ok(true));
        assert_eq!(eval("productFeatureProductFeature=out=(4)"), Ok(false));
        assert_eq!(eval("productFeatureProductFeature=out=(5,6)"), Ok(true));
        assert_eq!(eval("productFeatureProductFeature==9"), Ok(true));
    }

    #[test]
    fn lang_tags() {
        assert_eq!(eval("text=lang=en"), Ok(true));
        assert_eq!(eval("text=lang=EN"), Ok(true));
        assert_eq!(eval("text=lang=de"), Ok(false));
        assert_eq!(eval("text==good"), Ok(true));
    }

    #[test]
    fn scalars_and_nulls() {
        assert_eq!(eval("price<10;price>=9.5"), Ok(true));
        assert_eq!(eval("price==9.50"), Ok(true));
        assert_eq!(eval("label=regex=^red"), Ok(true));
        assert_eq!(eval("label=regex=blue,id==3"), Ok(true));
        assert_eq!(eval("days==1"), Ok(false));
        assert_eq!(eval("days!=1"), Ok(true));
        assert_eq!(eval("days<1"), Ok(false));
        assert_eq!(eval("days=regex=."), Ok(false));
        assert_eq!(eval("label>apple"), Ok(true));
    }

    #[test]
    fn numeric_is_decided_by_storage_class() {
        // lexicographically "10" < "9", numerically not
        assert_eq!(eval("price<10"), Ok(true));
        assert_eq!(eval("label<10"), Ok(false));
    }

    #[test]
    fn errors() {
        assert_eq!(eval("nope==1"), Err(RqlError::UnknownSelector("nope".into())));
        assert!(matches!(eval("productFeatureProductFeature<3"), Err(RqlError::Incompatible { .. })));
        assert!(matches!(eval("label=lang=en"), Err(RqlError::Incompatible { .. })));
        assert!(matches!(eval("label=regex=\"(\""), Err(RqlError::Regex { .. })));
        assert!(matches!(eval("price==cheap"), Err(RqlError::BadArgument { .. })));
    }

    #[test]
    fn in_and_out_complement_on_scalars() {
        for v in ["red shoe", "blue"] {
            let a = eval(&format!("label=in=(\"{v}\")")).unwrap();
            let b = eval(&format!("label=out=(\"{v}\")")).unwrap();
            assert_ne!(a, b);
        }
    }

    #[test]
    fn batch_filter_strategies_agree() {
        let f = Filter::compile(&parse_rql("id=in=(1,3,5)").unwrap(), &shape()).unwrap();
        let entities: Vec<JsonEntity> = (1..=6).map(|id| JsonEntity { id, ..entity() }).collect();
        let seq = f.apply(entities.clone(), Exec::Sequential);
        let par = f.apply(entities, Exec::Parallel);
        assert_eq!(seq, par);
        assert_eq!(seq.iter().map(|e| e.id).collect::<Vec<_>>(), [1, 3, 5]);
    }
}
