//! Resource query language: `;` is conjunction, `,` disjunction,
//! comparisons are `selector op args`.
//!
//! ```
//! use rdfforge_core::rql::{parse_rql, Expr, Op};
//! let e = parse_rql("deliveryDays<=3;validTo>1600000000000").unwrap();
//! assert!(matches!(e, Expr::And(ref c) if c.len() == 2));
//! assert_eq!(e.to_string(), "deliveryDays<=3;validTo>1600000000000");
//! ```

mod eval;
mod parse;

pub use eval::{evaluate, Filter};
pub use parse::parse_rql;

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    In,
    Out,
    Regex,
    Lang,
}

impl Op {
    pub const ALL: [Op; 10] = [Op::Eq, Op::Ne, Op::Lt, Op::Gt, Op::Le, Op::Ge, Op::In, Op::Out, Op::Regex, Op::Lang];

    pub fn token(self) -> &'static str {
        match self {
            Op::Eq => "==",
            Op::Ne => "!=",
            Op::Lt => "<",
            Op::Gt => ">",
            Op::Le => "<=",
            Op::Ge => ">=",
            Op::In => "=in=",
            Op::Out => "=out=",
            Op::Regex => "=regex=",
            Op::Lang => "=lang=",
        }
    }

    /// `=in=` and `=out=` take a list; everything else one value.
    pub fn takes_list(self) -> bool {
        matches!(self, Op::In | Op::Out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub selector: String,
    pub op: Op,
    /// Non-empty; exactly one element unless the operator takes a list.
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// At least two children.
    And(Vec<Expr>),
    /// At least two children.
    Or(Vec<Expr>),
    Comparison(Comparison),
}

impl Expr {
    pub fn cmp(selector: &str, op: Op, args: &[&str]) -> Expr {
        Expr::Comparison(Comparison {
            selector: selector.to_string(),
            op,
            args: args.iter().map(|a| a.to_string()).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RqlError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown operator `{op}` at {pos}")]
    UnknownOperator { pos: usize, op: String },
    #[error("unknown selector `{0}`")]
    UnknownSelector(String),
    #[error("invalid regex `{pattern}`: {message}")]
    Regex { pattern: String, message: String },
    #[error("operator `{op}` cannot be applied to `{selector}`")]
    Incompatible { selector: String, op: &'static str },
    #[error("`{arg}` is not a valid argument for `{selector}`")]
    BadArgument { selector: String, arg: String },
}

pub(crate) fn is_bare_char(c: char) -> bool {
    !c.is_whitespace() && !"(),;'\"\\".contains(c)
}

fn write_arg(f: &mut fmt::Formatter<'_>, arg: &str) -> fmt::Result {
    // a leading `=` would merge into `<` or `>`
    if !arg.is_empty() && !arg.starts_with('=') && arg.chars().all(is_bare_char) {
        return f.write_str(arg);
    }
    f.write_str("\"")?;
    for c in arg.chars() {
        if c == '"' || c == '\\' {
            f.write_str("\\")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("\"")
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.selector, self.op.token())?;
        if self.op.takes_list() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write_arg(f, a)?;
            }
            f.write_str(")")
        } else {
            write_arg(f, &self.args[0])
        }
    }
}

/// Canonical form; compound children are parenthesized so that the tree
/// shape survives reparsing.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (children, sep) = match self {
            Expr::Comparison(c) => return c.fmt(f),
            Expr::And(c) => (c, ";"),
            Expr::Or(c) => (c, ","),
        };
        for (i, child) in children.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            match child {
                Expr::Comparison(c) => c.fmt(f)?,
                compound => write!(f, "({compound})")?,
            }
        }
        Ok(())
    }
}

pub fn print_rql(expr: &Expr) -> String {
    expr.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_comparisons() {
        assert_eq!(Expr::cmp("a", Op::Eq, &["1"]).to_string(), "a==1");
        assert_eq!(Expr::cmp("type", Op::In, &["5"]).to_string(), "type=in=(5)");
        assert_eq!(Expr::cmp("label", Op::Eq, &["a b"]).to_string(), "label==\"a b\"");
        assert_eq!(Expr::cmp("label", Op::Eq, &[""]).to_string(), "label==\"\"");
        assert_eq!(Expr::cmp("l", Op::Eq, &["x\"y\\"]).to_string(), "l==\"x\\\"y\\\\\"");
    }

    #[test]
    fn prints_nesting() {
        let e = Expr::And(vec![
            Expr::cmp("a", Op::Eq, &["1"]),
            Expr::Or(vec![Expr::cmp("b", Op::Eq, &["2"]), Expr::cmp("c", Op::Eq, &["3"])]),
        ]);
        assert_eq!(e.to_string(), "a==1;(b==2,c==3)");
        assert_eq!(parse_rql(&e.to_string()).unwrap(), e);
    }
}
