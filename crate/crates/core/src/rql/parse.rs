use super::{is_bare_char, Comparison, Expr, Op, RqlError};

/// Parses `or := and (',' and)*; and := comp (';' comp)*;
/// comp := '(' or ')' | selector op args`. Whitespace between tokens is
/// ignored. Positions in errors are byte offsets.
pub fn parse_rql(text: &str) -> Result<Expr, RqlError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.or()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.peek().unwrap())));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek().filter(|c| c.is_whitespace()) {
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> RqlError {
        RqlError::Syntax { pos: self.pos, message: message.into() }
    }

    fn expect(&mut self, c: char) -> Result<(), RqlError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn or(&mut self) -> Result<Expr, RqlError> {
        let mut children = vec![self.and()?];
        while self.eat(',') {
            children.push(self.and()?);
        }
        Ok(if children.len() == 1 { children.pop().unwrap() } else { Expr::Or(children) })
    }

    fn and(&mut self) -> Result<Expr, RqlError> {
        let mut children = vec![self.comp()?];
        while self.eat(';') {
            children.push(self.comp()?);
        }
        Ok(if children.len() == 1 { children.pop().unwrap() } else { Expr::And(children) })
    }

    fn comp(&mut self) -> Result<Expr, RqlError> {
        if self.eat('(') {
            let e = self.or()?;
            self.expect(')')?;
            return Ok(e);
        }
        self.skip_ws();
        let selector = self.selector()?;
        let op = self.op()?;
        let args = self.args(op)?;
        Ok(Expr::Comparison(Comparison { selector, op, args }))
    }

    fn selector(&mut self) -> Result<String, RqlError> {
        let len = self.rest().find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '.')).unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a selector"));
        }
        let s = self.rest()[..len].to_string();
        self.pos += len;
        Ok(s)
    }

    fn op(&mut self) -> Result<Op, RqlError> {
        self.skip_ws();
        let start = self.pos;
        for (token, op) in [("==", Op::Eq), ("!=", Op::Ne), ("<=", Op::Le), (">=", Op::Ge), ("<", Op::Lt), (">", Op::Gt)] {
            if self.rest().starts_with(token) {
                self.pos += token.len();
                return Ok(op);
            }
        }
        if let Some(word) = self.rest().strip_prefix('=') {
            let len = word.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(word.len());
            if word[len..].starts_with('=') && len > 0 {
                let token = &self.rest()[..len + 2];
                if let Some(op) = Op::ALL.into_iter().find(|o| o.token() == token) {
                    self.pos += token.len();
                    return Ok(op);
                }
                return Err(RqlError::UnknownOperator { pos: start, op: token.to_string() });
            }
        }
        Err(self.error("expected an operator"))
    }

    fn args(&mut self, op: Op) -> Result<Vec<String>, RqlError> {
        let args = if self.eat('(') {
            let mut args = vec![self.value()?];
            while self.eat(',') {
                args.push(self.value()?);
            }
            self.expect(')')?;
            args
        } else {
            vec![self.value()?]
        };
        if args.len() > 1 && !op.takes_list() {
            return Err(self.error(format!("`{}` takes a single value", op.token())));
        }
        Ok(args)
    }

    fn value(&mut self) -> Result<String, RqlError> {
        self.skip_ws();
        match self.peek() {
            Some(q @ ('"' | '\'')) => {
                self.pos += 1;
                let mut out = String::new();
                let mut chars = self.rest().char_indices();
                while let Some((i, c)) = chars.next() {
                    match c {
                        '\\' => match chars.next() {
                            Some((_, e)) => out.push(e),
                            None => break,
                        },
                        c if c == q => {
                            self.pos += i + 1;
                            return Ok(out);
                        }
                        c => out.push(c),
                    }
                }
                Err(self.error("unterminated string"))
            }
            _ => {
                let len = self.rest().find(|c: char| !is_bare_char(c)).unwrap_or(self.rest().len());
                if len == 0 {
                    return Err(self.error("expected a value"));
                }
                let v = self.rest()[..len].to_string();
                self.pos += len;
                Ok(v)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_with_and_without_parens() {
        assert_eq!(parse_rql("type=in=(5)").unwrap(), Expr::cmp("type", Op::In, &["5"]));
        assert_eq!(parse_rql("type=in=5").unwrap(), Expr::cmp("type", Op::In, &["5"]));
    }

    #[test]
    fn conjunction() {
        assert_eq!(
            parse_rql("a==1;b==2").unwrap(),
            Expr::And(vec![Expr::cmp("a", Op::Eq, &["1"]), Expr::cmp("b", Op::Eq, &["2"])])
        );
    }

    #[test]
    fn disjunction_of_lists() {
        assert_eq!(
            parse_rql("x=in=(1,2),y=out=(3)").unwrap(),
            Expr::Or(vec![Expr::cmp("x", Op::In, &["1", "2"]), Expr::cmp("y", Op::Out, &["3"])])
        );
    }

    #[test]
    fn and_binds_tighter() {
        assert_eq!(
            parse_rql("a==1;b==2,c==3").unwrap(),
            Expr::Or(vec![
                Expr::And(vec![Expr::cmp("a", Op::Eq, &["1"]), Expr::cmp("b", Op::Eq, &["2"])]),
                Expr::cmp("c", Op::Eq, &["3"]),
            ])
        );
    }

    #[test]
    fn operators_and_values() {
        assert_eq!(parse_rql("deliveryDays<=3").unwrap(), Expr::cmp("deliveryDays", Op::Le, &["3"]));
        assert_eq!(parse_rql("validTo>1600000000000").unwrap(), Expr::cmp("validTo", Op::Gt, &["1600000000000"]));
        assert_eq!(parse_rql("label=regex=red").unwrap(), Expr::cmp("label", Op::Regex, &["red"]));
        assert_eq!(parse_rql("text=lang=en").unwrap(), Expr::cmp("text", Op::Lang, &["en"]));
        assert_eq!(parse_rql("l=='a b'").unwrap(), Expr::cmp("l", Op::Eq, &["a b"]));
        assert_eq!(parse_rql("l==\"x\\\"y\"").unwrap(), Expr::cmp("l", Op::Eq, &["x\"y"]));
        assert_eq!(parse_rql("p!=-2.5e3").unwrap(), Expr::cmp("p", Op::Ne, &["-2.5e3"]));
        assert_eq!(parse_rql(" a == 1 ; ( b == 2 ) ").unwrap(), parse_rql("a==1;b==2").unwrap());
    }

    #[test]
    fn errors() {
        assert_eq!(parse_rql("a=foo=1"), Err(RqlError::UnknownOperator { pos: 1, op: "=foo=".into() }));
        assert!(matches!(parse_rql("a=1"), Err(RqlError::Syntax { pos: 1, .. })));
        assert!(matches!(parse_rql(""), Err(RqlError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_rql("a==(1,2)"), Err(RqlError::Syntax { .. })));
        assert!(matches!(parse_rql("(a==1"), Err(RqlError::Syntax { pos: 5, .. })));
        assert!(matches!(parse_rql("a=='x"), Err(RqlError::Syntax { .. })));
        assert!(matches!(parse_rql("a==1)"), Err(RqlError::Syntax { pos: 4, .. })));
    }
}
