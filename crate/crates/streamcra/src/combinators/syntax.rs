//! The query surface syntax:
//! `eps(c)`, `item([a b], expr)`, `op(name; q1; ...; qn)`, `else(q1; q2)`,
//! `split(q1; q2; name)`, `iter(q; c; name)`, `prefixsum(q; c; name)`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::ops::OperationRegistry;

use super::QueryExpr;

struct Cursor<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn ws(&mut self) {
        while matches!(self.chars.get(self.pos), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            got => Err(Error::ParseError(format!(
                "expected `{c}`, got {got:?} in query `{}`",
                self.src
            ))),
        }
    }

    fn word(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while matches!(self.chars.get(self.pos),
            Some(c) if c.is_alphanumeric() || matches!(c, '_' | '#' | '*' | '+' | '-' | '.' | '/'))
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// Text up to the matching close of the current nesting level, stopping
    /// at `;` or the closing `)`.
    fn argument(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        let mut depth = 0usize;
        loop {
            match self.chars.get(self.pos) {
                None => {
                    return Err(Error::ParseError(format!(
                        "unterminated argument in query `{}`",
                        self.src
                    )))
                }
                Some('(') | Some('[') => {
                    depth += 1;
                    self.pos += 1;
                }
                Some(')') if depth == 0 => break,
                Some(';') if depth == 0 => break,
                Some(')') | Some(']') => {
                    depth -= 1;
                    self.pos += 1;
                }
                Some(_) => self.pos += 1,
            }
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }
}

fn parse_at(c: &mut Cursor, registry: &OperationRegistry) -> Result<QueryExpr> {
    let head = c.word();
    c.expect('(')?;
    let q = match head.as_str() {
        "eps" => {
            let constant = c.word();
            QueryExpr::Eps { constant }
        }
        "item" => {
            c.expect('[')?;
            let mut tags = BTreeSet::new();
            loop {
                match c.peek() {
                    Some(']') => {
                        c.pos += 1;
                        break;
                    }
                    Some(_) => {
                        let w = c.word();
                        if w.is_empty() {
                            return Err(Error::ParseError(format!(
                                "bad tag set in query `{}`",
                                c.src
                            )));
                        }
                        tags.insert(w);
                    }
                    None => {
                        return Err(Error::ParseError(format!(
                            "unterminated tag set in query `{}`",
                            c.src
                        )))
                    }
                }
            }
            c.expect(',')?;
            let text = c.argument()?;
            let out = parse_expr(&text, &[])?;
            QueryExpr::Item { tags, out }
        }
        "op" => {
            let name = c.word();
            let mut args = Vec::new();
            while c.peek() == Some(';') {
                c.pos += 1;
                let mut inner = Cursor {
                    src: c.src,
                    chars: c.chars.clone(),
                    pos: c.pos,
                };
                let q = parse_at(&mut inner, registry)?;
                c.pos = inner.pos;
                args.push(q);
            }
            QueryExpr::OpCombine { op: name, args }
        }
        "else" => {
            let first = parse_at(c, registry)?;
            c.expect(';')?;
            let second = parse_at(c, registry)?;
            QueryExpr::Else {
                first: Box::new(first),
                second: Box::new(second),
            }
        }
        "split" => {
            let left = parse_at(c, registry)?;
            c.expect(';')?;
            let right = parse_at(c, registry)?;
            c.expect(';')?;
            let op = c.word();
            QueryExpr::Split {
                left: Box::new(left),
                right: Box::new(right),
                op,
            }
        }
        "iter" | "prefixsum" => {
            let body = parse_at(c, registry)?;
            c.expect(';')?;
            let init = c.word();
            c.expect(';')?;
            let op = c.word();
            if head == "iter" {
                QueryExpr::Iter {
                    body: Box::new(body),
                    init,
                    op,
                }
            } else {
                QueryExpr::PrefixSum {
                    body: Box::new(body),
                    init,
                    op,
                }
            }
        }
        other => {
            return Err(Error::ParseError(format!(
                "unknown combinator `{other}` in query `{}`",
                c.src
            )))
        }
    };
    c.expect(')')?;
    Ok(q)
}

/// Parses the query surface syntax.
pub fn parse_query(src: &str, registry: &OperationRegistry) -> Result<QueryExpr> {
    let mut c = Cursor {
        src,
        chars: src.chars().collect(),
        pos: 0,
    };
    let q = parse_at(&mut c, registry)?;
    c.ws();
    if c.pos != c.chars.len() {
        return Err(Error::ParseError(format!("trailing input in query `{src}`")));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::int_registry;

    #[test]
    fn parses_the_block_max_query() {
        let registry = int_registry(&["0", "+", "max"]);
        let q = parse_query(
            "iter(split(iter(item([a], val); 0; +); item([#], 0); +); 0; max)",
            &registry,
        )
        .unwrap();
        match q {
            QueryExpr::Iter { body, init, op } => {
                assert_eq!(init, "0");
                assert_eq!(op, "max");
                assert!(matches!(*body, QueryExpr::Split { .. }));
            }
            other => panic!("unexpected parse {other:?}"),
        }
    }

    #[test]
    fn parses_op_combine_with_multiple_args() {
        let registry = int_registry(&["0", "1", "+", "max"]);
        let q = parse_query("op(max; eps(0); eps(1))", &registry).unwrap();
        match q {
            QueryExpr::OpCombine { op, args } => {
                assert_eq!(op, "max");
                assert_eq!(args.len(), 2);
            }
            other => panic!("unexpected parse {other:?}"),
        }
    }

    #[test]
    fn parses_item_tag_sets_and_expressions() {
        let registry = int_registry(&["0", "1", "+"]);
        let q = parse_query("item([a b], val + 1)", &registry).unwrap();
        match q {
            QueryExpr::Item { tags, .. } => {
                assert_eq!(tags.len(), 2);
            }
            other => panic!("unexpected parse {other:?}"),
        }
    }
}
