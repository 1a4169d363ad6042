//! Regular expressions over a declared tag alphabet.
//!
//! Surface syntax: `|` for union, juxtaposition for concatenation, postfix
//! `*` and `+`, parentheses, character classes `[ab]`, and the keywords
//! `eps` and `empty`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

use super::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Regex {
    Empty,
    Eps,
    Lit(String),
    LitSet(BTreeSet<String>),
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
}

impl Regex {
    pub fn lit(s: impl Into<String>) -> Regex {
        Regex::Lit(s.into())
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, _) | (_, Regex::Empty) => Regex::Empty,
            (Regex::Eps, b) => b,
            (a, Regex::Eps) => a,
            (a, b) => Regex::Concat(Box::new(a), Box::new(b)),
        }
    }

    pub fn union(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, b) => b,
            (a, Regex::Empty) => a,
            (a, b) if a == b => a,
            (a, b) => Regex::Union(Box::new(a), Box::new(b)),
        }
    }

    pub fn star(a: Regex) -> Regex {
        match a {
            Regex::Empty | Regex::Eps => Regex::Eps,
            Regex::Star(inner) => Regex::Star(inner),
            a => Regex::Star(Box::new(a)),
        }
    }

    pub fn concat_all(parts: impl IntoIterator<Item = Regex>) -> Regex {
        parts
            .into_iter()
            .fold(Regex::Eps, Regex::concat)
    }

    pub fn union_all(parts: impl IntoIterator<Item = Regex>) -> Regex {
        parts
            .into_iter()
            .fold(Regex::Empty, Regex::union)
    }

    /// Every literal mentioned in the expression.
    pub fn literals(&self, out: &mut BTreeSet<String>) {
        match self {
            Regex::Lit(s) => {
                out.insert(s.clone());
            }
            Regex::LitSet(set) => out.extend(set.iter().cloned()),
            Regex::Concat(a, b) | Regex::Union(a, b) => {
                a.literals(out);
                b.literals(out);
            }
            Regex::Star(a) | Regex::Plus(a) => a.literals(out),
            Regex::Empty | Regex::Eps => {}
        }
    }

    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        let mut lits = BTreeSet::new();
        self.literals(&mut lits);
        for l in &lits {
            if alphabet.index_of(l).is_none() {
                return Err(Error::AlphabetMismatch(format!(
                    "regex literal `{l}` is not in the alphabet"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // precedence: 0 union, 1 concat, 2 postfix/atom
        fn go(r: &Regex, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match r {
                Regex::Empty => write!(f, "empty"),
                Regex::Eps => write!(f, "eps"),
                Regex::Lit(s) => write!(f, "{s}"),
                Regex::LitSet(set) => {
                    write!(f, "[")?;
                    for s in set {
                        write!(f, "{s}")?;
                    }
                    write!(f, "]")
                }
                Regex::Union(a, b) => {
                    if prec > 0 {
                        write!(f, "(")?;
                    }
                    go(a, 0, f)?;
                    write!(f, "|")?;
                    go(b, 0, f)?;
                    if prec > 0 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Regex::Concat(a, b) => {
                    if prec > 1 {
                        write!(f, "(")?;
                    }
                    go(a, 1, f)?;
                    go(b, 2, f)?;
                    if prec > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Regex::Star(a) => {
                    go(a, 2, f)?;
                    write!(f, "*")
                }
                Regex::Plus(a) => {
                    go(a, 2, f)?;
                    write!(f, "+")
                }
            }
        }
        go(self, 0, f)
    }
}

struct RegexParser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> RegexParser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        let rest: String = self.chars[self.pos..]
            .iter()
            .take(kw.len())
            .collect();
        if rest == kw {
            // keywords must not run into a following word character
            let after = self.chars.get(self.pos + kw.len());
            if !matches!(after, Some(c) if c.is_alphanumeric()) {
                self.pos += kw.len();
                return true;
            }
        }
        false
    }

    fn union(&mut self) -> Result<Regex> {
        let mut r = self.concat()?;
        loop {
            self.eat_ws();
            if self.peek() == Some('|') {
                self.bump();
                let rhs = self.concat()?;
                r = Regex::Union(Box::new(r), Box::new(rhs));
            } else {
                return Ok(r);
            }
        }
    }

    fn concat(&mut self) -> Result<Regex> {
        let mut parts = Vec::new();
        loop {
            self.eat_ws();
            match self.peek() {
                None | Some('|') | Some(')') => break,
                _ => parts.push(self.postfix()?),
            }
        }
        if parts.is_empty() {
            return Ok(Regex::Eps);
        }
        let mut it = parts.into_iter();
        let first = it.next().unwrap();
        Ok(it.fold(first, |acc, p| Regex::Concat(Box::new(acc), Box::new(p))))
    }

    fn postfix(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    r = Regex::Star(Box::new(r));
                }
                Some('+') => {
                    self.bump();
                    r = Regex::Plus(Box::new(r));
                }
                _ => return Ok(r),
            }
        }
    }

    fn atom(&mut self) -> Result<Regex> {
        self.eat_ws();
        if self.keyword("eps") {
            return Ok(Regex::Eps);
        }
        if self.keyword("empty") {
            return Ok(Regex::Empty);
        }
        match self.bump() {
            Some('(') => {
                let r = self.union()?;
                self.eat_ws();
                if self.bump() != Some(')') {
                    return Err(Error::ParseError(format!(
                        "unbalanced parentheses in regex `{}`",
                        self.src
                    )));
                }
                Ok(r)
            }
            Some('[') => {
                let mut set = BTreeSet::new();
                loop {
                    match self.bump() {
                        Some(']') => break,
                        Some(c) if !c.is_whitespace() => {
                            set.insert(c.to_string());
                        }
                        Some(_) => {}
                        None => {
                            return Err(Error::ParseError(format!(
                                "unterminated character class in regex `{}`",
                                self.src
                            )))
                        }
                    }
                }
                if set.is_empty() {
                    return Ok(Regex::Empty);
                }
                Ok(Regex::LitSet(set))
            }
            Some(c) if c.is_alphanumeric() || c == '#' || c == '_' => Ok(Regex::Lit(c.to_string())),
            other => Err(Error::ParseError(format!(
                "unexpected `{other:?}` in regex `{}`",
                self.src
            ))),
        }
    }
}

/// Parses the plain-text regex syntax. Literals are single characters.
pub fn parse_regex(src: &str) -> Result<Regex> {
    let mut p = RegexParser {
        chars: src.chars().collect(),
        pos: 0,
        src,
    };
    let r = p.union()?;
    p.eat_ws();
    if p.pos != p.chars.len() {
        return Err(Error::ParseError(format!("trailing input in regex `{src}`")));
    }
    Ok(r)
}
