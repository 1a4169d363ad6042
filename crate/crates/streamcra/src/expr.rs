//! The expression language over registers and the current input value.
//!
//! Register updates, initializations, and finalizations are all trees over
//! the registry's constants and operations, register references, and the
//! reserved symbol `val` for the value of the item being consumed.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ops::OperationRegistry;
use crate::value::Value;

/// An expression over registers, constants, operations, and `val`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// An arity-0 operation of the registry.
    Const(String),
    /// A register reference.
    Reg(String),
    /// The value of the current data item. Exempt from the copyless count.
    CurrentVal,
    Apply(String, Vec<Expr>),
}

/// A register assignment, total on the machine's register set when attached
/// to a token.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation(pub BTreeMap<String, Value>);

impl Valuation {
    pub fn new() -> Self {
        Valuation(BTreeMap::new())
    }

    pub fn get(&self, reg: &str) -> Result<&Value> {
        self.0
            .get(reg)
            .ok_or_else(|| Error::UnboundRegister(reg.to_string()))
    }

    pub fn set(&mut self, reg: impl Into<String>, v: Value) {
        self.0.insert(reg.into(), v);
    }
}

impl<const N: usize> From<[(&str, Value); N]> for Valuation {
    fn from(entries: [(&str, Value); N]) -> Self {
        Valuation(
            entries
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }
}

impl Expr {
    pub fn apply(op: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Apply(op.into(), args)
    }

    pub fn reg(name: impl Into<String>) -> Expr {
        Expr::Reg(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Expr {
        Expr::Const(name.into())
    }

    /// True if the expression contains no `val` and no register references.
    pub fn is_closed(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Reg(_) | Expr::CurrentVal => false,
            Expr::Apply(_, args) => args.iter().all(Expr::is_closed),
        }
    }

    pub fn uses_current_val(&self) -> bool {
        match self {
            Expr::CurrentVal => true,
            Expr::Const(_) | Expr::Reg(_) => false,
            Expr::Apply(_, args) => args.iter().any(Expr::uses_current_val),
        }
    }

    /// Counts occurrences of each register in this expression.
    pub fn register_counts(&self, counts: &mut BTreeMap<String, usize>) {
        match self {
            Expr::Reg(r) => *counts.entry(r.clone()).or_insert(0) += 1,
            Expr::Apply(_, args) => {
                for a in args {
                    a.register_counts(counts);
                }
            }
            Expr::Const(_) | Expr::CurrentVal => {}
        }
    }

    pub fn registers(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        self.register_counts(&mut m);
        m
    }

    /// Replaces each register by the expression given in `subst`; registers
    /// not present in the map are kept as-is.
    pub fn substitute(&self, subst: &BTreeMap<String, Expr>) -> Expr {
        match self {
            Expr::Reg(r) => subst.get(r).cloned().unwrap_or_else(|| self.clone()),
            Expr::Apply(op, args) => Expr::Apply(
                op.clone(),
                args.iter().map(|a| a.substitute(subst)).collect(),
            ),
            Expr::Const(_) | Expr::CurrentVal => self.clone(),
        }
    }

    /// Renames registers; registers not present in the map are kept.
    pub fn rename_registers(&self, renaming: &BTreeMap<String, String>) -> Expr {
        match self {
            Expr::Reg(r) => Expr::Reg(renaming.get(r).cloned().unwrap_or_else(|| r.clone())),
            Expr::Apply(op, args) => Expr::Apply(
                op.clone(),
                args.iter().map(|a| a.rename_registers(renaming)).collect(),
            ),
            Expr::Const(_) | Expr::CurrentVal => self.clone(),
        }
    }

    /// Checks that every operation exists in the registry with the right arity.
    pub fn check_arities(&self, registry: &OperationRegistry) -> Result<()> {
        match self {
            Expr::Const(c) => {
                let op = registry.op(c)?;
                if op.arity() != 0 {
                    return Err(Error::ArityMismatch {
                        op: c.clone(),
                        expected: op.arity(),
                        got: 0,
                    });
                }
                Ok(())
            }
            Expr::Reg(_) | Expr::CurrentVal => Ok(()),
            Expr::Apply(name, args) => {
                let op = registry.op(name)?;
                if op.arity() != args.len() {
                    return Err(Error::ArityMismatch {
                        op: name.clone(),
                        expected: op.arity(),
                        got: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check_arities(registry))
            }
        }
    }

    pub(crate) fn eval_counted(
        &self,
        env: &Valuation,
        current: Option<&Value>,
        registry: &OperationRegistry,
        applications: &mut u64,
    ) -> Result<Value> {
        match self {
            Expr::Const(c) => {
                *applications += 1;
                registry.op(c)?.apply(&[])
            }
            Expr::Reg(r) => Ok(env.get(r)?.clone()),
            Expr::CurrentVal => current.cloned().ok_or(Error::MissingCurrentVal),
            Expr::Apply(name, args) => {
                let op = registry.op(name)?;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(a.eval_counted(env, current, registry, applications)?);
                }
                *applications += 1;
                op.apply(&vals)
            }
        }
    }
}

/// Evaluates an expression under a valuation and an optional current value.
pub fn eval_expr(
    expr: &Expr,
    env: &Valuation,
    current: Option<&Value>,
    registry: &OperationRegistry,
) -> Result<Value> {
    let mut n = 0;
    expr.eval_counted(env, current, registry, &mut n)
}

/// Counts register occurrences across the right-hand sides of a parallel
/// update. `val` occurrences are not counted.
pub fn register_occurrences(update: &BTreeMap<String, Expr>) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for rhs in update.values() {
        rhs.register_counts(&mut counts);
    }
    counts
}

// --- surface syntax ---------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Plus,
    Star(String),
    LParen,
    RParen,
    Comma,
}

fn lex(input: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '+' => {
                chars.next();
                toks.push(Tok::Plus);
            }
            '(' => {
                chars.next();
                toks.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                toks.push(Tok::RParen);
            }
            ',' => {
                chars.next();
                toks.push(Tok::Comma);
            }
            '*' => {
                chars.next();
                let mut lit = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '#' || d == '/' || d == '-' {
                        lit.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if lit.is_empty() {
                    return Err(Error::ParseError(
                        "`*` must be followed by a constant".into(),
                    ));
                }
                toks.push(Tok::Star(lit));
            }
            c if c.is_ascii_digit() => {
                let mut lit = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || d == '/' {
                        lit.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Number(lit));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut lit = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        lit.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Ident(lit));
            }
            other => {
                return Err(Error::ParseError(format!(
                    "unexpected character `{other}` in expression"
                )))
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    registers: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        match self.bump() {
            Some(ref got) if got == t => Ok(()),
            got => Err(Error::ParseError(format!(
                "expected {t:?}, got {got:?} in expression"
            ))),
        }
    }

    // sum := postfix ('+' postfix)*
    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.postfix()?;
        while matches!(self.peek(), Some(Tok::Plus)) {
            self.bump();
            let rhs = self.postfix()?;
            e = Expr::Apply("+".into(), vec![e, rhs]);
        }
        Ok(e)
    }

    // postfix := atom ('*' literal)*
    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while let Some(Tok::Star(lit)) = self.peek().cloned() {
            self.bump();
            e = Expr::Apply(format!("*{lit}"), vec![e]);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Number(n)) => Ok(Expr::Const(n)),
            Some(Tok::LParen) => {
                let e = self.sum()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    self.bump();
                    let mut args = Vec::new();
                    if !matches!(self.peek(), Some(Tok::RParen)) {
                        loop {
                            args.push(self.sum()?);
                            if matches!(self.peek(), Some(Tok::Comma)) {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(&Tok::RParen)?;
                    Ok(Expr::Apply(name, args))
                } else if name == "val" {
                    Ok(Expr::CurrentVal)
                } else if self.registers.iter().any(|r| r == &name) {
                    Ok(Expr::Reg(name))
                } else {
                    // Not a register: an arity-0 operation of the registry.
                    Ok(Expr::Const(name))
                }
            }
            got => Err(Error::ParseError(format!(
                "unexpected token {got:?} in expression"
            ))),
        }
    }
}

/// Parses an expression string. `registers` decides which identifiers are
/// register references; everything else is treated as an operation name.
pub fn parse_expr(input: &str, registers: &[String]) -> Result<Expr> {
    let toks = lex(input)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        registers,
    };
    let e = p.sum()?;
    if p.pos != toks.len() {
        return Err(Error::ParseError(format!(
            "trailing input in expression `{input}`"
        )));
    }
    Ok(e)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // precedence: 0 = sum, 1 = postfix, 2 = atom
        fn go(e: &Expr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match e {
                Expr::Const(c) => write!(f, "{c}"),
                Expr::Reg(r) => write!(f, "{r}"),
                Expr::CurrentVal => write!(f, "val"),
                Expr::Apply(op, args) => {
                    if op == "+" && args.len() == 2 {
                        if prec > 0 {
                            write!(f, "(")?;
                        }
                        go(&args[0], 0, f)?;
                        write!(f, " + ")?;
                        go(&args[1], 1, f)?;
                        if prec > 0 {
                            write!(f, ")")?;
                        }
                        Ok(())
                    } else if let Some(lit) = op.strip_prefix('*') {
                        if args.len() == 1 {
                            go(&args[0], 2, f)?;
                            write!(f, "*{lit}")
                        } else {
                            write!(f, "{op}?")
                        }
                    } else {
                        write!(f, "{op}(")?;
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                write!(f, ", ")?;
                            }
                            go(a, 0, f)?;
                        }
                        write!(f, ")")
                    }
                }
            }
        }
        go(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regs(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_sums_and_calls() {
        let r = regs(&["x", "y"]);
        let e = parse_expr("max(y, monus(max(x, val), val))", &r).unwrap();
        assert_eq!(
            e,
            Expr::apply(
                "max",
                vec![
                    Expr::reg("y"),
                    Expr::apply(
                        "monus",
                        vec![
                            Expr::apply("max", vec![Expr::reg("x"), Expr::CurrentVal]),
                            Expr::CurrentVal
                        ]
                    )
                ]
            )
        );
    }

    #[test]
    fn parses_right_mult_and_sum() {
        let r = regs(&["x", "y"]);
        let e = parse_expr("(x*a + y)*b + 1", &r).unwrap();
        assert_eq!(
            e,
            Expr::apply(
                "+",
                vec![
                    Expr::apply(
                        "*b",
                        vec![Expr::apply(
                            "+",
                            vec![
                                Expr::apply("*a", vec![Expr::reg("x")]),
                                Expr::reg("y")
                            ]
                        )]
                    ),
                    Expr::constant("1")
                ]
            )
        );
    }

    #[test]
    fn display_round_trips() {
        let r = regs(&["x", "y"]);
        for src in [
            "x + val",
            "max(y, max(x, val))",
            "(x*a + y)*b + 1",
            "x*a*b + y + 0",
            "ite(x, y, 0, 1)",
        ] {
            let e = parse_expr(src, &r).unwrap();
            let printed = e.to_string();
            let e2 = parse_expr(&printed, &r).unwrap();
            assert_eq!(e, e2, "round trip of `{src}` via `{printed}`");
        }
    }

    #[test]
    fn occurrences_count_registers_not_val() {
        let r = regs(&["x", "y"]);
        let mut update = BTreeMap::new();
        update.insert("x".to_string(), parse_expr("max(x, val)", &r).unwrap());
        update.insert(
            "y".to_string(),
            parse_expr("max(y, monus(max(x, val), val))", &r).unwrap(),
        );
        let occ = register_occurrences(&update);
        assert_eq!(occ.get("x"), Some(&2));
        assert_eq!(occ.get("y"), Some(&1));
    }

    #[test]
    fn empty_update_has_no_occurrences() {
        assert!(register_occurrences(&BTreeMap::new()).is_empty());
    }
}
