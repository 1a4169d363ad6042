//! Quantitative regular combinators and their compilation to unambiguous
//! CRAs.

mod compile;
mod oracle;
mod syntax;

pub use compile::{compile, copyless_report, expected_rate};
pub use oracle::{oracle_eval, DEFAULT_ENUMERATION_BOUND};
pub use syntax::parse_query;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automata::Alphabet;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::ops::{make_registry_seeded, OperationRegistry, RegistryDescriptor, DEFAULT_SEED};

/// A query over data words: the regular combinators applied to single-item
/// and empty-word leaves.
#[derive(Debug, Clone, PartialEq)]
pub enum QueryExpr {
    /// Defined only on the empty word; outputs the named constant.
    Eps { constant: String },
    /// Defined on one item whose tag lies in the set; outputs an expression
    /// over `val` and constants.
    Item { tags: BTreeSet<String>, out: Expr },
    /// Output combination: all arguments on the whole word, combined by an
    /// n-ary operation.
    OpCombine { op: String, args: Vec<QueryExpr> },
    /// Choice with priority to the first argument.
    Else { first: Box<QueryExpr>, second: Box<QueryExpr> },
    /// Quantitative concatenation over the unique split.
    Split { left: Box<QueryExpr>, right: Box<QueryExpr>, op: String },
    /// Quantitative iteration: left fold of the per-block values.
    Iter { body: Box<QueryExpr>, init: String, op: String },
    /// Left fold over all prefixes of a total transduction.
    PrefixSum { body: Box<QueryExpr>, init: String, op: String },
}

/// A query bundled with its tag alphabet and operation registry.
#[derive(Debug, Clone)]
pub struct Query {
    pub alphabet: Alphabet,
    pub registry: Arc<OperationRegistry>,
    pub expr: QueryExpr,
}

/// The query file format: alphabet, registry descriptor, and the query in
/// the surface syntax.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryJson {
    pub alphabet: Vec<String>,
    pub registry: RegistryDescriptor,
    pub query: String,
}

impl Query {
    pub fn from_json(j: &QueryJson) -> Result<Query> {
        Query::from_json_seeded(j, DEFAULT_SEED)
    }

    pub fn from_json_seeded(j: &QueryJson, seed: u64) -> Result<Query> {
        let registry = Arc::new(make_registry_seeded(&j.registry, seed)?);
        let alphabet = Alphabet::new(j.alphabet.clone())?;
        let expr = parse_query(&j.query, &registry)?;
        expr.check(&alphabet, &registry)?;
        Ok(Query {
            alphabet,
            registry,
            expr,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Query> {
        let j: QueryJson =
            serde_json::from_str(s).map_err(|e| Error::ParseError(e.to_string()))?;
        Query::from_json(&j)
    }
}

impl QueryExpr {
    /// Arity and leaf checks against a registry.
    pub fn check(&self, alphabet: &Alphabet, registry: &OperationRegistry) -> Result<()> {
        let arity = |name: &str, want: usize| -> Result<()> {
            let op = registry.op(name)?;
            if op.arity() != want {
                return Err(Error::ArityMismatch {
                    op: name.to_string(),
                    expected: op.arity(),
                    got: want,
                });
            }
            Ok(())
        };
        match self {
            QueryExpr::Eps { constant } => arity(constant, 0),
            QueryExpr::Item { tags, out } => {
                for t in tags {
                    if alphabet.index_of(t).is_none() {
                        return Err(Error::TagOutOfAlphabet(t.clone()));
                    }
                }
                if tags.is_empty() {
                    return Err(Error::ParseError("item needs at least one tag".into()));
                }
                if !out.registers().is_empty() {
                    return Err(Error::ParseError(
                        "item expressions use only `val` and constants".into(),
                    ));
                }
                out.check_arities(registry)
            }
            QueryExpr::OpCombine { op, args } => {
                arity(op, args.len())?;
                args.iter().try_for_each(|q| q.check(alphabet, registry))
            }
            QueryExpr::Else { first, second } => {
                first.check(alphabet, registry)?;
                second.check(alphabet, registry)
            }
            QueryExpr::Split { left, right, op } => {
                arity(op, 2)?;
                left.check(alphabet, registry)?;
                right.check(alphabet, registry)
            }
            QueryExpr::Iter { body, init, op } | QueryExpr::PrefixSum { body, init, op } => {
                arity(init, 0)?;
                arity(op, 2)?;
                body.check(alphabet, registry)
            }
        }
    }
}
