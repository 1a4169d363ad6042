//! The definition-level oracle for the combinators: a literal recursive
//! implementation of their semantics, with splits and block decompositions
//! found by exhaustive enumeration.

use crate::error::{Error, Result};
use crate::expr::{eval_expr, Valuation};
use crate::value::Value;

use super::{Query, QueryExpr};

pub const DEFAULT_ENUMERATION_BOUND: usize = 12;

type Item = (String, Value);

fn eval_leaf(q: &Query, out: &crate::expr::Expr, v: &Value) -> Result<Value> {
    eval_expr(out, &Valuation::new(), Some(v), &q.registry)
}

fn constant(q: &Query, name: &str) -> Result<Value> {
    q.registry.op(name)?.apply(&[])
}

fn apply2(q: &Query, op: &str, a: &Value, b: &Value) -> Result<Value> {
    q.registry.op(op)?.apply(&[a.clone(), b.clone()])
}

fn go(q: &Query, e: &QueryExpr, word: &[Item]) -> Result<Option<Value>> {
    match e {
        QueryExpr::Eps { constant: c } => {
            if word.is_empty() {
                Ok(Some(constant(q, c)?))
            } else {
                Ok(None)
            }
        }
        QueryExpr::Item { tags, out } => match word {
            [(tag, value)] if tags.contains(tag) => Ok(Some(eval_leaf(q, out, value)?)),
            _ => Ok(None),
        },
        QueryExpr::OpCombine { op, args } => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                match go(q, a, word)? {
                    Some(v) => vals.push(v),
                    None => return Ok(None),
                }
            }
            Ok(Some(q.registry.op(op)?.apply(&vals)?))
        }
        QueryExpr::Else { first, second } => match go(q, first, word)? {
            Some(v) => Ok(Some(v)),
            None => go(q, second, word),
        },
        QueryExpr::Split { left, right, op } => {
            // defined iff exactly one cut yields defined halves
            let mut hit: Option<Value> = None;
            for cut in 0..=word.len() {
                let l = go(q, left, &word[..cut])?;
                let r = go(q, right, &word[cut..])?;
                if let (Some(lv), Some(rv)) = (l, r) {
                    let combined = apply2(q, op, &lv, &rv)?;
                    if hit.replace(combined).is_some() {
                        return Ok(None);
                    }
                }
            }
            Ok(hit)
        }
        QueryExpr::Iter { body, init, op } => {
            // ε in the body rate makes every decomposition ambiguous
            if go(q, body, &[])?.is_some() {
                return Ok(None);
            }
            let mut decompositions = enumerate_decompositions(q, body, word)?;
            if decompositions.len() != 1 {
                return Ok(None);
            }
            let blocks = decompositions.pop().unwrap();
            let mut acc = constant(q, init)?;
            for b in blocks {
                acc = apply2(q, op, &acc, &b)?;
            }
            Ok(Some(acc))
        }
        QueryExpr::PrefixSum { body, init, op } => {
            let mut acc = constant(q, init)?;
            for end in 0..=word.len() {
                match go(q, body, &word[..end])? {
                    Some(v) => acc = apply2(q, op, &acc, &v)?,
                    None => return Err(Error::PrefixSumOnPartial),
                }
            }
            Ok(Some(acc))
        }
    }
}

/// All ways to cut the word into nonempty blocks with every block defined,
/// each returned as the list of per-block values.
fn enumerate_decompositions(
    q: &Query,
    body: &QueryExpr,
    word: &[Item],
) -> Result<Vec<Vec<Value>>> {
    if word.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    let mut out = Vec::new();
    for first in 1..=word.len() {
        if let Some(v) = go(q, body, &word[..first])? {
            for mut rest in enumerate_decompositions(q, body, &word[first..])? {
                rest.insert(0, v.clone());
                out.push(rest);
            }
        }
    }
    Ok(out)
}

/// Evaluates a query by its definitional semantics. Splits and iterations
/// enumerate all cuts, so the word length is bounded.
pub fn oracle_eval(q: &Query, word: &[Item], bound: usize) -> Result<Option<Value>> {
    if word.len() > bound {
        return Err(Error::BoundExceeded(format!(
            "word length {} exceeds the enumeration bound {bound}",
            word.len()
        )));
    }
    go(q, &q.expr, word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::parse_query;
    use crate::fixtures::int_registry;

    fn query(alpha: &[&str], src: &str) -> Query {
        let registry = int_registry(&["0", "1", "+", "max", "min"]);
        Query {
            alphabet: crate::automata::Alphabet::of(alpha),
            expr: parse_query(src, &registry).unwrap(),
            registry,
        }
    }

    fn items(pairs: &[(&str, i64)]) -> Vec<Item> {
        pairs
            .iter()
            .map(|(t, v)| (t.to_string(), Value::int(*v)))
            .collect()
    }

    #[test]
    fn split_with_single_forced_cut() {
        let q = query(&["a", "b"], "split(item([a], val); item([b], val); +)");
        let out = oracle_eval(&q, &items(&[("a", 2), ("b", 5)]), 12).unwrap();
        assert_eq!(out, Some(Value::int(7)));
        assert_eq!(oracle_eval(&q, &items(&[("a", 2)]), 12).unwrap(), None);
    }

    #[test]
    fn block_max_query_matches_hand_fold() {
        let q = query(
            &["a", "#"],
            "iter(split(iter(item([a], val); 0; +); item([#], 0); +); 0; max)",
        );
        let out = oracle_eval(
            &q,
            &items(&[("a", 2), ("a", 3), ("#", 0), ("a", 4), ("#", 0)]),
            12,
        )
        .unwrap();
        assert_eq!(out, Some(Value::int(5)));
        // empty word: zero blocks
        assert_eq!(oracle_eval(&q, &[], 12).unwrap(), Some(Value::int(0)));
    }

    #[test]
    fn ambiguous_split_is_undefined() {
        // both halves accept a single a: "aa" has one cut, "a" has two
        let q = query(
            &["a", "b"],
            "split(else(item([a], val); eps(0)); else(item([a], val); eps(1)); +)",
        );
        // "a" can split as (a, ε) or (ε, a): two cuts, undefined
        assert_eq!(oracle_eval(&q, &items(&[("a", 3)]), 12).unwrap(), None);
        // "aa" has exactly one cut
        assert_eq!(
            oracle_eval(&q, &items(&[("a", 3), ("a", 4)]), 12).unwrap(),
            Some(Value::int(7))
        );
    }

    #[test]
    fn iter_with_eps_in_body_is_undefined() {
        let q = query(&["a", "b"], "iter(else(item([a], val); eps(0)); 0; +)");
        assert_eq!(oracle_eval(&q, &items(&[("a", 1)]), 12).unwrap(), None);
        assert_eq!(oracle_eval(&q, &[], 12).unwrap(), None);
    }

    #[test]
    fn prefix_sum_folds_all_prefixes() {
        // f = number of items (total): iter over single items of weight 1
        let q = query(
            &["a", "b"],
            "prefixsum(iter(item([a b], 1); 0; +); 0; +)",
        );
        // prefixes of length 0,1,2 have f = 0,1,2; fold by + = 3
        assert_eq!(
            oracle_eval(&q, &items(&[("a", 9), ("b", 9)]), 12).unwrap(),
            Some(Value::int(3))
        );
    }

    #[test]
    fn prefix_sum_on_partial_argument_errors() {
        let q = query(&["a", "b"], "prefixsum(item([a], val); 0; +)");
        assert!(matches!(
            oracle_eval(&q, &items(&[("a", 1), ("a", 2)]), 12),
            Err(Error::PrefixSumOnPartial)
        ));
    }
}
