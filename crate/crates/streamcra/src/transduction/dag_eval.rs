//! Direct materialization and evaluation of the output DAG on a concrete
//! input word: the definition-level oracle for rule transductions.

use std::collections::BTreeMap;

use crate::automata::{regex_to_dfa, Dfa};
use crate::error::{Error, Result};
use crate::value::Value;

use super::{Label, RuleTransduction};

/// The materialized output DAG of one input word.
#[derive(Debug, Clone)]
pub struct OutputDag {
    /// (copy index, position) → label
    pub vertices: BTreeMap<(usize, usize), Label>,
    /// (dst copy, dst position) → arg index → (src copy, src position)
    pub args: BTreeMap<(usize, usize), BTreeMap<usize, (usize, usize)>>,
    /// edges indexed the other way: outgoing degree per vertex
    pub out_degree: BTreeMap<(usize, usize), usize>,
    pub sink: (usize, usize),
}

/// Evaluates the transduction on a data word by materializing the DAG.
///
/// Returns None when the tag projection is outside the domain. A
/// [`Error::MalformedDag`] can only surface if well-formedness checking was
/// skipped.
pub fn dag_oracle_eval(
    t: &RuleTransduction,
    word: &[(String, Value)],
) -> Result<Option<Value>> {
    let syms: Vec<usize> = word
        .iter()
        .map(|(tag, _)| {
            t.alphabet
                .index_of(tag)
                .ok_or_else(|| Error::TagOutOfAlphabet(tag.clone()))
        })
        .collect::<Result<_>>()?;
    let dom = regex_to_dfa(&t.domain, &t.alphabet)?;
    if !dom.accepts(&syms) {
        return Ok(None);
    }
    let dag = materialize(t, &syms)?;
    evaluate(t, &dag, word).map(Some)
}

/// Builds the DAG for a tag word inside the domain.
pub fn materialize(t: &RuleTransduction, syms: &[usize]) -> Result<OutputDag> {
    let n = syms.len();
    // prefix states for every position, shared per distinct test
    let accepts_prefix = |m: &Dfa, upto: usize| -> bool {
        let mut q = m.initial;
        for &s in &syms[..upto] {
            q = m.step(q, s);
        }
        m.finals.contains(&q)
    };
    let accepts_infix = |m: &Dfa, from: usize, to: usize| -> bool {
        let mut q = m.initial;
        for &s in &syms[from..to] {
            q = m.step(q, s);
        }
        m.finals.contains(&q)
    };
    let accepts_suffix = |m: &Dfa, from: usize| -> bool {
        let mut q = m.initial;
        for &s in &syms[from..] {
            q = m.step(q, s);
        }
        m.finals.contains(&q)
    };

    let mut vertices: BTreeMap<(usize, usize), Label> = BTreeMap::new();
    for rule in &t.vertex_rules {
        let pre = regex_to_dfa(&rule.prefix, &t.alphabet)?;
        let suf = regex_to_dfa(&rule.suffix, &t.alphabet)?;
        let copy = t.copy_index(&rule.copy).expect("checked structure");
        for x in 0..=n {
            if accepts_prefix(&pre, x) && accepts_suffix(&suf, x) {
                if let Some(old) = vertices.insert((copy, x), rule.label.clone()) {
                    if old != rule.label {
                        return Err(Error::MalformedDag(format!(
                            "copy `{}` at position {x} has two labels",
                            rule.copy
                        )));
                    }
                }
            }
        }
    }

    let mut args: BTreeMap<(usize, usize), BTreeMap<usize, (usize, usize)>> = BTreeMap::new();
    let mut out_degree: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for rule in &t.edge_rules {
        let pre = regex_to_dfa(&rule.prefix, &t.alphabet)?;
        let mid = regex_to_dfa(&rule.infix, &t.alphabet)?;
        let post = regex_to_dfa(&rule.suffix, &t.alphabet)?;
        let src = t.copy_index(&rule.src).expect("checked structure");
        let dst = t.copy_index(&rule.dst).expect("checked structure");
        for x in 0..=n {
            if !accepts_prefix(&pre, x) {
                continue;
            }
            for y in x..=n {
                if accepts_infix(&mid, x, y) && accepts_suffix(&post, y) {
                    if !vertices.contains_key(&(src, x)) || !vertices.contains_key(&(dst, y)) {
                        return Err(Error::MalformedDag(format!(
                            "edge `{}`@{x} → `{}`@{y} touches an inactive vertex",
                            rule.src, rule.dst
                        )));
                    }
                    let slot = args.entry((dst, y)).or_default();
                    if slot.insert(rule.arg, (src, x)).is_some() {
                        return Err(Error::MalformedDag(format!(
                            "vertex `{}`@{y} has two edges for argument {}",
                            rule.dst, rule.arg
                        )));
                    }
                    *out_degree.entry((src, x)).or_insert(0) += 1;
                }
            }
        }
    }

    // arity bookkeeping and the unique sink
    let mut sink = None;
    for (&(copy, x), label) in &vertices {
        let want = label.arity(&t.registry)?;
        let have = args.get(&(copy, x)).map(BTreeMap::len).unwrap_or(0);
        if want != have
            || args
                .get(&(copy, x))
                .map(|m| m.keys().any(|&i| i == 0 || i > want))
                .unwrap_or(false)
        {
            return Err(Error::MalformedDag(format!(
                "vertex `{}`@{x} with label {label} has {have} arguments, wants {want}",
                t.copies[copy]
            )));
        }
        if label == &Label::Val && x == 0 {
            return Err(Error::MalformedDag("val at position 0".into()));
        }
        if out_degree.get(&(copy, x)).copied().unwrap_or(0) == 0 {
            if sink.replace((copy, x)).is_some() {
                return Err(Error::MalformedDag("two sinks".into()));
            }
        }
    }
    let sink = sink.ok_or_else(|| Error::MalformedDag("no sink".into()))?;
    Ok(OutputDag {
        vertices,
        args,
        out_degree,
        sink,
    })
}

fn evaluate(t: &RuleTransduction, dag: &OutputDag, word: &[(String, Value)]) -> Result<Value> {
    fn go(
        t: &RuleTransduction,
        dag: &OutputDag,
        word: &[(String, Value)],
        v: (usize, usize),
        memo: &mut BTreeMap<(usize, usize), Value>,
        depth: usize,
    ) -> Result<Value> {
        if let Some(hit) = memo.get(&v) {
            return Ok(hit.clone());
        }
        if depth > dag.vertices.len() + 1 {
            return Err(Error::MalformedDag("cycle in output graph".into()));
        }
        let label = &dag.vertices[&v];
        let value = match label {
            Label::Val => {
                let (_, x) = v;
                if x == 0 {
                    return Err(Error::MalformedDag("val at position 0".into()));
                }
                word[x - 1].1.clone()
            }
            Label::Id => {
                let src = dag.args[&v][&1];
                go(t, dag, word, src, memo, depth + 1)?
            }
            Label::Op(name) => {
                let op = t.registry.op(name)?;
                let mut vals = Vec::with_capacity(op.arity());
                for i in 1..=op.arity() {
                    let src = dag.args[&v][&i];
                    vals.push(go(t, dag, word, src, memo, depth + 1)?);
                }
                op.apply(&vals)?
            }
        };
        memo.insert(v, value.clone());
        Ok(value)
    }
    let mut memo = BTreeMap::new();
    go(t, dag, word, dag.sink, &mut memo, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transduction::sum_of_a_rules;

    fn items(pairs: &[(&str, i64)]) -> Vec<(String, Value)> {
        pairs
            .iter()
            .map(|(t, v)| (t.to_string(), Value::int(*v)))
            .collect()
    }

    #[test]
    fn sums_the_a_values() {
        let t = sum_of_a_rules();
        let out = dag_oracle_eval(&t, &items(&[("A", 1), ("B", 2), ("A", 3)])).unwrap();
        assert_eq!(out, Some(Value::int(4)));
    }

    #[test]
    fn empty_word_yields_the_zero_vertex() {
        let t = sum_of_a_rules();
        assert_eq!(dag_oracle_eval(&t, &[]).unwrap(), Some(Value::int(0)));
    }

    #[test]
    fn word_without_a_yields_zero() {
        let t = sum_of_a_rules();
        assert_eq!(
            dag_oracle_eval(&t, &items(&[("B", 7)])).unwrap(),
            Some(Value::int(0))
        );
    }

    #[test]
    fn single_step_preserves_evaluation() {
        let t = sum_of_a_rules();
        let s = crate::transduction::single_step(&t).unwrap();
        for tags in crate::fixtures::tag_words(&t.alphabet, 4) {
            for w in crate::fixtures::value_assignments(
                &tags,
                &[Value::int(0), Value::int(1), Value::int(2)],
            ) {
                let word: Vec<(String, Value)> = w
                    .iter()
                    .map(|(s, v)| (t.alphabet.symbol(*s).to_string(), v.clone()))
                    .collect();
                assert_eq!(
                    dag_oracle_eval(&t, &word).unwrap(),
                    dag_oracle_eval(&s, &word).unwrap(),
                    "on {word:?}"
                );
            }
        }
    }
}
