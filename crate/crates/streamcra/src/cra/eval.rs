//! Streaming evaluation (one token per active state) and the exhaustive
//! run-enumeration oracle.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Valuation;
use crate::value::Value;

use super::Cra;

/// An active state together with the register assignment its unique run
/// has built so far.
#[derive(Debug, Clone)]
pub struct Token {
    pub state: usize,
    pub env: Valuation,
}

/// Resource accounting for one streaming evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalStats {
    pub items: u64,
    pub max_live_tokens: usize,
    pub max_stored_values: usize,
    pub op_applications: u64,
}

pub const DEFAULT_ORACLE_BOUND: usize = 12;

/// Runs the machine over a stream of (tag, value) items.
///
/// Preconditions: the machine is unambiguous, trim, and ε-free (see
/// `validate`). Token collisions — two runs meeting in one state — are
/// then impossible, and are reported as a hard [`Error::AmbiguityDetected`].
pub fn eval_stream<I>(m: &Cra, items: I) -> Result<(Option<Value>, EvalStats)>
where
    I: IntoIterator<Item = (String, Value)>,
{
    if m.has_epsilon() {
        return Err(Error::InvalidMachine(
            "eval_stream needs an ε-free machine; eliminate ε-transitions first".into(),
        ));
    }
    let mut stats = EvalStats::default();
    let reg_count = m.registers.len();

    // transition index by (state, tag)
    let mut by_src: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, t) in m.transitions.iter().enumerate() {
        if let Some(tag) = t.tag {
            by_src.entry((t.from, tag)).or_default().push(i);
        }
    }

    let mut tokens: BTreeMap<usize, Valuation> = BTreeMap::new();
    for &q in m.init.keys() {
        let env = m.init_valuation(q)?;
        tokens.insert(q, env);
    }
    stats.max_live_tokens = tokens.len();
    stats.max_stored_values = tokens.len() * reg_count;

    for (tag, value) in items {
        let sym = m
            .alphabet
            .index_of(&tag)
            .ok_or_else(|| Error::TagOutOfAlphabet(tag.clone()))?;
        let mut next: BTreeMap<usize, Valuation> = BTreeMap::new();
        for (&state, env) in &tokens {
            for &ti in by_src.get(&(state, sym)).map(Vec::as_slice).unwrap_or(&[]) {
                let t = &m.transitions[ti];
                let mut out = Valuation::new();
                for (r, e) in &t.update {
                    let v =
                        e.eval_counted(env, Some(&value), &m.registry, &mut stats.op_applications)?;
                    out.set(r.clone(), v);
                }
                if next.insert(t.to, out).is_some() {
                    return Err(Error::AmbiguityDetected(m.states[t.to].clone()));
                }
            }
        }
        tokens = next;
        stats.items += 1;
        stats.max_live_tokens = stats.max_live_tokens.max(tokens.len());
        stats.max_stored_values = stats.max_stored_values.max(tokens.len() * reg_count);
        if tokens.is_empty() {
            // all runs died; the outcome is undefined no matter the rest
            break;
        }
    }

    let mut accepted: Option<(usize, &Valuation)> = None;
    for (&q, env) in &tokens {
        if m.fin.contains_key(&q) {
            if accepted.is_some() {
                return Err(Error::AmbiguityDetected(m.states[q].clone()));
            }
            accepted = Some((q, env));
        }
    }
    match accepted {
        Some((q, env)) => {
            let value =
                m.fin[&q].eval_counted(env, None, &m.registry, &mut stats.op_applications)?;
            Ok((Some(value), stats))
        }
        None => Ok((None, stats)),
    }
}

/// Enumerates every accepting run (including through ε-transitions) and
/// returns the multiset of run values. For unambiguous machines the result
/// has at most one element.
pub fn eval_paths_oracle(
    m: &Cra,
    word: &[(String, Value)],
    bound: usize,
) -> Result<Vec<Value>> {
    if word.len() > bound {
        return Err(Error::BoundExceeded(format!(
            "word length {} exceeds the oracle bound {bound}",
            word.len()
        )));
    }
    let mut syms = Vec::with_capacity(word.len());
    for (tag, _) in word {
        syms.push(
            m.alphabet
                .index_of(tag)
                .ok_or_else(|| Error::TagOutOfAlphabet(tag.clone()))?,
        );
    }
    let mut values = Vec::new();
    let mut stack: Vec<(usize, usize, Valuation)> = Vec::new();
    for &q in m.init.keys() {
        stack.push((q, 0, m.init_valuation(q)?));
    }
    let mut scratch = 0u64;
    while let Some((state, pos, env)) = stack.pop() {
        if pos == word.len() {
            if let Some(f) = m.fin.get(&state) {
                values.push(f.eval_counted(&env, None, &m.registry, &mut scratch)?);
            }
        }
        for t in &m.transitions {
            if t.from != state {
                continue;
            }
            match t.tag {
                None => {
                    let mut out = Valuation::new();
                    for (r, e) in &t.update {
                        out.set(r.clone(), e.eval_counted(&env, None, &m.registry, &mut scratch)?);
                    }
                    stack.push((t.to, pos, out));
                }
                Some(sym) if pos < word.len() && sym == syms[pos] => {
                    let mut out = Valuation::new();
                    for (r, e) in &t.update {
                        out.set(
                            r.clone(),
                            e.eval_counted(&env, Some(&word[pos].1), &m.registry, &mut scratch)?,
                        );
                    }
                    stack.push((t.to, pos + 1, out));
                }
                Some(_) => {}
            }
        }
    }
    values.sort();
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn items(pairs: &[(&str, i64)]) -> Vec<(String, Value)> {
        pairs
            .iter()
            .map(|(t, v)| (t.to_string(), Value::int(*v)))
            .collect()
    }

    #[test]
    fn sum_machine_streams() {
        let m = fixtures::sum_machine();
        let (out, stats) = eval_stream(&m, items(&[("a", 1), ("b", 2), ("a", 3)])).unwrap();
        assert_eq!(out, Some(Value::int(4)));
        assert!(stats.max_live_tokens <= m.state_count());
        assert!(stats.max_stored_values <= m.state_count() * m.register_count());
    }

    #[test]
    fn sum_machine_undefined_on_empty() {
        let m = fixtures::sum_machine();
        let (out, _) = eval_stream(&m, items(&[])).unwrap();
        assert_eq!(out, None);
    }

    #[test]
    fn block_machine_takes_max_block_sum() {
        let m = fixtures::block_max_machine();
        let (out, _) = eval_stream(
            &m,
            items(&[("a", 2), ("a", 3), ("#", 0), ("a", 4), ("#", 0)]),
        )
        .unwrap();
        assert_eq!(out, Some(Value::int(5)));
    }

    #[test]
    fn drawdown_on_sample_stream() {
        // peak 5, trough 1 after the initial b
        let m = fixtures::drawdown_machine();
        let (out, _) = eval_stream(
            &m,
            items(&[("b", 0), ("a", 5), ("a", 3), ("a", 4), ("a", 1)]),
        )
        .unwrap();
        assert_eq!(out, Some(Value::int(4)));
    }

    #[test]
    fn oracle_agrees_with_stream_on_unambiguous_machines() {
        let m = fixtures::drawdown_machine();
        let word = items(&[("b", 0), ("a", 5), ("a", 3)]);
        let (out, _) = eval_stream(&m, word.clone()).unwrap();
        let oracle = eval_paths_oracle(&m, &word, DEFAULT_ORACLE_BOUND).unwrap();
        assert_eq!(oracle.len(), 1);
        assert_eq!(out, Some(oracle[0].clone()));
    }

    #[test]
    fn ambiguous_machine_yields_two_values() {
        let m = fixtures::ambiguous_two_path_machine();
        let word = items(&[("a", 5)]);
        let oracle = eval_paths_oracle(&m, &word, DEFAULT_ORACLE_BOUND).unwrap();
        assert_eq!(oracle, vec![Value::int(5), Value::int(6)]);
    }

    #[test]
    fn empty_word_on_initial_final_state() {
        let m = fixtures::block_max_machine();
        let oracle = eval_paths_oracle(&m, &[], DEFAULT_ORACLE_BOUND).unwrap();
        assert_eq!(oracle, vec![Value::int(0)]);
    }

    #[test]
    fn oracle_bound_is_enforced() {
        let m = fixtures::sum_machine();
        let word = items(&[("a", 1); 5]);
        assert!(matches!(
            eval_paths_oracle(&m, &word, 3),
            Err(Error::BoundExceeded(_))
        ));
    }

    #[test]
    fn one_register_guessing_machine_evaluates_after_epsilon_elimination() {
        let m = fixtures::sum_machine_one_register();
        let m = crate::cra::eliminate_epsilon_cra(&m).unwrap().trim();
        let d = m.validate();
        assert!(d.eps_free && d.is_unambiguous);
        let (out, _) = eval_stream(&m, items(&[("a", 1), ("b", 2), ("b", 5)])).unwrap();
        assert_eq!(out, Some(Value::int(7)));
    }
}
