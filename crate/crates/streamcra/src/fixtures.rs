//! Worked example machines, used throughout the tests and the docs.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::automata::Alphabet;
use crate::cra::{Cra, Update};
use crate::expr::{parse_expr, Expr};
use crate::ops::{make_registry, OperationRegistry, RegistryDescriptor};
use crate::value::Value;
use crate::weighted::{semiring_by_name, WeightedAutomaton};

fn upd(regs: &[String], entries: &[(&str, &str)]) -> Update {
    let mut u = BTreeMap::new();
    for (r, e) in entries {
        u.insert(r.to_string(), parse_expr(e, regs).expect("fixture expression"));
    }
    u
}

pub fn int_registry(ops: &[&str]) -> Arc<OperationRegistry> {
    Arc::new(make_registry(&RegistryDescriptor::int(ops)).expect("fixture registry"))
}

/// Two-register copyless DCRA: on a nonempty word, outputs the sum of the
/// a-tagged values if it ends with `a`, and of the b-tagged values if it
/// ends with `b`.
pub fn sum_machine() -> Cra {
    let registry = int_registry(&["0", "+"]);
    let regs = vec!["x".to_string(), "y".to_string()];
    let mut m = Cra::new(Alphabet::of(&["a", "b"]), regs.clone(), registry);
    let p = m.add_state("p");
    let qa = m.add_state("qa");
    let qb = m.add_state("qb");
    let theta_a = upd(&regs, &[("x", "x + val"), ("y", "y")]);
    let theta_b = upd(&regs, &[("x", "x"), ("y", "y + val")]);
    for src in [p, qa, qb] {
        m.add_transition(src, Some("a"), theta_a.clone(), qa).unwrap();
        m.add_transition(src, Some("b"), theta_b.clone(), qb).unwrap();
    }
    m.set_init(p, upd(&regs, &[("x", "0"), ("y", "0")]));
    m.set_final(qa, Expr::reg("x"));
    m.set_final(qb, Expr::reg("y"));
    m
}

/// One-register copyless UCRA for the same transduction as [`sum_machine`]:
/// guesses with ε-moves whether the input ends in `a` or in `b`.
pub fn sum_machine_one_register() -> Cra {
    let registry = int_registry(&["0", "+"]);
    let regs = vec!["x".to_string()];
    let mut m = Cra::new(Alphabet::of(&["a", "b"]), regs.clone(), registry);
    let p = m.add_state("p");
    let pa = m.add_state("pa");
    let qa = m.add_state("qa");
    let pb = m.add_state("pb");
    let qb = m.add_state("qb");
    let zero = upd(&regs, &[("x", "0")]);
    let add = upd(&regs, &[("x", "x + val")]);
    let keep = upd(&regs, &[("x", "x")]);
    m.add_transition(p, None, zero.clone(), pa).unwrap();
    m.add_transition(p, None, zero.clone(), pb).unwrap();
    m.add_transition(pa, Some("a"), add.clone(), pa).unwrap();
    m.add_transition(pa, Some("b"), keep.clone(), pa).unwrap();
    m.add_transition(pa, Some("a"), add.clone(), qa).unwrap();
    m.add_transition(pb, Some("b"), add.clone(), pb).unwrap();
    m.add_transition(pb, Some("a"), keep.clone(), pb).unwrap();
    m.add_transition(pb, Some("b"), add, qb).unwrap();
    m.set_init(p, zero);
    m.set_final(qa, Expr::reg("x"));
    m.set_final(qb, Expr::reg("x"));
    m
}

/// Two-register copyless DCRA over `(a+#)*`: maximum over blocks of the
/// per-block sum of a-tagged values.
pub fn block_max_machine() -> Cra {
    let registry = int_registry(&["0", "+", "max"]);
    let regs = vec!["x".to_string(), "y".to_string()];
    let mut m = Cra::new(Alphabet::of(&["a", "#"]), regs.clone(), registry);
    let p = m.add_state("p");
    let q = m.add_state("q");
    let theta_a = upd(&regs, &[("x", "x + val"), ("y", "y")]);
    let theta_hash = upd(&regs, &[("x", "0"), ("y", "max(y, x)")]);
    m.add_transition(p, Some("a"), theta_a.clone(), q).unwrap();
    m.add_transition(q, Some("a"), theta_a, q).unwrap();
    m.add_transition(q, Some("#"), theta_hash, p).unwrap();
    m.set_init(p, upd(&regs, &[("x", "0"), ("y", "0")]));
    m.set_final(p, Expr::reg("y"));
    m
}

/// Copyful UCRA: maximum drawdown of the a-tagged values after the last
/// b-tagged value; defined on words with at least one `b`.
pub fn drawdown_machine() -> Cra {
    let registry = int_registry(&["0", "max", "monus"]);
    let regs = vec!["x".to_string(), "y".to_string()];
    let mut m = Cra::new(Alphabet::of(&["a", "b"]), regs.clone(), registry);
    let p = m.add_state("p");
    let q = m.add_state("q");
    let reset = upd(&regs, &[("x", "0"), ("y", "0")]);
    let theta = upd(
        &regs,
        &[
            ("x", "max(x, val)"),
            ("y", "max(y, monus(max(x, val), val))"),
        ],
    );
    m.add_transition(p, Some("a"), reset.clone(), p).unwrap();
    m.add_transition(p, Some("b"), reset.clone(), p).unwrap();
    m.add_transition(p, Some("b"), reset.clone(), q).unwrap();
    m.add_transition(q, Some("a"), theta, q).unwrap();
    m.set_init(p, reset);
    m.set_final(q, Expr::reg("y"));
    m
}

/// The separation fixture: a one-register copyless UCRA over the free
/// monoid on {a, b, #} computing, block by block, `c^|u|#` where `c` is the
/// block's last letter. Its domain is `([ab]+#)*`.
pub fn end_letter_blocks_machine() -> Cra {
    let registry = Arc::new(
        make_registry(&RegistryDescriptor::free_monoid(&["a", "b", "#"]))
            .expect("fixture registry"),
    );
    let regs = vec!["x".to_string()];
    let mut m = Cra::new(Alphabet::of(&["a", "b", "#"]), regs.clone(), registry);
    let start = m.add_state("start");
    // per guessed end letter c: m_c (last read letter != c), l_c (last == c)
    let ma = m.add_state("m_a");
    let la = m.add_state("l_a");
    let mb = m.add_state("m_b");
    let lb = m.add_state("l_b");
    let app = |c: &str| upd(&regs, &[("x", &format!("x*{c}"))]);
    let hash = upd(&regs, &[("x", "x*#")]);
    // guess c = a: every block letter appends `a`
    m.add_transition(start, Some("a"), app("a"), la).unwrap();
    m.add_transition(start, Some("b"), app("a"), ma).unwrap();
    m.add_transition(ma, Some("a"), app("a"), la).unwrap();
    m.add_transition(ma, Some("b"), app("a"), ma).unwrap();
    m.add_transition(la, Some("a"), app("a"), la).unwrap();
    m.add_transition(la, Some("b"), app("a"), ma).unwrap();
    m.add_transition(la, Some("#"), hash.clone(), start).unwrap();
    // guess c = b
    m.add_transition(start, Some("b"), app("b"), lb).unwrap();
    m.add_transition(start, Some("a"), app("b"), mb).unwrap();
    m.add_transition(mb, Some("b"), app("b"), lb).unwrap();
    m.add_transition(mb, Some("a"), app("b"), mb).unwrap();
    m.add_transition(lb, Some("b"), app("b"), lb).unwrap();
    m.add_transition(lb, Some("a"), app("b"), mb).unwrap();
    m.add_transition(lb, Some("#"), hash, start).unwrap();
    m.set_init(start, upd(&regs, &[("x", "1")]));
    m.set_final(start, Expr::reg("x"));
    m
}

/// The reference output of the separation fixture: per block `u#`, append
/// `c^|u|#` where `c` is the last letter of `u`.
pub fn end_letter_blocks_oracle(tags: &[&str]) -> Option<Value> {
    let mut out = String::new();
    let mut block: Vec<&str> = Vec::new();
    for &t in tags {
        if t == "#" {
            let last = *block.last()?;
            for _ in 0..block.len() {
                out.push_str(last);
            }
            out.push('#');
            block.clear();
        } else {
            block.push(t);
        }
    }
    if !block.is_empty() {
        return None; // trailing unterminated block: outside the domain
    }
    Some(Value::Str(out))
}

/// A deliberately ambiguous machine: two ε-guess paths both accept "a".
pub fn ambiguous_two_path_machine() -> Cra {
    let registry = int_registry(&["0", "1", "+"]);
    let regs = vec!["x".to_string()];
    let mut m = Cra::new(Alphabet::of(&["a"]), regs.clone(), registry);
    let s = m.add_state("s");
    let p1 = m.add_state("p1");
    let p2 = m.add_state("p2");
    let f = m.add_state("f");
    m.add_transition(s, None, upd(&regs, &[("x", "0")]), p1).unwrap();
    m.add_transition(s, None, upd(&regs, &[("x", "1")]), p2).unwrap();
    m.add_transition(p1, Some("a"), upd(&regs, &[("x", "x + val")]), f)
        .unwrap();
    m.add_transition(p2, Some("a"), upd(&regs, &[("x", "x + val")]), f)
        .unwrap();
    m.set_init(s, upd(&regs, &[("x", "0")]));
    m.set_final(f, Expr::reg("x"));
    m
}

/// A 2-state weighted automaton over (ℕ, +, ×) counting occurrences of the
/// factor "ab".
pub fn factor_count_wa() -> WeightedAutomaton {
    let s = semiring_by_name("nat-arith", None).expect("preset");
    let alpha = Alphabet::of(&["a", "b"]);
    let mut wa = WeightedAutomaton::new(s, alpha, vec!["scan".into(), "a".into(), "done".into()]);
    let one = Value::int(1);
    wa.set_weight(0, 0, 0, one.clone());
    wa.set_weight(0, 1, 0, one.clone());
    wa.set_weight(0, 0, 1, one.clone());
    wa.set_weight(1, 1, 2, one.clone());
    wa.set_weight(2, 0, 2, one.clone());
    wa.set_weight(2, 1, 2, one.clone());
    wa.init[0] = one.clone();
    wa.fin[2] = one;
    wa
}

/// A tropical 2-state fixture with several competing paths.
pub fn tropical_wa() -> WeightedAutomaton {
    let s = semiring_by_name("tropical", None).expect("preset");
    let alpha = Alphabet::of(&["a", "b"]);
    let mut wa = WeightedAutomaton::new(s, alpha, vec!["p".into(), "q".into()]);
    wa.init[0] = Value::int(0);
    wa.init[1] = Value::int(2);
    wa.fin[1] = Value::int(0);
    wa.set_weight(0, 0, 0, Value::int(3));
    wa.set_weight(0, 0, 1, Value::int(5));
    wa.set_weight(1, 0, 1, Value::int(1));
    wa.set_weight(1, 0, 0, Value::int(9));
    wa.set_weight(0, 1, 1, Value::int(4));
    wa.set_weight(1, 1, 1, Value::int(0));
    wa
}

/// An unambiguous weighted automaton over the free monoid on {a, b, #}: on
/// `u#` it emits `a^|u|#` or `b^|u|#` depending on the end letter of `u`.
pub fn end_letter_uwa() -> WeightedAutomaton {
    let letters = vec!["a".to_string(), "b".to_string(), "#".to_string()];
    let s = semiring_by_name("free", Some(&letters)).expect("preset");
    let alpha = Alphabet::of(&["a", "b", "#"]);
    let mut wa = WeightedAutomaton::new(
        s,
        alpha,
        vec!["m_a".into(), "l_a".into(), "m_b".into(), "l_b".into(), "done".into()],
    );
    let a = Value::str("a");
    let b = Value::str("b");
    let hash = Value::str("#");
    let eps = Value::str("");
    // guess end letter a
    wa.set_weight(0, 0, 1, a.clone());
    wa.set_weight(0, 1, 0, a.clone());
    wa.set_weight(1, 0, 1, a.clone());
    wa.set_weight(1, 1, 0, a.clone());
    wa.set_weight(1, 2, 4, hash.clone());
    // guess end letter b
    wa.set_weight(2, 1, 3, b.clone());
    wa.set_weight(2, 0, 2, b.clone());
    wa.set_weight(3, 1, 3, b.clone());
    wa.set_weight(3, 0, 2, b.clone());
    wa.set_weight(3, 2, 4, hash);
    wa.init[0] = eps.clone();
    wa.init[2] = eps.clone();
    wa.fin[4] = eps;
    wa
}

/// Enumerates all tag words over `alphabet` up to the given length.
pub fn tag_words(alphabet: &Alphabet, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for s in 0..alphabet.len() {
                let mut w2 = w.clone();
                w2.push(s);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Enumerates all data words (tag index, value) with the given tag word and
/// values drawn from `values`.
pub fn value_assignments(tag_word: &[usize], values: &[Value]) -> Vec<Vec<(usize, Value)>> {
    let mut out: Vec<Vec<(usize, Value)>> = vec![Vec::new()];
    for &t in tag_word {
        let mut next = Vec::new();
        for w in &out {
            for v in values {
                let mut w2 = w.clone();
                w2.push((t, v.clone()));
                next.push(w2);
            }
        }
        out = next;
    }
    out
}
