//! Single-step decomposition: every edge rule is rewritten to span at most
//! one input position, threading long edges through fresh id-labeled copies
//! that simulate the minimal DFA of the rule's infix expression.

use crate::automata::{dfa_to_regex, regex_to_dfa, Dfa, Regex};
use crate::error::Result;

use super::{EdgeRule, Label, RuleTransduction, VertexRule};

/// Is the infix language within {ε} ∪ Σ (already single-step)?
fn short_infix(d: &Dfa) -> bool {
    let alphabet = &d.alphabet;
    let mut ok = true;
    // every accepted word must have length ≤ 1
    for sym in 0..alphabet.len() {
        let q = d.step(d.initial, sym);
        for sym2 in 0..alphabet.len() {
            let q2 = d.step(q, sym2);
            if !d.from_state(q2).is_empty() {
                ok = false;
            }
        }
    }
    ok
}

/// One letter, as a regex, per alphabet symbol accepted by the infix.
fn accepted_letters(d: &Dfa) -> Vec<usize> {
    (0..d.alphabet.len())
        .filter(|&sym| d.finals.contains(&d.step(d.initial, sym)))
        .collect()
}

/// Splits possibly-mixed single-step rules into pure ε and pure
/// single-letter rules, which the shape analysis needs.
fn split_mixed(rule: &EdgeRule, infix_dfa: &Dfa, out: &mut Vec<EdgeRule>) {
    if infix_dfa.accepts_empty() {
        out.push(EdgeRule {
            infix: Regex::Eps,
            ..rule.clone()
        });
    }
    for sym in accepted_letters(infix_dfa) {
        out.push(EdgeRule {
            infix: Regex::lit(infix_dfa.alphabet.symbol(sym)),
            ..rule.clone()
        });
    }
}

/// The pruned partial DFA of a long infix: the minimal DFA restricted to
/// states that can still reach acceptance.
struct Pruned {
    dfa: Dfa,
    alive: Vec<bool>,
}

impl Pruned {
    fn new(d: &Dfa) -> Pruned {
        let min = d.minimize();
        let alive = (0..min.state_count)
            .map(|q| !min.from_state(q).is_empty())
            .collect();
        Pruned { dfa: min, alive }
    }

    /// Strings leading from the initial state to q.
    fn into_state(&self, q: usize) -> Regex {
        let mut d = self.dfa.clone();
        d.finals = std::iter::once(q).collect();
        dfa_to_regex(&d)
    }

    /// Strings leading from q to acceptance.
    fn from_state(&self, q: usize) -> Regex {
        dfa_to_regex(&self.dfa.from_state(q))
    }
}

/// Rewrites the transduction into an equivalent single-step one over the
/// same registry extended with the identity label. Evaluation semantics
/// and tree-ness are preserved; the copy set grows by one fresh id-copy
/// per live state of each long infix's minimal DFA.
pub fn single_step(t: &RuleTransduction) -> Result<RuleTransduction> {
    let mut out = RuleTransduction {
        alphabet: t.alphabet.clone(),
        copies: t.copies.clone(),
        domain: t.domain.clone(),
        vertex_rules: t.vertex_rules.clone(),
        edge_rules: Vec::new(),
        registry: t.registry.clone(),
    };
    let mut fresh = 0usize;
    for rule in &t.edge_rules {
        let infix_dfa = regex_to_dfa(&rule.infix, &t.alphabet)?;
        if infix_dfa.is_empty() {
            continue; // the rule never fires
        }
        if short_infix(&infix_dfa) {
            split_mixed(rule, &infix_dfa, &mut out.edge_rules);
            continue;
        }
        let pruned = Pruned::new(&infix_dfa);
        fresh += 1;
        let copy_of = |q: usize| format!("ss{fresh}_{q}");
        for q in 0..pruned.dfa.state_count {
            if !pruned.alive[q] {
                continue;
            }
            out.copies.push(copy_of(q));
            // label id at v_q: (r1 · L_q) ; (R_q · r3)
            out.vertex_rules.push(VertexRule {
                copy: copy_of(q),
                label: Label::Id,
                prefix: Regex::concat(rule.prefix.clone(), pruned.into_state(q)),
                suffix: Regex::concat(pruned.from_state(q), rule.suffix.clone()),
            });
        }
        // edge c →1 v_I : r1 ; ε ; (r2 · r3)
        out.edge_rules.push(EdgeRule {
            src: rule.src.clone(),
            dst: copy_of(pruned.dfa.initial),
            arg: 1,
            prefix: rule.prefix.clone(),
            infix: Regex::Eps,
            suffix: Regex::concat(rule.infix.clone(), rule.suffix.clone()),
        });
        // edge v_q →i d : (r1 · L_q) ; ε ; r3, for accepting q
        for &q in &pruned.dfa.finals {
            if !pruned.alive[q] {
                continue;
            }
            out.edge_rules.push(EdgeRule {
                src: copy_of(q),
                dst: rule.dst.clone(),
                arg: rule.arg,
                prefix: Regex::concat(rule.prefix.clone(), pruned.into_state(q)),
                infix: Regex::Eps,
                suffix: rule.suffix.clone(),
            });
        }
        // edge v_p →1 v_q : (r1 · L_p) ; a ; (R_q · r3), per DFA transition
        for p in 0..pruned.dfa.state_count {
            if !pruned.alive[p] {
                continue;
            }
            for sym in 0..t.alphabet.len() {
                let q = pruned.dfa.step(p, sym);
                if !pruned.alive[q] {
                    continue;
                }
                out.edge_rules.push(EdgeRule {
                    src: copy_of(p),
                    dst: copy_of(q),
                    arg: 1,
                    prefix: Regex::concat(rule.prefix.clone(), pruned.into_state(p)),
                    infix: Regex::lit(t.alphabet.symbol(sym)),
                    suffix: Regex::concat(pruned.from_state(q), rule.suffix.clone()),
                });
            }
        }
    }
    Ok(out)
}

/// True when every edge rule is normalized: infix exactly ε or one letter.
pub fn is_single_step(t: &RuleTransduction) -> bool {
    t.edge_rules
        .iter()
        .all(|e| matches!(&e.infix, Regex::Eps | Regex::Lit(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transduction::sum_of_a_rules;

    #[test]
    fn sum_of_a_grows_to_four_copies() {
        let t = sum_of_a_rules();
        let s = single_step(&t).unwrap();
        assert!(is_single_step(&s));
        // {V, S} plus the two live states of the B*A automaton
        assert_eq!(s.copies.len(), 4);
    }

    #[test]
    fn already_single_step_input_is_unchanged() {
        let t = sum_of_a_rules();
        let s = single_step(&t).unwrap();
        let again = single_step(&s).unwrap();
        assert_eq!(again.copies.len(), s.copies.len());
        assert_eq!(again.edge_rules.len(), s.edge_rules.len());
    }
}
