//! DOT export for automata.

use std::fmt::Write as _;

use super::{Dfa, Nfa};

pub fn nfa_to_dot(nfa: &Nfa, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  rankdir=LR;");
    for q in 0..nfa.state_count {
        let shape = if nfa.finals.contains(&q) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(out, "  q{q} [shape={shape}];");
    }
    for (i, &init) in nfa.initial.iter().enumerate() {
        let _ = writeln!(out, "  start{i} [shape=point];");
        let _ = writeln!(out, "  start{i} -> q{init};");
    }
    for &(f, s, t) in &nfa.transitions {
        let label = match s {
            Some(sym) => nfa.alphabet.symbol(sym).to_string(),
            None => "ε".to_string(),
        };
        let _ = writeln!(out, "  q{f} -> q{t} [label=\"{label}\"];");
    }
    let _ = writeln!(out, "}}");
    out
}

pub fn dfa_to_dot(dfa: &Dfa, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  rankdir=LR;");
    for q in 0..dfa.state_count {
        let shape = if dfa.finals.contains(&q) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(out, "  q{q} [shape={shape}];");
    }
    let _ = writeln!(out, "  start [shape=point];");
    let _ = writeln!(out, "  start -> q{};", dfa.initial);
    for (q, row) in dfa.trans.iter().enumerate() {
        for (sym, &t) in row.iter().enumerate() {
            let _ = writeln!(
                out,
                "  q{q} -> q{t} [label=\"{}\"];",
                dfa.alphabet.symbol(sym)
            );
        }
    }
    let _ = writeln!(out, "}}");
    out
}
