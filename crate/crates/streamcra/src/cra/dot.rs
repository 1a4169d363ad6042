//! DOT export for machines.

use std::fmt::Write as _;

use super::Cra;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn cra_to_dot(m: &Cra, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  rankdir=LR;");
    for (q, state) in m.states.iter().enumerate() {
        match m.fin.get(&q) {
            Some(f) => {
                let _ = writeln!(
                    out,
                    "  q{q} [shape=doublecircle, label=\"{} | {}\"];",
                    escape(state),
                    escape(&f.to_string())
                );
            }
            None => {
                let _ = writeln!(out, "  q{q} [shape=circle, label=\"{}\"];", escape(state));
            }
        }
    }
    for (q, init) in &m.init {
        let label: Vec<String> = init.iter().map(|(r, e)| format!("{r} := {e}")).collect();
        let _ = writeln!(out, "  start{q} [shape=point];");
        let _ = writeln!(
            out,
            "  start{q} -> q{q} [label=\"{}\"];",
            escape(&label.join("\\n"))
        );
    }
    for t in &m.transitions {
        let tag = match t.tag {
            Some(sym) => m.alphabet.symbol(sym).to_string(),
            None => "ε".to_string(),
        };
        let updates: Vec<String> = t
            .update
            .iter()
            .filter(|(r, e)| !matches!(e, crate::expr::Expr::Reg(x) if &x == r))
            .map(|(r, e)| format!("{r} := {e}"))
            .collect();
        let _ = writeln!(
            out,
            "  q{} -> q{} [label=\"{tag} | {}\"];",
            t.from,
            t.to,
            escape(&updates.join(", "))
        );
    }
    let _ = writeln!(out, "}}");
    out
}
