//! DOT export for the compilation pipeline: output DAGs and the
//! future-past automaton with its shapes.

use std::fmt::Write as _;

use super::dag_eval::OutputDag;
use super::future_past::FuturePast;
use super::RuleTransduction;

pub fn dag_to_dot(t: &RuleTransduction, dag: &OutputDag, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  rankdir=LR;");
    for (&(copy, pos), label) in &dag.vertices {
        let style = if (copy, pos) == dag.sink {
            ", penwidth=2"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  v{copy}_{pos} [label=\"{}@{pos}: {label}\"{style}];",
            t.copies[copy]
        );
    }
    for (&(dst, y), sources) in &dag.args {
        for (&arg, &(src, x)) in sources {
            let _ = writeln!(out, "  v{src}_{x} -> v{dst}_{y} [label=\"{arg}\"];");
        }
    }
    let _ = writeln!(out, "}}");
    out
}

/// The future-past automaton with each state annotated by its shape:
/// active copies and labels, ε-edges, sinks, and the carried register.
pub fn future_past_to_dot(t: &RuleTransduction, fp: &FuturePast, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=box];");
    for (i, shape) in fp.shapes.iter().enumerate() {
        let mut lines = Vec::new();
        let (atom, past) = fp.states[i];
        lines.push(format!("q{i} (atom {atom}, past {past})"));
        for (&c, label) in &shape.active {
            let sink = if shape.sinks.contains(&c) { " ◂sink" } else { "" };
            lines.push(format!("{}: {label}{sink}", t.copies[c]));
        }
        for &ei in &shape.eps_edges {
            let e = &t.edge_rules[ei];
            lines.push(format!("ε: {} →{} {}", e.src, e.arg, e.dst));
        }
        for &(ei, sym) in &shape.out_letter {
            let e = &t.edge_rules[ei];
            lines.push(format!(
                "{}: {} →{} {}",
                t.alphabet.symbol(sym),
                e.src,
                e.arg,
                e.dst
            ));
        }
        if let Some(c) = shape.carried {
            lines.push(format!("carries {}", t.copies[c]));
        }
        let style = if fp.finals.contains(&i) {
            ", peripheries=2"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  q{i} [label=\"{}\"{style}];",
            lines.join("\\n").replace('"', "\\\"")
        );
    }
    for &i in &fp.initial {
        let _ = writeln!(out, "  start{i} [shape=point];");
        let _ = writeln!(out, "  start{i} -> q{i};");
    }
    for &(f, sym, to) in &fp.transitions {
        let _ = writeln!(
            out,
            "  q{f} -> q{to} [label=\"{}\"];",
            t.alphabet.symbol(sym)
        );
    }
    let _ = writeln!(out, "}}");
    out
}
