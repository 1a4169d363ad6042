//! Shared brute-force oracles and mutation fixtures for the integration
//! suites.

use std::collections::BTreeMap;
use std::sync::Arc;

use streamcra::automata::{parse_regex, Dfa, Regex};
use streamcra::cra::{Cra, Update};
use streamcra::expr::parse_expr;
use streamcra::ops::{make_registry, RegistryDescriptor};
use streamcra::transduction::{
    sum_of_a_rules, EdgeRule, Label, RuleTransduction, VertexRule,
};

/// Number of splits w = uv with u ∈ A and v ∈ B, by direct enumeration.
pub fn count_splits(a: &Dfa, b: &Dfa, word: &[usize]) -> usize {
    (0..=word.len())
        .filter(|&i| a.accepts(&word[..i]) && b.accepts(&word[i..]))
        .count()
}

/// Number of decompositions of the word into blocks from A, by direct
/// enumeration. When ε ∈ A any decomposable word has unboundedly many
/// decompositions by ε-padding; the count is reported as 2 then.
pub fn count_decompositions(a: &Dfa, word: &[usize], _unused: usize) -> usize {
    fn nonempty_blocks(a: &Dfa, word: &[usize], memo: &mut BTreeMap<usize, usize>, from: usize) -> usize {
        if from == word.len() {
            return 1;
        }
        if let Some(&n) = memo.get(&from) {
            return n;
        }
        let mut total = 0;
        for to in from + 1..=word.len() {
            if a.accepts(&word[from..to]) {
                total += nonempty_blocks(a, word, memo, to);
            }
        }
        memo.insert(from, total);
        total
    }
    let mut memo = BTreeMap::new();
    let base = nonempty_blocks(a, word, &mut memo, 0);
    if a.accepts(&[]) {
        // ε-padding multiplies any decomposition without bound
        if base >= 1 {
            2
        } else {
            0
        }
    } else {
        base
    }
}

/// The d^(2^i) machine: a single register squared by the binary semiring
/// multiplication on every step. Beyond weighted automata by design.
pub fn binary_times_machine() -> Cra {
    let descriptor = RegistryDescriptor {
        domain: "semiring".into(),
        semiring: Some("nat-arith".into()),
        ops: vec!["0".into(), "1".into(), "+".into(), "times".into()],
        ..Default::default()
    };
    let registry = Arc::new(make_registry(&descriptor).unwrap());
    let regs = vec!["x".to_string()];
    let mut m = Cra::new(
        streamcra::automata::Alphabet::of(&["a"]),
        regs.clone(),
        registry,
    );
    let q = m.add_state("q");
    let upd: Update = [(
        "x".to_string(),
        parse_expr("times(x, x)", &regs).unwrap(),
    )]
    .into();
    m.add_transition(q, Some("a"), upd, q).unwrap();
    m.set_init(q, [("x".to_string(), parse_expr("1*2", &regs).unwrap())].into());
    m.set_final(q, parse_expr("x", &regs).unwrap());
    m
}

fn rx(src: &str) -> Regex {
    parse_regex(src).unwrap()
}

/// Ten rule files, each broken so that exactly one well-formedness
/// condition fails: one per condition, plus duplicates.
pub fn broken_rule_suite() -> Vec<(&'static str, usize, RuleTransduction)> {
    let mut out = Vec::new();

    // (1) a second label for S wherever S:0 fires
    let mut t = sum_of_a_rules();
    t.vertex_rules.push(VertexRule {
        copy: "S".into(),
        label: Label::Op("+".into()),
        prefix: rx("eps"),
        suffix: rx("[AB]*"),
    });
    out.push(("duplicate-zero-label", 1, t));

    // (2) an edge firing where its source V is inactive (after a B)
    let mut t = sum_of_a_rules();
    t.edge_rules.push(EdgeRule {
        src: "V".into(),
        dst: "S".into(),
        arg: 2,
        prefix: rx("[AB]*B"),
        infix: rx("eps"),
        suffix: rx("[AB]*"),
    });
    out.push(("edge-from-inactive-source", 2, t));

    // (3) the domain shrinks but the position-0 vertex stays
    let mut t = sum_of_a_rules();
    t.domain = rx("[AB]+");
    out.push(("output-outside-domain", 3, t));

    // (4) a two-copy ε-cycle of id vertices at every A-position
    let mut t = sum_of_a_rules();
    t.copies.push("P".into());
    t.copies.push("Q".into());
    for c in ["P", "Q"] {
        t.vertex_rules.push(VertexRule {
            copy: c.into(),
            label: Label::Id,
            prefix: rx("[AB]*A"),
            suffix: rx("[AB]*"),
        });
    }
    for (src, dst) in [("P", "Q"), ("Q", "P")] {
        t.edge_rules.push(EdgeRule {
            src: src.into(),
            dst: dst.into(),
            arg: 1,
            prefix: rx("[AB]*A"),
            infix: rx("eps"),
            suffix: rx("[AB]*"),
        });
    }
    out.push(("local-id-cycle", 4, t));

    // (5) a second edge into S's argument 2
    let mut t = sum_of_a_rules();
    t.edge_rules.push(EdgeRule {
        src: "S".into(),
        dst: "S".into(),
        arg: 2,
        prefix: rx("eps|[AB]*A"),
        infix: rx("B*A"),
        suffix: rx("[AB]*"),
    });
    out.push(("doubled-argument", 5, t));

    // (6) an output vertex with no outgoing edge at every A-position
    let mut t = sum_of_a_rules();
    t.copies.push("W".into());
    t.vertex_rules.push(VertexRule {
        copy: "W".into(),
        label: Label::Op("0".into()),
        prefix: rx("[AB]*A"),
        suffix: rx("[AB]*"),
    });
    out.push(("second-sink", 6, t));

    // (7) a val vertex at position 0, in a minimal standalone transduction
    let t = RuleTransduction {
        alphabet: streamcra::automata::Alphabet::of(&["A", "B"]),
        copies: vec!["C".into()],
        domain: rx("eps"),
        vertex_rules: vec![VertexRule {
            copy: "C".into(),
            label: Label::Val,
            prefix: rx("eps"),
            suffix: rx("eps"),
        }],
        edge_rules: vec![],
        registry: Arc::new(make_registry(&RegistryDescriptor::int(&["0", "+"])).unwrap()),
    };
    out.push(("val-at-position-zero", 7, t));

    // (8) an edge into a copy with no vertex rules at all
    let mut t = sum_of_a_rules();
    t.copies.push("Z".into());
    t.edge_rules.push(EdgeRule {
        src: "V".into(),
        dst: "Z".into(),
        arg: 1,
        prefix: rx("[AB]*A"),
        infix: rx("eps"),
        suffix: rx("[AB]*"),
    });
    out.push(("edge-into-inactive-target", 8, t));

    // (9) another second sink, now at position 0 on every word
    let mut t = sum_of_a_rules();
    t.copies.push("W".into());
    t.vertex_rules.push(VertexRule {
        copy: "W".into(),
        label: Label::Op("0".into()),
        prefix: rx("eps"),
        suffix: rx("[AB]*"),
    });
    out.push(("second-sink-at-start", 9, t));

    // (10) a second label for V wherever it is active
    let mut t = sum_of_a_rules();
    t.vertex_rules.push(VertexRule {
        copy: "V".into(),
        label: Label::Id,
        prefix: rx("[AB]*A"),
        suffix: rx("[AB]*"),
    });
    out.push(("duplicate-val-label", 10, t));

    out.into_iter()
        .map(|(name, cond, t)| {
            // mutants 8–10 duplicate conditions 2, 6, and 1
            let condition = match cond {
                8 => 2,
                9 => 6,
                10 => 1,
                c => c,
            };
            (name, condition, t)
        })
        .collect()
}
