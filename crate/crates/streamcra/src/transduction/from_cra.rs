//! The converse direction: reading a single-step rule transduction off an
//! unambiguous CRA. One copy per register, plus copies for the nodes of
//! every update and finalization expression; registers are forwarded
//! through id-labeled chain vertices gated by liveness, so exactly one
//! vertex of the output DAG — the finalization root — is a sink.

use std::collections::BTreeSet;

use crate::automata::{dfa_to_regex, nfa_to_min_dfa, Nfa, Regex};
use crate::cra::Cra;
use crate::error::{Error, Result};
use crate::expr::Expr;

use super::{EdgeRule, Label, RuleTransduction, VertexRule};

/// The language of strings leading from the machine's initial states into
/// `q`, as a regex.
fn into_state(m: &Cra, q: usize) -> Result<Regex> {
    let mut nfa = m.rate();
    nfa.finals = BTreeSet::from([q]);
    Ok(dfa_to_regex(&nfa_to_min_dfa(&nfa)?))
}

/// Liveness: for each (state, register), the suffix language on which the
/// register's current value eventually flows into the final output.
fn liveness(m: &Cra) -> Result<Vec<Vec<Regex>>> {
    let n = m.state_count();
    let x = m.register_count();
    let id = |q: usize, xi: usize| q * x + xi;
    let mut nfa = Nfa::new(m.alphabet.clone(), n * x);
    for t in &m.transitions {
        let sym = t.tag.expect("ε-free");
        for (xi_to, reg_to) in m.registers.iter().enumerate() {
            for (reg_from, _) in t.update[reg_to].registers() {
                let xi_from = m
                    .registers
                    .iter()
                    .position(|r| *r == reg_from)
                    .expect("bound register");
                nfa.add_transition(id(t.from, xi_from), Some(sym), id(t.to, xi_to));
            }
        }
    }
    for (&q, f) in &m.fin {
        for (reg, _) in f.registers() {
            let xi = m.registers.iter().position(|r| *r == reg).expect("bound");
            nfa.finals.insert(id(q, xi));
        }
    }
    let mut out = vec![vec![Regex::Empty; x]; n];
    for q in 0..n {
        for xi in 0..x {
            let mut from_here = nfa.clone();
            from_here.initial = vec![id(q, xi)];
            out[q][xi] = dfa_to_regex(&nfa_to_min_dfa(&from_here)?);
        }
    }
    Ok(out)
}

struct Builder {
    copies: Vec<String>,
    vertex_rules: Vec<VertexRule>,
    edge_rules: Vec<EdgeRule>,
    counter: usize,
}

/// How register leaves of an expression tree are wired to their parents.
enum RegWire {
    /// A letter edge from the previous position: (prefix, tag).
    Letter(Regex, String),
    /// An ε edge at the same position (finalization reads position n).
    Epsilon(Regex),
}

enum Src {
    Reg(String),
    Node(String),
}

impl Builder {
    fn reg_copy(reg: &str) -> String {
        format!("reg_{reg}")
    }

    fn fresh(&mut self, ns: &str) -> String {
        self.counter += 1;
        let name = format!("{ns}_n{}", self.counter);
        self.copies.push(name.clone());
        name
    }

    fn vertex(&mut self, copy: &str, label: Label, prefix: Regex, suffix: Regex) {
        self.vertex_rules.push(VertexRule {
            copy: copy.to_string(),
            label,
            prefix,
            suffix,
        });
    }

    fn eps_edge(&mut self, src: &str, dst: &str, arg: usize, prefix: Regex, suffix: Regex) {
        self.edge_rules.push(EdgeRule {
            src: src.to_string(),
            dst: dst.to_string(),
            arg,
            prefix,
            infix: Regex::Eps,
            suffix,
        });
    }

    fn letter_edge(
        &mut self,
        src: &str,
        dst: &str,
        arg: usize,
        prefix: Regex,
        tag: &str,
        suffix: Regex,
    ) {
        self.edge_rules.push(EdgeRule {
            src: src.to_string(),
            dst: dst.to_string(),
            arg,
            prefix,
            infix: Regex::lit(tag),
            suffix,
        });
    }

    /// Emits the vertices and intra-tree edges for an expression; `pre`
    /// and `suffix` position the vertices, `wire` wires register leaves.
    fn emit_tree(
        &mut self,
        expr: &Expr,
        ns: &str,
        pre: &Regex,
        suffix: &Regex,
        wire: &RegWire,
    ) -> Src {
        match expr {
            Expr::Reg(y) => Src::Reg(y.clone()),
            Expr::Const(c) => {
                let node = self.fresh(ns);
                self.vertex(&node, Label::Op(c.clone()), pre.clone(), suffix.clone());
                Src::Node(node)
            }
            Expr::CurrentVal => {
                let node = self.fresh(ns);
                self.vertex(&node, Label::Val, pre.clone(), suffix.clone());
                Src::Node(node)
            }
            Expr::Apply(op, args) => {
                let node = self.fresh(ns);
                self.vertex(&node, Label::Op(op.clone()), pre.clone(), suffix.clone());
                for (i, a) in args.iter().enumerate() {
                    let arg = i + 1;
                    match self.emit_tree(a, ns, pre, suffix, wire) {
                        Src::Node(k) => {
                            self.eps_edge(&k, &node, arg, pre.clone(), suffix.clone())
                        }
                        Src::Reg(y) => self.wire_reg(&y, &node, arg, suffix, wire),
                    }
                }
                Src::Node(node)
            }
        }
    }

    fn wire_reg(&mut self, y: &str, dst: &str, arg: usize, suffix: &Regex, wire: &RegWire) {
        let src = Self::reg_copy(y);
        match wire {
            RegWire::Letter(lp, tag) => {
                self.letter_edge(&src, dst, arg, lp.clone(), tag, suffix.clone())
            }
            RegWire::Epsilon(lq) => {
                self.eps_edge(&src, dst, arg, lq.clone(), suffix.clone());
            }
        }
    }
}

/// Extracts a single-step rule transduction from an unambiguous, trim,
/// ε-free CRA. The result is word-to-tree iff the machine is copyless.
pub fn cra_to_rules(m: &Cra) -> Result<RuleTransduction> {
    let d = m.validate();
    if m.has_epsilon() {
        return Err(Error::InvalidMachine("cra_to_rules needs an ε-free machine".into()));
    }
    if !d.is_unambiguous {
        return Err(Error::NotUnambiguous(d.notes.join("; ")));
    }
    if !d.is_trim {
        return Err(Error::InvalidMachine("cra_to_rules needs a trim machine".into()));
    }
    let live = liveness(m)?;
    let live_of = |q: usize, reg: &str| -> Regex {
        let xi = m.registers.iter().position(|r| r == reg).expect("bound");
        live[q][xi].clone()
    };

    let mut b = Builder {
        copies: m.registers.iter().map(|r| Builder::reg_copy(r)).collect(),
        vertex_rules: Vec::new(),
        edge_rules: Vec::new(),
        counter: 0,
    };

    let into: Vec<Regex> = (0..m.state_count())
        .map(|q| into_state(m, q))
        .collect::<Result<_>>()?;

    // initializations place position-0 vertices
    for (&q0, init) in &m.init {
        for (xi, reg) in m.registers.iter().enumerate() {
            let suffix = live[q0][xi].clone();
            if suffix == Regex::Empty {
                continue;
            }
            let ns = format!("i{q0}_{reg}");
            let wire = RegWire::Letter(Regex::Empty, String::new()); // unreachable: inits are closed
            let src = b.emit_tree(&init[reg], &ns, &Regex::Eps, &suffix, &wire);
            let top = Builder::reg_copy(reg);
            b.vertex(&top, Label::Id, Regex::Eps, suffix.clone());
            match src {
                Src::Node(k) => b.eps_edge(&k, &top, 1, Regex::Eps, suffix),
                Src::Reg(_) => {
                    return Err(Error::InvalidMachine(
                        "initializations must be closed expressions".into(),
                    ))
                }
            }
        }
    }

    // transitions place vertices at every position they fire
    for (ti, t) in m.transitions.iter().enumerate() {
        let tag = m.alphabet.symbol(t.tag.expect("ε-free")).to_string();
        let lp = into[t.from].clone();
        let pre = Regex::concat(lp.clone(), Regex::lit(tag.clone()));
        for reg in &m.registers {
            let suffix = live_of(t.to, reg);
            if suffix == Regex::Empty {
                continue;
            }
            let ns = format!("t{ti}_{reg}");
            let wire = RegWire::Letter(lp.clone(), tag.clone());
            let src = b.emit_tree(&t.update[reg], &ns, &pre, &suffix, &wire);
            let top = Builder::reg_copy(reg);
            b.vertex(&top, Label::Id, pre.clone(), suffix.clone());
            match src {
                Src::Node(k) => b.eps_edge(&k, &top, 1, pre.clone(), suffix),
                Src::Reg(y) => {
                    let src_copy = Builder::reg_copy(&y);
                    b.letter_edge(&src_copy, &top, 1, lp.clone(), &tag, suffix);
                }
            }
        }
    }

    // finalizations place the sink at the last position
    for (&q, f) in &m.fin {
        let lq = into[q].clone();
        let ns = format!("o{q}");
        let wire = RegWire::Epsilon(lq.clone());
        let src = b.emit_tree(f, &ns, &lq, &Regex::Eps, &wire);
        if let Src::Reg(y) = src {
            // wrap a bare register read in an id vertex so the sink is a node
            let node = b.fresh(&ns);
            b.vertex(&node, Label::Id, lq.clone(), Regex::Eps);
            let src_copy = Builder::reg_copy(&y);
            b.eps_edge(&src_copy, &node, 1, lq.clone(), Regex::Eps);
        }
    }

    let domain = dfa_to_regex(&nfa_to_min_dfa(&m.rate())?);
    let t = RuleTransduction {
        alphabet: m.alphabet.clone(),
        copies: b.copies,
        domain,
        vertex_rules: b.vertex_rules,
        edge_rules: b.edge_rules,
        registry: m.registry.clone(),
    };
    t.check_structure()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use crate::cra::{eval_stream, DEFAULT_ORACLE_BOUND};
    use crate::fixtures;
    use crate::transduction::{compile_to_ucra, cra_to_rules, dag_oracle_eval, is_tree};
    use crate::value::Value;

    fn round_trip(m: &crate::cra::Cra, max_len: usize) {
        let rules = cra_to_rules(m).unwrap();
        let back = compile_to_ucra(&rules).unwrap();
        let values = [Value::int(0), Value::int(1), Value::int(2)];
        for tags in fixtures::tag_words(&m.alphabet, max_len) {
            for w in fixtures::value_assignments(&tags, &values) {
                let word: Vec<(String, Value)> = w
                    .iter()
                    .map(|(s, v)| (m.alphabet.symbol(*s).to_string(), v.clone()))
                    .collect();
                let want = crate::cra::eval_paths_oracle(m, &word, DEFAULT_ORACLE_BOUND)
                    .unwrap()
                    .pop();
                let direct = dag_oracle_eval(&rules, &word).unwrap();
                assert_eq!(direct, want, "dag oracle disagrees on {word:?}");
                let (got, _) = eval_stream(&back, word.clone()).unwrap();
                assert_eq!(got, want, "round trip disagrees on {word:?}");
            }
        }
    }

    #[test]
    fn identity_machine_round_trips() {
        // single-state single-register machine: last value
        let registry = fixtures::int_registry(&["0", "+"]);
        let regs = vec!["x".to_string()];
        let mut m = crate::cra::Cra::new(
            crate::automata::Alphabet::of(&["a"]),
            regs.clone(),
            registry,
        );
        let q = m.add_state("q");
        let upd: crate::cra::Update = [(
            "x".to_string(),
            crate::expr::parse_expr("val", &regs).unwrap(),
        )]
        .into();
        m.add_transition(q, Some("a"), upd, q).unwrap();
        m.set_init(q, [("x".to_string(), crate::expr::Expr::constant("0"))].into());
        m.set_final(q, crate::expr::Expr::reg("x"));
        let rules = cra_to_rules(&m).unwrap();
        assert!(is_tree(&rules).unwrap());
        round_trip(&m, 3);
    }

    #[test]
    fn sum_machine_round_trips() {
        round_trip(&fixtures::sum_machine(), 3);
    }

    #[test]
    fn block_machine_round_trips() {
        let m = fixtures::block_max_machine();
        let rules = cra_to_rules(&m).unwrap();
        // the machine is copyless, so the rules are word-to-tree
        assert!(is_tree(&rules).unwrap());
        let wf = crate::transduction::check_wellformed(&rules).unwrap();
        assert!(wf.all_ok(), "{}", wf.summary());
        round_trip(&m, 3);
    }

    #[test]
    fn drawdown_machine_round_trips() {
        // copyful: the rules form a DAG, not a tree
        let m = fixtures::drawdown_machine();
        let rules = cra_to_rules(&m).unwrap();
        assert!(!is_tree(&rules).unwrap());
        round_trip(&m, 3);
    }
}
