//! Structural compilation of queries to unambiguous, trim, ε-free CRAs.
//!
//! Each combinator follows the closure construction for its language
//! analog: products for output combination, disjoint union guarded by a
//! complement DFA for choice, ε-linking plus the unambiguous-concatenation
//! DFA for split, the loop construction plus the unambiguous-iteration DFA
//! for iter, and determinization plus one running register for prefix-sum.

use std::collections::BTreeMap;

use crate::automata::{nfa_to_min_dfa, unamb_concat_dfa, unamb_iter_dfa, Dfa};
use crate::cra::{
    eliminate_epsilon_cra, product_with_dfa, ucra_to_dcra, Cra, CraTransition, Update,
};
use crate::error::{Error, Result};
use crate::expr::Expr;

use super::{Query, QueryExpr};

/// A compiled query: the machine plus any diagnostics raised on the way.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub machine: Cra,
    pub warnings: Vec<String>,
}

fn prefixed(m: &Cra, prefix: &str) -> Cra {
    let renaming: BTreeMap<String, String> = m
        .registers
        .iter()
        .map(|r| (r.clone(), format!("{prefix}{r}")))
        .collect();
    let map_update = |u: &Update| -> Update {
        u.iter()
            .map(|(r, e)| (renaming[r].clone(), e.rename_registers(&renaming)))
            .collect()
    };
    Cra {
        alphabet: m.alphabet.clone(),
        registers: m.registers.iter().map(|r| renaming[r].clone()).collect(),
        states: m.states.iter().map(|s| format!("{prefix}{s}")).collect(),
        transitions: m
            .transitions
            .iter()
            .map(|t| CraTransition {
                from: t.from,
                tag: t.tag,
                update: map_update(&t.update),
                to: t.to,
            })
            .collect(),
        init: m.init.iter().map(|(q, u)| (*q, map_update(u))).collect(),
        fin: m
            .fin
            .iter()
            .map(|(q, e)| (*q, e.rename_registers(&renaming)))
            .collect(),
        registry: m.registry.clone(),
    }
}

struct Compiler<'a> {
    q: &'a Query,
    warnings: Vec<String>,
    fresh: usize,
    constant: Expr,
}

impl<'a> Compiler<'a> {
    fn next_prefix(&mut self) -> String {
        self.fresh += 1;
        format!("f{}_", self.fresh)
    }

    fn const_fill(&self, m: &mut Cra) {
        let c = &self.constant;
        let regs = m.registers.clone();
        for u in m.init.values_mut() {
            for r in &regs {
                u.entry(r.clone()).or_insert_with(|| c.clone());
            }
        }
    }

    /// The empty-rate machine: no states at all.
    fn empty_machine(&self) -> Cra {
        Cra::new(
            self.q.alphabet.clone(),
            Vec::new(),
            self.q.registry.clone(),
        )
    }

    fn go(&mut self, e: &QueryExpr) -> Result<Cra> {
        match e {
            QueryExpr::Eps { constant } => {
                let mut m = Cra::new(
                    self.q.alphabet.clone(),
                    Vec::new(),
                    self.q.registry.clone(),
                );
                let s = m.add_state("e");
                m.set_init(s, Update::new());
                m.set_final(s, Expr::constant(constant.clone()));
                Ok(m)
            }
            QueryExpr::Item { tags, out } => {
                let reg = "v".to_string();
                let mut m = Cra::new(
                    self.q.alphabet.clone(),
                    vec![reg.clone()],
                    self.q.registry.clone(),
                );
                let s0 = m.add_state("i0");
                let s1 = m.add_state("i1");
                for t in tags {
                    m.add_transition(
                        s0,
                        Some(t),
                        Update::from([(reg.clone(), out.clone())]),
                        s1,
                    )?;
                }
                m.set_init(s0, Update::from([(reg.clone(), self.constant.clone())]));
                m.set_final(s1, Expr::Reg(reg));
                Ok(m)
            }
            QueryExpr::OpCombine { op, args } => {
                if args.is_empty() {
                    // a constant on every word
                    let mut m = Cra::new(
                        self.q.alphabet.clone(),
                        Vec::new(),
                        self.q.registry.clone(),
                    );
                    let s = m.add_state("u");
                    for tag in self.q.alphabet.symbols().to_vec() {
                        m.add_transition(s, Some(&tag), Update::new(), s)?;
                    }
                    m.set_init(s, Update::new());
                    m.set_final(s, Expr::constant(op.clone()));
                    return Ok(m);
                }
                let parts: Vec<Cra> = args
                    .iter()
                    .map(|a| {
                        let p = self.next_prefix();
                        self.go(a).map(|m| prefixed(&m, &p))
                    })
                    .collect::<Result<_>>()?;
                self.product_machine(op, &parts)
            }
            QueryExpr::Else { first, second } => {
                let pf = self.next_prefix();
                let pg = self.next_prefix();
                let mf = prefixed(&self.go(first)?, &pf);
                let mg = prefixed(&self.go(second)?, &pg);
                let not_f = nfa_to_min_dfa(&mf.rate())?.complement();
                let guarded = product_with_dfa(&mg, &not_f)?.trim();
                Ok(self.disjoint_union(&mf, &guarded))
            }
            QueryExpr::Split { left, right, op } => {
                let pf = self.next_prefix();
                let pg = self.next_prefix();
                let mf = prefixed(&self.go(left)?, &pf);
                let mg = prefixed(&self.go(right)?, &pg);
                self.split_machine(&mf, &mg, op)
            }
            QueryExpr::Iter { body, init, op } => {
                let mb = self.go(body)?;
                self.iter_machine(&mb, init, op)
            }
            QueryExpr::PrefixSum { body, init, op } => {
                let mb = self.go(body)?;
                self.prefix_sum_machine(&mb, init, op)
            }
        }
    }

    /// Parallel product with finalization `op(F1, ..., Fn)`.
    fn product_machine(&mut self, op: &str, parts: &[Cra]) -> Result<Cra> {
        let mut registers = Vec::new();
        for p in parts {
            registers.extend(p.registers.iter().cloned());
        }
        let mut m = Cra::new(
            self.q.alphabet.clone(),
            registers,
            self.q.registry.clone(),
        );
        // state = tuple of component states
        let mut idx: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        let name = |parts: &[Cra], t: &[usize]| -> String {
            t.iter()
                .zip(parts)
                .map(|(&q, p)| p.states[q].clone())
                .collect::<Vec<_>>()
                .join("*")
        };
        // initial tuples: the cross product of initial states
        let mut seeds: Vec<(Vec<usize>, Update)> = vec![(Vec::new(), Update::new())];
        for p in parts {
            let mut next = Vec::new();
            for (tuple, update) in &seeds {
                for (&q, u) in &p.init {
                    let mut t2 = tuple.clone();
                    t2.push(q);
                    let mut u2 = update.clone();
                    u2.extend(u.iter().map(|(r, e)| (r.clone(), e.clone())));
                    next.push((t2, u2));
                }
            }
            seeds = next;
        }
        let mut queue = std::collections::VecDeque::new();
        for (tuple, update) in seeds {
            let id = *idx.entry(tuple.clone()).or_insert_with(|| {
                let id = m.add_state(name(parts, &tuple));
                tuples.push(tuple.clone());
                queue.push_back(tuple.clone());
                id
            });
            m.set_init(id, update);
        }
        while let Some(tuple) = queue.pop_front() {
            let from = idx[&tuple];
            for sym in 0..self.q.alphabet.len() {
                // all combinations of component transitions on this tag
                let mut combos: Vec<(Vec<usize>, Update)> = vec![(Vec::new(), Update::new())];
                for (i, p) in parts.iter().enumerate() {
                    let mut next = Vec::new();
                    for t in p
                        .transitions
                        .iter()
                        .filter(|t| t.from == tuple[i] && t.tag == Some(sym))
                    {
                        for (tgt, upd) in &combos {
                            let mut t2 = tgt.clone();
                            t2.push(t.to);
                            let mut u2 = upd.clone();
                            u2.extend(t.update.iter().map(|(r, e)| (r.clone(), e.clone())));
                            next.push((t2, u2));
                        }
                    }
                    combos = next;
                }
                for (tgt, update) in combos {
                    let to = *idx.entry(tgt.clone()).or_insert_with(|| {
                        let id = m.add_state(name(parts, &tgt));
                        tuples.push(tgt.clone());
                        queue.push_back(tgt.clone());
                        id
                    });
                    m.transitions.push(CraTransition {
                        from,
                        tag: Some(sym),
                        update,
                        to,
                    });
                }
            }
        }
        for (tuple, &id) in &idx {
            let fins: Vec<Option<&Expr>> = tuple
                .iter()
                .zip(parts)
                .map(|(&q, p)| p.fin.get(&q))
                .collect();
            if fins.iter().all(Option::is_some) {
                let args: Vec<Expr> = fins.into_iter().map(|f| f.unwrap().clone()).collect();
                m.set_final(id, Expr::Apply(op.to_string(), args));
            }
        }
        Ok(m.trim())
    }

    /// Disjoint union of machines with disjoint register sets.
    fn disjoint_union(&self, a: &Cra, b: &Cra) -> Cra {
        let mut registers = a.registers.clone();
        registers.extend(b.registers.iter().cloned());
        let mut m = Cra::new(
            self.q.alphabet.clone(),
            registers,
            self.q.registry.clone(),
        );
        for s in &a.states {
            m.add_state(s.clone());
        }
        let off = a.states.len();
        for s in &b.states {
            m.add_state(s.clone());
        }
        for t in a.transitions.iter() {
            m.transitions.push(CraTransition {
                from: t.from,
                tag: t.tag,
                update: m.complete_update(t.update.clone()),
                to: t.to,
            });
        }
        for t in b.transitions.iter() {
            m.transitions.push(CraTransition {
                from: t.from + off,
                tag: t.tag,
                update: m.complete_update(t.update.clone()),
                to: t.to + off,
            });
        }
        for (&q, u) in &a.init {
            m.set_init(q, u.clone());
        }
        for (&q, u) in &b.init {
            m.set_init(q + off, u.clone());
        }
        for (&q, f) in &a.fin {
            m.set_final(q, f.clone());
        }
        for (&q, f) in &b.fin {
            m.set_final(q + off, f.clone());
        }
        self.const_fill(&mut m);
        m
    }

    fn split_machine(&mut self, mf: &Cra, mg: &Cra, op: &str) -> Result<Cra> {
        let agg = "agg".to_string();
        let mut m = self.disjoint_union(mf, mg);
        m.registers.push(agg.clone());
        let off = mf.states.len();
        // complete all updates and inits with the new register
        m.transitions = m
            .transitions
            .iter()
            .map(|t| CraTransition {
                from: t.from,
                tag: t.tag,
                update: m.complete_update(t.update.clone()),
                to: t.to,
            })
            .collect();
        self.const_fill(&mut m);
        // drop g-side initial/finals from the union; keep f-side inits and
        // g-side finals only
        let g_inits: Vec<(usize, Update)> = mg
            .init
            .iter()
            .map(|(&q, u)| (q + off, u.clone()))
            .collect();
        for (q, _) in &g_inits {
            m.init.remove(q);
        }
        let f_finals: Vec<(usize, Expr)> =
            mf.fin.iter().map(|(&q, f)| (q, f.clone())).collect();
        for (q, _) in &f_finals {
            m.fin.remove(q);
        }
        // ε-links: f-final → g-initial, storing f's value in agg and
        // initializing g's registers
        for (qf, f_expr) in &f_finals {
            for (gi, g_init) in &g_inits {
                let mut update: Update = m
                    .registers
                    .iter()
                    .map(|r| (r.clone(), self.constant.clone()))
                    .collect();
                update.insert(agg.clone(), f_expr.clone());
                for (r, e) in g_init {
                    update.insert(r.clone(), e.clone());
                }
                m.transitions.push(CraTransition {
                    from: *qf,
                    tag: None,
                    update,
                    to: *gi,
                });
            }
        }
        // g-side finalization combines the stored value with g's output
        let g_finals: Vec<(usize, Expr)> = mg
            .fin
            .iter()
            .map(|(&q, f)| (q + off, f.clone()))
            .collect();
        for (q, f) in g_finals {
            m.set_final(
                q,
                Expr::Apply(op.to_string(), vec![Expr::Reg(agg.clone()), f]),
            );
        }
        let m = eliminate_epsilon_cra(&m.trim())?;
        let rate_f = nfa_to_min_dfa(&mf.rate())?;
        let rate_g = nfa_to_min_dfa(&mg.rate())?;
        let unamb = unamb_concat_dfa(&rate_f, &rate_g)?;
        Ok(product_with_dfa(&m, &unamb)?.trim())
    }

    fn iter_machine(&mut self, mb: &Cra, init: &str, op: &str) -> Result<Cra> {
        let rate_b = nfa_to_min_dfa(&mb.rate())?;
        if rate_b.accepts_empty() {
            self.warnings.push(
                "iter body accepts the empty word; the iteration has empty rate".into(),
            );
            return Ok(self.empty_machine());
        }
        let acc = "acc".to_string();
        let prefix = self.next_prefix();
        let body = prefixed(mb, &prefix);
        let mut registers = body.registers.clone();
        registers.push(acc.clone());
        let mut m = Cra::new(
            self.q.alphabet.clone(),
            registers,
            self.q.registry.clone(),
        );
        let hub = m.add_state("hub");
        for s in &body.states {
            m.add_state(s.clone());
        }
        let off = 1usize;
        for t in &body.transitions {
            m.transitions.push(CraTransition {
                from: t.from + off,
                tag: t.tag,
                update: m.complete_update(t.update.clone()),
                to: t.to + off,
            });
        }
        // hub starts a block
        for (&q, u) in &body.init {
            let mut update: Update = m
                .registers
                .iter()
                .map(|r| (r.clone(), self.constant.clone()))
                .collect();
            for (r, e) in u {
                update.insert(r.clone(), e.clone());
            }
            update.insert(acc.clone(), Expr::Reg(acc.clone()));
            m.transitions.push(CraTransition {
                from: hub,
                tag: None,
                update,
                to: q + off,
            });
        }
        // a finished block folds into the accumulator
        for (&q, f) in &body.fin {
            let mut update: Update = m
                .registers
                .iter()
                .map(|r| (r.clone(), self.constant.clone()))
                .collect();
            update.insert(
                acc.clone(),
                Expr::Apply(op.to_string(), vec![Expr::Reg(acc.clone()), f.clone()]),
            );
            m.transitions.push(CraTransition {
                from: q + off,
                tag: None,
                update,
                to: hub,
            });
        }
        let mut hub_init: Update = m
            .registers
            .iter()
            .map(|r| (r.clone(), self.constant.clone()))
            .collect();
        hub_init.insert(acc.clone(), Expr::constant(init.to_string()));
        m.set_init(hub, hub_init);
        m.set_final(hub, Expr::Reg(acc));
        let m = eliminate_epsilon_cra(&m.trim())?;
        let unamb = unamb_iter_dfa(&rate_b);
        Ok(product_with_dfa(&m, &unamb)?.trim())
    }

    fn prefix_sum_machine(&mut self, mb: &Cra, init: &str, op: &str) -> Result<Cra> {
        let rate_b = nfa_to_min_dfa(&mb.rate())?;
        if !rate_b.language_equal(&Dfa::universal(self.q.alphabet.clone()))? {
            return Err(Error::PrefixSumOnPartial);
        }
        let det = ucra_to_dcra(mb)?;
        let total = "total".to_string();
        let mut m = det.clone();
        m.registers.push(total.clone());
        // every state of a total deterministic trim machine is final
        let mut transitions = Vec::new();
        for t in &det.transitions {
            let target_fin = det.fin.get(&t.to).ok_or_else(|| {
                Error::InvalidMachine("prefix-sum expects every state to be final".into())
            })?;
            let mut update = t.update.clone();
            let new_out = target_fin.substitute(&t.update);
            update.insert(
                total.clone(),
                Expr::Apply(
                    op.to_string(),
                    vec![Expr::Reg(total.clone()), new_out],
                ),
            );
            transitions.push(CraTransition {
                from: t.from,
                tag: t.tag,
                update,
                to: t.to,
            });
        }
        m.transitions = transitions;
        let mut init_map = BTreeMap::new();
        for (&q, u) in &det.init {
            let f0 = det.fin.get(&q).ok_or_else(|| {
                Error::InvalidMachine("prefix-sum expects the start state to be final".into())
            })?;
            let mut u2 = u.clone();
            u2.insert(
                total.clone(),
                Expr::Apply(
                    op.to_string(),
                    vec![Expr::constant(init.to_string()), f0.substitute(u)],
                ),
            );
            init_map.insert(q, u2);
        }
        m.init = init_map;
        m.fin = (0..m.state_count())
            .map(|q| (q, Expr::Reg(total.clone())))
            .collect();
        Ok(m)
    }
}

/// Compiles a query to an unambiguous, trim, ε-free CRA.
pub fn compile(q: &Query) -> Result<Compiled> {
    q.expr.check(&q.alphabet, &q.registry)?;
    let (_, _) = q.registry.first_constant()?;
    let constant = Expr::constant(q.registry.first_constant()?.0);
    let mut c = Compiler {
        q,
        warnings: Vec::new(),
        fresh: 0,
        constant,
    };
    let machine = c.go(&q.expr)?.trim().canonicalize();
    machine.check_invariants()?;
    Ok(Compiled {
        machine,
        warnings: c.warnings,
    })
}

/// The rate each combinator guarantees, computed through the language
/// algebra: intersection for output combination, union for choice,
/// unambiguous concatenation for split, unambiguous iteration for iter,
/// and the universal language for prefix-sum.
pub fn expected_rate(q: &Query, e: &QueryExpr) -> Result<Dfa> {
    let alpha = q.alphabet.clone();
    Ok(match e {
        QueryExpr::Eps { .. } => {
            crate::automata::regex_to_dfa(&crate::automata::Regex::Eps, &alpha)?
        }
        QueryExpr::Item { tags, .. } => {
            let set = crate::automata::Regex::LitSet(tags.clone());
            crate::automata::regex_to_dfa(&set, &alpha)?
        }
        QueryExpr::OpCombine { args, .. } => {
            let mut acc = Dfa::universal(alpha);
            for a in args {
                acc = acc.intersect(&expected_rate(q, a)?)?;
            }
            acc
        }
        QueryExpr::Else { first, second } => {
            expected_rate(q, first)?.union(&expected_rate(q, second)?)?
        }
        QueryExpr::Split { left, right, .. } => {
            unamb_concat_dfa(&expected_rate(q, left)?, &expected_rate(q, right)?)?
        }
        QueryExpr::Iter { body, .. } => unamb_iter_dfa(&expected_rate(q, body)?),
        QueryExpr::PrefixSum { .. } => Dfa::universal(alpha),
    })
}

/// True iff the compiled machine is copyless. By the closure constructions
/// this holds whenever the leaves are copyless and prefix-sum is absent.
pub fn copyless_report(q: &Query) -> Result<bool> {
    Ok(compile(q)?.machine.validate().is_copyless)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{oracle_eval, parse_query};
    use crate::cra::{eval_stream, DEFAULT_ORACLE_BOUND};
    use crate::fixtures::{self, int_registry};
    use crate::value::Value;

    fn query(alpha: &[&str], src: &str) -> Query {
        let registry = int_registry(&["0", "1", "+", "max", "min"]);
        Query {
            alphabet: crate::automata::Alphabet::of(alpha),
            expr: parse_query(src, &registry).unwrap(),
            registry,
        }
    }

    fn sweep(q: &Query, max_len: usize) {
        let c = compile(q).unwrap();
        let d = c.machine.validate();
        assert!(d.is_unambiguous, "not unambiguous: {:?}", d.notes);
        assert!(d.is_trim || c.machine.state_count() == 0);
        assert!(d.eps_free);
        let values = [Value::int(0), Value::int(1), Value::int(2)];
        for tags in fixtures::tag_words(&q.alphabet, max_len) {
            for word in fixtures::value_assignments(&tags, &values) {
                let stream: Vec<(String, Value)> = word
                    .iter()
                    .map(|(s, v)| (q.alphabet.symbol(*s).to_string(), v.clone()))
                    .collect();
                let want = oracle_eval(q, &stream, DEFAULT_ORACLE_BOUND).unwrap();
                let (got, _) = eval_stream(&c.machine, stream.clone()).unwrap();
                assert_eq!(got, want, "query disagrees on {stream:?}");
            }
        }
        // the rate algebra agrees with the machine's rate
        let want_rate = expected_rate(q, &q.expr).unwrap();
        let got_rate = nfa_to_min_dfa(&c.machine.rate()).unwrap();
        assert!(got_rate.language_equal(&want_rate).unwrap());
    }

    #[test]
    fn eps_compiles_to_the_empty_word_machine() {
        let q = query(&["a", "b"], "eps(0)");
        let c = compile(&q).unwrap();
        let (out, _) = eval_stream(&c.machine, Vec::new()).unwrap();
        assert_eq!(out, Some(Value::int(0)));
        let (out, _) = eval_stream(
            &c.machine,
            vec![("a".to_string(), Value::int(1))],
        )
        .unwrap();
        assert_eq!(out, None);
    }

    #[test]
    fn split_sweep() {
        sweep(&query(&["a", "b"], "split(item([a], val); item([b], val); +)"), 4);
    }

    #[test]
    fn else_prefers_first() {
        let q = query(
            &["a", "b"],
            "else(item([a b], val); item([a], 1 + val))",
        );
        sweep(&q, 3);
        let c = compile(&q).unwrap();
        let (out, _) = eval_stream(
            &c.machine,
            vec![("a".to_string(), Value::int(5))],
        )
        .unwrap();
        // both branches are defined on "a"; the first wins
        assert_eq!(out, Some(Value::int(5)));
    }

    #[test]
    fn block_max_sweep() {
        sweep(
            &query(
                &["a", "#"],
                "iter(split(iter(item([a], val); 0; +); item([#], 0); +); 0; max)",
            ),
            5,
        );
    }

    #[test]
    fn iter_with_eps_body_warns_and_is_empty() {
        let q = query(&["a", "b"], "iter(else(item([a], val); eps(0)); 0; +)");
        let c = compile(&q).unwrap();
        assert!(!c.warnings.is_empty());
        assert!(nfa_to_min_dfa(&c.machine.rate()).unwrap().is_empty());
    }

    #[test]
    fn prefix_sum_sweep() {
        sweep(
            &query(&["a", "b"], "prefixsum(iter(item([a b], 1); 0; +); 0; +)"),
            4,
        );
    }

    #[test]
    fn prefix_sum_needs_total_rate() {
        let q = query(&["a", "b"], "prefixsum(item([a], val); 0; +)");
        assert!(matches!(compile(&q), Err(Error::PrefixSumOnPartial)));
    }

    #[test]
    fn copyless_report_on_block_max() {
        let q = query(
            &["a", "#"],
            "iter(split(iter(item([a], val); 0; +); item([#], 0); +); 0; max)",
        );
        assert!(copyless_report(&q).unwrap());
        let q = query(&["a", "#"], "eps(0)");
        assert!(copyless_report(&q).unwrap());
    }
}
