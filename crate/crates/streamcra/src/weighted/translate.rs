//! The four translations between weighted automata and CRAs over the
//! adapter operation families, plus linear normalization of semiring
//! update expressions.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::automata::{nfa_to_min_dfa, Dfa};
use crate::cra::{unary_to_copyless, Cra, CraTransition, Update};
use crate::error::{Error, Result};
use crate::expr::{eval_expr, Expr, Valuation};
use crate::ops::{make_registry, OperationRegistry, RegistryDescriptor};
use crate::value::Value;

use super::{lift_monoid, Monoid, Semiring, WeightedAutomaton};

/// The normal form `x1·d1 + ... + xn·dn + d` of a semiring update.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub coeffs: BTreeMap<String, Value>,
    pub constant: Value,
}

impl LinearForm {
    fn zero(registers: &[String], s: &Semiring) -> LinearForm {
        LinearForm {
            coeffs: registers
                .iter()
                .map(|r| (r.clone(), s.zero().clone()))
                .collect(),
            constant: s.zero().clone(),
        }
    }
}

/// Rewrites an expression over {0, 1, +, (-·d)} into its unique linear
/// form, using only the semiring axioms: nested right multiplications
/// compose, right multiplication distributes over +, and constants fold.
pub fn linear_normalize(
    e: &Expr,
    registers: &[String],
    s: &Semiring,
) -> Result<LinearForm> {
    match e {
        Expr::CurrentVal => Err(Error::NonLinearizableExpression(
            "`val` has no place in a value-oblivious semiring update".into(),
        )),
        Expr::Const(c) => {
            let mut lf = LinearForm::zero(registers, s);
            lf.constant = match c.as_str() {
                "0" => s.zero().clone(),
                "1" => s.one().clone(),
                other => s.parse_carrier(other).map_err(|_| {
                    Error::NonLinearizableExpression(format!("constant `{other}`"))
                })?,
            };
            Ok(lf)
        }
        Expr::Reg(r) => {
            if !registers.contains(r) {
                return Err(Error::UnboundRegister(r.clone()));
            }
            let mut lf = LinearForm::zero(registers, s);
            lf.coeffs.insert(r.clone(), s.one().clone());
            Ok(lf)
        }
        Expr::Apply(op, args) => {
            if op == "+" && args.len() == 2 {
                let a = linear_normalize(&args[0], registers, s)?;
                let b = linear_normalize(&args[1], registers, s)?;
                let mut lf = LinearForm::zero(registers, s);
                for r in registers {
                    lf.coeffs
                        .insert(r.clone(), s.add(&a.coeffs[r], &b.coeffs[r]));
                }
                lf.constant = s.add(&a.constant, &b.constant);
                Ok(lf)
            } else if let Some(lit) = op.strip_prefix('*') {
                if args.len() != 1 {
                    return Err(Error::NonLinearizableExpression(op.clone()));
                }
                let d = s.parse_carrier(lit)?;
                let a = linear_normalize(&args[0], registers, s)?;
                let mut lf = LinearForm::zero(registers, s);
                for r in registers {
                    lf.coeffs.insert(r.clone(), s.mul(&a.coeffs[r], &d));
                }
                lf.constant = s.mul(&a.constant, &d);
                Ok(lf)
            } else {
                Err(Error::NonLinearizableExpression(format!(
                    "operation `{op}` is not among 0, 1, +, right multiplication"
                )))
            }
        }
    }
}

fn semiring_descriptor(s: &Semiring) -> RegistryDescriptor {
    RegistryDescriptor {
        domain: "semiring".into(),
        semiring: Some(s.name().to_string()),
        alphabet: if s.generators().is_empty() {
            None
        } else {
            Some(s.generators().to_vec())
        },
        monoid: None,
        ops: Vec::new(),
    }
}

fn monoid_descriptor(m: &Monoid) -> RegistryDescriptor {
    RegistryDescriptor {
        domain: "monoid-unary".into(),
        monoid: Some(m.name().to_string()),
        alphabet: if m.generators().is_empty() {
            None
        } else {
            Some(m.generators().to_vec())
        },
        semiring: None,
        ops: Vec::new(),
    }
}

/// `x * d` with the trivial cases folded away.
fn right_mult_expr(base: Expr, d: &Value, s: &Semiring) -> Expr {
    if d == s.one() {
        base
    } else {
        Expr::Apply(format!("*{d}"), vec![base])
    }
}

fn const_expr(d: &Value, s: &Semiring) -> Expr {
    if d == s.zero() {
        Expr::constant("0")
    } else if d == s.one() {
        Expr::constant("1")
    } else {
        Expr::Apply(format!("*{d}"), vec![Expr::constant("1")])
    }
}

fn sum_exprs(terms: Vec<Expr>) -> Expr {
    let mut it = terms.into_iter();
    match it.next() {
        None => Expr::constant("0"),
        Some(first) => it.fold(first, |acc, t| Expr::Apply("+".into(), vec![acc, t])),
    }
}

/// Simulates a weighted automaton by a single-state total DCRA with one
/// register per WA state. The transduction is value-oblivious and equals
/// the automaton's weight function.
pub fn wa_to_cra(w: &WeightedAutomaton) -> Result<Cra> {
    let registry = Arc::new(make_registry(&semiring_descriptor(&w.semiring))?);
    let s = &w.semiring;
    let registers: Vec<String> = w.states.iter().map(|q| format!("x_{q}")).collect();
    let mut m = Cra::new(w.alphabet.clone(), registers.clone(), registry);
    let hub = m.add_state("hub");
    for sym in 0..w.alphabet.len() {
        let mut update = Update::new();
        for (j, reg_j) in registers.iter().enumerate() {
            let mut terms = Vec::new();
            for (i, reg_i) in registers.iter().enumerate() {
                let d = &w.weights[sym][i][j];
                if d != s.zero() {
                    terms.push(right_mult_expr(Expr::Reg(reg_i.clone()), d, s));
                }
            }
            update.insert(reg_j.clone(), sum_exprs(terms));
        }
        m.transitions.push(CraTransition {
            from: hub,
            tag: Some(sym),
            update,
            to: hub,
        });
    }
    let init: Update = registers
        .iter()
        .enumerate()
        .map(|(q, r)| (r.clone(), const_expr(&w.init[q], s)))
        .collect();
    m.set_init(hub, init);
    let fin_terms: Vec<Expr> = registers
        .iter()
        .enumerate()
        .filter(|(q, _)| &w.fin[*q] != s.zero())
        .map(|(q, r)| right_mult_expr(Expr::Reg(r.clone()), &w.fin[q], s))
        .collect();
    m.set_final(hub, sum_exprs(fin_terms));
    Ok(m)
}

/// Reads a total, unambiguous, ε-free CRA over a semiring adapter back off
/// as a weighted automaton with states Q ∪ (Q × X).
pub fn cra_to_wa(m: &Cra) -> Result<WeightedAutomaton> {
    let s = m
        .registry
        .semiring()
        .ok_or_else(|| Error::RegistryMismatch("cra_to_wa needs a semiring registry".into()))?
        .clone();
    if m.has_epsilon() {
        return Err(Error::InvalidMachine("cra_to_wa needs an ε-free machine".into()));
    }
    let d = m.validate();
    if !d.is_unambiguous {
        return Err(Error::NotUnambiguous(d.notes.join("; ")));
    }
    if !d.is_trim {
        return Err(Error::InvalidMachine("cra_to_wa needs a trim machine".into()));
    }
    let rate = nfa_to_min_dfa(&m.rate())?;
    if !rate.language_equal(&Dfa::universal(m.alphabet.clone()))? {
        return Err(Error::PartialRate);
    }

    let n = m.state_count();
    let x = m.register_count();
    let spine = |q: usize| q;
    let pair = |q: usize, xi: usize| n + q * x + xi;
    let mut states: Vec<String> = m.states.clone();
    for q in &m.states {
        for r in &m.registers {
            states.push(format!("{q}.{r}"));
        }
    }
    let mut wa = WeightedAutomaton::new(s.clone(), m.alphabet.clone(), states);

    let mut seen: BTreeMap<(usize, usize, usize), ()> = BTreeMap::new();
    for t in &m.transitions {
        let sym = t.tag.expect("ε-free");
        if seen.insert((t.from, sym, t.to), ()).is_some() {
            return Err(Error::NotUnambiguous(format!(
                "parallel transitions `{}` →{} `{}`",
                m.states[t.from],
                m.alphabet.symbol(sym),
                m.states[t.to]
            )));
        }
        wa.set_weight(spine(t.from), sym, spine(t.to), s.one().clone());
        for (j, reg_j) in m.registers.iter().enumerate() {
            let lf = linear_normalize(&t.update[reg_j], &m.registers, &s)?;
            wa.set_weight(spine(t.from), sym, pair(t.to, j), lf.constant.clone());
            for (i, reg_i) in m.registers.iter().enumerate() {
                wa.set_weight(pair(t.from, i), sym, pair(t.to, j), lf.coeffs[reg_i].clone());
            }
        }
    }
    for (&q, init) in &m.init {
        wa.init[spine(q)] = s.one().clone();
        for (xi, r) in m.registers.iter().enumerate() {
            let v = eval_expr(&init[r], &Valuation::new(), None, &m.registry)?;
            wa.init[pair(q, xi)] = v;
        }
    }
    for (&q, f) in &m.fin {
        let lf = linear_normalize(f, &m.registers, &s)?;
        wa.fin[spine(q)] = lf.constant.clone();
        for (xi, r) in m.registers.iter().enumerate() {
            wa.fin[pair(q, xi)] = lf.coeffs[r].clone();
        }
    }
    Ok(wa)
}

/// Views an unambiguous weighted automaton over the multiplicative monoid
/// of its semiring (initial/final weights as partial maps) and builds the
/// equivalent copyless single-register UCRA.
pub fn uwa_to_copyless_ucra(w: &WeightedAutomaton) -> Result<Cra> {
    if !w.is_unambiguous()? {
        return Err(Error::NotUnambiguous(
            "monoid-view conversion needs an unambiguous weighted automaton".into(),
        ));
    }
    let monoid_name = if w.semiring.name() == "free" {
        "free".to_string()
    } else {
        format!("times:{}", w.semiring.name())
    };
    let gens = w.semiring.generators().to_vec();
    let monoid = super::monoid_by_name(&monoid_name, if gens.is_empty() { None } else { Some(&gens) })?;
    let registry = Arc::new(make_registry(&monoid_descriptor(&monoid))?);
    let s = &w.semiring;

    let reg = "x".to_string();
    let mut m = Cra::new(w.alphabet.clone(), vec![reg.clone()], registry);
    for name in &w.states {
        m.add_state(name.clone());
    }
    let mult = |d: &Value| -> Expr {
        if d == s.one() {
            Expr::Reg(reg.clone())
        } else {
            Expr::Apply(format!("*{d}"), vec![Expr::Reg(reg.clone())])
        }
    };
    for sym in 0..w.alphabet.len() {
        for from in 0..w.state_count() {
            for to in 0..w.state_count() {
                let d = &w.weights[sym][from][to];
                if d != s.zero() {
                    m.transitions.push(CraTransition {
                        from,
                        tag: Some(sym),
                        update: Update::from([(reg.clone(), mult(d))]),
                        to,
                    });
                }
            }
        }
    }
    for (q, d) in w.init.iter().enumerate() {
        if d != s.zero() {
            let init = if d == s.one() {
                Expr::constant("1")
            } else {
                Expr::Apply(format!("*{d}"), vec![Expr::constant("1")])
            };
            m.set_init(q, Update::from([(reg.clone(), init)]));
        }
    }
    for (q, d) in w.fin.iter().enumerate() {
        if d != s.zero() {
            m.set_final(q, mult(d));
        }
    }
    Ok(m)
}

/// The weight a unary right-multiplication chain applies to its register:
/// the chain evaluated with the register set to the monoid identity.
fn chain_weight(e: &Expr, reg: &str, registry: &OperationRegistry, one: &Value) -> Result<Value> {
    let env = Valuation::from([(reg, one.clone())]);
    eval_expr(e, &env, None, registry)
}

/// Converts an unambiguous CRA over a unary monoid registry into an
/// unambiguous weighted automaton over the lifted semiring: first the
/// register-guessing product (one register), then a direct read-off of the
/// edge weights. The automaton's weight equals the machine's output on its
/// rate and the semiring zero elsewhere.
pub fn copyless_ucra_to_uwa(m: &Cra) -> Result<WeightedAutomaton> {
    let monoid = m
        .registry
        .monoid()
        .ok_or_else(|| {
            Error::RegistryMismatch("copyless_ucra_to_uwa needs a unary monoid registry".into())
        })?
        .clone();
    for t in &m.transitions {
        for e in t.update.values() {
            if e.uses_current_val() {
                return Err(Error::InvalidMachine(
                    "weighted translation needs a value-oblivious machine".into(),
                ));
            }
        }
    }
    let single = unary_to_copyless(&m.trim())?.trim();
    let reg = single.registers[0].clone();
    let semiring = lift_monoid(&monoid)?;
    let one = semiring.one().clone();
    let zero = semiring.zero().clone();

    let mut wa = WeightedAutomaton::new(
        semiring.clone(),
        single.alphabet.clone(),
        single.states.clone(),
    );
    for t in &single.transitions {
        let sym = t.tag.expect("ε-free");
        let rhs = &t.update[&reg];
        let weight = if rhs.registers().is_empty() {
            // a restart: the previous register content is discarded, and
            // the path prefix to here multiplies to one
            eval_expr(rhs, &Valuation::new(), None, &single.registry)?
        } else {
            chain_weight(rhs, &reg, &single.registry, &one)?
        };
        if wa.weight(t.from, sym, t.to) != &zero {
            return Err(Error::NotUnambiguous(format!(
                "parallel transitions `{}` →{} `{}`",
                single.states[t.from],
                single.alphabet.symbol(sym),
                single.states[t.to]
            )));
        }
        wa.set_weight(t.from, sym, t.to, weight);
    }
    for (&q, init) in &single.init {
        wa.init[q] = eval_expr(&init[&reg], &Valuation::new(), None, &single.registry)?;
    }
    for (&q, f) in &single.fin {
        wa.fin[q] = if f.registers().is_empty() {
            eval_expr(f, &Valuation::new(), None, &single.registry)?
        } else {
            chain_weight(f, &reg, &single.registry, &one)?
        };
    }
    Ok(wa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cra::{eval_stream, DEFAULT_ORACLE_BOUND};
    use crate::fixtures;
    use crate::weighted::semiring_by_name;

    fn expr(src: &str, regs: &[&str]) -> Expr {
        let regs: Vec<String> = regs.iter().map(|s| s.to_string()).collect();
        crate::expr::parse_expr(src, &regs).unwrap()
    }

    #[test]
    fn linear_normalize_expands_products() {
        let s = semiring_by_name("nat-arith", None).unwrap();
        let regs = vec!["x".to_string(), "y".to_string()];
        let lf = linear_normalize(&expr("(x*2 + y)*3 + 1", &["x", "y"]), &regs, &s).unwrap();
        assert_eq!(lf.coeffs["x"], Value::int(6));
        assert_eq!(lf.coeffs["y"], Value::int(3));
        assert_eq!(lf.constant, Value::int(1));
    }

    #[test]
    fn linear_normalize_zero_and_doubling() {
        let s = semiring_by_name("nat-arith", None).unwrap();
        let regs = vec!["x".to_string()];
        let lf = linear_normalize(&expr("0", &["x"]), &regs, &s).unwrap();
        assert_eq!(lf.coeffs["x"], Value::int(0));
        assert_eq!(lf.constant, Value::int(0));
        let lf = linear_normalize(&expr("x + x", &["x"]), &regs, &s).unwrap();
        assert_eq!(lf.coeffs["x"], Value::int(2));
    }

    #[test]
    fn linear_normalize_agrees_with_evaluation() {
        use rand::{Rng, SeedableRng};
        let s = semiring_by_name("nat-arith", None).unwrap();
        let registry = Arc::new(make_registry(&semiring_descriptor(&s)).unwrap());
        let regs = vec!["x".to_string(), "y".to_string()];
        let e = expr("(x*2 + y)*3 + x*5 + 1*7", &["x", "y"]);
        let lf = linear_normalize(&e, &regs, &s).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let xv = Value::int(rng.gen_range(0..50));
            let yv = Value::int(rng.gen_range(0..50));
            let env = Valuation::from([("x", xv.clone()), ("y", yv.clone())]);
            let direct = eval_expr(&e, &env, None, &registry).unwrap();
            let via_form = s.add(
                &s.add(&s.mul(&xv, &lf.coeffs["x"]), &s.mul(&yv, &lf.coeffs["y"])),
                &lf.constant,
            );
            assert_eq!(direct, via_form);
        }
    }

    #[test]
    fn wa_to_cra_matches_wa_eval() {
        for wa in [fixtures::factor_count_wa(), fixtures::tropical_wa()] {
            let m = wa_to_cra(&wa).unwrap();
            let d = m.validate();
            assert!(d.is_deterministic && d.is_trim);
            for tags in fixtures::tag_words(&wa.alphabet, 4) {
                let stream: Vec<(String, Value)> = tags
                    .iter()
                    .map(|&s| (wa.alphabet.symbol(s).to_string(), Value::Unit))
                    .collect();
                let (got, _) = eval_stream(&m, stream).unwrap();
                assert_eq!(got, Some(wa.eval(&tags)), "on {tags:?}");
            }
        }
    }

    #[test]
    fn cra_to_wa_round_trips() {
        for wa in [fixtures::factor_count_wa(), fixtures::tropical_wa()] {
            let m = wa_to_cra(&wa).unwrap();
            let back = cra_to_wa(&m).unwrap();
            for tags in fixtures::tag_words(&wa.alphabet, 4) {
                assert_eq!(back.eval(&tags), wa.eval(&tags), "on {tags:?}");
            }
        }
    }

    #[test]
    fn self_loop_machine_reads_off_directly() {
        let s = semiring_by_name("nat-arith", None).unwrap();
        let registry = Arc::new(make_registry(&semiring_descriptor(&s)).unwrap());
        let regs = vec!["x".to_string()];
        let mut m = Cra::new(crate::automata::Alphabet::of(&["a"]), regs.clone(), registry);
        let q = m.add_state("q");
        m.add_transition(q, Some("a"), Update::from([("x".to_string(), expr("x*3", &["x"]))]), q)
            .unwrap();
        m.set_init(q, Update::from([("x".to_string(), expr("1", &["x"]))]));
        m.set_final(q, Expr::reg("x"));
        let wa = cra_to_wa(&m).unwrap();
        // 1-register machine: states {q, q.x}; the self-loop weight is 3
        assert_eq!(wa.eval(&[0, 0]), Value::int(9));
    }

    #[test]
    fn binary_times_is_rejected() {
        // x := times(x, x) computes d^(2^i), beyond weighted automata
        let s = semiring_by_name("nat-arith", None).unwrap();
        let mut desc = semiring_descriptor(&s);
        desc.ops = vec!["0".into(), "1".into(), "+".into(), "times".into()];
        let registry = Arc::new(make_registry(&desc).unwrap());
        let regs = vec!["x".to_string()];
        let mut m = Cra::new(crate::automata::Alphabet::of(&["a"]), regs.clone(), registry);
        let q = m.add_state("q");
        m.add_transition(
            q,
            Some("a"),
            Update::from([("x".to_string(), expr("times(x, x)", &["x"]))]),
            q,
        )
        .unwrap();
        m.set_init(q, Update::from([("x".to_string(), expr("1", &["x"]))]));
        m.set_final(q, Expr::reg("x"));
        assert!(matches!(
            cra_to_wa(&m),
            Err(Error::NonLinearizableExpression(_))
        ));
    }

    #[test]
    fn uwa_round_trip_on_end_letter_fixture() {
        let wa = fixtures::end_letter_uwa();
        assert!(wa.is_unambiguous().unwrap());
        let m = uwa_to_copyless_ucra(&wa).unwrap();
        assert!(m.validate().is_copyless);
        assert_eq!(m.register_count(), 1);
        let back = copyless_ucra_to_uwa(&m).unwrap();
        for tags in fixtures::tag_words(&wa.alphabet, 5) {
            assert_eq!(back.eval(&tags), wa.eval(&tags), "on {tags:?}");
        }
    }

    #[test]
    fn separation_machine_to_uwa_and_back() {
        let m = fixtures::end_letter_blocks_machine();
        let wa = copyless_ucra_to_uwa(&m).unwrap();
        assert!(wa.is_unambiguous().unwrap());
        let zero = wa.semiring.zero().clone();
        for tags in fixtures::tag_words(&m.alphabet, 5) {
            let stream: Vec<(String, Value)> = tags
                .iter()
                .map(|&s| (m.alphabet.symbol(s).to_string(), Value::Unit))
                .collect();
            let cra_out = crate::cra::eval_paths_oracle(&m, &stream, DEFAULT_ORACLE_BOUND)
                .unwrap()
                .pop();
            let wa_out = wa.eval(&tags);
            match cra_out {
                Some(v) => assert_eq!(wa_out, v, "on {tags:?}"),
                None => assert_eq!(wa_out, zero, "off-rate on {tags:?}"),
            }
        }
        let again = uwa_to_copyless_ucra(&wa).unwrap();
        for tags in fixtures::tag_words(&m.alphabet, 4) {
            let stream: Vec<(String, Value)> = tags
                .iter()
                .map(|&s| (m.alphabet.symbol(s).to_string(), Value::Unit))
                .collect();
            let a = crate::cra::eval_paths_oracle(&m, &stream, DEFAULT_ORACLE_BOUND).unwrap();
            let b = crate::cra::eval_paths_oracle(&again, &stream, DEFAULT_ORACLE_BOUND).unwrap();
            assert_eq!(a, b, "on {tags:?}");
        }
    }

    #[test]
    fn single_state_uwa_with_loop_weight() {
        let s = semiring_by_name("nat-arith", None).unwrap();
        let alpha = crate::automata::Alphabet::of(&["a"]);
        let mut wa = WeightedAutomaton::new(s, alpha, vec!["q".into()]);
        wa.init[0] = Value::int(2);
        wa.fin[0] = Value::int(5);
        wa.set_weight(0, 0, 0, Value::int(3));
        let m = uwa_to_copyless_ucra(&wa).unwrap();
        let (out, _) = eval_stream(
            &m,
            vec![("a".to_string(), Value::Unit), ("a".to_string(), Value::Unit)],
        )
        .unwrap();
        // 2 · 3^2 · 5
        assert_eq!(out, Some(Value::int(90)));
        assert_eq!(wa.eval(&[0, 0]), Value::int(90));
    }
}
