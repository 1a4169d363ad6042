//! Code generation: from the future-past automaton's shapes to an
//! unambiguous CRA. Registers are the copies of the single-step
//! transduction; a register is stored at a state only when its vertex
//! feeds a letter edge, is the sink, or carries the pending final value.

use std::collections::{BTreeMap, BTreeSet};

use crate::cra::{Cra, CraTransition, Update};
use crate::error::{Error, Result};
use crate::expr::Expr;

use super::future_past::{future_past, FuturePast};
use super::single_step::single_step;
use super::wellformed::check_wellformed;
use super::{Label, RuleTransduction};

/// Compiles a well-formed rule transduction to an unambiguous, trim,
/// ε-free CRA. The result is copyless iff the transduction is a tree.
pub fn compile_to_ucra(t: &RuleTransduction) -> Result<Cra> {
    let wf = check_wellformed(t)?;
    if !wf.all_ok() {
        return Err(Error::NotWellFormed(wf.summary()));
    }
    let ss = single_step(t)?;
    let fp = future_past(&ss)?;
    codegen(&ss, &fp)
}

/// Resolves the expression computing copy `d` at the target state of a
/// transition. ε-edge sources recurse within the shape (acyclic by
/// condition 4); letter-edge sources read the previous position's
/// registers; `val` reads the consumed item.
fn resolve(
    t: &RuleTransduction,
    fp: &FuturePast,
    state: usize,
    copy: usize,
    letter_sources: &BTreeMap<(usize, usize), usize>,
    depth: usize,
) -> Result<Expr> {
    if depth > t.copies.len() + 1 {
        return Err(Error::NotWellFormed(
            "cyclic ε-edges survived the well-formedness check".into(),
        ));
    }
    let shape = &fp.shapes[state];
    let label = shape
        .active
        .get(&copy)
        .ok_or_else(|| Error::NotWellFormed(format!("copy `{}` is not active", t.copies[copy])))?;
    let arity = label.arity(&t.registry)?;
    let mut args = Vec::with_capacity(arity);
    for i in 1..=arity {
        let mut arg: Option<Expr> = None;
        for &ei in &shape.eps_edges {
            let e = &t.edge_rules[ei];
            if t.copy_index(&e.dst).expect("checked") == copy && e.arg == i {
                let src = t.copy_index(&e.src).expect("checked");
                let expr = resolve(t, fp, state, src, letter_sources, depth + 1)?;
                if arg.replace(expr).is_some() {
                    return Err(Error::NotWellFormed(format!(
                        "two ε-edges feed `{}` at argument {i}",
                        t.copies[copy]
                    )));
                }
            }
        }
        if let Some(&src) = letter_sources.get(&(copy, i)) {
            if arg.replace(Expr::Reg(t.copies[src].clone())).is_some() {
                return Err(Error::NotWellFormed(format!(
                    "both an ε-edge and a letter edge feed `{}` at argument {i}",
                    t.copies[copy]
                )));
            }
        }
        args.push(arg.ok_or_else(|| {
            Error::NotWellFormed(format!(
                "no edge feeds `{}` at argument {i}",
                t.copies[copy]
            ))
        })?);
    }
    Ok(match label {
        Label::Val => Expr::CurrentVal,
        Label::Id => args.pop().expect("id is unary"),
        Label::Op(name) => {
            if arity == 0 {
                Expr::Const(name.clone())
            } else {
                Expr::Apply(name.clone(), args)
            }
        }
    })
}

/// The copies whose values must be stored in registers at a state.
fn live_copies(t: &RuleTransduction, fp: &FuturePast, state: usize) -> BTreeSet<usize> {
    let shape = &fp.shapes[state];
    let mut live: BTreeSet<usize> = shape
        .out_letter
        .iter()
        .map(|&(ei, _)| t.copy_index(&t.edge_rules[ei].src).expect("checked"))
        .collect();
    live.extend(shape.sinks.iter().copied());
    live.extend(shape.carried.iter().copied());
    live
}

fn codegen(t: &RuleTransduction, fp: &FuturePast) -> Result<Cra> {
    let (const_name, _) = t.registry.first_constant()?;
    let constant = Expr::constant(const_name);
    let mut m = Cra::new(t.alphabet.clone(), t.copies.clone(), t.registry.clone());
    for i in 0..fp.states.len() {
        let (a, p) = fp.states[i];
        m.add_state(format!("q{i}_a{a}p{p}"));
    }

    let full_update = |assignments: BTreeMap<usize, Expr>| -> Update {
        t.copies
            .iter()
            .enumerate()
            .map(|(ci, name)| {
                (
                    name.clone(),
                    assignments.get(&ci).cloned().unwrap_or_else(|| constant.clone()),
                )
            })
            .collect()
    };

    for &s0 in &fp.initial {
        let mut assignments = BTreeMap::new();
        for &c in &live_copies(t, fp, s0) {
            if fp.shapes[s0].active.contains_key(&c) {
                let expr = resolve(t, fp, s0, c, &BTreeMap::new(), 0)?;
                if expr.uses_current_val() || !expr.registers().is_empty() {
                    return Err(Error::NotWellFormed(
                        "initialization expression is not closed".into(),
                    ));
                }
                assignments.insert(c, expr);
            }
        }
        m.set_init(s0, full_update(assignments));
    }

    for &(from, sym, to) in &fp.transitions {
        let (a_from, p_from) = fp.states[from];
        // letter edges firing on this transition, keyed by target slot
        let mut letter_sources: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &ei in &fp.shapes[to].in_letter_candidates {
            let e = &t.edge_rules[ei];
            let fires = match super::future_past::edge_kind(t, ei)? {
                Some(tag) => {
                    tag == sym
                        && fp.past.holds[p_from][fp.past.edge_test[ei]]
                        && fp.future.holds[a_from][fp.future.edge_fire_test[ei]]
                }
                None => false,
            };
            if fires {
                let dst = t.copy_index(&e.dst).expect("checked");
                let src = t.copy_index(&e.src).expect("checked");
                if letter_sources.insert((dst, e.arg), src).is_some() {
                    return Err(Error::NotWellFormed(format!(
                        "two letter edges feed `{}` at argument {}",
                        e.dst, e.arg
                    )));
                }
            }
        }
        let mut assignments = BTreeMap::new();
        for &c in &live_copies(t, fp, to) {
            if fp.shapes[to].active.contains_key(&c) {
                assignments.insert(c, resolve(t, fp, to, c, &letter_sources, 0)?);
            } else {
                // the carried register propagates itself
                assignments.insert(c, Expr::Reg(t.copies[c].clone()));
            }
        }
        m.transitions.push(CraTransition {
            from,
            tag: Some(sym),
            update: full_update(assignments),
            to,
        });
    }

    for &s in &fp.finals {
        let shape = &fp.shapes[s];
        let out = match (shape.sinks.as_slice(), shape.carried) {
            ([sink], _) => *sink,
            ([], Some(carried)) => carried,
            other => {
                return Err(Error::NotWellFormed(format!(
                    "no unique output register at an accepting state: {other:?}"
                )))
            }
        };
        m.set_final(s, Expr::Reg(t.copies[out].clone()));
    }

    Ok(drop_dead_registers(m).trim().canonicalize())
}

/// Removes registers that are never read by any update or finalization.
fn drop_dead_registers(mut m: Cra) -> Cra {
    let mut read: BTreeSet<String> = BTreeSet::new();
    for t in &m.transitions {
        for e in t.update.values() {
            read.extend(e.registers().keys().cloned());
        }
    }
    for e in m.fin.values() {
        read.extend(e.registers().keys().cloned());
    }
    let keep: Vec<String> = m
        .registers
        .iter()
        .filter(|r| read.contains(*r))
        .cloned()
        .collect();
    let keep_set: BTreeSet<&String> = keep.iter().collect();
    for t in &mut m.transitions {
        t.update.retain(|r, _| keep_set.contains(r));
    }
    for u in m.init.values_mut() {
        u.retain(|r, _| keep_set.contains(r));
    }
    m.registers = keep;
    m
}
