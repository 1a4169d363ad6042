//! Over unary-only operation families, copyful machines collapse to
//! copyless single-register ones: at most one register can ever contribute
//! to the output, so the machine guesses which one, tracking the guess in
//! the finite control.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Expr;

use super::{Cra, Update};

/// The register a unary chain reads, if any. Errors on non-unary structure.
fn chain_register(e: &Expr) -> Result<Option<&str>> {
    match e {
        Expr::Reg(r) => Ok(Some(r)),
        Expr::Const(_) | Expr::CurrentVal => Ok(None),
        Expr::Apply(op, args) => {
            if args.len() > 1 {
                return Err(Error::NonUnaryOperation(op.clone()));
            }
            match args.first() {
                Some(a) => chain_register(a),
                None => Ok(None),
            }
        }
    }
}

fn guess_name(state: &str, guess: Option<&str>) -> String {
    match guess {
        Some(x) => format!("{state}|{x}"),
        None => format!("{state}|_"),
    }
}

/// Rewrites an unambiguous, ε-free CRA over a unary-only registry into an
/// equivalent copyless machine with a single register and state space
/// Q × (X ∪ {⊥}).
pub fn unary_to_copyless(m: &Cra) -> Result<Cra> {
    if m.has_epsilon() {
        return Err(Error::InvalidMachine(
            "unary-to-copyless needs an ε-free machine".into(),
        ));
    }
    if !m.registry.is_unary_only() {
        let offender = m
            .registry
            .declared_ops()
            .iter()
            .find(|n| m.registry.op(n).map(|o| o.arity() > 1).unwrap_or(false))
            .cloned()
            .unwrap_or_default();
        return Err(Error::NonUnaryOperation(offender));
    }
    let d = m.validate();
    if !d.is_unambiguous {
        return Err(Error::NotUnambiguous(d.notes.join("; ")));
    }

    let reg = "r".to_string();
    let mut out = Cra::new(
        m.alphabet.clone(),
        vec![reg.clone()],
        m.registry.clone(),
    );

    // states: (q, guess) with guess ∈ X ∪ {⊥}
    let mut idx: BTreeMap<(usize, Option<String>), usize> = BTreeMap::new();
    for (q, name) in m.states.iter().enumerate() {
        for x in &m.registers {
            let id = out.add_state(guess_name(name, Some(x)));
            idx.insert((q, Some(x.clone())), id);
        }
        let id = out.add_state(guess_name(name, None));
        idx.insert((q, None), id);
    }

    let to_single = |e: &Expr, from_reg: &str| -> Expr {
        let renaming: BTreeMap<String, String> =
            BTreeMap::from([(from_reg.to_string(), reg.clone())]);
        e.rename_registers(&renaming)
    };

    for t in &m.transitions {
        let tag = Some(m.alphabet.symbol(t.tag.expect("ε-free")).to_string());
        for (x, rhs) in &t.update {
            match chain_register(rhs)? {
                Some(y) => {
                    // the guessed register x at q got its value from y at p
                    let u: Update =
                        BTreeMap::from([(reg.clone(), to_single(rhs, y))]);
                    out.add_transition(
                        idx[&(t.from, Some(y.to_string()))],
                        tag.as_deref(),
                        u,
                        idx[&(t.to, Some(x.clone()))],
                    )?;
                }
                None => {
                    // a restart: x is rebuilt from constants and val
                    let u: Update = BTreeMap::from([(reg.clone(), rhs.clone())]);
                    out.add_transition(
                        idx[&(t.from, None)],
                        tag.as_deref(),
                        u,
                        idx[&(t.to, Some(x.clone()))],
                    )?;
                }
            }
        }
        // the ⊥ spine follows every underlying transition
        let keep: Update = BTreeMap::from([(reg.clone(), Expr::Reg(reg.clone()))]);
        out.add_transition(idx[&(t.from, None)], tag.as_deref(), keep, idx[&(t.to, None)])?;
    }

    // an arbitrary closed expression to park in the register at ⊥ states
    let bot_init: Option<Expr> = m
        .registry
        .first_constant()
        .ok()
        .map(|(name, _)| Expr::constant(name))
        .or_else(|| {
            m.init
                .values()
                .flat_map(|u| u.values())
                .next()
                .cloned()
        });

    for (&q, init) in &m.init {
        for (x, e) in init {
            out.set_init(
                idx[&(q, Some(x.clone()))],
                BTreeMap::from([(reg.clone(), e.clone())]),
            );
        }
        if let Some(e) = &bot_init {
            out.set_init(idx[&(q, None)], BTreeMap::from([(reg.clone(), e.clone())]));
        }
    }

    for (&q, f) in &m.fin {
        match chain_register(f)? {
            Some(x) => {
                out.set_final(idx[&(q, Some(x.to_string()))], to_single(f, x));
            }
            None => {
                out.set_final(idx[&(q, None)], f.clone());
            }
        }
    }

    Ok(out)
}
