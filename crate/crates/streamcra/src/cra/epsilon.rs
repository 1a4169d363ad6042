//! ε-elimination for CRAs: updates are composed along ε-paths by
//! expression substitution. Acyclicity of ε-moves is a machine invariant.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Expr;

use super::{Cra, CraTransition, Update};

/// Substitutes `inner` into `outer`: the result first applies `inner`,
/// then `outer` (register reads in `outer` see the values written by
/// `inner`). `val` occurrences in `inner` survive; `outer` must not use
/// `val` when it comes from an ε-transition.
fn compose_updates(outer: &Update, inner: &Update) -> Update {
    let subst: BTreeMap<String, Expr> = inner.clone();
    outer
        .iter()
        .map(|(r, e)| (r.clone(), e.substitute(&subst)))
        .collect()
}

fn compose_expr(outer: &Expr, inner: &Update) -> Expr {
    outer.substitute(inner)
}

/// Removes all ε-transitions. Each ε-segment of a run is attached to the
/// letter transition that follows it, or folded into the finalization when
/// no letter follows; initial states are untouched. Every original run
/// then decomposes uniquely, so the number of accepting runs per data word
/// is preserved exactly and ambiguity is neither created nor destroyed.
pub fn eliminate_epsilon_cra(m: &Cra) -> Result<Cra> {
    if !m.has_epsilon() {
        return Ok(m.clone());
    }
    m.check_invariants()?;

    // enumerate all ε-paths (as composed updates) from each state
    let eps: Vec<&CraTransition> = m.transitions.iter().filter(|t| t.tag.is_none()).collect();
    // closure[p] = list of (target, composed update along the path), the
    // empty path included
    let identity: Update = m
        .registers
        .iter()
        .map(|r| (r.clone(), Expr::Reg(r.clone())))
        .collect();
    let mut closure: Vec<Vec<(usize, Update)>> = vec![Vec::new(); m.states.len()];
    for q in 0..m.states.len() {
        // DFS over the acyclic ε-graph
        let mut stack = vec![(q, identity.clone())];
        while let Some((s, acc)) = stack.pop() {
            closure[q].push((s, acc.clone()));
            for t in &eps {
                if t.from == s {
                    // first acc, then t.update
                    stack.push((t.to, compose_updates(&t.update, &acc)));
                }
            }
            if closure[q].len() > 10_000 {
                return Err(Error::InvalidMachine(
                    "ε-closure explosion; machine has too many ε-paths".into(),
                ));
            }
        }
    }

    let mut out = Cra::new(m.alphabet.clone(), m.registers.clone(), m.registry.clone());
    out.states = m.states.clone();
    out.init = m.init.clone();

    // a letter transition absorbs every ε-path into its source
    for t in &m.transitions {
        if let Some(tag) = t.tag {
            for (p, paths_from_p) in closure.iter().enumerate() {
                for (mid, path) in paths_from_p {
                    if *mid == t.from {
                        out.transitions.push(CraTransition {
                            from: p,
                            tag: Some(tag),
                            update: compose_updates(&t.update, path),
                            to: t.to,
                        });
                    }
                }
            }
        }
    }

    // the trailing ε-segment of a run folds into the finalization
    for q in 0..m.states.len() {
        let mut fin: Option<Expr> = None;
        for (dst, path) in &closure[q] {
            if let Some(f) = m.fin.get(dst) {
                let composed = compose_expr(f, path);
                if fin.replace(composed).is_some() {
                    return Err(Error::AmbiguityDetected(format!(
                        "two ε-paths finalize state `{}`",
                        m.states[q]
                    )));
                }
            }
        }
        if let Some(f) = fin {
            out.fin.insert(q, f);
        }
    }

    Ok(out)
}
