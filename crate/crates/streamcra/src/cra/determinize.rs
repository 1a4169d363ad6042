//! Determinization of unambiguous CRAs by the register-copying subset
//! construction: the deterministic machine keeps one register (q, x) per
//! original state q and register x, and rewires each along the unique
//! predecessor that unambiguity and trimness guarantee.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::expr::Expr;

use super::{Cra, CraTransition, Update};

fn pair_name(state: usize, reg: &str) -> String {
    format!("s{state}_{reg}")
}

/// Converts an unambiguous, trim, ε-free CRA into an equivalent
/// deterministic one. The result has register set Q × X (named `q.x`),
/// states the reachable subsets, and is generally copyful even when the
/// input is copyless. Registers not pinned down by the construction are
/// filled with the registry's first declared constant.
pub fn ucra_to_dcra(m: &Cra) -> Result<Cra> {
    if m.has_epsilon() {
        return Err(Error::InvalidMachine(
            "determinization needs an ε-free machine".into(),
        ));
    }
    let d = m.validate();
    if !d.is_unambiguous {
        return Err(Error::NotUnambiguous(d.notes.join("; ")));
    }
    if !d.is_trim {
        return Err(Error::InvalidMachine(
            "determinization needs a trim machine".into(),
        ));
    }
    let (const_name, _) = m.registry.first_constant()?;
    let constant = Expr::constant(const_name);

    let registers: Vec<String> = m
        .states
        .iter()
        .enumerate()
        .flat_map(|(qi, _)| m.registers.iter().map(move |x| pair_name(qi, x)))
        .collect();

    let mut out = Cra::new(m.alphabet.clone(), registers.clone(), m.registry.clone());

    let subset_name = |p: &BTreeSet<usize>| -> String {
        let names: Vec<&str> = p.iter().map(|&q| m.states[q].as_str()).collect();
        format!("{{{}}}", names.join(","))
    };

    let start: BTreeSet<usize> = m.init.keys().copied().collect();
    let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
    let s0 = out.add_state(subset_name(&start));
    index.insert(start.clone(), s0);
    subsets.push(start.clone());
    let mut queue = VecDeque::from([s0]);

    // initialization: registers of initial states take their own init,
    // everything else the designated constant
    let mut init_update: Update = registers
        .iter()
        .map(|r| (r.clone(), constant.clone()))
        .collect();
    for (&q, u) in &m.init {
        for (x, e) in u {
            init_update.insert(pair_name(q, x), e.clone());
        }
    }
    out.set_init(s0, init_update);

    while let Some(id) = queue.pop_front() {
        let current = subsets[id].clone();
        for sym in 0..m.alphabet.len() {
            // collect transitions out of the subset on this tag
            let fired: Vec<&CraTransition> = m
                .transitions
                .iter()
                .filter(|t| t.tag == Some(sym) && current.contains(&t.from))
                .collect();
            if fired.is_empty() {
                continue; // the run dies here; the subset machine is partial
            }
            let target: BTreeSet<usize> = fired.iter().map(|t| t.to).collect();
            // each reached state has a unique predecessor transition
            let mut pred: BTreeMap<usize, &CraTransition> = BTreeMap::new();
            for t in &fired {
                if pred.insert(t.to, t).is_some() {
                    return Err(Error::NotUnambiguous(format!(
                        "state `{}` is reached twice on tag `{}` from {{{}}}",
                        m.states[t.to],
                        m.alphabet.symbol(sym),
                        subset_name(&current),
                    )));
                }
            }
            let mut update: Update = registers
                .iter()
                .map(|r| (r.clone(), constant.clone()))
                .collect();
            for (&q, t) in &pred {
                let renaming: BTreeMap<String, String> = m
                    .registers
                    .iter()
                    .map(|x| (x.clone(), pair_name(t.from, x)))
                    .collect();
                for (x, e) in &t.update {
                    update.insert(
                        pair_name(q, x),
                        e.rename_registers(&renaming),
                    );
                }
            }
            let fresh = index.len();
            let tid = match index.get(&target) {
                Some(&tid) => tid,
                None => {
                    let name = subset_name(&target);
                    let tid = out.add_state(name);
                    debug_assert_eq!(tid, fresh);
                    index.insert(target.clone(), tid);
                    subsets.push(target.clone());
                    queue.push_back(tid);
                    tid
                }
            };
            out.transitions.push(CraTransition {
                from: id,
                tag: Some(sym),
                update,
                to: tid,
            });
        }
    }

    // finalization: the unique final member of each subset
    for (id, subset) in subsets.iter().enumerate() {
        let finals: Vec<usize> = subset.iter().copied().filter(|q| m.fin.contains_key(q)).collect();
        match finals.as_slice() {
            [] => {}
            [q] => {
                let renaming: BTreeMap<String, String> = m
                    .registers
                    .iter()
                    .map(|x| (x.clone(), pair_name(*q, x)))
                    .collect();
                out.set_final(id, m.fin[q].rename_registers(&renaming));
            }
            many => {
                return Err(Error::NotUnambiguous(format!(
                    "subset {} holds {} final states",
                    subset_name(subset),
                    many.len()
                )))
            }
        }
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cra::{eliminate_epsilon_cra, eval_paths_oracle, eval_stream, DEFAULT_ORACLE_BOUND};
    use crate::fixtures;
    use crate::value::Value;

    fn assert_equivalent(a: &Cra, b: &Cra, max_len: usize) {
        let values = [Value::int(0), Value::int(1), Value::int(2)];
        for tags in fixtures::tag_words(&a.alphabet, max_len) {
            for word in fixtures::value_assignments(&tags, &values) {
                let w: Vec<(String, Value)> = word
                    .iter()
                    .map(|(s, v)| (a.alphabet.symbol(*s).to_string(), v.clone()))
                    .collect();
                let left = eval_paths_oracle(a, &w, DEFAULT_ORACLE_BOUND).unwrap();
                let right = eval_paths_oracle(b, &w, DEFAULT_ORACLE_BOUND).unwrap();
                assert_eq!(left, right, "disagreement on {w:?}");
            }
        }
    }

    #[test]
    fn one_register_ucra_determinizes() {
        let m = eliminate_epsilon_cra(&fixtures::sum_machine_one_register())
            .unwrap()
            .trim();
        let det = ucra_to_dcra(&m).unwrap();
        assert!(det.validate().is_deterministic);
        assert_eq!(
            det.register_count(),
            m.state_count() * m.register_count()
        );
        assert_equivalent(&m, &det, 4);
    }

    #[test]
    fn already_deterministic_machine_survives() {
        let m = fixtures::sum_machine();
        let det = ucra_to_dcra(&m).unwrap();
        assert!(det.validate().is_deterministic);
        // singleton subsets only
        assert!(det.state_count() <= m.state_count() + 1);
        assert_equivalent(&m, &det, 4);
    }

    #[test]
    fn determinization_of_copyless_machine_may_be_copyful() {
        let m = eliminate_epsilon_cra(&fixtures::sum_machine_one_register())
            .unwrap()
            .trim();
        assert!(m.validate().is_copyless);
        let det = ucra_to_dcra(&m).unwrap();
        let (out, _) = eval_stream(
            &det,
            vec![
                ("a".to_string(), Value::int(1)),
                ("a".to_string(), Value::int(2)),
            ],
        )
        .unwrap();
        assert_eq!(out, Some(Value::int(3)));
    }

    #[test]
    fn drawdown_machine_determinizes() {
        let m = fixtures::drawdown_machine();
        let det = ucra_to_dcra(&m).unwrap();
        assert!(det.validate().is_deterministic);
        assert_equivalent(&m, &det, 4);
    }
}
