//! The future automaton (átomaton over the suffix tests), the past
//! automaton (product DFA over the prefix tests), their product, and the
//! per-state shapes that drive register codegen.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::automata::{atomaton, regex_to_dfa, Atomaton, Dfa, Nfa, Regex};
use crate::error::{Error, Result};

use super::single_step::is_single_step;
use super::{Label, RuleTransduction};

/// Deduplicating bank of test languages.
struct TestBank {
    dfas: Vec<Dfa>,
}

impl TestBank {
    fn add(&mut self, d: Dfa) -> usize {
        let d = d.minimize();
        match self.dfas.iter().position(|x| *x == d) {
            Some(i) => i,
            None => {
                self.dfas.push(d);
                self.dfas.len() - 1
            }
        }
    }
}

/// The future automaton: each state is an atom of the Boolean algebra
/// generated by the derivative closure of the suffix tests, and specifies
/// which suffix tests hold.
#[derive(Debug)]
pub struct FutureAutomaton {
    pub atomaton: Atomaton,
    /// Indices into the test bank, per vertex rule: its suffix test.
    pub vertex_test: Vec<usize>,
    /// Per edge rule: the fire test (infix · suffix, checked at the source
    /// position).
    pub edge_fire_test: Vec<usize>,
    /// Per edge rule: the arrival test (suffix, checked at the target).
    pub edge_arrive_test: Vec<usize>,
    pub domain_test: usize,
    /// holds[atom][test]
    pub holds: Vec<Vec<bool>>,
    /// Atoms contained in the domain: the initial states.
    pub initial_atoms: Vec<usize>,
    /// The unique atom containing the empty word.
    pub final_atom: usize,
}

impl FutureAutomaton {
    pub fn atom_count(&self) -> usize {
        self.atomaton.atoms.len()
    }

    /// The unambiguous NFA over the atoms, with initial states restricted
    /// to atoms inside the domain.
    pub fn nfa(&self) -> Nfa {
        let mut nfa = self.atomaton.nfa.clone();
        nfa.initial = self.initial_atoms.clone();
        nfa
    }
}

/// Builds the future automaton for a single-step transduction.
pub fn future_automaton(t: &RuleTransduction) -> Result<FutureAutomaton> {
    if !is_single_step(t) {
        return Err(Error::InvalidMachine(
            "the future automaton needs a single-step transduction".into(),
        ));
    }
    let mut bank = TestBank { dfas: Vec::new() };
    let mut vertex_test = Vec::new();
    for r in &t.vertex_rules {
        vertex_test.push(bank.add(regex_to_dfa(&r.suffix, &t.alphabet)?));
    }
    let mut edge_fire_test = Vec::new();
    let mut edge_arrive_test = Vec::new();
    for e in &t.edge_rules {
        let fire = Regex::concat(e.infix.clone(), e.suffix.clone());
        edge_fire_test.push(bank.add(regex_to_dfa(&fire, &t.alphabet)?));
        edge_arrive_test.push(bank.add(regex_to_dfa(&e.suffix, &t.alphabet)?));
    }
    let domain_test = bank.add(regex_to_dfa(&t.domain, &t.alphabet)?);

    let at = atomaton(&bank.dfas)?;
    let holds: Vec<Vec<bool>> = at
        .atoms
        .iter()
        .map(|a| a.base_membership.clone())
        .collect();
    let initial_atoms = (0..at.atoms.len())
        .filter(|&i| holds[i][domain_test])
        .collect();
    let final_atom = at.atom_of(&[]);
    Ok(FutureAutomaton {
        atomaton: at,
        vertex_test,
        edge_fire_test,
        edge_arrive_test,
        domain_test,
        holds,
        initial_atoms,
        final_atom,
    })
}

/// The past automaton: the product DFA of the minimal DFAs of all prefix
/// tests, with a per-state table of which tests hold.
#[derive(Debug)]
pub struct PastAutomaton {
    pub dfa: Dfa,
    pub vertex_test: Vec<usize>,
    pub edge_test: Vec<usize>,
    /// holds[state][test]
    pub holds: Vec<Vec<bool>>,
}

pub fn past_automaton(t: &RuleTransduction) -> Result<PastAutomaton> {
    let mut bank = TestBank { dfas: Vec::new() };
    let mut vertex_test = Vec::new();
    for r in &t.vertex_rules {
        vertex_test.push(bank.add(regex_to_dfa(&r.prefix, &t.alphabet)?));
    }
    let mut edge_test = Vec::new();
    for e in &t.edge_rules {
        edge_test.push(bank.add(regex_to_dfa(&e.prefix, &t.alphabet)?));
    }
    // explicit product over the bank
    let syms = t.alphabet.len();
    let start: Vec<usize> = bank.dfas.iter().map(|d| d.initial).collect();
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut tuples = vec![start.clone()];
    index.insert(start, 0);
    let mut trans: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let tuple = tuples[id].clone();
        let mut row = Vec::with_capacity(syms);
        for sym in 0..syms {
            let next: Vec<usize> = tuple
                .iter()
                .zip(&bank.dfas)
                .map(|(&q, d)| d.step(q, sym))
                .collect();
            let fresh = index.len();
            let tid = *index.entry(next.clone()).or_insert_with(|| {
                tuples.push(next);
                queue.push_back(fresh);
                fresh
            });
            row.push(tid);
        }
        trans.push(row);
    }
    let holds: Vec<Vec<bool>> = tuples
        .iter()
        .map(|tuple| {
            tuple
                .iter()
                .zip(&bank.dfas)
                .map(|(&q, d)| d.finals.contains(&q))
                .collect()
        })
        .collect();
    let dfa = Dfa {
        alphabet: t.alphabet.clone(),
        state_count: tuples.len(),
        trans,
        initial: 0,
        finals: BTreeSet::new(),
    };
    Ok(PastAutomaton {
        dfa,
        vertex_test,
        edge_test,
        holds,
    })
}

/// What a state of the future-past automaton says about its position.
#[derive(Debug, Clone, Default)]
pub struct Shape {
    /// Active copies and their labels.
    pub active: BTreeMap<usize, Label>,
    /// Indices of ε edge rules firing within this position.
    pub eps_edges: Vec<usize>,
    /// Indices of letter edge rules firing out of this position, with their
    /// tag.
    pub out_letter: Vec<(usize, usize)>,
    /// Letter rules whose arrival test holds here (actual firing depends on
    /// the incoming transition).
    pub in_letter_candidates: Vec<usize>,
    /// Active copies with no outgoing edge.
    pub sinks: Vec<usize>,
    /// For states with no active copy: the register that carries the
    /// pending final value, when one exists.
    pub carried: Option<usize>,
}

/// The future-past product automaton, pruned to states on accepting paths,
/// with one shape per state.
#[derive(Debug)]
pub struct FuturePast {
    pub future: FutureAutomaton,
    pub past: PastAutomaton,
    /// (atom, past state) per product state.
    pub states: Vec<(usize, usize)>,
    pub transitions: Vec<(usize, usize, usize)>,
    pub initial: Vec<usize>,
    pub finals: Vec<usize>,
    pub shapes: Vec<Shape>,
}

/// The kind of a normalized single-step edge rule.
pub(crate) fn edge_kind(t: &RuleTransduction, idx: usize) -> Result<Option<usize>> {
    match &t.edge_rules[idx].infix {
        Regex::Eps => Ok(None),
        Regex::Lit(l) => Ok(Some(t.alphabet.index_of(l).ok_or_else(|| {
            Error::TagOutOfAlphabet(l.clone())
        })?)),
        other => Err(Error::InvalidMachine(format!(
            "edge rule {idx} has non-normalized infix `{other}`"
        ))),
    }
}

fn shape_of(
    t: &RuleTransduction,
    future: &FutureAutomaton,
    past: &PastAutomaton,
    atom: usize,
    p: usize,
) -> Result<Shape> {
    let mut shape = Shape::default();
    for (i, r) in t.vertex_rules.iter().enumerate() {
        if past.holds[p][past.vertex_test[i]] && future.holds[atom][future.vertex_test[i]] {
            let copy = t.copy_index(&r.copy).expect("checked");
            if let Some(old) = shape.active.insert(copy, r.label.clone()) {
                if old != r.label {
                    return Err(Error::NotWellFormed(format!(
                        "copy `{}` gets two labels in one shape",
                        r.copy
                    )));
                }
            }
        }
    }
    for (i, _e) in t.edge_rules.iter().enumerate() {
        let fires_prefix = past.holds[p][past.edge_test[i]];
        match edge_kind(t, i)? {
            None => {
                if fires_prefix && future.holds[atom][future.edge_arrive_test[i]] {
                    shape.eps_edges.push(i);
                }
            }
            Some(sym) => {
                if fires_prefix && future.holds[atom][future.edge_fire_test[i]] {
                    shape.out_letter.push((i, sym));
                }
                if future.holds[atom][future.edge_arrive_test[i]] {
                    shape.in_letter_candidates.push(i);
                }
            }
        }
    }
    // sinks: active copies with no outgoing ε or letter edge
    for (&copy, _) in &shape.active {
        let has_eps_out = shape.eps_edges.iter().any(|&i| {
            t.copy_index(&t.edge_rules[i].src).expect("checked") == copy
        });
        let has_letter_out = shape.out_letter.iter().any(|&(i, _)| {
            t.copy_index(&t.edge_rules[i].src).expect("checked") == copy
        });
        if !has_eps_out && !has_letter_out {
            shape.sinks.push(copy);
        }
    }
    Ok(shape)
}

/// Builds the pruned future-past automaton with shapes and carried-value
/// designations.
pub fn future_past(t: &RuleTransduction) -> Result<FuturePast> {
    let future = future_automaton(t)?;
    let past = past_automaton(t)?;

    // product reachable from (initial atom, past initial)
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut states: Vec<(usize, usize)> = Vec::new();
    let mut transitions: Vec<(usize, usize, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    for &a in &future.initial_atoms {
        let key = (a, past.dfa.initial);
        if !index.contains_key(&key) {
            index.insert(key, states.len());
            states.push(key);
            queue.push_back(key);
        }
    }
    // atomaton transitions indexed by source atom
    let fut_nfa = &future.atomaton.nfa;
    let mut atom_succ: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &(f, s, to) in &fut_nfa.transitions {
        if let Some(sym) = s {
            atom_succ.entry((f, sym)).or_default().push(to);
        }
    }
    while let Some((a, p)) = queue.pop_front() {
        let from = index[&(a, p)];
        for sym in 0..t.alphabet.len() {
            let p2 = past.dfa.step(p, sym);
            for &a2 in atom_succ.get(&(a, sym)).map(Vec::as_slice).unwrap_or(&[]) {
                let key = (a2, p2);
                let to = *index.entry(key).or_insert_with(|| {
                    states.push(key);
                    queue.push_back(key);
                    states.len() - 1
                });
                transitions.push((from, sym, to));
            }
        }
    }
    let finals: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, (a, _))| *a == future.final_atom)
        .map(|(i, _)| i)
        .collect();
    let initial: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, (a, p))| future.initial_atoms.contains(a) && *p == past.dfa.initial)
        .map(|(i, _)| i)
        .collect();

    // prune to reachable ∧ co-reachable
    let mut nfa = Nfa::new(t.alphabet.clone(), states.len());
    nfa.initial = initial.clone();
    nfa.finals = finals.iter().copied().collect();
    for &(f, s, to) in &transitions {
        nfa.add_transition(f, Some(s), to);
    }
    let keep: BTreeSet<usize> = nfa
        .reachable()
        .intersection(&nfa.coreachable())
        .copied()
        .collect();
    let remap: BTreeMap<usize, usize> = keep
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let states: Vec<(usize, usize)> = keep.iter().map(|&i| states[i]).collect();
    let transitions: Vec<(usize, usize, usize)> = transitions
        .iter()
        .filter(|(f, _, to)| remap.contains_key(f) && remap.contains_key(to))
        .map(|&(f, s, to)| (remap[&f], s, remap[&to]))
        .collect();
    let initial: Vec<usize> = initial
        .iter()
        .filter_map(|i| remap.get(i).copied())
        .collect();
    let finals: Vec<usize> = finals
        .iter()
        .filter_map(|i| remap.get(i).copied())
        .collect();

    let mut shapes = Vec::with_capacity(states.len());
    for &(a, p) in &states {
        shapes.push(shape_of(t, &future, &past, a, p)?);
    }

    // carried-value designation: dataflow over inactive states
    let mut fp = FuturePast {
        future,
        past,
        states,
        transitions,
        initial,
        finals,
        shapes,
    };
    assign_carried(&mut fp)?;
    Ok(fp)
}

fn assign_carried(fp: &mut FuturePast) -> Result<()> {
    // iterate to fixpoint; the product is finite and carried only ever
    // moves from None to Some
    loop {
        let mut changed = false;
        for &(from, _, to) in &fp.transitions {
            if !fp.shapes[to].active.is_empty() {
                continue;
            }
            let candidate = if !fp.shapes[from].active.is_empty() {
                match fp.shapes[from].sinks.as_slice() {
                    [one] => Some(*one),
                    _ => None, // zero or multiple sinks: condition 6 territory
                }
            } else {
                fp.shapes[from].carried
            };
            if let Some(c) = candidate {
                match fp.shapes[to].carried {
                    None => {
                        fp.shapes[to].carried = Some(c);
                        changed = true;
                    }
                    Some(old) if old != c => {
                        return Err(Error::NotWellFormed(format!(
                            "the final-value carrier is not unique: registers {old} and {c} \
                             both reach one state"
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{is_unambiguous, parse_regex};
    use crate::transduction::{single_step, sum_of_a_rules};

    #[test]
    fn running_example_has_three_atoms() {
        let t = single_step(&sum_of_a_rules()).unwrap();
        let fut = future_automaton(&t).unwrap();
        assert_eq!(fut.atom_count(), 3);
        let alpha = t.alphabet.clone();
        for want in ["A[AB]*", "B+A[AB]*", "B*"] {
            let lang = regex_to_dfa(&parse_regex(want).unwrap(), &alpha).unwrap();
            assert!(
                (0..fut.atom_count())
                    .any(|i| fut.atomaton.atom_language(i).language_equal(&lang).unwrap()),
                "missing atom {want}"
            );
        }
        // the domain is universal, so every atom is initial
        assert_eq!(fut.initial_atoms.len(), 3);
        assert!(is_unambiguous(&fut.nfa()).unwrap());
    }

    #[test]
    fn universal_tests_collapse_to_one_atom() {
        // a transduction whose tests are all Σ*
        let j: crate::transduction::RulesJson = serde_json::from_value(serde_json::json!({
            "alphabet": ["a"],
            "copies": ["C"],
            "domain": "[a]*",
            "vertex_rules": [
                {"copy": "C", "label": "0", "r1": "eps", "r2": "a*"}
            ],
            "edge_rules": [],
            "registry": {"domain": "int", "ops": ["0"]}
        }))
        .unwrap();
        let t = crate::transduction::RuleTransduction::from_json(&j).unwrap();
        let fut = future_automaton(&t).unwrap();
        assert_eq!(fut.atom_count(), 1);
    }

    #[test]
    fn membership_tables_agree_with_direct_checks() {
        let t = single_step(&sum_of_a_rules()).unwrap();
        let fut = future_automaton(&t).unwrap();
        let past = past_automaton(&t).unwrap();
        for tags in crate::fixtures::tag_words(&t.alphabet, 5) {
            // future: the atom of the word decides every suffix test
            let atom = fut.atomaton.atom_of(&tags);
            for (i, r) in t.vertex_rules.iter().enumerate() {
                let d = regex_to_dfa(&r.suffix, &t.alphabet).unwrap();
                assert_eq!(
                    fut.holds[atom][fut.vertex_test[i]],
                    d.accepts(&tags),
                    "suffix test {i} on {tags:?}"
                );
            }
            // past: run the product and compare each prefix test
            let mut p = past.dfa.initial;
            for &s in &tags {
                p = past.dfa.step(p, s);
            }
            for (i, r) in t.vertex_rules.iter().enumerate() {
                let d = regex_to_dfa(&r.prefix, &t.alphabet).unwrap();
                assert_eq!(
                    past.holds[p][past.vertex_test[i]],
                    d.accepts(&tags),
                    "prefix test {i} on {tags:?}"
                );
            }
        }
    }

    #[test]
    fn shapes_follow_the_sink_through_trailing_bs() {
        let t = single_step(&sum_of_a_rules()).unwrap();
        let fp = future_past(&t).unwrap();
        // after "A" then "B"s: some pruned state has no active copy but a
        // carried register
        let carried_states: Vec<_> = fp
            .shapes
            .iter()
            .filter(|s| s.active.is_empty() && s.carried.is_some())
            .collect();
        assert!(!carried_states.is_empty());
    }
}
