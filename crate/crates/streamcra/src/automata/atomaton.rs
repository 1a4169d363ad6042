//! The átomaton: atoms of the Boolean algebra generated by the
//! derivative closure of a family of regular languages.
//!
//! Each atom is identified by the set of minimal-DFA states from which the
//! residual word is accepted, and the atoms are exactly the reachable
//! subsets of the reverse determinization. The NFA over the atoms accepts,
//! from each state, exactly that atom's language, and is unambiguous.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

use super::{determinize, Dfa, Nfa};

#[derive(Debug, Clone)]
pub struct AtomInfo {
    /// Pairs (base index, minimal-DFA state) from which the residual word
    /// is accepted.
    pub subset: BTreeSet<(usize, usize)>,
    /// For every base language: does this atom lie inside it?
    pub base_membership: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct Atomaton {
    /// Unambiguous NFA whose state `i` accepts exactly atom `i`. All states
    /// are marked initial; the unique final state is the atom containing ε.
    pub nfa: Nfa,
    pub atoms: Vec<AtomInfo>,
    /// Minimal DFAs of the base languages, index-aligned with the
    /// membership tables.
    pub base: Vec<Dfa>,
}

impl Atomaton {
    /// The atom a given word belongs to.
    pub fn atom_of(&self, word: &[usize]) -> usize {
        let mut subset = BTreeSet::new();
        for (i, d) in self.base.iter().enumerate() {
            for q in 0..d.state_count {
                let mut s = q;
                for &sym in word {
                    s = d.trans[s][sym];
                }
                if d.finals.contains(&s) {
                    subset.insert((i, q));
                }
            }
        }
        self.atoms
            .iter()
            .position(|a| a.subset == subset)
            .expect("every word lies in some atom")
    }

    /// The language of one atom, as a DFA.
    pub fn atom_language(&self, idx: usize) -> Dfa {
        let mut nfa = self.nfa.clone();
        nfa.initial = vec![idx];
        determinize(&nfa).minimize()
    }
}

/// Builds the átomaton of a family of base languages over a common alphabet.
pub fn atomaton(base: &[Dfa]) -> Result<Atomaton> {
    if base.is_empty() {
        return Err(Error::ParseError("atomaton needs at least one base language".into()));
    }
    let alphabet = base[0].alphabet.clone();
    for d in base {
        if d.alphabet != alphabet {
            return Err(Error::AlphabetMismatch(
                "atomaton base languages need a common alphabet".into(),
            ));
        }
    }
    let mins: Vec<Dfa> = base.iter().map(Dfa::minimize).collect();
    let syms = alphabet.len();

    // the subset reached after reading ε backwards: all accepting states
    let mut root: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, d) in mins.iter().enumerate() {
        root.extend(d.finals.iter().map(|&q| (i, q)));
    }

    let pre = |s: &BTreeSet<(usize, usize)>, sym: usize| -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (i, d) in mins.iter().enumerate() {
            for q in 0..d.state_count {
                if s.contains(&(i, d.trans[q][sym])) {
                    out.insert((i, q));
                }
            }
        }
        out
    };

    let mut index: BTreeMap<BTreeSet<(usize, usize)>, usize> = BTreeMap::new();
    let mut subsets: Vec<BTreeSet<(usize, usize)>> = Vec::new();
    index.insert(root.clone(), 0);
    subsets.push(root);
    let mut queue = VecDeque::from([0usize]);
    let mut preimages: Vec<Vec<usize>> = Vec::new(); // preimages[atom][sym]
    while let Some(id) = queue.pop_front() {
        let mut row = Vec::with_capacity(syms);
        for sym in 0..syms {
            let p = pre(&subsets[id], sym);
            let fresh = index.len();
            let pid = *index.entry(p.clone()).or_insert_with(|| {
                subsets.push(p);
                queue.push_back(fresh);
                fresh
            });
            row.push(pid);
        }
        preimages.push(row);
    }

    let mut nfa = Nfa::new(alphabet, subsets.len());
    nfa.initial = (0..subsets.len()).collect();
    nfa.finals.insert(0); // the subset reached by ε backwards holds ε
    for (to, row) in preimages.iter().enumerate() {
        for (sym, &from) in row.iter().enumerate() {
            nfa.add_transition(from, Some(sym), to);
        }
    }

    let atoms = subsets
        .iter()
        .map(|subset| AtomInfo {
            subset: subset.clone(),
            base_membership: mins
                .iter()
                .enumerate()
                .map(|(i, d)| subset.contains(&(i, d.initial)))
                .collect(),
        })
        .collect();

    Ok(Atomaton {
        nfa,
        atoms,
        base: mins,
    })
}
