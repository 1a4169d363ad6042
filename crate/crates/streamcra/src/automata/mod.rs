//! Classical finite-automata toolkit: NFAs with ε-moves, complete DFAs,
//! the boolean closure operations, unambiguity checking, unambiguous
//! concatenation and iteration, and the átomaton construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod atomaton;
mod dot;
pub mod regex;
mod to_regex;
mod unamb;

pub use atomaton::{atomaton, Atomaton};
pub use dot::{dfa_to_dot, nfa_to_dot};
pub use regex::{parse_regex, Regex};
pub use to_regex::dfa_to_regex;
pub use unamb::{ambiguous_concat_dfa, unamb_concat_dfa, unamb_iter_dfa};

/// A declared, ordered tag alphabet. Symbols are indexed by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(symbols: Vec<String>) -> Result<Alphabet> {
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if !seen.insert(s.clone()) {
                return Err(Error::ParseError(format!("duplicate alphabet symbol `{s}`")));
            }
        }
        if symbols.is_empty() {
            return Err(Error::ParseError("alphabet must be nonempty".into()));
        }
        Ok(Alphabet { symbols })
    }

    pub fn of(symbols: &[&str]) -> Alphabet {
        Alphabet::new(symbols.iter().map(|s| s.to_string()).collect()).expect("valid alphabet")
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn symbol(&self, idx: usize) -> &str {
        &self.symbols[idx]
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.symbols.iter()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Converts a tag word to symbol indices.
    pub fn word(&self, tags: &[&str]) -> Result<Vec<usize>> {
        tags.iter()
            .map(|t| {
                self.index_of(t)
                    .ok_or_else(|| Error::TagOutOfAlphabet(t.to_string()))
            })
            .collect()
    }
}

/// A nondeterministic finite automaton, possibly with ε-moves.
///
/// Transitions and initial entries are multisets: duplicates are meaningful
/// and stand for distinct runs, so ε-elimination can preserve the number of
/// accepting runs per word exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Nfa {
    pub alphabet: Alphabet,
    pub state_count: usize,
    /// (from, symbol index or None for ε, to)
    pub transitions: Vec<(usize, Option<usize>, usize)>,
    pub initial: Vec<usize>,
    pub finals: BTreeSet<usize>,
}

impl Nfa {
    pub fn new(alphabet: Alphabet, state_count: usize) -> Nfa {
        Nfa {
            alphabet,
            state_count,
            transitions: Vec::new(),
            initial: Vec::new(),
            finals: BTreeSet::new(),
        }
    }

    pub fn add_transition(&mut self, from: usize, sym: Option<usize>, to: usize) {
        debug_assert!(from < self.state_count && to < self.state_count);
        self.transitions.push((from, sym, to));
    }

    pub fn has_epsilon(&self) -> bool {
        self.transitions.iter().any(|(_, s, _)| s.is_none())
    }

    /// Membership by on-the-fly subset simulation (ε handled via closure).
    pub fn accepts(&self, word: &[usize]) -> bool {
        let closure = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
            let mut out = set.clone();
            let mut queue: VecDeque<usize> = set.iter().copied().collect();
            while let Some(q) = queue.pop_front() {
                for &(f, s, t) in &self.transitions {
                    if f == q && s.is_none() && out.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
            out
        };
        let mut current: BTreeSet<usize> = self.initial.iter().copied().collect();
        current = closure(&current);
        for &sym in word {
            let mut next = BTreeSet::new();
            for &q in &current {
                for &(f, s, t) in &self.transitions {
                    if f == q && s == Some(sym) {
                        next.insert(t);
                    }
                }
            }
            current = closure(&next);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|q| self.finals.contains(q))
    }

    /// Forward-reachable states (over letters and ε).
    pub fn reachable(&self) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = self.initial.iter().copied().collect();
        let mut queue: VecDeque<usize> = seen.iter().copied().collect();
        while let Some(q) = queue.pop_front() {
            for &(f, _, t) in &self.transitions {
                if f == q && seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub fn coreachable(&self) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = self.finals.clone();
        let mut queue: VecDeque<usize> = seen.iter().copied().collect();
        while let Some(q) = queue.pop_front() {
            for &(f, _, t) in &self.transitions {
                if t == q && seen.insert(f) {
                    queue.push_back(f);
                }
            }
        }
        seen
    }
}

/// A deterministic finite automaton with a total transition function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    pub alphabet: Alphabet,
    pub state_count: usize,
    /// trans[state][symbol] = successor
    pub trans: Vec<Vec<usize>>,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
}

impl Dfa {
    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut q = self.initial;
        for &s in word {
            q = self.trans[q][s];
        }
        self.finals.contains(&q)
    }

    pub fn accepts_empty(&self) -> bool {
        self.finals.contains(&self.initial)
    }

    pub fn step(&self, state: usize, sym: usize) -> usize {
        self.trans[state][sym]
    }

    /// The all-accepting one-state DFA.
    pub fn universal(alphabet: Alphabet) -> Dfa {
        let n = alphabet.len();
        Dfa {
            alphabet,
            state_count: 1,
            trans: vec![vec![0; n]],
            initial: 0,
            finals: BTreeSet::from([0]),
        }
    }

    /// The one-state dead DFA.
    pub fn empty_language(alphabet: Alphabet) -> Dfa {
        let n = alphabet.len();
        Dfa {
            alphabet,
            state_count: 1,
            trans: vec![vec![0; n]],
            initial: 0,
            finals: BTreeSet::new(),
        }
    }

    pub fn to_nfa(&self) -> Nfa {
        let mut nfa = Nfa::new(self.alphabet.clone(), self.state_count);
        nfa.initial.push(self.initial);
        nfa.finals = self.finals.clone();
        for (q, row) in self.trans.iter().enumerate() {
            for (sym, &t) in row.iter().enumerate() {
                nfa.add_transition(q, Some(sym), t);
            }
        }
        nfa
    }

    pub fn complement(&self) -> Dfa {
        let mut out = self.clone();
        out.finals = (0..self.state_count)
            .filter(|q| !self.finals.contains(q))
            .collect();
        out
    }

    fn check_alphabet(&self, other: &Dfa) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "[{}] vs [{}]",
                self.alphabet.symbols().join(","),
                other.alphabet.symbols().join(",")
            )));
        }
        Ok(())
    }

    /// Product construction, with the acceptance condition chosen by `accept`.
    pub fn product(&self, other: &Dfa, accept: impl Fn(bool, bool) -> bool) -> Result<Dfa> {
        self.check_alphabet(other)?;
        let syms = self.alphabet.len();
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut trans: Vec<Vec<usize>> = Vec::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut queue = VecDeque::new();
        index.insert((self.initial, other.initial), 0);
        pairs.push((self.initial, other.initial));
        trans.push(vec![usize::MAX; syms]);
        queue.push_back(0);
        while let Some(id) = queue.pop_front() {
            let (p, q) = pairs[id];
            for s in 0..syms {
                let target = (self.trans[p][s], other.trans[q][s]);
                let next = index.len();
                let tid = *index.entry(target).or_insert_with(|| {
                    pairs.push(target);
                    trans.push(vec![usize::MAX; syms]);
                    queue.push_back(next);
                    next
                });
                trans[id][s] = tid;
            }
        }
        let finals = pairs
            .iter()
            .enumerate()
            .filter(|(_, (p, q))| accept(self.finals.contains(p), other.finals.contains(q)))
            .map(|(i, _)| i)
            .collect();
        Ok(Dfa {
            alphabet: self.alphabet.clone(),
            state_count: pairs.len(),
            trans,
            initial: 0,
            finals,
        })
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a && !b)
    }

    pub fn is_empty(&self) -> bool {
        // any reachable final state?
        let mut seen = BTreeSet::from([self.initial]);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            if self.finals.contains(&q) {
                return false;
            }
            for &t in &self.trans[q] {
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        true
    }

    /// A shortest accepted word, if the language is nonempty.
    pub fn shortest_word(&self) -> Option<Vec<usize>> {
        let mut back: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut queue = VecDeque::from([self.initial]);
        let mut seen = BTreeSet::from([self.initial]);
        let mut hit = if self.finals.contains(&self.initial) {
            Some(self.initial)
        } else {
            None
        };
        while hit.is_none() {
            let q = queue.pop_front()?;
            for (s, &t) in self.trans[q].iter().enumerate() {
                if seen.insert(t) {
                    back.insert(t, (q, s));
                    if self.finals.contains(&t) {
                        hit = Some(t);
                        break;
                    }
                    queue.push_back(t);
                }
            }
        }
        let mut word = Vec::new();
        let mut q = hit?;
        while q != self.initial || back.contains_key(&q) {
            match back.get(&q) {
                Some(&(p, s)) => {
                    word.push(s);
                    q = p;
                }
                None => break,
            }
        }
        word.reverse();
        Some(word)
    }

    pub fn is_subset_of(&self, other: &Dfa) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    /// Language containment: does this DFA's language contain the other's?
    pub fn contains(&self, other: &Dfa) -> Result<bool> {
        other.is_subset_of(self)
    }

    /// The reversal of the language, as an NFA.
    pub fn reverse(&self) -> Nfa {
        let mut nfa = Nfa::new(self.alphabet.clone(), self.state_count);
        nfa.initial = self.finals.iter().copied().collect();
        nfa.finals = BTreeSet::from([self.initial]);
        for (q, row) in self.trans.iter().enumerate() {
            for (sym, &t) in row.iter().enumerate() {
                nfa.add_transition(t, Some(sym), q);
            }
        }
        nfa
    }

    /// Moore partition refinement down to the minimal complete DFA, in
    /// canonical (BFS) state order so minimal DFAs compare structurally.
    pub fn minimize(&self) -> Dfa {
        let reachable = {
            let mut seen = BTreeSet::from([self.initial]);
            let mut queue = VecDeque::from([self.initial]);
            while let Some(q) = queue.pop_front() {
                for &t in &self.trans[q] {
                    if seen.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
            seen
        };
        let states: Vec<usize> = reachable.iter().copied().collect();
        let mut class: BTreeMap<usize, usize> = states
            .iter()
            .map(|&q| (q, usize::from(self.finals.contains(&q))))
            .collect();
        loop {
            let mut signature: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let mut next: BTreeMap<usize, usize> = BTreeMap::new();
            for &q in &states {
                let sig = (
                    class[&q],
                    self.trans[q].iter().map(|t| class[t]).collect::<Vec<_>>(),
                );
                let fresh = signature.len();
                let id = *signature.entry(sig).or_insert(fresh);
                next.insert(q, id);
            }
            if next == class {
                break;
            }
            class = next;
        }
        // one representative per class, renumbered canonically by BFS
        let class_count = class.values().copied().collect::<BTreeSet<_>>().len();
        let mut rep: Vec<usize> = vec![usize::MAX; class_count];
        for &q in &states {
            let c = class[&q];
            if rep[c] == usize::MAX {
                rep[c] = q;
            }
        }
        let mut order: Vec<usize> = Vec::new(); // class ids in BFS order
        let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
        let start = class[&self.initial];
        order.push(start);
        pos.insert(start, 0);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for s in 0..self.alphabet.len() {
                let t = class[&self.trans[rep[c]][s]];
                if !pos.contains_key(&t) {
                    pos.insert(t, order.len());
                    order.push(t);
                }
            }
            i += 1;
        }
        let trans = order
            .iter()
            .map(|&c| {
                (0..self.alphabet.len())
                    .map(|s| pos[&class[&self.trans[rep[c]][s]]])
                    .collect()
            })
            .collect();
        let finals = order
            .iter()
            .enumerate()
            .filter(|(_, &c)| self.finals.contains(&rep[c]))
            .map(|(i, _)| i)
            .collect();
        Dfa {
            alphabet: self.alphabet.clone(),
            state_count: order.len(),
            trans,
            initial: 0,
            finals,
        }
    }

    /// Language equality via minimization and canonical isomorphism, so the
    /// minimal forms stay reusable as cache keys.
    pub fn language_equal(&self, other: &Dfa) -> Result<bool> {
        self.check_alphabet(other)?;
        Ok(self.minimize() == other.minimize())
    }

    /// The language accepted when starting from `state` instead of the
    /// initial state.
    pub fn from_state(&self, state: usize) -> Dfa {
        Dfa {
            initial: state,
            ..self.clone()
        }
    }
}

/// Eliminates ε-moves, preserving the number of accepting runs per word.
///
/// ε-paths are counted exactly: the letter transitions and initial entries
/// of the result are multisets with one copy per ε-path, so unambiguity is
/// neither created nor destroyed.
pub fn eliminate_epsilon(nfa: &Nfa) -> Result<Nfa> {
    let n = nfa.state_count;
    // ε adjacency and cycle check
    let mut eps_out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(f, s, t) in &nfa.transitions {
        if s.is_none() {
            eps_out[f].push(t);
        }
    }
    // Kahn topological sort over ε-edges
    let mut indeg = vec![0usize; n];
    for outs in &eps_out {
        for &t in outs {
            indeg[t] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&q| indeg[q] == 0).collect();
    let mut topo = Vec::with_capacity(n);
    while let Some(q) = queue.pop_front() {
        topo.push(q);
        for &t in &eps_out[q] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push_back(t);
            }
        }
    }
    if topo.len() != n {
        let cyclic = (0..n).find(|&q| indeg[q] > 0).unwrap_or(0);
        return Err(Error::EpsilonCycle(cyclic));
    }
    // path_counts[p][q] = number of ε-paths from p to q (empty path included)
    let mut path_counts: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for &q in topo.iter().rev() {
        let mut counts = BTreeMap::from([(q, 1usize)]);
        for &t in &eps_out[q] {
            for (&dst, &c) in &path_counts[t] {
                *counts.entry(dst).or_insert(0) += c;
            }
        }
        path_counts[q] = counts;
    }
    let mut out = Nfa::new(nfa.alphabet.clone(), n);
    out.finals = nfa.finals.clone();
    for &i in &nfa.initial {
        for (&dst, &c) in &path_counts[i] {
            for _ in 0..c {
                out.initial.push(dst);
            }
        }
    }
    for &(f, s, t) in &nfa.transitions {
        if let Some(sym) = s {
            for (&dst, &c) in &path_counts[t] {
                for _ in 0..c {
                    out.add_transition(f, Some(sym), dst);
                }
            }
        }
    }
    Ok(out)
}

/// Subset construction. The input must be ε-free.
pub fn determinize(nfa: &Nfa) -> Dfa {
    debug_assert!(!nfa.has_epsilon(), "determinize expects an ε-free NFA");
    let syms = nfa.alphabet.len();
    let mut succ: Vec<Vec<BTreeSet<usize>>> = vec![vec![BTreeSet::new(); syms]; nfa.state_count];
    for &(f, s, t) in &nfa.transitions {
        if let Some(sym) = s {
            succ[f][sym].insert(t);
        }
    }
    let start: BTreeSet<usize> = nfa.initial.iter().copied().collect();
    let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();
    index.insert(start.clone(), 0);
    subsets.push(start);
    trans.push(vec![usize::MAX; syms]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        for s in 0..syms {
            let mut target = BTreeSet::new();
            for &q in &subsets[id] {
                target.extend(succ[q][s].iter().copied());
            }
            let fresh = index.len();
            let tid = *index.entry(target.clone()).or_insert_with(|| {
                subsets.push(target);
                trans.push(vec![usize::MAX; syms]);
                queue.push_back(fresh);
                fresh
            });
            trans[id][s] = tid;
        }
    }
    let finals = subsets
        .iter()
        .enumerate()
        .filter(|(_, set)| set.iter().any(|q| nfa.finals.contains(q)))
        .map(|(i, _)| i)
        .collect();
    Dfa {
        alphabet: nfa.alphabet.clone(),
        state_count: subsets.len(),
        trans,
        initial: 0,
        finals,
    }
}

/// NFA (with ε allowed) to minimal complete DFA.
pub fn nfa_to_min_dfa(nfa: &Nfa) -> Result<Dfa> {
    let eps_free = if nfa.has_epsilon() {
        eliminate_epsilon(nfa)?
    } else {
        nfa.clone()
    };
    Ok(determinize(&eps_free).minimize())
}

/// Compiles a regex to its minimal complete DFA over the given alphabet.
pub fn regex_to_dfa(r: &Regex, alphabet: &Alphabet) -> Result<Dfa> {
    r.check_alphabet(alphabet)?;
    let nfa = thompson(r, alphabet)?;
    nfa_to_min_dfa(&nfa)
}

/// Thompson construction (produces ε-moves).
pub fn thompson(r: &Regex, alphabet: &Alphabet) -> Result<Nfa> {
    struct Builder {
        nfa: Nfa,
    }
    impl Builder {
        fn fresh(&mut self) -> usize {
            self.nfa.state_count += 1;
            self.nfa.state_count - 1
        }
        // returns (entry, exit)
        fn go(&mut self, r: &Regex, alphabet: &Alphabet) -> Result<(usize, usize)> {
            match r {
                Regex::Empty => {
                    let a = self.fresh();
                    let b = self.fresh();
                    Ok((a, b))
                }
                Regex::Eps => {
                    let a = self.fresh();
                    let b = self.fresh();
                    self.nfa.add_transition(a, None, b);
                    Ok((a, b))
                }
                Regex::Lit(l) => {
                    let sym = alphabet
                        .index_of(l)
                        .ok_or_else(|| Error::AlphabetMismatch(format!("literal `{l}`")))?;
                    let a = self.fresh();
                    let b = self.fresh();
                    self.nfa.add_transition(a, Some(sym), b);
                    Ok((a, b))
                }
                Regex::LitSet(set) => {
                    let a = self.fresh();
                    let b = self.fresh();
                    for l in set {
                        let sym = alphabet
                            .index_of(l)
                            .ok_or_else(|| Error::AlphabetMismatch(format!("literal `{l}`")))?;
                        self.nfa.add_transition(a, Some(sym), b);
                    }
                    Ok((a, b))
                }
                Regex::Concat(x, y) => {
                    let (a1, b1) = self.go(x, alphabet)?;
                    let (a2, b2) = self.go(y, alphabet)?;
                    self.nfa.add_transition(b1, None, a2);
                    Ok((a1, b2))
                }
                Regex::Union(x, y) => {
                    let a = self.fresh();
                    let b = self.fresh();
                    let (a1, b1) = self.go(x, alphabet)?;
                    let (a2, b2) = self.go(y, alphabet)?;
                    self.nfa.add_transition(a, None, a1);
                    self.nfa.add_transition(a, None, a2);
                    self.nfa.add_transition(b1, None, b);
                    self.nfa.add_transition(b2, None, b);
                    Ok((a, b))
                }
                Regex::Star(x) => {
                    let a = self.fresh();
                    let b = self.fresh();
                    let (a1, b1) = self.go(x, alphabet)?;
                    self.nfa.add_transition(a, None, b);
                    self.nfa.add_transition(a, None, a1);
                    self.nfa.add_transition(b1, None, a1);
                    self.nfa.add_transition(b1, None, b);
                    Ok((a, b))
                }
                Regex::Plus(x) => {
                    let (a1, b1) = self.go(x, alphabet)?;
                    let b = self.fresh();
                    self.nfa.add_transition(b1, None, b);
                    self.nfa.add_transition(b1, None, a1);
                    Ok((a1, b))
                }
            }
        }
    }
    let mut b = Builder {
        nfa: Nfa::new(alphabet.clone(), 0),
    };
    let (entry, exit) = b.go(r, alphabet)?;
    b.nfa.initial.push(entry);
    b.nfa.finals.insert(exit);
    Ok(b.nfa)
}

/// Decides whether any word has two or more accepting runs.
///
/// Self-product reachability with a divergence bit: a reachable,
/// co-reachable pair of runs that have differed at some point (including
/// duplicate transition instances) witnesses ambiguity.
pub fn is_unambiguous(nfa: &Nfa) -> Result<bool> {
    let n = if nfa.has_epsilon() {
        eliminate_epsilon(nfa)?
    } else {
        nfa.clone()
    };
    // transition instances grouped by (from, sym)
    let mut by_src: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new(); // -> (instance id, to)
    for (id, &(f, s, t)) in n.transitions.iter().enumerate() {
        if let Some(sym) = s {
            by_src.entry((f, sym)).or_default().push((id, t));
        }
    }
    let coreach = n.coreachable();
    // states: (p, q, diverged)
    let mut seen: BTreeSet<(usize, usize, bool)> = BTreeSet::new();
    let mut queue: VecDeque<(usize, usize, bool)> = VecDeque::new();
    for (i, &p) in n.initial.iter().enumerate() {
        for (j, &q) in n.initial.iter().enumerate() {
            if i < j {
                let node = (p.min(q), p.max(q), true);
                if seen.insert(node) {
                    queue.push_back(node);
                }
            }
        }
    }
    let uniq: BTreeSet<usize> = n.initial.iter().copied().collect();
    for &p in &uniq {
        let node = (p, p, false);
        if seen.insert(node) {
            queue.push_back(node);
        }
    }
    while let Some((p, q, diverged)) = queue.pop_front() {
        if diverged && n.finals.contains(&p) && n.finals.contains(&q) {
            return Ok(false);
        }
        if !coreach.contains(&p) || !coreach.contains(&q) {
            continue;
        }
        for sym in 0..n.alphabet.len() {
            let empty = Vec::new();
            let outs_p = by_src.get(&(p, sym)).unwrap_or(&empty);
            let outs_q = by_src.get(&(q, sym)).unwrap_or(&empty);
            for &(id1, t1) in outs_p {
                for &(id2, t2) in outs_q {
                    if p == q && !diverged && id2 < id1 {
                        continue; // unordered pairs from a shared prefix
                    }
                    let d2 = diverged || id1 != id2;
                    let node = (t1.min(t2), t1.max(t2), d2);
                    if seen.insert(node) {
                        queue.push_back(node);
                    }
                }
            }
        }
    }
    Ok(true)
}
