//! Unambiguous concatenation and iteration of regular languages.
//!
//! `A ⊙ B` keeps exactly the words with a unique split into `A · B`, and
//! `A^⊙*` keeps the words with a unique decomposition into blocks from `A`.
//! Both are built by counting-subset constructions with run counts capped
//! at 2: two co-located runs in a DFA component never re-separate, so the
//! 0/1/many distinction is all that acceptance needs.

use std::collections::{BTreeMap, VecDeque};

use crate::error::Result;

use super::Dfa;

fn sat_add(a: u8, b: u8) -> u8 {
    (a + b).min(2)
}

type Counts = BTreeMap<usize, u8>;

/// Recognizes `A ⊙ B`: a word is accepted iff it has exactly one split
/// `w = uv` with `u ∈ A` and `v ∈ B`. A fresh `B`-run is spawned whenever
/// the `A`-component is at an accepting state.
pub fn unamb_concat_dfa(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    concat_with_counts(a, b, |total| total == 1)
}

/// Recognizes the words with two or more splits into `A · B`: the
/// complement side of unambiguous concatenation, used to detect rule
/// instances that can co-fire.
pub fn ambiguous_concat_dfa(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    concat_with_counts(a, b, |total| total >= 2)
}

fn concat_with_counts(a: &Dfa, b: &Dfa, accept: impl Fn(u8) -> bool) -> Result<Dfa> {
    if a.alphabet != b.alphabet {
        return Err(crate::error::Error::AlphabetMismatch(
            "concatenation needs a common alphabet".into(),
        ));
    }
    let syms = a.alphabet.len();
    type State = (usize, Vec<(usize, u8)>);
    let pack = |a_state: usize, counts: &Counts| -> State {
        (a_state, counts.iter().map(|(&k, &v)| (k, v)).collect())
    };
    let mut start_counts = Counts::new();
    if a.finals.contains(&a.initial) {
        start_counts.insert(b.initial, 1);
    }
    let start = pack(a.initial, &start_counts);
    let mut index: BTreeMap<State, usize> = BTreeMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();
    index.insert(start.clone(), 0);
    states.push(start);
    trans.push(vec![usize::MAX; syms]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let (a_state, packed) = states[id].clone();
        for s in 0..syms {
            let a_next = a.trans[a_state][s];
            let mut counts = Counts::new();
            for &(b_state, c) in &packed {
                let t = b.trans[b_state][s];
                let e = counts.entry(t).or_insert(0);
                *e = sat_add(*e, c);
            }
            if a.finals.contains(&a_next) {
                let e = counts.entry(b.initial).or_insert(0);
                *e = sat_add(*e, 1);
            }
            let key = pack(a_next, &counts);
            let fresh = index.len();
            let tid = *index.entry(key.clone()).or_insert_with(|| {
                states.push(key);
                trans.push(vec![usize::MAX; syms]);
                queue.push_back(fresh);
                fresh
            });
            trans[id][s] = tid;
        }
    }
    let finals = states
        .iter()
        .enumerate()
        .filter(|(_, (_, counts))| {
            let total = counts
                .iter()
                .filter(|(q, _)| b.finals.contains(q))
                .fold(0u8, |acc, (_, c)| sat_add(acc, *c));
            accept(total)
        })
        .map(|(i, _)| i)
        .collect();
    Ok(Dfa {
        alphabet: a.alphabet.clone(),
        state_count: states.len(),
        trans,
        initial: 0,
        finals,
    })
}

/// Recognizes `A^⊙*`: a word is accepted iff it has exactly one
/// decomposition into a sequence of `A`-blocks.
///
/// If `ε ∈ A` the result is the empty language: every word then has
/// several decompositions by ε-padding, which violates the uniqueness of
/// the block count. Callers that want a diagnostic should test
/// `a.accepts_empty()` before building.
pub fn unamb_iter_dfa(a: &Dfa) -> Dfa {
    if a.accepts_empty() {
        return Dfa::empty_language(a.alphabet.clone());
    }
    let syms = a.alphabet.len();

    // (block-run counts, number of decompositions of the consumed prefix)
    type State = (Vec<(usize, u8)>, u8);
    let pack = |counts: &Counts, t: u8| -> State {
        (counts.iter().map(|(&k, &v)| (k, v)).collect(), t)
    };

    let mut start_counts = Counts::new();
    start_counts.insert(a.initial, 1);
    let start = pack(&start_counts, 1);

    let mut index: BTreeMap<State, usize> = BTreeMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();
    index.insert(start.clone(), 0);
    states.push(start);
    trans.push(vec![usize::MAX; syms]);
    let mut queue = VecDeque::from([0usize]);

    while let Some(id) = queue.pop_front() {
        let (packed, _) = states[id].clone();
        for s in 0..syms {
            let mut counts = Counts::new();
            for &(q, c) in &packed {
                let t = a.trans[q][s];
                let e = counts.entry(t).or_insert(0);
                *e = sat_add(*e, c);
            }
            let decomps = counts
                .iter()
                .filter(|(q, _)| a.finals.contains(q))
                .fold(0u8, |acc, (_, c)| sat_add(acc, *c));
            if decomps > 0 {
                let e = counts.entry(a.initial).or_insert(0);
                *e = sat_add(*e, decomps);
            }
            let key = pack(&counts, decomps);
            let fresh = index.len();
            let tid = *index.entry(key.clone()).or_insert_with(|| {
                states.push(key);
                trans.push(vec![usize::MAX; syms]);
                queue.push_back(fresh);
                fresh
            });
            trans[id][s] = tid;
        }
    }

    let finals = states
        .iter()
        .enumerate()
        .filter(|(_, (_, t))| *t == 1)
        .map(|(i, _)| i)
        .collect();

    Dfa {
        alphabet: a.alphabet.clone(),
        state_count: states.len(),
        trans,
        initial: 0,
        finals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{parse_regex, regex_to_dfa, Alphabet};

    fn dfa(alpha: &Alphabet, src: &str) -> Dfa {
        regex_to_dfa(&parse_regex(src).unwrap(), alpha).unwrap()
    }

    #[test]
    fn unique_split_accepted() {
        let alpha = Alphabet::of(&["a", "b"]);
        let d = unamb_concat_dfa(&dfa(&alpha, "a"), &dfa(&alpha, "b")).unwrap();
        assert!(d.accepts(&alpha.word(&["a", "b"]).unwrap()));
        assert!(!d.accepts(&alpha.word(&["a"]).unwrap()));
    }

    #[test]
    fn double_split_rejected() {
        // A = {a, ab}, B = {b, ε}: "ab" splits both ways
        let alpha = Alphabet::of(&["a", "b"]);
        let d = unamb_concat_dfa(&dfa(&alpha, "a|ab"), &dfa(&alpha, "b|eps")).unwrap();
        assert!(!d.accepts(&alpha.word(&["a", "b"]).unwrap()));
        assert!(d.accepts(&alpha.word(&["a"]).unwrap()));
    }

    #[test]
    fn eps_in_base_gives_empty_iteration() {
        let alpha = Alphabet::of(&["a", "b"]);
        let d = unamb_iter_dfa(&dfa(&alpha, "eps|a"));
        assert!(d.is_empty());
    }

    #[test]
    fn blocks_forced_at_hash() {
        let alpha = Alphabet::of(&["a", "b", "#"]);
        let d = unamb_iter_dfa(&dfa(&alpha, "[ab]+#"));
        let want = dfa(&alpha, "([ab]+#)*");
        assert!(d.language_equal(&want).unwrap());
    }

    #[test]
    fn a_aa_iteration() {
        // A = {a, aa}: "a" has one decomposition, "aaa" has two
        let alpha = Alphabet::of(&["a"]);
        let d = unamb_iter_dfa(&dfa(&alpha, "a|aa"));
        assert!(d.accepts(&alpha.word(&["a"]).unwrap()));
        assert!(d.accepts(&[])); // unique empty decomposition
        assert!(!d.accepts(&alpha.word(&["a", "a", "a"]).unwrap()));
    }
}
