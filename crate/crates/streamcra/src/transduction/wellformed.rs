//! The seven well-formedness conditions for rule transductions.
//!
//! Conditions 1, 2, 3, 4, and 7 are decided directly by regex-product
//! emptiness over the rule models; conditions 5 (arity) and 6 (global
//! uniqueness of the sink) are verified on the future-past automaton of
//! the single-step decomposition, where failures still yield witness
//! paths.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::automata::{regex_to_dfa, Dfa};
use crate::error::{Error, Result};

use super::future_past::{edge_kind, future_past, FuturePast};
use super::single_step::single_step;
use super::{Label, RuleTransduction};

#[derive(Debug, Clone, Default)]
pub struct ConditionReport {
    pub ok: bool,
    /// True when the condition could not be evaluated because an earlier
    /// condition failed; `ok` is then true vacuously.
    pub skipped: bool,
    pub witness: Option<String>,
    pub detail: String,
}

impl ConditionReport {
    fn pass() -> ConditionReport {
        ConditionReport {
            ok: true,
            skipped: false,
            witness: None,
            detail: String::new(),
        }
    }

    fn fail(detail: impl Into<String>, witness: Option<String>) -> ConditionReport {
        ConditionReport {
            ok: false,
            skipped: false,
            witness,
            detail: detail.into(),
        }
    }

    fn skip(detail: impl Into<String>) -> ConditionReport {
        ConditionReport {
            ok: true,
            skipped: true,
            witness: None,
            detail: detail.into(),
        }
    }
}

/// Reports for conditions 1 through 7, in order.
#[derive(Debug, Clone)]
pub struct WellFormedness {
    pub conditions: Vec<ConditionReport>,
}

impl WellFormedness {
    pub fn all_ok(&self) -> bool {
        self.conditions.iter().all(|c| c.ok)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.conditions.iter().position(|c| !c.ok)
    }

    pub fn summary(&self) -> String {
        self.conditions
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.skipped {
                    format!("({}) skipped", i + 1)
                } else if c.ok {
                    format!("({}) ok", i + 1)
                } else {
                    format!("({}) FAIL: {}", i + 1, c.detail)
                }
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn show_word(alphabet: &crate::automata::Alphabet, w: &[usize]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.iter()
            .map(|&s| alphabet.symbol(s).to_string())
            .collect::<Vec<_>>()
            .join("")
    }
}

struct RuleDfas {
    vertex_pre: Vec<Dfa>,
    vertex_suf: Vec<Dfa>,
    edge_pre: Vec<Dfa>,
    edge_mid: Vec<Dfa>,
    edge_suf: Vec<Dfa>,
    domain: Dfa,
}

impl RuleDfas {
    fn new(t: &RuleTransduction) -> Result<RuleDfas> {
        Ok(RuleDfas {
            vertex_pre: t
                .vertex_rules
                .iter()
                .map(|r| regex_to_dfa(&r.prefix, &t.alphabet))
                .collect::<Result<_>>()?,
            vertex_suf: t
                .vertex_rules
                .iter()
                .map(|r| regex_to_dfa(&r.suffix, &t.alphabet))
                .collect::<Result<_>>()?,
            edge_pre: t
                .edge_rules
                .iter()
                .map(|e| regex_to_dfa(&e.prefix, &t.alphabet))
                .collect::<Result<_>>()?,
            edge_mid: t
                .edge_rules
                .iter()
                .map(|e| regex_to_dfa(&e.infix, &t.alphabet))
                .collect::<Result<_>>()?,
            edge_suf: t
                .edge_rules
                .iter()
                .map(|e| regex_to_dfa(&e.suffix, &t.alphabet))
                .collect::<Result<_>>()?,
            domain: regex_to_dfa(&t.domain, &t.alphabet)?,
        })
    }
}

/// Same-key rules must have pairwise disjoint models; violations are
/// structural errors rather than well-formedness diagnostics.
pub(crate) fn check_same_key_disjoint(t: &RuleTransduction) -> Result<()> {
    let d = RuleDfas::new(t)?;
    for i in 0..t.vertex_rules.len() {
        for j in i + 1..t.vertex_rules.len() {
            let (a, b) = (&t.vertex_rules[i], &t.vertex_rules[j]);
            if a.copy == b.copy && a.label == b.label {
                let pre = d.vertex_pre[i].intersect(&d.vertex_pre[j])?;
                let suf = d.vertex_suf[i].intersect(&d.vertex_suf[j])?;
                if !pre.is_empty() && !suf.is_empty() {
                    return Err(Error::ParseError(format!(
                        "vertex rules {i} and {j} for `{}`:{} overlap",
                        a.copy, a.label
                    )));
                }
            }
        }
    }
    for i in 0..t.edge_rules.len() {
        for j in i + 1..t.edge_rules.len() {
            let (a, b) = (&t.edge_rules[i], &t.edge_rules[j]);
            if a.src == b.src && a.dst == b.dst && a.arg == b.arg {
                let pre = d.edge_pre[i].intersect(&d.edge_pre[j])?;
                let mid = d.edge_mid[i].intersect(&d.edge_mid[j])?;
                let suf = d.edge_suf[i].intersect(&d.edge_suf[j])?;
                if !pre.is_empty() && !mid.is_empty() && !suf.is_empty() {
                    return Err(Error::ParseError(format!(
                        "edge rules {i} and {j} for `{}` →{} `{}` overlap",
                        a.src, a.arg, a.dst
                    )));
                }
            }
        }
    }
    Ok(())
}

// condition 1: at most one vertex label per copy and position
fn condition1(t: &RuleTransduction, d: &RuleDfas) -> Result<ConditionReport> {
    for i in 0..t.vertex_rules.len() {
        for j in i + 1..t.vertex_rules.len() {
            let (a, b) = (&t.vertex_rules[i], &t.vertex_rules[j]);
            if a.copy != b.copy || a.label == b.label {
                continue;
            }
            let pre = d.vertex_pre[i].intersect(&d.vertex_pre[j])?;
            let suf = d.vertex_suf[i].intersect(&d.vertex_suf[j])?;
            if let (Some(u), Some(v)) = (pre.shortest_word(), suf.shortest_word()) {
                let mut w = u.clone();
                w.extend(&v);
                return Ok(ConditionReport::fail(
                    format!(
                        "copy `{}` takes labels {} and {} at position {} of `{}`",
                        a.copy,
                        a.label,
                        b.label,
                        u.len(),
                        show_word(&t.alphabet, &w)
                    ),
                    Some(show_word(&t.alphabet, &w)),
                ));
            }
        }
    }
    Ok(ConditionReport::pass())
}

/// Does the rectangle A × B stay inside the union of the vertex-rule
/// rectangles of `copy`? Returns a witness pair otherwise.
fn rectangle_cover(
    t: &RuleTransduction,
    d: &RuleDfas,
    copy: &str,
    a: &Dfa,
    b: &Dfa,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let rules: Vec<usize> = t
        .vertex_rules
        .iter()
        .enumerate()
        .filter(|(_, r)| r.copy == copy)
        .map(|(i, _)| i)
        .collect();
    let k = rules.len();
    for mask in 0..(1usize << k) {
        let mut u_lang = a.clone();
        for (bit, &ri) in rules.iter().enumerate() {
            u_lang = if mask & (1 << bit) != 0 {
                u_lang.intersect(&d.vertex_pre[ri])?
            } else {
                u_lang.difference(&d.vertex_pre[ri])?
            };
            if u_lang.is_empty() {
                break;
            }
        }
        let Some(u) = u_lang.shortest_word() else {
            continue;
        };
        // the suffix must be covered by the rules whose prefix matched
        let mut uncovered = b.clone();
        for (bit, &ri) in rules.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                uncovered = uncovered.difference(&d.vertex_suf[ri])?;
            }
        }
        if let Some(z) = uncovered.shortest_word() {
            return Ok(Some((u, z)));
        }
    }
    Ok(None)
}

// condition 2: edges connect active vertices
fn condition2(t: &RuleTransduction, d: &RuleDfas) -> Result<ConditionReport> {
    for (i, e) in t.edge_rules.iter().enumerate() {
        // source side: prefix r1, remainder r2·r3
        let remainder = {
            let mid_suf = super::Regex::concat(e.infix.clone(), e.suffix.clone());
            regex_to_dfa(&mid_suf, &t.alphabet)?
        };
        if let Some((u, z)) = rectangle_cover(t, d, &e.src, &d.edge_pre[i], &remainder)? {
            let mut w = u.clone();
            w.extend(&z);
            return Ok(ConditionReport::fail(
                format!(
                    "edge rule {i} leaves from inactive `{}` at position {} of `{}`",
                    e.src,
                    u.len(),
                    show_word(&t.alphabet, &w)
                ),
                Some(show_word(&t.alphabet, &w)),
            ));
        }
        // target side: prefix r1·r2, remainder r3
        let into = {
            let pre_mid = super::Regex::concat(e.prefix.clone(), e.infix.clone());
            regex_to_dfa(&pre_mid, &t.alphabet)?
        };
        if let Some((u, z)) = rectangle_cover(t, d, &e.dst, &into, &d.edge_suf[i])? {
            let mut w = u.clone();
            w.extend(&z);
            return Ok(ConditionReport::fail(
                format!(
                    "edge rule {i} arrives at inactive `{}` at position {} of `{}`",
                    e.dst,
                    u.len(),
                    show_word(&t.alphabet, &w)
                ),
                Some(show_word(&t.alphabet, &w)),
            ));
        }
    }
    Ok(ConditionReport::pass())
}

// condition 3: output exists exactly on the domain
fn condition3(t: &RuleTransduction, d: &RuleDfas) -> Result<ConditionReport> {
    let mut active = Dfa::empty_language(t.alphabet.clone());
    for r in &t.vertex_rules {
        let both = super::Regex::concat(r.prefix.clone(), r.suffix.clone());
        active = active.union(&regex_to_dfa(&both, &t.alphabet)?)?;
    }
    if active.language_equal(&d.domain)? {
        return Ok(ConditionReport::pass());
    }
    let missing = d.domain.difference(&active)?;
    let (detail, witness) = if let Some(w) = missing.shortest_word() {
        (
            format!(
                "domain word `{}` produces no output vertex",
                show_word(&t.alphabet, &w)
            ),
            show_word(&t.alphabet, &w),
        )
    } else {
        let extra = active.difference(&d.domain)?;
        let w = extra.shortest_word().unwrap_or_default();
        (
            format!(
                "non-domain word `{}` has an active vertex",
                show_word(&t.alphabet, &w)
            ),
            show_word(&t.alphabet, &w),
        )
    };
    Ok(ConditionReport::fail(detail, Some(witness)))
}

// condition 4: no local cycle at any position
fn condition4(t: &RuleTransduction, d: &RuleDfas) -> Result<ConditionReport> {
    let copies = t.copies.len();
    // ε-capable rules grouped by source copy
    let mut eps_out: Vec<Vec<usize>> = vec![Vec::new(); copies];
    for (i, e) in t.edge_rules.iter().enumerate() {
        if d.edge_mid[i].accepts_empty() {
            let src = t.copy_index(&e.src).expect("checked");
            eps_out[src].push(i);
        }
    }
    // enumerate simple cycles whose minimal copy is the start
    fn dfs(
        t: &RuleTransduction,
        d: &RuleDfas,
        eps_out: &[Vec<usize>],
        start: usize,
        current: usize,
        visited: &mut BTreeSet<usize>,
        path: &mut Vec<usize>,
        hit: &mut Option<(Vec<usize>, Vec<usize>, Vec<usize>)>,
    ) -> Result<()> {
        if hit.is_some() {
            return Ok(());
        }
        for &ri in &eps_out[current] {
            let dst = t.copy_index(&t.edge_rules[ri].dst).expect("checked");
            if dst == start {
                // candidate cycle: path + ri
                let mut pre = Dfa::universal(t.alphabet.clone());
                let mut suf = Dfa::universal(t.alphabet.clone());
                for &rj in path.iter().chain([&ri]) {
                    pre = pre.intersect(&d.edge_pre[rj])?;
                    suf = suf.intersect(&d.edge_suf[rj])?;
                }
                if let (Some(u), Some(v)) = (pre.shortest_word(), suf.shortest_word()) {
                    let mut rules = path.clone();
                    rules.push(ri);
                    *hit = Some((rules, u, v));
                    return Ok(());
                }
            } else if dst > start && !visited.contains(&dst) {
                visited.insert(dst);
                path.push(ri);
                dfs(t, d, eps_out, start, dst, visited, path, hit)?;
                path.pop();
                visited.remove(&dst);
            }
        }
        Ok(())
    }
    for start in 0..copies {
        let mut hit = None;
        let mut visited = BTreeSet::from([start]);
        dfs(
            t,
            d,
            &eps_out,
            start,
            start,
            &mut visited,
            &mut Vec::new(),
            &mut hit,
        )?;
        if let Some((rules, u, v)) = hit {
            let mut w = u.clone();
            w.extend(&v);
            return Ok(ConditionReport::fail(
                format!(
                    "edge rules {rules:?} form a local cycle at position {} of `{}`",
                    u.len(),
                    show_word(&t.alphabet, &w)
                ),
                Some(show_word(&t.alphabet, &w)),
            ));
        }
    }
    Ok(ConditionReport::pass())
}

// condition 7: no val at the first position
fn condition7(t: &RuleTransduction, d: &RuleDfas) -> Result<ConditionReport> {
    for (i, r) in t.vertex_rules.iter().enumerate() {
        if r.label != Label::Val {
            continue;
        }
        if d.vertex_pre[i].accepts_empty() {
            if let Some(v) = d.vertex_suf[i].shortest_word() {
                return Ok(ConditionReport::fail(
                    format!(
                        "`val` at position 0 of `{}` via vertex rule {i}",
                        show_word(&t.alphabet, &v)
                    ),
                    Some(show_word(&t.alphabet, &v)),
                ));
            }
        }
    }
    Ok(ConditionReport::pass())
}

/// Shortest word along the pruned future-past automaton that reaches the
/// given state, then (optionally) takes a transition, then completes to an
/// accepting state.
fn fp_witness(fp: &FuturePast, state: usize, step: Option<(usize, usize)>) -> Option<String> {
    // forward BFS to `state`
    let mut pred: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut seen: BTreeSet<usize> = fp.initial.iter().copied().collect();
    let mut queue: VecDeque<usize> = fp.initial.iter().copied().collect();
    while let Some(q) = queue.pop_front() {
        if q == state {
            break;
        }
        for &(f, s, to) in &fp.transitions {
            if f == q && seen.insert(to) {
                pred.insert(to, (q, s));
                queue.push_back(to);
            }
        }
    }
    if !seen.contains(&state) {
        return None;
    }
    let mut prefix = Vec::new();
    let mut q = state;
    while let Some(&(p, s)) = pred.get(&q) {
        prefix.push(s);
        q = p;
    }
    prefix.reverse();
    let mut word = prefix;
    let mut from = state;
    if let Some((sym, to)) = step {
        word.push(sym);
        from = to;
    }
    // backward BFS to a final state
    let mut back: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut seen: BTreeSet<usize> = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    let mut fin = if fp.finals.contains(&from) {
        Some(from)
    } else {
        None
    };
    while fin.is_none() {
        let q = queue.pop_front()?;
        for &(f, s, to) in &fp.transitions {
            if f == q && seen.insert(to) {
                back.insert(to, (q, s));
                if fp.finals.contains(&to) {
                    fin = Some(to);
                    break;
                }
                queue.push_back(to);
            }
        }
    }
    let mut suffix = Vec::new();
    let mut q = fin?;
    while let Some(&(p, s)) = back.get(&q) {
        suffix.push(s);
        q = p;
    }
    suffix.reverse();
    word.extend(suffix);
    Some(show_word(&fp.future.atomaton.nfa.alphabet, &word))
}

// condition 5: the arity of labels is respected, on the future-past shapes
fn condition5(t: &RuleTransduction, fp: &FuturePast) -> Result<ConditionReport> {
    // incoming argument sources for a state: ε edges always, letter edges
    // per incoming transition
    let check_state =
        |state: usize, letter_fires: &dyn Fn(usize) -> bool| -> Result<Option<String>> {
            let shape = &fp.shapes[state];
            for (&copy, label) in &shape.active {
                let want = label.arity(&t.registry)?;
                let mut per_arg: BTreeMap<usize, usize> = BTreeMap::new();
                for &ei in &shape.eps_edges {
                    let e = &t.edge_rules[ei];
                    if t.copy_index(&e.dst).expect("checked") == copy {
                        *per_arg.entry(e.arg).or_insert(0) += 1;
                    }
                }
                for &ei in &shape.in_letter_candidates {
                    let e = &t.edge_rules[ei];
                    if t.copy_index(&e.dst).expect("checked") == copy && letter_fires(ei) {
                        *per_arg.entry(e.arg).or_insert(0) += 1;
                    }
                }
                for i in 1..=want {
                    if per_arg.get(&i).copied().unwrap_or(0) != 1 {
                        return Ok(Some(format!(
                            "`{}` labeled {} gets {} edges for argument {i}",
                            t.copies[copy],
                            label,
                            per_arg.get(&i).copied().unwrap_or(0)
                        )));
                    }
                }
                if per_arg.keys().any(|&i| i == 0 || i > want) {
                    return Ok(Some(format!(
                        "`{}` labeled {} gets an argument edge beyond its arity {want}",
                        t.copies[copy], label
                    )));
                }
            }
            Ok(None)
        };

    for &s0 in &fp.initial {
        if let Some(detail) = check_state(s0, &|_| false)? {
            return Ok(ConditionReport::fail(
                format!("at the start of the input: {detail}"),
                fp_witness(fp, s0, None),
            ));
        }
    }
    for &(from, sym, to) in &fp.transitions {
        let (_, p_from) = fp.states[from];
        let (a_from, _) = fp.states[from];
        let fires = |ei: usize| -> bool {
            match edge_kind(t, ei) {
                Ok(Some(tag)) => {
                    tag == sym
                        && fp.past.holds[p_from][fp.past.edge_test[ei]]
                        && fp.future.holds[a_from][fp.future.edge_fire_test[ei]]
                }
                _ => false,
            }
        };
        if let Some(detail) = check_state(to, &fires)? {
            return Ok(ConditionReport::fail(
                detail.clone(),
                fp_witness(fp, from, Some((sym, to))),
            ));
        }
    }
    Ok(ConditionReport::pass())
}

// condition 6: global uniqueness of the sink, via a {0,1,≥2} counter
fn condition6(t: &RuleTransduction, fp: &FuturePast) -> Result<ConditionReport> {
    for (s, shape) in fp.shapes.iter().enumerate() {
        if shape.sinks.len() >= 2 {
            return Ok(ConditionReport::fail(
                format!(
                    "copies {:?} are both sinks at one position",
                    shape
                        .sinks
                        .iter()
                        .map(|&c| t.copies[c].as_str())
                        .collect::<Vec<_>>()
                ),
                fp_witness(fp, s, None),
            ));
        }
    }
    let sinks_at = |s: usize| fp.shapes[s].sinks.len().min(2) as u8;
    let mut seen: BTreeMap<(usize, u8), Option<(usize, u8, usize)>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &i in &fp.initial {
        let k = (i, sinks_at(i));
        if !seen.contains_key(&k) {
            seen.insert(k, None);
            queue.push_back(k);
        }
    }
    let mut bad: Option<(usize, u8)> = None;
    'outer: while let Some((state, count)) = queue.pop_front() {
        if fp.finals.contains(&state) && count != 1 {
            bad = Some((state, count));
            break 'outer;
        }
        for &(f, s, to) in &fp.transitions {
            if f != state {
                continue;
            }
            let c2 = (count + sinks_at(to)).min(2);
            let k = (to, c2);
            if !seen.contains_key(&k) {
                seen.insert(k, Some((state, count, s)));
                queue.push_back(k);
            }
        }
    }
    match bad {
        None => Ok(ConditionReport::pass()),
        Some((state, count)) => {
            // reconstruct the witness word
            let mut word = Vec::new();
            let mut cur = (state, count);
            while let Some(Some((p, pc, s))) = seen.get(&cur) {
                word.push(*s);
                cur = (*p, *pc);
            }
            word.reverse();
            Ok(ConditionReport::fail(
                format!(
                    "an accepting path carries {} sinks",
                    if count == 0 { "no" } else { "two or more" }
                ),
                Some(show_word(&t.alphabet, &word)),
            ))
        }
    }
}

/// Runs all seven well-formedness conditions.
pub fn check_wellformed(t: &RuleTransduction) -> Result<WellFormedness> {
    t.check_structure()?;
    let d = RuleDfas::new(t)?;
    let c1 = condition1(t, &d)?;
    let c2 = condition2(t, &d)?;
    let c3 = condition3(t, &d)?;
    let c4 = condition4(t, &d)?;
    let c7 = condition7(t, &d)?;
    // 5 and 6 need the single-step shapes; a failure of 1 or 4 can make
    // shape extraction itself impossible, in which case they inherit the
    // failure
    let (c5, c6) = if c1.ok && c4.ok {
        let ss = single_step(t)?;
        match future_past(&ss) {
            Ok(fp) => (condition5(&ss, &fp)?, condition6(&ss, &fp)?),
            Err(e) => {
                let r = ConditionReport::fail(format!("shape analysis failed: {e}"), None);
                (r.clone(), r)
            }
        }
    } else {
        let r = ConditionReport::skip("shape analysis needs conditions 1 and 4");
        (r.clone(), r)
    };
    Ok(WellFormedness {
        conditions: vec![c1, c2, c3, c4, c5, c6, c7],
    })
}

/// Is every output graph a tree? Checked pairwise on outgoing-edge rules:
/// no two rule instances may co-fire from one vertex.
pub fn is_tree(t: &RuleTransduction) -> Result<bool> {
    let d = RuleDfas::new(t)?;
    for (i, e) in t.edge_rules.iter().enumerate() {
        // one rule firing twice from the same position: the remainder
        // splits into infix·suffix in two ways
        let twice = crate::automata::ambiguous_concat_dfa(&d.edge_mid[i], &d.edge_suf[i])?;
        if !d.edge_pre[i].is_empty() && !twice.is_empty() {
            return Ok(false);
        }
        for (j, f) in t.edge_rules.iter().enumerate() {
            if j <= i || e.src != f.src {
                continue;
            }
            let pre = d.edge_pre[i].intersect(&d.edge_pre[j])?;
            if pre.is_empty() {
                continue;
            }
            let rem_i = super::Regex::concat(e.infix.clone(), e.suffix.clone());
            let rem_j = super::Regex::concat(f.infix.clone(), f.suffix.clone());
            let rem = regex_to_dfa(&rem_i, &t.alphabet)?
                .intersect(&regex_to_dfa(&rem_j, &t.alphabet)?)?;
            if !rem.is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transduction::sum_of_a_rules;

    #[test]
    fn the_running_example_is_well_formed() {
        let t = sum_of_a_rules();
        let wf = check_wellformed(&t).unwrap();
        assert!(wf.all_ok(), "{}", wf.summary());
    }

    #[test]
    fn duplicated_zero_rule_under_plus_fails_condition_1() {
        let mut t = sum_of_a_rules();
        // φ^S_0 duplicated under label +
        t.vertex_rules.push(super::super::VertexRule {
            copy: "S".into(),
            label: Label::Op("+".into()),
            prefix: crate::automata::parse_regex("eps").unwrap(),
            suffix: crate::automata::parse_regex("[AB]*").unwrap(),
        });
        let wf = check_wellformed(&t).unwrap();
        assert!(!wf.conditions[0].ok);
        assert_eq!(wf.conditions[0].witness.as_deref(), Some("ε"));
    }

    #[test]
    fn edge_from_inactive_position_fails_condition_2() {
        let mut t = sum_of_a_rules();
        // V is active only after an A; firing its edge after a B leaves
        // from an inactive vertex
        t.edge_rules[0].prefix = crate::automata::parse_regex("[AB]*B").unwrap();
        let wf = check_wellformed(&t).unwrap();
        assert!(!wf.conditions[1].ok, "{}", wf.summary());
        assert!(wf.conditions[1].witness.is_some());
    }

    #[test]
    fn the_example_is_a_tree() {
        let t = sum_of_a_rules();
        assert!(is_tree(&t).unwrap());
        let ss = crate::transduction::single_step(&t).unwrap();
        assert!(is_tree(&ss).unwrap());
    }

    #[test]
    fn duplicated_edge_at_two_indices_is_not_a_tree() {
        let mut t = sum_of_a_rules();
        let mut dup = t.edge_rules[0].clone();
        dup.arg = 1;
        // V now feeds S at both argument slots
        t.edge_rules.push(dup);
        assert!(!is_tree(&t).unwrap());
    }

    #[test]
    fn empty_rule_set_over_empty_domain_is_a_tree() {
        let t = RuleTransduction {
            alphabet: crate::automata::Alphabet::of(&["a"]),
            copies: vec![],
            domain: crate::automata::Regex::Empty,
            vertex_rules: vec![],
            edge_rules: vec![],
            registry: crate::fixtures::int_registry(&["0"]),
        };
        assert!(is_tree(&t).unwrap());
    }
}
