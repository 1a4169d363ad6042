//! The cost register automaton: finite control over tags plus write-only
//! value registers updated by registry expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::automata::{is_unambiguous, Alphabet, Nfa};
use crate::error::{Error, Result};
use crate::expr::{register_occurrences, Expr, Valuation};
use crate::ops::OperationRegistry;

mod determinize;
mod dot;
mod epsilon;
mod eval;
pub mod json;
mod product;
mod unary;

pub use determinize::ucra_to_dcra;
pub use dot::cra_to_dot;
pub use epsilon::eliminate_epsilon_cra;
pub use eval::{eval_paths_oracle, eval_stream, EvalStats, Token, DEFAULT_ORACLE_BOUND};
pub use product::product_with_dfa;
pub use unary::unary_to_copyless;

/// A parallel register assignment. Total on the machine's register set.
pub type Update = BTreeMap<String, Expr>;

#[derive(Debug, Clone, PartialEq)]
pub struct CraTransition {
    pub from: usize,
    /// Symbol index, or None for an ε-transition.
    pub tag: Option<usize>,
    pub update: Update,
    pub to: usize,
}

/// A nondeterministic, copyful cost register automaton.
#[derive(Debug, Clone)]
pub struct Cra {
    pub alphabet: Alphabet,
    pub registers: Vec<String>,
    pub states: Vec<String>,
    pub transitions: Vec<CraTransition>,
    /// Initialization: initial states mapped to closed register assignments.
    pub init: BTreeMap<usize, Update>,
    /// Finalization: final states mapped to register expressions.
    pub fin: BTreeMap<usize, Expr>,
    pub registry: Arc<OperationRegistry>,
}

/// Validator output: one flag per machine property, plus human-readable
/// notes for everything that failed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub is_deterministic: bool,
    pub is_unambiguous: bool,
    pub is_copyless: bool,
    pub is_trim: bool,
    pub arity_ok: bool,
    pub eps_free: bool,
    pub notes: Vec<String>,
}

impl Cra {
    pub fn new(
        alphabet: Alphabet,
        registers: Vec<String>,
        registry: Arc<OperationRegistry>,
    ) -> Cra {
        Cra {
            alphabet,
            registers,
            states: Vec::new(),
            transitions: Vec::new(),
            init: BTreeMap::new(),
            fin: BTreeMap::new(),
            registry,
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn register_count(&self) -> usize {
        self.registers.len()
    }

    /// Adds a transition; the update is completed to a total assignment with
    /// identity updates for missing registers.
    pub fn add_transition(
        &mut self,
        from: usize,
        tag: Option<&str>,
        update: Update,
        to: usize,
    ) -> Result<()> {
        let tag = match tag {
            Some(t) => Some(
                self.alphabet
                    .index_of(t)
                    .ok_or_else(|| Error::TagOutOfAlphabet(t.to_string()))?,
            ),
            None => None,
        };
        self.transitions.push(CraTransition {
            from,
            tag,
            update: self.complete_update(update),
            to,
        });
        Ok(())
    }

    /// Fills registers missing from an update with identity assignments.
    pub fn complete_update(&self, mut update: Update) -> Update {
        for r in &self.registers {
            update
                .entry(r.clone())
                .or_insert_with(|| Expr::Reg(r.clone()));
        }
        update
    }

    pub fn set_init(&mut self, state: usize, update: Update) {
        self.init.insert(state, update);
    }

    pub fn set_final(&mut self, state: usize, expr: Expr) {
        self.fin.insert(state, expr);
    }

    /// Structural invariants: initializations are closed and total, no `val`
    /// in finalizations or ε-updates, updates are total, ε-moves acyclic,
    /// and all state/register references resolve.
    pub fn check_invariants(&self) -> Result<()> {
        let reg_set: BTreeSet<&String> = self.registers.iter().collect();
        for (state, update) in &self.init {
            if *state >= self.states.len() {
                return Err(Error::InvalidMachine(format!("unknown initial state {state}")));
            }
            for r in &self.registers {
                match update.get(r) {
                    None => {
                        return Err(Error::InvalidMachine(format!(
                            "initialization of `{}` misses register `{r}`",
                            self.states[*state]
                        )))
                    }
                    Some(e) if !e.is_closed() => {
                        return Err(Error::InvalidMachine(format!(
                            "initialization of `{}` must be closed, got `{e}`",
                            self.states[*state]
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        for (state, expr) in &self.fin {
            if *state >= self.states.len() {
                return Err(Error::InvalidMachine(format!("unknown final state {state}")));
            }
            if expr.uses_current_val() {
                return Err(Error::InvalidMachine(format!(
                    "finalization of `{}` uses `val`",
                    self.states[*state]
                )));
            }
            if let Some(r) = expr.registers().keys().find(|r| !reg_set.contains(r)) {
                return Err(Error::UnboundRegister(r.to_string()));
            }
        }
        for t in &self.transitions {
            if t.from >= self.states.len() || t.to >= self.states.len() {
                return Err(Error::InvalidMachine("transition references unknown state".into()));
            }
            for r in &self.registers {
                let rhs = t.update.get(r).ok_or_else(|| {
                    Error::InvalidMachine(format!(
                        "update on `{}`→`{}` misses register `{r}`",
                        self.states[t.from], self.states[t.to]
                    ))
                })?;
                if t.tag.is_none() && rhs.uses_current_val() {
                    return Err(Error::InvalidMachine(format!(
                        "ε-transition `{}`→`{}` uses `val`",
                        self.states[t.from], self.states[t.to]
                    )));
                }
                if let Some(x) = rhs.registers().keys().find(|x| !reg_set.contains(x)) {
                    return Err(Error::UnboundRegister(x.to_string()));
                }
            }
        }
        // ε-cycles are forbidden
        let mut eps = Nfa::new(self.alphabet.clone(), self.states.len());
        for t in &self.transitions {
            if t.tag.is_none() {
                eps.add_transition(t.from, None, t.to);
            }
        }
        crate::automata::eliminate_epsilon(&eps).map(|_| ())
    }

    /// The tag projection: the underlying NFA with updates erased. Its
    /// accepted language is the machine's rate.
    pub fn rate(&self) -> Nfa {
        let mut nfa = Nfa::new(self.alphabet.clone(), self.states.len());
        nfa.initial = self.init.keys().copied().collect();
        nfa.finals = self.fin.keys().copied().collect();
        for t in &self.transitions {
            nfa.add_transition(t.from, t.tag, t.to);
        }
        nfa
    }

    pub fn has_epsilon(&self) -> bool {
        self.transitions.iter().any(|t| t.tag.is_none())
    }

    /// Computes the validator flags.
    pub fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::default();
        let mut notes = Vec::new();

        d.eps_free = !self.has_epsilon();

        // determinism: syntactic, on the underlying automaton
        let mut by_state_tag: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut det = self.init.len() <= 1 && d.eps_free;
        for t in &self.transitions {
            if let Some(tag) = t.tag {
                let n = by_state_tag.entry((t.from, tag)).or_insert(0);
                *n += 1;
                if *n > 1 {
                    det = false;
                }
            }
        }
        if !det {
            notes.push("not deterministic".into());
        }
        d.is_deterministic = det;

        d.is_unambiguous = match is_unambiguous(&self.rate()) {
            Ok(b) => {
                if !b {
                    notes.push("some word has two accepting runs".into());
                }
                b
            }
            Err(e) => {
                notes.push(format!("unambiguity check failed: {e}"));
                false
            }
        };

        // copylessness: every transition update and every finalization
        let mut copyless = true;
        for t in &self.transitions {
            let occ = register_occurrences(&t.update);
            for (r, n) in occ {
                if n > 1 {
                    copyless = false;
                    notes.push(format!(
                        "register `{r}` used {n} times in the update on `{}`→`{}`",
                        self.states[t.from], self.states[t.to]
                    ));
                }
            }
        }
        for (state, expr) in &self.fin {
            for (r, n) in expr.registers() {
                if n > 1 {
                    copyless = false;
                    notes.push(format!(
                        "register `{r}` used {n} times in the finalization of `{}`",
                        self.states[*state]
                    ));
                }
            }
        }
        d.is_copyless = copyless;

        // trimness
        let rate = self.rate();
        let reach = rate.reachable();
        let coreach = rate.coreachable();
        let mut trim = true;
        for q in 0..self.states.len() {
            if !reach.contains(&q) || !coreach.contains(&q) {
                trim = false;
                notes.push(format!("state `{}` is not trim", self.states[q]));
            }
        }
        d.is_trim = trim;

        // arities against the registry
        let mut arity_ok = true;
        let mut check = |e: &Expr| {
            if let Err(err) = e.check_arities(&self.registry) {
                arity_ok = false;
                notes.push(err.to_string());
            }
        };
        for t in &self.transitions {
            t.update.values().for_each(&mut check);
        }
        self.init.values().flat_map(|u| u.values()).for_each(&mut check);
        self.fin.values().for_each(&mut check);
        d.arity_ok = arity_ok;

        d.notes = notes;
        d
    }

    /// Removes states that are unreachable or cannot reach a final state.
    /// The computed transduction is unchanged.
    pub fn trim(&self) -> Cra {
        let rate = self.rate();
        let reach = rate.reachable();
        let coreach = rate.coreachable();
        let keep: Vec<usize> = (0..self.states.len())
            .filter(|q| reach.contains(q) && coreach.contains(q))
            .collect();
        let remap: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        Cra {
            alphabet: self.alphabet.clone(),
            registers: self.registers.clone(),
            states: keep.iter().map(|&q| self.states[q].clone()).collect(),
            transitions: self
                .transitions
                .iter()
                .filter(|t| remap.contains_key(&t.from) && remap.contains_key(&t.to))
                .map(|t| CraTransition {
                    from: remap[&t.from],
                    tag: t.tag,
                    update: t.update.clone(),
                    to: remap[&t.to],
                })
                .collect(),
            init: self
                .init
                .iter()
                .filter_map(|(q, u)| remap.get(q).map(|&n| (n, u.clone())))
                .collect(),
            fin: self
                .fin
                .iter()
                .filter_map(|(q, e)| remap.get(q).map(|&n| (n, e.clone())))
                .collect(),
            registry: self.registry.clone(),
        }
    }

    /// Renumbers states in BFS order from the initial states (tags in
    /// alphabet order), so that structurally equal machines serialize
    /// byte-identically.
    pub fn canonicalize(&self) -> Cra {
        let mut order: Vec<usize> = Vec::new();
        let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
        for &q in self.init.keys() {
            if !pos.contains_key(&q) {
                pos.insert(q, order.len());
                order.push(q);
            }
        }
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            let mut outs: Vec<(Option<usize>, usize, usize)> = self
                .transitions
                .iter()
                .enumerate()
                .filter(|(_, t)| t.from == q)
                .map(|(idx, t)| (t.tag, t.to, idx))
                .collect();
            outs.sort_by_key(|&(tag, to, idx)| (tag.map_or(-1i64, |t| t as i64), to, idx));
            for (_, to, _) in outs {
                if !pos.contains_key(&to) {
                    pos.insert(to, order.len());
                    order.push(to);
                }
            }
            i += 1;
        }
        // unreachable states go last, in original order
        for q in 0..self.states.len() {
            if !pos.contains_key(&q) {
                pos.insert(q, order.len());
                order.push(q);
            }
        }
        let mut out = Cra {
            alphabet: self.alphabet.clone(),
            registers: self.registers.clone(),
            states: order.iter().map(|&q| self.states[q].clone()).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| CraTransition {
                    from: pos[&t.from],
                    tag: t.tag,
                    update: t.update.clone(),
                    to: pos[&t.to],
                })
                .collect(),
            init: self.init.iter().map(|(q, u)| (pos[q], u.clone())).collect(),
            fin: self.fin.iter().map(|(q, e)| (pos[q], e.clone())).collect(),
            registry: self.registry.clone(),
        };
        out.transitions
            .sort_by(|a, b| (a.from, a.tag, a.to).cmp(&(b.from, b.tag, b.to)));
        out
    }

    /// Evaluates one initialization to a concrete valuation.
    pub(crate) fn init_valuation(&self, state: usize) -> Result<Valuation> {
        let update = self
            .init
            .get(&state)
            .ok_or_else(|| Error::InvalidMachine(format!("state {state} is not initial")))?;
        let mut env = Valuation::new();
        let empty = Valuation::new();
        for (r, e) in update {
            env.set(r.clone(), crate::expr::eval_expr(e, &empty, None, &self.registry)?);
        }
        Ok(env)
    }
}

#[cfg(test)]
mod tests {
    use crate::fixtures;

    #[test]
    fn sum_machine_is_deterministic_and_copyless() {
        let m = fixtures::sum_machine();
        m.check_invariants().unwrap();
        let d = m.validate();
        assert!(d.is_deterministic);
        assert!(d.is_copyless);
        assert!(d.is_unambiguous);
        assert!(d.is_trim);
        assert!(d.arity_ok);
    }

    #[test]
    fn drawdown_machine_is_unambiguous_but_copyful() {
        let m = fixtures::drawdown_machine();
        m.check_invariants().unwrap();
        let d = m.validate();
        assert!(d.is_unambiguous);
        assert!(!d.is_copyless);
        assert!(!d.is_deterministic); // p has two a-successors
    }

    #[test]
    fn machine_with_unreachable_state_is_not_trim() {
        let mut m = fixtures::sum_machine();
        m.add_state("island");
        let d = m.validate();
        assert!(!d.is_trim);
        let trimmed = m.trim();
        assert_eq!(trimmed.state_count(), 3);
        assert!(trimmed.validate().is_trim);
    }

    #[test]
    fn rate_of_sum_machine_is_nonempty_words() {
        let m = fixtures::sum_machine();
        let rate = crate::automata::nfa_to_min_dfa(&m.rate()).unwrap();
        let alpha = m.alphabet.clone();
        let want = crate::automata::regex_to_dfa(
            &crate::automata::parse_regex("[ab]+").unwrap(),
            &alpha,
        )
        .unwrap();
        assert!(rate.language_equal(&want).unwrap());
    }

    #[test]
    fn rate_of_block_machine_is_block_regex() {
        let m = fixtures::block_max_machine();
        let rate = crate::automata::nfa_to_min_dfa(&m.rate()).unwrap();
        let want = crate::automata::regex_to_dfa(
            &crate::automata::parse_regex("(a+#)*").unwrap(),
            &m.alphabet,
        )
        .unwrap();
        assert!(rate.language_equal(&want).unwrap());
    }

    #[test]
    fn empty_init_means_empty_rate() {
        let mut m = fixtures::sum_machine();
        m.init.clear();
        let rate = crate::automata::nfa_to_min_dfa(&m.rate()).unwrap();
        assert!(rate.is_empty());
    }
}
