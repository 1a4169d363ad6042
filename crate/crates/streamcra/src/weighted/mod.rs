//! Weighted automata over semirings, and the algebras behind the adapter
//! value domains.
//!
//! Semirings and monoids are presets selected by name. The lifted free
//! monoid is a genuine idempotent semiring (length-lexicographic max as
//! addition) whose zero is the extended `inf` value; on unambiguous
//! machines the addition never has to arbitrate between two nonzero values,
//! so the monoid semantics is preserved exactly.

use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::{is_unambiguous, Alphabet, Nfa};
use crate::error::{Error, Result};
use crate::ops::{AlgebraicTags, Operation, LAW_CHECK_SAMPLES};
use crate::value::Value;

pub mod json;
mod translate;
pub use translate::{
    copyless_ucra_to_uwa, cra_to_wa, linear_normalize, uwa_to_copyless_ucra, wa_to_cra,
    LinearForm,
};

type Sampler = Arc<dyn Fn(&mut ChaCha8Rng) -> Value + Send + Sync>;
type Predicate = Arc<dyn Fn(&Value) -> bool + Send + Sync>;
type CarrierParser = Arc<dyn Fn(&str) -> Result<Value> + Send + Sync>;

/// A semiring (D, +, ·, 0, 1). Laws are validated with seeded randomized
/// checks when a preset is instantiated.
#[derive(Clone)]
pub struct Semiring {
    name: String,
    plus: Operation,
    times: Operation,
    zero: Value,
    one: Value,
    sampler: Sampler,
    membership: Predicate,
    parser: CarrierParser,
    generators: Vec<String>,
}

impl fmt::Debug for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Semiring({})", self.name)
    }
}

impl PartialEq for Semiring {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.generators == other.generators
    }
}

impl Semiring {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn plus(&self) -> &Operation {
        &self.plus
    }

    pub fn times(&self) -> &Operation {
        &self.times
    }

    pub fn zero(&self) -> &Value {
        &self.zero
    }

    pub fn one(&self) -> &Value {
        &self.one
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn contains(&self, v: &Value) -> bool {
        (self.membership)(v)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        (self.sampler)(rng)
    }

    pub fn parse_carrier(&self, lit: &str) -> Result<Value> {
        (self.parser)(lit)
    }

    pub fn add(&self, a: &Value, b: &Value) -> Value {
        self.plus.apply(&[a.clone(), b.clone()]).expect("binary plus")
    }

    pub fn mul(&self, a: &Value, b: &Value) -> Value {
        self.times.apply(&[a.clone(), b.clone()]).expect("binary times")
    }

    /// The unary right-multiplication (- · d) as an operation.
    pub fn right_mult(&self, name: &str, d: Value) -> Operation {
        let times = self.times.clone();
        let dd = d.clone();
        Operation::new(name, 1, move |args| {
            times
                .apply(&[args[0].clone(), dd.clone()])
                .expect("right multiplication")
        })
        .with_tags(AlgebraicTags {
            right_mult_const: Some(d),
            ..AlgebraicTags::default()
        })
    }

    /// Randomized validation of the semiring laws.
    pub fn validate(&self, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fail = |law: &str, detail: String| Error::LawCheckFailed {
            op: self.name.clone(),
            law: law.into(),
            detail,
        };
        for _ in 0..LAW_CHECK_SAMPLES {
            let a = self.sample(&mut rng);
            let b = self.sample(&mut rng);
            let c = self.sample(&mut rng);
            if self.add(&a, &b) != self.add(&b, &a) {
                return Err(fail("plus-commutative", format!("{a}, {b}")));
            }
            if self.add(&self.add(&a, &b), &c) != self.add(&a, &self.add(&b, &c)) {
                return Err(fail("plus-associative", format!("{a}, {b}, {c}")));
            }
            if self.add(&a, &self.zero) != a || self.add(&self.zero, &a) != a {
                return Err(fail("plus-identity", format!("{a}")));
            }
            if self.mul(&self.mul(&a, &b), &c) != self.mul(&a, &self.mul(&b, &c)) {
                return Err(fail("times-associative", format!("{a}, {b}, {c}")));
            }
            if self.mul(&a, &self.one) != a || self.mul(&self.one, &a) != a {
                return Err(fail("times-identity", format!("{a}")));
            }
            if self.mul(&a, &self.zero) != self.zero || self.mul(&self.zero, &a) != self.zero {
                return Err(fail("times-absorbing", format!("{a}")));
            }
            if self.mul(&a, &self.add(&b, &c)) != self.add(&self.mul(&a, &b), &self.mul(&a, &c)) {
                return Err(fail("left-distributive", format!("{a}, {b}, {c}")));
            }
            if self.mul(&self.add(&a, &b), &c) != self.add(&self.mul(&a, &c), &self.mul(&b, &c)) {
                return Err(fail("right-distributive", format!("{a}, {b}, {c}")));
            }
        }
        Ok(())
    }
}

/// A monoid (D, ·, 1) with randomized law checks at construction.
#[derive(Clone)]
pub struct Monoid {
    name: String,
    dot: Operation,
    one: Value,
    sampler: Sampler,
    membership: Predicate,
    parser: CarrierParser,
    generators: Vec<String>,
}

impl fmt::Debug for Monoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monoid({})", self.name)
    }
}

impl Monoid {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dot(&self) -> &Operation {
        &self.dot
    }

    pub fn one(&self) -> &Value {
        &self.one
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn contains(&self, v: &Value) -> bool {
        (self.membership)(v)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        (self.sampler)(rng)
    }

    pub fn parse_carrier(&self, lit: &str) -> Result<Value> {
        (self.parser)(lit)
    }

    pub fn mul(&self, a: &Value, b: &Value) -> Value {
        self.dot.apply(&[a.clone(), b.clone()]).expect("binary dot")
    }

    pub fn right_mult(&self, name: &str, d: Value) -> Operation {
        let dot = self.dot.clone();
        let dd = d.clone();
        Operation::new(name, 1, move |args| {
            dot.apply(&[args[0].clone(), dd.clone()])
                .expect("right multiplication")
        })
        .with_tags(AlgebraicTags {
            right_mult_const: Some(d),
            ..AlgebraicTags::default()
        })
    }

    /// The multiplicative monoid of a semiring.
    pub fn times_of(s: &Arc<Semiring>) -> Monoid {
        let sr = s.clone();
        let sr2 = s.clone();
        let sr3 = s.clone();
        Monoid {
            name: format!("times:{}", s.name()),
            dot: s.times().clone(),
            one: s.one().clone(),
            sampler: Arc::new(move |rng| sr.sample(rng)),
            membership: Arc::new(move |v| sr2.contains(v)),
            parser: Arc::new(move |lit| sr3.parse_carrier(lit)),
            generators: s.generators().to_vec(),
        }
    }

    pub fn validate(&self, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..LAW_CHECK_SAMPLES {
            let a = self.sample(&mut rng);
            let b = self.sample(&mut rng);
            let c = self.sample(&mut rng);
            if self.mul(&self.mul(&a, &b), &c) != self.mul(&a, &self.mul(&b, &c)) {
                return Err(Error::LawCheckFailed {
                    op: self.name.clone(),
                    law: "dot-associative".into(),
                    detail: format!("{a}, {b}, {c}"),
                });
            }
            if self.mul(&a, &self.one) != a || self.mul(&self.one, &a) != a {
                return Err(Error::LawCheckFailed {
                    op: self.name.clone(),
                    law: "dot-identity".into(),
                    detail: format!("{a}"),
                });
            }
        }
        Ok(())
    }
}

fn int_of(v: &Value) -> &BigInt {
    match v {
        Value::Int(i) => i,
        other => panic!("expected integer weight, got {other}"),
    }
}

fn nat_arith() -> Semiring {
    Semiring {
        name: "nat-arith".into(),
        plus: Operation::new("+", 2, |a| Value::Int(int_of(&a[0]) + int_of(&a[1]))).with_tags(
            AlgebraicTags {
                associative: true,
                commutative: true,
                identity: Some(Value::int(0)),
                ..AlgebraicTags::default()
            },
        ),
        times: Operation::new("times", 2, |a| Value::Int(int_of(&a[0]) * int_of(&a[1])))
            .with_tags(AlgebraicTags {
                associative: true,
                commutative: true,
                identity: Some(Value::int(1)),
                absorbing: Some(Value::int(0)),
                ..AlgebraicTags::default()
            }),
        zero: Value::int(0),
        one: Value::int(1),
        sampler: Arc::new(|rng| Value::int(rng.gen_range(0..=9))),
        membership: Arc::new(|v| matches!(v, Value::Int(_))),
        parser: Arc::new(|lit| match Value::parse_literal(lit)? {
            v @ Value::Int(_) => Ok(v),
            other => Err(Error::ParseError(format!("`{other}` is not a nat-arith weight"))),
        }),
        generators: Vec::new(),
    }
}

/// Tropical (min, +) over the integers extended with `inf`. The zero is
/// `inf` and the one is 0.
fn tropical() -> Semiring {
    fn min_t(a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Inf, x) | (x, Value::Inf) => x.clone(),
            (Value::Int(x), Value::Int(y)) => Value::Int(x.min(y).clone()),
            (x, y) => panic!("tropical min on {x}, {y}"),
        }
    }
    fn add_t(a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Inf, _) | (_, Value::Inf) => Value::Inf,
            (Value::Int(x), Value::Int(y)) => Value::Int(x + y),
            (x, y) => panic!("tropical plus on {x}, {y}"),
        }
    }
    Semiring {
        name: "tropical".into(),
        plus: Operation::new("+", 2, |a| min_t(&a[0], &a[1])).with_tags(AlgebraicTags {
            associative: true,
            commutative: true,
            identity: Some(Value::Inf),
            ..AlgebraicTags::default()
        }),
        times: Operation::new("times", 2, |a| add_t(&a[0], &a[1])).with_tags(AlgebraicTags {
            associative: true,
            commutative: true,
            identity: Some(Value::int(0)),
            absorbing: Some(Value::Inf),
            ..AlgebraicTags::default()
        }),
        zero: Value::Inf,
        one: Value::int(0),
        sampler: Arc::new(|rng| {
            if rng.gen_range(0..8) == 0 {
                Value::Inf
            } else {
                Value::int(rng.gen_range(-5..=9))
            }
        }),
        membership: Arc::new(|v| matches!(v, Value::Int(_) | Value::Inf)),
        parser: Arc::new(|lit| match Value::parse_literal(lit)? {
            v @ (Value::Int(_) | Value::Inf) => Ok(v),
            other => Err(Error::ParseError(format!("`{other}` is not a tropical weight"))),
        }),
        generators: Vec::new(),
    }
}

/// The free monoid over an alphabet, lifted to a semiring by adjoining a
/// formal zero (`inf`) and taking length-lexicographic maximum as addition.
fn free_lifted(letters: &[String]) -> Result<Semiring> {
    for l in letters {
        if l.chars().count() != 1 {
            return Err(Error::ParseError(format!(
                "free monoid generators must be single characters, got `{l}`"
            )));
        }
    }
    let gens: Vec<char> = letters.iter().map(|l| l.chars().next().unwrap()).collect();
    fn len_lex_max(a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Inf, x) | (x, Value::Inf) => x.clone(),
            (Value::Str(x), Value::Str(y)) => {
                if (x.chars().count(), x) >= (y.chars().count(), y) {
                    Value::Str(x.clone())
                } else {
                    Value::Str(y.clone())
                }
            }
            (x, y) => panic!("free-monoid plus on {x}, {y}"),
        }
    }
    fn cat(a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Inf, _) | (_, Value::Inf) => Value::Inf,
            (Value::Str(x), Value::Str(y)) => Value::Str(format!("{x}{y}")),
            (x, y) => panic!("free-monoid concat on {x}, {y}"),
        }
    }
    let sample_gens = gens.clone();
    let member_gens = gens.clone();
    let parse_gens = gens.clone();
    Ok(Semiring {
        name: "free".into(),
        plus: Operation::new("+", 2, |a| len_lex_max(&a[0], &a[1])).with_tags(AlgebraicTags {
            associative: true,
            commutative: true,
            identity: Some(Value::Inf),
            ..AlgebraicTags::default()
        }),
        times: Operation::new("times", 2, |a| cat(&a[0], &a[1])).with_tags(AlgebraicTags {
            associative: true,
            identity: Some(Value::str("")),
            absorbing: Some(Value::Inf),
            ..AlgebraicTags::default()
        }),
        zero: Value::Inf,
        one: Value::str(""),
        sampler: Arc::new(move |rng| {
            if rng.gen_range(0..8) == 0 {
                return Value::Inf;
            }
            let len = rng.gen_range(0..=4);
            Value::Str(
                (0..len)
                    .map(|_| sample_gens[rng.gen_range(0..sample_gens.len())])
                    .collect(),
            )
        }),
        membership: Arc::new(move |v| match v {
            Value::Inf => true,
            Value::Str(w) => w.chars().all(|c| member_gens.contains(&c)),
            _ => false,
        }),
        parser: Arc::new(move |lit| {
            if lit == "inf" {
                return Ok(Value::Inf);
            }
            let w = if lit == "eps" { "" } else { lit };
            if w.chars().all(|c| parse_gens.contains(&c)) {
                Ok(Value::str(w))
            } else {
                Err(Error::ParseError(format!(
                    "`{lit}` is not a word over the declared generators"
                )))
            }
        }),
        generators: letters.to_vec(),
    })
}

/// Looks a semiring preset up by name, validating its laws.
pub fn semiring_by_name(name: &str, alphabet: Option<&[String]>) -> Result<Arc<Semiring>> {
    let s = match name {
        "nat-arith" => nat_arith(),
        "tropical" => tropical(),
        "free" => free_lifted(alphabet.ok_or_else(|| {
            Error::ParseError("the free semiring needs an `alphabet` field".into())
        })?)?,
        other => return Err(Error::UnknownDomain(format!("semiring `{other}`"))),
    };
    s.validate(crate::ops::DEFAULT_SEED)?;
    Ok(Arc::new(s))
}

/// Looks a monoid preset up by name: `free`, or `times:<semiring>` for the
/// multiplicative monoid of a semiring preset.
pub fn monoid_by_name(name: &str, alphabet: Option<&[String]>) -> Result<Arc<Monoid>> {
    let m = if name == "free" {
        let s = semiring_by_name("free", alphabet)?;
        let mut m = Monoid::times_of(&s);
        // the free monoid itself has no formal zero
        m.name = "free".into();
        let gens: Vec<char> = s
            .generators()
            .iter()
            .map(|l| l.chars().next().unwrap())
            .collect();
        let member_gens = gens.clone();
        m.membership = Arc::new(move |v| match v {
            Value::Str(w) => w.chars().all(|c| member_gens.contains(&c)),
            _ => false,
        });
        let sample_gens = gens;
        m.sampler = Arc::new(move |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(0..=4);
            Value::Str(
                (0..len)
                    .map(|_| sample_gens[rng.gen_range(0..sample_gens.len())])
                    .collect(),
            )
        });
        m
    } else if let Some(sname) = name.strip_prefix("times:") {
        Monoid::times_of(&semiring_by_name(sname, alphabet)?)
    } else {
        return Err(Error::UnknownDomain(format!("monoid `{name}`")));
    };
    m.validate(crate::ops::DEFAULT_SEED)?;
    Ok(Arc::new(m))
}

/// The semiring preset that matches a monoid, for embedding unambiguous
/// monoid-weighted machines into the semiring-weighted model.
pub fn lift_monoid(m: &Monoid) -> Result<Arc<Semiring>> {
    if m.name() == "free" {
        semiring_by_name("free", Some(m.generators()))
    } else if let Some(sname) = m.name().strip_prefix("times:") {
        let gens = m.generators().to_vec();
        semiring_by_name(sname, if gens.is_empty() { None } else { Some(&gens) })
    } else {
        Err(Error::UnknownDomain(format!(
            "no semiring lifting for monoid `{}`",
            m.name()
        )))
    }
}

/// A weighted automaton over a semiring: a total transition weighting plus
/// initial and final weight vectors.
#[derive(Debug, Clone)]
pub struct WeightedAutomaton {
    pub semiring: Arc<Semiring>,
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    /// weight[sym][from][to]
    pub weights: Vec<Vec<Vec<Value>>>,
    pub init: Vec<Value>,
    pub fin: Vec<Value>,
}

impl WeightedAutomaton {
    pub fn new(semiring: Arc<Semiring>, alphabet: Alphabet, states: Vec<String>) -> Self {
        let n = states.len();
        let zero = semiring.zero().clone();
        WeightedAutomaton {
            weights: vec![vec![vec![zero.clone(); n]; n]; alphabet.len()],
            init: vec![zero.clone(); n],
            fin: vec![zero; n],
            semiring,
            alphabet,
            states,
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn set_weight(&mut self, from: usize, sym: usize, to: usize, w: Value) {
        self.weights[sym][from][to] = w;
    }

    pub fn weight(&self, from: usize, sym: usize, to: usize) -> &Value {
        &self.weights[sym][from][to]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// The weight of a word: the initial row vector times the transition
    /// matrices times the final column vector.
    pub fn eval(&self, word: &[usize]) -> Value {
        let s = &self.semiring;
        let n = self.state_count();
        let mut row = self.init.clone();
        for &sym in word {
            let m = &self.weights[sym];
            let mut next = vec![s.zero().clone(); n];
            for (j, slot) in next.iter_mut().enumerate() {
                let mut acc = s.zero().clone();
                for i in 0..n {
                    acc = s.add(&acc, &s.mul(&row[i], &m[i][j]));
                }
                *slot = acc;
            }
            row = next;
        }
        let mut acc = s.zero().clone();
        for i in 0..n {
            acc = s.add(&acc, &s.mul(&row[i], &self.fin[i]));
        }
        acc
    }

    /// Explicit sum over all paths; the definitional oracle for `eval`.
    pub fn path_oracle(&self, word: &[usize], bound: usize) -> Result<Value> {
        let n = self.state_count();
        let paths = (n as f64).powi(word.len() as i32 + 1);
        if paths > bound as f64 {
            return Err(Error::BoundExceeded(format!(
                "{paths} paths exceed the enumeration bound {bound}"
            )));
        }
        let s = &self.semiring;
        let mut total = s.zero().clone();
        let mut stack: Vec<(usize, usize, Value)> = (0..n)
            .map(|q| (q, 0usize, self.init[q].clone()))
            .collect();
        while let Some((q, pos, acc)) = stack.pop() {
            if pos == word.len() {
                total = s.add(&total, &s.mul(&acc, &self.fin[q]));
                continue;
            }
            for t in 0..n {
                let w = &self.weights[word[pos]][q][t];
                stack.push((t, pos + 1, s.mul(&acc, w)));
            }
        }
        Ok(total)
    }

    /// The support NFA: transitions with nonzero weight, initial and final
    /// states with nonzero entry.
    pub fn support_nfa(&self) -> Nfa {
        let mut nfa = Nfa::new(self.alphabet.clone(), self.state_count());
        let zero = self.semiring.zero();
        for (q, w) in self.init.iter().enumerate() {
            if w != zero {
                nfa.initial.push(q);
            }
        }
        for (q, w) in self.fin.iter().enumerate() {
            if w != zero {
                nfa.finals.insert(q);
            }
        }
        for (sym, m) in self.weights.iter().enumerate() {
            for (f, row) in m.iter().enumerate() {
                for (t, w) in row.iter().enumerate() {
                    if w != zero {
                        nfa.add_transition(f, Some(sym), t);
                    }
                }
            }
        }
        nfa
    }

    /// At most one successful path per word?
    pub fn is_unambiguous(&self) -> Result<bool> {
        is_unambiguous(&self.support_nfa())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::of(&["a", "b"])
    }

    /// Counts occurrences of "ab" as a factor via a (ℕ, +, ×) automaton.
    fn factor_counter() -> WeightedAutomaton {
        let s = semiring_by_name("nat-arith", None).unwrap();
        let alpha = ab();
        let mut wa = WeightedAutomaton::new(
            s,
            alpha.clone(),
            vec!["scan".into(), "a".into(), "done".into()],
        );
        let one = Value::int(1);
        // state 0 loops on everything; guess an "ab" and move to state 2
        wa.set_weight(0, 0, 0, one.clone());
        wa.set_weight(0, 1, 0, one.clone());
        wa.set_weight(0, 0, 1, one.clone());
        wa.set_weight(1, 1, 2, one.clone());
        wa.set_weight(2, 0, 2, one.clone());
        wa.set_weight(2, 1, 2, one.clone());
        wa.init[0] = one.clone();
        wa.fin[2] = one;
        wa
    }

    #[test]
    fn all_zero_init_gives_zero() {
        let s = semiring_by_name("nat-arith", None).unwrap();
        let mut wa = WeightedAutomaton::new(s, ab(), vec!["q".into()]);
        wa.fin[0] = Value::int(1);
        wa.set_weight(0, 0, 0, Value::int(5));
        assert_eq!(wa.eval(&[0, 0]), Value::int(0));
    }

    #[test]
    fn abab_has_two_factors() {
        let wa = factor_counter();
        let word = wa.alphabet.word(&["a", "b", "a", "b"]).unwrap();
        assert_eq!(wa.eval(&word), Value::int(2));
        assert_eq!(wa.path_oracle(&word, 100_000).unwrap(), Value::int(2));
    }

    #[test]
    fn tropical_two_state_min() {
        let s = semiring_by_name("tropical", None).unwrap();
        let alpha = ab();
        let mut wa = WeightedAutomaton::new(s, alpha.clone(), vec!["p".into(), "q".into()]);
        wa.init[0] = Value::int(0);
        wa.fin[1] = Value::int(0);
        wa.set_weight(0, 0, 0, Value::int(3));
        wa.set_weight(0, 0, 1, Value::int(5));
        wa.set_weight(1, 0, 1, Value::int(1));
        wa.set_weight(1, 0, 0, Value::int(9));
        let word = alpha.word(&["a", "a"]).unwrap();
        // paths: 0-0-0 dead (fin 0 = inf), 0-0-1: 3+5, 0-1-1: 5+1, 0-1-0 dead
        assert_eq!(wa.eval(&word), Value::int(6));
        assert_eq!(wa.path_oracle(&word, 100_000).unwrap(), wa.eval(&word));
    }

    #[test]
    fn unsuccessful_paths_weigh_zero() {
        let s = semiring_by_name("nat-arith", None).unwrap();
        let mut wa = WeightedAutomaton::new(s, ab(), vec!["p".into(), "q".into()]);
        wa.init[0] = Value::int(1);
        // no final weight anywhere: every path is unsuccessful
        wa.set_weight(0, 0, 1, Value::int(7));
        assert_eq!(wa.eval(&[0]), Value::int(0));
    }

    #[test]
    fn ambiguity_of_support() {
        let wa = factor_counter();
        // "abab" has two successful paths
        assert!(!wa.is_unambiguous().unwrap());
        let s = semiring_by_name("nat-arith", None).unwrap();
        let mut det = WeightedAutomaton::new(s, ab(), vec!["p".into()]);
        det.init[0] = Value::int(1);
        det.fin[0] = Value::int(1);
        det.set_weight(0, 0, 0, Value::int(2));
        // zero-weight duplicate edges are ignored by the support NFA
        det.set_weight(0, 1, 0, Value::int(0));
        assert!(det.is_unambiguous().unwrap());
    }

    #[test]
    fn semiring_law_validation_works() {
        semiring_by_name("nat-arith", None).unwrap();
        semiring_by_name("tropical", None).unwrap();
        let letters = vec!["a".to_string(), "b".to_string(), "#".to_string()];
        semiring_by_name("free", Some(&letters)).unwrap();
        monoid_by_name("free", Some(&letters)).unwrap();
        monoid_by_name("times:tropical", None).unwrap();
    }
}
