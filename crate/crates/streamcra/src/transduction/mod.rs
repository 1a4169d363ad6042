//! Forward-only word-to-DAG transductions in regex-rule normal form:
//! validation, direct DAG evaluation, single-step decomposition,
//! compilation to unambiguous CRAs through the future and past automata,
//! and the converse direction from CRAs back to rules.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automata::{parse_regex, Alphabet, Regex};
use crate::error::{Error, Result};
use crate::ops::{make_registry_seeded, OperationRegistry, RegistryDescriptor, DEFAULT_SEED};

mod compile;
mod dag_eval;
pub mod dot;
mod from_cra;
mod future_past;
mod single_step;
mod wellformed;

pub use compile::compile_to_ucra;
pub use dag_eval::{dag_oracle_eval, materialize, OutputDag};
pub use from_cra::cra_to_rules;
pub use future_past::{
    future_automaton, future_past, past_automaton, FutureAutomaton, FuturePast, PastAutomaton,
    Shape,
};
pub use single_step::single_step;
pub use wellformed::{check_wellformed, is_tree, WellFormedness};

/// A vertex label: an operation of the registry, the current input value,
/// or the identity function introduced by single-step decomposition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    Op(String),
    Val,
    Id,
}

impl Label {
    pub fn parse(s: &str) -> Label {
        match s {
            "val" => Label::Val,
            "id" => Label::Id,
            other => Label::Op(other.to_string()),
        }
    }

    pub fn arity(&self, registry: &OperationRegistry) -> Result<usize> {
        match self {
            Label::Val => Ok(0),
            Label::Id => Ok(1),
            Label::Op(name) => Ok(registry.op(name)?.arity()),
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Op(name) => write!(f, "{name}"),
            Label::Val => write!(f, "val"),
            Label::Id => write!(f, "id"),
        }
    }
}

/// `label γ at c: r1; r2` — copy `c` is active with label γ at position x
/// iff the prefix up to x matches r1 and the suffix from x matches r2.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexRule {
    pub copy: String,
    pub label: Label,
    pub prefix: Regex,
    pub suffix: Regex,
}

/// `edge c →i d: r1; r2; r3` — the output DAG has an edge from copy c at
/// position x to copy d at position y (c is the i-th argument of d) iff
/// the prefix to x matches r1, the infix from x to y matches r2, and the
/// suffix from y matches r3.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRule {
    pub src: String,
    pub dst: String,
    /// 1-based argument index.
    pub arg: usize,
    pub prefix: Regex,
    pub infix: Regex,
    pub suffix: Regex,
}

/// A forward-only word-to-DAG transduction in regex-rule normal form.
#[derive(Debug, Clone)]
pub struct RuleTransduction {
    pub alphabet: Alphabet,
    pub copies: Vec<String>,
    pub domain: Regex,
    pub vertex_rules: Vec<VertexRule>,
    pub edge_rules: Vec<EdgeRule>,
    pub registry: Arc<OperationRegistry>,
}

impl RuleTransduction {
    /// The maximum arity over the labels in play (id included), which
    /// bounds the admissible edge argument indices.
    pub fn max_arity(&self) -> usize {
        let mut max = 1; // id
        for r in &self.vertex_rules {
            if let Ok(a) = r.label.arity(&self.registry) {
                max = max.max(a);
            }
        }
        max
    }

    pub fn copy_index(&self, name: &str) -> Option<usize> {
        self.copies.iter().position(|c| c == name)
    }

    /// Cheap structural checks: names resolve, regexes fit the alphabet,
    /// arg indices are in range, and rules for the same key have pairwise
    /// disjoint models.
    pub fn check_structure(&self) -> Result<()> {
        for r in &self.vertex_rules {
            if self.copy_index(&r.copy).is_none() {
                return Err(Error::ParseError(format!("unknown copy `{}`", r.copy)));
            }
            r.label.arity(&self.registry)?;
            r.prefix.check_alphabet(&self.alphabet)?;
            r.suffix.check_alphabet(&self.alphabet)?;
        }
        let imax = self.max_arity();
        for e in &self.edge_rules {
            if self.copy_index(&e.src).is_none() || self.copy_index(&e.dst).is_none() {
                return Err(Error::ParseError(format!(
                    "unknown copy in edge `{}` → `{}`",
                    e.src, e.dst
                )));
            }
            if e.arg == 0 || e.arg > imax {
                return Err(Error::ParseError(format!(
                    "edge argument index {} out of range 1..={imax}",
                    e.arg
                )));
            }
            e.prefix.check_alphabet(&self.alphabet)?;
            e.infix.check_alphabet(&self.alphabet)?;
            e.suffix.check_alphabet(&self.alphabet)?;
        }
        self.domain.check_alphabet(&self.alphabet)?;
        wellformed::check_same_key_disjoint(self)?;
        Ok(())
    }
}

// --- JSON format -------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRuleJson {
    pub copy: String,
    pub label: String,
    pub r1: String,
    pub r2: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRuleJson {
    pub src: String,
    pub dst: String,
    pub arg: usize,
    pub r1: String,
    pub r2: String,
    pub r3: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RulesJson {
    pub alphabet: Vec<String>,
    pub copies: Vec<String>,
    pub domain: String,
    pub vertex_rules: Vec<VertexRuleJson>,
    pub edge_rules: Vec<EdgeRuleJson>,
    pub registry: RegistryDescriptor,
}

impl RuleTransduction {
    pub fn from_json(j: &RulesJson) -> Result<RuleTransduction> {
        Self::from_json_seeded(j, DEFAULT_SEED)
    }

    pub fn from_json_seeded(j: &RulesJson, seed: u64) -> Result<RuleTransduction> {
        let registry = Arc::new(make_registry_seeded(&j.registry, seed)?);
        let alphabet = Alphabet::new(j.alphabet.clone())?;
        let t = RuleTransduction {
            alphabet,
            copies: j.copies.clone(),
            domain: parse_regex(&j.domain)?,
            vertex_rules: j
                .vertex_rules
                .iter()
                .map(|r| {
                    Ok(VertexRule {
                        copy: r.copy.clone(),
                        label: Label::parse(&r.label),
                        prefix: parse_regex(&r.r1)?,
                        suffix: parse_regex(&r.r2)?,
                    })
                })
                .collect::<Result<_>>()?,
            edge_rules: j
                .edge_rules
                .iter()
                .map(|e| {
                    Ok(EdgeRule {
                        src: e.src.clone(),
                        dst: e.dst.clone(),
                        arg: e.arg,
                        prefix: parse_regex(&e.r1)?,
                        infix: parse_regex(&e.r2)?,
                        suffix: parse_regex(&e.r3)?,
                    })
                })
                .collect::<Result<_>>()?,
            registry,
        };
        t.check_structure()?;
        Ok(t)
    }

    pub fn to_json(&self) -> RulesJson {
        RulesJson {
            alphabet: self.alphabet.symbols().to_vec(),
            copies: self.copies.clone(),
            domain: self.domain.to_string(),
            vertex_rules: self
                .vertex_rules
                .iter()
                .map(|r| VertexRuleJson {
                    copy: r.copy.clone(),
                    label: r.label.to_string(),
                    r1: r.prefix.to_string(),
                    r2: r.suffix.to_string(),
                })
                .collect(),
            edge_rules: self
                .edge_rules
                .iter()
                .map(|e| EdgeRuleJson {
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                    arg: e.arg,
                    r1: e.prefix.to_string(),
                    r2: e.infix.to_string(),
                    r3: e.suffix.to_string(),
                })
                .collect(),
            registry: self.registry.descriptor().clone(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<RuleTransduction> {
        let j: RulesJson =
            serde_json::from_str(s).map_err(|e| Error::ParseError(e.to_string()))?;
        RuleTransduction::from_json(&j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("rule serialization")
    }
}

/// The paper-style worked example: summing all A-tagged values over the
/// alphabet {A, B}, with copies V (values) and S (running sums).
pub fn sum_of_a_rules() -> RuleTransduction {
    let j: RulesJson = serde_json::from_value(serde_json::json!({
        "alphabet": ["A", "B"],
        "copies": ["V", "S"],
        "domain": "[AB]*",
        "vertex_rules": [
            {"copy": "V", "label": "val", "r1": "[AB]*A", "r2": "[AB]*"},
            {"copy": "S", "label": "0",   "r1": "eps",    "r2": "[AB]*"},
            {"copy": "S", "label": "+",   "r1": "[AB]*A", "r2": "[AB]*"}
        ],
        "edge_rules": [
            {"src": "V", "dst": "S", "arg": 2, "r1": "[AB]*A", "r2": "eps", "r3": "[AB]*"},
            {"src": "S", "dst": "S", "arg": 1, "r1": "eps|[AB]*A", "r2": "B*A", "r3": "[AB]*"}
        ],
        "registry": {"domain": "int", "ops": ["0", "+"]}
    }))
    .expect("fixture json");
    RuleTransduction::from_json(&j).expect("fixture rules")
}
