//! The CRA JSON file format.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automata::Alphabet;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::ops::{make_registry_seeded, RegistryDescriptor, DEFAULT_SEED};

use super::{Cra, Update};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    pub to: String,
    #[serde(default)]
    pub update: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CraJson {
    pub alphabet: Vec<String>,
    pub registers: Vec<String>,
    pub states: Vec<String>,
    pub transitions: Vec<TransitionJson>,
    pub init: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(rename = "final")]
    pub fin: BTreeMap<String, String>,
    pub registry: RegistryDescriptor,
}

impl Cra {
    pub fn to_json(&self) -> CraJson {
        let show_update = |u: &Update| -> BTreeMap<String, String> {
            u.iter()
                .filter(|(r, e)| !matches!(e, Expr::Reg(x) if &x == r))
                .map(|(r, e)| (r.clone(), e.to_string()))
                .collect()
        };
        CraJson {
            alphabet: self.alphabet.symbols().to_vec(),
            registers: self.registers.clone(),
            states: self.states.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionJson {
                    from: self.states[t.from].clone(),
                    tag: t.tag.map(|s| self.alphabet.symbol(s).to_string()),
                    to: self.states[t.to].clone(),
                    update: show_update(&t.update),
                })
                .collect(),
            init: self
                .init
                .iter()
                .map(|(q, u)| {
                    (
                        self.states[*q].clone(),
                        u.iter().map(|(r, e)| (r.clone(), e.to_string())).collect(),
                    )
                })
                .collect(),
            fin: self
                .fin
                .iter()
                .map(|(q, e)| (self.states[*q].clone(), e.to_string()))
                .collect(),
            registry: self.registry.descriptor().clone(),
        }
    }

    pub fn from_json(j: &CraJson) -> Result<Cra> {
        Self::from_json_seeded(j, DEFAULT_SEED)
    }

    pub fn from_json_seeded(j: &CraJson, seed: u64) -> Result<Cra> {
        let registry = Arc::new(make_registry_seeded(&j.registry, seed)?);
        let alphabet = Alphabet::new(j.alphabet.clone())?;
        let mut m = Cra::new(alphabet, j.registers.clone(), registry);
        for s in &j.states {
            if m.state_index(s).is_some() {
                return Err(Error::ParseError(format!("duplicate state `{s}`")));
            }
            m.add_state(s.clone());
        }
        let states = j.states.clone();
        let state = move |name: &str| -> Result<usize> {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::ParseError(format!("unknown state `{name}`")))
        };
        let parse_update = |u: &BTreeMap<String, String>| -> Result<Update> {
            let mut out = Update::new();
            for (r, src) in u {
                if !j.registers.contains(r) {
                    return Err(Error::UnboundRegister(r.clone()));
                }
                out.insert(r.clone(), parse_expr(src, &j.registers)?);
            }
            Ok(out)
        };
        for t in &j.transitions {
            let from = state(&t.from)?;
            let to = state(&t.to)?;
            m.add_transition(from, t.tag.as_deref(), parse_update(&t.update)?, to)?;
        }
        for (q, u) in &j.init {
            let q = state(q)?;
            m.set_init(q, parse_update(u)?);
        }
        for (q, e) in &j.fin {
            let q = state(q)?;
            let expr = parse_expr(e, &j.registers)?;
            m.set_final(q, expr);
        }
        m.check_invariants()?;
        Ok(m)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("machine serialization")
    }

    pub fn from_json_str(s: &str) -> Result<Cra> {
        let j: CraJson =
            serde_json::from_str(s).map_err(|e| Error::ParseError(e.to_string()))?;
        Cra::from_json(&j)
    }
}

#[cfg(test)]
mod tests {
    use crate::cra::{eval_stream, Cra};
    use crate::fixtures;
    use crate::value::Value;

    #[test]
    fn machine_round_trips_through_json() {
        for m in [
            fixtures::sum_machine(),
            fixtures::block_max_machine(),
            fixtures::drawdown_machine(),
            fixtures::end_letter_blocks_machine(),
        ] {
            let text = m.to_json_string();
            let back = Cra::from_json_str(&text).unwrap();
            assert_eq!(back.to_json_string(), text);
            let d1 = m.validate();
            let d2 = back.validate();
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn parsed_machine_still_evaluates() {
        let m = fixtures::sum_machine();
        let back = Cra::from_json_str(&m.to_json_string()).unwrap();
        let (out, _) = eval_stream(
            &back,
            vec![
                ("a".to_string(), Value::int(3)),
                ("a".to_string(), Value::int(4)),
            ],
        )
        .unwrap();
        assert_eq!(out, Some(Value::int(7)));
    }

    #[test]
    fn serialization_is_deterministic() {
        let a = fixtures::drawdown_machine().canonicalize().to_json_string();
        let b = fixtures::drawdown_machine().canonicalize().to_json_string();
        assert_eq!(a, b);
    }
}
