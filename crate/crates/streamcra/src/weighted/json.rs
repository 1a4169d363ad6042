//! The weighted-automaton JSON format. Omitted weights default to the
//! semiring zero.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::automata::Alphabet;
use crate::error::{Error, Result};
use crate::value::Value;

use super::{semiring_by_name, WeightedAutomaton};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightJson {
    pub from: String,
    pub tag: String,
    pub to: String,
    pub w: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaJson {
    pub semiring: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet_letters: Option<Vec<String>>,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    #[serde(default)]
    pub weights: Vec<WeightJson>,
    #[serde(default)]
    pub init: BTreeMap<String, serde_json::Value>,
    #[serde(rename = "final", default)]
    pub fin: BTreeMap<String, serde_json::Value>,
}

impl WeightedAutomaton {
    pub fn from_json(j: &WaJson) -> Result<WeightedAutomaton> {
        let semiring = semiring_by_name(j.semiring.as_str(), j.alphabet_letters.as_deref())?;
        let alphabet = Alphabet::new(j.alphabet.clone())?;
        let mut wa = WeightedAutomaton::new(semiring.clone(), alphabet, j.states.clone());
        let state = |name: &str| -> Result<usize> {
            j.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::ParseError(format!("unknown state `{name}`")))
        };
        let weight = |v: &serde_json::Value| -> Result<Value> {
            let parsed = Value::from_json(v)?;
            let parsed = match parsed {
                Value::Str(s) => semiring.parse_carrier(&s)?,
                other => other,
            };
            if !semiring.contains(&parsed) {
                return Err(Error::ValueOutOfDomain(parsed.to_string()));
            }
            Ok(parsed)
        };
        for w in &j.weights {
            let sym = wa
                .alphabet
                .index_of(&w.tag)
                .ok_or_else(|| Error::TagOutOfAlphabet(w.tag.clone()))?;
            wa.set_weight(state(&w.from)?, sym, state(&w.to)?, weight(&w.w)?);
        }
        for (q, v) in &j.init {
            wa.init[state(q)?] = weight(v)?;
        }
        for (q, v) in &j.fin {
            wa.fin[state(q)?] = weight(v)?;
        }
        Ok(wa)
    }

    pub fn to_json(&self) -> WaJson {
        let zero = self.semiring.zero();
        let show = |v: &Value| -> serde_json::Value {
            match v {
                Value::Str(s) if s.is_empty() => serde_json::Value::from("eps"),
                other => other.to_json(),
            }
        };
        let mut weights = Vec::new();
        for (sym, m) in self.weights.iter().enumerate() {
            for (f, row) in m.iter().enumerate() {
                for (t, w) in row.iter().enumerate() {
                    if w != zero {
                        weights.push(WeightJson {
                            from: self.states[f].clone(),
                            tag: self.alphabet.symbol(sym).to_string(),
                            to: self.states[t].clone(),
                            w: show(w),
                        });
                    }
                }
            }
        }
        WaJson {
            semiring: self.semiring.name().to_string(),
            alphabet_letters: if self.semiring.generators().is_empty() {
                None
            } else {
                Some(self.semiring.generators().to_vec())
            },
            alphabet: self.alphabet.symbols().to_vec(),
            states: self.states.clone(),
            weights,
            init: self
                .init
                .iter()
                .enumerate()
                .filter(|(_, w)| *w != zero)
                .map(|(q, w)| (self.states[q].clone(), show(w)))
                .collect(),
            fin: self
                .fin
                .iter()
                .enumerate()
                .filter(|(_, w)| *w != zero)
                .map(|(q, w)| (self.states[q].clone(), show(w)))
                .collect(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<WeightedAutomaton> {
        let j: WaJson = serde_json::from_str(s).map_err(|e| Error::ParseError(e.to_string()))?;
        WeightedAutomaton::from_json(&j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("wa serialization")
    }
}

#[cfg(test)]
mod tests {
    use crate::fixtures;
    use crate::weighted::WeightedAutomaton;

    #[test]
    fn wa_round_trips_through_json() {
        for wa in [
            fixtures::factor_count_wa(),
            fixtures::tropical_wa(),
            fixtures::end_letter_uwa(),
        ] {
            let text = wa.to_json_string();
            let back = WeightedAutomaton::from_json_str(&text).unwrap();
            assert_eq!(back.to_json_string(), text);
            for tags in fixtures::tag_words(&wa.alphabet, 3) {
                assert_eq!(back.eval(&tags), wa.eval(&tags));
            }
        }
    }
}
