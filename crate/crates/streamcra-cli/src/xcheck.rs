//! Exhaustive cross-validation of compiled artifacts against their
//! definition-level oracles.

use std::path::PathBuf;

use streamcra::combinators::{compile as compile_query, oracle_eval};
use streamcra::cra::{eval_paths_oracle, eval_stream, Cra};
use streamcra::fixtures::{tag_words, value_assignments};
use streamcra::transduction::{compile_to_ucra, dag_oracle_eval};
use streamcra::value::Value;
use streamcra::weighted::wa_to_cra;

use crate::{load_cra, load_query, load_rules, load_wa, CmdResult, Failure, Kind};

fn parse_values(m: &Cra, values: &str) -> Result<Vec<Value>, Failure> {
    values
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            m.registry
                .parse_value(&serde_json::Value::from(s))
                .map_err(|e| Failure::Io(e.to_string()))
        })
        .collect()
}

struct Sweep {
    checked: u64,
    mismatches: u64,
    first_counterexample: Option<serde_json::Value>,
}

impl Sweep {
    fn new() -> Sweep {
        Sweep {
            checked: 0,
            mismatches: 0,
            first_counterexample: None,
        }
    }

    fn record(
        &mut self,
        word: &[(String, Value)],
        want: &Option<Value>,
        got: &Option<Value>,
    ) {
        self.checked += 1;
        if want != got {
            self.mismatches += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(serde_json::json!({
                    "word": word
                        .iter()
                        .map(|(t, v)| serde_json::json!({"tag": t, "value": v.to_json()}))
                        .collect::<Vec<_>>(),
                    "oracle": want.as_ref().map(Value::to_json),
                    "machine": got.as_ref().map(Value::to_json),
                }));
            }
        }
    }

    fn report(self) -> CmdResult {
        let ok = self.mismatches == 0;
        let report = serde_json::json!({
            "ok": ok,
            "checked": self.checked,
            "mismatches": self.mismatches,
            "first_counterexample": self.first_counterexample,
        });
        if ok {
            Ok(report)
        } else {
            Err(Failure::Semantic(report.to_string()))
        }
    }
}

const ENUMERATION_BUDGET: u64 = 2_000_000;

fn sweep_words<F, G>(
    m: &Cra,
    values: &[Value],
    max_len: usize,
    value_oblivious: bool,
    oracle: F,
    machine: G,
) -> Result<Sweep, Failure>
where
    F: Fn(&[(String, Value)]) -> Result<Option<Value>, Failure>,
    G: Fn(&[(String, Value)]) -> Result<Option<Value>, Failure>,
{
    let mut sweep = Sweep::new();
    let values: &[Value] = if value_oblivious {
        &[Value::Unit]
    } else {
        values
    };
    for tags in tag_words(&m.alphabet, max_len) {
        let combos = (values.len() as f64).powi(tags.len() as i32);
        if sweep.checked as f64 + combos > ENUMERATION_BUDGET as f64 {
            return Err(Failure::Semantic(format!(
                "enumeration budget of {ENUMERATION_BUDGET} words exceeded; lower --max-len"
            )));
        }
        for w in value_assignments(&tags, values) {
            let word: Vec<(String, Value)> = w
                .iter()
                .map(|(s, v)| (m.alphabet.symbol(*s).to_string(), v.clone()))
                .collect();
            let want = oracle(&word)?;
            let got = machine(&word)?;
            sweep.record(&word, &want, &got);
        }
    }
    Ok(sweep)
}

pub fn cmd_xcheck(
    path: PathBuf,
    kind: Kind,
    max_len: usize,
    values: &str,
    against: Option<PathBuf>,
    seed: u64,
) -> CmdResult {
    let sem = |e: streamcra::Error| Failure::Semantic(e.to_string());
    // `--against` pits an existing machine file against the definition
    // oracle of `path`, instead of compiling the machine fresh
    let against = against.map(|p| load_cra(&p, seed)).transpose()?;
    match kind {
        Kind::Rules => {
            let t = load_rules(&path, seed)?;
            let m = match against {
                Some(m) => m,
                None => compile_to_ucra(&t).map_err(sem)?,
            };
            let vals = parse_values(&m, values)?;
            sweep_words(
                &m.clone(),
                &vals,
                max_len,
                false,
                |w| dag_oracle_eval(&t, w).map_err(sem),
                |w| eval_stream(&m, w.to_vec()).map(|(o, _)| o).map_err(sem),
            )?
            .report()
        }
        Kind::Query => {
            let q = load_query(&path, seed)?;
            let m = match against {
                Some(m) => m,
                None => compile_query(&q).map_err(sem)?.machine,
            };
            let vals = parse_values(&m, values)?;
            sweep_words(
                &m.clone(),
                &vals,
                max_len,
                false,
                |w| oracle_eval(&q, w, max_len.max(12)).map_err(sem),
                |w| eval_stream(&m, w.to_vec()).map(|(o, _)| o).map_err(sem),
            )?
            .report()
        }
        Kind::Wa => {
            let wa = load_wa(&path)?;
            let m = match against {
                Some(m) => m,
                None => wa_to_cra(&wa).map_err(sem)?,
            };
            let alphabet = wa.alphabet.clone();
            sweep_words(
                &m.clone(),
                &[],
                max_len,
                true,
                |w| {
                    let tags: Vec<usize> = w
                        .iter()
                        .map(|(t, _)| alphabet.index_of(t).expect("swept tags"))
                        .collect();
                    wa.path_oracle(&tags, 10_000_000).map(Some).map_err(sem)
                },
                |w| eval_stream(&m, w.to_vec()).map(|(o, _)| o).map_err(sem),
            )?
            .report()
        }
        Kind::Cra => {
            let reference = load_cra(&path, seed)?;
            let m = against.unwrap_or_else(|| reference.clone());
            let d = m.validate();
            if !d.is_unambiguous || !d.eps_free {
                return Err(Failure::Semantic(format!(
                    "xcheck needs an unambiguous ε-free machine: {:?}",
                    d.notes
                )));
            }
            let value_oblivious = m
                .transitions
                .iter()
                .all(|t| t.update.values().all(|e| !e.uses_current_val()));
            let vals = if value_oblivious {
                Vec::new()
            } else {
                parse_values(&m, values)?
            };
            sweep_words(
                &m.clone(),
                &vals,
                max_len,
                value_oblivious,
                |w| {
                    eval_paths_oracle(&reference, w, max_len.max(12))
                        .map(|mut vs| vs.pop())
                        .map_err(sem)
                },
                |w| eval_stream(&m, w.to_vec()).map(|(o, _)| o).map_err(sem),
            )?
            .report()
        }
    }
}
