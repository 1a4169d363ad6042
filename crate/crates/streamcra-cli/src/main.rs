//! Command-line front end: `check`, `compile`, `run`, `xcheck`, `graph`.
//!
//! Exit codes: 0 on success, 1 on validation or semantic failure, 2 on
//! I/O or parse failure.

use std::fs;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

mod input;
mod xcheck;

use streamcra::combinators::{compile as compile_query, Query};
use streamcra::cra::{cra_to_dot, eval_stream, ucra_to_dcra, Cra};
use streamcra::ops::DEFAULT_SEED;
use streamcra::transduction::{
    check_wellformed, compile_to_ucra, cra_to_rules, future_past, is_tree, single_step,
    RuleTransduction,
};
use streamcra::weighted::{wa_to_cra, WeightedAutomaton};

#[derive(Parser)]
#[command(name = "streamcra", version, about = "Streamable regular transductions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Cra,
    Query,
    Rules,
    Wa,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StreamFormat {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphWhat {
    Machine,
    FuturePast,
    Dag,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an artifact: machine flags, rule well-formedness, or
    /// semiring laws.
    Check {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Fail unless the machine (or compiled machine) is copyless.
        #[arg(long)]
        require_copyless: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compile an artifact to a machine (queries, rules, weighted automata)
    /// or transform a machine (determinize, extract rules).
    Compile {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        /// For `--kind cra`: apply the subset construction.
        #[arg(long)]
        determinize: bool,
        /// For `--kind cra`: extract the regex-rule transduction.
        #[arg(long)]
        to_rules: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a machine over a stream of records.
    Run {
        machine: PathBuf,
        /// Input file; `-` reads stdin.
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: StreamFormat,
        /// Include evaluator statistics in the report.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exhaustively compare a compiled artifact against its
    /// definition-level oracle on all short words.
    Xcheck {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Comma-separated data values to sweep, e.g. `0,1,2`.
        #[arg(long, default_value = "0,1,2")]
        values: String,
        /// Compare this machine file against the oracle of `path` instead
        /// of compiling the machine from `path`.
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit DOT for a machine, a rules file's future-past automaton, or
    /// the output DAG of a rules file on one word.
    Graph {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_enum, default_value = "machine")]
        what: GraphWhat,
        /// Tag word for `--what dag`, e.g. `ABA`.
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// The `STREAMCRA_SEED` environment variable overrides `--seed`.
fn resolve_seed(flag: Option<u64>) -> u64 {
    if let Ok(env) = std::env::var("STREAMCRA_SEED") {
        if let Ok(seed) = env.parse() {
            return seed;
        }
    }
    flag.unwrap_or(DEFAULT_SEED)
}

enum Failure {
    /// Semantic or validation failure: exit 1.
    Semantic(String),
    /// I/O or parse failure: exit 2.
    Io(String),
}

type CmdResult = Result<serde_json::Value, Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn parse_err(e: streamcra::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn load_cra(path: &PathBuf, seed: u64) -> Result<Cra, Failure> {
    let text = read(path)?;
    let j: streamcra::cra::json::CraJson =
        serde_json::from_str(&text).map_err(|e| Failure::Io(e.to_string()))?;
    Cra::from_json_seeded(&j, seed).map_err(parse_err)
}

fn load_rules(path: &PathBuf, seed: u64) -> Result<RuleTransduction, Failure> {
    let text = read(path)?;
    let j: streamcra::transduction::RulesJson =
        serde_json::from_str(&text).map_err(|e| Failure::Io(e.to_string()))?;
    RuleTransduction::from_json_seeded(&j, seed).map_err(parse_err)
}

fn load_query(path: &PathBuf, seed: u64) -> Result<Query, Failure> {
    let text = read(path)?;
    let j: streamcra::combinators::QueryJson =
        serde_json::from_str(&text).map_err(|e| Failure::Io(e.to_string()))?;
    Query::from_json_seeded(&j, seed).map_err(parse_err)
}

fn load_wa(path: &PathBuf) -> Result<WeightedAutomaton, Failure> {
    let text = read(path)?;
    WeightedAutomaton::from_json_str(&text).map_err(parse_err)
}

fn diagnostics_json(d: &streamcra::cra::Diagnostics) -> serde_json::Value {
    serde_json::json!({
        "is_deterministic": d.is_deterministic,
        "is_unambiguous": d.is_unambiguous,
        "is_copyless": d.is_copyless,
        "is_trim": d.is_trim,
        "arity_ok": d.arity_ok,
        "eps_free": d.eps_free,
        "notes": d.notes,
    })
}

fn cmd_check(path: PathBuf, kind: Kind, require_copyless: bool, seed: u64) -> CmdResult {
    match kind {
        Kind::Cra => {
            let m = load_cra(&path, seed)?;
            let d = m.validate();
            let mut ok = d.arity_ok && d.is_unambiguous;
            let mut report = diagnostics_json(&d);
            if require_copyless && !d.is_copyless {
                ok = false;
                report["copyless_violations"] = serde_json::json!(d
                    .notes
                    .iter()
                    .filter(|n| n.contains("used"))
                    .collect::<Vec<_>>());
            }
            report["ok"] = serde_json::json!(ok);
            if ok {
                Ok(report)
            } else {
                Err(Failure::Semantic(report.to_string()))
            }
        }
        Kind::Rules => {
            let t = load_rules(&path, seed)?;
            let wf = check_wellformed(&t).map_err(parse_err)?;
            let tree = is_tree(&t).map_err(parse_err)?;
            let report = serde_json::json!({
                "ok": wf.all_ok(),
                "is_tree": tree,
                "conditions": wf.conditions.iter().enumerate().map(|(i, c)| serde_json::json!({
                    "condition": i + 1,
                    "ok": c.ok,
                    "skipped": c.skipped,
                    "witness": c.witness,
                    "detail": c.detail,
                })).collect::<Vec<_>>(),
            });
            if require_copyless && !tree {
                return Err(Failure::Semantic(
                    serde_json::json!({"ok": false, "detail": "transduction is not word-to-tree"})
                        .to_string(),
                ));
            }
            if wf.all_ok() {
                Ok(report)
            } else {
                Err(Failure::Semantic(report.to_string()))
            }
        }
        Kind::Query => {
            let q = load_query(&path, seed)?;
            let compiled = compile_query(&q).map_err(parse_err)?;
            let d = compiled.machine.validate();
            let ok = !require_copyless || d.is_copyless;
            let report = serde_json::json!({
                "ok": ok,
                "machine": diagnostics_json(&d),
                "warnings": compiled.warnings,
            });
            if ok {
                Ok(report)
            } else {
                Err(Failure::Semantic(report.to_string()))
            }
        }
        Kind::Wa => {
            let wa = load_wa(&path)?;
            let unamb = wa.is_unambiguous().map_err(parse_err)?;
            // semiring laws were validated while loading the preset
            Ok(serde_json::json!({
                "ok": true,
                "semiring": wa.semiring.name(),
                "is_unambiguous": unamb,
                "states": wa.state_count(),
            }))
        }
    }
}

fn emit_machine(m: &Cra, emit: Emit, out: Option<PathBuf>) -> CmdResult {
    let m = m.canonicalize();
    let text = match emit {
        Emit::Json => m.to_json_string(),
        Emit::Dot => cra_to_dot(&m, "machine"),
    };
    match out {
        Some(path) => {
            fs::write(&path, &text).map_err(|e| Failure::Io(e.to_string()))?;
            Ok(serde_json::json!({
                "written": path.display().to_string(),
                "states": m.state_count(),
                "registers": m.register_count(),
            }))
        }
        None => {
            println!("{text}");
            Ok(serde_json::json!({
                "states": m.state_count(),
                "registers": m.register_count(),
            }))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_compile(
    path: PathBuf,
    kind: Kind,
    out: Option<PathBuf>,
    emit: Emit,
    determinize: bool,
    to_rules: bool,
    seed: u64,
) -> CmdResult {
    match kind {
        Kind::Query => {
            let q = load_query(&path, seed)?;
            let compiled = compile_query(&q).map_err(|e| Failure::Semantic(e.to_string()))?;
            for w in &compiled.warnings {
                eprintln!("warning: {w}");
            }
            emit_machine(&compiled.machine, emit, out)
        }
        Kind::Rules => {
            let t = load_rules(&path, seed)?;
            let m = compile_to_ucra(&t).map_err(|e| Failure::Semantic(e.to_string()))?;
            emit_machine(&m, emit, out)
        }
        Kind::Wa => {
            let wa = load_wa(&path)?;
            let m = wa_to_cra(&wa).map_err(|e| Failure::Semantic(e.to_string()))?;
            emit_machine(&m, emit, out)
        }
        Kind::Cra => {
            let m = load_cra(&path, seed)?;
            if to_rules {
                let rules = cra_to_rules(&m.trim())
                    .map_err(|e| Failure::Semantic(e.to_string()))?;
                let text = rules.to_json_string();
                return match out {
                    Some(p) => {
                        fs::write(&p, &text).map_err(|e| Failure::Io(e.to_string()))?;
                        Ok(serde_json::json!({
                            "written": p.display().to_string(),
                            "copies": rules.copies.len(),
                        }))
                    }
                    None => {
                        println!("{text}");
                        Ok(serde_json::json!({"copies": rules.copies.len()}))
                    }
                };
            }
            let m = if determinize {
                ucra_to_dcra(&m.trim()).map_err(|e| Failure::Semantic(e.to_string()))?
            } else {
                m.trim()
            };
            emit_machine(&m, emit, out)
        }
    }
}

fn cmd_run(
    machine: PathBuf,
    input: String,
    format: StreamFormat,
    with_stats: bool,
    seed: u64,
) -> CmdResult {
    let m = load_cra(&machine, seed)?;
    let d = m.validate();
    if !d.is_unambiguous || !d.eps_free || !d.arity_ok {
        return Err(Failure::Semantic(format!(
            "machine is not runnable: {:?}",
            d.notes
        )));
    }
    let reader: Box<dyn BufRead> = if input == "-" {
        Box::new(std::io::stdin().lock())
    } else {
        let f = fs::File::open(&input).map_err(|e| Failure::Io(format!("{input}: {e}")))?;
        Box::new(std::io::BufReader::new(f))
    };
    let started = Instant::now();
    let (items, error_slot) = input::RecordStream::new(reader, format, &m);
    let (output, stats) =
        eval_stream(&m, items).map_err(|e| Failure::Semantic(e.to_string()))?;
    if let Some(failure) = error_slot.borrow_mut().take() {
        return Err(failure);
    }
    let elapsed = started.elapsed();
    // the streaming bounds, asserted
    if stats.max_live_tokens > m.state_count()
        || stats.max_stored_values > m.state_count() * m.register_count()
    {
        return Err(Failure::Semantic(format!(
            "streaming bound violated: {stats:?}"
        )));
    }
    let mut report = serde_json::json!({
        "output": match output {
            Some(v) => v.to_json(),
            None => serde_json::json!("undefined"),
        },
    });
    if with_stats {
        let throughput = stats.items as f64 / elapsed.as_secs_f64().max(1e-9);
        report["stats"] = serde_json::json!({
            "items": stats.items,
            "max_live_tokens": stats.max_live_tokens,
            "max_stored_values": stats.max_stored_values,
            "op_applications": stats.op_applications,
            "token_bound": m.state_count(),
            "value_bound": m.state_count() * m.register_count(),
        });
        report["timings"] = serde_json::json!({
            "elapsed_ms": elapsed.as_millis() as u64,
            "items_per_sec": throughput,
        });
    }
    Ok(report)
}

fn cmd_graph(
    path: PathBuf,
    kind: Kind,
    what: GraphWhat,
    word: Option<String>,
    out: Option<PathBuf>,
    seed: u64,
) -> CmdResult {
    let dot = match (kind, what) {
        (Kind::Cra, GraphWhat::Machine) => cra_to_dot(&load_cra(&path, seed)?, "machine"),
        (Kind::Rules, GraphWhat::FuturePast) => {
            let t = load_rules(&path, seed)?;
            let ss = single_step(&t).map_err(|e| Failure::Semantic(e.to_string()))?;
            let fp = future_past(&ss).map_err(|e| Failure::Semantic(e.to_string()))?;
            streamcra::transduction::dot::future_past_to_dot(&ss, &fp, "future_past")
        }
        (Kind::Rules, GraphWhat::Dag) => {
            let t = load_rules(&path, seed)?;
            let word = word.ok_or_else(|| {
                Failure::Io("—what dag needs --word with a tag word like `ABA`".into())
            })?;
            let tags: Vec<String> = word.chars().map(|c| c.to_string()).collect();
            let syms = t
                .alphabet
                .word(&tags.iter().map(String::as_str).collect::<Vec<_>>())
                .map_err(|e| Failure::Io(e.to_string()))?;
            let dag = streamcra::transduction::materialize(&t, &syms)
                .map_err(|e| Failure::Semantic(e.to_string()))?;
            streamcra::transduction::dot::dag_to_dot(&t, &dag, "output_dag")
        }
        (Kind::Rules, GraphWhat::Machine) => {
            let t = load_rules(&path, seed)?;
            let m = compile_to_ucra(&t).map_err(|e| Failure::Semantic(e.to_string()))?;
            cra_to_dot(&m, "machine")
        }
        _ => {
            return Err(Failure::Io(
                "unsupported kind/what combination for graph".into(),
            ))
        }
    };
    match out {
        Some(p) => {
            fs::write(&p, &dot).map_err(|e| Failure::Io(e.to_string()))?;
            Ok(serde_json::json!({"written": p.display().to_string()}))
        }
        None => {
            println!("{dot}");
            Ok(serde_json::json!({"printed": true}))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: CmdResult = match cli.command {
        Command::Check {
            path,
            kind,
            require_copyless,
            seed,
        } => cmd_check(path, kind, require_copyless, resolve_seed(seed)),
        Command::Compile {
            path,
            kind,
            out,
            emit,
            determinize,
            to_rules,
            seed,
        } => cmd_compile(path, kind, out, emit, determinize, to_rules, resolve_seed(seed)),
        Command::Run {
            machine,
            input,
            format,
            stats,
            seed,
        } => cmd_run(machine, input, format, stats, resolve_seed(seed)),
        Command::Xcheck {
            path,
            kind,
            max_len,
            values,
            against,
            seed,
        } => xcheck::cmd_xcheck(path, kind, max_len, &values, against, resolve_seed(seed)),
        Command::Graph {
            path,
            kind,
            what,
            word,
            out,
            seed,
        } => cmd_graph(path, kind, what, word, out, resolve_seed(seed)),
    };
    match result {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).unwrap());
            ExitCode::from(0)
        }
        Err(Failure::Semantic(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
