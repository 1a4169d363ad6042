//! Streamable regular transductions: cost register automata over pluggable
//! value domains, quantitative regular combinators compiled to unambiguous
//! machines, translations to and from weighted automata, and a compiler
//! from forward-only word-to-DAG rule transductions.
//!
//! The core machine is the [`cra::Cra`]: finite control over input tags
//! plus write-only value registers updated by expressions over a declared
//! operation family. Value domains, semirings, and monoids are strategies
//! selected by name through JSON descriptors (see [`ops::make_registry`]),
//! so the same machinery runs over exact integers, rationals, finite
//! words, or semiring adapters.
//!
//! Every compilation path ships with a definition-level oracle
//! ([`combinators::oracle_eval`], [`transduction::dag_oracle_eval`],
//! [`weighted::WeightedAutomaton::path_oracle`], [`cra::eval_paths_oracle`])
//! so constructions can be cross-validated by exhaustive enumeration on
//! short words.

pub mod automata;
pub mod combinators;
pub mod cra;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod ops;
pub mod transduction;
pub mod value;
pub mod weighted;

pub use error::{Error, Result};
pub use value::Value;
