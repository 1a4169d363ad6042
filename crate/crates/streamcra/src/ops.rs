//! Value domains, the operation family, and registries.
//!
//! A registry is built from a JSON descriptor naming a domain and a subset of
//! its catalogue. Each domain is a strategy behind the [`Domain`] trait,
//! looked up by name at build time; adapter domains (semiring, monoid-unary)
//! additionally resolve the parametric right-multiplication family `*d` on
//! demand. Algebraic tags on operations are advisory metadata, validated by
//! randomized property checks when the registry is built.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::Value;
use crate::weighted::{Monoid, Semiring};

/// Default seed for all randomized law checks. The CLI lets callers override
/// it with `--seed` or the `STREAMCRA_SEED` environment variable.
pub const DEFAULT_SEED: u64 = 0x5eed_0001;

/// Number of random samples per algebraic law check.
pub const LAW_CHECK_SAMPLES: usize = 1000;

/// Advisory algebraic metadata attached to an operation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlgebraicTags {
    pub associative: bool,
    pub commutative: bool,
    pub identity: Option<Value>,
    pub absorbing: Option<Value>,
    /// Present iff the operation is unary right multiplication by this value.
    pub right_mult_const: Option<Value>,
}

type EvalFn = Arc<dyn Fn(&[Value]) -> Value + Send + Sync>;

/// A named operation of the family: a total function on the registry's
/// value domain. Arity-0 operations are the constants.
#[derive(Clone)]
pub struct Operation {
    name: String,
    arity: usize,
    eval: EvalFn,
    tags: AlgebraicTags,
}

impl Operation {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        eval: impl Fn(&[Value]) -> Value + Send + Sync + 'static,
    ) -> Operation {
        Operation {
            name: name.into(),
            arity,
            eval: Arc::new(eval),
            tags: AlgebraicTags::default(),
        }
    }

    pub fn constant(name: impl Into<String>, v: Value) -> Operation {
        Operation::new(name, 0, move |_| v.clone())
    }

    pub fn with_tags(mut self, tags: AlgebraicTags) -> Operation {
        self.tags = tags;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tags(&self) -> &AlgebraicTags {
        &self.tags
    }

    /// Applies the operation. Arity is checked; the evaluation itself is
    /// total on the registry's domain.
    pub fn apply(&self, args: &[Value]) -> Result<Value> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                op: self.name.clone(),
                expected: self.arity,
                got: args.len(),
            });
        }
        Ok((self.eval)(args))
    }
}

impl fmt::Debug for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operation({}, arity {})", self.name, self.arity)
    }
}

fn int2(args: &[Value], f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Value {
    match (&args[0], &args[1]) {
        (Value::Int(a), Value::Int(b)) => Value::Int(f(a, b)),
        (a, b) => panic!("integer operation applied to non-integers {a} and {b}"),
    }
}

fn rat_of(v: &Value) -> BigRational {
    match v {
        Value::Rat(r) => r.clone(),
        Value::Int(i) => BigRational::from(i.clone()),
        other => panic!("rational operation applied to {other}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Int,
    Rat,
    Str,
    SemiringAdapter,
    MonoidUnaryAdapter,
}

/// A value domain behind the registry: it owns the operation catalogue
/// (including parametric families), membership, and a sampler for the
/// randomized law checks.
pub trait Domain: Send + Sync {
    fn kind(&self) -> DomainKind;
    /// Named catalogue entries materialized when the descriptor lists no ops.
    fn default_catalogue(&self) -> Vec<String>;
    fn op(&self, name: &str) -> Result<Operation>;
    fn contains(&self, v: &Value) -> bool;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Value;
    /// Parses a stream value for this domain.
    fn parse_value(&self, v: &serde_json::Value) -> Result<Value> {
        if v.is_null() {
            return Ok(Value::Unit);
        }
        let parsed = Value::from_json(v)?;
        if self.contains(&parsed) {
            Ok(parsed)
        } else {
            Err(Error::ValueOutOfDomain(parsed.to_string()))
        }
    }
}

// --- integers ----------------------------------------------------------------

struct IntDomain;

impl Domain for IntDomain {
    fn kind(&self) -> DomainKind {
        DomainKind::Int
    }

    fn default_catalogue(&self) -> Vec<String> {
        ["0", "1", "+", "max", "min", "monus", "ite"]
            .map(String::from)
            .to_vec()
    }

    fn op(&self, name: &str) -> Result<Operation> {
        let tags_sum = AlgebraicTags {
            associative: true,
            commutative: true,
            identity: Some(Value::int(0)),
            ..AlgebraicTags::default()
        };
        let tags_ac = AlgebraicTags {
            associative: true,
            commutative: true,
            ..AlgebraicTags::default()
        };
        Ok(match name {
            "0" => Operation::constant("0", Value::int(0)),
            "1" => Operation::constant("1", Value::int(1)),
            "+" => Operation::new("+", 2, |a| int2(a, |x, y| x + y)).with_tags(tags_sum),
            "max" => {
                Operation::new("max", 2, |a| int2(a, |x, y| x.max(y).clone())).with_tags(tags_ac)
            }
            "min" => {
                Operation::new("min", 2, |a| int2(a, |x, y| x.min(y).clone())).with_tags(tags_ac)
            }
            "monus" => Operation::new("monus", 2, |a| {
                int2(a, |x, y| {
                    let d = x - y;
                    if d.is_negative() {
                        BigInt::zero()
                    } else {
                        d
                    }
                })
            }),
            "ite" => Operation::new("ite", 4, |a| {
                if a[0] == a[1] {
                    a[2].clone()
                } else {
                    a[3].clone()
                }
            }),
            "-" | "sub" => {
                return Err(Error::PartialOperationRejected(
                    name.to_string(),
                    "subtraction is partial on the naturals; use monus".into(),
                ))
            }
            other => return Err(Error::UnknownOperation(other.to_string())),
        })
    }

    fn contains(&self, v: &Value) -> bool {
        matches!(v, Value::Int(_))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        Value::int(rng.gen_range(0..=12))
    }
}

use num::Signed;

// --- rationals ---------------------------------------------------------------

struct RatDomain;

impl Domain for RatDomain {
    fn kind(&self) -> DomainKind {
        DomainKind::Rat
    }

    fn default_catalogue(&self) -> Vec<String> {
        ["0", "1", "+", "-", "times", "max", "min", "ite"]
            .map(String::from)
            .to_vec()
    }

    fn op(&self, name: &str) -> Result<Operation> {
        let tags_sum = AlgebraicTags {
            associative: true,
            commutative: true,
            identity: Some(Value::rat(0, 1)),
            ..AlgebraicTags::default()
        };
        Ok(match name {
            "0" => Operation::constant("0", Value::rat(0, 1)),
            "1" => Operation::constant("1", Value::rat(1, 1)),
            "+" => {
                Operation::new("+", 2, |a| Value::Rat(rat_of(&a[0]) + rat_of(&a[1])))
                    .with_tags(tags_sum)
            }
            "-" => Operation::new("-", 2, |a| Value::Rat(rat_of(&a[0]) - rat_of(&a[1]))),
            "times" => Operation::new("times", 2, |a| Value::Rat(rat_of(&a[0]) * rat_of(&a[1])))
                .with_tags(AlgebraicTags {
                    associative: true,
                    commutative: true,
                    identity: Some(Value::rat(1, 1)),
                    absorbing: Some(Value::rat(0, 1)),
                    ..AlgebraicTags::default()
                }),
            "max" => Operation::new("max", 2, |a| {
                Value::Rat(rat_of(&a[0]).max(rat_of(&a[1])))
            }),
            "min" => Operation::new("min", 2, |a| {
                Value::Rat(rat_of(&a[0]).min(rat_of(&a[1])))
            }),
            "ite" => Operation::new("ite", 4, |a| {
                if rat_of(&a[0]) == rat_of(&a[1]) {
                    a[2].clone()
                } else {
                    a[3].clone()
                }
            }),
            "div" => {
                return Err(Error::PartialOperationRejected(
                    "div".into(),
                    "division by zero is undefined; rationals stay exact without it".into(),
                ))
            }
            other => return Err(Error::UnknownOperation(other.to_string())),
        })
    }

    fn contains(&self, v: &Value) -> bool {
        matches!(v, Value::Rat(_) | Value::Int(_))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        Value::rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
    }
}

// --- finite words ------------------------------------------------------------

struct StrDomain {
    alphabet: Vec<char>,
}

impl StrDomain {
    fn word_over(&self, w: &str) -> bool {
        w.chars().all(|c| self.alphabet.contains(&c))
    }
}

impl Domain for StrDomain {
    fn kind(&self) -> DomainKind {
        DomainKind::Str
    }

    fn default_catalogue(&self) -> Vec<String> {
        let mut names = vec!["eps".to_string(), "concat".to_string()];
        names.extend(self.alphabet.iter().map(|c| format!("*{c}")));
        names
    }

    fn op(&self, name: &str) -> Result<Operation> {
        match name {
            "eps" => Ok(Operation::constant("eps", Value::str(""))),
            "concat" => Ok(Operation::new("concat", 2, |a| {
                match (&a[0], &a[1]) {
                    (Value::Str(x), Value::Str(y)) => Value::Str(format!("{x}{y}")),
                    (x, y) => panic!("concat applied to {x} and {y}"),
                }
            })
            .with_tags(AlgebraicTags {
                associative: true,
                identity: Some(Value::str("")),
                ..AlgebraicTags::default()
            })),
            _ => {
                if let Some(suffix) = name.strip_prefix('*') {
                    if !suffix.is_empty() && self.word_over(suffix) {
                        let appended = suffix.to_string();
                        return Ok(Operation::new(name, 1, move |a| match &a[0] {
                            Value::Str(x) => Value::Str(format!("{x}{appended}")),
                            x => panic!("append applied to {x}"),
                        })
                        .with_tags(AlgebraicTags {
                            right_mult_const: Some(Value::str(suffix)),
                            ..AlgebraicTags::default()
                        }));
                    }
                }
                Err(Error::UnknownOperation(name.to_string()))
            }
        }
    }

    fn contains(&self, v: &Value) -> bool {
        matches!(v, Value::Str(w) if self.word_over(w))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        let len = rng.gen_range(0..=4);
        let w: String = (0..len)
            .map(|_| self.alphabet[rng.gen_range(0..self.alphabet.len())])
            .collect();
        Value::Str(w)
    }
}

// --- semiring adapter ----------------------------------------------------------

struct SemiringDomain {
    semiring: Arc<Semiring>,
}

impl Domain for SemiringDomain {
    fn kind(&self) -> DomainKind {
        DomainKind::SemiringAdapter
    }

    fn default_catalogue(&self) -> Vec<String> {
        ["0", "1", "+"].map(String::from).to_vec()
    }

    fn op(&self, name: &str) -> Result<Operation> {
        match name {
            "0" => Ok(Operation::constant("0", self.semiring.zero().clone())),
            "1" => Ok(Operation::constant("1", self.semiring.one().clone())),
            "+" => Ok(self.semiring.plus().clone()),
            "times" => Ok(self.semiring.times().clone()),
            _ => {
                if let Some(lit) = name.strip_prefix('*') {
                    let d = self.semiring.parse_carrier(lit)?;
                    return Ok(self.semiring.right_mult(name, d));
                }
                Err(Error::UnknownOperation(name.to_string()))
            }
        }
    }

    fn contains(&self, v: &Value) -> bool {
        self.semiring.contains(v)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        self.semiring.sample(rng)
    }
}

// --- monoid adapter -------------------------------------------------------------

struct MonoidUnaryDomain {
    monoid: Arc<Monoid>,
}

impl Domain for MonoidUnaryDomain {
    fn kind(&self) -> DomainKind {
        DomainKind::MonoidUnaryAdapter
    }

    fn default_catalogue(&self) -> Vec<String> {
        let mut names = vec!["1".to_string()];
        names.extend(self.monoid.generators().iter().map(|g| format!("*{g}")));
        names
    }

    fn op(&self, name: &str) -> Result<Operation> {
        match name {
            "1" => Ok(Operation::constant("1", self.monoid.one().clone())),
            _ => {
                if let Some(lit) = name.strip_prefix('*') {
                    let d = self.monoid.parse_carrier(lit)?;
                    return Ok(self.monoid.right_mult(name, d));
                }
                Err(Error::UnknownOperation(name.to_string()))
            }
        }
    }

    fn contains(&self, v: &Value) -> bool {
        self.monoid.contains(v)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        self.monoid.sample(rng)
    }
}

// --- descriptor and registry ---------------------------------------------------

/// The JSON registry descriptor.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct RegistryDescriptor {
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semiring: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monoid: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ops: Vec<String>,
}

impl RegistryDescriptor {
    pub fn int(ops: &[&str]) -> RegistryDescriptor {
        RegistryDescriptor {
            domain: "int".into(),
            ops: ops.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn str_domain(alphabet: &[&str], ops: &[&str]) -> RegistryDescriptor {
        RegistryDescriptor {
            domain: "str".into(),
            alphabet: Some(alphabet.iter().map(|s| s.to_string()).collect()),
            ops: ops.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn semiring(name: &str) -> RegistryDescriptor {
        RegistryDescriptor {
            domain: "semiring".into(),
            semiring: Some(name.into()),
            ..Default::default()
        }
    }

    pub fn free_monoid(alphabet: &[&str]) -> RegistryDescriptor {
        RegistryDescriptor {
            domain: "monoid-unary".into(),
            monoid: Some("free".into()),
            alphabet: Some(alphabet.iter().map(|s| s.to_string()).collect()),
            ..Default::default()
        }
    }
}

/// An immutable family of constants and operations over one value domain.
#[derive(Clone)]
pub struct OperationRegistry {
    descriptor: RegistryDescriptor,
    domain: Arc<dyn Domain>,
    ops: BTreeMap<String, Operation>,
    declared: Vec<String>,
    semiring: Option<Arc<Semiring>>,
    monoid: Option<Arc<Monoid>>,
}

impl fmt::Debug for OperationRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "OperationRegistry({} domain, ops [{}])",
            self.descriptor.domain,
            self.declared.join(", ")
        )
    }
}

impl PartialEq for OperationRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor
    }
}

impl OperationRegistry {
    pub fn descriptor(&self) -> &RegistryDescriptor {
        &self.descriptor
    }

    pub fn kind(&self) -> DomainKind {
        self.domain.kind()
    }

    /// Looks up an operation: first the materialized ops, then (for adapter
    /// domains) the parametric `*d` right-multiplication family.
    pub fn op(&self, name: &str) -> Result<Operation> {
        if let Some(op) = self.ops.get(name) {
            return Ok(op.clone());
        }
        if name.starts_with('*')
            && matches!(
                self.domain.kind(),
                DomainKind::SemiringAdapter | DomainKind::MonoidUnaryAdapter | DomainKind::Str
            )
        {
            return self.domain.op(name);
        }
        Err(Error::UnknownOperation(name.to_string()))
    }

    pub fn has_op(&self, name: &str) -> bool {
        self.op(name).is_ok()
    }

    /// The names this registry was declared with, in declaration order.
    pub fn declared_ops(&self) -> &[String] {
        &self.declared
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    /// The first declared constant; used by constructions that must fill
    /// registers with an arbitrary fixed value.
    pub fn first_constant(&self) -> Result<(String, Value)> {
        for name in &self.declared {
            if let Some(op) = self.ops.get(name) {
                if op.arity() == 0 {
                    return Ok((name.clone(), op.apply(&[])?));
                }
            }
        }
        Err(Error::NoConstant)
    }

    pub fn parse_value(&self, v: &serde_json::Value) -> Result<Value> {
        self.domain.parse_value(v)
    }

    pub fn contains_value(&self, v: &Value) -> bool {
        matches!(v, Value::Unit) || self.domain.contains(v)
    }

    pub fn sample_value(&self, rng: &mut ChaCha8Rng) -> Value {
        self.domain.sample(rng)
    }

    pub fn semiring(&self) -> Option<&Arc<Semiring>> {
        self.semiring.as_ref()
    }

    pub fn monoid(&self) -> Option<&Arc<Monoid>> {
        self.monoid.as_ref()
    }

    /// True if every materialized operation has arity at most one.
    pub fn is_unary_only(&self) -> bool {
        self.ops.values().all(|op| op.arity() <= 1)
    }
}

fn alphabet_chars(descriptor: &RegistryDescriptor) -> Result<Vec<char>> {
    let letters = descriptor
        .alphabet
        .as_ref()
        .ok_or_else(|| Error::ParseError("this domain needs an `alphabet` field".into()))?;
    let mut out = Vec::new();
    for l in letters {
        let mut chars = l.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => out.push(c),
            _ => {
                return Err(Error::ParseError(format!(
                    "output alphabet letters must be single characters, got `{l}`"
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::ParseError("output alphabet is empty".into()));
    }
    Ok(out)
}

/// Builds a registry from its descriptor, materializing the requested ops
/// (or the default catalogue when none are listed) and validating every
/// advisory algebraic tag with seeded randomized checks.
pub fn make_registry(descriptor: &RegistryDescriptor) -> Result<OperationRegistry> {
    make_registry_seeded(descriptor, DEFAULT_SEED)
}

pub fn make_registry_seeded(
    descriptor: &RegistryDescriptor,
    seed: u64,
) -> Result<OperationRegistry> {
    let mut semiring = None;
    let mut monoid = None;
    let domain: Arc<dyn Domain> = match descriptor.domain.as_str() {
        "int" => Arc::new(IntDomain),
        "rat" => Arc::new(RatDomain),
        "str" => Arc::new(StrDomain {
            alphabet: alphabet_chars(descriptor)?,
        }),
        "semiring" => {
            let name = descriptor
                .semiring
                .as_deref()
                .ok_or_else(|| Error::ParseError("semiring domain needs a `semiring` name".into()))?;
            let s = crate::weighted::semiring_by_name(name, descriptor.alphabet.as_deref())?;
            semiring = Some(s.clone());
            Arc::new(SemiringDomain { semiring: s })
        }
        "monoid-unary" => {
            let name = descriptor.monoid.as_deref().unwrap_or("free");
            let m = crate::weighted::monoid_by_name(name, descriptor.alphabet.as_deref())?;
            monoid = Some(m.clone());
            Arc::new(MonoidUnaryDomain { monoid: m })
        }
        other => return Err(Error::UnknownDomain(other.to_string())),
    };

    let declared = if descriptor.ops.is_empty() {
        domain.default_catalogue()
    } else {
        descriptor.ops.clone()
    };

    let mut ops = BTreeMap::new();
    for name in &declared {
        let op = domain.op(name)?;
        ops.insert(name.clone(), op);
    }

    let registry = OperationRegistry {
        descriptor: descriptor.clone(),
        domain,
        ops,
        declared,
        semiring,
        monoid,
    };
    validate_tags(&registry, seed)?;
    Ok(registry)
}

fn validate_tags(registry: &OperationRegistry, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for op in registry.ops.values() {
        let tags = op.tags().clone();
        if op.arity() == 2 {
            if tags.associative {
                for _ in 0..LAW_CHECK_SAMPLES {
                    let (a, b, c) = (
                        registry.sample_value(&mut rng),
                        registry.sample_value(&mut rng),
                        registry.sample_value(&mut rng),
                    );
                    let l = op.apply(&[op.apply(&[a.clone(), b.clone()])?, c.clone()])?;
                    let r = op.apply(&[a.clone(), op.apply(&[b.clone(), c.clone()])?])?;
                    if l != r {
                        return Err(Error::LawCheckFailed {
                            op: op.name().into(),
                            law: "associativity".into(),
                            detail: format!("({a} . {b}) . {c} = {l} but {a} . ({b} . {c}) = {r}"),
                        });
                    }
                }
            }
            if tags.commutative {
                for _ in 0..LAW_CHECK_SAMPLES {
                    let (a, b) = (
                        registry.sample_value(&mut rng),
                        registry.sample_value(&mut rng),
                    );
                    if op.apply(&[a.clone(), b.clone()])? != op.apply(&[b.clone(), a.clone()])? {
                        return Err(Error::LawCheckFailed {
                            op: op.name().into(),
                            law: "commutativity".into(),
                            detail: format!("{a} . {b} != {b} . {a}"),
                        });
                    }
                }
            }
            if let Some(e) = &tags.identity {
                for _ in 0..LAW_CHECK_SAMPLES {
                    let a = registry.sample_value(&mut rng);
                    if op.apply(&[e.clone(), a.clone()])? != a
                        || op.apply(&[a.clone(), e.clone()])? != a
                    {
                        return Err(Error::LawCheckFailed {
                            op: op.name().into(),
                            law: "identity".into(),
                            detail: format!("{e} is not an identity at {a}"),
                        });
                    }
                }
            }
            if let Some(z) = &tags.absorbing {
                for _ in 0..LAW_CHECK_SAMPLES {
                    let a = registry.sample_value(&mut rng);
                    if op.apply(&[z.clone(), a.clone()])? != *z
                        || op.apply(&[a.clone(), z.clone()])? != *z
                    {
                        return Err(Error::LawCheckFailed {
                            op: op.name().into(),
                            law: "absorption".into(),
                            detail: format!("{z} is not absorbing at {a}"),
                        });
                    }
                }
            }
        }
        if op.arity() == 1 {
            if let Some(d) = &tags.right_mult_const {
                // Right multiplication must agree with the domain's product.
                let product: Option<Operation> = match registry.kind() {
                    DomainKind::Str => registry.domain.op("concat").ok(),
                    DomainKind::SemiringAdapter => registry.domain.op("times").ok(),
                    DomainKind::MonoidUnaryAdapter => {
                        registry.monoid().map(|m| m.dot().clone())
                    }
                    _ => None,
                };
                if let Some(product) = product {
                    for _ in 0..LAW_CHECK_SAMPLES / 10 {
                        let a = registry.sample_value(&mut rng);
                        if op.apply(&[a.clone()])? != product.apply(&[a.clone(), d.clone()])? {
                            return Err(Error::LawCheckFailed {
                                op: op.name().into(),
                                law: "right-multiplication".into(),
                                detail: format!("{}({a}) != {a} . {d}", op.name()),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
