use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A data value. All arithmetic in the core is exact; there is no floating
/// point anywhere. `Inf` is the explicit extended element adjoined to the
/// numeric domains; the tropical semiring uses it as its zero, and the
/// lifted free-monoid semiring uses it as its formal absent element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Rat(BigRational),
    Str(String),
    Unit,
    Inf,
}

impl Value {
    pub fn int(i: i64) -> Value {
        Value::Int(BigInt::from(i))
    }

    pub fn rat(num: i64, den: i64) -> Value {
        Value::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn str(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    /// Parses a literal in the lexical form used by expression strings and
    /// stream files: integers, `p/q` rationals, `inf`, `unit`, or a bare word.
    pub fn parse_literal(text: &str) -> Result<Value> {
        let t = text.trim();
        if t == "inf" {
            return Ok(Value::Inf);
        }
        if t == "unit" {
            return Ok(Value::Unit);
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::ParseError(format!("bad rational literal `{text}`")))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::ParseError(format!("bad rational literal `{text}`")))?;
            if d.is_zero() {
                return Err(Error::ParseError(format!("zero denominator in `{text}`")));
            }
            return Ok(Value::Rat(BigRational::new(n, d)));
        }
        if t.chars()
            .all(|c| c.is_ascii_digit() || c == '-' || c == '+')
            && t.chars().any(|c| c.is_ascii_digit())
        {
            let i: BigInt = t
                .parse()
                .map_err(|_| Error::ParseError(format!("bad integer literal `{text}`")))?;
            return Ok(Value::Int(i));
        }
        Ok(Value::Str(t.to_string()))
    }

    /// Reads a value out of a JSON literal, e.g. a stream record field.
    pub fn from_json(v: &serde_json::Value) -> Result<Value> {
        match v {
            serde_json::Value::Null => Ok(Value::Unit),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Value::int(i))
                } else if let Some(u) = n.as_u64() {
                    Ok(Value::Int(BigInt::from(u)))
                } else {
                    Err(Error::ParseError(format!(
                        "non-integer number `{n}`; exact values only"
                    )))
                }
            }
            serde_json::Value::String(s) => Value::parse_literal(s),
            other => Err(Error::ParseError(format!("bad value literal `{other}`"))),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => {
                if let Ok(small) = i64::try_from(i.clone()) {
                    serde_json::Value::from(small)
                } else {
                    serde_json::Value::from(i.to_string())
                }
            }
            Value::Rat(r) => serde_json::Value::from(format!("{}/{}", r.numer(), r.denom())),
            Value::Str(s) => serde_json::Value::from(s.clone()),
            Value::Unit => serde_json::Value::Null,
            Value::Inf => serde_json::Value::from("inf"),
        }
    }

    pub fn is_nonnegative_int(&self) -> bool {
        matches!(self, Value::Int(i) if !i.is_negative())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Value::Str(s) => write!(f, "{s}"),
            Value::Unit => write!(f, "unit"),
            Value::Inf => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trips() {
        assert_eq!(Value::parse_literal("42").unwrap(), Value::int(42));
        assert_eq!(Value::parse_literal("-3").unwrap(), Value::int(-3));
        assert_eq!(Value::parse_literal("2/5").unwrap(), Value::rat(2, 5));
        assert_eq!(Value::parse_literal("inf").unwrap(), Value::Inf);
        assert_eq!(Value::parse_literal("ab#").unwrap(), Value::str("ab#"));
    }

    #[test]
    fn json_values() {
        let v = Value::from_json(&serde_json::json!(7)).unwrap();
        assert_eq!(v, Value::int(7));
        assert_eq!(Value::from_json(&v.to_json()).unwrap(), v);
        let r = Value::rat(1, 3);
        assert_eq!(Value::from_json(&r.to_json()).unwrap(), r);
    }
}
