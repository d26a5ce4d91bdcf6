//! Exact JSON encodings: rationals as `"p/q"` strings, integers as numbers
//! below `2^53` and strings above.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::Value;

use super::CliError;
use crate::exactlinalg::{IntMatrix, RatMatrix};

const SAFE_INT: i64 = 1 << 53;

pub fn int(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) if x.abs() < SAFE_INT => Value::from(x),
        _ => Value::String(v.to_string()),
    }
}

pub fn rat(v: &BigRational) -> Value {
    Value::String(v.to_string())
}

pub fn int_vec(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rat_vec(v: &[BigRational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn int_matrix(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| int_vec(r)).collect())
}

pub fn rat_matrix(m: &RatMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| rat_vec(r)).collect())
}

/// Quotes bare numeric tokens such as `3/2` so that matrices may be written
/// without string quotes.
fn quote_bare_numbers(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 16);
    let mut chars = text.chars().peekable();
    let mut in_string = false;
    while let Some(c) = chars.next() {
        if in_string {
            out.push(c);
            if c == '\\' {
                if let Some(n) = chars.next() {
                    out.push(n);
                }
            } else if c == '"' {
                in_string = false;
            }
        } else if c == '"' {
            in_string = true;
            out.push(c);
        } else if c.is_ascii_digit() || c == '-' || c == '+' {
            let mut tok = String::from(c);
            while let Some(&n) = chars.peek() {
                if n.is_ascii_digit() || n == '/' || n == '-' || n == '+' {
                    tok.push(n);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push('"');
            out.push_str(&tok);
            out.push('"');
        } else {
            out.push(c);
        }
    }
    out
}

/// Reads `@path` indirections, then parses JSON that may contain bare
/// rationals.
pub fn parse_input(arg: &str) -> Result<Value, CliError> {
    let text = match arg.strip_prefix('@') {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {path}: {e}")))?
        }
        None => arg.to_string(),
    };
    serde_json::from_str(&quote_bare_numbers(&text)).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))
}

pub fn to_rat(v: &Value) -> Result<BigRational, CliError> {
    match v {
        Value::String(s) => {
            BigRational::from_str(s.trim()).map_err(|_| CliError::Parse(format!("not an exact rational: {s:?}")))
        }
        Value::Number(n) => match n.as_i64() {
            Some(x) => Ok(BigRational::from_integer(x.into())),
            None => Err(CliError::Parse(format!("not an exact rational: {n}"))),
        },
        other => Err(CliError::Parse(format!("expected a rational, got {other}"))),
    }
}

pub fn to_int(v: &Value) -> Result<BigInt, CliError> {
    let r = to_rat(v)?;
    if !r.is_integer() {
        return Err(CliError::Parse(format!("expected an integer, got {r}")));
    }
    Ok(r.to_integer())
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| CliError::Parse(format!("{what} must be a JSON array")))
}

pub fn to_rat_vec(v: &Value) -> Result<Vec<BigRational>, CliError> {
    array(v, "vector")?.iter().map(to_rat).collect()
}

pub fn to_int_vec(v: &Value) -> Result<Vec<BigInt>, CliError> {
    array(v, "vector")?.iter().map(to_int).collect()
}

pub fn to_rat_matrix(v: &Value) -> Result<RatMatrix, CliError> {
    let rows = array(v, "matrix")?.iter().map(to_rat_vec).collect::<Result<Vec<_>, _>>()?;
    RatMatrix::from_rows(rows).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn to_int_matrix(v: &Value) -> Result<IntMatrix, CliError> {
    let rows = array(v, "matrix")?.iter().map(to_int_vec).collect::<Result<Vec<_>, _>>()?;
    IntMatrix::from_rows(rows).map_err(|e| CliError::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::{rat as r, int as i};

    #[test]
    fn bare_rationals_are_accepted() {
        let v = parse_input("[[3/2, 0], [0, 2/3]]").unwrap();
        let m = to_rat_matrix(&v).unwrap();
        assert_eq!(m.get(0, 0), &r(3, 2));
        assert_eq!(m.get(1, 1), &r(2, 3));
        let v = parse_input(r#"{"matrix": [["-1/4", 2]], "lattice": "U"}"#).unwrap();
        assert_eq!(to_rat_matrix(&v["matrix"]).unwrap().get(0, 0), &r(-1, 4));
        assert_eq!(v["lattice"], "U");
    }

    #[test]
    fn encodings_round_trip() {
        let big = BigInt::from(1u64 << 60);
        assert!(int(&big).is_string());
        assert_eq!(to_int(&int(&big)).unwrap(), big);
        assert_eq!(int(&i(-7)), Value::from(-7));
        let q = r(-6, 4);
        assert_eq!(rat(&q), Value::String("-3/2".into()));
        assert_eq!(to_rat(&rat(&q)).unwrap(), q);
        assert!(to_rat(&Value::from(1.5)).is_err());
        assert!(to_rat(&Value::String("1/0".into())).is_err());
        assert!(to_int(&Value::String("1/2".into())).is_err());
    }
}
