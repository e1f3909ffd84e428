//! JSON payload navigation with JSON-pointer error paths.
//!
//! Every accessor returns `Error::Schema` carrying the pointer to the
//! offending field, so a bad job file fails with an exact location
//! ("/jobs/2/delta: ...") instead of a generic message. Parsing is strict:
//! rationals are JSON integers or `"a/b"` strings, never floats, keeping the
//! pipeline exact end to end.

use gp_core::padic::{PrimeField, SquareClass};
use gp_core::rootnum::RootOfUnity;
use gp_core::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::Value;

/// A borrowed JSON value together with its pointer path from the job root.
#[derive(Debug, Clone)]
pub struct Ctx<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Ctx<'a> {
    pub fn root(value: &'a Value) -> Self {
        Ctx {
            value,
            path: String::new(),
        }
    }

    pub fn value(&self) -> &'a Value {
        self.value
    }

    fn display_path(&self) -> String {
        if self.path.is_empty() {
            "/".into()
        } else {
            self.path.clone()
        }
    }

    pub fn err(&self, message: impl Into<String>) -> Error {
        Error::schema(self.display_path(), message)
    }

    fn child(&self, value: &'a Value, segment: impl std::fmt::Display) -> Ctx<'a> {
        Ctx {
            value,
            path: format!("{}/{segment}", self.path),
        }
    }

    /// Required object field.
    pub fn at(&self, key: &str) -> Result<Ctx<'a>> {
        let Value::Object(map) = self.value else {
            return Err(self.err("expected an object"));
        };
        map.get(key)
            .map(|v| self.child(v, key))
            .ok_or_else(|| self.err(format!("missing required field \"{key}\"")))
    }

    /// Optional object field.
    pub fn opt(&self, key: &str) -> Option<Ctx<'a>> {
        match self.value {
            Value::Object(map) => map.get(key).map(|v| self.child(v, key)),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Result<Vec<Ctx<'a>>> {
        let Value::Array(items) = self.value else {
            return Err(self.err("expected an array"));
        };
        Ok(items
            .iter()
            .enumerate()
            .map(|(i, v)| self.child(v, i))
            .collect())
    }

    pub fn as_str(&self) -> Result<&'a str> {
        self.value
            .as_str()
            .ok_or_else(|| self.err("expected a string"))
    }

    pub fn as_bool(&self) -> Result<bool> {
        self.value
            .as_bool()
            .ok_or_else(|| self.err("expected a boolean"))
    }

    pub fn as_u64(&self) -> Result<u64> {
        self.value
            .as_u64()
            .ok_or_else(|| self.err("expected a non-negative integer"))
    }

    pub fn as_i64(&self) -> Result<i64> {
        self.value
            .as_i64()
            .ok_or_else(|| self.err("expected an integer"))
    }

    pub fn as_usize(&self) -> Result<usize> {
        self.as_u64().map(|n| n as usize)
    }

    /// A sign, i.e. the integer 1 or -1.
    pub fn as_sign(&self) -> Result<i32> {
        match self.value.as_i64() {
            Some(1) => Ok(1),
            Some(-1) => Ok(-1),
            _ => Err(self.err("expected 1 or -1")),
        }
    }

    /// Exact rational: a JSON integer or a string like "-3/4". Floats are
    /// rejected so that no job can silently lose precision.
    pub fn as_rational(&self) -> Result<BigRational> {
        match self.value {
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(BigRational::from_integer(BigInt::from(i))),
                None => Err(self.err(
                    "numbers must be integers; write fractions as strings like \"3/4\"",
                )),
            },
            Value::String(s) => parse_rational(s)
                .ok_or_else(|| self.err(format!("\"{s}\" is not a rational number"))),
            _ => Err(self.err("expected a rational (integer or \"a/b\" string)")),
        }
    }

    pub fn as_square_class(&self, field: PrimeField) -> Result<SquareClass> {
        let r = self.as_rational()?;
        SquareClass::from_rational(&r, field).map_err(|e| self.err(e.to_string()))
    }

    /// A root of unity written as the pair [k, n], meaning e^{2πik/n}.
    pub fn as_root_of_unity(&self) -> Result<RootOfUnity> {
        let items = self.as_array()?;
        if items.len() != 2 {
            return Err(self.err("expected [k, n] meaning e^(2*pi*i*k/n)"));
        }
        let k = items[0].as_i64()?;
        let n = items[1].as_u64()?;
        if n == 0 {
            return Err(items[1].err("the order n must be at least 1"));
        }
        Ok(RootOfUnity::new(k, n))
    }
}

/// Parses "a" or "a/b" into an exact rational; `None` on malformed input
/// or a zero denominator.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((numer, denom)) = s.split_once('/') {
        let numer: BigInt = numer.trim().parse().ok()?;
        let denom: BigInt = denom.trim().parse().ok()?;
        if denom.is_zero() {
            return None;
        }
        Some(BigRational::new(numer, denom))
    } else {
        let numer: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(numer))
    }
}
