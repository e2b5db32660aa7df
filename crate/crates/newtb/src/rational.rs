//! Exact scalars: arbitrary-precision rationals plus a `+∞` sentinel.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{parse_err, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// `n/d` as a rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `q^e` for any integer exponent.
pub fn qpow(q: u32, e: i64) -> Rational {
    let base = Rational::from_integer(BigInt::from(q));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

pub fn big_pow(q: u32, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(q), e as usize)
}

/// A rational or `+∞`. Infinity absorbs addition and dominates every comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(Rational),
    Infinity,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn plus(&self, other: &ExtRational) -> ExtRational {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }

    /// `min(self, x)` for a finite `x`.
    pub fn min_with(&self, x: &Rational) -> Rational {
        match self {
            ExtRational::Finite(r) if r < x => r.clone(),
            _ => x.clone(),
        }
    }

    /// Scale by a non-negative factor; `∞ · 0` is rejected by callers, here it yields `∞`.
    pub fn scale(&self, c: &Rational) -> ExtRational {
        match self {
            ExtRational::Finite(r) => ExtRational::Finite(r * c),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(r: Rational) -> Self {
        ExtRational::Finite(r)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
            (ExtRational::Infinity, _) => Ordering::Greater,
            (_, ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => write!(f, "{}", r),
            ExtRational::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtRational::Infinity),
            other => parse_rational(other).map(ExtRational::Finite),
        }
    }
}

/// Parses `a/b`, `a` (integers may carry a sign). Whitespace around the token is ignored.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = parse_int(num)?;
    let den = parse_int(den)?;
    if den.is_zero() {
        return Err(parse_err(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

fn parse_int(s: &str) -> Result<BigInt> {
    let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(format!("not an integer: `{s}`")));
    }
    BigInt::from_str(s).map_err(|e| parse_err(format!("`{s}`: {e}")))
}

pub fn parse_i64(s: &str) -> Result<i64> {
    s.trim().parse::<i64>().map_err(|e| parse_err(format!("`{}`: {e}", s.trim())))
}

/// Comma-separated rationals, e.g. `2/3,1/6`.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_rational).collect()
}

pub fn parse_i64_list(s: &str) -> Result<Vec<i64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_i64).collect()
}

pub fn join_list<T: fmt::Display>(items: &[T], sep: &str) -> String {
    let mut out = String::new();
    for (k, x) in items.iter().enumerate() {
        if k > 0 {
            out.push_str(sep);
        }
        out.push_str(&x.to_string());
    }
    out
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Splits `key=value` tokens of a one-line text form, after checking the leading tag.
pub(crate) fn tagged_fields<'a>(s: &'a str, tag: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let mut tokens = s.split_whitespace();
    match tokens.next() {
        Some(t) if t == tag => {}
        _ => return Err(parse_err(format!("expected `{tag} ...`"))),
    }
    tokens.map(|t| t.split_once('=').ok_or_else(|| parse_err(format!("expected key=value, got `{t}`")))).collect()
}

pub(crate) fn field<'a>(fields: &[(&'a str, &'a str)], key: &str) -> Result<&'a str> {
    let mut hits = fields.iter().filter(|(k, _)| *k == key);
    let first = hits.next().ok_or_else(|| parse_err(format!("missing `{key}=`")))?;
    if hits.next().is_some() {
        return Err(parse_err(format!("duplicate `{key}=`")));
    }
    Ok(first.1)
}

pub(crate) fn only_keys(fields: &[(&str, &str)], allowed: &[&str]) -> Result<()> {
    for (k, _) in fields {
        if !allowed.contains(k) {
            return Err(parse_err(format!("unknown key `{k}`")));
        }
    }
    Ok(())
}

/// Removes one pair of surrounding delimiters, e.g. `(` `)`.
pub(crate) fn strip_delims(s: &str, open: char, close: char) -> Result<&str> {
    s.strip_prefix(open)
        .and_then(|t| t.strip_suffix(close))
        .ok_or_else(|| parse_err(format!("expected `{open}...{close}`, got `{s}`")))
}
