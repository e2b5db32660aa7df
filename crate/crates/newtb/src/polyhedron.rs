//! Rational polyhedra given by linear inequalities, with exact feasibility by
//! Fourier–Motzkin elimination.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::error::{arg_err, parse_err, Error, Result};
use crate::rational::{join_list, parse_rational, parse_rational_list, strip_delims, Rational};

/// `coeffs · t ≤ bound`, or `<` when `strict`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub coeffs: Vec<Rational>,
    pub bound: Rational,
    pub strict: bool,
}

impl Halfspace {
    pub fn le(coeffs: Vec<Rational>, bound: Rational) -> Self {
        Halfspace { coeffs, bound, strict: false }
    }

    pub fn lt(coeffs: Vec<Rational>, bound: Rational) -> Self {
        Halfspace { coeffs, bound, strict: true }
    }

    /// The complement `coeffs · t > bound`, written as `−coeffs · t < −bound`.
    pub fn complement(&self) -> Self {
        Halfspace { coeffs: self.coeffs.iter().map(|c| -c).collect(), bound: -self.bound.clone(), strict: !self.strict }
    }

    pub fn contains(&self, t: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(t).map(|(c, x)| c * x).sum();
        if self.strict {
            lhs < self.bound
        } else {
            lhs <= self.bound
        }
    }

    fn normalized(mut self) -> Self {
        if let Some(scale) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c /= &scale;
            }
            self.bound /= scale;
        }
        self
    }
}

/// Whether the system has a real solution.
pub fn feasible(system: &[Halfspace], dim: usize) -> bool {
    let mut rows: Vec<Halfspace> = system.iter().cloned().map(Halfspace::normalized).collect();
    for var in 0..dim {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for h in rows {
            if h.coeffs[var].is_positive() {
                pos.push(h);
            } else if h.coeffs[var].is_negative() {
                neg.push(h);
            } else {
                rest.push(h);
            }
        }
        for p in &pos {
            for m in &neg {
                let (cp, cm) = (p.coeffs[var].clone(), -m.coeffs[var].clone());
                let coeffs = p.coeffs.iter().zip(&m.coeffs).map(|(a, b)| a * &cm + b * &cp).collect();
                let bound = &p.bound * &cm + &m.bound * &cp;
                rest.push(Halfspace { coeffs, bound, strict: p.strict || m.strict }.normalized());
            }
        }
        rest.sort();
        rest.dedup();
        rows = rest;
    }
    rows.iter().all(|h| if h.strict { h.bound.is_positive() } else { !h.bound.is_negative() })
}

/// A list of halfspaces in `dim` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspaces {
    pub dim: usize,
    pub rows: Vec<Halfspace>,
}

impl fmt::Display for Halfspaces {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|h| format!("{}{}{}", join_list(&h.coeffs, ","), if h.strict { "<" } else { ":" }, h.bound))
            .collect();
        write!(f, "halfspaces n={} rows=({})", self.dim, rows.join(";"))
    }
}

impl FromStr for Halfspaces {
    type Err = Error;

    /// `halfspaces n=<dim> rows=(c_1,...,c_dim:b;...)`, each row meaning
    /// `Σ c_i t_i ≤ b`; `<` in place of `:` makes the row strict.
    fn from_str(s: &str) -> Result<Self> {
        let fields = crate::rational::tagged_fields(s, "halfspaces")?;
        crate::rational::only_keys(&fields, &["n", "rows"])?;
        let dim = crate::rational::parse_i64(crate::rational::field(&fields, "n")?)?;
        if !(1..=16).contains(&dim) {
            return Err(parse_err("dimension out of range"));
        }
        let dim = dim as usize;
        let body = strip_delims(crate::rational::field(&fields, "rows")?, '(', ')')?;
        let mut rows = Vec::new();
        if !body.is_empty() {
            for row in body.split(';') {
                let (lhs, rhs, strict) = match (row.split_once(':'), row.split_once('<')) {
                    (Some((l, r)), None) => (l, r, false),
                    (None, Some((l, r))) => (l, r, true),
                    _ => return Err(parse_err(format!("expected `coeffs:bound`, got `{row}`"))),
                };
                let coeffs = parse_rational_list(lhs)?;
                if coeffs.len() != dim {
                    return Err(parse_err(format!("row `{row}` needs {dim} coefficients")));
                }
                rows.push(Halfspace { coeffs, bound: parse_rational(rhs)?, strict });
            }
        }
        Ok(Halfspaces { dim, rows })
    }
}

pub(crate) fn check_dim(h: &Halfspaces, dim: usize) -> Result<()> {
    if h.dim != dim || h.rows.iter().any(|r| r.coeffs.len() != dim) {
        return Err(arg_err(format!("expected inequalities in {dim} variables")));
    }
    Ok(())
}
