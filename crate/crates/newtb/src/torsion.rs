//! Brute-force model of the torsion module `(F/O)^n` with `O = F_q[[π]]`,
//! valued through a Newton polygon, and the filtrations and norms built from it.
//!
//! Only the `O/π^k`-module structure and `F_q`-counting enter any formula, so
//! the equal-characteristic model is exact for every quantity computed here.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::building::{join, meet, ApartmentVertex, SimplexB};
use crate::error::{arg_err, invariant, parse_err, Error, Result};
use crate::field::FiniteField;
use crate::hecke::{chamber_of, integrate_between_cuts};
use crate::newton::NewtonPolygon;
use crate::rational::{int, parse_i64_list, ExtRational, Rational};

/// Default cap on enumerated subgroup sizes; `NEWTB_ENUM_CAP` overrides it.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

pub fn enum_cap() -> u64 {
    std::env::var("NEWTB_ENUM_CAP")
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_ENUM_CAP)
}

/// An element of `(π^{-level} O / O)^n`. Coordinate `i` is
/// `π^{-level} Σ_d coords[i][d] π^d`, digits in `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorsionVector {
    level: usize,
    coords: Vec<Vec<u16>>,
}

impl TorsionVector {
    pub fn zero(n: usize, level: usize) -> Self {
        TorsionVector { level, coords: vec![vec![0; level]; n] }
    }

    pub fn new(level: usize, coords: Vec<Vec<u16>>) -> Result<Self> {
        if coords.iter().any(|c| c.len() != level) {
            return Err(arg_err("every coordinate needs exactly `level` digits"));
        }
        Ok(TorsionVector { level, coords })
    }

    /// `π^{-k} ē_i` (0-based `i`), at level `k`.
    pub fn basis(n: usize, i: usize, k: usize) -> Self {
        let mut v = Self::zero(n, k);
        if k > 0 {
            v.coords[i][0] = 1;
        }
        v
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Vec<u16>] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.iter().all(|&d| d == 0))
    }

    /// The same element written at a higher level.
    pub fn lift(&self, level: usize) -> Result<Self> {
        if level < self.level {
            return Err(arg_err("cannot lower the level of a torsion vector"));
        }
        let pad = level - self.level;
        let coords = self
            .coords
            .iter()
            .map(|c| {
                let mut d = vec![0; pad];
                d.extend_from_slice(c);
                d
            })
            .collect();
        Ok(TorsionVector { level, coords })
    }

    /// Order of coordinate `i` as a power of `π` (0 for a zero coordinate).
    pub fn order(&self, i: usize) -> i64 {
        match self.coords[i].iter().position(|&d| d != 0) {
            Some(d) => (self.level - d) as i64,
            None => 0,
        }
    }

    fn combine(&self, other: &Self, f: impl Fn(u16, u16) -> u16) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        TorsionVector { level: self.level, coords }
    }

    pub fn add(&self, other: &Self, field: &FiniteField) -> Self {
        self.combine(other, |x, y| field.add(x, y))
    }

    pub fn sub(&self, other: &Self, field: &FiniteField) -> Self {
        self.combine(other, |x, y| field.sub(x, y))
    }

    pub fn scale(&self, c: u16, field: &FiniteField) -> Self {
        let coords = self.coords.iter().map(|a| a.iter().map(|&x| field.mul(c, x)).collect()).collect();
        TorsionVector { level: self.level, coords }
    }

    /// Multiplication by `π`.
    pub fn times_pi(&self) -> Self {
        let coords = self
            .coords
            .iter()
            .map(|a| {
                let mut d = vec![0; self.level];
                let keep = self.level.saturating_sub(1);
                d[1..=keep].copy_from_slice(&a[..keep]);
                d
            })
            .collect();
        TorsionVector { level: self.level, coords }
    }
}

/// Valuation of a torsion point in an adapted basis: `min_i λ_i^{(order_i)}`.
pub fn valuation(p: &NewtonPolygon, x: &TorsionVector) -> Result<ExtRational> {
    if x.n() != p.n() {
        return Err(arg_err("torsion vector rank differs from n"));
    }
    Ok((0..p.n()).map(|i| p.slope_iter(i, x.order(i))).min().expect("n ≥ 1"))
}

/// A finite sub-`O`-module, kept as its full list of elements.
#[derive(Clone, Debug)]
pub struct FiniteSubgroup {
    level: usize,
    generators: Vec<TorsionVector>,
    elements: Vec<TorsionVector>,
}

impl FiniteSubgroup {
    /// Closure of `generators` under addition and `F_q[π]`, all at one level.
    pub fn generated_by(generators: Vec<TorsionVector>, n: usize, field: &FiniteField, cap: u64) -> Result<Self> {
        let level = generators.iter().map(|g| g.level()).max().unwrap_or(0);
        if generators.iter().any(|g| g.n() != n) {
            return Err(arg_err("generators of different ranks"));
        }
        let gens: Vec<TorsionVector> = generators.iter().map(|g| g.lift(level)).collect::<Result<_>>()?;
        let mut elements = vec![TorsionVector::zero(n, level)];
        let mut seen: HashSet<TorsionVector> = elements.iter().cloned().collect();
        // F_q-span of all π^j g
        for g in &gens {
            let mut h = g.clone();
            while !h.is_zero() {
                if !seen.contains(&h) {
                    let base = elements.clone();
                    for c in field.elements().skip(1) {
                        let ch = h.scale(c, field);
                        for e in &base {
                            let s = e.add(&ch, field);
                            if seen.insert(s.clone()) {
                                elements.push(s);
                                if elements.len() as u64 > cap {
                                    return Err(Error::Resource { needed: elements.len() as u128, cap });
                                }
                            }
                        }
                    }
                }
                h = h.times_pi();
            }
        }
        Ok(FiniteSubgroup { level, generators: gens, elements })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn generators(&self) -> &[TorsionVector] {
        &self.generators
    }

    pub fn elements(&self) -> &[TorsionVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &TorsionVector) -> bool {
        let level = self.level.max(x.level());
        let Ok(x) = x.lift(level) else { return false };
        self.elements.iter().any(|e| e.lift(level).is_ok_and(|e| e == x))
    }
}

/// `C = <π^{-a_1} ē_1, …, π^{-a_n} ē_n>`, enumerated.
pub fn subgroup(p: &NewtonPolygon, a: &[i64]) -> Result<FiniteSubgroup> {
    subgroup_with_cap(p, a, enum_cap())
}

pub fn subgroup_with_cap(p: &NewtonPolygon, a: &[i64], cap: u64) -> Result<FiniteSubgroup> {
    crate::hecke::check_index(p, a)?;
    let total: i64 = a.iter().sum();
    let needed = (p.q() as u128).checked_pow(total as u32).unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(Error::Resource { needed, cap });
    }
    let field = FiniteField::new(p.q())?;
    let level = *a.iter().max().expect("n ≥ 1") as usize;
    let gens = a
        .iter()
        .enumerate()
        .map(|(i, &ai)| TorsionVector::basis(p.n(), i, ai as usize).lift(level))
        .collect::<Result<Vec<_>>>()?;
    let c = FiniteSubgroup::generated_by(gens, p.n(), &field, cap)?;
    if c.len() as u128 != needed {
        return Err(invariant(format!("subgroup has {} elements, expected {needed}", c.len())));
    }
    Ok(c)
}

/// `Σ_{x ∈ C∖0} v(x)`.
pub fn kernel_valuation_sum(p: &NewtonPolygon, c: &FiniteSubgroup) -> Result<Rational> {
    let mut sum = Rational::zero();
    for x in c.elements().iter().filter(|x| !x.is_zero()) {
        sum += valuation(p, x)?.finite().cloned().ok_or_else(|| invariant("non-zero point of infinite valuation"))?;
    }
    Ok(sum)
}

/// `v(φ(x)) = Σ_{a ∈ C} v(x − a)` for the quotient `φ` by `C`; `+∞` when `x ∈ C`.
pub fn isogeny_point_valuation(p: &NewtonPolygon, c: &FiniteSubgroup, x: &TorsionVector) -> Result<ExtRational> {
    let field = FiniteField::new(p.q())?;
    let level = c.level().max(x.level());
    let x = x.lift(level)?;
    let mut sum = ExtRational::Finite(Rational::zero());
    for a in c.elements() {
        let d = x.sub(&a.lift(level)?, &field);
        sum = sum.plus(&valuation(p, &d)?);
    }
    Ok(sum)
}

/// Exponents `k(i, μ)` of the lower filtration `Fil_μ = ⊕ π^{-k(i,μ)} O e_i`.
pub fn lower_fil_exponents(p: &NewtonPolygon, mu: &Rational) -> Result<Vec<i64>> {
    if !mu.is_positive() {
        return Err(arg_err("μ must be positive"));
    }
    Ok((0..p.n()).map(|i| p.lower_exponent(i, mu)).collect())
}

/// Exponents `l(i, μ)` of the upper filtration `Fil^μ = ⊕ π^{l(i,μ)} O e_i`.
pub fn upper_fil_exponents(p: &NewtonPolygon, mu: &Rational) -> Result<Vec<i64>> {
    if !mu.is_positive() {
        return Err(arg_err("μ must be positive"));
    }
    Ok((0..p.n()).map(|i| p.upper_exponent(i, mu)).collect())
}

fn class_of(exponents: &[i64], sign: i64) -> ApartmentVertex {
    ApartmentVertex::new(exponents.iter().map(|k| sign * k).collect()).expect("n ≥ 1")
}

/// Values `λ_i^{(k)}` lying in `(lo, hi]`, sorted and deduplicated.
fn sauts_in(p: &NewtonPolygon, lo: &Rational, hi: Option<&Rational>) -> Vec<Rational> {
    let mut out = Vec::new();
    for i in 0..p.n() {
        let mut k = 1;
        loop {
            let v = p.slope_iter(i, k).finite().cloned().expect("k ≥ 1");
            if &v <= lo {
                break;
            }
            if hi.is_none_or(|h| &v <= h) {
                out.push(v);
            }
            k += 1;
        }
    }
    out.sort();
    out.dedup();
    out
}

/// One row of a filtration report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saut {
    pub mu: Rational,
    pub exponents: Vec<i64>,
    pub class: ApartmentVertex,
}

/// The ramification simplex: the chamber containing it, its wall flags, and
/// its vertices `{[Fil_μ] : 0 < μ ≤ λ_n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamSimplex {
    pub chamber: SimplexB,
    pub tight: Vec<bool>,
    pub vertices: Vec<ApartmentVertex>,
    pub sauts: Vec<Saut>,
}

pub fn ram_simplex(p: &NewtonPolygon) -> Result<RamSimplex> {
    let (chamber, tight) = chamber_of(p)?;
    let last = p.slope(p.n() - 1).clone();
    let lo = &last / p.ctx().pow(p.n() as i64);
    // the filtration is constant on (saut, next saut], and μ ↦ μ/q^n shifts every exponent by one
    let sauts: Vec<Saut> = sauts_in(p, &lo, Some(&last))
        .into_iter()
        .map(|mu| {
            let exponents = lower_fil_exponents(p, &mu)?;
            let class = class_of(&exponents, -1);
            Ok(Saut { mu, exponents, class })
        })
        .collect::<Result<_>>()?;
    let vertices: BTreeSet<ApartmentVertex> = sauts.iter().map(|s| s.class.clone()).collect();
    let vertices: Vec<ApartmentVertex> = vertices.into_iter().collect();
    let chamber_vertices = chamber.vertices(false)?;
    if !vertices.iter().all(|v| chamber_vertices.contains(v)) {
        return Err(invariant("ramification simplex leaves the chamber read off the slopes"));
    }
    Ok(RamSimplex { chamber, tight, vertices, sauts })
}

/// Classes of the lower and upper filtrations, each from a sweep over sauts,
/// checked against `⋃_{x∈S} x ∨ [Fil_∞]` and `⋃_{x∈S} x ∧ [Fil_∞]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationClasses {
    pub lower: BTreeSet<ApartmentVertex>,
    pub upper: BTreeSet<ApartmentVertex>,
    pub lower_sauts: Vec<Saut>,
    pub upper_sauts: Vec<Saut>,
}

pub fn filtration_class_sets(p: &NewtonPolygon) -> Result<FiltrationClasses> {
    let n = p.n();
    let ctx = p.ctx();
    let lo = p.slope(n - 1) / ctx.pow(n as i64);
    let mut lower_mus = sauts_in(p, &lo, None);
    lower_mus.push(p.slope(0) + int(1));
    let lower_sauts: Vec<Saut> = lower_mus
        .into_iter()
        .map(|mu| {
            let exponents = lower_fil_exponents(p, &mu)?;
            let class = class_of(&exponents, -1);
            Ok(Saut { mu, exponents, class })
        })
        .collect::<Result<_>>()?;

    // upper sauts are η^m(λ_i); beyond λ_1, η(μ) = μ + 1 shifts every exponent by one
    let top = p.eta_at(p.slope(0));
    let mut upper_mus = vec![p.slope(n - 1) / ctx.pow(n as i64)];
    for i in 0..n {
        let mut v = p.eta_at(p.slope(i));
        while v <= top {
            upper_mus.push(v.clone());
            v = p.eta_at(&v);
        }
    }
    upper_mus.sort();
    upper_mus.dedup();
    let upper_sauts: Vec<Saut> = upper_mus
        .into_iter()
        .map(|mu| {
            let exponents = upper_fil_exponents(p, &mu)?;
            let class = class_of(&exponents, 1);
            Ok(Saut { mu, exponents, class })
        })
        .collect::<Result<_>>()?;

    let lower: BTreeSet<ApartmentVertex> = lower_sauts.iter().map(|s| s.class.clone()).collect();
    let upper: BTreeSet<ApartmentVertex> = upper_sauts.iter().map(|s| s.class.clone()).collect();

    let s = ram_simplex(p)?;
    let origin = ApartmentVertex::origin(n);
    let mut lower_rec = BTreeSet::new();
    let mut upper_rec = BTreeSet::new();
    for x in &s.vertices {
        lower_rec.extend(join(x, &origin)?);
        upper_rec.extend(meet(x, &origin)?);
    }
    if lower != lower_rec {
        return Err(invariant("lower filtration classes differ from the join reconstruction"));
    }
    if upper != upper_rec {
        return Err(invariant("upper filtration classes differ from the meet reconstruction"));
    }
    Ok(FiltrationClasses { lower, upper, lower_sauts, upper_sauts })
}

/// `v(M[π^k])` for `M = span{e_j : j ≠ i}` by order profiles:
/// `Σ_{c ≠ 0} Π_j A(c_j) · min_j λ_j^{(c_j)}`.
fn profile_sum(p: &NewtonPolygon, i: usize, k: i64) -> Rational {
    let others: Vec<usize> = (0..p.n()).filter(|&j| j != i).collect();
    let mut values: Vec<Rational> = others
        .iter()
        .flat_map(|&j| (1..=k).map(move |c| p.slope_iter(j, c)))
        .filter_map(|v| v.finite().cloned())
        .collect();
    values.sort();
    values.dedup();
    values.reverse();
    // N(t): weighted number of profiles with every λ_j^{(c_j)} ≥ t
    let count = |t: &Rational| -> Rational {
        let e: i64 = others.iter().map(|&j| p.lower_exponent(j, t).min(k)).sum();
        p.ctx().pow(e)
    };
    let mut prev = int(1);
    let mut sum = Rational::zero();
    for t in values {
        let now = count(&t);
        sum += &t * (&now - &prev);
        prev = now;
    }
    sum
}

const MAX_LEVEL: i64 = 4096;

/// `‖ε_i^*‖` (0-based `i`): the stable value of
/// `F(k) = (q·v(M[π^k]) − v(M[π^{k−1}]))/(q − 1)` with `M = span{e_j : j ≠ i}`.
pub fn hodge_tate_norm(p: &NewtonPolygon, i: usize) -> Result<Rational> {
    if i >= p.n() {
        return Err(arg_err("coordinate index out of range"));
    }
    if p.n() == 1 {
        return Ok(Rational::zero());
    }
    let q = int(p.q() as i64);
    let bound = p.ctx().pow(p.n() as i64) * p.slope(p.n() - 1);
    let f = |k: i64| (&q * profile_sum(p, i, k) - profile_sum(p, i, k - 1)) / (&q - int(1));
    let mut k = 1;
    let mut current = f(1);
    while k < MAX_LEVEL {
        let next = f(k + 1);
        let top = (0..p.n()).filter(|&j| j != i).map(|j| p.slope_iter(j, k)).max().expect("n ≥ 2");
        if next == current && top <= ExtRational::Finite(bound.clone()) {
            return Ok(current);
        }
        current = next;
        k += 1;
    }
    Err(invariant("Hodge–Tate sequence did not stabilize"))
}

/// Valuations `v(φ_i)` of a covector in the dual adapted basis (`None` = `+∞`).
pub type Covector = [Option<i64>];

fn check_covector(p: &NewtonPolygon, phi: &Covector) -> Result<i64> {
    if phi.len() != p.n() {
        return Err(arg_err("covector rank differs from n"));
    }
    phi.iter().flatten().copied().min().ok_or_else(|| arg_err("the zero covector has no norm"))
}

/// Size of `ker φ ∩ Fil_t ∩ T[π^k]` as a power of `q`, for a covector normalized to `min v = 0`.
fn kernel_exponent(p: &NewtonPolygon, v: &Covector, k: i64, t: &Rational) -> i64 {
    let ks: Vec<i64> = (0..p.n()).map(|i| p.lower_exponent(i, t).min(k)).collect();
    let total: i64 = ks.iter().sum();
    let image = ks.iter().zip(v).filter_map(|(kk, vi)| vi.map(|x| kk - x)).max().unwrap_or(0).max(0);
    total - image
}

/// `‖φ‖` for any non-zero covector, from kernels of `φ` on `T[π^k]`.
pub fn hodge_tate_norm_covector(p: &NewtonPolygon, phi: &Covector) -> Result<Rational> {
    let m = check_covector(p, phi)?;
    let v: Vec<Option<i64>> = phi.iter().map(|x| x.map(|y| y - m)).collect();
    let ctx = p.ctx();
    let q = int(p.q() as i64);
    let s = |k: i64| -> Result<Rational> {
        let cuts =
            (0..p.n()).flat_map(|i| (1..=k).map(move |c| p.slope_iter(i, c))).filter_map(|x| x.finite().cloned());
        integrate_between_cuts(&int(0), &(p.slope(0) + int(1)), cuts, |t| {
            ctx.pow(kernel_exponent(p, &v, k, t)) - int(1)
        })
    };
    let bound = ExtRational::Finite(ctx.pow(p.n() as i64) * p.slope(p.n() - 1));
    let mut prev = s(0)?;
    let mut cur = s(1)?;
    let mut f = (&q * &cur - &prev) / (&q - int(1));
    let mut k = 1;
    while k < MAX_LEVEL {
        prev = cur;
        cur = s(k + 1)?;
        let next = (&q * &cur - &prev) / (&q - int(1));
        if next == f && p.slope_iter(0, k) <= bound {
            return Ok(f + int(m));
        }
        f = next;
        k += 1;
    }
    Err(invariant("Hodge–Tate sequence did not stabilize"))
}

/// Which filtration indexes the integral formula for `‖φ‖`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Indexing {
    Lower,
    Upper,
}

/// The integral expression for `‖φ‖` before and after calibration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralNorm {
    /// Integral term plus `‖φ‖_μ` (or `‖φ‖^μ`).
    pub raw: Rational,
    /// The constant making the first dual basis covector exact.
    pub constant: Rational,
    pub value: Rational,
}

fn integral_raw(p: &NewtonPolygon, phi: &Covector, mu: &Rational, indexing: Indexing) -> Result<Rational> {
    check_covector(p, phi)?;
    let n = p.n();
    let ctx = p.ctx();
    let q = int(p.q() as i64);
    let factor = &q / (&q - int(1));
    match indexing {
        Indexing::Lower => {
            if !mu.is_positive() || mu > p.slope(n - 1) {
                return Err(Error::Domain(format!("μ = {mu} must lie in (0, λ_n]")));
            }
            let norm_at = |t: &Rational| -> i64 {
                (0..n).filter_map(|i| phi[i].map(|v| v - p.lower_exponent(i, t))).min().expect("non-zero covector")
            };
            let at_mu = norm_at(mu);
            let lo = mu / ctx.pow(n as i64);
            let cuts = sauts_in(p, &lo, Some(mu));
            let integral = integrate_between_cuts(&lo, mu, cuts, |t| {
                let size: i64 = (0..n).map(|i| p.lower_exponent(i, t)).sum();
                ctx.pow(size + norm_at(t) - at_mu)
            })?;
            Ok(factor * integral + int(at_mu))
        }
        Indexing::Upper => {
            if mu - int(1) < *p.slope(0) {
                return Err(Error::Domain(format!("μ = {mu} must satisfy μ − 1 ≥ λ_1")));
            }
            let norm_at = |t: &Rational| -> i64 {
                (0..n).filter_map(|i| phi[i].map(|v| v + p.upper_exponent(i, t))).min().expect("non-zero covector")
            };
            let at_mu = norm_at(mu);
            let lo = mu - int(1);
            let mut cuts = Vec::new();
            for i in 0..n {
                let mut v = p.eta_at(p.slope(i));
                while &v <= mu {
                    cuts.push(v.clone());
                    v = p.eta_at(&v);
                }
            }
            let integral = integrate_between_cuts(&lo, mu, cuts, |t| ctx.pow(norm_at(t) - at_mu))?;
            Ok(factor * integral + int(at_mu))
        }
    }
}

/// `‖φ‖` from the integral formula at `μ`, calibrated on `ε_1^*`.
pub fn hodge_tate_norm_integral(
    p: &NewtonPolygon,
    phi: &Covector,
    mu: &Rational,
    indexing: Indexing,
) -> Result<IntegralNorm> {
    let raw = integral_raw(p, phi, mu, indexing)?;
    let mut basis = vec![None; p.n()];
    basis[0] = Some(0);
    let constant = hodge_tate_norm(p, 0)? - integral_raw(p, &basis, mu, indexing)?;
    let value = &raw + &constant;
    Ok(IntegralNorm { raw, constant, value })
}

/// Parses `sub a=<a_1>,...,<a_n>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec(pub Vec<i64>);

impl FromStr for SubgroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields = crate::rational::tagged_fields(s, "sub")?;
        crate::rational::only_keys(&fields, &["a"])?;
        let a = parse_i64_list(crate::rational::field(&fields, "a")?)?;
        if a.is_empty() || a.iter().any(|&x| !(0..=1 << 20).contains(&x)) {
            return Err(parse_err("exponents must be non-negative and moderate"));
        }
        Ok(SubgroupSpec(a))
    }
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sub a={}", crate::rational::join_list(&self.0, ","))
    }
}
