//! The standard apartment of the Bruhat–Tits building of PGL_n.
//!
//! A vertex is the homothety class of `<π^{c_1} e_1, …, π^{c_n} e_n>`, stored as
//! the integer vector `c` with minimum 0. Points of the geometric realization
//! are rational vectors with the same normalization. Roots are
//! `α_ij(x) = x_j − x_i` for `i < j`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_traits::Zero;

use crate::error::{arg_err, invariant, parse_err, Error, Result};
use crate::rational::{int, join_list, parse_i64, parse_i64_list, parse_rational_list, strip_delims, Rational};

/// A lattice class in the standard apartment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApartmentVertex {
    c: Vec<i64>,
}

impl ApartmentVertex {
    /// Canonicalizes any representative (subtracts the minimum).
    pub fn new(mut c: Vec<i64>) -> Result<Self> {
        let m = *c.iter().min().ok_or_else(|| arg_err("a vertex needs at least one coordinate"))?;
        for x in &mut c {
            *x -= m;
        }
        Ok(ApartmentVertex { c })
    }

    pub fn origin(n: usize) -> Self {
        ApartmentVertex { c: vec![0; n] }
    }

    /// `ω_i = (0,…,0,1,…,1)` with `i` zeros.
    pub fn omega(n: usize, i: usize) -> Self {
        ApartmentVertex::new((0..n).map(|k| i64::from(k >= i)).collect()).expect("n ≥ 1")
    }

    pub fn coords(&self) -> &[i64] {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// `α_ij(x) = x_j − x_i` (0-based, any `i ≠ j`).
    pub fn alpha(&self, i: usize, j: usize) -> Result<i64> {
        check_root(self.n(), i, j)?;
        Ok(self.c[j] - self.c[i])
    }

    pub fn to_point(&self) -> ApartmentPoint {
        ApartmentPoint { c: self.c.iter().map(|&x| int(x)).collect() }
    }

    pub fn in_quartier(&self) -> bool {
        self.c.windows(2).all(|w| w[0] <= w[1])
    }

    /// Sorted ascending representative: the Cartan projection to the quartier.
    pub fn pr_q(&self) -> Self {
        let mut c = self.c.clone();
        c.sort();
        ApartmentVertex { c }
    }

    pub fn translate(&self, a: &[i64]) -> Result<Self> {
        check_len(self.n(), a.len())?;
        ApartmentVertex::new(self.c.iter().zip(a).map(|(x, t)| x + t).collect())
    }

    /// Class of the dual lattice.
    pub fn dual(&self) -> Self {
        ApartmentVertex::new(self.c.iter().map(|x| -x).collect()).expect("non-empty")
    }

    /// `[Λ_0 : Λ] mod n` relative to `origin`, well defined on classes.
    pub fn label(&self, origin: &ApartmentVertex) -> Result<i64> {
        check_len(self.n(), origin.n())?;
        let s: i64 = self.c.iter().zip(&origin.c).map(|(a, b)| a - b).sum();
        Ok(s.rem_euclid(self.n() as i64))
    }
}

/// A point of the geometric realization `ℝ^n/ℝ·(1,…,1)` with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApartmentPoint {
    c: Vec<Rational>,
}

impl ApartmentPoint {
    pub fn new(mut c: Vec<Rational>) -> Result<Self> {
        let m = c.iter().min().cloned().ok_or_else(|| arg_err("a point needs at least one coordinate"))?;
        for x in &mut c {
            *x -= &m;
        }
        Ok(ApartmentPoint { c })
    }

    pub fn origin(n: usize) -> Self {
        ApartmentPoint { c: vec![Rational::zero(); n] }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn alpha(&self, i: usize, j: usize) -> Result<Rational> {
        check_root(self.n(), i, j)?;
        Ok(&self.c[j] - &self.c[i])
    }

    pub fn in_quartier(&self) -> bool {
        self.c.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn pr_q(&self) -> Self {
        let mut c = self.c.clone();
        c.sort();
        ApartmentPoint { c }
    }

    pub fn translate(&self, a: &[i64]) -> Result<Self> {
        check_len(self.n(), a.len())?;
        ApartmentPoint::new(self.c.iter().zip(a).map(|(x, t)| x + int(*t)).collect())
    }

    pub fn dual(&self) -> Self {
        ApartmentPoint::new(self.c.iter().map(|x| -x).collect()).expect("non-empty")
    }

    /// `Σ t_k x_k` for barycentric weights over vertices (weights need not be checked here).
    pub fn combination(weights: &[Rational], vertices: &[ApartmentVertex]) -> Result<Self> {
        let n = vertices.first().ok_or_else(|| arg_err("no vertices"))?.n();
        let mut c = vec![Rational::zero(); n];
        for (w, v) in weights.iter().zip(vertices) {
            check_len(n, v.n())?;
            for (acc, x) in c.iter_mut().zip(&v.c) {
                *acc += w * int(*x);
            }
        }
        ApartmentPoint::new(c)
    }

    /// The vertex with these coordinates, if they are integers.
    pub fn as_vertex(&self) -> Option<ApartmentVertex> {
        if self.c.iter().all(|x| x.is_integer()) {
            let c = self.c.iter().map(|x| i64::try_from(x.to_integer()).ok()).collect::<Option<Vec<_>>>()?;
            Some(ApartmentVertex { c })
        } else {
            None
        }
    }
}

fn check_root(n: usize, i: usize, j: usize) -> Result<()> {
    if i >= n || j >= n || i == j {
        return Err(arg_err(format!("no root α_({},{}) in rank {n}", i + 1, j + 1)));
    }
    Ok(())
}

fn check_len(n: usize, m: usize) -> Result<()> {
    if n != m {
        return Err(arg_err(format!("dimension mismatch: {n} vs {m}")));
    }
    Ok(())
}

/// Position of the pair `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// All pairs `i < j` in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// A maximal simplex, encoded by the integers `b_ij` such that every vertex
/// satisfies `α_ij(x) ∈ {b_ij, b_ij + 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexB {
    n: usize,
    b: Vec<i64>,
}

impl SimplexB {
    /// `b` lists `b_ij` for `i < j` in lexicographic order.
    pub fn new(n: usize, b: Vec<i64>) -> Result<Self> {
        if n < 1 {
            return Err(arg_err("rank must be at least 1"));
        }
        if b.len() != n * (n - 1) / 2 {
            return Err(arg_err(format!("rank {n} needs {} entries, got {}", n * (n - 1) / 2, b.len())));
        }
        let s = SimplexB { n, b };
        for (i, j, k) in (0..n).tuple_combinations() {
            let sum = s.get(i, j) + s.get(j, k);
            let bik = s.get(i, k);
            if bik != sum && bik != sum + 1 {
                return Err(arg_err(format!(
                    "b_{}{} = {bik} is not b_{}{} + b_{}{} or one more",
                    i + 1,
                    k + 1,
                    i + 1,
                    j + 1,
                    j + 1,
                    k + 1
                )));
            }
        }
        Ok(s)
    }

    /// The fundamental chamber, all `b_ij = 0`.
    pub fn fundamental(n: usize) -> Self {
        SimplexB { n, b: vec![0; n * (n - 1) / 2] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.b[pair_index(self.n, i, j)]
    }

    /// The `n` vertices, sorted; with `restrict_to_q`, only those in the quartier.
    pub fn vertices(&self, restrict_to_q: bool) -> Result<Vec<ApartmentVertex>> {
        let n = self.n;
        let mut out = Vec::new();
        // fix x_0 = 0; then x_j = α_0j ∈ {b_0j, b_0j + 1}
        for mask in 0u64..(1u64 << (n - 1)) {
            let mut x = vec![0i64; n];
            for (j, xj) in x.iter_mut().enumerate().skip(1) {
                *xj = self.get(0, j) + ((mask >> (j - 1)) & 1) as i64;
            }
            let ok = pairs(n).all(|(i, j)| {
                let a = x[j] - x[i];
                a == self.get(i, j) || a == self.get(i, j) + 1
            });
            if ok {
                out.push(ApartmentVertex::new(x)?);
            }
        }
        out.sort();
        out.dedup();
        if out.len() != n {
            return Err(invariant(format!("simplex has {} vertices, expected {n}", out.len())));
        }
        if restrict_to_q {
            out.retain(|v| v.in_quartier());
        }
        Ok(out)
    }

    /// Recovers `b` from the vertex set of a maximal simplex.
    pub fn of_vertices(vertices: &[ApartmentVertex]) -> Result<Self> {
        let n = vertices.first().ok_or_else(|| arg_err("empty vertex set"))?.n();
        if vertices.iter().any(|v| v.n() != n) {
            return Err(arg_err("vertices of different ranks"));
        }
        let b = pairs(n).map(|(i, j)| vertices.iter().map(|v| v.c[j] - v.c[i]).min().expect("non-empty")).collect();
        let s = SimplexB::new(n, b).map_err(|_| arg_err("vertex set is not a maximal simplex"))?;
        let mut given: Vec<ApartmentVertex> = vertices.to_vec();
        given.sort();
        given.dedup();
        if s.vertices(false)? != given {
            return Err(arg_err("vertex set is not a maximal simplex"));
        }
        Ok(s)
    }

    /// Whether a point lies in the closed geometric realization.
    pub fn contains_point(&self, x: &ApartmentPoint) -> bool {
        x.n() == self.n
            && pairs(self.n).all(|(i, j)| {
                let a = &x.c[j] - &x.c[i];
                let b = int(self.get(i, j));
                a >= b && a <= &b + int(1)
            })
    }

    /// The dual simplex (vertices dualized).
    pub fn dual(&self) -> Result<Self> {
        let vs: Vec<ApartmentVertex> = self.vertices(false)?.iter().map(|v| v.dual()).collect();
        Self::of_vertices(&vs)
    }
}

/// `x ∨ y`: classes of `Λ_1 + Λ_2` over all representatives (coordinate-wise minimum).
pub fn join(x: &ApartmentVertex, y: &ApartmentVertex) -> Result<BTreeSet<ApartmentVertex>> {
    combine(x, y, |a, b| a.min(b))
}

/// `x ∧ y`: classes of `Λ_1 ∩ Λ_2` over all representatives (coordinate-wise maximum).
pub fn meet(x: &ApartmentVertex, y: &ApartmentVertex) -> Result<BTreeSet<ApartmentVertex>> {
    combine(x, y, |a, b| a.max(b))
}

fn combine(
    x: &ApartmentVertex,
    y: &ApartmentVertex,
    op: impl Fn(i64, i64) -> i64,
) -> Result<BTreeSet<ApartmentVertex>> {
    check_len(x.n(), y.n())?;
    let diffs: Vec<i64> = x.c.iter().zip(&y.c).map(|(a, b)| b - a).collect();
    let lo = diffs.iter().min().expect("non-empty") - 1;
    let hi = diffs.iter().max().expect("non-empty") + 1;
    (lo..=hi).map(|t| ApartmentVertex::new(x.c.iter().zip(&y.c).map(|(a, b)| op(a + t, *b)).collect())).collect()
}

/// Intersection of all half-apartments `α_ij ≥ k` containing `m`.
pub fn enclos(m: &[ApartmentVertex]) -> Result<BTreeSet<ApartmentVertex>> {
    let n = m.first().ok_or_else(|| arg_err("enclos of an empty set"))?.n();
    if m.iter().any(|v| v.n() != n) {
        return Err(arg_err("vertices of different ranks"));
    }
    let bounds = |i: usize, j: usize| -> (i64, i64) {
        let vals = m.iter().map(|v| v.c[j] - v.c[i]);
        (vals.clone().min().expect("non-empty"), vals.max().expect("non-empty"))
    };
    let ranges: Vec<Vec<i64>> = (1..n)
        .map(|j| {
            let (lo, hi) = bounds(0, j);
            (lo..=hi).collect()
        })
        .collect();
    let mut out = BTreeSet::new();
    for tail in ranges.into_iter().multi_cartesian_product() {
        let mut x = vec![0];
        x.extend(tail);
        let inside = pairs(n).all(|(i, j)| {
            let (lo, hi) = bounds(i, j);
            (lo..=hi).contains(&(x[j] - x[i]))
        });
        if inside {
            out.insert(ApartmentVertex::new(x)?);
        }
    }
    if n == 1 {
        out.insert(ApartmentVertex::origin(1));
    }
    Ok(out)
}

/// An element of `S_n ⋉ ℤ^n` acting by `(w·x)_i = x_{perm[i]} + shift[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineWeyl {
    perm: Vec<usize>,
    shift: Vec<i64>,
}

impl AffineWeyl {
    pub fn new(perm: Vec<usize>, shift: Vec<i64>) -> Result<Self> {
        check_len(perm.len(), shift.len())?;
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(arg_err("not a permutation"));
            }
            seen[p] = true;
        }
        Ok(AffineWeyl { perm, shift })
    }

    pub fn identity(n: usize) -> Self {
        AffineWeyl { perm: (0..n).collect(), shift: vec![0; n] }
    }

    /// `ρ(a) = (a_2, …, a_n, a_1 + 1)`, the rotation of the fundamental chamber.
    pub fn rotation(n: usize) -> Self {
        let perm = (0..n).map(|i| (i + 1) % n).collect();
        let mut shift = vec![0; n];
        shift[n - 1] = 1;
        AffineWeyl { perm, shift }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn shift(&self) -> &[i64] {
        &self.shift
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineWeyl) -> AffineWeyl {
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let shift = self.perm.iter().zip(&self.shift).map(|(&p, s)| other.shift[p] + s).collect();
        AffineWeyl { perm, shift }
    }

    pub fn inverse(&self) -> AffineWeyl {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut shift = vec![0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
            shift[p] = -self.shift[i];
        }
        AffineWeyl { perm, shift }
    }

    pub fn act(&self, x: &ApartmentVertex) -> ApartmentVertex {
        let c = self.perm.iter().zip(&self.shift).map(|(&p, s)| x.c[p] + s).collect();
        ApartmentVertex::new(c).expect("non-empty")
    }

    pub fn act_point(&self, x: &ApartmentPoint) -> ApartmentPoint {
        let c = self.perm.iter().zip(&self.shift).map(|(&p, s)| &x.c[p] + int(*s)).collect();
        ApartmentPoint::new(c).expect("non-empty")
    }
}

/// The cyclic group of label-rotating self-maps of a chamber, as `n` affine
/// Weyl elements `g^0, g^1, …, g^{n−1}` where `g` raises every label by one.
pub fn rotation_group(chamber: &[ApartmentVertex]) -> Result<Vec<AffineWeyl>> {
    let s = SimplexB::of_vertices(chamber).map_err(|_| arg_err("rotation_group expects a chamber"))?;
    let n = s.n();
    let target: BTreeSet<ApartmentVertex> = s.vertices(false)?.into_iter().collect();
    let base = SimplexB::fundamental(n).vertices(false)?;
    let mut carrier = None;
    'search: for y in &target {
        for perm in (0..n).permutations(n) {
            let w = AffineWeyl { perm, shift: y.c.clone() };
            let image: BTreeSet<ApartmentVertex> = base.iter().map(|v| w.act(v)).collect();
            if image == target {
                carrier = Some(w);
                break 'search;
            }
        }
    }
    let w =
        carrier.ok_or_else(|| invariant("no affine Weyl element carries the fundamental chamber to this chamber"))?;
    let g = w.compose(&AffineWeyl::rotation(n)).compose(&w.inverse());
    let origin = ApartmentVertex::origin(n);
    let mut out = Vec::with_capacity(n);
    let mut acc = AffineWeyl::identity(n);
    for r in 0..n {
        let image: BTreeSet<ApartmentVertex> = target.iter().map(|v| acc.act(v)).collect();
        if image != target {
            return Err(invariant("rotation does not preserve the chamber"));
        }
        for v in &target {
            let shift = (acc.act(v).label(&origin)? - v.label(&origin)?).rem_euclid(n as i64);
            if shift != r as i64 % n as i64 {
                return Err(invariant("rotation does not shift labels uniformly"));
            }
        }
        out.push(acc.clone());
        acc = g.compose(&acc);
    }
    Ok(out)
}

/// The permutation of `vertices` (by position) induced by `w`.
pub fn induced_permutation(w: &AffineWeyl, vertices: &[ApartmentVertex]) -> Result<Vec<usize>> {
    vertices
        .iter()
        .map(|v| {
            let img = w.act(v);
            vertices.iter().position(|u| u == &img).ok_or_else(|| arg_err("the map does not preserve the vertex set"))
        })
        .collect()
}

impl fmt::Display for ApartmentVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vtx {}", join_list(&self.c, ","))
    }
}

impl FromStr for ApartmentVertex {
    type Err = Error;

    /// Accepts `vtx 0,1` or a bare list `0,1`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim();
        let body = body.strip_prefix("vtx").map(str::trim).unwrap_or(body);
        let c = parse_i64_list(body)?;
        if c.iter().any(|x| x.unsigned_abs() > 1 << 40) {
            return Err(parse_err("vertex coordinate too large"));
        }
        ApartmentVertex::new(c).map_err(|e| parse_err(e.to_string()))
    }
}

impl fmt::Display for ApartmentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pt {}", join_list(&self.c, ","))
    }
}

impl FromStr for ApartmentPoint {
    type Err = Error;

    /// Accepts `pt 0,1/2` or a bare list.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim();
        let body = body.strip_prefix("pt").map(str::trim).unwrap_or(body);
        ApartmentPoint::new(parse_rational_list(body)?).map_err(|e| parse_err(e.to_string()))
    }
}

impl fmt::Display for SimplexB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "simplexB n={} b=({})", self.n, join_list(&self.b, ","))
    }
}

impl FromStr for SimplexB {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields = crate::rational::tagged_fields(s, "simplexB")?;
        crate::rational::only_keys(&fields, &["n", "b"])?;
        let n = parse_i64(crate::rational::field(&fields, "n")?)?;
        if !(1..=64).contains(&n) {
            return Err(parse_err("rank out of range"));
        }
        let b = parse_i64_list(strip_delims(crate::rational::field(&fields, "b")?, '(', ')')?)?;
        SimplexB::new(n as usize, b).map_err(|e| parse_err(e.to_string()))
    }
}
