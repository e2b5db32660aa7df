//! The piecewise-affine bijection `ψ` from polygon space onto the quartier
//! `Q = {x_1 ≤ … ≤ x_n}`, and what it is used for: canonical subgroups, Hecke
//! orbits, the Gross–Hopkins polytope, fundamental domains in the fundamental
//! chamber, and the Hodge–Tate point.
//!
//! `ψ` is pinned down by `ψ(P(x)) = x` on vertices and affinity on each
//! chamber, so it is computed by a barycentric solve against vertex polygons.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{Signed, Zero};

use crate::building::{pairs, ApartmentPoint, ApartmentVertex, SimplexB};
use crate::error::{arg_err, invariant, Error, Result};
use crate::hecke::{chamber_of, vertex_polygon};
use crate::linalg::{barycentric, Solution};
use crate::newton::{Context, NewtonPolygon};
use crate::polyhedron::{check_dim, feasible, Halfspace, Halfspaces};
use crate::rational::{int, rat, ExtRational, Rational};
use crate::torsion::{hodge_tate_norm, ram_simplex};

fn chart(c: &[Rational]) -> Vec<Rational> {
    c.iter().map(|x| x - &c[0]).collect()
}

fn vertex_chart(v: &ApartmentVertex) -> Vec<Rational> {
    chart(v.to_point().coords())
}

fn unique_weights(sol: Solution, what: &str) -> Result<Vec<Rational>> {
    match sol {
        Solution::Unique(t) if t.iter().all(|x| !x.is_negative()) => Ok(t),
        Solution::Unique(_) => Err(invariant(format!("{what}: barycentric weights are negative"))),
        Solution::Inconsistent => Err(invariant(format!("{what}: point is not in the affine span"))),
        Solution::Underdetermined => Err(invariant(format!("{what}: vertices are affinely dependent"))),
    }
}

/// `ψ(P)`: barycentric coordinates of `P` against the vertex polygons of its chamber.
pub fn psi(p: &NewtonPolygon) -> Result<ApartmentPoint> {
    let (s, _) = chamber_of(p)?;
    let vertices = s.vertices(false)?;
    let polys = vertices
        .iter()
        .map(|v| vertex_polygon(p.ctx(), v).map(|vp| vp.slopes().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let t = unique_weights(barycentric(&polys, p.slopes()), "psi")?;
    ApartmentPoint::combination(&t, &vertices)
}

/// `ψ^{-1}(x)` for `x` in the closed quartier.
pub fn psi_inv(ctx: Context, x: &ApartmentPoint) -> Result<NewtonPolygon> {
    if x.n() != ctx.n {
        return Err(arg_err("point rank differs from n"));
    }
    if !x.in_quartier() {
        return Err(Error::Domain(format!("{x} is not in the quartier")));
    }
    let b = pairs(ctx.n)
        .map(|(i, j)| {
            let f = x.alpha(i, j)?.floor().to_integer();
            i64::try_from(f).map_err(|_| arg_err("coordinate too large"))
        })
        .collect::<Result<Vec<_>>>()?;
    let s = SimplexB::new(ctx.n, b).map_err(|e| invariant(format!("floor chamber is invalid: {e}")))?;
    let vertices = s.vertices(false)?;
    let pts: Vec<Vec<Rational>> = vertices.iter().map(vertex_chart).collect();
    let t = unique_weights(barycentric(&pts, &chart(x.coords())), "psi_inv")?;
    let polys = vertices.iter().map(|v| vertex_polygon(ctx, v)).collect::<Result<Vec<_>>>()?;
    NewtonPolygon::barycenter(&t, &polys)
}

/// Existence of the canonical subgroup of rank `r` and level `k`
/// (`r` is 0-based, pairing slopes `r` and `r + 1`): `λ_r^{(k)} > λ_{r+1}`,
/// checked against the half-apartment `α_{r,r+1}(ψ(P)) > k − 1`.
pub fn canonical_subgroup_exists(p: &NewtonPolygon, r: usize, k: i64) -> Result<bool> {
    if r + 1 >= p.n() {
        return Err(arg_err("rank must be below n"));
    }
    if k < 1 {
        return Err(arg_err("level must be at least 1"));
    }
    let by_slopes = p.slope_iter(r, k) > ExtRational::Finite(p.slope(r + 1).clone());
    let by_point = psi(p)?.alpha(r, r + 1)? > int(k - 1);
    if by_slopes != by_point {
        return Err(invariant("canonical subgroup criterion disagrees with the half-apartment test"));
    }
    Ok(by_slopes)
}

/// Quartier points of the affine Weyl orbit of `x` reachable by translations with `|t_i| ≤ bound`.
pub fn hecke_orbit(x: &ApartmentVertex, bound: i64) -> Result<BTreeSet<ApartmentVertex>> {
    if !x.in_quartier() {
        return Err(Error::Domain(format!("{x} is not in the quartier")));
    }
    if !(0..=16).contains(&bound) {
        return Err(arg_err("bound must be between 0 and 16"));
    }
    let n = x.n();
    let mut out = BTreeSet::new();
    for t in (0..n).map(|_| -bound..=bound).multi_cartesian_product() {
        out.insert(x.translate(&t)?.pr_q());
    }
    Ok(out)
}

/// One extremal point of the Gross–Hopkins polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhPoint {
    /// The subset `A ⊆ {1, …, n−1}`, 1-based.
    pub subset: Vec<usize>,
    pub polygon: NewtonPolygon,
    /// `a_0` followed by `a_k` for each element of `A`.
    pub coefficients: Vec<Rational>,
}

/// The `2^{n−1}` extremal polygons `P_A` with their decomposition
/// `P_A = a_0 P_0 + Σ a_k P(ω_{i_k})`, checked exactly.
pub fn gh_polytope(ctx: Context) -> Result<Vec<GhPoint>> {
    let n = ctx.n;
    if n > 16 {
        return Err(arg_err("n too large for the Gross–Hopkins enumeration"));
    }
    let nn = int(n as i64);
    let mut out = Vec::new();
    for subset in (1..n).powerset() {
        let v: Vec<Rational> =
            (1..n).map(|i| if subset.contains(&i) { int(1) - rat(i as i64, n as i64) } else { int(1) }).collect();
        let polygon = NewtonPolygon::from_coordinates(ctx, &v)?;
        let mut idx = vec![0usize];
        idx.extend(&subset);
        idx.push(n);
        let qp = |i: usize| ctx.pow(i as i64);
        let gap = |a: usize, b: usize| rat((b - a) as i64, 1) / (qp(b) - qp(a));
        let a_k: Vec<Rational> = (1..idx.len() - 1)
            .map(|k| qp(idx[k]) / &nn * (gap(idx[k - 1], idx[k]) - gap(idx[k], idx[k + 1])))
            .collect();
        let a0 = int(1) - a_k.iter().sum::<Rational>();
        let mut coefficients = vec![a0];
        coefficients.extend(a_k);
        let mut polys = vec![ctx.flat()];
        for &i in &subset {
            polys.push(vertex_polygon(ctx, &ApartmentVertex::omega(n, i))?);
        }
        if NewtonPolygon::barycenter(&coefficients, &polys)? != polygon {
            return Err(invariant(format!("Gross–Hopkins coefficients do not reproduce P_A for A = {subset:?}")));
        }
        out.push(GhPoint { subset, polygon, coefficients });
    }
    Ok(out)
}

/// Outcome of a fundamental-domain test inside the fundamental chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainCheck {
    pub covers: bool,
    /// For each rotation `ρ^r`, the system describing `D ∩ ρ^r D` and whether it is non-empty.
    pub boundaries: Vec<(Halfspaces, bool)>,
}

/// The rotation `ρ^r` applied to a region given in barycentric coordinates
/// `(t_0, …, t_{n−1})` over `(ω_0, …, ω_{n−1})`.
pub fn rotate_region(d: &Halfspaces, r: usize) -> Halfspaces {
    let n = d.dim;
    let rows = d
        .rows
        .iter()
        .map(|h| Halfspace {
            coeffs: (0..n).map(|m| h.coeffs[(m + r) % n].clone()).collect(),
            bound: h.bound.clone(),
            strict: h.strict,
        })
        .collect();
    Halfspaces { dim: n, rows }
}

fn simplex_rows(n: usize) -> Vec<Halfspace> {
    let mut rows: Vec<Halfspace> = (0..n)
        .map(|i| {
            let mut c = vec![Rational::zero(); n];
            c[i] = int(-1);
            Halfspace::le(c, Rational::zero())
        })
        .collect();
    rows.push(Halfspace::le(vec![int(1); n], int(1)));
    rows.push(Halfspace::le(vec![int(-1); n], int(-1)));
    rows
}

/// Whether the rotations of `D` cover the fundamental chamber, and the faces `D ∩ ρ^r D`.
pub fn fundamental_domain_check(d: &Halfspaces, n: usize) -> Result<DomainCheck> {
    check_dim(d, n)?;
    if d.rows.len() > 12 {
        return Err(arg_err("at most 12 inequalities are supported"));
    }
    let rotated: Vec<Halfspaces> = (0..n).map(|r| rotate_region(d, r)).collect();
    let base = simplex_rows(n);
    // a point escapes the union iff it violates some row of every rotated copy
    let mut covers = true;
    if !d.rows.is_empty() {
        for choice in rotated.iter().map(|h| h.rows.iter()).multi_cartesian_product() {
            let mut system = base.clone();
            system.extend(choice.into_iter().map(Halfspace::complement));
            if feasible(&system, n) {
                covers = false;
                break;
            }
        }
    }
    let boundaries = rotated
        .iter()
        .map(|rd| {
            let mut rows = d.rows.clone();
            rows.extend(rd.rows.iter().cloned());
            rows.sort();
            rows.dedup();
            let mut system = base.clone();
            system.extend(rows.iter().cloned());
            let nonempty = feasible(&system, n);
            (Halfspaces { dim: n, rows }, nonempty)
        })
        .collect();
    Ok(DomainCheck { covers, boundaries })
}

/// The Hodge–Tate point: coordinates `‖ε_i^*‖`, canonicalized. It lies in the
/// realization of the ramification simplex `S` (equivalently its negative lies
/// in `|S^∨|`); that membership is checked.
pub fn hodge_tate_point(p: &NewtonPolygon) -> Result<ApartmentPoint> {
    if p.n() < 2 {
        return Err(arg_err("the Hodge–Tate point needs n ≥ 2"));
    }
    let c = (0..p.n()).map(|i| hodge_tate_norm(p, i)).collect::<Result<Vec<_>>>()?;
    let point = ApartmentPoint::new(c)?;
    let s = ram_simplex(p)?;
    let pts: Vec<Vec<Rational>> = s.vertices.iter().map(vertex_chart).collect();
    unique_weights(barycentric(&pts, &chart(point.coords())), "Hodge–Tate point")?;
    Ok(point)
}
