//! Hecke operators `(π^{-a_1}, …, π^{-a_n})` on polygon space in closed form.
//!
//! An operator quotients by the finite subgroup generated by the `π^{-a_i} ē_i`
//! of an adapted basis. Every valuation it produces is a sum over that
//! subgroup, evaluated here by counting profiles rather than elements.

use itertools::Itertools;
use num_traits::Zero;

use crate::building::{pairs, ApartmentVertex, SimplexB};
use crate::error::{arg_err, invariant, Result};
use crate::newton::{Context, NewtonPolygon};
use crate::plconvex::StepFun;
use crate::rational::{int, ExtRational, Rational};

/// Number of elements of exact order `π^k` in `F/O`: `q^k − q^{k−1}`, and 1 for `k = 0`.
pub fn a_count(ctx: Context, k: i64) -> Result<Rational> {
    match k {
        k if k < 0 => Err(arg_err("A(k) needs k ≥ 0")),
        0 => Ok(int(1)),
        k => Ok(ctx.weight(k as usize)),
    }
}

pub(crate) fn check_index(p: &NewtonPolygon, a: &[i64]) -> Result<()> {
    if a.len() != p.n() {
        return Err(arg_err(format!("expected {} exponents, got {}", p.n(), a.len())));
    }
    if a.iter().any(|&x| x < 0) {
        return Err(arg_err("Hecke exponents must be non-negative"));
    }
    if a.iter().any(|&x| x > 1 << 20) {
        return Err(arg_err("Hecke exponent too large"));
    }
    Ok(())
}

/// `∫_lo^hi f`, where `f` is constant on every open interval between
/// consecutive `cuts` and is sampled at the right end of each interval.
pub(crate) fn integrate_between_cuts(
    lo: &Rational,
    hi: &Rational,
    cuts: impl IntoIterator<Item = Rational>,
    f: impl Fn(&Rational) -> Rational,
) -> Result<Rational> {
    if lo >= hi {
        return Ok(Rational::zero());
    }
    let mut xs: Vec<Rational> = cuts.into_iter().filter(|c| c > lo && c < hi).collect();
    xs.push(lo.clone());
    xs.push(hi.clone());
    xs.sort();
    xs.dedup();
    let steps = xs.windows(2).map(|w| (w[0].clone(), f(&w[1]))).collect();
    StepFun::new(steps, Some(hi.clone()))?.integrate(lo, hi)
}

/// `v(φ(x))` for `x = Σ_{i∈I} π^{-order_i} e_i` and `φ` the quotient by the
/// subgroup of index `a`: `q^{Σ_I a_i} ∫_0^c Π_{j∉I} q^{min(a_j, k(j,t))} dt`
/// with `c = min_{i∈I} λ_i^{(order_i)}`. Indices are 0-based.
pub fn point_valuation_formula(p: &NewtonPolygon, a: &[i64], support: &[usize], orders: &[i64]) -> Result<Rational> {
    check_index(p, a)?;
    if support.is_empty() || support.len() != orders.len() {
        return Err(arg_err("need a non-empty support with one order per index"));
    }
    if !support.iter().all_unique() || support.iter().any(|&i| i >= p.n()) {
        return Err(arg_err("support indices must be distinct and in range"));
    }
    if support.iter().zip(orders).any(|(&i, &o)| o <= a[i]) {
        return Err(arg_err("each order must exceed the corresponding exponent"));
    }
    let c = support
        .iter()
        .zip(orders)
        .map(|(&i, &o)| p.slope_iter(i, o))
        .min()
        .expect("non-empty")
        .finite()
        .cloned()
        .expect("orders are positive");
    let outside: Vec<usize> = (0..p.n()).filter(|j| !support.contains(j)).collect();
    let cuts =
        outside.iter().flat_map(|&j| (1..=a[j]).map(move |k| p.slope_iter(j, k))).filter_map(|v| v.finite().cloned());
    let ctx = p.ctx();
    let integral = integrate_between_cuts(&int(0), &c, cuts, |t| {
        let e: i64 = outside.iter().map(|&j| a[j].min(p.lower_exponent(j, t))).sum();
        ctx.pow(e)
    })?;
    let mult: i64 = support.iter().map(|&i| a[i]).sum();
    Ok(ctx.pow(mult) * integral)
}

/// Result of a Hecke operator: the new polygon and the permutation `σ`
/// (0-based, `sigma[i]` is the old index feeding slope `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeImage {
    pub polygon: NewtonPolygon,
    pub sigma: Vec<usize>,
}

/// The permutation sorting `λ_i^{(a_i+1)}` non-increasingly, ties broken by
/// `λ_i^{(a_i)}` and then by index.
///
/// Every new slope is `∫_0^{λ_i^{(a_i+1)}}` of one common integrand, so this
/// order is the one that yields a polygon. Sorting on `λ_i^{(a_i)}` alone is
/// not enough once some `a_i = 0`, since `λ^{(0)} = +∞` hides the order.
pub fn sorting_permutation(p: &NewtonPolygon, a: &[i64]) -> Vec<usize> {
    let keys: Vec<(ExtRational, ExtRational)> =
        (0..p.n()).map(|i| (p.slope_iter(i, a[i] + 1), p.slope_iter(i, a[i]))).collect();
    let mut sigma: Vec<usize> = (0..p.n()).collect();
    sigma.sort_by(|&x, &y| keys[y].cmp(&keys[x]));
    sigma
}

/// `(π^{-a}).P`.
pub fn apply(p: &NewtonPolygon, a: &[i64]) -> Result<HeckeImage> {
    check_index(p, a)?;
    let sigma = sorting_permutation(p, a);
    let slopes = sigma.iter().map(|&s| point_valuation_formula(p, a, &[s], &[a[s] + 1])).collect::<Result<Vec<_>>>()?;
    let polygon = NewtonPolygon::from_slopes(p.ctx(), slopes)
        .map_err(|e| invariant(format!("Hecke image is not a normalized polygon: {e}")))?;
    Ok(HeckeImage { polygon, sigma })
}

/// `λ'^{(k)}_i` of the image polygon computed from the old basis, checked
/// against iterating on the image.
pub fn transported_lambda_iter(p: &NewtonPolygon, a: &[i64], i: usize, k: i64) -> Result<Rational> {
    if k < 1 {
        return Err(arg_err("k must be at least 1"));
    }
    if i >= p.n() {
        return Err(arg_err("slope index out of range"));
    }
    let image = apply(p, a)?;
    let s = image.sigma[i];
    let via_formula = point_valuation_formula(p, a, &[s], &[a[s] + k])?;
    let via_image = image.polygon.slope_iter(i, k);
    if via_image != ExtRational::Finite(via_formula.clone()) {
        return Err(invariant(format!("transported iterate {via_formula} differs from the image iterate {via_image}")));
    }
    Ok(via_formula)
}

/// Closed form for the slopes of the vertex polygon at a sorted exponent vector.
pub fn vertex_polygon_closed_form(ctx: Context, a: &[i64]) -> Vec<Rational> {
    let n = ctx.n;
    let qn1 = ctx.pow(n as i64) - int(1);
    (0..n)
        .map(|i| {
            // weighted count of profiles (k_j)_{j≠i}, 0 ≤ k_j ≤ a_j, all k_j ≤ m
            let w = |m: i64| -> Rational {
                let e: i64 = (0..n).filter(|&j| j != i).map(|j| a[j].min(m)).sum();
                ctx.pow(e)
            };
            let top = (0..n).filter(|&j| j != i).map(|j| a[j]).max().unwrap_or(0).max(a[i] + 1);
            let mut sum = Rational::zero();
            for m in a[i] + 1..=top {
                let count = if m == a[i] + 1 { w(m) } else { w(m) - w(m - 1) };
                sum += count * ctx.pow(-(n as i64) * (m - 1));
            }
            ctx.pow(a[i]) / &qn1 * sum
        })
        .collect()
}

/// The polygon attached to a vertex, computed three ways and checked:
/// Hecke operator on the flat polygon, closed form, and the characterization
/// `λ_i^{(a_j − a_i + 1)} = λ_j` for `i < j`.
pub fn vertex_polygon(ctx: Context, x: &ApartmentVertex) -> Result<NewtonPolygon> {
    if x.n() != ctx.n {
        return Err(arg_err("vertex rank differs from n"));
    }
    let a = x.pr_q().coords().to_vec();
    let via_hecke = apply(&ctx.flat(), &a)?.polygon;
    let closed = vertex_polygon_closed_form(ctx, &a);
    if via_hecke.slopes() != closed.as_slice() {
        return Err(invariant(format!("vertex polygon closed form disagrees with the Hecke image at {x}")));
    }
    for (i, j) in pairs(ctx.n) {
        let lhs = via_hecke.slope_iter(i, a[j] - a[i] + 1);
        if lhs != ExtRational::Finite(via_hecke.slope(j).clone()) {
            return Err(invariant(format!("vertex polygon at {x} fails the wall characterization")));
        }
    }
    Ok(via_hecke)
}

/// The chamber `b_ij` of a polygon, with `λ_i^{(b+1)} ≥ λ_j > λ_i^{(b+2)}`, and
/// flags (lexicographic pairs) marking `λ_i^{(b+1)} = λ_j`.
pub fn chamber_of(p: &NewtonPolygon) -> Result<(SimplexB, Vec<bool>)> {
    let n = p.n();
    let mut b = Vec::new();
    let mut tight = Vec::new();
    for (i, j) in pairs(n) {
        let lj = ExtRational::Finite(p.slope(j).clone());
        let mut k = 0i64;
        while p.slope_iter(i, k + 2) >= lj {
            k += 1;
        }
        tight.push(p.slope_iter(i, k + 1) == lj);
        b.push(k);
    }
    let s = SimplexB::new(n, b).map_err(|e| invariant(format!("chamber data is inconsistent: {e}")))?;
    Ok((s, tight))
}

/// Closed membership `λ_i^{(b+1)} ≥ λ_j ≥ λ_i^{(b+2)}` for every pair.
pub fn in_chamber(p: &NewtonPolygon, s: &SimplexB) -> bool {
    s.n() == p.n()
        && pairs(p.n()).all(|(i, j)| {
            let lj = ExtRational::Finite(p.slope(j).clone());
            let b = s.get(i, j);
            p.slope_iter(i, b + 1) >= lj && lj >= p.slope_iter(i, b + 2)
        })
}

/// Finds `σ` with `(π^{-a}).((π^{-b}).P) = (π^{-(a_{σ(i)} + b_i)}).P`, trying
/// the identity first. For non-decreasing `b` the identity must work.
pub fn monoid_compose_check(p: &NewtonPolygon, a: &[i64], b: &[i64]) -> Result<Vec<usize>> {
    check_index(p, a)?;
    check_index(p, b)?;
    let lhs = apply(&apply(p, b)?.polygon, a)?.polygon;
    let n = p.n();
    let identity: Vec<usize> = (0..n).collect();
    let candidates = std::iter::once(identity.clone()).chain((0..n).permutations(n).filter(|s| s != &identity));
    for sigma in candidates {
        let c: Vec<i64> = (0..n).map(|i| a[sigma[i]] + b[i]).collect();
        if apply(p, &c)?.polygon == lhs {
            return Ok(sigma);
        }
        if sigma == identity && b.windows(2).all(|w| w[0] <= w[1]) {
            return Err(invariant("identity fails for a non-decreasing inner operator"));
        }
    }
    Err(invariant("no permutation witnesses the composition of Hecke operators"))
}
