//! The Iwahori simplex `Δ = {v ∈ (0,1)^n : Σ v_i = 1}` and its map to polygon space.
//!
//! A point `v` records the kernel valuations of a chain of degree-`q`
//! isogenies with composite `π`. Its Herbrand function is the composite of
//! the elementary maps `η_λ`, applied with `v_1` innermost.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::building::ApartmentPoint;
use crate::error::{arg_err, invariant, Error, Result};
use crate::linalg::{solve, Solution};
use crate::newton::{Context, NewtonPolygon};
use crate::plconvex::{compose, legendre_dual_concave, PlFun};
use crate::rational::{int, Rational};
use crate::skeleton::psi;

/// `η_λ(x) = qx` on `[0, λ]` and `x + (q−1)λ` beyond.
pub fn eta_lambda(q: u32, lambda: &Rational) -> Result<PlFun> {
    let qr = int(q as i64);
    if !lambda.is_positive() || lambda >= &(&qr - int(1)).recip() {
        return Err(Error::Domain(format!("λ = {lambda} must lie in (0, 1/(q−1))")));
    }
    PlFun::new(int(0), None, vec![(int(0), int(0)), (lambda.clone(), &qr * lambda)], int(1))
}

pub fn eta_lambda_at(q: u32, lambda: &Rational, x: &Rational) -> Result<Rational> {
    eta_lambda(q, lambda)?.eval(x)
}

fn check_delta(ctx: Context, v: &[Rational]) -> Result<()> {
    if ctx.n < 2 {
        return Err(arg_err("the Iwahori simplex needs n ≥ 2"));
    }
    if v.len() != ctx.n {
        return Err(arg_err(format!("expected {} coordinates, got {}", ctx.n, v.len())));
    }
    if v.iter().any(|x| !x.is_positive() || x >= &int(1)) {
        return Err(arg_err("coordinates must lie in (0, 1)"));
    }
    if !v.iter().sum::<Rational>().is_one() {
        return Err(arg_err("coordinates must sum to 1"));
    }
    Ok(())
}

/// The composite `η_{v_n/(q−1)} ∘ … ∘ η_{v_1/(q−1)}`.
pub fn eta_of_delta(ctx: Context, v: &[Rational]) -> Result<PlFun> {
    check_delta(ctx, v)?;
    let denom = int(ctx.q as i64 - 1);
    let mut acc = PlFun::identity(int(0), None);
    for x in v {
        acc = compose(&eta_lambda(ctx.q, &(x / &denom))?, &acc)?;
    }
    Ok(acc)
}

/// The polygon of `v`: the Legendre dual of its Herbrand function on `[1, q^n]`.
pub fn newton_of_delta(ctx: Context, v: &[Rational]) -> Result<NewtonPolygon> {
    let eta = eta_of_delta(ctx, v)?;
    let top = ctx.pow(ctx.n as i64);
    let graph = legendre_dual_concave(&eta, Some((int(1), Some(top.clone()))))?;
    if graph.eval(&int(1))? != int(1) || !graph.eval(&top)?.is_zero() {
        return Err(invariant("dual of the Herbrand function is not normalized"));
    }
    let slopes = (1..=ctx.n)
        .map(|i| Ok((graph.eval(&ctx.pow(i as i64 - 1))? - graph.eval(&ctx.pow(i as i64))?) / ctx.weight(i)))
        .collect::<Result<Vec<_>>>()?;
    NewtonPolygon::from_slopes(ctx, slopes).map_err(|e| invariant(format!("dual is not a polygon: {e}")))
}

/// `λ_i = v_i/(q^i − q^{i−1})`, valid on `Q(Δ)`.
pub fn slope_formula(ctx: Context, v: &[Rational]) -> Result<NewtonPolygon> {
    check_delta(ctx, v)?;
    let slopes = v.iter().enumerate().map(|(i, x)| x / ctx.weight(i + 1)).collect();
    NewtonPolygon::from_slopes(ctx, slopes)
}

/// Membership in `Q(Δ)`: `v_{i+1} ≤ q·v_i`, i.e. the slope formula is non-increasing.
pub fn in_q_delta(ctx: Context, v: &[Rational]) -> Result<bool> {
    check_delta(ctx, v)?;
    let q = int(ctx.q as i64);
    Ok(v.windows(2).all(|w| w[1] <= &q * &w[0]))
}

/// Partial sums `Σ_{k≤i} v'_k = Σ_{k≤i} v_{j_k}/q^{j_k − k}`, where
/// `j_1 < … < j_i` enumerate `σ({1, …, i})`. `sigma` is 0-based.
fn sigma_partial_sums_matrix(ctx: Context, sigma: &[usize]) -> Vec<Vec<Rational>> {
    let n = ctx.n;
    (1..=n)
        .map(|i| {
            let mut js: Vec<usize> = sigma[..i].iter().map(|&s| s + 1).collect();
            js.sort();
            let mut row = vec![Rational::zero(); n];
            for (k, &j) in js.iter().enumerate() {
                row[j - 1] += ctx.pow(-((j - (k + 1)) as i64));
            }
            row
        })
        .collect()
}

fn check_perm(n: usize, sigma: &[usize]) -> Result<()> {
    if sigma.len() != n || !sigma.iter().all_unique() || sigma.iter().any(|&s| s >= n) {
        return Err(arg_err("not a permutation of the coordinates"));
    }
    Ok(())
}

/// `σ·v` for `v ∈ Q(Δ)`.
pub fn sigma_act(ctx: Context, sigma: &[usize], v: &[Rational]) -> Result<Vec<Rational>> {
    check_perm(ctx.n, sigma)?;
    if !in_q_delta(ctx, v)? {
        return Err(Error::Domain("the action is defined on Q(Δ)".into()));
    }
    let m = sigma_partial_sums_matrix(ctx, sigma);
    let sums: Vec<Rational> = m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
    let mut out = Vec::with_capacity(ctx.n);
    let mut prev = Rational::zero();
    for s in sums {
        out.push(&s - &prev);
        prev = s;
    }
    Ok(out)
}

/// Finds `σ` and `w ∈ Q(Δ)` with `σ·w = v`, trying the identity first.
pub fn delta_decomposition(ctx: Context, v: &[Rational]) -> Result<(Vec<usize>, Vec<Rational>)> {
    check_delta(ctx, v)?;
    if ctx.n > 6 {
        return Err(arg_err("decomposition searches S_n and is limited to n ≤ 6"));
    }
    let n = ctx.n;
    let targets: Vec<Rational> = (1..=n).map(|i| v[..i].iter().sum()).collect();
    for sigma in (0..n).permutations(n) {
        let m = sigma_partial_sums_matrix(ctx, &sigma);
        if let Solution::Unique(w) = solve(&m, &targets, n) {
            let valid = w.iter().all(|x| x.is_positive() && x < &int(1));
            if valid && in_q_delta(ctx, &w)? {
                return Ok((sigma, w));
            }
        }
    }
    Err(invariant("no piece σ·Q(Δ) contains the point"))
}

/// The point of the apartment over `v`: `ψ(P(w))` moved by `σ`, where `v = σ·w`.
pub fn delta_to_apartment(ctx: Context, v: &[Rational]) -> Result<ApartmentPoint> {
    let (sigma, w) = delta_decomposition(ctx, v)?;
    let x = psi(&newton_of_delta(ctx, &w)?)?;
    let mut c = vec![Rational::zero(); ctx.n];
    for (i, &s) in sigma.iter().enumerate() {
        c[s] = x.coords()[i].clone();
    }
    ApartmentPoint::new(c)
}
