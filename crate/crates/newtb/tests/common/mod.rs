//! Independent oracles for the integration tests. Each recomputes a library
//! value by a different route: brute-force enumeration, pointwise evaluation,
//! hull recipes or a plain linear solve.
#![allow(dead_code)]

use newtb::building::ApartmentVertex;
use newtb::field::FiniteField;
use newtb::newton::NewtonPolygon;
use newtb::plconvex::PlFun;
use newtb::rational::{int, ExtRational, Rational};
use newtb::torsion::{valuation, TorsionVector};
use newtb::ultrametric::UltrametricRoots;
use num_traits::{One, Signed, Zero};

pub fn r(s: &str) -> Rational {
    newtb::rational::parse_rational(s).unwrap()
}

pub fn rs(s: &str) -> Vec<Rational> {
    newtb::rational::parse_rational_list(s).unwrap()
}

/// Largest slope of the lower hull of the polygon's vertices and `(0, λ)`,
/// read as the valuation of a `π`-preimage of a point of valuation `λ`.
pub fn hull_step(p: &NewtonPolygon, lambda: &Rational) -> Rational {
    (0..=p.n())
        .map(|i| {
            let t = p.ctx().pow(i as i64);
            (lambda - p.vertex_value(i)) / t
        })
        .max()
        .unwrap()
}

/// `λ^{(k)}` by iterating [`hull_step`].
pub fn hull_lambda_iter(p: &NewtonPolygon, lambda: &Rational, k: i64) -> ExtRational {
    if k <= 0 {
        return ExtRational::Infinity;
    }
    let mut v = lambda.clone();
    for _ in 1..k {
        v = hull_step(p, &v);
    }
    ExtRational::Finite(v)
}

/// Every element of `(π^{-level} O / O)^n` over `F_q`, by counting digits.
pub fn all_torsion(n: usize, level: usize, q: u32) -> Vec<TorsionVector> {
    let digits = n * level;
    let total = (q as usize).pow(digits as u32);
    (0..total)
        .map(|mut code| {
            let mut coords = vec![vec![0u16; level]; n];
            for c in coords.iter_mut() {
                for d in c.iter_mut() {
                    *d = (code % q as usize) as u16;
                    code /= q as usize;
                }
            }
            TorsionVector::new(level, coords).unwrap()
        })
        .collect()
}

/// `∫_0^s #{x ∈ T[π^level] : v(x) ≥ t} dt` by enumerating the torsion.
pub fn counted_herbrand(p: &NewtonPolygon, level: usize, s: &Rational) -> Rational {
    all_torsion(p.n(), level, p.q()).iter().map(|x| valuation(p, x).unwrap().min_with(s)).sum()
}

/// `v(φ(x)) = Σ_{c ∈ C} v(x − c)` with `C` enumerated as all combinations
/// `Σ t_i π^{-a_i} e_i`, coefficients `t_i` running over `O/π^{a_i}`.
pub fn brute_isogeny_valuation(p: &NewtonPolygon, a: &[i64], x: &TorsionVector) -> ExtRational {
    let field = FiniteField::new(p.q()).unwrap();
    let n = p.n();
    let level = (*a.iter().max().unwrap() as usize).max(x.level());
    let x = x.lift(level).unwrap();
    let q = p.q() as usize;
    let digits: usize = a.iter().map(|&v| v as usize).sum();
    let mut sum = ExtRational::Finite(Rational::zero());
    for mut code in 0..q.pow(digits as u32) {
        let mut coords = vec![vec![0u16; level]; n];
        for i in 0..n {
            // π^{-a_i} (t_0 + t_1 π + …) has digit t_d at position d + level − a_i
            for d in 0..a[i] as usize {
                coords[i][d + level - a[i] as usize] = (code % q) as u16;
                code /= q;
            }
        }
        let c = TorsionVector::new(level, coords).unwrap();
        sum = sum.plus(&valuation(p, &x.sub(&c, &field)).unwrap());
    }
    sum
}

/// Pointwise composite on a grid of sample points.
pub fn compose_pointwise(f: &PlFun, g: &PlFun, x: &Rational) -> Rational {
    f.eval(&g.eval(x).unwrap()).unwrap()
}

/// `inf_x f(x) + s x` over the breakpoints of a convex `f`, checked finite.
pub fn dual_at(f: &PlFun, s: &Rational) -> Rational {
    f.points().iter().map(|(x, y)| y + s * x).min().unwrap()
}

/// Lower convex hull at `x` by brute force over all pairs of points.
pub fn hull_at(points: &[(Rational, Rational)], x: &Rational) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for a in points {
        for b in points {
            let v = if &a.0 == x {
                Some(a.1.clone())
            } else if a.0 < *x && *x < b.0 {
                let t = (x - &a.0) / (&b.0 - &a.0);
                Some(&a.1 + t * (&b.1 - &a.1))
            } else {
                None
            };
            if let Some(v) = v {
                best = Some(best.map_or(v.clone(), |m: Rational| m.min(v)));
            }
        }
    }
    best
}

/// Plain Gauss–Jordan on a square system; `None` if singular.
#[allow(clippy::needless_range_loop)]
pub fn gauss(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for c in 0..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for row in 0..n {
            if row != col && !a[row][col].is_zero() {
                let f = a[row][col].clone();
                for c in 0..n {
                    let d = &f * &a[col][c];
                    a[row][c] -= d;
                }
                let d = &f * &b[col];
                b[row] -= d;
            }
        }
    }
    Some(b)
}

/// Least-squares-free barycentric solve: `Σ t_k P_k = target`, `Σ t_k = 1`,
/// using the first `len(points)` equations that give a non-singular system.
pub fn barycentric_oracle(points: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let m = points.len();
    let dim = target.len();
    let mut rows: Vec<(Vec<Rational>, Rational)> = vec![(vec![int(1); m], int(1))];
    for i in 0..dim {
        rows.push(((0..m).map(|k| points[k][i].clone()).collect(), target[i].clone()));
    }
    // try subsets of rows of size m containing the normalization
    use itertools::Itertools;
    for pick in (1..rows.len()).combinations(m - 1) {
        let mut a = vec![rows[0].0.clone()];
        let mut b = vec![rows[0].1.clone()];
        for &i in &pick {
            a.push(rows[i].0.clone());
            b.push(rows[i].1.clone());
        }
        if let Some(t) = gauss(a, b) {
            let ok = rows.iter().all(|(row, rhs)| row.iter().zip(&t).map(|(x, y)| x * y).sum::<Rational>() == *rhs);
            return ok.then_some(t);
        }
    }
    None
}

/// Radius of the component of `{v(f) ≥ ε}` around root `i`: the `r` with
/// `Σ_j min(r, d_ij) = ε`, which is the least value of `v(f)` on the sphere
/// `v(x − α_i) = r`.
pub fn sphere_radius(roots: &UltrametricRoots, i: usize, eps: &Rational) -> Rational {
    let m = roots.len();
    let mut cuts: Vec<Rational> =
        (0..m).filter(|&j| j != i).filter_map(|j| roots.distance(i, j).finite().cloned()).collect();
    cuts.push(int(0));
    cuts.sort();
    cuts.dedup();
    let f = |r: &Rational| -> Rational { (0..m).map(|j| roots.distance(i, j).min_with(r)).sum() };
    // f is increasing with slope = #{j : d_ij > r}; at least 1 (j = i)
    let mut lo = int(0);
    for c in cuts.iter().skip(1) {
        if &f(c) >= eps {
            break;
        }
        lo = c.clone();
    }
    let slope = (0..m).filter(|&j| roots.distance(i, j) > &ExtRational::Finite(lo.clone())).count();
    &lo + (eps - f(&lo)) / int(slope as i64)
}

/// Components from [`sphere_radius`]: `j` joins `i` when `d_ij ≥ r_i`.
pub fn components_oracle(roots: &UltrametricRoots, eps: &Rational) -> Vec<(Vec<usize>, Rational)> {
    let m = roots.len();
    let mut out: Vec<(Vec<usize>, Rational)> = Vec::new();
    for i in 0..m {
        let ri = sphere_radius(roots, i, eps);
        let members: Vec<usize> =
            (0..m).filter(|&j| roots.distance(i, j) >= &ExtRational::Finite(ri.clone())).collect();
        if !out.iter().any(|(c, _)| c == &members) {
            out.push((members, ri));
        }
    }
    out.sort();
    out
}

/// `ψ(ε)` by bisection-free inversion of `η(s) = Σ_i min(s, d(0, i))`.
pub fn herbrand_psi_oracle(roots: &UltrametricRoots, eps: &Rational) -> Rational {
    sphere_radius(roots, roots.zero_root().unwrap(), eps)
}

pub fn vertex(c: &[i64]) -> ApartmentVertex {
    ApartmentVertex::new(c.to_vec()).unwrap()
}

/// `Σ_{k≥1} x^k` truncated where the tail is known, for the flat Hodge–Tate value.
pub fn geometric_tail(first: &Rational, ratio: &Rational) -> Rational {
    assert!(ratio.abs() < Rational::one());
    first / (int(1) - ratio)
}

/// Elements of `T[π^k]` whose coordinate `i` vanishes, by counting digits.
pub fn torsion_off(n: usize, k: usize, q: u32, i: usize) -> Vec<TorsionVector> {
    let digits = (n - 1) * k;
    let q = q as usize;
    (0..q.pow(digits as u32))
        .map(|mut code| {
            let mut coords = vec![vec![0u16; k]; n];
            for (j, c) in coords.iter_mut().enumerate() {
                if j == i {
                    continue;
                }
                for d in c.iter_mut() {
                    *d = (code % q) as u16;
                    code /= q;
                }
            }
            TorsionVector::new(k, coords).unwrap()
        })
        .collect()
}

/// `(q·v(M[π^k]) − v(M[π^{k−1}]))/(q − 1)` for `M = span{e_j : j ≠ i}`,
/// with both valuation sums taken over enumerated elements.
pub fn enumerated_kernel_norm(p: &NewtonPolygon, i: usize, k: usize) -> Rational {
    let total = |level: usize| -> Rational {
        if level == 0 {
            return Rational::zero();
        }
        torsion_off(p.n(), level, p.q(), i)
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| valuation(p, x).unwrap().finite().cloned().unwrap())
            .sum()
    };
    let q = int(p.q() as i64);
    (&q * total(k) - total(k - 1)) / (q - int(1))
}
