//! Seeded generators for property checks: polygons, convex PL functions,
//! apartment points, Iwahori points and ultrametric root data.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::building::{ApartmentPoint, ApartmentVertex};
use crate::newton::{Context, NewtonPolygon};
use crate::plconvex::PlFun;
use crate::rational::{int, rat, ExtRational, Rational};
use crate::ultrametric::UltrametricRoots;

/// A polygon with slopes proportional to a random non-increasing integer vector.
pub fn polygon<R: Rng>(rng: &mut R, ctx: Context, max: i64) -> NewtonPolygon {
    let mut raw: Vec<i64> = (0..ctx.n).map(|_| rng.gen_range(1..=max.max(1))).collect();
    raw.sort_unstable_by(|a, b| b.cmp(a));
    let total: Rational = raw.iter().enumerate().map(|(i, &x)| ctx.weight(i + 1) * int(x)).sum();
    let slopes = raw.into_iter().map(|x| int(x) / &total).collect();
    NewtonPolygon::from_slopes(ctx, slopes).expect("normalized by construction")
}

/// A polygon from hull coordinates `v_i ∈ (0, 1]` with denominators up to `den`.
pub fn polygon_from_coordinates<R: Rng>(rng: &mut R, ctx: Context, den: i64) -> NewtonPolygon {
    let v: Vec<Rational> = (1..ctx.n).map(|_| rat(rng.gen_range(1..=den), den)).collect();
    NewtonPolygon::from_coordinates(ctx, &v).expect("coordinates are positive")
}

/// A convex PL function on `[lo, ∞)` or a bounded interval, with a few breakpoints.
pub fn convex_plfun<R: Rng>(rng: &mut R, bounded: bool) -> PlFun {
    let k = rng.gen_range(1..=5);
    let lo = rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
    let mut x = lo.clone();
    let mut y = rat(rng.gen_range(-6..=6), rng.gen_range(1..=4));
    let mut slope = rat(rng.gen_range(-6..=2), rng.gen_range(1..=3));
    let mut pts = vec![(x.clone(), y.clone())];
    for _ in 0..k {
        let dx = rat(rng.gen_range(1..=6), rng.gen_range(1..=3));
        y += &slope * &dx;
        x += dx;
        pts.push((x.clone(), y.clone()));
        slope += rat(rng.gen_range(1..=4), rng.gen_range(1..=3));
    }
    let hi = bounded.then(|| x.clone());
    PlFun::new(lo, hi, pts, slope).expect("breakpoints increase")
}

/// A strictly increasing PL function on `[0, ∞)` fixing 0.
pub fn increasing_plfun<R: Rng>(rng: &mut R) -> PlFun {
    let k = rng.gen_range(0..=4);
    let mut x = int(0);
    let mut y = int(0);
    let mut pts = vec![(x.clone(), y.clone())];
    for _ in 0..k {
        let dx = rat(rng.gen_range(1..=5), rng.gen_range(1..=3));
        let s = rat(rng.gen_range(1..=6), rng.gen_range(1..=3));
        y += s * &dx;
        x += dx;
        pts.push((x.clone(), y.clone()));
    }
    PlFun::new(int(0), None, pts, rat(rng.gen_range(1..=6), rng.gen_range(1..=3))).expect("breakpoints increase")
}

pub fn vertex<R: Rng>(rng: &mut R, n: usize, max: i64) -> ApartmentVertex {
    ApartmentVertex::new((0..n).map(|_| rng.gen_range(0..=max)).collect()).expect("n ≥ 1")
}

/// A rational point of the closed quartier with coordinates up to `max`.
pub fn quartier_point<R: Rng>(rng: &mut R, n: usize, max: i64, den: i64) -> ApartmentPoint {
    let mut c: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(0..=max * den), den)).collect();
    c.sort();
    ApartmentPoint::new(c).expect("n ≥ 1")
}

/// A point of `Δ` (coordinates positive, summing to 1), `n ≥ 2`.
pub fn delta_point<R: Rng>(rng: &mut R, n: usize, max: i64) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=max.max(1))).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|x| rat(x, total)).collect()
}

/// A point of `Q(Δ)`, read off a random polygon through `v_i = (q^i − q^{i−1}) λ_i`.
pub fn q_delta_point<R: Rng>(rng: &mut R, ctx: Context, max: i64) -> Vec<Rational> {
    let p = polygon(rng, ctx, max);
    p.slopes().iter().enumerate().map(|(i, l)| ctx.weight(i + 1) * l).collect()
}

/// Root data built by agglomerative merging. Root 0 is the zero root
/// (`v = ∞`) and `v_i = d(0, i)`. Merge heights decrease, so the result is
/// ultrametric.
pub fn ultrametric_roots<R: Rng>(rng: &mut R, m: usize) -> UltrametricRoots {
    let m = m.max(1);
    let mut d = vec![vec![ExtRational::Infinity; m]; m];
    let mut clusters: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    let mut height = rat(rng.gen_range(4..=12), rng.gen_range(1..=3));
    while clusters.len() > 1 {
        clusters.shuffle(rng);
        let a = clusters.pop().unwrap();
        let b = clusters.pop().unwrap();
        for &i in &a {
            for &j in &b {
                d[i][j] = ExtRational::Finite(height.clone());
                d[j][i] = ExtRational::Finite(height.clone());
            }
        }
        clusters.push(a.into_iter().chain(b).collect());
        // occasionally keep the same height so several merges share a level
        if rng.gen_bool(0.7) {
            height = &height * rat(rng.gen_range(1..=3), 4);
        }
    }
    let v = d[0].clone();
    UltrametricRoots::new(v, d).expect("agglomerative data is ultrametric")
}
