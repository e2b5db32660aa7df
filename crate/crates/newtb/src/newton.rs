//! Normalized Newton polygons of multiplication by π and their Herbrand functions.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};

use crate::error::{arg_err, parse_err, Error, Result};
use crate::plconvex::{inverse, lower_convex_hull, PlFun};
use crate::rational::{
    field, int, join_list, only_keys, parse_i64, parse_rational_list, qpow, tagged_fields, ExtRational, Rational,
};

/// Residue cardinality `q` and height `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Context {
    pub q: u32,
    pub n: usize,
}

impl Context {
    pub fn new(q: u32, n: usize) -> Result<Self> {
        if q < 2 {
            return Err(arg_err(format!("q must be at least 2, got {q}")));
        }
        if n < 1 {
            return Err(arg_err("height n must be at least 1"));
        }
        if n > 64 {
            return Err(arg_err(format!("height {n} is beyond what this crate supports")));
        }
        Ok(Context { q, n })
    }

    /// `q^e` as a rational.
    pub fn pow(&self, e: i64) -> Rational {
        qpow(self.q, e)
    }

    /// `q^i − q^{i−1}`, the number of points of exact order `π^i` in a rank-one module.
    pub fn weight(&self, i: usize) -> Rational {
        self.pow(i as i64) - self.pow(i as i64 - 1)
    }

    /// The flat polygon, all slopes `1/(q^n − 1)`.
    pub fn flat(&self) -> NewtonPolygon {
        let s = (self.pow(self.n as i64) - int(1)).recip();
        NewtonPolygon { ctx: *self, slopes: vec![s; self.n] }
    }
}

/// A point of polygon space: slopes `λ_1 ≥ … ≥ λ_n > 0` with
/// `Σ (q^i − q^{i−1}) λ_i = 1`. Slopes are stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NewtonPolygon {
    ctx: Context,
    slopes: Vec<Rational>,
}

impl NewtonPolygon {
    pub fn from_slopes(ctx: Context, slopes: Vec<Rational>) -> Result<Self> {
        if slopes.len() != ctx.n {
            return Err(arg_err(format!("expected {} slopes, got {}", ctx.n, slopes.len())));
        }
        if slopes.iter().any(|s| !s.is_positive()) {
            return Err(arg_err("slopes must be positive"));
        }
        if slopes.windows(2).any(|w| w[0] < w[1]) {
            return Err(arg_err("slopes must be non-increasing"));
        }
        let total: Rational = slopes.iter().enumerate().map(|(i, s)| ctx.weight(i + 1) * s).sum();
        if !total.is_one() {
            return Err(arg_err(format!("slopes are not normalized: weighted sum is {total}")));
        }
        Ok(NewtonPolygon { ctx, slopes })
    }

    /// Polygon of the lower hull of `(1,1), (q^i, v_i), (q^n, 0)`.
    pub fn from_coordinates(ctx: Context, v: &[Rational]) -> Result<Self> {
        if v.len() + 1 != ctx.n {
            return Err(arg_err(format!("expected {} coordinates, got {}", ctx.n - 1, v.len())));
        }
        if v.iter().any(|x| !x.is_positive()) {
            return Err(arg_err("coordinate valuations must be positive"));
        }
        let mut pts = vec![(int(1), ExtRational::from(int(1)))];
        for (i, x) in v.iter().enumerate() {
            pts.push((ctx.pow(i as i64 + 1), x.clone().into()));
        }
        pts.push((ctx.pow(ctx.n as i64), int(0).into()));
        let hull = lower_convex_hull(&pts)?;
        let vals: Vec<Rational> = (0..=ctx.n).map(|i| hull.eval(&ctx.pow(i as i64))).collect::<Result<_>>()?;
        let slopes = (1..=ctx.n).map(|i| (&vals[i - 1] - &vals[i]) / ctx.weight(i)).collect();
        Self::from_slopes(ctx, slopes)
    }

    pub fn ctx(&self) -> Context {
        self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn q(&self) -> u32 {
        self.ctx.q
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    /// `λ_{i+1}` in 0-based indexing.
    pub fn slope(&self, i: usize) -> &Rational {
        &self.slopes[i]
    }

    pub fn is_flat(&self) -> bool {
        self.slopes.windows(2).all(|w| w[0] == w[1])
    }

    /// `P(q^i)`, the value of the polygon at its `i`-th vertex abscissa.
    pub fn vertex_value(&self, i: usize) -> Rational {
        let mut v = int(1);
        for j in 1..=i.min(self.ctx.n) {
            v -= self.ctx.weight(j) * &self.slopes[j - 1];
        }
        v
    }

    /// `P(t)` for `1 ≤ t ≤ q^n`.
    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        if t < &int(1) || t > &self.ctx.pow(self.ctx.n as i64) {
            return Err(Error::Domain(format!("{t} is outside [1, q^n]")));
        }
        let mut i = 1;
        while &self.ctx.pow(i as i64) < t {
            i += 1;
        }
        let left = self.ctx.pow(i as i64 - 1);
        Ok(self.vertex_value(i - 1) - &self.slopes[i - 1] * (t - left))
    }

    /// The graph on `[1, q^n]` as a PL function.
    pub fn graph(&self) -> PlFun {
        let pts = (0..=self.ctx.n).map(|i| (self.ctx.pow(i as i64), self.vertex_value(i))).collect();
        let hi = self.ctx.pow(self.ctx.n as i64);
        PlFun::new(int(1), Some(hi), pts, int(0)).expect("polygon vertices are increasing")
    }

    /// `η(s) = s + Σ (q^i − q^{i−1}) min(s, λ_i)`.
    pub fn eta_at(&self, s: &Rational) -> Rational {
        let mut v = s.clone();
        for (i, l) in self.slopes.iter().enumerate() {
            v += self.ctx.weight(i + 1) * if s < l { s } else { l };
        }
        v
    }

    /// η of the π-torsion as a PL function on `[0, ∞)`: slope `q^n` near 0,
    /// slope `q^m` on `[λ_{m+1}, λ_m]`, slope 1 beyond `λ_1`.
    pub fn eta(&self) -> PlFun {
        let mut xs: Vec<Rational> = self.slopes.clone();
        xs.push(int(0));
        xs.sort();
        xs.dedup();
        let pts = xs.into_iter().map(|s| {
            let v = self.eta_at(&s);
            (s, v)
        });
        PlFun::new(int(0), None, pts.collect(), int(1)).expect("breakpoints are sorted")
    }

    /// `Ψ = η^{-1}` as a PL function.
    pub fn psi(&self) -> PlFun {
        inverse(&self.eta()).expect("η is strictly increasing")
    }

    /// `Ψ(y)` for `y ≥ 0`, inverting η region by region.
    pub fn psi_at(&self, y: &Rational) -> Rational {
        let n = self.ctx.n;
        // region m is [λ_{m+1}, λ_m], on which η(s) = q^m s + Σ_{i>m} (q^i − q^{i−1}) λ_i
        for m in 0..=n {
            let lower = if m == n { int(0) } else { self.slopes[m].clone() };
            if y >= &self.eta_at(&lower) {
                let c: Rational = (m + 1..=n).map(|i| self.ctx.weight(i) * &self.slopes[i - 1]).sum();
                return (y - c) / self.ctx.pow(m as i64);
            }
        }
        unreachable!("η(0) = 0 and y ≥ 0")
    }

    /// `λ^{(k)}`: `+∞` for `k ≤ 0`, `λ` for `k = 1`, `Ψ^{∘(k−1)}(λ)` beyond.
    pub fn lambda_iter(&self, lambda: &Rational, k: i64) -> ExtRational {
        if k <= 0 {
            return ExtRational::Infinity;
        }
        let last = &self.slopes[self.ctx.n - 1];
        let mut v = lambda.clone();
        let mut steps = k - 1;
        while steps > 0 && &v > last {
            v = self.psi_at(&v);
            steps -= 1;
        }
        if steps > 0 {
            // below λ_n the step is division by q^n
            v /= self.ctx.pow(self.ctx.n as i64 * steps);
        }
        ExtRational::Finite(v)
    }

    /// `λ_i^{(k)}` for the 0-based slope index `i`.
    pub fn slope_iter(&self, i: usize, k: i64) -> ExtRational {
        self.lambda_iter(&self.slopes[i], k)
    }

    /// `k(i, μ) = sup{k ≥ 0 : λ_i^{(k)} ≥ μ}` for `μ > 0`.
    pub fn lower_exponent(&self, i: usize, mu: &Rational) -> i64 {
        debug_assert!(mu.is_positive());
        let last = &self.slopes[self.ctx.n - 1];
        let mut v = self.slopes[i].clone();
        let mut k = 0;
        while &v >= mu {
            k += 1;
            v = if &v > last { self.psi_at(&v) } else { v / self.ctx.pow(self.ctx.n as i64) };
        }
        k
    }

    /// `l(i, μ) = inf{l ≥ 0 : λ_i ≥ μ^{(l+2)}}` for `μ > 0`.
    pub fn upper_exponent(&self, i: usize, mu: &Rational) -> i64 {
        debug_assert!(mu.is_positive());
        let mut v = self.psi_at(mu);
        let mut l = 0;
        while v > self.slopes[i] {
            l += 1;
            v = self.psi_at(&v);
        }
        l
    }

    /// Herbrand function of the `π^k`-torsion, the `k`-fold composite of η.
    pub fn eta_level(&self, k: usize) -> Result<PlFun> {
        let eta = self.eta();
        let mut acc = PlFun::identity(int(0), None);
        for _ in 0..k {
            acc = crate::plconvex::compose(&eta, &acc)?;
        }
        Ok(acc)
    }

    /// Slope-wise affine combination of polygons in one context.
    pub fn barycenter(weights: &[Rational], polys: &[NewtonPolygon]) -> Result<NewtonPolygon> {
        if weights.len() != polys.len() || polys.is_empty() {
            return Err(arg_err("barycenter needs one weight per polygon"));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(arg_err("barycentric weights must be non-negative"));
        }
        if !weights.iter().sum::<Rational>().is_one() {
            return Err(arg_err("barycentric weights must sum to 1"));
        }
        let ctx = polys[0].ctx;
        if polys.iter().any(|p| p.ctx != ctx) {
            return Err(arg_err("polygons live in different contexts"));
        }
        let slopes = (0..ctx.n).map(|i| weights.iter().zip(polys).map(|(w, p)| w * &p.slopes[i]).sum()).collect();
        NewtonPolygon::from_slopes(ctx, slopes)
    }

    /// Parses either a full `newt ...` line or a bare slope list in the given context.
    pub fn parse_in(ctx: Context, s: &str) -> Result<Self> {
        if s.trim_start().starts_with("newt") {
            let p: NewtonPolygon = s.parse()?;
            if p.ctx != ctx {
                return Err(arg_err("polygon context differs from q/n given"));
            }
            Ok(p)
        } else {
            Self::from_slopes(ctx, parse_rational_list(s)?).map_err(|e| parse_err(e.to_string()))
        }
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "newt q={} n={} slopes={}", self.ctx.q, self.ctx.n, join_list(&self.slopes, ","))
    }
}

impl FromStr for NewtonPolygon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields = tagged_fields(s, "newt")?;
        only_keys(&fields, &["q", "n", "slopes"])?;
        let q = parse_i64(field(&fields, "q")?)?;
        let n = parse_i64(field(&fields, "n")?)?;
        if !(2..=u32::MAX as i64).contains(&q) || !(1..=64).contains(&n) {
            return Err(parse_err("q or n out of range"));
        }
        let ctx = Context::new(q as u32, n as usize).map_err(|e| parse_err(e.to_string()))?;
        let slopes = parse_rational_list(field(&fields, "slopes")?)?;
        NewtonPolygon::from_slopes(ctx, slopes).map_err(|e| parse_err(e.to_string()))
    }
}
