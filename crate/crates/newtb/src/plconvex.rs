//! Piecewise-linear functions with exact breakpoints: evaluation, lower hulls,
//! Legendre duality, composition, inversion and step-function integrals.
//!
//! Duality convention: for convex `f` the dual is
//! `f*(s) = sup{t : f(x) >= -s x + t for all x} = inf_x (f(x) + s x)`,
//! a concave function of `s`. The reverse direction
//! `g^(x) = sup_s (g(s) - s x)` turns a concave function back into a convex one.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::error::{arg_err, parse_err, Error, Result};
use crate::rational::{field, int, only_keys, parse_rational, strip_delims, tagged_fields, ExtRational, Rational};

/// A continuous piecewise-linear function on `[lo, hi]` or `[lo, +∞)`.
///
/// Values are exact linear interpolation between breakpoints. On an unbounded
/// domain the function continues past the last breakpoint with slope `tail`.
/// Values are kept in canonical form (collinear breakpoints merged, `tail = 0`
/// on bounded domains), so `==` compares functions, not representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlFun {
    lo: Rational,
    hi: Option<Rational>,
    pts: Vec<(Rational, Rational)>,
    tail: Rational,
}

impl PlFun {
    /// Builds and canonicalizes a function. `hi = None` means `+∞`.
    pub fn new(lo: Rational, hi: Option<Rational>, pts: Vec<(Rational, Rational)>, tail: Rational) -> Result<Self> {
        let first = pts.first().ok_or_else(|| arg_err("a PL function needs a breakpoint"))?;
        if first.0 != lo {
            return Err(arg_err("first breakpoint must sit at the left end of the domain"));
        }
        if pts.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(arg_err("breakpoint abscissae must be strictly increasing"));
        }
        if let Some(h) = &hi {
            if &pts.last().unwrap().0 != h {
                return Err(arg_err("last breakpoint must sit at the right end of a bounded domain"));
            }
        }
        let mut f = PlFun { lo, hi, pts, tail };
        f.canonicalize();
        Ok(f)
    }

    /// `x ↦ y0 + slope·(x − lo)` on the given domain.
    pub fn affine(lo: Rational, hi: Option<Rational>, y0: Rational, slope: Rational) -> Self {
        let mut pts = vec![(lo.clone(), y0.clone())];
        if let Some(h) = &hi {
            if h != &lo {
                pts.push((h.clone(), &y0 + &slope * (h - &lo)));
            }
        }
        let mut f = PlFun { lo, hi, pts, tail: slope };
        f.canonicalize();
        f
    }

    pub fn identity(lo: Rational, hi: Option<Rational>) -> Self {
        let y0 = lo.clone();
        Self::affine(lo, hi, y0, int(1))
    }

    fn canonicalize(&mut self) {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(self.pts.len());
        for p in self.pts.drain(..) {
            while out.len() >= 2 {
                let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
                if slope_between(a, b) == slope_between(b, &p) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        if self.hi.is_none() {
            if out.len() >= 2 {
                let k = out.len();
                if slope_between(&out[k - 2], &out[k - 1]) == self.tail {
                    out.pop();
                }
            }
        } else {
            self.tail = Rational::zero();
        }
        self.pts = out;
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> Option<&Rational> {
        self.hi.as_ref()
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.pts
    }

    pub fn tail(&self) -> &Rational {
        &self.tail
    }

    pub fn in_domain(&self, x: &Rational) -> bool {
        x >= &self.lo && self.hi.as_ref().is_none_or(|h| x <= h)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if !self.in_domain(x) {
            return Err(Error::Domain(format!("{x} is outside the domain of the function")));
        }
        let idx = self.pts.partition_point(|p| &p.0 <= x) - 1;
        let (x0, y0) = &self.pts[idx];
        if x == x0 {
            return Ok(y0.clone());
        }
        let slope = match self.pts.get(idx + 1) {
            Some(next) => slope_between(&self.pts[idx], next),
            None => self.tail.clone(),
        };
        Ok(y0 + slope * (x - x0))
    }

    /// Slopes of the successive pieces, including the tail on an unbounded domain.
    pub fn slopes(&self) -> Vec<Rational> {
        let mut s: Vec<Rational> = self.pts.windows(2).map(|w| slope_between(&w[0], &w[1])).collect();
        if self.hi.is_none() {
            s.push(self.tail.clone());
        }
        s
    }

    pub fn is_convex(&self) -> bool {
        self.slopes().windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_concave(&self) -> bool {
        self.slopes().windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.slopes().iter().all(|s| s.is_positive())
    }

    /// Returns the same function with additional (redundant) breakpoints at `xs`.
    /// The result is a distinct representation; `PlFun::new` would merge them again.
    pub fn raw_points_with(&self, xs: &[Rational]) -> Result<Vec<(Rational, Rational)>> {
        let mut all: Vec<Rational> = self.pts.iter().map(|p| p.0.clone()).collect();
        for x in xs {
            if self.in_domain(x) {
                all.push(x.clone());
            }
        }
        all.sort();
        all.dedup();
        all.into_iter().map(|x| self.eval(&x).map(|y| (x, y))).collect()
    }

    /// Minimum and maximum over the domain, `None` where unbounded.
    fn range(&self) -> (Option<Rational>, Option<Rational>) {
        let ys = self.pts.iter().map(|p| &p.1);
        let mut lo = ys.clone().min().cloned();
        let mut hi = ys.max().cloned();
        if self.hi.is_none() {
            if self.tail.is_positive() {
                hi = None;
            } else if self.tail.is_negative() {
                lo = None;
            }
        }
        (lo, hi)
    }
}

fn slope_between(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

/// Lower convex envelope of a point set.
///
/// Points with `y = +∞` do not constrain the envelope from below and are ignored;
/// the domain is spanned by the points with finite `y`.
pub fn lower_convex_hull(points: &[(Rational, ExtRational)]) -> Result<PlFun> {
    let mut pts: Vec<(Rational, Rational)> =
        points.iter().filter_map(|(x, y)| y.finite().map(|y| (x.clone(), y.clone()))).collect();
    pts.sort();
    pts.dedup_by(|b, a| a.0 == b.0);
    if pts.len() < 2 {
        return Err(arg_err("a hull needs at least two points with distinct abscissae and finite values"));
    }
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let k = hull.len();
            let (a, b) = (&hull[k - 2], &hull[k - 1]);
            // drop b when it lies on or above the chord a-p
            if slope_between(a, b) >= slope_between(a, &p) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let lo = hull[0].0.clone();
    let hi = hull.last().unwrap().0.clone();
    PlFun::new(lo, Some(hi), hull, Rational::zero())
}

/// Legendre dual `s ↦ inf_x (f(x) + s x)` of a convex function.
///
/// For a bounded domain `[a, b]` the dual is finite for every `s`; it is returned
/// on `[s0, +∞)` where `s0 = 0` when every breakpoint of the dual is positive and
/// otherwise one unit left of the first breakpoint. Its tail slope is `a` and its
/// first piece has slope `b`, which is what [`legendre_dual_concave`] needs to
/// recover `f` exactly. For an unbounded domain with tail slope `m` the dual is
/// `-∞` left of `-m` and is returned on `[-m, +∞)`.
pub fn legendre_dual(f: &PlFun) -> Result<PlFun> {
    if !f.is_convex() {
        return Err(arg_err("legendre_dual expects a convex function"));
    }
    let mut bps: Vec<Rational> = f.pts.windows(2).map(|w| -slope_between(&w[0], &w[1])).collect();
    bps.sort();
    bps.dedup();
    let s0 = match (&f.hi, bps.first()) {
        (None, _) => -f.tail.clone(),
        (Some(_), Some(first)) if first.is_positive() => Rational::zero(),
        (Some(_), Some(first)) => first - int(1),
        (Some(_), None) => Rational::zero(),
    };
    let dual_at = |s: &Rational| -> Rational { f.pts.iter().map(|(x, y)| y + s * x).min().expect("non-empty") };
    let mut xs = vec![s0.clone()];
    xs.extend(bps.into_iter().filter(|s| s > &s0));
    let pts = xs.into_iter().map(|s| {
        let v = dual_at(&s);
        (s, v)
    });
    PlFun::new(s0, None, pts.collect(), f.lo.clone())
}

/// Reverse transform `x ↦ sup_s (g(s) − s x)` of a concave function.
///
/// Without an explicit window the result lives on `[tail slope, first slope]`,
/// the largest interval on which it is determined by the breakpoints of `g`.
/// `window = Some((lo, Some(hi)))` restricts it to `[lo, hi]`;
/// `Some((lo, None))` returns it on `[lo, +∞)`, where past the first slope of
/// `g` the supremum sits at the left end of the domain of `g`.
pub fn legendre_dual_concave(g: &PlFun, window: Option<(Rational, Option<Rational>)>) -> Result<PlFun> {
    if !g.is_concave() {
        return Err(arg_err("the reverse Legendre transform expects a concave function"));
    }
    let slopes = g.slopes();
    let first = slopes.first().cloned().unwrap_or_else(|| g.tail.clone());
    let (lo, hi) = match window {
        Some(w) => w,
        None => {
            let last =
                if g.hi.is_none() { g.tail.clone() } else { slopes.last().cloned().unwrap_or_else(Rational::zero) };
            (last, Some(first.clone()))
        }
    };
    if hi.as_ref().is_some_and(|h| &lo > h) {
        return Err(arg_err("empty window for the reverse Legendre transform"));
    }
    if g.hi.is_none() && lo < g.tail {
        return Err(Error::Domain(format!("the reverse transform is +∞ left of the tail slope {}", g.tail)));
    }
    let sup_at = |x: &Rational| -> Rational { g.pts.iter().map(|(s, v)| v - s * x).max().expect("non-empty") };
    let mut xs: Vec<Rational> = slopes.into_iter().filter(|m| m > &lo && hi.as_ref().is_none_or(|h| m < h)).collect();
    xs.push(lo.clone());
    if let Some(h) = &hi {
        xs.push(h.clone());
    } else if first > lo {
        xs.push(first);
    }
    xs.sort();
    xs.dedup();
    let pts = xs.into_iter().map(|x| {
        let v = sup_at(&x);
        (x, v)
    });
    let tail = if hi.is_none() { -g.lo.clone() } else { Rational::zero() };
    PlFun::new(lo, hi, pts.collect(), tail)
}

/// `f ∘ g`. The range of `g` must lie in the domain of `f`.
pub fn compose(f: &PlFun, g: &PlFun) -> Result<PlFun> {
    let (rmin, rmax) = g.range();
    let below = match &rmin {
        None => true,
        Some(m) => m < &f.lo,
    };
    let above = match (&rmax, &f.hi) {
        (_, None) => false,
        (None, Some(_)) => true,
        (Some(m), Some(h)) => m > h,
    };
    if below || above {
        return Err(Error::Domain("range of the inner function leaves the domain of the outer one".into()));
    }
    let fbps: Vec<&Rational> = f.pts.iter().map(|p| &p.0).collect();
    let mut xs: Vec<Rational> = g.pts.iter().map(|p| p.0.clone()).collect();
    // each piece of g: its left breakpoint and, if bounded, its right one
    type Piece = ((Rational, Rational), Option<(Rational, Rational)>);
    let mut pieces: Vec<Piece> = g.pts.windows(2).map(|w| (w[0].clone(), Some(w[1].clone()))).collect();
    if g.hi.is_none() {
        pieces.push((g.pts.last().unwrap().clone(), None));
    }
    for ((x0, y0), end) in pieces {
        let slope = match &end {
            Some(e) => slope_between(&(x0.clone(), y0.clone()), e),
            None => g.tail.clone(),
        };
        if slope.is_zero() {
            continue;
        }
        for y in &fbps {
            let strictly_inside = match &end {
                Some((_, y1)) => (*y > &y0 && *y < y1) || (*y < &y0 && *y > y1),
                None => (slope.is_positive() && *y > &y0) || (slope.is_negative() && *y < &y0),
            };
            if strictly_inside {
                xs.push(&x0 + (*y - &y0) / &slope);
            }
        }
    }
    xs.sort();
    xs.dedup();
    let pts = xs
        .into_iter()
        .map(|x| {
            let y = f.eval(&g.eval(&x)?)?;
            Ok((x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = if g.hi.is_none() {
        if g.tail.is_zero() {
            Rational::zero()
        } else {
            // beyond every breakpoint of f the outer slope is f's last slope in that direction
            let far = if g.tail.is_positive() {
                f.slopes().last().cloned().unwrap_or_else(Rational::zero)
            } else {
                f.slopes().first().cloned().unwrap_or_else(Rational::zero)
            };
            far * &g.tail
        }
    } else {
        Rational::zero()
    };
    PlFun::new(g.lo.clone(), g.hi.clone(), pts, tail)
}

/// Inverse of a strictly increasing function.
pub fn inverse(f: &PlFun) -> Result<PlFun> {
    if !f.is_strictly_increasing() {
        return Err(arg_err("inverse expects a strictly increasing function"));
    }
    let pts: Vec<(Rational, Rational)> = f.pts.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
    let lo = pts[0].0.clone();
    let (hi, tail) = match &f.hi {
        Some(_) => (Some(pts.last().unwrap().0.clone()), Rational::zero()),
        None => (None, f.tail.recip()),
    };
    PlFun::new(lo, hi, pts, tail)
}

/// A right-continuous step function: value `v_k` on `[x_k, x_{k+1})`, the last
/// value extending to `hi` (or to `+∞`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFun {
    steps: Vec<(Rational, Rational)>,
    hi: Option<Rational>,
}

impl StepFun {
    pub fn new(steps: Vec<(Rational, Rational)>, hi: Option<Rational>) -> Result<Self> {
        if steps.is_empty() {
            return Err(arg_err("a step function needs at least one step"));
        }
        if steps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(arg_err("step starts must be strictly increasing"));
        }
        if let Some(h) = &hi {
            if h < &steps.last().unwrap().0 {
                return Err(arg_err("domain end precedes the last step"));
            }
        }
        Ok(StepFun { steps, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.steps[0].0
    }

    /// Exact `∫_a^b g`.
    pub fn integrate(&self, a: &Rational, b: &Rational) -> Result<Rational> {
        if a > b {
            return Err(arg_err("integration bounds are reversed"));
        }
        if a < self.lo() || self.hi.as_ref().is_some_and(|h| b > h) {
            return Err(Error::Domain("integration interval leaves the domain".into()));
        }
        let mut total = Rational::zero();
        for (k, (start, value)) in self.steps.iter().enumerate() {
            let end = self.steps.get(k + 1).map(|s| &s.0);
            let left = if start > a { start } else { a };
            let right = match end {
                Some(e) if e < b => e,
                _ => b,
            };
            if left < right {
                total += value * (right - left);
            }
        }
        Ok(total)
    }
}

/// `∫_a^b g` for a step function `g`.
pub fn integrate_step(g: &StepFun, a: &Rational, b: &Rational) -> Result<Rational> {
    g.integrate(a, b)
}

impl fmt::Display for PlFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hi = match &self.hi {
            Some(h) => h.to_string(),
            None => "inf".to_string(),
        };
        let pts: Vec<String> = self.pts.iter().map(|(x, y)| format!("{x}:{y}")).collect();
        write!(f, "plfun lo={} hi={} pts=({}) tail={}", self.lo, hi, pts.join(";"), self.tail)
    }
}

impl FromStr for PlFun {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields = tagged_fields(s, "plfun")?;
        only_keys(&fields, &["lo", "hi", "pts", "tail"])?;
        let lo = parse_rational(field(&fields, "lo")?)?;
        let hi = match field(&fields, "hi")? {
            "inf" => None,
            h => Some(parse_rational(h)?),
        };
        let body = strip_delims(field(&fields, "pts")?, '(', ')')?;
        let pts = if body.is_empty() {
            Vec::new()
        } else {
            body.split(';')
                .map(|p| {
                    let (x, y) = p.split_once(':').ok_or_else(|| parse_err(format!("expected x:y, got `{p}`")))?;
                    Ok((parse_rational(x)?, parse_rational(y)?))
                })
                .collect::<Result<Vec<_>>>()?
        };
        let tail = parse_rational(field(&fields, "tail")?)?;
        PlFun::new(lo, hi, pts, tail).map_err(|e| parse_err(e.to_string()))
    }
}
