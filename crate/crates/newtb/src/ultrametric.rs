//! Abstract root data `(v(α_i), v(α_i − α_j))` of a polynomial `f = Π (T − α_i)`:
//! the function `s ↦ inf{v(f(x)) : v(x) ≥ s}`, ball components of
//! `{v(f(x)) ≥ ε}`, and the Herbrand fibration around a distinguished zero root.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::error::{arg_err, invariant, parse_err, Error, Result};
use crate::newton::NewtonPolygon;
use crate::plconvex::{compose, inverse, PlFun};
use crate::rational::{int, join_list, parse_i64, strip_delims, ExtRational, Rational};
use crate::torsion::{subgroup, valuation};

/// Root valuations and pairwise distances. `d[i][i] = +∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltrametricRoots {
    v: Vec<ExtRational>,
    d: Vec<Vec<ExtRational>>,
}

impl UltrametricRoots {
    pub fn new(v: Vec<ExtRational>, d: Vec<Vec<ExtRational>>) -> Result<Self> {
        let m = v.len();
        if m == 0 {
            return Err(arg_err("root data needs at least one root"));
        }
        if d.len() != m || d.iter().any(|r| r.len() != m) {
            return Err(arg_err("distance matrix has the wrong shape"));
        }
        let zero = ExtRational::Finite(Rational::zero());
        if v.iter().any(|x| x < &zero) {
            return Err(arg_err("root valuations must be non-negative"));
        }
        for i in 0..m {
            if !d[i][i].is_infinite() {
                return Err(arg_err("diagonal distances must be +∞"));
            }
            for j in 0..m {
                if d[i][j] != d[j][i] {
                    return Err(arg_err("distance matrix is not symmetric"));
                }
                if i != j && d[i][j].is_infinite() {
                    return Err(arg_err(format!("roots {} and {} coincide", i + 1, j + 1)));
                }
                if i != j && d[i][j] < zero {
                    return Err(arg_err("distances must be non-negative"));
                }
                for k in 0..m {
                    if d[i][j] < d[i][k].clone().min(d[k][j].clone()) {
                        return Err(arg_err(format!(
                            "ultrametric inequality fails at ({}, {}, {})",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
                if i != j {
                    let floor = d[i][j].clone().min(v[j].clone());
                    if v[i] < floor || (d[i][j] != v[j] && v[i] != floor) {
                        return Err(arg_err(format!(
                            "valuations of roots {} and {} are inconsistent with their distance",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(UltrametricRoots { v, d })
    }

    /// Root data of a finite subset of the torsion module.
    pub fn from_points(v: Vec<ExtRational>, d: Vec<Vec<ExtRational>>) -> Result<Self> {
        Self::new(v, d)
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn valuations(&self) -> &[ExtRational] {
        &self.v
    }

    pub fn distance(&self, i: usize, j: usize) -> &ExtRational {
        &self.d[i][j]
    }

    /// The unique root of infinite valuation, if any.
    pub fn zero_root(&self) -> Option<usize> {
        let mut it = self.v.iter().enumerate().filter(|(_, x)| x.is_infinite()).map(|(i, _)| i);
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }
}

/// `Σ_i min(s, v_i)` for `s ≥ 0`.
pub fn newt_star(roots: &UltrametricRoots, s: &Rational) -> Result<Rational> {
    if s.is_negative() {
        return Err(Error::Domain("s must be non-negative".into()));
    }
    Ok(roots.v.iter().map(|x| x.min_with(s)).sum())
}

/// The same function as a concave PL function on `[0, ∞)`.
pub fn newt_star_fun(roots: &UltrametricRoots) -> Result<PlFun> {
    let mut xs: Vec<Rational> = roots.v.iter().filter_map(|x| x.finite().cloned()).collect();
    xs.push(Rational::zero());
    xs.sort();
    xs.dedup();
    let pts = xs.into_iter().map(|s| newt_star(roots, &s).map(|y| (s, y))).collect::<Result<Vec<_>>>()?;
    let tail = int(roots.v.iter().filter(|x| x.is_infinite()).count() as i64);
    PlFun::new(int(0), None, pts, tail)
}

/// A closed ball component: member roots (0-based, sorted) and radius.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Component {
    pub members: Vec<usize>,
    pub radius: Rational,
}

fn finite_sum<'a>(it: impl Iterator<Item = &'a ExtRational>) -> Result<Rational> {
    it.map(|x| x.finite().cloned().ok_or_else(|| invariant("infinite distance between distinct roots"))).sum()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn classes_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// Components of `{v(f(x)) ≥ ε}` by iterating the refinement relation to its fixpoint.
pub fn ball_components_iterative(roots: &UltrametricRoots, eps: &Rational) -> Result<Vec<Component>> {
    if eps.is_negative() {
        return Err(Error::Domain("ε must be non-negative".into()));
    }
    let m = roots.len();
    let mut label = vec![0usize; m];
    loop {
        let classes = classes_of(&label);
        let mut parent: Vec<usize> = (0..m).collect();
        for class in &classes {
            for (a, &i) in class.iter().enumerate() {
                for &j in &class[a + 1..] {
                    let outside = finite_sum((0..m).filter(|&k| label[k] != label[j]).map(|k| &roots.d[k][j]))?;
                    let threshold = (eps - outside) / int(class.len() as i64);
                    if roots.d[i][j] >= ExtRational::Finite(threshold) {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        parent[ri] = rj;
                    }
                }
            }
        }
        let next: Vec<usize> = (0..m).map(|i| find(&mut parent, i)).collect();
        let next_classes = classes_of(&next);
        for class in &next_classes {
            // the closure must not glue roots that fail the threshold pairwise
            for (a, &i) in class.iter().enumerate() {
                for &j in &class[a + 1..] {
                    if label[i] != label[j] {
                        return Err(invariant("refinement merged roots from different classes"));
                    }
                }
            }
        }
        if next_classes.len() == classes.len() {
            return components_with_radii(roots, eps, &next_classes);
        }
        label = next;
    }
}

fn components_with_radii(roots: &UltrametricRoots, eps: &Rational, classes: &[Vec<usize>]) -> Result<Vec<Component>> {
    let m = roots.len();
    let mut out = Vec::new();
    for class in classes {
        let radius_of = |i: usize| -> Result<Rational> {
            let outside = finite_sum((0..m).filter(|k| !class.contains(k)).map(|k| &roots.d[i][k]))?;
            Ok((eps - outside) / int(class.len() as i64))
        };
        let radius = radius_of(class[0])?;
        for &i in &class[1..] {
            if radius_of(i)? != radius {
                return Err(invariant("members of a component disagree on its radius"));
            }
        }
        if radius.is_negative() {
            return Err(invariant("component has negative radius"));
        }
        for (a, &i) in class.iter().enumerate() {
            for &j in &class[a + 1..] {
                if roots.d[i][j] < ExtRational::Finite(radius.clone()) {
                    return Err(invariant("component is not a clique above its radius"));
                }
            }
        }
        out.push(Component { members: class.clone(), radius });
    }
    out.sort();
    Ok(out)
}

/// Components by the recursive splitting lemma: split `J` by `d ≥ η/|J|`,
/// recurse into each part with `η` reduced by its distances to the rest.
pub fn ball_components_recursive(roots: &UltrametricRoots, eps: &Rational) -> Result<Vec<Component>> {
    if eps.is_negative() {
        return Err(Error::Domain("ε must be non-negative".into()));
    }
    let mut out = Vec::new();
    split(roots, (0..roots.len()).collect(), eps.clone(), &mut out)?;
    out.sort();
    Ok(out)
}

fn split(roots: &UltrametricRoots, members: Vec<usize>, eta: Rational, out: &mut Vec<Component>) -> Result<()> {
    let size = int(members.len() as i64);
    let threshold = ExtRational::Finite(&eta / &size);
    let mut parent: Vec<usize> = (0..members.len()).collect();
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            if roots.d[members[a]][members[b]] >= threshold {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let labels: Vec<usize> = (0..members.len()).map(|a| find(&mut parent, a)).collect();
    let parts = classes_of(&labels);
    if parts.len() == 1 {
        let radius = eta / size;
        if radius.is_negative() {
            return Err(invariant("component has negative radius"));
        }
        out.push(Component { members, radius });
        return Ok(());
    }
    for part in parts {
        let inside: Vec<usize> = part.iter().map(|&a| members[a]).collect();
        let c = inside[0];
        let outside = finite_sum(members.iter().filter(|k| !inside.contains(k)).map(|&k| &roots.d[c][k]))?;
        split(roots, inside, &eta - outside, out)?;
    }
    Ok(())
}

/// Ball components, computed both ways and checked equal.
pub fn ball_components(roots: &UltrametricRoots, eps: &Rational) -> Result<Vec<Component>> {
    let a = ball_components_iterative(roots, eps)?;
    let b = ball_components_recursive(roots, eps)?;
    if a != b {
        return Err(invariant("refinement fixpoint disagrees with the recursive splitting"));
    }
    Ok(a)
}

/// `η(s) = Σ_i min(s, d(0, α_i))` around the distinguished zero root.
pub fn herbrand_eta_from_roots(roots: &UltrametricRoots) -> Result<PlFun> {
    let z = roots.zero_root().ok_or_else(|| arg_err("root data has no distinguished zero root"))?;
    let around = UltrametricRoots { v: roots.d[z].clone(), d: roots.d.clone() };
    newt_star_fun(&around)
}

/// `ψ = η^{-1}`.
pub fn herbrand_psi_from_roots(roots: &UltrametricRoots) -> Result<PlFun> {
    inverse(&herbrand_eta_from_roots(roots)?)
}

/// Radius of the component containing the zero root, checked against `ψ(ε)`.
pub fn component_of_zero(roots: &UltrametricRoots, eps: &Rational) -> Result<Rational> {
    let z = roots.zero_root().ok_or_else(|| arg_err("root data has no distinguished zero root"))?;
    let comps = ball_components(roots, eps)?;
    let comp = comps.iter().find(|c| c.members.contains(&z)).expect("classes cover every root");
    let expected = herbrand_psi_from_roots(roots)?.eval(eps)?;
    if comp.radius != expected {
        return Err(invariant(format!("zero component has radius {} but ψ(ε) = {expected}", comp.radius)));
    }
    Ok(expected)
}

/// `star(outer) ∘ star(inner) = star(composite)`.
pub fn compose_star_check(
    outer: &UltrametricRoots,
    inner: &UltrametricRoots,
    composite: &UltrametricRoots,
) -> Result<bool> {
    let lhs = compose(&newt_star_fun(outer)?, &newt_star_fun(inner)?)?;
    Ok(lhs == newt_star_fun(composite)?)
}

/// Root data of the kernel `<π^{-a_i} ē_i>` inside the torsion model of `P`.
pub fn kernel_roots(p: &NewtonPolygon, a: &[i64]) -> Result<UltrametricRoots> {
    let c = subgroup(p, a)?;
    let field = crate::field::FiniteField::new(p.q())?;
    let els = c.elements();
    let v = els.iter().map(|x| valuation(p, x)).collect::<Result<Vec<_>>>()?;
    let d = els
        .iter()
        .map(|x| els.iter().map(|y| valuation(p, &x.sub(y, &field))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    UltrametricRoots::new(v, d)
}

/// The composition lemma on torsion: multiplication by `π` after the
/// quotient by `C_a` has kernel `C_{a+1}`, so `η_{P'} ∘ star(C_a) = star(C_{a+1})`.
pub fn isogeny_star_check(p: &NewtonPolygon, a: &[i64]) -> Result<bool> {
    let image = crate::hecke::apply(p, a)?.polygon;
    let star_a = newt_star_fun(&kernel_roots(p, a)?)?;
    let next: Vec<i64> = a.iter().map(|x| x + 1).collect();
    let star_next = newt_star_fun(&kernel_roots(p, &next)?)?;
    Ok(compose(&image.eta(), &star_a)? == star_next)
}

impl fmt::Display for UltrametricRoots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pairs = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                pairs.push(format!("{},{}:{}", i + 1, j + 1, self.d[i][j]));
            }
        }
        write!(f, "roots m={} v={} d=({})", self.len(), join_list(&self.v, ";"), pairs.join(";"))
    }
}

impl FromStr for UltrametricRoots {
    type Err = Error;

    /// `roots m=<m> v=<v_1;...;v_m> d=(i,j:r;...)`, 1-based; an omitted pair
    /// defaults to `min(v_i, v_j)`.
    fn from_str(s: &str) -> Result<Self> {
        let fields = crate::rational::tagged_fields(s, "roots")?;
        crate::rational::only_keys(&fields, &["m", "v", "d"])?;
        let m = parse_i64(crate::rational::field(&fields, "m")?)?;
        if !(1..=256).contains(&m) {
            return Err(parse_err("m must be between 1 and 256"));
        }
        let m = m as usize;
        let v = crate::rational::field(&fields, "v")?
            .split(';')
            .map(str::parse::<ExtRational>)
            .collect::<Result<Vec<_>>>()?;
        if v.len() != m {
            return Err(parse_err(format!("expected {m} valuations, got {}", v.len())));
        }
        let mut d: Vec<Vec<Option<ExtRational>>> = vec![vec![None; m]; m];
        let body = match fields.iter().find(|(k, _)| *k == "d") {
            Some(_) => strip_delims(crate::rational::field(&fields, "d")?, '(', ')')?,
            None => "",
        };
        if !body.is_empty() {
            for entry in body.split(';') {
                let (ij, r) =
                    entry.split_once(':').ok_or_else(|| parse_err(format!("expected i,j:r, got `{entry}`")))?;
                let (i, j) = ij.split_once(',').ok_or_else(|| parse_err(format!("expected i,j, got `{ij}`")))?;
                let (i, j) = (parse_i64(i)?, parse_i64(j)?);
                if i < 1 || j < 1 || i as usize > m || j as usize > m || i == j {
                    return Err(parse_err(format!("pair ({i},{j}) is out of range")));
                }
                let (i, j) = (i as usize - 1, j as usize - 1);
                let r: ExtRational = r.parse()?;
                if d[i][j].as_ref().is_some_and(|old| old != &r) {
                    return Err(parse_err(format!("pair ({},{}) given twice", i + 1, j + 1)));
                }
                d[i][j] = Some(r.clone());
                d[j][i] = Some(r);
            }
        }
        let full = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| match (&d[i][j], i == j) {
                        (_, true) => ExtRational::Infinity,
                        (Some(r), false) => r.clone(),
                        (None, false) => v[i].clone().min(v[j].clone()),
                    })
                    .collect()
            })
            .collect();
        UltrametricRoots::new(v, full).map_err(|e| parse_err(e.to_string()))
    }
}
