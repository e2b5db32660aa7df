//! Exact Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    Inconsistent,
    Underdetermined,
}

/// Solves a possibly over-determined system with `cols` unknowns.
#[allow(clippy::needless_range_loop)]
pub fn solve(a: &[Vec<Rational>], b: &[Rational], cols: usize) -> Solution {
    let rows = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.resize(cols, Rational::zero());
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return Solution::Inconsistent;
    }
    if pivots.len() < cols {
        return Solution::Underdetermined;
    }
    Solution::Unique((0..cols).map(|k| m[k][cols].clone()).collect())
}

/// Barycentric weights of `target` with respect to affinely independent `points`.
pub fn barycentric(points: &[Vec<Rational>], target: &[Rational]) -> Solution {
    let k = points.len();
    let dim = target.len();
    let mut a: Vec<Vec<Rational>> = (0..dim).map(|d| points.iter().map(|p| p[d].clone()).collect()).collect();
    let mut b: Vec<Rational> = target.to_vec();
    a.push(vec![crate::rational::one(); k]);
    b.push(crate::rational::one());
    solve(&a, &b, k)
}
