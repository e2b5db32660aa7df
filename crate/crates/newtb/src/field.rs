//! Small finite fields `F_q` with table arithmetic.
//!
//! Elements are encoded as `0..q`, the base-`p` digits of the integer being the
//! coefficients of a polynomial modulo a fixed irreducible of degree `r`.

use crate::error::{arg_err, Result};

/// Largest field size supported (tables are `q²` entries).
pub const MAX_Q: u32 = 256;

#[derive(Clone, Debug)]
pub struct FiniteField {
    q: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
}

impl FiniteField {
    pub fn new(q: u32) -> Result<Self> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(arg_err(format!("field size {q} is outside 2..={MAX_Q}")));
        }
        let (p, r) = prime_power(q).ok_or_else(|| arg_err(format!("{q} is not a prime power")))?;
        let modulus = irreducible(p, r);
        let qs = q as usize;
        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        let mut neg = vec![0u16; qs];
        for a in 0..q {
            let da = digits(a, p, r);
            neg[a as usize] = undigits(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>(), p) as u16;
            for b in 0..q {
                let db = digits(b, p, r);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = undigits(&s, p) as u16;
                mul[a as usize * qs + b as usize] = undigits(&poly_mul_mod(&da, &db, &modulus, p), p) as u16;
            }
        }
        Ok(FiniteField { q, add, mul, neg })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg[b as usize])
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.q as u16
    }
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut m = q;
    let mut r = 0;
    while m.is_multiple_of(p) {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

fn digits(mut a: u32, p: u32, r: u32) -> Vec<u32> {
    (0..r)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Product of two polynomials of degree `< r` reduced modulo a monic `modulus` of degree `r`.
fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let r = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * r.max(1)];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (r..prod.len()).rev() {
        let c = prod[deg];
        if c != 0 {
            for (k, m) in modulus.iter().enumerate() {
                let idx = deg - r + k;
                prod[idx] = (prod[idx] + p * p - c * m % p) % p;
            }
        }
    }
    prod.truncate(r);
    prod
}

/// First monic irreducible polynomial of degree `r` over `F_p`, coefficients low to high.
fn irreducible(p: u32, r: u32) -> Vec<u32> {
    if r == 1 {
        return vec![0, 1];
    }
    let count = p.pow(r);
    (0..count)
        .map(|lower| {
            let mut c = digits(lower, p, r);
            c.push(1);
            c
        })
        .find(|c| !has_factor(c, p))
        .expect("irreducible polynomials exist in every degree")
}

fn has_factor(poly: &[u32], p: u32) -> bool {
    let r = poly.len() - 1;
    for d in 1..=r / 2 {
        for lower in 0..p.pow(d as u32) {
            let mut f = digits(lower, p, d as u32);
            f.push(1);
            if poly_rem(poly, &f, p).iter().all(|&x| x == 0) {
                return true;
            }
        }
    }
    false
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let dm = m.len() - 1;
    while a.len() > dm {
        let c = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        for (k, x) in m.iter().enumerate() {
            a[shift + k] = (a[shift + k] + p * p - c * x % p) % p;
        }
        a.pop();
    }
    a
}
