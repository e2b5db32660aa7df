mod common;

use common::{brute_isogeny_valuation, r, rs, vertex};
use itertools::Itertools;
use newtb::building::{pairs, ApartmentVertex};
use newtb::hecke::{
    a_count, apply, chamber_of, in_chamber, monoid_compose_check, point_valuation_formula, sorting_permutation,
    transported_lambda_iter, vertex_polygon, vertex_polygon_closed_form,
};
use newtb::newton::{Context, NewtonPolygon};
use newtb::random;
use newtb::rational::{int, ExtRational, Rational};
use newtb::torsion::{isogeny_point_valuation, subgroup, TorsionVector};
use newtb::Error;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ctx(q: u32, n: usize) -> Context {
    Context::new(q, n).unwrap()
}

fn poly(q: u32, s: &str) -> NewtonPolygon {
    let slopes = rs(s);
    NewtonPolygon::from_slopes(ctx(q, slopes.len()), slopes).unwrap()
}

#[test]
fn order_counts() {
    let c = ctx(3, 2);
    assert_eq!(a_count(c, 0).unwrap(), int(1));
    assert_eq!(a_count(c, 1).unwrap(), int(2));
    assert_eq!(a_count(c, 2).unwrap(), int(6));
    assert!(a_count(c, -1).is_err());
}

#[test]
fn apply_examples() {
    let flat = ctx(2, 2).flat();
    assert_eq!(apply(&flat, &[0, 0]).unwrap().polygon, flat);
    let h = apply(&flat, &[1, 0]).unwrap();
    assert_eq!(h.polygon, poly(2, "2/3,1/6"));
    assert_eq!(h.sigma, vec![1, 0]);
    // scalar translations act trivially
    assert_eq!(apply(&flat, &[1, 1]).unwrap().polygon, flat);
    let p = poly(2, "2/3,1/6");
    assert_eq!(apply(&p, &[0, 1]).unwrap().polygon, poly(2, "5/6,1/12"));
    assert!(matches!(apply(&flat, &[1]), Err(Error::Argument(_))));
    assert!(matches!(apply(&flat, &[-1, 0]), Err(Error::Argument(_))));
}

#[test]
fn formula_examples() {
    let flat = ctx(2, 2).flat();
    assert_eq!(point_valuation_formula(&flat, &[1, 0], &[1], &[1]).unwrap(), r("2/3"));
    assert!(point_valuation_formula(&flat, &[1, 0], &[0], &[1]).is_err());
    assert!(point_valuation_formula(&flat, &[1, 0], &[], &[]).is_err());
    assert!(point_valuation_formula(&flat, &[1, 0], &[1, 1], &[1, 1]).is_err());
}

#[test]
fn sorting_needs_the_secondary_key() {
    // λ^{(0)} = ∞ for both a_i = 0 coordinates, so only the next iterate separates them
    let p = poly(2, "9/19,3/19,1/19");
    let a = [1, 1, 0];
    let sigma = sorting_permutation(&p, &a);
    let image = apply(&p, &a).unwrap();
    assert_eq!(image.sigma, sigma);
    let slopes = image.polygon.slopes();
    assert!(slopes.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn transported_iterate_example() {
    let flat = ctx(2, 2).flat();
    assert_eq!(transported_lambda_iter(&flat, &[1, 0], 1, 2).unwrap(), r("1/24"));
    assert!(transported_lambda_iter(&flat, &[1, 0], 1, 0).is_err());
}

#[test]
fn vertex_polygon_examples() {
    for q in [2u32, 3] {
        for n in 2..=4usize {
            let c = ctx(q, n);
            assert_eq!(vertex_polygon(c, &ApartmentVertex::origin(n)).unwrap(), c.flat());
            let qn1 = c.pow(n as i64) - int(1);
            for i in 1..n {
                let p = vertex_polygon(c, &ApartmentVertex::omega(n, i)).unwrap();
                // i slopes q^{n−i}/(q^n − 1), then n − i slopes 1/(q^i (q^n − 1))
                let top = c.pow((n - i) as i64) / &qn1;
                let bottom = int(1) / (c.pow(i as i64) * &qn1);
                let expected: Vec<Rational> =
                    (0..n).map(|k| if k < i { top.clone() } else { bottom.clone() }).collect();
                assert_eq!(p.slopes(), &expected[..], "q={q} n={n} i={i}");
            }
        }
    }
}

#[test]
fn chamber_of_flat_and_of_a_vertex() {
    let (s, tight) = chamber_of(&ctx(2, 3).flat()).unwrap();
    assert_eq!(s.vertices(false).unwrap().len(), 3);
    assert!(tight.iter().all(|&t| t));
    let p = vertex_polygon(ctx(3, 3), &vertex(&[0, 1, 3])).unwrap();
    let (s, _) = chamber_of(&p).unwrap();
    assert!(s.vertices(false).unwrap().contains(&vertex(&[0, 1, 3])));
    assert!(in_chamber(&p, &s));
}

#[test]
fn isogeny_oracle_matches_formula_exhaustively() {
    let q = 2;
    for n in 2..=3usize {
        let p = ctx(q, n).flat();
        let slanted = if n == 2 { poly(q, "2/3,1/6") } else { poly(q, "2/7,2/7,1/28") };
        for a in (0..n).map(|_| 0..=4i64).multi_cartesian_product().filter(|a| a.iter().sum::<i64>() <= 4) {
            for base in [&p, &slanted] {
                let c = subgroup(base, &a).unwrap();
                for i in 0..n {
                    for order in [a[i] + 1, a[i] + 2] {
                        let x = TorsionVector::basis(n, i, order as usize);
                        let brute = brute_isogeny_valuation(base, &a, &x);
                        let formula = point_valuation_formula(base, &a, &[i], &[order]).unwrap();
                        assert_eq!(brute, ExtRational::Finite(formula.clone()), "a={a:?} i={i} order={order}");
                        assert_eq!(isogeny_point_valuation(base, &c, &x).unwrap(), brute);
                    }
                }
            }
        }
    }
}

#[test]
fn monoid_law_exhaustive() {
    for p in [ctx(2, 2).flat(), poly(2, "2/3,1/6"), poly(3, "1/4,1/12")] {
        for a in (0..2).map(|_| 0..=2i64).multi_cartesian_product() {
            for b in (0..2).map(|_| 0..=2i64).multi_cartesian_product() {
                let sigma = monoid_compose_check(&p, &a, &b).unwrap();
                if b[0] <= b[1] {
                    assert_eq!(sigma, vec![0, 1], "{p} a={a:?} b={b:?}");
                }
            }
        }
    }
}

/// Every vertex with coordinates in `0..=max`, sorted non-decreasingly and based at 0.
fn quartier_vertices(n: usize, max: i64) -> Vec<ApartmentVertex> {
    (1..n)
        .map(|_| 0..=max)
        .multi_cartesian_product()
        .filter(|c| c.windows(2).all(|w| w[0] <= w[1]))
        .map(|c| {
            let mut v = vec![0];
            v.extend(c);
            vertex(&v)
        })
        .collect()
}

#[test]
fn triple_path_vertex_polygons() {
    for q in [2u32, 3] {
        for n in 2..=4usize {
            let c = ctx(q, n);
            for x in quartier_vertices(n, 3) {
                let a = x.coords().to_vec();
                let via_hecke = apply(&c.flat(), &a).unwrap().polygon;
                let closed = vertex_polygon_closed_form(c, &a);
                assert_eq!(via_hecke.slopes(), &closed[..]);
                for (i, j) in pairs(n) {
                    assert_eq!(
                        via_hecke.slope_iter(i, a[j] - a[i] + 1),
                        ExtRational::Finite(via_hecke.slope(j).clone())
                    );
                }
                assert_eq!(vertex_polygon(c, &x).unwrap(), via_hecke);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn chamber_contains_polygon(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = ctx(rng.gen_range(2..=4), rng.gen_range(1..=4));
        let p = random::polygon(&mut rng, c, 9);
        let (s, tight) = chamber_of(&p).unwrap();
        prop_assert!(in_chamber(&p, &s));
        prop_assert_eq!(tight.len(), c.n * (c.n - 1) / 2);
        // the vertex polygons of the chamber lie in it too
        for v in s.vertices(false).unwrap() {
            prop_assert!(in_chamber(&vertex_polygon(c, &v).unwrap(), &s));
        }
    }

    #[test]
    fn transported_iterates_agree(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = ctx(rng.gen_range(2..=3), rng.gen_range(1..=3));
        let p = random::polygon(&mut rng, c, 8);
        let a: Vec<i64> = (0..c.n).map(|_| rng.gen_range(0..=3)).collect();
        for i in 0..c.n {
            for k in 1..=3 {
                prop_assert!(transported_lambda_iter(&p, &a, i, k).is_ok());
            }
        }
    }

    #[test]
    fn sorted_exponents_compose_without_permutation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = ctx(rng.gen_range(2..=3), rng.gen_range(1..=3));
        let p = random::polygon(&mut rng, c, 8);
        let a: Vec<i64> = (0..c.n).map(|_| rng.gen_range(0..=2)).collect();
        let mut b: Vec<i64> = (0..c.n).map(|_| rng.gen_range(0..=2)).collect();
        b.sort();
        let identity: Vec<usize> = (0..c.n).collect();
        prop_assert_eq!(monoid_compose_check(&p, &a, &b).unwrap(), identity);
    }
}
