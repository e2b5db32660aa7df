mod common;

use common::{compose_pointwise, dual_at, hull_at, r, rs};
use newtb::plconvex::{
    compose, integrate_step, inverse, legendre_dual, legendre_dual_concave, lower_convex_hull, PlFun, StepFun,
};
use newtb::random;
use newtb::rational::{int, rat, ExtRational, Rational};
use newtb::Error;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn pl(s: &str) -> PlFun {
    s.parse().unwrap()
}

#[test]
fn hull_of_polygon_points() {
    let pts: Vec<(Rational, ExtRational)> =
        vec![(int(1), int(1).into()), (int(2), r("2/3").into()), (int(4), int(0).into())];
    let h = lower_convex_hull(&pts).unwrap();
    // (2, 2/3) is on the chord, so it is merged away
    assert_eq!(h.points(), &[(int(1), int(1)), (int(4), int(0))][..]);
    assert_eq!(h.eval(&int(2)).unwrap(), r("2/3"));
}

#[test]
fn hull_drops_point_above_chord() {
    let pts: Vec<(Rational, ExtRational)> =
        vec![(int(1), int(1).into()), (int(2), int(1).into()), (int(4), int(0).into())];
    let h = lower_convex_hull(&pts).unwrap();
    assert_eq!(h.points().len(), 2);
    assert_eq!(h.eval(&int(2)).unwrap(), r("2/3"));
}

#[test]
fn hull_ignores_infinite_values() {
    let pts: Vec<(Rational, ExtRational)> =
        vec![(int(0), ExtRational::Infinity), (int(1), int(1).into()), (int(3), int(0).into())];
    let h = lower_convex_hull(&pts).unwrap();
    assert_eq!(h.lo(), &int(1));
}

#[test]
fn hull_needs_two_points() {
    let pts: Vec<(Rational, ExtRational)> = vec![(int(1), int(1).into())];
    assert!(matches!(lower_convex_hull(&pts), Err(Error::Argument(_))));
}

#[test]
fn dual_of_affine_is_constant_then_tail() {
    // f(x) = x on [0, ∞): inf_x (x + s x) = 0 for s ≥ −1
    let f = PlFun::identity(int(0), None);
    let g = legendre_dual(&f).unwrap();
    assert_eq!(g.lo(), &int(-1));
    assert_eq!(g.eval(&int(5)).unwrap(), int(0));
}

#[test]
fn dual_rejects_non_convex() {
    let f = pl("plfun lo=0 hi=2 pts=(0:0;1:1;2:1) tail=0");
    assert!(matches!(legendre_dual(&f), Err(Error::Argument(_))));
}

#[test]
fn reverse_transform_left_of_tail_is_a_domain_error() {
    let g = pl("plfun lo=0 hi=inf pts=(0:0;1:2) tail=1");
    assert!(matches!(legendre_dual_concave(&g, Some((int(0), None))), Err(Error::Domain(_))));
}

#[test]
fn compose_of_herbrand_steps() {
    // η = 4s on [0, 1/3], s + 1 beyond; η∘η at 1/12 is 4·(4/12) = 4/3
    let eta = pl("plfun lo=0 hi=inf pts=(0:0;1/3:4/3) tail=1");
    let c = compose(&eta, &eta).unwrap();
    assert_eq!(c.eval(&r("1/12")).unwrap(), r("4/3"));
    assert_eq!(c.eval(&int(1)).unwrap(), int(3));
}

#[test]
fn compose_range_check() {
    let f = pl("plfun lo=0 hi=1 pts=(0:0;1:1) tail=0");
    let g = pl("plfun lo=0 hi=inf pts=(0:0) tail=1");
    assert!(matches!(compose(&f, &g), Err(Error::Domain(_))));
}

#[test]
fn inverse_of_eta() {
    let eta = pl("plfun lo=0 hi=inf pts=(0:0;1/3:4/3) tail=1");
    let psi = inverse(&eta).unwrap();
    assert_eq!(psi.eval(&r("4/3")).unwrap(), r("1/3"));
    assert_eq!(psi.eval(&r("2/3")).unwrap(), r("1/6"));
    assert!(matches!(inverse(&pl("plfun lo=0 hi=1 pts=(0:1;1:0) tail=0")), Err(Error::Argument(_))));
}

#[test]
fn step_integral() {
    let g = StepFun::new(vec![(int(0), int(2)), (int(1), int(3))], Some(int(4))).unwrap();
    assert_eq!(integrate_step(&g, &int(0), &int(4)).unwrap(), int(11));
    assert_eq!(g.integrate(&r("1/2"), &r("3/2")).unwrap(), r("5/2"));
    assert!(matches!(g.integrate(&int(2), &int(1)), Err(Error::Argument(_))));
    assert!(matches!(g.integrate(&int(0), &int(5)), Err(Error::Domain(_))));
}

#[test]
fn eval_outside_domain() {
    let f = pl("plfun lo=0 hi=1 pts=(0:0;1:1) tail=0");
    assert!(matches!(f.eval(&int(2)), Err(Error::Domain(_))));
}

#[test]
fn text_round_trip_and_rejects() {
    let f = pl("plfun lo=-1 hi=inf pts=(-1:2;0:1;3:4) tail=5/2");
    assert_eq!(f.to_string().parse::<PlFun>().unwrap(), f);
    for bad in ["plfun lo=0", "plfun lo=0 hi=1 pts=(1:0) tail=0", "curve lo=0", "plfun lo=0 hi=1 pts=(0:0;0:1) tail=0"]
    {
        assert!(bad.parse::<PlFun>().is_err(), "{bad}");
    }
}

fn sample_points(f: &PlFun, rng: &mut StdRng) -> Vec<Rational> {
    let hi = f.hi().cloned().unwrap_or_else(|| f.points().last().unwrap().0.clone() + int(3));
    (0..8)
        .map(|_| {
            let t = rat(rng.gen_range(0..=24), 24);
            f.lo() + t * (&hi - f.lo())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn legendre_involution(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let bounded = rng.gen_bool(0.5);
        let f = random::convex_plfun(&mut rng, bounded);
        let g = legendre_dual(&f).unwrap();
        prop_assert!(g.is_concave());
        let window = (!bounded).then(|| (f.lo().clone(), None));
        prop_assert_eq!(legendre_dual_concave(&g, window).unwrap(), f);
    }

    #[test]
    fn dual_matches_pointwise_infimum(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random::convex_plfun(&mut rng, true);
        let g = legendre_dual(&f).unwrap();
        for _ in 0..8 {
            let s = g.lo() + rat(rng.gen_range(0..=60), 6);
            prop_assert_eq!(g.eval(&s).unwrap(), dual_at(&f, &s));
        }
    }

    #[test]
    fn compose_matches_pointwise(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random::increasing_plfun(&mut rng);
        let g = random::increasing_plfun(&mut rng);
        let c = compose(&f, &g).unwrap();
        for x in sample_points(&g, &mut rng) {
            prop_assert_eq!(c.eval(&x).unwrap(), compose_pointwise(&f, &g, &x));
        }
        // beyond every breakpoint too
        let far = int(1000);
        prop_assert_eq!(c.eval(&far).unwrap(), compose_pointwise(&f, &g, &far));
    }

    #[test]
    fn redundant_breakpoints_do_not_change_results(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let bounded = rng.gen_bool(0.5);
        let f = random::convex_plfun(&mut rng, bounded);
        let extra = sample_points(&f, &mut rng);
        let raw = f.raw_points_with(&extra).unwrap();
        let g = PlFun::new(f.lo().clone(), f.hi().cloned(), raw, f.tail().clone()).unwrap();
        prop_assert_eq!(&g, &f);
        prop_assert_eq!(legendre_dual(&g).unwrap(), legendre_dual(&f).unwrap());
    }

    #[test]
    fn hull_matches_pairwise_oracle(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let k = rng.gen_range(2..=7);
        let mut pts: Vec<(Rational, Rational)> = (0..k)
            .map(|i| (int(i * 2 + rng.gen_range(0..=1)), rat(rng.gen_range(-9..=9), rng.gen_range(1..=3))))
            .collect();
        pts.sort();
        pts.dedup_by(|b, a| a.0 == b.0);
        prop_assume!(pts.len() >= 2);
        let ext: Vec<(Rational, ExtRational)> = pts.iter().map(|(x, y)| (x.clone(), y.clone().into())).collect();
        let h = lower_convex_hull(&ext).unwrap();
        prop_assert!(h.is_convex());
        for x in &pts {
            prop_assert_eq!(Some(h.eval(&x.0).unwrap()), hull_at(&pts, &x.0));
        }
        let mid = (&pts[0].0 + &pts[pts.len() - 1].0) / int(2) + rat(1, 3);
        if h.in_domain(&mid) {
            prop_assert_eq!(Some(h.eval(&mid).unwrap()), hull_at(&pts, &mid));
        }
    }

    #[test]
    fn inverse_round_trip(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random::increasing_plfun(&mut rng);
        let g = inverse(&f).unwrap();
        prop_assert_eq!(compose(&g, &f).unwrap(), PlFun::identity(int(0), None));
        prop_assert_eq!(inverse(&g).unwrap(), f);
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let bounded = rng.gen_bool(0.5);
        let f = random::convex_plfun(&mut rng, bounded);
        prop_assert_eq!(f.to_string().parse::<PlFun>().unwrap(), f);
    }
}

#[test]
fn list_helpers() {
    assert_eq!(rs("1/2,3"), vec![r("1/2"), int(3)]);
}
