mod common;

use common::{components_oracle, herbrand_psi_oracle, r};
use newtb::newton::Context;
use newtb::random;
use newtb::rational::{int, rat, ExtRational, Rational};
use newtb::ultrametric::{
    ball_components, ball_components_iterative, ball_components_recursive, component_of_zero, compose_star_check,
    herbrand_eta_from_roots, isogeny_star_check, kernel_roots, newt_star, newt_star_fun, Component, UltrametricRoots,
};
use newtb::Error;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn roots(s: &str) -> UltrametricRoots {
    s.parse().unwrap()
}

fn flat_roots() -> UltrametricRoots {
    roots("roots m=4 v=inf;1/3;1/3;1/3 d=(2,3:1/3;2,4:1/3;3,4:1/3)")
}

fn as_pairs(c: Vec<Component>) -> Vec<(Vec<usize>, Rational)> {
    c.into_iter().map(|c| (c.members, c.radius)).collect()
}

#[test]
fn newt_star_examples() {
    let f = flat_roots();
    assert_eq!(newt_star(&f, &int(0)).unwrap(), int(0));
    assert_eq!(newt_star(&f, &r("1/3")).unwrap(), r("4/3"));
    assert_eq!(newt_star(&f, &int(2)).unwrap(), int(3));
    assert!(matches!(newt_star(&f, &int(-1)), Err(Error::Domain(_))));
    let g = newt_star_fun(&f).unwrap();
    assert!(g.is_concave());
    assert_eq!(g.eval(&int(5)).unwrap(), int(6));
    // the torsion of the flat polygon has the same Herbrand function
    assert_eq!(herbrand_eta_from_roots(&f).unwrap(), Context::new(2, 2).unwrap().flat().eta());
}

#[test]
fn component_examples() {
    let one = roots("roots m=1 v=2");
    assert_eq!(as_pairs(ball_components(&one, &int(5)).unwrap()), vec![(vec![0], int(5))]);
    let close = roots("roots m=2 v=0;0 d=(1,2:1)");
    assert_eq!(as_pairs(ball_components(&close, &int(4)).unwrap()), vec![(vec![0], int(3)), (vec![1], int(3))]);
    let far = roots("roots m=2 v=0;0 d=(1,2:3)");
    assert_eq!(as_pairs(ball_components(&far, &int(4)).unwrap()), vec![(vec![0, 1], int(2))]);
}

#[test]
fn zero_component_of_flat() {
    let f = flat_roots();
    assert_eq!(component_of_zero(&f, &r("4/3")).unwrap(), r("1/3"));
    assert_eq!(component_of_zero(&f, &r("2/3")).unwrap(), r("1/6"));
    assert!(component_of_zero(&roots("roots m=1 v=1"), &int(1)).is_err());
}

#[test]
fn composition_of_pi_with_itself() {
    let p = Context::new(2, 2).unwrap().flat();
    let pi = kernel_roots(&p, &[1, 1]).unwrap();
    let pi2 = kernel_roots(&p, &[2, 2]).unwrap();
    assert!(compose_star_check(&pi, &pi, &pi2).unwrap());
    assert!(!compose_star_check(&pi, &pi, &pi).unwrap());
    let identity = roots("roots m=1 v=inf");
    assert!(compose_star_check(&pi, &identity, &pi).unwrap());
    assert!(isogeny_star_check(&p, &[1, 0]).unwrap());
}

#[test]
fn text_forms() {
    let f = flat_roots();
    assert_eq!(f.to_string().parse::<UltrametricRoots>().unwrap(), f);
    assert_eq!(f.zero_root(), Some(0));
    // omitted pairs default to min(v_i, v_j)
    assert_eq!(roots("roots m=2 v=1;2").distance(0, 1), &ExtRational::from(int(1)));
    for bad in [
        "roots m=0 v=",
        "roots m=2 v=1",
        "roots m=2 v=1;1 d=(1,1:1)",
        "roots m=2 v=1;1 d=(1,2:1;2,1:2)",
        "roots m=3 v=0;0;0 d=(1,2:1;1,3:2;2,3:3)",
        "roots m=2 v=-1;0",
        "roots m=2 v=0;1 d=(1,2:2)",
        "roots m=2 v=inf;inf",
    ] {
        assert!(bad.parse::<UltrametricRoots>().is_err(), "{bad}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn components_match_sphere_radii(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = rng.gen_range(1..=8);
        let f = random::ultrametric_roots(&mut rng, m);
        let eps = rat(rng.gen_range(1..=60), rng.gen_range(1..=6));
        let iter = ball_components_iterative(&f, &eps).unwrap();
        prop_assert_eq!(&iter, &ball_components_recursive(&f, &eps).unwrap());
        prop_assert_eq!(as_pairs(iter), components_oracle(&f, &eps));
    }

    #[test]
    fn zero_component_is_psi(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = rng.gen_range(1..=8);
        let f = random::ultrametric_roots(&mut rng, m);
        let eps = rat(rng.gen_range(1..=60), rng.gen_range(1..=6));
        prop_assert_eq!(component_of_zero(&f, &eps).unwrap(), herbrand_psi_oracle(&f, &eps));
    }

    #[test]
    fn components_refine_as_eps_grows(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = rng.gen_range(1..=8);
        let f = random::ultrametric_roots(&mut rng, m);
        let eps = rat(rng.gen_range(1..=30), rng.gen_range(1..=6));
        let bigger = &eps + rat(rng.gen_range(0..=30), rng.gen_range(1..=6));
        let coarse = ball_components(&f, &eps).unwrap();
        let fine = ball_components(&f, &bigger).unwrap();
        for c in &fine {
            prop_assert!(c.radius >= int(0));
            prop_assert!(coarse.iter().any(|k| c.members.iter().all(|x| k.members.contains(x))));
        }
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = rng.gen_range(1..=8);
        let f = random::ultrametric_roots(&mut rng, m);
        prop_assert_eq!(f.to_string().parse::<UltrametricRoots>().unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn quotient_then_pi_is_the_bigger_kernel(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random::polygon(&mut rng, Context::new(2, 2).unwrap(), 8);
        let a: Vec<i64> = (0..2).map(|_| rng.gen_range(0..=2)).collect();
        prop_assert!(isogeny_star_check(&p, &a).unwrap());
    }
}
