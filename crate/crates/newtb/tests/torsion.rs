mod common;

use common::{all_torsion, enumerated_kernel_norm, geometric_tail, r, rs, vertex};
use newtb::field::FiniteField;
use newtb::newton::{Context, NewtonPolygon};
use newtb::random;
use newtb::rational::{int, rat, ExtRational, Rational};
use newtb::torsion::{
    filtration_class_sets, hodge_tate_norm, hodge_tate_norm_covector, hodge_tate_norm_integral,
    isogeny_point_valuation, kernel_valuation_sum, lower_fil_exponents, ram_simplex, subgroup, subgroup_with_cap,
    upper_fil_exponents, valuation, FiniteSubgroup, Indexing, SubgroupSpec, TorsionVector,
};
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
fn basis_valuations() {
    let p = poly(2, "2/3,1/6");
    assert_eq!(valuation(&p, &TorsionVector::zero(2, 3)).unwrap(), ExtRational::Infinity);
    assert_eq!(valuation(&p, &TorsionVector::basis(2, 0, 1)).unwrap(), r("2/3").into());
    assert_eq!(valuation(&p, &TorsionVector::basis(2, 0, 2)).unwrap(), r("1/6").into());
    assert_eq!(valuation(&p, &TorsionVector::basis(2, 1, 1)).unwrap(), r("1/6").into());
    let field = FiniteField::new(2).unwrap();
    let x = TorsionVector::basis(2, 0, 1).add(&TorsionVector::basis(2, 1, 1), &field);
    assert_eq!(valuation(&p, &x).unwrap(), r("1/6").into());
    assert_eq!(x.times_pi(), TorsionVector::zero(2, 1));
}

#[test]
fn subgroup_sizes_and_cap() {
    let p = ctx(3, 2).flat();
    assert_eq!(subgroup(&p, &[1, 2]).unwrap().len(), 27);
    assert_eq!(subgroup(&p, &[0, 0]).unwrap().len(), 1);
    match subgroup_with_cap(&p, &[3, 3], 100) {
        Err(Error::Resource { needed, cap }) => assert_eq!((needed, cap), (729, 100)),
        other => panic!("expected a resource error, got {other:?}"),
    }
    assert!(subgroup(&p, &[1]).is_err());
}

#[test]
fn generated_subgroup_is_closed() {
    let field = FiniteField::new(2).unwrap();
    let g = TorsionVector::basis(2, 0, 2);
    let c = FiniteSubgroup::generated_by(vec![g.clone()], 2, &field, 1 << 10).unwrap();
    assert_eq!(c.len(), 4);
    assert!(c.contains(&g.times_pi()));
    assert!(c.contains(&TorsionVector::basis(2, 0, 1)));
    assert!(!c.contains(&TorsionVector::basis(2, 1, 1)));
}

#[test]
fn isogeny_valuation_examples() {
    let p = ctx(2, 2).flat();
    let trivial = subgroup(&p, &[0, 0]).unwrap();
    let x = TorsionVector::basis(2, 1, 2);
    assert_eq!(isogeny_point_valuation(&p, &trivial, &x).unwrap(), valuation(&p, &x).unwrap());
    let c = subgroup(&p, &[1, 0]).unwrap();
    assert_eq!(isogeny_point_valuation(&p, &c, &TorsionVector::basis(2, 1, 1)).unwrap(), r("2/3").into());
    assert_eq!(isogeny_point_valuation(&p, &c, &TorsionVector::basis(2, 0, 1)).unwrap(), ExtRational::Infinity);
    assert_eq!(kernel_valuation_sum(&p, &c).unwrap(), r("1/3"));
}

#[test]
fn filtration_examples() {
    let p = poly(2, "2/3,1/6");
    assert_eq!(lower_fil_exponents(&p, &r("2/3")).unwrap(), vec![1, 0]);
    assert_eq!(lower_fil_exponents(&p, &r("1/6")).unwrap(), vec![2, 1]);
    assert!(matches!(lower_fil_exponents(&p, &int(0)), Err(Error::Argument(_))));
    // η(2/3) = 5/3 and η(1/6) = 2/3
    assert_eq!(upper_fil_exponents(&p, &r("5/3")).unwrap(), vec![0, 1]);
    assert_eq!(upper_fil_exponents(&p, &r("2/3")).unwrap(), vec![0, 0]);
    let f = filtration_class_sets(&p).unwrap();
    assert!(f.lower.contains(&vertex(&[0, 0])) && f.lower.contains(&vertex(&[0, 1])));
}

#[test]
fn ramification_simplex_of_flat_is_the_origin() {
    let s = ram_simplex(&ctx(2, 3).flat()).unwrap();
    assert_eq!(s.vertices, vec![vertex(&[0, 0, 0])]);
    assert!(s.tight.iter().all(|&t| t));
}

#[test]
fn hodge_tate_norms_of_flat() {
    // Σ_{k≥1} 2^{k−1} · (1/3) · 4^{1−k}
    let expected = geometric_tail(&r("1/3"), &r("1/2"));
    assert_eq!(expected, r("2/3"));
    let p = ctx(2, 2).flat();
    assert_eq!(hodge_tate_norm(&p, 0).unwrap(), expected);
    assert_eq!(hodge_tate_norm(&p, 1).unwrap(), expected);
    assert_eq!(enumerated_kernel_norm(&p, 0, 3), expected);
    assert!(hodge_tate_norm(&p, 2).is_err());
    assert_eq!(hodge_tate_norm(&ctx(2, 1).flat(), 0).unwrap(), int(0));
}

#[test]
fn integral_formula_shifts_with_pi() {
    let p = poly(2, "2/3,1/6");
    let mu = r("1/6");
    let base = hodge_tate_norm_integral(&p, &[Some(0), None], &mu, Indexing::Lower).unwrap();
    assert_eq!(base.value, hodge_tate_norm(&p, 0).unwrap());
    let shifted = hodge_tate_norm_integral(&p, &[Some(1), None], &mu, Indexing::Lower).unwrap();
    assert_eq!(shifted.value, &base.value + int(1));
    assert!(matches!(hodge_tate_norm_integral(&p, &[Some(0), None], &int(1), Indexing::Lower), Err(Error::Domain(_))));
    assert!(hodge_tate_norm_integral(&p, &[None, None], &mu, Indexing::Lower).is_err());
}

#[test]
fn subgroup_spec_text() {
    let s: SubgroupSpec = "sub a=1,0,2".parse().unwrap();
    assert_eq!(s.0, vec![1, 0, 2]);
    assert_eq!(s.to_string(), "sub a=1,0,2");
    for bad in ["sub", "sub a=-1", "sub a=1 b=2", "grp a=1"] {
        assert!(bad.parse::<SubgroupSpec>().is_err(), "{bad}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lower_filtration_counts_points(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let q = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=2);
        let p = random::polygon(&mut rng, ctx(q, n), 8);
        let level = if q == 2 { 3 } else { 2 };
        let points = all_torsion(n, level, q);
        let mut mus: Vec<Rational> = (0..n).flat_map(|i| (1..=3).map(move |k| (i, k)))
            .map(|(i, k)| p.slope_iter(i, k).finite().cloned().unwrap()).collect();
        mus.push(rat(rng.gen_range(1..=30), rng.gen_range(1..=40)));
        for mu in mus {
            let k = lower_fil_exponents(&p, &mu).unwrap();
            let count = points.iter().filter(|x| valuation(&p, x).unwrap() >= ExtRational::Finite(mu.clone())).count();
            let e: i64 = k.iter().map(|&ki| ki.min(level as i64)).sum();
            prop_assert_eq!(count as u64, (q as u64).pow(e as u32));
        }
    }

    #[test]
    fn lower_filtration_periodicity(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = ctx(rng.gen_range(2..=4), rng.gen_range(1..=4));
        let p = random::polygon(&mut rng, c, 9);
        let lam = p.slope(p.n() - 1) * rat(rng.gen_range(1..=12), 12);
        let here = lower_fil_exponents(&p, &lam).unwrap();
        let below = lower_fil_exponents(&p, &(&lam / c.pow(c.n as i64))).unwrap();
        prop_assert_eq!(below, here.iter().map(|k| k + 1).collect::<Vec<_>>());
    }

    #[test]
    fn hodge_tate_norm_matches_enumeration(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(2..=3);
        let p = random::polygon(&mut rng, ctx(2, n), 6);
        let bound = ExtRational::Finite(p.ctx().pow(n as i64) * p.slope(n - 1));
        for i in 0..n {
            let level = (1..=12usize)
                .find(|&k| (0..n).filter(|&j| j != i).all(|j| p.slope_iter(j, k as i64) <= bound))
                .unwrap();
            prop_assume!((n - 1) * level <= 12);
            prop_assert_eq!(enumerated_kernel_norm(&p, i, level), hodge_tate_norm(&p, i).unwrap());
        }
    }

    #[test]
    fn integral_formula_constant_is_covector_independent(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(2..=3);
        let c = ctx(rng.gen_range(2..=3), n);
        let p = random::polygon(&mut rng, c, 6);
        let lower_mu = p.slope(n - 1) * rat(rng.gen_range(1..=4), 4);
        let upper_mu = p.slope(0) + int(1) + rat(rng.gen_range(0..=4), 3);
        let mut covectors: Vec<Vec<Option<i64>>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j).then_some(0)).collect())
            .collect();
        for _ in 0..4 {
            let mut phi: Vec<Option<i64>> = (0..n).map(|_| rng.gen_bool(0.8).then(|| rng.gen_range(-2..=3))).collect();
            if phi.iter().all(Option::is_none) {
                phi[0] = Some(0);
            }
            covectors.push(phi);
        }
        for indexing in [Indexing::Lower, Indexing::Upper] {
            let mu = if indexing == Indexing::Lower { &lower_mu } else { &upper_mu };
            let mut gap: Option<Rational> = None;
            for phi in &covectors {
                let direct = hodge_tate_norm_covector(&p, phi).unwrap();
                let integral = hodge_tate_norm_integral(&p, phi, mu, indexing).unwrap();
                let d = &direct - &integral.raw;
                prop_assert_eq!(&d, gap.get_or_insert(d.clone()));
                prop_assert_eq!(&integral.value, &direct);
            }
        }
        for i in 0..n {
            let phi: Vec<Option<i64>> = (0..n).map(|j| (i == j).then_some(0)).collect();
            prop_assert_eq!(hodge_tate_norm_covector(&p, &phi).unwrap(), hodge_tate_norm(&p, i).unwrap());
        }
    }

    #[test]
    fn filtration_classes_reconstruct(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = ctx(rng.gen_range(2..=3), rng.gen_range(1..=4));
        let p = random::polygon(&mut rng, c, 8);
        let f = filtration_class_sets(&p).unwrap();
        let s = ram_simplex(&p).unwrap();
        prop_assert!(s.vertices.iter().all(|v| v.in_quartier()));
        prop_assert!(f.lower.iter().all(|v| v.in_quartier()));
    }
}
