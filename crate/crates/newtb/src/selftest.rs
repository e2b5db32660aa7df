//! A compact, seeded run of the property checks, for the `selftest` verb.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::building::ApartmentVertex;
use crate::error::{invariant, Result};
use crate::hecke::{apply, chamber_of, in_chamber, vertex_polygon};
use crate::iwahori::{delta_to_apartment, newton_of_delta, slope_formula};
use crate::newton::Context;
use crate::plconvex::{legendre_dual, legendre_dual_concave};
use crate::random;
use crate::rational::{int, rat};
use crate::skeleton::{canonical_subgroup_exists, gh_polytope, hodge_tate_point, psi, psi_inv};
use crate::torsion::filtration_class_sets;
use crate::ultrametric::component_of_zero;

/// Outcome of one named check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub outcome: Result<()>,
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invariant(msg))
    }
}

fn contexts<R: Rng>(rng: &mut R, max_n: usize) -> Context {
    Context::new(rng.gen_range(2..=3), rng.gen_range(2..=max_n)).expect("small context")
}

fn vertex_examples() -> Result<usize> {
    let mut cases = 0;
    for q in [2u32, 3] {
        for n in 2..=4usize {
            let ctx = Context::new(q, n)?;
            let qn1 = ctx.pow(n as i64) - int(1);
            for i in 1..n {
                let p = vertex_polygon(ctx, &ApartmentVertex::omega(n, i))?;
                for (j, s) in p.slopes().iter().enumerate() {
                    let expected =
                        if j < i { ctx.pow((n - i) as i64) / &qn1 } else { (ctx.pow(i as i64) * &qn1).recip() };
                    ensure(s == &expected, format!("vertex polygon of ω_{i} at q={q} n={n}"))?;
                }
                cases += 1;
            }
            ensure(vertex_polygon(ctx, &ApartmentVertex::origin(n))? == ctx.flat(), "origin is flat")?;
        }
    }
    Ok(cases)
}

fn skeleton_roundtrip(rng: &mut StdRng, count: usize) -> Result<usize> {
    for _ in 0..count {
        let ctx = contexts(rng, 4);
        let p = random::polygon(rng, ctx, 9);
        ensure(psi_inv(ctx, &psi(&p)?)? == p, format!("ψ⁻¹∘ψ at {p}"))?;
        let x = random::quartier_point(rng, ctx.n, 3, 4);
        ensure(psi(&psi_inv(ctx, &x)?)? == x, format!("ψ∘ψ⁻¹ at {x}"))?;
    }
    Ok(count)
}

fn hecke_equivariance(rng: &mut StdRng, count: usize) -> Result<usize> {
    for _ in 0..count {
        let ctx = contexts(rng, 3);
        let p = random::polygon(rng, ctx, 9);
        let a: Vec<i64> = (0..ctx.n).map(|_| rng.gen_range(0..=3)).collect();
        let lhs = psi(&apply(&p, &a)?.polygon)?;
        let rhs = psi(&p)?.translate(&a)?.pr_q();
        ensure(lhs == rhs, format!("ψ is not Hecke-equivariant at {p}"))?;
    }
    Ok(count)
}

fn chambers_and_filtrations(rng: &mut StdRng, count: usize) -> Result<usize> {
    for _ in 0..count {
        let ctx = contexts(rng, 4);
        let p = random::polygon(rng, ctx, 9);
        let (s, _) = chamber_of(&p)?;
        ensure(in_chamber(&p, &s), "polygon outside its own chamber")?;
        filtration_class_sets(&p)?;
        hodge_tate_point(&p)?;
        for r in 0..ctx.n - 1 {
            for k in 1..=4 {
                canonical_subgroup_exists(&p, r, k)?;
            }
        }
    }
    Ok(count)
}

fn gross_hopkins() -> Result<usize> {
    let mut cases = 0;
    for n in 2..=4 {
        cases += gh_polytope(Context::new(2, n)?)?.len();
    }
    Ok(cases)
}

fn iwahori(rng: &mut StdRng, count: usize) -> Result<usize> {
    for _ in 0..count {
        let ctx = contexts(rng, 4);
        let w = random::q_delta_point(rng, ctx, 9);
        ensure(slope_formula(ctx, &w)? == newton_of_delta(ctx, &w)?, "slope formula on Q(Δ)")?;
        let v = random::delta_point(rng, ctx.n, 9);
        ensure(delta_to_apartment(ctx, &v)?.pr_q() == psi(&newton_of_delta(ctx, &v)?)?, "Iwahori square")?;
    }
    Ok(count)
}

fn duality(rng: &mut StdRng, count: usize) -> Result<usize> {
    for _ in 0..count {
        let bounded = rng.gen_bool(0.5);
        let f = random::convex_plfun(rng, bounded);
        let window = (!bounded).then(|| (f.lo().clone(), None));
        ensure(legendre_dual_concave(&legendre_dual(&f)?, window)? == f, format!("Legendre involution at {f}"))?;
    }
    Ok(count)
}

fn balls(rng: &mut StdRng, count: usize) -> Result<usize> {
    for _ in 0..count {
        let m = rng.gen_range(1..=8);
        let roots = random::ultrametric_roots(rng, m);
        let eps = rat(rng.gen_range(0..=40), rng.gen_range(1..=4));
        component_of_zero(&roots, &eps)?;
    }
    Ok(count)
}

/// Runs every check with the given seed and case count per randomized check.
pub fn run(seed: u64, count: usize) -> Vec<CheckResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut record = |name: &'static str, r: Result<usize>| {
        let (cases, outcome) = match r {
            Ok(c) => (c, Ok(())),
            Err(e) => (0, Err(e)),
        };
        out.push(CheckResult { name, cases, outcome });
    };
    record("vertex-polygons", vertex_examples());
    record("skeleton-roundtrip", skeleton_roundtrip(&mut rng, count));
    record("hecke-equivariance", hecke_equivariance(&mut rng, count));
    record("chambers-filtrations", chambers_and_filtrations(&mut rng, count));
    record("gross-hopkins", gross_hopkins());
    record("iwahori", iwahori(&mut rng, count));
    record("legendre-duality", duality(&mut rng, count));
    record("ball-components", balls(&mut rng, count));
    out
}
