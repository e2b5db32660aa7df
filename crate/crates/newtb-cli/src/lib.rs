//! Command execution for the `newtb` binary: one verb plus `key=value`
//! options in, text out. Shared by the argv front end and `batch`.

use std::collections::BTreeMap;
use std::io::BufRead;

use clap::ValueEnum;
use newtb::building::{ApartmentPoint, ApartmentVertex};
use newtb::hecke::{apply, vertex_polygon};
use newtb::iwahori::{delta_decomposition, delta_to_apartment, newton_of_delta};
use newtb::newton::{Context, NewtonPolygon};
use newtb::polyhedron::Halfspaces;
use newtb::rational::{join_list, parse_i64, parse_rational, parse_rational_list, Rational};
use newtb::skeleton::{canonical_subgroup_exists, fundamental_domain_check, gh_polytope, hecke_orbit, psi, psi_inv};
use newtb::torsion::{filtration_class_sets, lower_fil_exponents, ram_simplex, upper_fil_exponents, Saut};
use newtb::ultrametric::{ball_components, component_of_zero, UltrametricRoots};
use newtb::{selftest, svg, Error, Result};

/// The verbs understood by the front end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Newt,
    Lambda,
    Fil,
    Simplex,
    Hecke,
    Vertexpoly,
    Psi,
    Psiinv,
    Canonical,
    Orbit,
    Gh,
    DomainCheck,
    Delta,
    Balls,
    SvgDecomposition,
    Selftest,
    Batch,
}

/// Text produced by a command. `failure` is set when the command ran to the
/// end but found a violated check (selftest), so the text is still worth printing.
#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    pub failure: Option<Error>,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, failure: None }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parsed `key=value` options with the set of keys a verb accepts.
struct Opts {
    map: BTreeMap<String, String>,
}

impl Opts {
    fn parse(args: &[String], allowed: &[&str]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for a in args {
            let (k, v) = a.split_once('=').ok_or_else(|| usage(format!("expected key=value, got `{a}`")))?;
            if !allowed.contains(&k) {
                return Err(usage(format!("unknown option `{k}`; expected one of {}", allowed.join(", "))));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(usage(format!("option `{k}` given twice")));
            }
        }
        Ok(Opts { map })
    }

    fn get(&self, k: &str) -> Option<&str> {
        self.map.get(k).map(String::as_str)
    }

    fn need(&self, k: &str) -> Result<&str> {
        self.get(k).ok_or_else(|| usage(format!("missing option `{k}=`")))
    }

    fn int_or(&self, k: &str, default: i64, range: std::ops::RangeInclusive<i64>) -> Result<i64> {
        let v = match self.get(k) {
            Some(s) => parse_i64(s)?,
            None => default,
        };
        if !range.contains(&v) {
            return Err(usage(format!("`{k}` must lie in {}..={}", range.start(), range.end())));
        }
        Ok(v)
    }

    fn rational(&self, k: &str) -> Result<Rational> {
        parse_rational(self.need(k)?)
    }

    fn ctx(&self) -> Result<Context> {
        let q = self.int_or("q", 2, 2..=1 << 16)?;
        let n = parse_i64(self.need("n")?)?;
        if !(1..=64).contains(&n) {
            return Err(usage("`n` must lie in 1..=64"));
        }
        Context::new(q as u32, n as usize)
    }

    /// `P=` as a full `newt ...` line, or a bare slope list read with `q=`/`n=`.
    fn polygon(&self) -> Result<NewtonPolygon> {
        let s = self.need("P")?;
        if s.trim_start().starts_with("newt") {
            let p: NewtonPolygon = s.parse()?;
            if self.get("n").is_some() && self.ctx()? != p.ctx() {
                return Err(usage("q/n disagree with the polygon given in P="));
            }
            Ok(p)
        } else {
            NewtonPolygon::parse_in(self.ctx()?, s)
        }
    }
}

const POLY_KEYS: [&str; 3] = ["P", "q", "n"];

fn keys(extra: &[&'static str]) -> Vec<&'static str> {
    POLY_KEYS.iter().copied().chain(extra.iter().copied()).collect()
}

fn one_based(xs: &[usize]) -> String {
    join_list(&xs.iter().map(|x| x + 1).collect::<Vec<_>>(), ",")
}

fn saut_rows(out: &mut String, kind: &str, sauts: &[Saut]) {
    for s in sauts {
        out.push_str(&format!("{kind}\t{}\t{}\t{}\n", s.mu, join_list(&s.exponents, ","), s.class));
    }
}

/// Runs one verb. `batch` is handled by [`run_batch`] and rejected here.
pub fn execute(verb: Verb, args: &[String]) -> Result<Report> {
    let text = match verb {
        Verb::Newt => {
            let o = Opts::parse(args, &keys(&["slopes", "v"]))?;
            let p = match (o.get("P"), o.get("slopes"), o.get("v")) {
                (Some(_), None, None) => o.polygon()?,
                (None, Some(s), None) => NewtonPolygon::from_slopes(o.ctx()?, parse_rational_list(s)?)?,
                (None, None, Some(v)) => NewtonPolygon::from_coordinates(o.ctx()?, &parse_rational_list(v)?)?,
                _ => return Err(usage("give exactly one of P=, slopes=, v=")),
            };
            format!("{p}\n{}\n", p.eta())
        }
        Verb::Lambda => {
            let o = Opts::parse(args, &keys(&["i", "lambda", "k"]))?;
            let p = o.polygon()?;
            let start = match (o.get("i"), o.get("lambda")) {
                (Some(_), None) => {
                    let i = o.int_or("i", 1, 1..=p.n() as i64)?;
                    p.slope(i as usize - 1).clone()
                }
                (None, Some(_)) => o.rational("lambda")?,
                _ => return Err(usage("give exactly one of i=, lambda=")),
            };
            if start <= Rational::from_integer(0.into()) {
                return Err(usage("lambda must be positive"));
            }
            let k = o.int_or("k", 4, 1..=256)?;
            let mut out = String::from("#schema: k\tlambda_k\n");
            for j in 1..=k {
                out.push_str(&format!("{j}\t{}\n", p.lambda_iter(&start, j)));
            }
            out
        }
        Verb::Fil => {
            let o = Opts::parse(args, &keys(&["mu"]))?;
            let p = o.polygon()?;
            if o.get("mu").is_some() {
                let mu = o.rational("mu")?;
                let lower = lower_fil_exponents(&p, &mu)?;
                let upper = upper_fil_exponents(&p, &mu)?;
                let mut out = String::from("#schema: i\tlower_k\tupper_l\n");
                for i in 0..p.n() {
                    out.push_str(&format!("{}\t{}\t{}\n", i + 1, lower[i], upper[i]));
                }
                out
            } else {
                let f = filtration_class_sets(&p)?;
                let mut out = String::from("#schema: kind\tmu\texponents\tclass\n");
                saut_rows(&mut out, "lower", &f.lower_sauts);
                saut_rows(&mut out, "upper", &f.upper_sauts);
                out
            }
        }
        Verb::Simplex => {
            let o = Opts::parse(args, &keys(&[]))?;
            let s = ram_simplex(&o.polygon()?)?;
            let mut out = format!("{}\n#schema: kind\tmu\texponents\tclass\n", s.chamber);
            saut_rows(&mut out, "lower", &s.sauts);
            out
        }
        Verb::Hecke => {
            let o = Opts::parse(args, &keys(&["a"]))?;
            let p = o.polygon()?;
            let a = newtb::rational::parse_i64_list(o.need("a")?)?;
            let img = apply(&p, &a)?;
            format!("{} sigma={}\n", img.polygon, one_based(&img.sigma))
        }
        Verb::Vertexpoly => {
            let o = Opts::parse(args, &["q", "n", "vtx"])?;
            let x: ApartmentVertex = o.need("vtx")?.parse()?;
            format!("{}\n", vertex_polygon(o.ctx()?, &x)?)
        }
        Verb::Psi => {
            let o = Opts::parse(args, &keys(&[]))?;
            format!("{}\n", psi(&o.polygon()?)?)
        }
        Verb::Psiinv => {
            let o = Opts::parse(args, &["q", "n", "x"])?;
            let x: ApartmentPoint = o.need("x")?.parse()?;
            format!("{}\n", psi_inv(o.ctx()?, &x)?)
        }
        Verb::Canonical => {
            let o = Opts::parse(args, &keys(&["r", "k"]))?;
            let p = o.polygon()?;
            if p.n() < 2 {
                return Err(usage("canonical subgroups need n ≥ 2"));
            }
            let r = o.int_or("r", 1, 1..=p.n() as i64 - 1)?;
            let k = o.int_or("k", 1, 1..=1 << 16)?;
            let exists = canonical_subgroup_exists(&p, r as usize - 1, k)?;
            format!("canonical r={r} k={k} exists={exists}\n")
        }
        Verb::Orbit => {
            let o = Opts::parse(args, &["vtx", "bound"])?;
            let x: ApartmentVertex = o.need("vtx")?.parse()?;
            if x.n() > 6 {
                return Err(usage("orbit enumeration is limited to n ≤ 6"));
            }
            let bound = o.int_or("bound", 1, 0..=16)?;
            let mut out = String::from("#schema: vertex\n");
            for v in hecke_orbit(&x, bound)? {
                out.push_str(&format!("{v}\n"));
            }
            out
        }
        Verb::Gh => {
            let o = Opts::parse(args, &["q", "n"])?;
            let ctx = o.ctx()?;
            if ctx.n > 10 {
                return Err(usage("the Gross–Hopkins table is limited to n ≤ 10"));
            }
            let mut out = String::from("#schema: subset\tpolygon\tcoefficients\n");
            for g in gh_polytope(ctx)? {
                out.push_str(&format!(
                    "{{{}}}\t{}\t{}\n",
                    join_list(&g.subset, ","),
                    g.polygon,
                    join_list(&g.coefficients, ",")
                ));
            }
            out
        }
        Verb::DomainCheck => {
            let o = Opts::parse(args, &["n", "region"])?;
            let n = o.int_or("n", 2, 1..=8)? as usize;
            let d: Halfspaces = o.need("region")?.parse()?;
            let c = fundamental_domain_check(&d, n)?;
            let mut out = format!("covers={}\n#schema: rotation\tnonempty\tface\n", c.covers);
            for (r, (face, nonempty)) in c.boundaries.iter().enumerate() {
                out.push_str(&format!("{r}\t{nonempty}\t{face}\n"));
            }
            out
        }
        Verb::Delta => {
            let o = Opts::parse(args, &["q", "n", "v"])?;
            let ctx = o.ctx()?;
            let v = parse_rational_list(o.need("v")?)?;
            let p = newton_of_delta(ctx, &v)?;
            let (sigma, w) = delta_decomposition(ctx, &v)?;
            let x = delta_to_apartment(ctx, &v)?;
            format!("{p}\n{x}\npiece sigma={} w={}\n", one_based(&sigma), join_list(&w, ","))
        }
        Verb::Balls => {
            let o = Opts::parse(args, &["roots", "eps"])?;
            let roots: UltrametricRoots = o.need("roots")?.parse()?;
            let eps = o.rational("eps")?;
            let comps = ball_components(&roots, &eps)?;
            let mut out = String::new();
            if roots.zero_root().is_some() {
                out.push_str(&format!("zero radius={}\n", component_of_zero(&roots, &eps)?));
            }
            out.push_str("#schema: members\tradius\n");
            for c in comps {
                out.push_str(&format!("{}\t{}\n", one_based(&c.members), c.radius));
            }
            out
        }
        Verb::SvgDecomposition => {
            let o = Opts::parse(args, &["q", "n", "vmax", "res"])?;
            let q = o.int_or("q", 2, 2..=256)? as u32;
            let n = o.int_or("n", 3, 1..=64)? as usize;
            let vmax = match o.get("vmax") {
                Some(s) => parse_rational(s)?,
                None => Rational::from_integer(1.into()),
            };
            let res = o.int_or("res", 16, 1..=128)? as usize;
            svg::decomposition(q, n, &vmax, res)?.document
        }
        Verb::Selftest => {
            let o = Opts::parse(args, &["seed", "count"])?;
            let seed = o.int_or("seed", 1, 0..=i64::MAX)? as u64;
            let count = o.int_or("count", 20, 1..=10_000)? as usize;
            let mut out = String::from("#schema: check\tcases\tstatus\n");
            let mut failure = None;
            for r in selftest::run(seed, count) {
                let status = match &r.outcome {
                    Ok(()) => "pass".to_string(),
                    Err(e) => format!("FAIL {e}"),
                };
                out.push_str(&format!("{}\t{}\t{status}\n", r.name, r.cases));
                if let (Err(e), None) = (r.outcome, &failure) {
                    failure = Some(e);
                }
            }
            return Ok(Report { text: out, failure });
        }
        Verb::Batch => return Err(usage("`batch` reads commands from standard input and cannot be nested")),
    };
    Ok(Report::ok(text))
}

/// Parses one batch line (shell-style quoting) and runs it.
pub fn execute_line(line: &str) -> Result<Report> {
    let words = shlex::split(line).ok_or_else(|| usage("unbalanced quotes"))?;
    let (verb, args) = words.split_first().ok_or_else(|| usage("empty command"))?;
    let verb = Verb::from_str(verb, false).map_err(|_| usage(format!("unknown verb `{verb}`")))?;
    execute(verb, args)
}

/// Runs every non-blank, non-`#` line of `input` on up to `threads` workers
/// and returns the outputs in input order with the worst exit code.
pub fn run_batch(input: impl BufRead, threads: usize) -> std::io::Result<(String, i32)> {
    let lines: Vec<(usize, String)> = input
        .lines()
        .enumerate()
        .filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() || l.trim_start().starts_with('#') => None,
            other => Some(other.map(|l| (i + 1, l))),
        })
        .collect::<std::io::Result<_>>()?;
    let threads = threads.clamp(1, 64);
    let mut results: Vec<Option<(String, i32)>> = vec![None; lines.len()];
    let chunk = lines.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        for (slots, work) in results.chunks_mut(chunk).zip(lines.chunks(chunk)) {
            s.spawn(move || {
                for (slot, (no, line)) in slots.iter_mut().zip(work) {
                    *slot = Some(render(*no, execute_line(line)));
                }
            });
        }
    });
    let mut out = String::new();
    let mut code = 0;
    for (text, c) in results.into_iter().flatten() {
        out.push_str(&text);
        code = code.max(c);
    }
    Ok((out, code))
}

fn render(line: usize, r: Result<Report>) -> (String, i32) {
    match r {
        Ok(Report { text, failure: None }) => (text, 0),
        Ok(Report { text, failure: Some(e) }) => (format!("{text}error line={line} {e}\n"), e.exit_code()),
        Err(e) => (format!("error line={line} {e}\n"), e.exit_code()),
    }
}
