use flagtype_core::canonical::{representative, standard_pair, valid_b, RvContext, RvKind, IndexLayout, PLUS_BLOCKS};
use flagtype_core::classifier::{classify, SquareClasses, Verdict};
use flagtype_core::field::{Field, Fp};
use flagtype_core::flags::{Composition, FlagChain, FlagTuple};
use flagtype_core::geometry::{
    group_generators, is_maximal_isotropic, parabolic_generators, random_isotropic, random_word, so_generators, u_d,
};
use flagtype_core::invariants::{analyze, b_invariants, verify_relations, BInvariants, ThetaInvariants};
use flagtype_core::matrix::Matrix;
use flagtype_core::orbit::{
    census, census_fix_first, gl_parabolic_generators, linear_census, orbit, sp_prime_generators, Method, OrbitCensus,
};
use flagtype_core::witness::{separation_table, FamilyId, FeasibilityMatrix, Relation, Separation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{parse_space, Failure, VERSION};

pub const SUITES: [&str; 7] = ["prop58", "roundtrip", "rv-generators", "bruhat", "witnesses", "censuses", "cor87"];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub n: Option<usize>,
    pub q: Vec<u64>,
    pub family: Option<String>,
    pub space: Option<String>,
    pub trials: usize,
    pub budget: usize,
}

#[derive(Default, Debug)]
pub struct SuiteReport {
    pub checks: usize,
    pub failures: Vec<String>,
    pub infeasible: Vec<String>,
    pub lines: Vec<String>,
}

impl SuiteConfig {
    pub fn rank(&self) -> usize {
        self.n.unwrap_or(3)
    }
}

impl SuiteReport {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn exit_code(&self) -> u8 {
        if !self.failures.is_empty() {
            1
        } else if !self.infeasible.is_empty() {
            3
        } else {
            0
        }
    }

    pub fn status(&self) -> &'static str {
        match self.exit_code() {
            0 => "pass",
            1 => "fail",
            _ => "infeasible",
        }
    }

    pub fn to_json(&self, suite: &str, cfg: &SuiteConfig) -> Value {
        json!({
            "kind": "verify",
            "suite": suite,
            "version": VERSION,
            "config": {"n": cfg.n.unwrap_or(3), "q": cfg.q, "family": cfg.family, "space": cfg.space,
                       "trials": cfg.trials, "budget": cfg.budget},
            "status": self.status(),
            "checks": self.checks,
            "failures": self.failures,
            "infeasible": self.infeasible,
            "details": self.lines,
        })
    }
}

pub fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect::<String>()
        .trim_matches('_')
        .to_string()
}

fn fields(cfg: &SuiteConfig) -> Result<Vec<Fp>, Failure> {
    cfg.q.iter().map(|&q| Ok(Fp::new(q)?)).collect()
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport, Failure> {
    let mut r = SuiteReport::default();
    match name {
        "prop58" => prop58(cfg, &mut r)?,
        "roundtrip" => roundtrip(cfg, &mut r)?,
        "rv-generators" => rv_generators(cfg, &mut r)?,
        "bruhat" => bruhat(cfg, &mut r)?,
        "witnesses" => witnesses(cfg, &mut r)?,
        "censuses" => censuses(cfg, &mut r)?,
        "cor87" => parabolic_counts(cfg, &mut r)?,
        other => return Err(Failure::usage(format!("unknown suite {other:?}; expected one of {SUITES:?}"))),
    }
    Ok(r)
}

fn prop58(cfg: &SuiteConfig, r: &mut SuiteReport) -> Result<(), Failure> {
    let n = cfg.rank();
    for f in fields(cfg)? {
        let mut rng = ChaCha8Rng::seed_from_u64(f.p() as u64 * 1000 + n as u64);
        let gens = group_generators(n, &f);
        for _ in 0..cfg.trials {
            let up = random_isotropic(&f, n, rng.gen_range(0..=n), &mut rng);
            let um = random_isotropic(&f, n, rng.gen_range(0..=n), &mut rng);
            let v = random_isotropic(&f, n, n, &mut rng);
            let a = analyze(&up, &um, &v)?;
            let bad = verify_relations(&a.b, &a.theta);
            r.check(bad.is_empty(), || format!("q = {}: violated {bad:?}", f.p()));
            r.check(a.b.get(14) == a.b14_via_z, || format!("q = {}: b14 differs from dim pi(Z cap V)", f.p()));
            r.check(a.pairing_is_alternating(), || format!("q = {}: pairing on X not alternating", f.p()));
            let g = random_word(&gens, 20, &mut rng);
            let moved = b_invariants(&g.apply(&up)?, &g.apply(&um)?, &g.apply(&v)?)?;
            r.check(moved == a.b, || format!("q = {}: b changed under a group word", f.p()));
        }
        r.lines.push(format!("n={n} q={}: {} random triples", f.p(), cfg.trials));
    }
    Ok(())
}

fn roundtrip(cfg: &SuiteConfig, r: &mut SuiteReport) -> Result<(), Failure> {
    let n = cfg.rank();
    for f in fields(cfg)? {
        let mut count = 0;
        for t in ThetaInvariants::all(n) {
            let (up, um) = standard_pair(&f, &t);
            for b in valid_b(&t) {
                let v = representative(&f, &t, &b)?;
                r.check(is_maximal_isotropic(&v), || format!("q = {}: {b:?} not maximal isotropic", f.p()));
                let back = b_invariants(&up, &um, &v)?;
                r.check(back == b, || format!("q = {}: roundtrip failed for {b:?}", f.p()));
                count += 1;
            }
        }
        r.lines.push(format!("n={n} q={}: {count} (theta, b) pairs", f.p()));
    }
    Ok(())
}

fn rv_generators(cfg: &SuiteConfig, r: &mut SuiteReport) -> Result<(), Failure> {
    let mut b = [1usize; 15];
    b[14] = 2;
    let b = BInvariants::new(b);
    let g = |j: usize| b.get(j);
    let a0 = g(1) + g(2);
    let ap = g(3) + g(7) + g(8) + g(10);
    let am = g(4) + g(7) + g(9) + g(11);
    let a1 = g(5) + g(6) + g(8) + g(9) + 2 * g(12) + g(13) + g(15);
    let t = ThetaInvariants::new(a0 + ap + am + a1 + g(12) + g(13) + g(14), a0, ap, am, a1)?;
    for f in fields(cfg)? {
        let mut rng = ChaCha8Rng::seed_from_u64(17 + f.p() as u64);
        let ctx = RvContext::new(&f, IndexLayout::new(t, b)?);
        let mut count = 0;
        for j in 1..=14 {
            let size = ctx.layout.b.get(j);
            let a = loop {
                let rows = (0..size).map(|_| (0..size).map(|_| f.random(&mut rng)).collect()).collect();
                let m = Matrix::from_rows_with_cols(&f, rows, size)?;
                if m.rank() == size {
                    break m;
                }
            };
            let h = ctx.generator(&RvKind::H { j, a })?;
            r.check(ctx.is_member(&h), || format!("q = {}: h_{j} outside R_V", f.p()));
            count += 1;
        }
        let mut a = Matrix::identity(&f, 2);
        for _ in 0..4 {
            let v: Vec<u32> = (0..2).map(|_| f.random(&mut rng)).collect();
            a = flagtype_core::canonical::sp_prime_transvection(&f, &v, &f.random_nonzero(&mut rng)).mul(&a)?;
        }
        let h = ctx.generator(&RvKind::H15 { a })?;
        r.check(ctx.is_member(&h), || format!("q = {}: h_15 outside R_V", f.p()));
        count += 1;
        for &bi in PLUS_BLOCKS.iter() {
            for &bk in PLUS_BLOCKS.iter() {
                for &i in &ctx.layout.block(bi) {
                    for &k in &ctx.layout.block(bk) {
                        if ctx.transvection_case(i, k).is_err() {
                            continue;
                        }
                        let mu = f.random_nonzero(&mut rng);
                        let h = ctx.generator(&RvKind::G { i, k, mu })?;
                        r.check(ctx.is_member(&h), || format!("q = {}: g_({i},{k}) outside R_V", f.p()));
                        count += 1;
                    }
                }
            }
        }
        r.lines.push(format!("n={} q={}: {count} generators", ctx.layout.n(), f.p()));
    }
    Ok(())
}

fn bruhat(cfg: &SuiteConfig, r: &mut SuiteReport) -> Result<(), Failure> {
    let n = cfg.rank();
    for f in fields(cfg)? {
        let top = Composition::for_rank(vec![n], n)?;
        let p = census(n, &f, std::slice::from_ref(&top), &parabolic_generators(n, &f), "P", cfg.budget)?;
        r.check(p.orbit_count == n + 1, || format!("q = {}: {} P-orbits", f.p(), p.orbit_count));
        let so = so_generators(n, &f);
        let s = census(n, &f, std::slice::from_ref(&top), &so, "SO", cfg.budget)?;
        r.check(s.orbit_count == 2, || format!("q = {}: {} SO-orbits", f.p(), s.orbit_count));
        let single = |d: usize| -> Result<FlagTuple<Fp>, Failure> {
            Ok(FlagTuple::new(n, vec![FlagChain::single(u_d(&f, n, d)?)])?)
        };
        let o0 = orbit(&single(0)?, &so, cfg.budget)?;
        for d in 0..=n {
            let same = o0.position(&single(d)?).is_some();
            r.check(same == (d % 2 == 0), || format!("q = {}: U_{d} in the wrong SO-orbit", f.p()));
        }
        let g = census(n, &f, &[top], &group_generators(n, &f), "G", cfg.budget)?;
        r.check(g.orbit_count == 1, || format!("q = {}: {} G-orbits", f.p(), g.orbit_count));
        r.lines.push(format!("n={n} q={}: P {} SO {} G {}", f.p(), p.orbit_count, s.orbit_count, g.orbit_count));
    }
    Ok(())
}

fn related(rel: Relation, f: &Fp, l: u32, m: u32) -> bool {
    match rel {
        Relation::Equality => l == m,
        Relation::OneMinus => l == m || (l + m) % f.p() == 1,
        Relation::SquareClass => f.is_square(f.div(&l, &m).unwrap_or(0)),
    }
}

fn witnesses(cfg: &SuiteConfig, r: &mut SuiteReport) -> Result<(), Failure> {
    let ids = match &cfg.family {
        Some(s) => vec![FamilyId::parse(s)?],
        None => FamilyId::all(),
    };
    let fm = FeasibilityMatrix::default();
    for f in fields(cfg)? {
        for &id in &ids {
            let n = cfg.n.unwrap_or(id.n_min()).max(id.n_min());
            let rows = separation_table(id, n, &f, &fm, cfg.budget)?;
            let (mut same, mut distinct) = (0, 0);
            for row in &rows {
                let expect_same = related(id.relation(), &f, row.lambda, row.mu);
                match &row.verdict {
                    Separation::Infeasible(why) => {
                        r.infeasible.push(format!("{id} n={n} q={}: {why}", f.p()));
                        break;
                    }
                    Separation::SameOrbit(_) => same += 1,
                    Separation::DistinctOrbits => distinct += 1,
                }
                // the relation is sufficient; square-class and one-minus collisions beyond it are reported, not failed
                if expect_same {
                    r.check(row.verdict.label() == "same", || {
                        format!("{id} n={n} q={}: {} and {} should share an orbit", f.p(), row.lambda, row.mu)
                    });
                } else if id.relation() == Relation::Equality {
                    r.check(row.verdict.label() == "distinct", || {
                        format!("{id} n={n} q={}: {} and {} share an orbit", f.p(), row.lambda, row.mu)
                    });
                }
            }
            r.lines.push(format!("{id} n={n} q={}: {} pairs, {same} same, {distinct} distinct", f.p(), rows.len()));
        }
    }
    Ok(())
}

fn censuses(cfg: &SuiteConfig, r: &mut SuiteReport) -> Result<(), Failure> {
    let n = cfg.rank();
    let spaces: Vec<String> = match &cfg.space {
        Some(s) => vec![s.clone()],
        None => ["(1)|(1)|(n)", "(n)|(n)|(n)", "(1)|(n)|(1,n-1)"]
            .iter()
            .filter(|s| n > 1 || !s.contains("n-1"))
            .map(|s| s.to_string())
            .collect(),
    };
    for space in spaces {
        let comps = parse_space(&space, n)?;
        let verdict = classify(n, &comps, SquareClasses::Finite)?;
        let mut counts = Vec::new();
        for f in fields(cfg)? {
            let c = census_fix_first(n, &f, &comps, &group_generators(n, &f), Method::UnionFind, cfg.budget)?;
            counts.push(c.orbit_count);
        }
        let desc = comps.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|");
        if counts.len() > 1 {
            match verdict.verdict {
                Verdict::Finite => r.check(counts.windows(2).all(|w| w[0] == w[1]), || {
                    format!("{desc}: Finite but counts {counts:?}")
                }),
                Verdict::Infinite => r.check(counts.windows(2).all(|w| w[1] > w[0]), || {
                    format!("{desc}: Infinite but counts {counts:?}")
                }),
                _ => {}
            }
        }
        r.lines.push(format!("n={n} {desc}: {verdict} counts {counts:?}"));
    }
    Ok(())
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Block parabolics of GL_m on full flags have m!/(α₁!⋯α_p!) orbits; Sp′₄ on full flags of F⁴ is q-stable.
fn parabolic_counts(cfg: &SuiteConfig, r: &mut SuiteReport) -> Result<(), Failure> {
    let blocks: [&[usize]; 5] = [&[2, 1], &[1, 1, 1], &[3], &[2, 2], &[1, 2, 1]];
    let mut sp_counts = Vec::new();
    for f in fields(cfg)? {
        for alpha in blocks {
            let m: usize = alpha.iter().sum();
            let full = Composition::new(vec![1; m])?;
            let label = format!("P{alpha:?}");
            let c = linear_census(m, &f, &[full], &gl_parabolic_generators(&f, alpha), &label, cfg.budget)?;
            let expected = factorial(m) / alpha.iter().map(|&a| factorial(a)).product::<usize>();
            r.check(c.orbit_count == expected, || format!("q = {}: {label} has {} orbits, expected {expected}", f.p(), c.orbit_count));
            r.lines.push(format!("q={} GL{m} {label}: {} orbits on {} flags", f.p(), c.orbit_count, c.total));
        }
        let full = Composition::new(vec![1; 4])?;
        let c = linear_census(4, &f, &[full], &sp_prime_generators(&f, 2), "Sp'4", cfg.budget)?;
        r.lines.push(format!("q={} Sp'4: {} orbits on {} flags", f.p(), c.orbit_count, c.total));
        sp_counts.push(c.orbit_count);
    }
    r.check(sp_counts.windows(2).all(|w| w[0] == w[1]), || format!("Sp'4 counts vary with q: {sp_counts:?}"));
    Ok(())
}

/// JSON record written by `census --json/--store`.
pub fn census_record(
    n: usize,
    space: &str,
    comps: &[Composition],
    results: &[OrbitCensus],
    budget: usize,
) -> Result<Value, Failure> {
    let verdict = classify(n, comps, SquareClasses::Unknown)?.to_string();
    Ok(json!({
        "kind": "census",
        "version": VERSION,
        "config": {"n": n, "space": space, "budget": budget},
        "verdict": verdict,
        "results": results.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
    }))
}
