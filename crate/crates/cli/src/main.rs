mod report;
mod suites;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flagtype_core::canonical::{normalize_pair, representative, standard_pair};
use flagtype_core::classifier::{classify, SquareClasses};
use flagtype_core::error::Error;
use flagtype_core::field::Fp;
use flagtype_core::flags::{parse_tuple, Composition};
use flagtype_core::geometry::{group_generators, parabolic_generators, random_isotropic, so_generators};
use flagtype_core::invariants::{analyze, theta, BInvariants, ThetaInvariants};
use flagtype_core::orbit::{budget_from_env, census, census_fix_first, Method, OrbitCensus};
use flagtype_core::subspace::Subspace;
use flagtype_core::witness::{equivariance_check, separation_check, separation_table, FamilyId, FeasibilityMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "flagtype", version, about = "Orbits of split orthogonal groups on multiple flag varieties")]
struct Cli {
    /// Stored-tuple budget for orbit searches (default: FLAGTYPE_BUDGET or 5e7).
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Worker count; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide finiteness of a triple (or any tuple) of flag types.
    Classify {
        #[arg(long)]
        n: Option<usize>,
        /// "(a1,a2)|(b1)|(c1,c2,c3)"; the letter n stands for the rank.
        #[arg(long)]
        triple: Option<String>,
        #[arg(long, default_value = "unknown")]
        square_classes: String,
        /// CSV with columns n,triple[,square_classes].
        #[arg(long)]
        batch: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// θ and b invariants of (U+, U-, V); rows as "1,0,0,0;0,1,0,0".
    Invariants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        up: Option<String>,
        #[arg(long)]
        um: Option<String>,
        #[arg(long)]
        v: Option<String>,
        /// Use a random triple drawn from this seed instead.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The representative V(b) for given θ and b.
    Canonical {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// "a0,a+,a-,a1".
        #[arg(long)]
        theta: String,
        /// Fifteen comma-separated integers.
        #[arg(long)]
        b: String,
    },
    /// An element moving (U+, U-) to the standard pair.
    Normalize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        up: String,
        #[arg(long)]
        um: String,
    },
    /// Build, certify or separate witness pencils.
    Witness {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        lambda: Option<u32>,
        #[arg(long)]
        mu: Option<u32>,
        /// Produce the equivariance certificate with this scalar.
        #[arg(long)]
        certificate: Option<u32>,
    },
    /// Exact orbit census of a product of flag varieties.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        q: Vec<u64>,
        #[arg(long)]
        space: String,
        /// g (full group), so, or p (Siegel parabolic).
        #[arg(long, default_value = "g")]
        group: String,
        /// Fix the first factor (full group only).
        #[arg(long)]
        fix_first: bool,
        #[arg(long, default_value = "union-find")]
        method: String,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        /// Rank; defaults to 3, or to a family's smallest rank for the witnesses suite.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "3,5")]
        q: Vec<u64>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        space: Option<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Aggregate stored census and verification JSON into a scoreboard.
    Report {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: String,
    },
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::BadComposition(_)
            | Error::BadInvariants(_)
            | Error::BadModulus(_)
            | Error::Domain(_)
            | Error::OutOfRange(_)
            | Error::RowLength { .. }
            | Error::AmbientMismatch(..)
            | Error::NotIsotropic
            | Error::NotMaximalIsotropic => 2,
            Error::Budget { .. } => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

pub type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let budget = cli.budget.unwrap_or_else(budget_from_env);
    match run(cli.command, budget) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn field(q: u64) -> Result<Fp, Failure> {
    Ok(Fp::new(q)?)
}

/// Replaces the letter n (optionally "n-k") by the rank inside a composition string.
pub fn substitute_rank(s: &str, n: usize) -> Result<String, Failure> {
    let mut out = String::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == 'n' {
            let mut j = i + 1;
            let mut value = n as i64;
            if j < chars.len() && chars[j] == '-' {
                let start = j + 1;
                j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let k: i64 = chars[start..j]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Failure::usage(format!("bad rank expression in {s:?}")))?;
                value -= k;
            }
            if value <= 0 {
                return Err(Failure::usage(format!("{s:?} has a non-positive part at n = {n}")));
            }
            out.push_str(&value.to_string());
            i = j;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    Ok(out)
}

pub fn parse_space(s: &str, n: usize) -> Result<Vec<Composition>, Failure> {
    let comps = parse_tuple(&substitute_rank(s, n)?)?;
    for c in &comps {
        if c.total() > n {
            return Err(Failure::usage(format!("{c} does not fit in rank {n}")));
        }
    }
    Ok(comps)
}

fn parse_rows(s: &str, n: usize, q: u64) -> Result<Subspace<Fp>, Failure> {
    let f = field(q)?;
    let rows: Vec<Vec<i64>> = s
        .split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| {
            r.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| Failure::usage(format!("bad entry {x:?}"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Ok(Subspace::zero(&f, 2 * n));
    }
    Ok(Subspace::from_i64(&f, 2 * n, &rows)?)
}

fn parse_list(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Failure::usage(format!("bad integer {x:?}"))))
        .collect()
}

/// Prints a line, exiting quietly when stdout is closed (e.g. piped into `head`).
#[macro_export]
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("json"));
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, serde_json::to_string_pretty(v).expect("json"))?;
    Ok(())
}

fn run(cmd: Command, budget: usize) -> CmdResult {
    match cmd {
        Command::Classify { n, triple, square_classes, batch, json } => {
            let sq = SquareClasses::parse(&square_classes)?;
            let mut jobs: Vec<(usize, String, SquareClasses)> = Vec::new();
            if let Some(path) = batch {
                let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_path(&path)
                    .map_err(|e| Failure::usage(e.to_string()))?;
                for rec in rdr.records() {
                    let rec = rec.map_err(|e| Failure::usage(e.to_string()))?;
                    if rec.get(0).map_or(true, |c| c.trim() == "n" || c.trim().is_empty()) {
                        continue;
                    }
                    let rn = rec[0].trim().parse().map_err(|_| Failure::usage(format!("bad n {:?}", &rec[0])))?;
                    let rsq = match rec.get(2) {
                        Some(s) if !s.trim().is_empty() => SquareClasses::parse(s)?,
                        _ => sq,
                    };
                    jobs.push((rn, rec.get(1).unwrap_or("").to_string(), rsq));
                }
            } else {
                let n = n.ok_or_else(|| Failure::usage("--n is required"))?;
                let t = triple.ok_or_else(|| Failure::usage("--triple is required"))?;
                jobs.push((n, t, sq));
            }
            for (n, t, sq) in jobs {
                let comps = parse_space(&t, n)?;
                let r = classify(n, &comps, sq)?;
                if json {
                    print_json(&r.to_json());
                } else {
                    out!("{r}");
                    for s in &r.trace {
                        let perm = s.permutation.map(|p| format!(" perm={p:?}")).unwrap_or_default();
                        let note = s.note.as_ref().map(|x| format!(" ({x})")).unwrap_or_default();
                        out!("  {}{perm}: {}{note}", s.rule, s.citation);
                    }
                }
            }
            Ok(0)
        }
        Command::Invariants { n, q, up, um, v, seed } => {
            let f = field(q)?;
            let (up, um, v) = match seed {
                Some(s) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    use rand::Rng;
                    let a = rng.gen_range(0..=n);
                    let b = rng.gen_range(0..=n);
                    (
                        random_isotropic(&f, n, a, &mut rng),
                        random_isotropic(&f, n, b, &mut rng),
                        random_isotropic(&f, n, n, &mut rng),
                    )
                }
                None => (
                    parse_rows(up.as_deref().unwrap_or(""), n, q)?,
                    parse_rows(um.as_deref().unwrap_or(""), n, q)?,
                    parse_rows(v.as_deref().ok_or_else(|| Failure::usage("--v is required"))?, n, q)?,
                ),
            };
            let r = analyze(&up, &um, &v)?;
            let bad = flagtype_core::invariants::verify_relations(&r.b, &r.theta);
            print_json(&json!({
                "up": up.to_json(), "um": um.to_json(), "v": v.to_json(),
                "theta": r.theta.to_json(),
                "b": r.b.b.to_vec(),
                "violated_relations": bad,
            }));
            Ok(if bad.is_empty() { 0 } else { 1 })
        }
        Command::Canonical { n, q, theta: th, b } => {
            let f = field(q)?;
            let t = parse_list(&th)?;
            if t.len() != 4 {
                return Err(Failure::usage("--theta needs a0,a+,a-,a1"));
            }
            let t = ThetaInvariants::new(n, t[0], t[1], t[2], t[3])?;
            let bv = parse_list(&b)?;
            let arr: [usize; 15] = bv.try_into().map_err(|_| Failure::usage("--b needs 15 integers"))?;
            let b = BInvariants::new(arr);
            let v = representative(&f, &t, &b)?;
            let (up, um) = standard_pair(&f, &t);
            let back = flagtype_core::invariants::b_invariants(&up, &um, &v)?;
            print_json(&json!({"theta": t.to_json(), "b": b.b.to_vec(), "up": up.to_json(), "um": um.to_json(),
                "v": v.to_json(), "roundtrip": back == b}));
            Ok(if back == b { 0 } else { 1 })
        }
        Command::Normalize { n, q, up, um } => {
            let up = parse_rows(&up, n, q)?;
            let um = parse_rows(&um, n, q)?;
            let g = normalize_pair(&up, &um)?;
            let t = theta(&up, &um)?;
            let (sp, sm) = standard_pair(up.field(), &t);
            let ok = g.apply(&up)? == sp && g.apply(&um)? == sm;
            print_json(&json!({"theta": t.to_json(), "element": g.to_json(), "standard_up": sp.to_json(),
                "standard_um": sm.to_json(), "verified": ok}));
            Ok(if ok { 0 } else { 1 })
        }
        Command::Witness { family, n, q, lambda, mu, certificate } => {
            let id = FamilyId::parse(&family)?;
            let n = n.unwrap_or(id.n_min());
            let f = field(q)?;
            let fm = FeasibilityMatrix::default();
            match (lambda, mu, certificate) {
                (Some(l), _, Some(c)) => {
                    let cert = equivariance_check(id, n, l, c, &f, &fm, budget)?;
                    print_json(&cert.to_json());
                    Ok(0)
                }
                (Some(l), Some(m), None) => {
                    let s = separation_check(id, n, l, m, &f, &fm, budget)?;
                    let row = flagtype_core::witness::SeparationRow { lambda: l, mu: m, verdict: s };
                    print_json(&row.to_json());
                    Ok(if row.verdict.label() == "infeasible" { 3 } else { 0 })
                }
                (Some(l), None, None) => {
                    print_json(&id.build(n, &l, &f)?.to_json());
                    Ok(0)
                }
                _ => {
                    let rows = separation_table(id, n, &f, &fm, budget)?;
                    let infeasible = rows.iter().any(|r| r.verdict.label() == "infeasible");
                    print_json(&json!({
                        "family": id.to_string(), "n": n, "q": q, "relation": id.relation().to_string(),
                        "compositions": id.compositions(n)?.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "domain": id.domain(n, &f),
                        "pairs": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                    }));
                    Ok(if infeasible { 3 } else { 0 })
                }
            }
        }
        Command::Census { n, q, space, group, fix_first, method, json, store } => {
            let comps = parse_space(&space, n)?;
            let method = match method.as_str() {
                "union-find" | "uf" => Method::UnionFind,
                "bfs" => Method::Bfs,
                other => return Err(Failure::usage(format!("unknown method {other:?}"))),
            };
            let mut results: Vec<OrbitCensus> = Vec::new();
            out!("{}", OrbitCensus::CSV_HEADER);
            for &qq in &q {
                let f = field(qq)?;
                let c = match (group.as_str(), fix_first) {
                    ("g", true) => census_fix_first(n, &f, &comps, &group_generators(n, &f), method, budget)?,
                    ("g", false) => census(n, &f, &comps, &group_generators(n, &f), "G", budget)?,
                    ("so", false) => census(n, &f, &comps, &so_generators(n, &f), "SO", budget)?,
                    ("p", false) => census(n, &f, &comps, &parabolic_generators(n, &f), "P", budget)?,
                    (g, true) => return Err(Failure::usage(format!("--fix-first needs the full group, got {g}"))),
                    (g, false) => return Err(Failure::usage(format!("unknown group {g:?}"))),
                };
                out!("{}", c.to_csv_row());
                results.push(c);
            }
            let record = suites::census_record(n, &space, &comps, &results, budget)?;
            if let Some(path) = json {
                write_json(&path, &record)?;
            }
            if let Some(dir) = store {
                let name = format!("census-n{n}-{}.json", suites::slug(&space));
                write_json(&dir.join(name), &record)?;
            }
            Ok(0)
        }
        Command::Verify { suite, n, q, family, space, trials, out, store } => {
            let cfg = suites::SuiteConfig { n, q, family, space, trials, budget };
            let n = cfg.rank();
            let report = suites::run_suite(&suite, &cfg)?;
            for line in &report.lines {
                out!("{line}");
            }
            let summary = report.to_json(&suite, &cfg);
            if let Some(path) = out {
                write_json(&path, &summary)?;
            } else {
                print_json(&summary);
            }
            if let Some(dir) = store {
                write_json(&dir.join(format!("verify-{}.json", suites::slug(&format!("{suite}-{n}")))), &summary)?;
            }
            Ok(report.exit_code())
        }
        Command::Report { store, format } => report::run(&store, &format),
    }
}
