//! Decision procedure for finiteness of G-orbits on multiple flag varieties of O_2n.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flags::Composition;

/// What is assumed about |F^×/(F^×)²|.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SquareClasses {
    Finite,
    Infinite,
    Unknown,
}

impl SquareClasses {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "finite" => Ok(SquareClasses::Finite),
            "infinite" => Ok(SquareClasses::Infinite),
            "unknown" => Ok(SquareClasses::Unknown),
            other => Err(Error::Parse(format!("square classes must be finite, infinite or unknown, got {other:?}"))),
        }
    }
}

impl fmt::Display for SquareClasses {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SquareClasses::Finite => "finite",
            SquareClasses::Infinite => "infinite",
            SquareClasses::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Finite,
    Infinite,
    FiniteIffSquareClassesFinite,
    /// Small rank with no closed-form rule; decided by censuses.
    Empirical,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Finite => "Finite",
            Verdict::Infinite => "Infinite",
            Verdict::FiniteIffSquareClassesFinite => "FiniteIffSquareClassesFinite",
            Verdict::Empirical => "Empirical",
        })
    }
}

/// The seven finite-type shapes for a triple in normalized orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    I1,
    I2,
    II,
    III1,
    III2,
    III3,
    III4,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::I1 => "I-1",
            Condition::I2 => "I-2",
            Condition::II => "II",
            Condition::III1 => "III-1",
            Condition::III2 => "III-2",
            Condition::III3 => "III-3",
            Condition::III4 => "III-4",
        })
    }
}

impl Condition {
    fn statement(&self) -> &'static str {
        match self {
            Condition::I1 => "a = (1) and b has one part",
            Condition::I2 => "a = (1) and b = (k, n-k)",
            Condition::II => "a = (n) and b is (1), (2), (3), (n-1), (n), (1,1), (1,n-1) or (n-1,1)",
            Condition::III1 => "a = (n), b = (beta) with 4 <= beta <= n-2, c has one part",
            Condition::III2 => "a = (n), b = (beta) with 4 <= beta <= n-2, c has two parts",
            Condition::III3 => {
                "a = (n), b = (beta) with 4 <= beta <= n-2, c is (1,k,n-k-1), (k,1,n-k-1), (k,n-k-1,1), (1,1,k), (1,k,1) or (k,1,1)"
            }
            Condition::III4 => {
                "a = (n), b = (beta) with 4 <= beta <= n-2, c is (1,1,1,n-3), (1,1,n-3,1), (1,n-3,1,1), (n-3,1,1,1) or (1,1,1,1)"
            }
        }
    }
}

/// Square-class gates: patterns that force infinitely many orbits when F has infinitely many
/// square classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gate {
    ShortFirstParts,
    ShortTwoStepPrefixes,
    ShortFourStepPrefix,
}

impl Gate {
    pub fn id(&self) -> &'static str {
        match self {
            Gate::ShortFirstParts => "short-first-parts",
            Gate::ShortTwoStepPrefixes => "short-two-step-prefixes",
            Gate::ShortFourStepPrefix => "short-four-step-prefix",
        }
    }

    fn statement(&self) -> &'static str {
        match self {
            Gate::ShortFirstParts => "max(alpha_1, beta_1, gamma_1) < n",
            Gate::ShortTwoStepPrefixes => "a = (n), q, r >= 2 and max(beta_1 + beta_2, gamma_1 + gamma_2) < n",
            Gate::ShortFourStepPrefix => {
                "a = (n), b = (beta) with 3 <= beta <= n-2, r >= 4 and gamma_1 + ... + gamma_4 < n"
            }
        }
    }
}

fn is(c: &Composition, parts: &[usize]) -> bool {
    c.parts() == parts
}

/// The first of the seven shapes that (a, b, c) matches in this orientation.
pub fn match_condition(n: usize, a: &Composition, b: &Composition, c: &Composition) -> Option<Condition> {
    let (q, r) = (b.len(), c.len());
    let two_part_full = |x: &Composition| x.len() == 2 && x.total() == n;
    if is(a, &[1]) {
        if q == 1 {
            return Some(Condition::I1);
        }
        if two_part_full(b) {
            return Some(Condition::I2);
        }
        return None;
    }
    if !is(a, &[n]) {
        return None;
    }
    let ii: [&[usize]; 8] = [&[1], &[2], &[3], &[n - 1], &[n], &[1, 1], &[1, n - 1], &[n - 1, 1]];
    if ii.iter().any(|p| is(b, p)) {
        return Some(Condition::II);
    }
    if q != 1 || !(4..=n.saturating_sub(2)).contains(&b.parts()[0]) {
        return None;
    }
    if r == 1 {
        return Some(Condition::III1);
    }
    if r == 2 {
        return Some(Condition::III2);
    }
    let g = c.parts();
    if r == 3 {
        let ones = g.iter().filter(|&&x| x == 1).count();
        let full_with_one = c.total() == n && ones >= 1;
        let two_ones = ones >= 2;
        if full_with_one || two_ones {
            return Some(Condition::III3);
        }
    }
    if r == 4 {
        let ones = g.iter().filter(|&&x| x == 1).count();
        if (ones >= 3 && c.total() == n) || g == [1, 1, 1, 1] {
            return Some(Condition::III4);
        }
    }
    None
}

pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// A triple read in one orientation (a, b, c) = (x[p0], x[p1], x[p2]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub permutation: [usize; 3],
    /// a is (1) or (n) and q <= r.
    pub normalized: bool,
    pub condition: Option<Condition>,
    pub gates: Vec<Gate>,
}

fn gates_in(n: usize, a: &Composition, b: &Composition, c: &Composition) -> Vec<Gate> {
    let mut out = Vec::new();
    let first = |x: &Composition| x.parts()[0];
    let prefix = |x: &Composition, k: usize| x.parts().iter().take(k).sum::<usize>();
    if first(a).max(first(b)).max(first(c)) < n {
        out.push(Gate::ShortFirstParts);
    }
    if is(a, &[n]) {
        if b.len() >= 2 && c.len() >= 2 && prefix(b, 2).max(prefix(c, 2)) < n {
            out.push(Gate::ShortTwoStepPrefixes);
        }
        if b.len() == 1 && (3..=n.saturating_sub(2)).contains(&first(b)) && c.len() >= 4 && prefix(c, 4) < n {
            out.push(Gate::ShortFourStepPrefix);
        }
    }
    out
}

/// All six orientations of a triple, annotated.
pub fn normalize_triple(n: usize, x: &[Composition]) -> Result<Vec<Orientation>> {
    if x.len() != 3 {
        return Err(Error::BadComposition(format!("expected three compositions, got {}", x.len())));
    }
    Ok(PERMUTATIONS
        .iter()
        .map(|p| {
            let (a, b, c) = (&x[p[0]], &x[p[1]], &x[p[2]]);
            Orientation {
                permutation: *p,
                normalized: (is(a, &[1]) || is(a, &[n])) && b.len() <= c.len(),
                condition: match_condition(n, a, b, c),
                gates: gates_in(n, a, b, c),
            }
        })
        .collect())
}

/// Dimension set of a flag, closed under adding n when n-1 is present (a flag through an
/// (n-1)-dimensional isotropic space determines the maximal one up to the finite index of SO).
fn closed_dims(n: usize, parts: &[usize]) -> BTreeSet<usize> {
    let mut s = BTreeSet::new();
    let mut t = 0;
    for p in parts {
        t += p;
        s.insert(t);
    }
    if s.contains(&(n - 1)) {
        s.insert(n);
    }
    s
}

/// A triple known to be of finite type, possibly only when F has finitely many square classes.
#[derive(Clone, Debug)]
struct Source {
    parts: [Vec<usize>; 3],
    needs_square_classes: bool,
    family: &'static str,
}

fn compositions_of(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for mut rest in compositions_of(total - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn sources(n: usize) -> Vec<Source> {
    let mut out = Vec::new();
    let ones = vec![1; n];
    let mut add = |a: Vec<usize>, b: Vec<usize>, c: Vec<usize>, hyp: bool, family: &'static str| {
        if [&a, &b, &c].iter().all(|x| !x.is_empty() && x.iter().all(|&p| p > 0) && x.iter().sum::<usize>() <= n) {
            out.push(Source {
                parts: [a, b, c],
                needs_square_classes: hyp,
                family,
            });
        }
    };
    let three = "three-step flag with a unit step, a subspace, a maximal isotropic";
    for beta in 1..=n {
        for k in 1..n {
            if n >= k + 2 {
                add(vec![1, k, n - 1 - k], vec![beta], vec![n], false, three);
                add(vec![k, 1, n - 1 - k], vec![beta], vec![n], false, three);
                add(vec![1, 1, k], vec![beta], vec![n], false, three);
                add(vec![k, 1, 1], vec![beta], vec![n], false, three);
                add(vec![1, k, 1], vec![beta], vec![n], false, three);
            }
        }
        if n >= 4 {
            add(vec![1, 1, 1, n - 3], vec![beta], vec![n], false, "(1,1,1,n-3), a subspace, a maximal isotropic");
            add(vec![1, 1, 1, 1], vec![beta], vec![n], true, "(1,1,1,1), a subspace, a maximal isotropic");
        }
        for g in 1..=n {
            for g1 in 1..g {
                add(vec![g1, g - g1], vec![beta], vec![n], false, "two-step flag, a subspace, a maximal isotropic");
            }
        }
    }
    if n >= 2 {
        add(ones.clone(), vec![n - 1], vec![n], false, "full flag, (n-1), (n)");
        add(ones.clone(), vec![1, n - 1], vec![n], false, "full flag, (1,n-1), (n)");
        add(ones.clone(), vec![1, 1], vec![n], true, "full flag, (1,1), (n)");
        for g in 1..n {
            add(vec![g, n - g], vec![1, 1], vec![n], false, "(g,n-g), (1,1), (n)");
            add(vec![g, n - g], vec![1], ones.clone(), true, "(beta,n-beta), a line, full flag");
        }
    }
    for beta in 1..=2.min(n) {
        add(ones.clone(), vec![beta], vec![n], false, "full flag, a subspace of dimension <= 2, (n)");
    }
    if n >= 3 {
        add(ones.clone(), vec![3], vec![n], true, "full flag, (3), (n)");
    }
    if n >= 4 {
        for g in compositions_of(n, 4) {
            add(g, vec![3], vec![n], false, "four-step full flag, (3), (n)");
        }
    }
    out
}

/// Finite-type coverage of a triple by coarsening of a known finite-type source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coverage {
    Unconditional(String),
    NeedsSquareClasses(String),
    None,
}

type SourceDims = (Source, [BTreeSet<usize>; 3]);

fn cached_sources(n: usize) -> Arc<Vec<SourceDims>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<SourceDims>>>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(n)
        .or_insert_with(|| {
            Arc::new(
                sources(n)
                    .into_iter()
                    .map(|s| {
                        let d = [0, 1, 2].map(|i| closed_dims(n, &s.parts[i]));
                        (s, d)
                    })
                    .collect(),
            )
        })
        .clone()
}

pub fn coverage(n: usize, x: &[Composition]) -> Coverage {
    let qd: Vec<BTreeSet<usize>> = x.iter().map(|c| closed_dims(n, c.parts())).collect();
    let mut conditional = None;
    for (s, sd) in cached_sources(n).iter() {
        let hit = PERMUTATIONS.iter().any(|p| (0..3).all(|i| qd[p[i]].is_subset(&sd[i])));
        if !hit {
            continue;
        }
        let fmt = |p: &Vec<usize>| format!("({})", p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        let text = format!("coarsening of {}|{}|{} [{}]", fmt(&s.parts[0]), fmt(&s.parts[1]), fmt(&s.parts[2]), s.family);
        if !s.needs_square_classes {
            return Coverage::Unconditional(text);
        }
        conditional.get_or_insert(text);
    }
    conditional.map_or(Coverage::None, Coverage::NeedsSquareClasses)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: String,
    pub permutation: Option<[usize; 3]>,
    pub citation: String,
    pub note: Option<String>,
}

impl TraceStep {
    fn new(rule: &str, permutation: Option<[usize; 3]>, citation: impl Into<String>) -> Self {
        TraceStep {
            rule: rule.to_string(),
            permutation,
            citation: citation.into(),
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn to_json(&self) -> Value {
        json!({"rule": self.rule, "permutation": self.permutation, "citation": self.citation, "note": self.note})
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub n: usize,
    pub compositions: Vec<Composition>,
    pub square_classes: SquareClasses,
    pub verdict: Verdict,
    /// Short rule label printed next to the verdict.
    pub label: String,
    pub trace: Vec<TraceStep>,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.verdict, self.label)
    }
}

impl Classification {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "compositions": self.compositions.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "square_classes": self.square_classes.to_string(),
            "verdict": self.verdict.to_string(),
            "label": self.label,
            "trace": self.trace.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        })
    }
}

fn done(n: usize, x: &[Composition], sq: SquareClasses, verdict: Verdict, label: &str, trace: Vec<TraceStep>) -> Classification {
    Classification {
        n,
        compositions: x.to_vec(),
        square_classes: sq,
        verdict,
        label: label.to_string(),
        trace,
    }
}

const O6_INFINITE: [[&[usize]; 3]; 4] = [
    [&[2], &[2], &[2]],
    [&[2], &[2], &[1, 2]],
    [&[2], &[1, 2], &[1, 2]],
    [&[1, 2], &[1, 2], &[1, 2]],
];

pub fn classify(n: usize, x: &[Composition], sq: SquareClasses) -> Result<Classification> {
    if n == 0 {
        return Err(Error::BadComposition("rank must be positive".into()));
    }
    for c in x {
        if c.total() > n {
            return Err(Error::BadComposition(format!("{c} has total {} > n = {n}", c.total())));
        }
    }
    let k = x.len();
    if n == 1 {
        let t = TraceStep::new("rank-one", None, "F^2 has exactly two isotropic lines, so every flag variety is finite");
        return Ok(done(n, x, sq, Verdict::Finite, "rank-one", vec![t]));
    }
    if k <= 2 {
        let t = TraceStep::new("at-most-two-factors", None, "two flags are classified by the Bruhat decomposition");
        return Ok(done(n, x, sq, Verdict::Finite, "at-most-two-factors", vec![t]));
    }
    if k >= 4 {
        let t = TraceStep::new("four-or-more-factors", None, "n >= 2 and k >= 4 give infinitely many orbits");
        return Ok(done(n, x, sq, Verdict::Infinite, "four-or-more-factors", vec![t]));
    }
    let orients = normalize_triple(n, x)?;
    let mut fired: Vec<(Gate, [usize; 3])> = Vec::new();
    for o in &orients {
        for g in &o.gates {
            if !fired.iter().any(|(h, _)| h == g) {
                fired.push((*g, o.permutation));
            }
        }
    }
    fired.sort();
    let gate_steps: Vec<TraceStep> = fired
        .iter()
        .map(|(g, p)| TraceStep::new(g.id(), Some(*p), format!("square-class gate: {}", g.statement())))
        .collect();
    let gate_label = fired.iter().map(|(g, _)| g.id()).collect::<Vec<_>>().join(", ");
    if n <= 3 {
        return Ok(classify_small(n, x, sq, &orients, gate_steps, &gate_label));
    }

    let best = orients
        .iter()
        .filter_map(|o| o.condition.map(|c| (c, o.permutation)))
        .min();
    let (cond, perm) = match best {
        Some(b) => b,
        None => {
            let t = TraceStep::new(
                "no-finite-type-shape",
                None,
                "no orientation matches any of the seven finite-type shapes",
            );
            return Ok(done(n, x, sq, Verdict::Infinite, "no-finite-type-shape", vec![t]));
        }
    };
    let mut trace = vec![TraceStep::new(&cond.to_string(), Some(perm), cond.statement())];
    let label = cond.to_string();
    if sq == SquareClasses::Finite {
        return Ok(done(n, x, sq, Verdict::Finite, &label, trace));
    }
    if !fired.is_empty() {
        trace.extend(gate_steps);
        let v = if sq == SquareClasses::Infinite { Verdict::Infinite } else { Verdict::FiniteIffSquareClassesFinite };
        return Ok(done(n, x, sq, v, &format!("{label}, {gate_label}"), trace));
    }
    match coverage(n, x) {
        Coverage::Unconditional(text) => {
            trace.push(TraceStep::new("finite-by-coarsening", None, text));
            Ok(done(n, x, sq, Verdict::Finite, &label, trace))
        }
        Coverage::NeedsSquareClasses(text) => {
            trace.push(
                TraceStep::new("finite-by-coarsening", None, text)
                    .with_note("the known finiteness argument assumes finitely many square classes"),
            );
            Ok(done(n, x, sq, Verdict::FiniteIffSquareClassesFinite, &label, trace))
        }
        Coverage::None => {
            trace.push(
                TraceStep::new("uncovered", None, "no finiteness argument free of square-class hypotheses covers this triple")
                    .with_note("shape matches and no gate fires, but no unconditional sufficiency argument applies"),
            );
            Ok(done(n, x, sq, Verdict::FiniteIffSquareClassesFinite, &label, trace))
        }
    }
}

fn classify_small(
    n: usize,
    x: &[Composition],
    sq: SquareClasses,
    orients: &[Orientation],
    gate_steps: Vec<TraceStep>,
    gate_label: &str,
) -> Classification {
    if n == 3 {
        for p in PERMUTATIONS {
            if O6_INFINITE.iter().any(|t| (0..3).all(|i| is(&x[p[i]], t[i]))) {
                let t = TraceStep::new(
                    "O6 corollary",
                    Some(p),
                    "(2)|(2)|(2), (2)|(2)|(1,2), (2)|(1,2)|(1,2) and (1,2)|(1,2)|(1,2) are of infinite type for O_6",
                );
                return done(n, x, sq, Verdict::Infinite, "O6 corollary", vec![t]);
            }
        }
        if !x.iter().any(|c| is(c, &[1]) || is(c, &[n])) {
            let t = TraceStep::new(
                "no-line-or-maximal-factor",
                None,
                "for n >= 3 a finite-type triple has a factor equal to (1) or (n)",
            );
            return done(n, x, sq, Verdict::Infinite, "no-line-or-maximal-factor", vec![t]);
        }
        for o in orients {
            let (a, b, c) = (&x[o.permutation[0]], &x[o.permutation[1]], &x[o.permutation[2]]);
            let split = |y: &Composition| y.len() == 2 && y.total() == n;
            if is(a, &[1]) && b.len() >= 2 && c.len() >= 2 && !split(b) && !split(c) {
                let t = TraceStep::new(
                    "line-without-split-partner",
                    Some(o.permutation),
                    "for n >= 3, a = (1) and q >= 2 need b or c of the form (k, n-k)",
                );
                return done(n, x, sq, Verdict::Infinite, "line-without-split-partner", vec![t]);
            }
        }
    }
    if sq == SquareClasses::Infinite && !gate_steps.is_empty() {
        return done(n, x, sq, Verdict::Infinite, gate_label, gate_steps);
    }
    match coverage(n, x) {
        Coverage::Unconditional(text) => {
            done(n, x, sq, Verdict::Finite, "finite-by-coarsening", vec![TraceStep::new("finite-by-coarsening", None, text)])
        }
        Coverage::NeedsSquareClasses(text) if sq != SquareClasses::Infinite => {
            let v = if sq == SquareClasses::Finite { Verdict::Finite } else { Verdict::FiniteIffSquareClassesFinite };
            let t = TraceStep::new("finite-by-coarsening", None, text)
                .with_note("the known finiteness argument assumes finitely many square classes");
            done(n, x, sq, v, "finite-by-coarsening", vec![t])
        }
        _ => {
            let t = TraceStep::new("empirical", None, "no closed-form rule at this rank; decided by censuses");
            done(n, x, sq, Verdict::Empirical, "empirical", vec![t])
        }
    }
}

/// Parse "(a1,a2)|(b1)|..." and classify.
pub fn classify_str(n: usize, triple: &str, sq: SquareClasses) -> Result<Classification> {
    let comps = crate::flags::parse_tuple(triple)?;
    classify(n, &comps, sq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: &[usize]) -> Composition {
        Composition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn third_shape_with_k_two() {
        assert_eq!(match_condition(6, &c(&[6]), &c(&[4]), &c(&[1, 2, 3])), Some(Condition::III3));
        assert_eq!(match_condition(6, &c(&[6]), &c(&[4]), &c(&[2, 2, 2])), None);
        assert_eq!(match_condition(5, &c(&[1]), &c(&[3]), &c(&[1, 1, 1, 1, 1])), Some(Condition::I1));
    }

    #[test]
    fn maximal_triple_matches_via_b() {
        let o = normalize_triple(4, &[c(&[4]), c(&[4]), c(&[4])]).unwrap();
        assert!(o.iter().all(|o| o.condition == Some(Condition::II)));
    }
}
