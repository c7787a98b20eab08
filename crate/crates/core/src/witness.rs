//! One-parameter witness pencils m_λ of infinite type, their equivariance certificates, and
//! orbit separation through the orbit engine.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, Fp};
use crate::flags::{Composition, FlagChain, FlagTuple};
use crate::geometry::{ell, GroupElement};
use crate::matrix::Matrix;
use crate::orbit::{same_orbit_in_group, Connection};
use crate::subspace::Subspace;

/// Which parameter values a family's lemma allows to share an orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Equality,
    /// λ ∼ 1 − λ.
    OneMinus,
    /// λ/μ a square.
    SquareClass,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equality => "equality",
            Relation::OneMinus => "lambda~1-lambda",
            Relation::SquareClass => "square-class",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyId {
    O4L31(u8),
    O6L32p,
    O6L31p(u8),
    O5EmbL33p,
    O8L32(u8),
    O12L310(u8),
    O12L311,
    O6L322Sq,
    O10L323Sq,
}

const ROMAN: [&str; 6] = ["i", "ii", "iii", "iv", "v", "vi"];

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::O4L31(i) => write!(f, "O4_L31_{i}"),
            FamilyId::O6L32p => f.write_str("O6_L32p"),
            FamilyId::O6L31p(i) => write!(f, "O6_L31p_{}", ROMAN[*i as usize]),
            FamilyId::O5EmbL33p => f.write_str("O5emb_L33p"),
            FamilyId::O8L32(i) => write!(f, "O8_L32_{}", ROMAN[*i as usize]),
            FamilyId::O12L310(i) => write!(f, "O12_L310_{}", ROMAN[*i as usize]),
            FamilyId::O12L311 => f.write_str("O12_L311"),
            FamilyId::O6L322Sq => f.write_str("O6_L322_sq"),
            FamilyId::O10L323Sq => f.write_str("O10_L323_sq"),
        }
    }
}

impl FamilyId {
    pub fn all() -> Vec<FamilyId> {
        let mut out: Vec<FamilyId> = (0..5).map(FamilyId::O4L31).collect();
        out.push(FamilyId::O6L32p);
        out.extend((0..3).map(FamilyId::O6L31p));
        out.push(FamilyId::O5EmbL33p);
        out.extend((0..6).map(FamilyId::O8L32));
        out.extend((0..4).map(FamilyId::O12L310));
        out.push(FamilyId::O12L311);
        out.push(FamilyId::O6L322Sq);
        out.push(FamilyId::O10L323Sq);
        out
    }

    pub fn parse(s: &str) -> Result<FamilyId> {
        FamilyId::all()
            .into_iter()
            .find(|id| id.to_string() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown witness family {s:?}")))
    }

    pub fn n_min(&self) -> usize {
        match self {
            FamilyId::O4L31(_) => 2,
            FamilyId::O6L32p | FamilyId::O6L31p(_) | FamilyId::O5EmbL33p | FamilyId::O6L322Sq => 3,
            FamilyId::O8L32(_) => 4,
            FamilyId::O10L323Sq => 5,
            FamilyId::O12L310(_) | FamilyId::O12L311 => 6,
        }
    }

    pub fn relation(&self) -> Relation {
        match self {
            FamilyId::O6L32p => Relation::OneMinus,
            FamilyId::O6L322Sq | FamilyId::O10L323Sq => Relation::SquareClass,
            _ => Relation::Equality,
        }
    }

    /// Whether λ ranges over F^× (otherwise over F).
    fn nonzero(&self, n: usize) -> bool {
        match self {
            FamilyId::O4L31(_) => false,
            FamilyId::O6L31p(_) => n > 3,
            _ => true,
        }
    }

    /// Values excluded besides 0; the embedding argument for four factors needs λ ≠ 1.
    fn excludes_one(&self, n: usize) -> bool {
        matches!(self, FamilyId::O4L31(_)) && n > 2
    }

    pub fn compositions(&self, n: usize) -> Result<Vec<Composition>> {
        self.check_n(n)?;
        let c = |v: Vec<usize>| Composition::for_rank(v, n);
        match *self {
            FamilyId::O4L31(i) => (1..=4).map(|j| c(vec![if j <= i as usize { 2 } else { 1 }])).collect(),
            FamilyId::O6L32p => Ok(vec![c(vec![2])?, c(vec![2])?, c(vec![2])?]),
            FamilyId::O6L31p(0) => Ok(vec![c(vec![2])?, c(vec![2])?, c(vec![1, n - 1])?]),
            FamilyId::O6L31p(1) => Ok(vec![c(vec![2])?, c(vec![1, n - 1])?, c(vec![1, n - 1])?]),
            FamilyId::O6L31p(_) => Ok(vec![c(vec![1, n - 1])?, c(vec![1, n - 1])?, c(vec![1, n - 1])?]),
            FamilyId::O5EmbL33p => Ok(vec![c(vec![1])?, c(vec![1, 1])?, c(vec![1, 1])?]),
            FamilyId::O8L32(i) => {
                let (b, g) = [
                    (vec![2, 2], vec![2, 2]),
                    (vec![2, 2], vec![2, 1]),
                    (vec![2, 1], vec![2, 1]),
                    (vec![2, 2], vec![1, 2]),
                    (vec![2, 1], vec![1, 2]),
                    (vec![1, 2], vec![1, 2]),
                ][i as usize]
                    .clone();
                Ok(vec![c(vec![n])?, c(b)?, c(g)?])
            }
            FamilyId::O12L310(i) => {
                let g = match i {
                    0 => vec![2, 2, n - 4],
                    1 => vec![2, 2, 1],
                    2 => vec![2, 1, 2],
                    _ => vec![1, 2, 2],
                };
                Ok(vec![c(vec![n])?, c(vec![4])?, c(g)?])
            }
            FamilyId::O12L311 => Ok(vec![c(vec![n])?, c(vec![4])?, c(vec![1, 2, 1, n - 4])?]),
            FamilyId::O6L322Sq => Ok(vec![c(vec![n])?, c(vec![1, 1])?, c(vec![1, 1])?]),
            FamilyId::O10L323Sq => Ok(vec![c(vec![n])?, c(vec![3])?, c(vec![1, 1, 1, 1])?]),
        }
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n < self.n_min() {
            return Err(Error::Domain(format!("{self} needs n >= {}, got {n}", self.n_min())));
        }
        Ok(())
    }

    pub fn check_lambda<F: Field>(&self, f: &F, n: usize, lambda: &F::Elem) -> Result<()> {
        if self.nonzero(n) && f.is_zero(lambda) {
            return Err(Error::Domain(format!("{self} needs lambda != 0")));
        }
        if self.excludes_one(n) && f.is_one(lambda) {
            return Err(Error::Domain(format!("{self} embedded at n = {n} needs lambda != 1")));
        }
        Ok(())
    }

    /// The λ-domain over GF(q).
    pub fn domain(&self, n: usize, f: &Fp) -> Vec<u32> {
        (0..f.p()).filter(|l| self.check_lambda(f, n, l).is_ok()).collect()
    }

    /// m_λ inside F^{2n}.
    pub fn build<F: Field>(&self, n: usize, lambda: &F::Elem, f: &F) -> Result<FlagTuple<F>> {
        self.check_n(n)?;
        self.check_lambda(f, n, lambda)?;
        let chains = build_chains(*self, n, lambda, f)?;
        let t = FlagTuple::new(n, chains)?;
        let comps = self.compositions(n)?;
        t.validate(&comps)
            .map_err(|(i, v)| Error::Verification(format!("{self} factor {i}: {v}")))?;
        Ok(t)
    }
}

/// Images of f_1, ..., f_{2m} in F^{2n}, plus the padding spaces U_[l].
struct Embedding<'a, F: Field> {
    f: &'a F,
    n: usize,
    images: Vec<Vec<F::Elem>>,
}

impl<'a, F: Field> Embedding<'a, F> {
    /// f_i ↦ e_{i+n-m}.
    fn shift(f: &'a F, n: usize, m: usize) -> Self {
        let images = (1..=2 * m)
            .map(|i| {
                let mut v = vec![f.zero(); 2 * n];
                v[i + n - m - 1] = f.one();
                v
            })
            .collect();
        Embedding { f, n, images }
    }

    /// The O_5 embedding: f_3 ↦ e_n + ½ e_{n+1}, the rest shifted around it.
    fn odd(f: &'a F, n: usize) -> Self {
        let mut images = Vec::new();
        for (i, pos) in [(1, n - 2), (2, n - 1), (3, n), (4, n + 2), (5, n + 3)] {
            let mut v = vec![f.zero(); 2 * n];
            v[pos - 1] = f.one();
            if i == 3 {
                v[n] = f.half();
            }
            images.push(v);
        }
        Embedding { f, n, images }
    }

    fn vector(&self, terms: &[(usize, F::Elem)]) -> Vec<F::Elem> {
        let mut v = vec![self.f.zero(); 2 * self.n];
        for (i, c) in terms {
            for (x, y) in v.iter_mut().zip(&self.images[i - 1]) {
                *x = self.f.add(x, &self.f.mul(c, y));
            }
        }
        v
    }

    /// U_[pad] ⊕ φ(span of the given vectors).
    fn space(&self, pad: usize, vectors: &[Vec<(usize, F::Elem)>]) -> Result<Subspace<F>> {
        let mut rows: Vec<Vec<F::Elem>> = (1..=pad)
            .map(|i| {
                let mut v = vec![self.f.zero(); 2 * self.n];
                v[i - 1] = self.f.one();
                v
            })
            .collect();
        rows.extend(vectors.iter().map(|t| self.vector(t)));
        let s = Subspace::from_vectors(self.f, 2 * self.n, rows.clone())?;
        if s.dim() != rows.len() {
            return Err(Error::Verification("witness vectors are dependent".into()));
        }
        Ok(s)
    }
}

fn build_chains<F: Field>(id: FamilyId, n: usize, lambda: &F::Elem, f: &F) -> Result<Vec<FlagChain<F>>> {
    let k = |x: i64| f.from_i64(x);
    let l = lambda.clone();
    let one_minus = f.sub(&f.one(), &l);
    let e = |i: usize| vec![(i, k(1))];
    let chain = |spaces: Vec<Subspace<F>>| FlagChain::new(spaces);
    match id {
        FamilyId::O4L31(i) => {
            let p = Embedding::shift(f, n, 2);
            let full = [
                vec![e(1), e(2)],
                vec![e(3), e(4)],
                vec![vec![(1, k(1)), (3, k(1))], vec![(2, k(1)), (4, k(-1))]],
                vec![vec![(1, k(1)), (3, l.clone())], vec![(2, k(1)), (4, f.neg(&l))]],
            ];
            let line = [
                e(1),
                e(3),
                vec![(2, k(1)), (4, k(-1))],
                vec![(2, k(1)), (4, f.neg(&l))],
            ];
            (0..4)
                .map(|j| {
                    let s = if j < i as usize { p.space(0, &full[j])? } else { p.space(0, &[line[j].clone()])? };
                    Ok(chain(vec![s]))
                })
                .collect()
        }
        FamilyId::O6L32p => {
            let p = Embedding::shift(f, n, 3);
            Ok(vec![
                chain(vec![p.space(0, &[e(1), e(2)])?]),
                chain(vec![p.space(0, &[e(5), e(6)])?]),
                chain(vec![p.space(
                    0,
                    &[
                        vec![(1, k(1)), (3, k(1)), (5, k(1))],
                        vec![(2, l.clone()), (4, k(-1)), (6, one_minus.clone())],
                    ],
                )?]),
            ])
        }
        FamilyId::O6L31p(0) => {
            let p = Embedding::shift(f, n, 3);
            Ok(vec![
                chain(vec![p.space(0, &[e(1), e(2)])?]),
                chain(vec![p.space(0, &[e(5), e(6)])?]),
                chain(vec![
                    p.space(0, &[vec![(1, l.clone()), (3, k(-1)), (5, one_minus.clone())]])?,
                    p.space(
                        n - 3,
                        &[
                            vec![(1, k(1)), (5, k(-1))],
                            vec![(1, k(1)), (3, k(-1))],
                            vec![(2, k(1)), (4, k(1)), (6, k(1))],
                        ],
                    )?,
                ]),
            ])
        }
        FamilyId::O6L31p(1) => {
            let p = Embedding::shift(f, n, 3);
            Ok(vec![
                chain(vec![p.space(0, &[vec![(1, k(1)), (5, k(1))], vec![(2, k(1)), (6, k(-1))]])?]),
                chain(vec![
                    p.space(0, &[vec![(1, k(1)), (3, k(1))]])?,
                    p.space(n - 3, &[e(1), e(2), e(3)])?,
                ]),
                chain(vec![
                    p.space(0, &[vec![(4, k(1)), (6, l.clone())]])?,
                    p.space(n - 3, &[e(4), e(5), e(6)])?,
                ]),
            ])
        }
        FamilyId::O6L31p(_) => {
            let p = Embedding::shift(f, n, 3);
            Ok(vec![
                chain(vec![
                    p.space(0, &[vec![(1, k(1)), (3, k(1))]])?,
                    p.space(n - 3, &[e(1), e(2), e(3)])?,
                ]),
                chain(vec![
                    p.space(0, &[vec![(1, k(1)), (5, k(1))]])?,
                    p.space(n - 3, &[e(1), e(4), e(5)])?,
                ]),
                chain(vec![
                    p.space(0, &[vec![(3, k(1)), (5, l.clone())]])?,
                    p.space(n - 3, &[e(3), e(5), e(6)])?,
                ]),
            ])
        }
        FamilyId::O5EmbL33p => {
            let p = Embedding::odd(f, n);
            let minus_half = f.neg(&f.half());
            Ok(vec![
                chain(vec![p.space(0, &[vec![(1, k(1)), (3, k(1)), (5, minus_half)]])?]),
                chain(vec![
                    p.space(0, &[vec![(1, k(1)), (2, k(1))]])?,
                    p.space(0, &[e(1), e(2)])?,
                ]),
                chain(vec![
                    p.space(0, &[vec![(4, k(1)), (5, l.clone())]])?,
                    p.space(0, &[e(4), e(5)])?,
                ]),
            ])
        }
        FamilyId::O8L32(i) => {
            let p = Embedding::shift(f, n, 4);
            let v = [
                vec![(1, k(1)), (7, k(1))],
                vec![(2, k(1)), (8, k(-1))],
                vec![(3, k(1)), (5, k(1))],
                vec![(4, k(1)), (6, k(-1))],
            ];
            let plus_two = [vec![(1, k(1)), (3, k(1))], vec![(2, k(1)), (4, l.clone())]];
            let u_plus = [e(1), e(2), e(3), e(4)];
            let u_plus_prime = [vec![(1, k(1)), (3, k(1))], e(2), e(4)];
            let u_minus = [e(5), e(6), e(7), e(8)];
            let u_minus_prime = [e(5), e(6), e(7)];
            let (b1, b2): (Vec<Vec<(usize, F::Elem)>>, &[Vec<(usize, F::Elem)>]) = match i {
                0 | 1 | 3 => (plus_two.to_vec(), &u_plus),
                2 | 4 => (plus_two.to_vec(), &u_plus_prime),
                _ => (vec![plus_two[1].clone()], &u_plus_prime),
            };
            let (c1, c2): (Vec<Vec<(usize, F::Elem)>>, &[Vec<(usize, F::Elem)>]) = match i {
                0 => (vec![e(5), e(6)], &u_minus),
                1 | 2 => (vec![e(5), e(6)], &u_minus_prime),
                _ => (vec![e(5)], &u_minus_prime),
            };
            Ok(vec![
                chain(vec![p.space(n - 4, &v)?]),
                chain(vec![p.space(0, &b1)?, p.space(0, b2)?]),
                chain(vec![p.space(0, &c1)?, p.space(0, c2)?]),
            ])
        }
        FamilyId::O12L310(_) | FamilyId::O12L311 => {
            let p = Embedding::shift(f, n, 6);
            let v = [
                vec![(1, k(1)), (11, k(1))],
                vec![(2, k(1)), (12, k(-1))],
                vec![(3, k(1)), (9, k(1))],
                vec![(4, k(1)), (10, k(-1))],
            ];
            let u_minus: Vec<_> = (7..=12).map(e).collect();
            let u_plus: Vec<_> = (1..=6).map(e).collect();
            let u_plus_prime = [e(1), e(2), e(3), e(5), vec![(4, k(1)), (6, k(1))]];
            let a1 = vec![(1, l.clone()), (3, k(1)), (5, k(1))];
            let a = [a1.clone(), vec![(2, k(1)), (4, k(1)), (6, k(1))]];
            let b = [e(1), e(2), vec![(3, k(1)), (5, k(1))], vec![(4, k(1)), (6, k(1))]];
            let c = [e(1), vec![(3, k(1)), (5, k(1))], vec![(2, k(1)), (4, k(1)), (6, k(1))]];
            let w0 = chain(vec![p.space(n - 6, &u_minus)?]);
            let w1 = chain(vec![p.space(0, &v)?]);
            let flag = match id {
                FamilyId::O12L310(0) => vec![p.space(0, &a)?, p.space(0, &b)?, p.space(n - 6, &u_plus)?],
                FamilyId::O12L310(1) => vec![p.space(0, &a)?, p.space(0, &b)?, p.space(0, &u_plus_prime)?],
                FamilyId::O12L310(2) => vec![p.space(0, &a)?, p.space(0, &c)?, p.space(0, &u_plus_prime)?],
                FamilyId::O12L310(_) => vec![p.space(0, &[a1])?, p.space(0, &c)?, p.space(0, &u_plus_prime)?],
                _ => vec![
                    p.space(0, &[a1])?,
                    p.space(0, &c)?,
                    p.space(0, &b)?,
                    p.space(n - 6, &u_plus)?,
                ],
            };
            Ok(vec![w0, w1, chain(flag)])
        }
        FamilyId::O6L322Sq => {
            let p = Embedding::shift(f, n, 3);
            let v = [vec![(2, k(1)), (4, k(1))], vec![(3, k(1)), (5, k(-1))], e(6)];
            let top = [vec![(1, k(1)), (3, k(1))], vec![(2, l.clone()), (3, k(1))]];
            Ok(vec![
                chain(vec![p.space(n - 3, &v)?]),
                chain(vec![p.space(0, &[e(4)])?, p.space(0, &[e(4), e(5)])?]),
                chain(vec![p.space(0, &top[..1])?, p.space(0, &top)?]),
            ])
        }
        FamilyId::O10L323Sq => {
            let p = Embedding::shift(f, n, 5);
            let v = [
                e(3),
                vec![(4, k(1)), (6, k(1))],
                vec![(5, k(1)), (7, k(-1))],
                e(9),
                e(10),
            ];
            let u1 = vec![(1, k(1)), (2, k(1)), (3, k(1)), (5, k(1))];
            let u2 = vec![(4, l.clone()), (1, k(1)), (5, k(1))];
            let u3 = [e(4), vec![(1, k(1)), (5, k(1))], vec![(2, k(1)), (3, k(1))]];
            let u4 = [e(4), e(1), e(5), vec![(2, k(1)), (3, k(1))]];
            Ok(vec![
                chain(vec![p.space(n - 5, &v)?]),
                chain(vec![p.space(0, &[e(6), e(7), e(8)])?]),
                chain(vec![
                    p.space(0, std::slice::from_ref(&u1))?,
                    p.space(0, &[u1, u2])?,
                    p.space(0, &u3)?,
                    p.space(0, &u4)?,
                ]),
            ])
        }
    }
}

/// A 2m×2m isometry placed on the middle coordinates n−m+1..n+m of F^{2n}.
fn embed_element(small: &GroupElement<Fp>, n: usize) -> Result<GroupElement<Fp>> {
    let m = small.n();
    let f = *small.mat().field();
    let mut big = Matrix::identity(&f, 2 * n);
    for r in 0..2 * m {
        for c in 0..2 * m {
            big.set(r + n - m, c + n - m, *small.mat().get(r, c));
        }
    }
    GroupElement::new(big)
}

fn diagonal_candidate(id: FamilyId, n: usize, c: u32, f: &Fp) -> Option<Result<GroupElement<Fp>>> {
    let ci = f.inv(&c).ok()?;
    let diag = match id {
        FamilyId::O6L322Sq => vec![c, ci, c],
        FamilyId::O10L323Sq => vec![c, c, c, ci, c],
        _ => return None,
    };
    let m = diag.len();
    let mut a = Matrix::zeros(f, m, m);
    for (i, x) in diag.into_iter().enumerate() {
        a.set(i, i, x);
    }
    Some(ell(&a).and_then(|g| embed_element(&g, n)))
}

/// g with g·m_λ = m_target, verified by direct action.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub family: FamilyId,
    pub n: usize,
    pub lambda: u32,
    pub target: u32,
    pub element: GroupElement<Fp>,
    pub source: FlagTuple<Fp>,
    pub image: FlagTuple<Fp>,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family.to_string(),
            "n": self.n,
            "lambda": self.lambda,
            "target": self.target,
            "element": self.element.to_json(),
            "source": self.source.to_json(),
            "image": self.image.to_json(),
        })
    }
}

/// Feasibility of exact separation: ambient rank and primes for which BFS is run.
#[derive(Clone, Debug)]
pub struct FeasibilityMatrix {
    pub max_n: usize,
    pub primes: Vec<u32>,
}

impl Default for FeasibilityMatrix {
    fn default() -> Self {
        FeasibilityMatrix {
            max_n: 3,
            primes: vec![3, 5],
        }
    }
}

impl FeasibilityMatrix {
    pub fn allows(&self, n: usize, q: u32) -> bool {
        n <= self.max_n && self.primes.contains(&q)
    }

    pub fn describe(&self) -> String {
        format!("exact separation for n <= {} at q in {:?}; construction and equivariance only otherwise", self.max_n, self.primes)
    }
}

/// Outcome of comparing m_λ and m_μ.
#[derive(Clone, Debug)]
pub enum Separation {
    SameOrbit(GroupElement<Fp>),
    DistinctOrbits,
    Infeasible(String),
}

impl Separation {
    pub fn label(&self) -> &'static str {
        match self {
            Separation::SameOrbit(_) => "same",
            Separation::DistinctOrbits => "distinct",
            Separation::Infeasible(_) => "infeasible",
        }
    }
}

pub fn separation_check(
    id: FamilyId,
    n: usize,
    lambda: u32,
    mu: u32,
    f: &Fp,
    feasibility: &FeasibilityMatrix,
    budget: usize,
) -> Result<Separation> {
    let x = id.build(n, &lambda, f)?;
    let y = id.build(n, &mu, f)?;
    if x == y {
        return Ok(Separation::SameOrbit(GroupElement::identity(f, n)));
    }
    if !feasibility.allows(n, f.p()) {
        return Ok(Separation::Infeasible(format!("outside the feasibility matrix: {}", feasibility.describe())));
    }
    Ok(match same_orbit_in_group(&x, &y, budget)? {
        Connection::Same(g) => Separation::SameOrbit(g),
        Connection::Distinct => Separation::DistinctOrbits,
        Connection::Infeasible { explored } => Separation::Infeasible(format!("budget exhausted after {explored} tuples")),
    })
}

/// A certificate that m_λ and its relation partner share an orbit: m_{λ/c²} for square-class
/// families, m_{1−λ} for the λ ∼ 1−λ family (searched, since no closed-form candidate is known).
pub fn equivariance_check(
    id: FamilyId,
    n: usize,
    lambda: u32,
    c: u32,
    f: &Fp,
    feasibility: &FeasibilityMatrix,
    budget: usize,
) -> Result<Certificate> {
    let target = match id.relation() {
        Relation::SquareClass => f.div(&lambda, &f.mul(&c, &c))?,
        Relation::OneMinus => f.sub(&1, &lambda),
        Relation::Equality => lambda,
    };
    let source = id.build(n, &lambda, f)?;
    let image = id.build(n, &target, f)?;
    let certify = |g: GroupElement<Fp>| -> Result<Option<Certificate>> {
        Ok((source.act(&g)? == image).then(|| Certificate {
            family: id,
            n,
            lambda,
            target,
            element: g,
            source: source.clone(),
            image: image.clone(),
        }))
    };
    if lambda == target {
        if let Some(cert) = certify(GroupElement::identity(f, n))? {
            return Ok(cert);
        }
    }
    if let Some(g) = diagonal_candidate(id, n, c, f) {
        if let Some(cert) = certify(g?)? {
            return Ok(cert);
        }
    }
    if feasibility.allows(n, f.p()) {
        if let Connection::Same(g) = same_orbit_in_group(&source, &image, budget)? {
            if let Some(cert) = certify(g)? {
                return Ok(cert);
            }
        }
    }
    Err(Error::Verification(format!(
        "{id}: no element found mapping lambda = {lambda} to {target}"
    )))
}

/// One row of a pairwise separation table.
#[derive(Clone, Debug)]
pub struct SeparationRow {
    pub lambda: u32,
    pub mu: u32,
    pub verdict: Separation,
}

impl SeparationRow {
    pub fn to_json(&self) -> Value {
        let element = match &self.verdict {
            Separation::SameOrbit(g) => g.to_json(),
            _ => Value::Null,
        };
        let reason = match &self.verdict {
            Separation::Infeasible(r) => Value::String(r.clone()),
            _ => Value::Null,
        };
        json!({"lambda": self.lambda, "mu": self.mu, "verdict": self.verdict.label(), "element": element, "reason": reason})
    }
}

/// All pairs λ < μ of the domain.
pub fn separation_table(
    id: FamilyId,
    n: usize,
    f: &Fp,
    feasibility: &FeasibilityMatrix,
    budget: usize,
) -> Result<Vec<SeparationRow>> {
    let dom = id.domain(n, f);
    let mut rows = Vec::new();
    for (i, &l) in dom.iter().enumerate() {
        for &m in &dom[i + 1..] {
            rows.push(SeparationRow {
                lambda: l,
                mu: m,
                verdict: separation_check(id, n, l, m, f, feasibility, budget)?,
            });
        }
    }
    Ok(rows)
}

/// The domain partitioned into orbit classes; errors if some comparison is infeasible.
pub fn orbit_classes(
    id: FamilyId,
    n: usize,
    f: &Fp,
    feasibility: &FeasibilityMatrix,
    budget: usize,
) -> Result<Vec<Vec<u32>>> {
    let mut classes: Vec<Vec<u32>> = Vec::new();
    'next: for l in id.domain(n, f) {
        for class in classes.iter_mut() {
            match separation_check(id, n, class[0], l, f, feasibility, budget)? {
                Separation::SameOrbit(_) => {
                    class.push(l);
                    continue 'next;
                }
                Separation::DistinctOrbits => {}
                Separation::Infeasible(r) => return Err(Error::Hypothesis(r)),
            }
        }
        classes.push(vec![l]);
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip() {
        for id in FamilyId::all() {
            assert_eq!(FamilyId::parse(&id.to_string()).unwrap(), id);
        }
        assert_eq!(FamilyId::all().len(), 23);
        assert!(FamilyId::parse("O4_L31_9").is_err());
    }

    #[test]
    fn o4_fourth_family_vectors() {
        let f = Fp::new(5).unwrap();
        let t = FamilyId::O4L31(4).build(2, &2, &f).unwrap();
        let expected = Subspace::from_i64(&f, 4, &[vec![1, 0, 2, 0], vec![0, 1, 0, -2]]).unwrap();
        assert_eq!(t.chains()[3].top(), &expected);
    }

    #[test]
    fn domain_rules() {
        let f = Fp::new(5).unwrap();
        assert_eq!(FamilyId::O4L31(0).domain(2, &f), vec![0, 1, 2, 3, 4]);
        assert_eq!(FamilyId::O4L31(0).domain(3, &f), vec![0, 2, 3, 4]);
        assert_eq!(FamilyId::O6L32p.domain(3, &f), vec![1, 2, 3, 4]);
        assert!(FamilyId::O6L32p.build(3, &0, &f).is_err());
        assert!(FamilyId::O8L32(0).build(3, &1, &f).is_err());
    }
}
