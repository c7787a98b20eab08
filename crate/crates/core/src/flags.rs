//! Compositions, isotropic flags, flag tuples, enumeration over GF(q) and the diagonal action.

use std::collections::HashSet;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, Fp};
use crate::geometry::{is_isotropic, pairing, perp, GroupElement};
use crate::subspace::Subspace;

/// Default tuple budget for enumeration jobs.
pub const DEFAULT_ENUM_BUDGET: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::BadComposition(format!("{parts:?}")));
        }
        Ok(Composition { parts })
    }

    /// Also checks Σ parts ≤ n.
    pub fn for_rank(parts: Vec<usize>, n: usize) -> Result<Self> {
        let c = Self::new(parts)?;
        if c.total() > n {
            return Err(Error::BadComposition(format!("{c} exceeds n = {n}")));
        }
        Ok(c)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }
    pub fn len(&self) -> usize {
        self.parts.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
    pub fn first(&self) -> usize {
        self.parts[0]
    }

    /// Partial sums α_1, α_1+α_2, ...
    pub fn dims(&self) -> Vec<usize> {
        self.parts
            .iter()
            .scan(0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    pub fn is_single(&self, v: usize) -> bool {
        self.parts == [v]
    }

    /// Parses "(1,2,3)" or "1,2,3".
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = match (t.strip_prefix('('), t.ends_with(')')) {
            (Some(inner), true) => &inner[..inner.len() - 1],
            (None, false) => t,
            _ => return Err(Error::Parse(format!("unbalanced parentheses in '{s}'"))),
        };
        let parts = t
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad composition '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Parses "(a1,a2)|(b1)|(c1,c2,c3)".
pub fn parse_tuple(s: &str) -> Result<Vec<Composition>> {
    s.split('|').map(Composition::parse).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlagChain<F: Field> {
    spaces: Vec<Subspace<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Length { expected: usize, found: usize },
    Ambient { index: usize },
    Dimension { index: usize, expected: usize, found: usize },
    Nesting { index: usize },
    NotIsotropic,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Length { expected, found } => write!(f, "expected {expected} spaces, found {found}"),
            Violation::Ambient { index } => write!(f, "space {index} has the wrong ambient dimension"),
            Violation::Dimension { index, expected, found } => {
                write!(f, "dimension clause: space {index} has dim {found}, expected {expected}")
            }
            Violation::Nesting { index } => write!(f, "space {index} does not contain its predecessor"),
            Violation::NotIsotropic => write!(f, "top space is not isotropic"),
        }
    }
}

impl<F: Field> FlagChain<F> {
    pub fn new(spaces: Vec<Subspace<F>>) -> Self {
        FlagChain { spaces }
    }

    pub fn single(s: Subspace<F>) -> Self {
        FlagChain { spaces: vec![s] }
    }

    pub fn spaces(&self) -> &[Subspace<F>] {
        &self.spaces
    }

    pub fn top(&self) -> &Subspace<F> {
        self.spaces.last().expect("chains are nonempty")
    }

    pub fn composition(&self) -> Result<Composition> {
        let mut prev = 0;
        let mut parts = Vec::new();
        for s in &self.spaces {
            parts.push(s.dim().saturating_sub(prev));
            prev = s.dim();
        }
        Composition::new(parts)
    }

    /// Checks ambient, dimensions, nesting and isotropy of the top space, in that order.
    pub fn validate(&self, a: &Composition, ambient: usize) -> std::result::Result<(), Violation> {
        if self.spaces.len() != a.len() {
            return Err(Violation::Length {
                expected: a.len(),
                found: self.spaces.len(),
            });
        }
        for (index, (s, d)) in self.spaces.iter().zip(a.dims()).enumerate() {
            if s.ambient() != ambient {
                return Err(Violation::Ambient { index });
            }
            if s.dim() != d {
                return Err(Violation::Dimension {
                    index,
                    expected: d,
                    found: s.dim(),
                });
            }
            if index > 0 && !self.spaces[index - 1].is_subspace_of(s) {
                return Err(Violation::Nesting { index });
            }
        }
        if !is_isotropic(self.top()) {
            return Err(Violation::NotIsotropic);
        }
        Ok(())
    }

    pub fn act(&self, g: &GroupElement<F>) -> Result<Self> {
        Ok(FlagChain {
            spaces: self.spaces.iter().map(|s| g.apply(s)).collect::<Result<_>>()?,
        })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.spaces.iter().map(|s| s.to_json()).collect())
    }

    pub fn from_json(f: &F, v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("chain must be an array".into()))?;
        Ok(FlagChain {
            spaces: arr.iter().map(|s| Subspace::from_json(f, s)).collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlagTuple<F: Field> {
    n: usize,
    chains: Vec<FlagChain<F>>,
}

impl<F: Field> FlagTuple<F> {
    pub fn new(n: usize, chains: Vec<FlagChain<F>>) -> Result<Self> {
        for c in &chains {
            for s in c.spaces() {
                if s.ambient() != 2 * n {
                    return Err(Error::AmbientMismatch(s.ambient(), 2 * n));
                }
            }
        }
        Ok(FlagTuple { n, chains })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn chains(&self) -> &[FlagChain<F>] {
        &self.chains
    }

    pub fn validate(&self, comps: &[Composition]) -> std::result::Result<(), (usize, Violation)> {
        if comps.len() != self.chains.len() {
            return Err((
                0,
                Violation::Length {
                    expected: comps.len(),
                    found: self.chains.len(),
                },
            ));
        }
        for (i, (c, a)) in self.chains.iter().zip(comps).enumerate() {
            c.validate(a, 2 * self.n).map_err(|v| (i, v))?;
        }
        Ok(())
    }

    pub fn compositions(&self) -> Result<Vec<Composition>> {
        self.chains.iter().map(|c| c.composition()).collect()
    }

    pub fn act(&self, g: &GroupElement<F>) -> Result<Self> {
        if g.n() != self.n {
            return Err(Error::AmbientMismatch(2 * g.n(), 2 * self.n));
        }
        Ok(FlagTuple {
            n: self.n,
            chains: self.chains.iter().map(|c| c.act(g)).collect::<Result<_>>()?,
        })
    }

    pub fn to_json(&self) -> Value {
        let q = self
            .chains
            .first()
            .map(|c| c.top().field().descriptor())
            .unwrap_or(Value::Null);
        json!({
            "n": self.n,
            "q": q,
            "chains": self.chains.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(f: &F, v: &Value) -> Result<Self> {
        let n = v["n"].as_u64().ok_or_else(|| Error::Parse("missing n".into()))? as usize;
        let chains = v["chains"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing chains".into()))?
            .iter()
            .map(|c| FlagChain::from_json(f, c))
            .collect::<Result<_>>()?;
        Self::new(n, chains)
    }
}

fn qpow(q: u128, e: usize) -> u128 {
    q.pow(e as u32)
}

/// Gaussian binomial [m choose k]_q.
pub fn gaussian_binomial(m: usize, k: usize, q: u128) -> u128 {
    if k > m {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= qpow(q, m - i) - 1;
        den *= qpow(q, i + 1) - 1;
    }
    num / den
}

/// Number of totally isotropic k-subspaces of the split 2n-space over GF(q).
pub fn isotropic_count(n: usize, k: usize, q: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut c = gaussian_binomial(n, k, q);
    for i in 0..k {
        c *= qpow(q, n - 1 - i) + 1;
    }
    c
}

/// |M_a| over GF(q).
pub fn flag_count(n: usize, a: &Composition, q: u128) -> u128 {
    let top = a.total();
    let mut c = isotropic_count(n, top, q);
    // flags of type (α_1..α_{p-1}) inside a fixed top space of dim |a|
    let mut remaining = top;
    for &p in a.parts().iter().rev() {
        c *= gaussian_binomial(remaining, p, q);
        remaining -= p;
    }
    c
}

/// Number of all (not necessarily isotropic) flags of type a in F^m.
pub fn linear_flag_count(m: usize, a: &Composition, q: u128) -> u128 {
    let mut c = gaussian_binomial(m, a.total(), q);
    let mut remaining = a.total();
    for &p in a.parts().iter().rev() {
        c *= gaussian_binomial(remaining, p, q);
        remaining -= p;
    }
    c
}

/// Vectors of `s` enumerated as all combinations of its basis.
fn all_vectors(s: &Subspace<Fp>) -> Vec<Vec<u32>> {
    let f = s.field();
    let p = f.p();
    let k = s.dim();
    let m = s.ambient();
    let total = (p as u64).pow(k as u32);
    let mut out = Vec::with_capacity(total as usize);
    let mut coeffs = vec![0u32; k];
    for _ in 0..total {
        let mut v = vec![0u32; m];
        for (r, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, b) in s.basis().row(r).iter().enumerate() {
                if *b != 0 {
                    v[j] = f.add(&v[j], &f.mul(&c, b));
                }
            }
        }
        out.push(v);
        for c in coeffs.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
    out
}

/// One-step extensions S + Fv with v reduced modulo S, normalized, and (optionally) isotropic and ⊥ S.
fn one_step_extensions(s: &Subspace<Fp>, isotropic: bool) -> Vec<Subspace<Fp>> {
    let f = s.field();
    let m = s.ambient();
    let pivots: Vec<usize> = s.pivots();
    let search = if isotropic { perp(s) } else { Subspace::full(f, m) };
    let mut out = Vec::new();
    for v in all_vectors(&search) {
        let Some(lead) = v.iter().position(|&x| x != 0) else {
            continue;
        };
        if v[lead] != 1 || pivots.iter().any(|&p| v[p - 1] != 0) {
            continue;
        }
        if isotropic && pairing(f, &v, &v) != 0 {
            continue;
        }
        let mut rows = s.basis_vectors();
        rows.push(v);
        out.push(Subspace::from_vectors(f, m, rows).expect("consistent rows"));
    }
    out
}

/// All (isotropic, when `isotropic`) subspaces of dimension dim S + k containing S.
pub fn superspaces(s: &Subspace<Fp>, k: usize, isotropic: bool) -> Vec<Subspace<Fp>> {
    let mut level: Vec<Subspace<Fp>> = vec![s.clone()];
    for _ in 0..k {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for t in &level {
            for u in one_step_extensions(t, isotropic) {
                if seen.insert(u.clone()) {
                    next.push(u);
                }
            }
        }
        level = next;
    }
    level.sort_by(|a, b| a.basis().data().cmp(b.basis().data()));
    level
}

fn enumerate_chains(f: &Fp, m: usize, a: &Composition, isotropic: bool) -> Vec<FlagChain<Fp>> {
    let mut chains: Vec<Vec<Subspace<Fp>>> = vec![vec![]];
    for &p in a.parts() {
        let mut next = Vec::new();
        for c in &chains {
            let base = c.last().cloned().unwrap_or_else(|| Subspace::zero(f, m));
            for s in superspaces(&base, p, isotropic) {
                let mut c2 = c.clone();
                c2.push(s);
                next.push(c2);
            }
        }
        chains = next;
    }
    chains.into_iter().map(FlagChain::new).collect()
}

/// Every flag of M_a over GF(q) in F^{2n}, each once, in a deterministic order.
pub fn enumerate(n: usize, f: &Fp, a: &Composition, budget: u128) -> Result<Vec<FlagChain<Fp>>> {
    if a.total() > n {
        return Err(Error::BadComposition(format!("{a} exceeds n = {n}")));
    }
    let projected = flag_count(n, a, f.order() as u128);
    if projected > budget {
        return Err(Error::Budget { projected, budget });
    }
    Ok(enumerate_chains(f, 2 * n, a, true))
}

/// Every flag of type a in F^m with no isotropy condition.
pub fn enumerate_linear(m: usize, f: &Fp, a: &Composition, budget: u128) -> Result<Vec<FlagChain<Fp>>> {
    if a.total() > m {
        return Err(Error::BadComposition(format!("{a} exceeds m = {m}")));
    }
    let projected = linear_flag_count(m, a, f.order() as u128);
    if projected > budget {
        return Err(Error::Budget { projected, budget });
    }
    Ok(enumerate_chains(f, m, a, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::w;

    #[test]
    fn composition_parsing_and_dims() {
        let c = Composition::parse("(1,1,1,4)").unwrap();
        assert_eq!(c.dims(), vec![1, 2, 3, 7]);
        assert_eq!(c.to_string(), "(1,1,1,4)");
        assert!(Composition::parse("(1,,2)").is_err());
        assert!(Composition::new(vec![0, 1]).is_err());
        assert!(Composition::for_rank(vec![2, 2], 3).is_err());
        let t = parse_tuple("(7)|(4)|(1,1,1,4)").unwrap();
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn validation_examples() {
        let f = Fp::new(3).unwrap();
        let a = Composition::parse("(1,1)").unwrap();
        let good = FlagChain::new(vec![
            Subspace::coordinate(&f, 6, &[1]),
            Subspace::coordinate(&f, 6, &[1, 2]),
        ]);
        assert_eq!(good.validate(&a, 6), Ok(()));
        let bad = FlagChain::new(vec![
            Subspace::coordinate(&f, 6, &[1]),
            Subspace::coordinate(&f, 6, &[1, 6]),
        ]);
        assert_eq!(bad.validate(&a, 6), Err(Violation::NotIsotropic));
        let dims = FlagChain::new(vec![
            Subspace::coordinate(&f, 6, &[1]),
            Subspace::coordinate(&f, 6, &[1, 2, 3]),
        ]);
        assert!(matches!(dims.validate(&a, 6), Err(Violation::Dimension { index: 1, .. })));
    }

    #[test]
    fn counts_match_formulas() {
        assert_eq!(isotropic_count(2, 2, 3), 8);
        assert_eq!(isotropic_count(2, 1, 3), 16);
        assert_eq!(isotropic_count(3, 3, 3), 80);
        assert_eq!(isotropic_count(3, 3, 5), 312);
        assert_eq!(isotropic_count(3, 1, 5), 806);
        assert_eq!(isotropic_count(3, 2, 5), 4836);
        assert_eq!(flag_count(3, &Composition::parse("(1,1)").unwrap(), 5), 29016);
        assert_eq!(linear_flag_count(4, &Composition::parse("(1,1,1)").unwrap(), 5), 29016);
    }

    #[test]
    fn enumeration_examples() {
        let f = Fp::new(3).unwrap();
        let e = |n, s: &str| enumerate(n, &f, &Composition::parse(s).unwrap(), DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(e(2, "(2)").len(), 8);
        assert_eq!(e(2, "(1)").len(), 16);
        assert_eq!(e(3, "(3)").len(), 80);
        assert_eq!(e(3, "(1,2)").len() as u128, flag_count(3, &Composition::parse("(1,2)").unwrap(), 3));
        let small = enumerate(3, &f, &Composition::parse("(3)").unwrap(), 10);
        assert!(matches!(small, Err(Error::Budget { projected: 80, .. })));
    }

    #[test]
    fn w1_moves_u0_chain_to_cell_one() {
        let f = Fp::new(5).unwrap();
        let u0 = FlagChain::single(Subspace::coordinate(&f, 6, &[1, 2, 3]));
        let img = u0.act(&w(&f, 3, 1).unwrap()).unwrap();
        assert_eq!(crate::geometry::bruhat_cell(img.top()).unwrap(), 1);
    }
}
