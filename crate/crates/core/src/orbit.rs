//! Exact orbit computations over GF(q): BFS orbits with spanning trees, bidirectional
//! same-orbit tests, union-find censuses of enumerated flag spaces, and invariant signatures.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::canonical::{normalize_pair, sp_prime_transvection};
use crate::error::{Error, Result};
use crate::field::{Field, Fp};
use crate::flags::{enumerate, enumerate_linear, Composition, FlagChain, FlagTuple};
use crate::geometry::{coordinate_stabilizer_generators, perp, GroupElement};
use crate::matrix::Matrix;
use crate::subspace::Subspace;

/// Default cap on stored tuples per job.
pub const DEFAULT_BUDGET: usize = 50_000_000;

/// The tuple budget, overridable through `FLAGTYPE_BUDGET`.
pub fn budget_from_env() -> usize {
    std::env::var("FLAGTYPE_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

fn push_space(key: &mut Vec<u32>, s: &Subspace<Fp>) {
    key.push(s.dim() as u32);
    key.extend_from_slice(s.basis().data());
}

/// Canonical key of a chain: each space as its dimension followed by its RREF entries.
pub fn chain_key(c: &FlagChain<Fp>) -> Vec<u32> {
    let mut key = vec![c.spaces().len() as u32];
    for s in c.spaces() {
        push_space(&mut key, s);
    }
    key
}

pub fn tuple_key(t: &FlagTuple<Fp>) -> Vec<u32> {
    let mut key = Vec::new();
    for c in t.chains() {
        key.extend(chain_key(c));
    }
    key
}

fn field_of(t: &FlagTuple<Fp>) -> Result<Fp> {
    t.chains()
        .first()
        .and_then(|c| c.spaces().first())
        .map(|s| *s.field())
        .ok_or_else(|| Error::Shape("empty flag tuple".into()))
}

/// Maps keys to dense indices in insertion order.
#[derive(Default)]
pub struct Interner {
    map: HashMap<Vec<u32>, u32>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `key`, and whether it was new.
    pub fn intern(&mut self, key: Vec<u32>) -> (u32, bool) {
        let next = self.map.len() as u32;
        match self.map.entry(key) {
            std::collections::hash_map::Entry::Occupied(e) => (*e.get(), false),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(next);
                (next, true)
            }
        }
    }

    pub fn get(&self, key: &[u32]) -> Option<u32> {
        self.map.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// A BFS tree: members in discovery order, each with the (parent, generator) that reached it.
struct SearchTree {
    members: Vec<FlagTuple<Fp>>,
    parent: Vec<Option<(u32, u32)>>,
    index: Interner,
    frontier: Vec<u32>,
}

impl SearchTree {
    fn new(start: &FlagTuple<Fp>) -> Self {
        let mut index = Interner::new();
        index.intern(tuple_key(start));
        SearchTree {
            members: vec![start.clone()],
            parent: vec![None],
            index,
            frontier: vec![0],
        }
    }

    /// Expands one level; returns indices of the new members.
    fn expand(&mut self, gens: &[GroupElement<Fp>]) -> Result<Vec<u32>> {
        let mut fresh = Vec::new();
        let frontier = std::mem::take(&mut self.frontier);
        for &i in &frontier {
            for (k, g) in gens.iter().enumerate() {
                let y = self.members[i as usize].act(g)?;
                let (j, new) = self.index.intern(tuple_key(&y));
                if new {
                    self.members.push(y);
                    self.parent.push(Some((i, k as u32)));
                    fresh.push(j);
                }
            }
        }
        self.frontier = fresh.clone();
        Ok(fresh)
    }

    fn element(&self, mut i: u32, gens: &[GroupElement<Fp>], f: &Fp, n: usize) -> GroupElement<Fp> {
        let mut word = Vec::new();
        while let Some((p, k)) = self.parent[i as usize] {
            word.push(k);
            i = p;
        }
        let mut g = GroupElement::identity(f, n);
        for &k in word.iter().rev() {
            g = gens[k as usize].compose(&g);
        }
        g
    }
}

/// The orbit of a tuple with a spanning tree of generator words.
pub struct Orbit {
    tree: SearchTree,
    gens: Vec<GroupElement<Fp>>,
    field: Fp,
    n: usize,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.tree.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.members.is_empty()
    }

    /// Members in BFS discovery order (deterministic for a fixed generator list).
    pub fn members(&self) -> &[FlagTuple<Fp>] {
        &self.tree.members
    }

    pub fn position(&self, t: &FlagTuple<Fp>) -> Option<usize> {
        self.tree.index.get(&tuple_key(t)).map(|i| i as usize)
    }

    /// An element g with g·start = members()[i].
    pub fn element_to(&self, i: usize) -> GroupElement<Fp> {
        self.tree.element(i as u32, &self.gens, &self.field, self.n)
    }
}

/// Full BFS orbit of `start` under the group generated by `gens`.
pub fn orbit(start: &FlagTuple<Fp>, gens: &[GroupElement<Fp>], budget: usize) -> Result<Orbit> {
    let field = field_of(start)?;
    let mut tree = SearchTree::new(start);
    while !tree.frontier.is_empty() {
        tree.expand(gens)?;
        if tree.members.len() > budget {
            return Err(Error::Budget {
                projected: tree.members.len() as u128,
                budget: budget as u128,
            });
        }
    }
    Ok(Orbit {
        tree,
        gens: gens.to_vec(),
        field,
        n: start.n(),
    })
}

/// Outcome of a same-orbit test.
#[derive(Clone, Debug)]
pub enum Connection {
    /// g with g·x = y, verified.
    Same(GroupElement<Fp>),
    Distinct,
    Infeasible { explored: usize },
}

impl Connection {
    pub fn is_same(&self) -> bool {
        matches!(self, Connection::Same(_))
    }
    pub fn is_distinct(&self) -> bool {
        matches!(self, Connection::Distinct)
    }
}

/// Bidirectional BFS between x and y; whichever side closes its orbit first proves `Distinct`.
pub fn same_orbit(
    x: &FlagTuple<Fp>,
    y: &FlagTuple<Fp>,
    gens: &[GroupElement<Fp>],
    budget: usize,
) -> Result<Connection> {
    let f = field_of(x)?;
    let n = x.n();
    if tuple_key(x) == tuple_key(y) {
        return Ok(Connection::Same(GroupElement::identity(&f, n)));
    }
    let mut tx = SearchTree::new(x);
    let mut ty = SearchTree::new(y);
    loop {
        if tx.frontier.is_empty() || ty.frontier.is_empty() {
            return Ok(Connection::Distinct);
        }
        let x_side = tx.members.len() <= ty.members.len();
        let (grow, other) = if x_side { (&mut tx, &ty) } else { (&mut ty, &tx) };
        let fresh = grow.expand(gens)?;
        for i in fresh {
            let key = tuple_key(&grow.members[i as usize]);
            if let Some(j) = other.index.get(&key) {
                let (ix, iy) = if x_side { (i, j) } else { (j, i) };
                let a = tx.element(ix, gens, &f, n);
                let b = ty.element(iy, gens, &f, n);
                let g = b.inverse().compose(&a);
                if x.act(&g)? != *y {
                    return Err(Error::Verification("connecting element does not map x to y".into()));
                }
                return Ok(Connection::Same(g));
            }
        }
        if tx.members.len() + ty.members.len() > budget {
            return Ok(Connection::Infeasible {
                explored: tx.members.len() + ty.members.len(),
            });
        }
    }
}

/// Same-orbit test for the full group O_{2n}(GF(q)).
///
/// Two top spaces are first moved to the standard pair of their relative position, so the
/// remaining search runs under the stabilizer of two coordinate subspaces.
pub fn same_orbit_in_group(x: &FlagTuple<Fp>, y: &FlagTuple<Fp>, budget: usize) -> Result<Connection> {
    let f = field_of(x)?;
    let n = x.n();
    if x.n() != y.n() || x.compositions()? != y.compositions()? || signature(x)? != signature(y)? {
        return Ok(Connection::Distinct);
    }
    let tops: Vec<&Subspace<Fp>> = x.chains().iter().map(|c| c.top()).collect();
    let (i, j) = if tops.len() < 2 {
        (0, None)
    } else {
        let mut best = (0, 1);
        for a in 0..tops.len() {
            for b in a + 1..tops.len() {
                if tops[a].dim() + tops[b].dim() > tops[best.0].dim() + tops[best.1].dim() {
                    best = (a, b);
                }
            }
        }
        (best.0, Some(best.1))
    };
    let pair = |t: &FlagTuple<Fp>| -> (Subspace<Fp>, Subspace<Fp>) {
        let a = t.chains()[i].top().clone();
        let b = match j {
            Some(j) => t.chains()[j].top().clone(),
            None => Subspace::zero(&f, 2 * n),
        };
        (a, b)
    };
    let (ax, bx) = pair(x);
    let (ay, by) = pair(y);
    let gx = normalize_pair(&ax, &bx)?;
    let gy = normalize_pair(&ay, &by)?;
    let xs = x.act(&gx)?;
    let ys = y.act(&gy)?;
    let (sa, sb) = (gx.apply(&ax)?, gx.apply(&bx)?);
    let gens = coordinate_stabilizer_generators(n, &f, &[sa.pivots(), sb.pivots()]);
    Ok(match same_orbit(&xs, &ys, &gens, budget)? {
        Connection::Same(r) => {
            let g = gy.inverse().compose(&r).compose(&gx);
            if x.act(&g)? != *y {
                return Err(Error::Verification("normalized connection failed".into()));
            }
            Connection::Same(g)
        }
        other => other,
    })
}

/// A G-invariant integer vector: dimensions of every constituent space, of the pairwise
/// intersections among the spaces and their perps, and of (A∩B)+C over ordered triples of
/// constituent spaces.
pub fn signature<F: Field>(x: &FlagTuple<F>) -> Result<Vec<i64>> {
    let spaces: Vec<Subspace<F>> = x.chains().iter().flat_map(|c| c.spaces().iter().cloned()).collect();
    let mut all = spaces.clone();
    all.extend(spaces.iter().map(perp));
    let mut sig: Vec<i64> = all.iter().map(|s| s.dim() as i64).collect();
    let mut meets = vec![vec![None; all.len()]; all.len()];
    for a in 0..all.len() {
        for b in a + 1..all.len() {
            let m = all[a].meet(&all[b])?;
            sig.push(m.dim() as i64);
            meets[a][b] = Some(m);
        }
    }
    let k = spaces.len();
    for a in 0..k {
        for b in a + 1..k {
            let m = meets[a][b].as_ref().expect("computed above");
            for (c, s) in spaces.iter().enumerate() {
                if c != a && c != b {
                    sig.push(m.join(s)?.dim() as i64);
                }
            }
        }
    }
    Ok(sig)
}

fn act_chain(c: &FlagChain<Fp>, g: &Matrix<Fp>) -> Result<FlagChain<Fp>> {
    Ok(FlagChain::new(c.spaces().iter().map(|s| s.image(g)).collect::<Result<_>>()?))
}

/// Exact orbit partition of a product of enumerated flag spaces.
#[derive(Clone, Debug)]
pub struct OrbitCensus {
    pub ambient: usize,
    pub q: u32,
    pub compositions: Vec<Composition>,
    /// The flag held fixed in the first factor, when the census was reduced that way.
    pub fixed_first: Option<FlagChain<Fp>>,
    pub generator_set: String,
    pub total: u64,
    pub orbit_count: usize,
    /// One entry per orbit, in order of the orbits' first enumerated member.
    pub orbit_sizes: Vec<u64>,
    pub representatives: Vec<Vec<FlagChain<Fp>>>,
    /// Per-orbit signatures; empty for censuses in F^m without the split form.
    pub signatures: Vec<Vec<i64>>,
}

impl OrbitCensus {
    /// (size, multiplicity) pairs, ascending in size.
    pub fn size_histogram(&self) -> Vec<(u64, usize)> {
        let mut h: std::collections::BTreeMap<u64, usize> = Default::default();
        for &s in &self.orbit_sizes {
            *h.entry(s).or_default() += 1;
        }
        h.into_iter().collect()
    }

    pub fn descriptor(&self) -> String {
        self.compositions.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ambient": self.ambient,
            "q": self.q,
            "space": self.descriptor(),
            "fixed_first": self.fixed_first.as_ref().map(|c| c.to_json()),
            "generator_set": self.generator_set,
            "total": self.total,
            "orbit_count": self.orbit_count,
            "orbit_sizes": self.orbit_sizes,
            "representatives": self.representatives.iter()
                .map(|r| r.iter().map(|c| c.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "signatures": self.signatures,
        })
    }

    pub const CSV_HEADER: &'static str = "space,ambient,q,generator_set,fixed_first,total,orbit_count,size_histogram";

    pub fn to_csv_row(&self) -> String {
        let hist = self
            .size_histogram()
            .iter()
            .map(|(s, m)| format!("{s}x{m}"))
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            "\"{}\",{},{},{},{},{},{},{}",
            self.descriptor(),
            self.ambient,
            self.q,
            self.generator_set,
            self.fixed_first.is_some(),
            self.total,
            self.orbit_count,
            hist
        )
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller index wins, so roots are first-enumerated members
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// The permutation of each factor induced by each generator.
fn permutation_tables(factors: &[Vec<FlagChain<Fp>>], gens: &[Matrix<Fp>]) -> Result<Vec<Vec<Vec<u32>>>> {
    let interners: Vec<HashMap<Vec<u32>, u32>> = factors
        .iter()
        .map(|fl| fl.iter().enumerate().map(|(i, c)| (chain_key(c), i as u32)).collect())
        .collect();
    gens.iter()
        .map(|g| {
            factors
                .iter()
                .zip(&interners)
                .map(|(fl, idx)| {
                    fl.iter()
                        .map(|c| {
                            let image = act_chain(c, g)?;
                            idx.get(&chain_key(&image)).copied().ok_or_else(|| {
                                Error::Verification("generator does not preserve the enumerated space".into())
                            })
                        })
                        .collect::<Result<Vec<u32>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

fn product_size(factors: &[Vec<FlagChain<Fp>>], budget: usize) -> Result<usize> {
    let total: u128 = factors.iter().map(|f| f.len() as u128).product();
    if total > budget as u128 {
        return Err(Error::Budget {
            projected: total,
            budget: budget as u128,
        });
    }
    Ok(total as usize)
}

fn decode(mut idx: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for i in (0..radices.len()).rev() {
        out[i] = idx % radices[i];
        idx /= radices[i];
    }
    out
}

/// Orbit ids per product index, via union-find over generator images.
fn partition(factors: &[Vec<FlagChain<Fp>>], tables: &[Vec<Vec<u32>>], total: usize) -> Vec<u32> {
    let radices: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let mut uf = UnionFind::new(total);
    let mut digits = vec![0usize; radices.len()];
    for idx in 0..total {
        for table in tables {
            let mut image = 0usize;
            for (d, (&x, t)) in digits.iter().zip(table).enumerate() {
                image = image * radices[d] + t[x] as usize;
            }
            uf.union(idx as u32, image as u32);
        }
        for d in (0..radices.len()).rev() {
            digits[d] += 1;
            if digits[d] < radices[d] {
                break;
            }
            digits[d] = 0;
        }
    }
    (0..total as u32).map(|i| uf.find(i)).collect()
}

/// Orbit ids per product index, via BFS from each unvisited index.
fn partition_bfs(factors: &[Vec<FlagChain<Fp>>], tables: &[Vec<Vec<u32>>], total: usize) -> Vec<u32> {
    let radices: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let mut root = vec![u32::MAX; total];
    for start in 0..total {
        if root[start] != u32::MAX {
            continue;
        }
        root[start] = start as u32;
        let mut stack = vec![start];
        while let Some(idx) = stack.pop() {
            let digits = decode(idx, &radices);
            for table in tables {
                let mut image = 0usize;
                for (d, (&x, t)) in digits.iter().zip(table).enumerate() {
                    image = image * radices[d] + t[x] as usize;
                }
                if root[image] == u32::MAX {
                    root[image] = start as u32;
                    stack.push(image);
                }
            }
        }
    }
    root
}

/// Which partition algorithm a census uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    UnionFind,
    Bfs,
}

/// Census of the product of `factors` (flags in F^{ambient}) under the matrices `gens`.
#[allow(clippy::too_many_arguments)]
pub fn census_of_factors(
    ambient: usize,
    f: &Fp,
    compositions: Vec<Composition>,
    factors: Vec<Vec<FlagChain<Fp>>>,
    gens: &[Matrix<Fp>],
    generator_set: &str,
    fixed_first: Option<FlagChain<Fp>>,
    method: Method,
    budget: usize,
    orthogonal: bool,
) -> Result<OrbitCensus> {
    let total = product_size(&factors, budget)?;
    let tables = permutation_tables(&factors, gens)?;
    let roots = match method {
        Method::UnionFind => partition(&factors, &tables, total),
        Method::Bfs => partition_bfs(&factors, &tables, total),
    };
    let radices: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let mut id_of_root: HashMap<u32, usize> = HashMap::new();
    let mut sizes: Vec<u64> = Vec::new();
    let mut reps: Vec<Vec<FlagChain<Fp>>> = Vec::new();
    for (idx, &r) in roots.iter().enumerate() {
        let id = *id_of_root.entry(r).or_insert_with(|| {
            sizes.push(0);
            let digits = decode(idx, &radices);
            reps.push(digits.iter().zip(&factors).map(|(&d, fl)| fl[d].clone()).collect());
            sizes.len() - 1
        });
        sizes[id] += 1;
    }
    let signatures = if orthogonal {
        reps.iter()
            .map(|r| signature(&FlagTuple::new(ambient / 2, r.clone())?))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(OrbitCensus {
        ambient,
        q: f.p(),
        compositions,
        fixed_first,
        generator_set: generator_set.to_string(),
        total: total as u64,
        orbit_count: sizes.len(),
        orbit_sizes: sizes,
        representatives: reps,
        signatures,
    })
}

/// Census of M_{a_1} × ... × M_{a_k} in F^{2n} under `gens`.
pub fn census(
    n: usize,
    f: &Fp,
    comps: &[Composition],
    gens: &[GroupElement<Fp>],
    generator_set: &str,
    budget: usize,
) -> Result<OrbitCensus> {
    let factors = comps
        .iter()
        .map(|a| enumerate(n, f, a, budget as u128))
        .collect::<Result<Vec<_>>>()?;
    let mats: Vec<Matrix<Fp>> = gens.iter().map(|g| g.mat().clone()).collect();
    census_of_factors(2 * n, f, comps.to_vec(), factors, &mats, generator_set, None, Method::UnionFind, budget, true)
}

/// The standard flag U_[d_1] ⊂ U_[d_2] ⊂ ... of type `a`.
pub fn standard_flag(n: usize, f: &Fp, a: &Composition) -> FlagChain<Fp> {
    FlagChain::new(
        a.dims()
            .iter()
            .map(|&d| Subspace::coordinate(f, 2 * n, &(1..=d).collect::<Vec<_>>()))
            .collect(),
    )
}

/// Number of G-orbits on a single factor, used to verify transitivity before reducing.
pub fn factor_orbit_count(n: usize, f: &Fp, a: &Composition, gens: &[GroupElement<Fp>], budget: usize) -> Result<usize> {
    let fl = enumerate(n, f, a, budget as u128)?;
    let mats: Vec<Matrix<Fp>> = gens.iter().map(|g| g.mat().clone()).collect();
    let factors = vec![fl];
    let tables = permutation_tables(&factors, &mats)?;
    let roots = partition(&factors, &tables, factors[0].len());
    let mut r = roots.clone();
    r.sort_unstable();
    r.dedup();
    Ok(r.len())
}

/// Census under the full group with the first factor fixed at its standard flag; the
/// remaining factors are acted on by that flag's stabilizer. Transitivity of `group_gens` on
/// the first factor is checked first.
pub fn census_fix_first(
    n: usize,
    f: &Fp,
    comps: &[Composition],
    group_gens: &[GroupElement<Fp>],
    method: Method,
    budget: usize,
) -> Result<OrbitCensus> {
    let first = comps.first().ok_or_else(|| Error::BadComposition("empty tuple".into()))?;
    let orbits = factor_orbit_count(n, f, first, group_gens, budget)?;
    if orbits != 1 {
        return Err(Error::Hypothesis(format!("group is not transitive on the first factor ({orbits} orbits)")));
    }
    let fixed = standard_flag(n, f, first);
    let sets: Vec<Vec<usize>> = first.dims().iter().map(|&d| (1..=d).collect()).collect();
    let stab = coordinate_stabilizer_generators(n, f, &sets);
    for g in &stab {
        if fixed.act(g)? != fixed {
            return Err(Error::Verification("stabilizer generator moves the fixed flag".into()));
        }
    }
    let mut factors = vec![vec![fixed.clone()]];
    for a in &comps[1..] {
        factors.push(enumerate(n, f, a, budget as u128)?);
    }
    let mats: Vec<Matrix<Fp>> = stab.iter().map(|g| g.mat().clone()).collect();
    census_of_factors(2 * n, f, comps.to_vec(), factors, &mats, "stabilizer of the first flag", Some(fixed), method, budget, true)
}

/// Every element of the group generated by `gens`, by closure; `limit` caps the size.
pub fn materialize_group(gens: &[GroupElement<Fp>], limit: usize) -> Result<Vec<GroupElement<Fp>>> {
    let g0 = gens.first().ok_or_else(|| Error::Shape("no generators".into()))?;
    let f = *g0.mat().field();
    let id = GroupElement::identity(&f, g0.n());
    let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
    seen.insert(id.mat().data().to_vec(), ());
    let mut all = vec![id];
    let mut next = 0;
    while next < all.len() {
        let x = all[next].clone();
        next += 1;
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.mat().data().to_vec(), ()).is_none() {
                all.push(y);
                if all.len() > limit {
                    return Err(Error::Budget {
                        projected: all.len() as u128,
                        budget: limit as u128,
                    });
                }
            }
        }
    }
    Ok(all)
}

/// Order of the matrix group generated by `gens`, by closure; `limit` caps the size.
pub fn matrix_group_order(gens: &[Matrix<Fp>], limit: usize) -> Result<usize> {
    let g0 = gens.first().ok_or_else(|| Error::Shape("no generators".into()))?;
    let id = Matrix::identity(g0.field(), g0.rows());
    let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
    seen.insert(id.data().to_vec(), ());
    let mut queue = vec![id];
    let mut next = 0;
    while next < queue.len() {
        let x = queue[next].clone();
        next += 1;
        for g in gens {
            let y = g.mul(&x)?;
            if seen.insert(y.data().to_vec(), ()).is_none() {
                queue.push(y);
                if queue.len() > limit {
                    return Err(Error::Budget {
                        projected: queue.len() as u128,
                        budget: limit as u128,
                    });
                }
            }
        }
    }
    Ok(queue.len())
}

/// Generators of the block upper triangular subgroup of GL_m with diagonal blocks of the
/// given sizes: elementary transvections I + E_ij allowed by the block shape, and the
/// primitive-root scalings of each coordinate.
pub fn gl_parabolic_generators(f: &Fp, blocks: &[usize]) -> Vec<Matrix<Fp>> {
    let m: usize = blocks.iter().sum();
    let mut block_of = Vec::with_capacity(m);
    for (b, &size) in blocks.iter().enumerate() {
        block_of.extend(std::iter::repeat(b).take(size));
    }
    let mut gens = Vec::new();
    for i in 0..m {
        let mut d = Matrix::identity(f, m);
        d.set(i, i, f.primitive_root());
        gens.push(d);
        for j in 0..m {
            if i != j && block_of[i] <= block_of[j] {
                let mut e = Matrix::identity(f, m);
                e.set(i, j, 1);
                gens.push(e);
            }
        }
    }
    gens
}

/// Generators of Sp′_{2m}: transvections along every nonzero 0/1 vector with coefficients 1
/// and the primitive root.
pub fn sp_prime_generators(f: &Fp, m: usize) -> Vec<Matrix<Fp>> {
    let size = 2 * m;
    let mut gens = Vec::new();
    for mask in 1u32..(1 << size) {
        let v: Vec<u32> = (0..size).map(|i| (mask >> i) & 1).collect();
        for c in [1, f.primitive_root()] {
            gens.push(sp_prime_transvection(f, &v, &c));
        }
    }
    gens
}

/// Census of products of linear flag varieties of F^m under the matrices `gens`.
pub fn linear_census(
    m: usize,
    f: &Fp,
    comps: &[Composition],
    gens: &[Matrix<Fp>],
    generator_set: &str,
    budget: usize,
) -> Result<OrbitCensus> {
    let factors = comps
        .iter()
        .map(|a| enumerate_linear(m, f, a, budget as u128))
        .collect::<Result<Vec<_>>>()?;
    census_of_factors(m, f, comps.to_vec(), factors, gens, generator_set, None, Method::UnionFind, budget, false)
}

/// |O_{2n}(GF(q))| = 2 q^{n(n-1)} (q^n - 1) ∏_{i<n} (q^{2i} - 1).
pub fn orthogonal_group_order(n: usize, q: u128) -> u128 {
    let mut o = 2 * q.pow((n * (n - 1)) as u32) * (q.pow(n as u32) - 1);
    for i in 1..n {
        o *= q.pow(2 * i as u32) - 1;
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{group_generators, parabolic_generators, so_generators, u_d};

    fn single(s: Subspace<Fp>, n: usize) -> FlagTuple<Fp> {
        FlagTuple::new(n, vec![FlagChain::single(s)]).unwrap()
    }

    #[test]
    fn orbit_of_u0_is_all_maximal_isotropics() {
        let f = Fp::new(3).unwrap();
        let x = single(u_d(&f, 2, 0).unwrap(), 2);
        let o = orbit(&x, &group_generators(2, &f), 1000).unwrap();
        assert_eq!(o.len(), 8);
        for (i, m) in o.members().iter().enumerate() {
            assert_eq!(x.act(&o.element_to(i)).unwrap(), *m);
        }
        assert_eq!(orbit(&x, &[], 10).unwrap().len(), 1);
    }

    #[test]
    fn parity_separates_u0_and_u1_under_so() {
        let f = Fp::new(3).unwrap();
        let x = single(u_d(&f, 2, 0).unwrap(), 2);
        let y = single(u_d(&f, 2, 1).unwrap(), 2);
        assert!(same_orbit(&x, &y, &so_generators(2, &f), 1000).unwrap().is_distinct());
        assert!(same_orbit(&x, &y, &group_generators(2, &f), 1000).unwrap().is_same());
        assert!(same_orbit(&x, &x, &[], 10).unwrap().is_same());
    }

    #[test]
    fn bruhat_census_small() {
        let f = Fp::new(3).unwrap();
        let c = vec![Composition::new(vec![2]).unwrap()];
        let p = census(2, &f, &c, &parabolic_generators(2, &f), "P", 1000).unwrap();
        assert_eq!(p.orbit_count, 3);
        assert_eq!(p.orbit_sizes.iter().sum::<u64>(), p.total);
    }

    #[test]
    fn group_order_formula() {
        assert_eq!(orthogonal_group_order(2, 3), 1152);
        assert_eq!(orthogonal_group_order(1, 5), 8);
    }
}
