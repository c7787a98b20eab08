//! The split symmetric form (e_i, e_j) = δ_{i, 2n+1-j} on F^{2n}, the groups
//! O_{2n} ⊃ SO_{2n}, standard elements and generator sets.

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, Fp};
use crate::matrix::Matrix;
use crate::subspace::{kernel, unit, Subspace};

/// i ↦ 2n+1-i.
#[inline]
pub fn bar(n: usize, i: usize) -> usize {
    2 * n + 1 - i
}

pub fn pairing<F: Field>(f: &F, u: &[F::Elem], v: &[F::Elem]) -> F::Elem {
    let m = u.len();
    let mut acc = f.zero();
    for i in 0..m {
        let (a, b) = (&u[i], &v[m - 1 - i]);
        if !f.is_zero(a) && !f.is_zero(b) {
            acc = f.add(&acc, &f.mul(a, b));
        }
    }
    acc
}

/// The anti-diagonal Gram matrix.
pub fn gram<F: Field>(f: &F, n: usize) -> Matrix<F> {
    let mut g = Matrix::zeros(f, 2 * n, 2 * n);
    for i in 0..2 * n {
        g.set(i, 2 * n - 1 - i, f.one());
    }
    g
}

pub fn perp<F: Field>(s: &Subspace<F>) -> Subspace<F> {
    let f = s.field();
    let m = s.ambient();
    let mut rows = Matrix::zeros(f, s.dim(), m);
    for r in 0..s.dim() {
        let b = s.basis().row(r);
        for j in 0..m {
            rows.set(r, j, b[m - 1 - j].clone());
        }
    }
    kernel(&rows)
}

/// (A, B) = 0.
pub fn orthogonal<F: Field>(a: &Subspace<F>, b: &Subspace<F>) -> bool {
    let f = a.field();
    (0..a.dim()).all(|i| (0..b.dim()).all(|j| f.is_zero(&pairing(f, a.basis().row(i), b.basis().row(j)))))
}

pub fn is_isotropic<F: Field>(s: &Subspace<F>) -> bool {
    orthogonal(s, s)
}

pub fn is_maximal_isotropic<F: Field>(s: &Subspace<F>) -> bool {
    s.ambient() % 2 == 0 && s.dim() == s.ambient() / 2 && is_isotropic(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementClass {
    NotOrthogonal,
    InSO,
    InOMinusSO,
}

pub fn classify_element<F: Field>(mat: &Matrix<F>) -> ElementClass {
    let f = mat.field();
    if !mat.is_square() || mat.rows() % 2 != 0 {
        return ElementClass::NotOrthogonal;
    }
    let n = mat.rows() / 2;
    let j = gram(f, n);
    let lhs = mat.transpose().mul(&j).and_then(|x| x.mul(mat));
    if lhs.map(|x| x != j).unwrap_or(true) {
        return ElementClass::NotOrthogonal;
    }
    match mat.determinant() {
        Ok(d) if f.is_one(&d) => ElementClass::InSO,
        Ok(d) if d == f.neg(&f.one()) => ElementClass::InOMinusSO,
        _ => ElementClass::NotOrthogonal,
    }
}

/// An element of O_{2n}(F), verified on construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement<F: Field> {
    mat: Matrix<F>,
    det_sign: i8,
}

impl<F: Field> GroupElement<F> {
    pub fn new(mat: Matrix<F>) -> Result<Self> {
        let det_sign = match classify_element(&mat) {
            ElementClass::InSO => 1,
            ElementClass::InOMinusSO => -1,
            ElementClass::NotOrthogonal => return Err(Error::NotOrthogonal),
        };
        Ok(GroupElement { mat, det_sign })
    }

    pub(crate) fn new_unchecked(mat: Matrix<F>, det_sign: i8) -> Self {
        GroupElement { mat, det_sign }
    }

    pub fn identity(f: &F, n: usize) -> Self {
        GroupElement {
            mat: Matrix::identity(f, 2 * n),
            det_sign: 1,
        }
    }

    pub fn mat(&self) -> &Matrix<F> {
        &self.mat
    }
    pub fn det_sign(&self) -> i8 {
        self.det_sign
    }
    pub fn n(&self) -> usize {
        self.mat.rows() / 2
    }
    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Self {
        GroupElement {
            mat: self.mat.mul(&other.mat).expect("same size"),
            det_sign: self.det_sign * other.det_sign,
        }
    }

    /// g^{-1} = J g^T J.
    pub fn inverse(&self) -> Self {
        let f = self.mat.field();
        let j = gram(f, self.n());
        let inv = j
            .mul(&self.mat.transpose())
            .and_then(|x| x.mul(&j))
            .expect("same size");
        GroupElement {
            mat: inv,
            det_sign: self.det_sign,
        }
    }

    pub fn apply_vector(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        self.mat.mul_vec(v).expect("ambient checked")
    }

    pub fn apply(&self, s: &Subspace<F>) -> Result<Subspace<F>> {
        s.image(&self.mat)
    }

    pub fn to_json(&self) -> Value {
        json!({"det_sign": self.det_sign, "mat": self.mat.to_json()})
    }

    pub fn from_json(f: &F, v: &Value) -> Result<Self> {
        let rows = v["mat"].as_array().map_or(0, |r| r.len());
        Self::new(Matrix::from_json(f, &v["mat"], rows)?)
    }
}

/// w_d: swaps e_i and e_{2n+1-i} for n-d+1 ≤ i ≤ n+d.
pub fn w<F: Field>(f: &F, n: usize, d: usize) -> Result<GroupElement<F>> {
    if d > n {
        return Err(Error::OutOfRange(d));
    }
    let mut m = Matrix::zeros(f, 2 * n, 2 * n);
    for i in 1..=2 * n {
        let img = if i + d > n && i <= n + d { bar(n, i) } else { i };
        m.set(img - 1, i - 1, f.one());
    }
    Ok(GroupElement::new_unchecked(m, if d % 2 == 0 { 1 } else { -1 }))
}

/// J_n, the n×n anti-identity.
pub fn anti_identity<F: Field>(f: &F, n: usize) -> Matrix<F> {
    let mut j = Matrix::zeros(f, n, n);
    for i in 0..n {
        j.set(i, n - 1 - i, f.one());
    }
    j
}

/// ℓ(A) = diag(A, J_n A^{-T} J_n).
pub fn ell<F: Field>(a: &Matrix<F>) -> Result<GroupElement<F>> {
    if !a.is_square() {
        return Err(Error::Shape("ℓ(A) needs a square A".into()));
    }
    let f = a.field();
    let n = a.rows();
    let jn = anti_identity(f, n);
    let lower = jn.mul(&a.inverse()?.transpose())?.mul(&jn)?;
    let mut m = Matrix::zeros(f, 2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            m.set(r, c, a.get(r, c).clone());
            m.set(n + r, n + c, lower.get(r, c).clone());
        }
    }
    Ok(GroupElement::new_unchecked(m, 1))
}

/// U_d = span{e_1..e_{n-d}, e_{n+1}..e_{n+d}}.
pub fn u_d<F: Field>(f: &F, n: usize, d: usize) -> Result<Subspace<F>> {
    if d > n {
        return Err(Error::OutOfRange(d));
    }
    let idx: Vec<usize> = (1..=n - d).chain(n + 1..=n + d).collect();
    Ok(Subspace::coordinate(f, 2 * n, &idx))
}

/// U_[ℓ] = span{e_1..e_ℓ}.
pub fn u_prefix<F: Field>(f: &F, n: usize, l: usize) -> Subspace<F> {
    Subspace::coordinate(f, 2 * n, &(1..=l).collect::<Vec<_>>())
}

/// d = n - dim(V ∩ U_0).
pub fn bruhat_cell<F: Field>(v: &Subspace<F>) -> Result<usize> {
    if !is_maximal_isotropic(v) {
        return Err(Error::NotMaximalIsotropic);
    }
    let n = v.ambient() / 2;
    let u0 = u_d(v.field(), n, 0)?;
    Ok(n - v.meet(&u0)?.dim())
}

fn elementary<F: Field>(f: &F, n: usize, i: usize, j: usize) -> Matrix<F> {
    let mut a = Matrix::identity(f, n);
    a.set(i, j, f.one());
    a
}

fn torus_element(f: &Fp, n: usize, pos: usize) -> GroupElement<Fp> {
    let mut a = Matrix::identity(f, n);
    a.set(pos, pos, f.primitive_root());
    ell(&a).expect("invertible")
}

/// Unipotent radical elements I + (0 X; 0 0) with J_n X antisymmetric.
fn radical_basis(f: &Fp, n: usize) -> Vec<GroupElement<Fp>> {
    let jn = anti_identity(f, n);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut s = Matrix::zeros(f, n, n);
            s.set(a, b, 1);
            s.set(b, a, f.neg(&1));
            let x = jn.mul(&s).expect("square");
            let mut m = Matrix::identity(f, 2 * n);
            for r in 0..n {
                for c in 0..n {
                    m.set(r, n + c, *x.get(r, c));
                }
            }
            out.push(GroupElement::new_unchecked(m, 1));
        }
    }
    out
}

/// Generators of P = Stab_G(U_0) = L ⋉ N over GF(q).
pub fn parabolic_generators(n: usize, f: &Fp) -> Vec<GroupElement<Fp>> {
    let mut gens = vec![torus_element(f, n, 0)];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                gens.push(ell(&elementary(f, n, i, j)).expect("invertible"));
            }
        }
    }
    gens.extend(radical_basis(f, n));
    gens
}

/// Generators of G = O_{2n}(GF(q)): those of P plus w_1.
pub fn group_generators(n: usize, f: &Fp) -> Vec<GroupElement<Fp>> {
    let mut gens = parabolic_generators(n, f);
    gens.push(w(f, n, 1).expect("n ≥ 1"));
    gens
}

/// The determinant-one members of [`group_generators`]; they generate SO_{2n} ⊇ P.
pub fn so_generators(n: usize, f: &Fp) -> Vec<GroupElement<Fp>> {
    let mut gens = parabolic_generators(n, f);
    // w_2 flips two signs; with the permutations inside L it generates the even Weyl group
    if n >= 2 {
        gens.push(w(f, n, 2).expect("n ≥ 2"));
    }
    gens
}

/// Root element I + E_ij - E_{bar j, bar i} (1-based, i ≠ j, i ≠ bar j).
pub fn root_element<F: Field>(f: &F, n: usize, i: usize, j: usize, t: &F::Elem) -> GroupElement<F> {
    let mut m = Matrix::identity(f, 2 * n);
    m.set(i - 1, j - 1, t.clone());
    let (bj, bi) = (bar(n, j), bar(n, i));
    let cur = m.get(bj - 1, bi - 1).clone();
    m.set(bj - 1, bi - 1, f.sub(&cur, t));
    GroupElement::new_unchecked(m, 1)
}

/// Permutation matrix e_i ↦ e_{σ(i)} (σ given 1-based on 1..=2n, commuting with bar).
pub fn permutation_element<F: Field>(f: &F, n: usize, sigma: &[usize]) -> Result<GroupElement<F>> {
    let mut m = Matrix::zeros(f, 2 * n, 2 * n);
    for i in 1..=2 * n {
        m.set(sigma[i - 1] - 1, i - 1, f.one());
    }
    GroupElement::new(m)
}

/// Generators of the joint stabilizer of a family of coordinate subspaces (given by 1-based
/// index sets): the diagonal torus, all root elements preserving every set, and a generating
/// set of the bar-commuting permutations preserving every set.
pub fn coordinate_stabilizer_generators(n: usize, f: &Fp, sets: &[Vec<usize>]) -> Vec<GroupElement<Fp>> {
    let member: Vec<Vec<bool>> = sets
        .iter()
        .map(|s| {
            let mut m = vec![false; 2 * n + 1];
            for &i in s {
                m[i] = true;
            }
            m
        })
        .collect();
    let mut gens: Vec<GroupElement<Fp>> = (0..n).map(|p| torus_element(f, n, p)).collect();
    for i in 1..=2 * n {
        for j in 1..=2 * n {
            if i == j || i == bar(n, j) {
                continue;
            }
            // x_ij = x_{bar j, bar i}; keep one representative
            if (bar(n, j), bar(n, i)) < (i, j) {
                continue;
            }
            let ok = member
                .iter()
                .all(|m| (!m[j] || m[i]) && (!m[bar(n, i)] || m[bar(n, j)]));
            if ok {
                gens.push(root_element(f, n, i, j, &1));
            }
        }
    }
    for sigma in permutation_generators(n, &member) {
        gens.push(permutation_element(f, n, &sigma).expect("bar-commuting permutation"));
    }
    gens
}

/// All bar-commuting permutations of 1..=2n preserving every membership mask, reduced to a
/// generating subset by incremental closure.
fn permutation_generators(n: usize, member: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    let mut perm: Vec<usize> = (1..=n).collect();
    loop {
        for signs in 0u32..(1 << n) {
            let mut sigma = vec![0; 2 * n];
            for i in 1..=n {
                let target = if signs >> (i - 1) & 1 == 1 { bar(n, perm[i - 1]) } else { perm[i - 1] };
                sigma[i - 1] = target;
                sigma[bar(n, i) - 1] = bar(n, target);
            }
            let keeps = member
                .iter()
                .all(|m| (1..=2 * n).all(|i| m[i] == m[sigma[i - 1]]));
            if keeps {
                all.push(sigma);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let id: Vec<usize> = (1..=2 * n).collect();
    let mut closure: std::collections::HashSet<Vec<usize>> = [id].into_iter().collect();
    let mut gens: Vec<Vec<usize>> = Vec::new();
    for s in all {
        if closure.contains(&s) {
            continue;
        }
        gens.push(s);
        let mut frontier: Vec<Vec<usize>> = closure.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y: Vec<usize> = x.iter().map(|&i| g[i - 1]).collect();
                if closure.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A product of `len` uniformly chosen generators.
pub fn random_word<F: Field, R: Rng + ?Sized>(gens: &[GroupElement<F>], len: usize, rng: &mut R) -> GroupElement<F> {
    let f = gens[0].mat().field().clone();
    let mut g = GroupElement::identity(&f, gens[0].n());
    for _ in 0..len {
        g = g.compose(&gens[rng.gen_range(0..gens.len())]);
    }
    g
}

/// A random totally isotropic k-subspace of F^{2n}, grown one isotropic vector at a time.
pub fn random_isotropic<R: Rng + ?Sized>(f: &Fp, n: usize, k: usize, rng: &mut R) -> Subspace<Fp> {
    assert!(k <= n, "isotropic subspaces have dimension at most n");
    let mut s = Subspace::zero(f, 2 * n);
    while s.dim() < k {
        let p = perp(&s);
        let basis = p.basis_vectors();
        let mut v = vec![0u32; 2 * n];
        for b in &basis {
            let c = f.random(rng);
            for (x, y) in v.iter_mut().zip(b) {
                *x = f.add(x, &f.mul(&c, y));
            }
        }
        if pairing(f, &v, &v) == 0 && !s.contains_vector(&v) {
            let mut rows = s.basis_vectors();
            rows.push(v);
            s = Subspace::from_vectors(f, 2 * n, rows).expect("consistent rows");
        }
    }
    s
}

/// A vector basis of F^{2n} as columns, read back as the matrix sending e_i to the i-th vector.
pub fn from_columns<F: Field>(f: &F, cols: &[Vec<F::Elem>]) -> Result<Matrix<F>> {
    Matrix::from_cols(f, cols, cols.len())
}

pub fn e<F: Field>(f: &F, n: usize, i: usize) -> Vec<F::Elem> {
    unit(f, 2 * n, i)
}

/// Gram matrix of a list of vectors.
pub fn gram_of<F: Field>(f: &F, vs: &[Vec<F::Elem>]) -> Matrix<F> {
    let mut g = Matrix::zeros(f, vs.len(), vs.len());
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            g.set(i, j, pairing(f, a, b));
        }
    }
    g
}
