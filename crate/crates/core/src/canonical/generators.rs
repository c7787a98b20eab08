//! Elements of R_V = {g : gU₊ = U₊, gU₋ = U₋, gV = V} for the standard pair and V = V(b).

use crate::canonical::layout::{precedes, Block, IndexLayout, EXCLUDED};
use crate::canonical::normalize::{representative_from_layout, standard_pair};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{bar, GroupElement};
use crate::matrix::Matrix;
use crate::subspace::Subspace;

/// The alternating form ⟨f_k, f_l⟩ = −δ_{k,2m+1−l} for k ≤ m and +δ_{k,2m+1−l} for k > m.
pub fn sp_prime_form<F: Field>(f: &F, size: usize) -> Matrix<F> {
    let mut o = Matrix::zeros(f, size, size);
    for k in 1..=size {
        let l = size + 1 - k;
        o.set(k - 1, l - 1, if k <= size / 2 { f.neg(&f.one()) } else { f.one() });
    }
    o
}

pub fn is_sp_prime<F: Field>(a: &Matrix<F>) -> bool {
    let o = sp_prime_form(a.field(), a.rows());
    a.is_square()
        && a.rows() % 2 == 0
        && a.transpose().mul(&o).and_then(|x| x.mul(a)).map(|x| x == o).unwrap_or(false)
}

/// Which of the four transvection patterns g_{i,k}(μ) follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransvectionCase {
    Plain,
    EightTwelve,
    TwelveFifteen,
    EightFifteen,
}

#[derive(Clone, Debug)]
pub enum RvKind<F: Field> {
    /// h_(j)(A), 1 ≤ j ≤ 14, A invertible of size b_j.
    H { j: usize, a: Matrix<F> },
    /// h_(15)(A), A ∈ Sp′_{b15}.
    H15 { a: Matrix<F> },
    /// g_{i,k}(μ).
    G { i: usize, k: usize, mu: F::Elem },
}

/// The standard pair, V(b) and the layout, bundled.
#[derive(Clone, Debug)]
pub struct RvContext<F: Field> {
    pub field: F,
    pub layout: IndexLayout,
    pub up: Subspace<F>,
    pub um: Subspace<F>,
    pub v: Subspace<F>,
}

impl<F: Field> RvContext<F> {
    pub fn new(field: &F, layout: IndexLayout) -> Self {
        let (up, um) = standard_pair(field, &layout.theta);
        let v = representative_from_layout(field, &layout);
        RvContext {
            field: field.clone(),
            layout,
            up,
            um,
            v,
        }
    }

    fn n(&self) -> usize {
        self.layout.n()
    }

    /// g ∈ G and g stabilizes U₊, U₋ and V.
    pub fn is_member(&self, g: &GroupElement<F>) -> bool {
        GroupElement::new(g.mat().clone()).is_ok()
            && [&self.up, &self.um, &self.v]
                .iter()
                .all(|s| g.apply(s).map(|t| &t == *s).unwrap_or(false))
    }

    pub fn generator(&self, kind: &RvKind<F>) -> Result<GroupElement<F>> {
        let g = match kind {
            RvKind::H { j, a } => self.h(*j, a)?,
            RvKind::H15 { a } => self.h15(a)?,
            RvKind::G { i, k, mu } => self.transvection(*i, *k, mu)?,
        };
        if !self.is_member(&g) {
            return Err(Error::Verification(format!("{kind:?} is not in R_V")));
        }
        Ok(g)
    }

    fn h(&self, j: usize, a: &Matrix<F>) -> Result<GroupElement<F>> {
        let f = &self.field;
        let l = &self.layout;
        let n = self.n();
        if !(1..=14).contains(&j) {
            return Err(Error::Domain(format!("h_(j) needs 1 <= j <= 14, got {j}")));
        }
        let idx = l.set(j).to_vec();
        if a.rows() != idx.len() || a.cols() != idx.len() {
            return Err(Error::Shape(format!("A must be {0}x{0}", idx.len())));
        }
        let binv = a.inverse()?;
        // copies of I_(j) moved like e_k (by A) and like e_{k̄} (by A^{-T})
        let mut lower: Vec<Vec<usize>> = vec![idx.clone()];
        match j {
            7 | 8 | 9 | 13 => lower.push(idx.iter().map(|&i| l.eta(j, i).unwrap()).collect()),
            12 => {
                lower.push(idx.iter().map(|&i| l.kappa(i).unwrap()).collect());
                lower.push(idx.iter().map(|&i| l.lambda(i).unwrap()).collect());
            }
            _ => {}
        }
        let mut m = Matrix::identity(f, 2 * n);
        for copy in &lower {
            for (kc, &kk) in copy.iter().enumerate() {
                let kb = bar(n, kk);
                m.set(kk - 1, kk - 1, f.zero());
                m.set(kb - 1, kb - 1, f.zero());
                for (ic, &ii) in copy.iter().enumerate() {
                    m.set(ii - 1, kk - 1, a.get(ic, kc).clone());
                    m.set(bar(n, ii) - 1, kb - 1, binv.get(kc, ic).clone());
                }
            }
        }
        GroupElement::new(m)
    }

    fn h15(&self, a: &Matrix<F>) -> Result<GroupElement<F>> {
        let f = &self.field;
        let l = &self.layout;
        let n = self.n();
        let b15 = l.b.get(15);
        if a.rows() != b15 || a.cols() != b15 {
            return Err(Error::Shape(format!("A must be {b15}x{b15}")));
        }
        if !is_sp_prime(a) {
            return Err(Error::Domain("A is not in Sp'".into()));
        }
        let mut m = Matrix::identity(f, 2 * n);
        let sign = |s: i8| if s > 0 { f.one() } else { f.neg(&f.one()) };
        for k in 1..=b15 {
            let col = l.i(15, k);
            let (xcol, sk) = l.xi(k);
            for r in 1..=b15 {
                m.set(l.i(15, r) - 1, col - 1, a.get(r - 1, k - 1).clone());
                // h ξ(e_k) = ξ(A e_k) with ξ(e_r) = s_r e_{x_r}
                let (xr, sr) = l.xi(r);
                m.set(xr - 1, xcol - 1, f.mul(&f.mul(&sign(sk), &sign(sr)), a.get(r - 1, k - 1)));
            }
        }
        GroupElement::new(m)
    }

    /// The pattern of g_{i,k}(μ), or an error for inadmissible pairs.
    pub fn transvection_case(&self, i: usize, k: usize) -> Result<(TransvectionCase, Block, Block)> {
        let l = &self.layout;
        let bi = l
            .block_of(i)
            .ok_or_else(|| Error::Inadmissible(format!("{i} is not in I+")))?;
        let bk = l
            .block_of(k)
            .ok_or_else(|| Error::Inadmissible(format!("{k} is not in I+")))?;
        let case = match (bi, bk) {
            (Block::J(8), Block::J(12)) => TransvectionCase::EightTwelve,
            (Block::J(12), Block::J(15)) => TransvectionCase::TwelveFifteen,
            (Block::J(8), Block::J(15)) => TransvectionCase::EightFifteen,
            _ if precedes(bi, bk) && !EXCLUDED.contains(&(bi, bk)) => TransvectionCase::Plain,
            _ => {
                return Err(Error::Inadmissible(format!(
                    "no g_(i,k) for i in block {bi}, k in block {bk}"
                )))
            }
        };
        Ok((case, bi, bk))
    }

    /// The prescribed nilpotent map on U₊ as (source index, target index, coefficient) triples.
    fn prescribed(&self, i: usize, k: usize, mu: &F::Elem) -> Result<Vec<(usize, usize, F::Elem)>> {
        let f = &self.field;
        let l = &self.layout;
        let n = self.n();
        let (case, _, _) = self.transvection_case(i, k)?;
        let mut out = vec![(k, i, mu.clone())];
        let minus = f.neg(mu);
        match case {
            TransvectionCase::Plain => {}
            TransvectionCase::EightTwelve => {
                out.push((bar(n, l.eta(8, i)?), bar(n, l.kappa(k)?), minus));
            }
            TransvectionCase::TwelveFifteen => {
                out.push((bar(n, l.kappa(i)?), bar(n, l.eta15(k)?), self.xi_signed(k, minus)));
            }
            TransvectionCase::EightFifteen => {
                out.push((bar(n, l.eta(8, i)?), bar(n, l.eta15(k)?), self.xi_signed(k, minus)));
            }
        }
        Ok(out)
    }

    /// c for k in the first half of I_(15), −c in the second half (the sign of ξ(e_k)).
    fn xi_signed(&self, k: usize, c: F::Elem) -> F::Elem {
        let l = &self.layout;
        let pos = l.set(15).iter().position(|&x| x == k).expect("k in I(15)") + 1;
        if l.xi(pos).1 > 0 {
            c
        } else {
            self.field.neg(&c)
        }
    }

    /// g_{i,k}(μ) as the Cayley transform (1+X)(1−X)^{-1} of an X in the Lie algebra of R_V
    /// that restricts to the prescribed map (halved) on U₊ and is supported on the pieces of i and k.
    fn transvection(&self, i: usize, k: usize, mu: &F::Elem) -> Result<GroupElement<F>> {
        let f = &self.field;
        let l = &self.layout;
        let n = self.n();
        let m = 2 * n;
        let pres = self.prescribed(i, k, mu)?;
        if f.is_zero(mu) {
            return Ok(GroupElement::identity(f, n));
        }
        let mut coords: Vec<usize> = l.piece_of(i).to_vec();
        for &c in l.piece_of(k) {
            if !coords.contains(&c) {
                coords.push(c);
            }
        }
        coords.sort_unstable();
        let p = coords.len();
        let at = |c: usize| coords.iter().position(|&x| x == c);
        let var = |r: usize, c: usize| r * p + c;
        let nv = p * p;
        let plus = l.plus_indices();
        let minus_set = l.minus_indices();
        let half = f.half();

        let mut eqs: Vec<(Vec<F::Elem>, F::Elem)> = Vec::new();
        let new_row = || vec![f.zero(); nv];
        // Lie algebra of O: X_{b̄,a} + X_{ā,b} = 0
        for a in 0..p {
            for b in 0..p {
                let ab = at(bar(n, coords[a])).expect("pieces are closed under bar");
                let bb = at(bar(n, coords[b])).expect("pieces are closed under bar");
                let mut row = new_row();
                row[var(bb, a)] = f.add(&row[var(bb, a)], &f.one());
                row[var(ab, b)] = f.add(&row[var(ab, b)], &f.one());
                eqs.push((row, f.zero()));
            }
        }
        // X e_c = Y e_c on U₊
        for (cc, &c) in coords.iter().enumerate() {
            if !plus.contains(&c) {
                continue;
            }
            for rr in 0..p {
                let mut target = f.zero();
                for (src, dst, coef) in &pres {
                    if *src == c && *dst == coords[rr] {
                        target = f.add(&target, &f.mul(&half, coef));
                    }
                }
                let mut row = new_row();
                row[var(rr, cc)] = f.one();
                eqs.push((row, target));
            }
        }
        // X U₋ ⊆ U₋
        for (cc, &c) in coords.iter().enumerate() {
            if !minus_set.contains(&c) {
                continue;
            }
            for (rr, &r) in coords.iter().enumerate() {
                if !minus_set.contains(&r) {
                    let mut row = new_row();
                    row[var(rr, cc)] = f.one();
                    eqs.push((row, f.zero()));
                }
            }
        }
        // X V ⊆ V: (X v, w) = 0 for v, w in V ∩ span(coords)
        let local = Subspace::coordinate(f, m, &coords);
        let vloc: Vec<Vec<F::Elem>> = self.v.meet(&local)?.basis_vectors();
        for v in &vloc {
            for w in &vloc {
                // (Xv, w) = Σ_{r,c} X_{r,c} v_c w_{r̄}
                let mut row = new_row();
                for (rr, &r) in coords.iter().enumerate() {
                    let wr = &w[bar(n, r) - 1];
                    if f.is_zero(wr) {
                        continue;
                    }
                    for (cc, &c) in coords.iter().enumerate() {
                        let vc = &v[c - 1];
                        if !f.is_zero(vc) {
                            row[var(rr, cc)] = f.add(&row[var(rr, cc)], &f.mul(vc, wr));
                        }
                    }
                }
                eqs.push((row, f.zero()));
            }
        }
        let x = solve_affine(f, &eqs, nv)?
            .ok_or_else(|| Error::Verification(format!("no Lie algebra element for g_({i},{k})")))?;
        let mut xl = Matrix::zeros(f, p, p);
        for r in 0..p {
            for c in 0..p {
                xl.set(r, c, x[var(r, c)].clone());
            }
        }
        let id = Matrix::identity(f, p);
        let cay = id.add(&xl)?.mul(&id.sub(&xl)?.inverse()?)?;
        let mut g = Matrix::identity(f, m);
        for r in 0..p {
            for c in 0..p {
                g.set(coords[r] - 1, coords[c] - 1, cay.get(r, c).clone());
            }
        }
        let g = GroupElement::new(g)?;
        // the prescribed action on U₊
        for &c in &plus {
            let mut expect = vec![f.zero(); m];
            expect[c - 1] = f.one();
            for (src, dst, coef) in &pres {
                if *src == c {
                    expect[dst - 1] = f.add(&expect[dst - 1], coef);
                }
            }
            let mut ec = vec![f.zero(); m];
            ec[c - 1] = f.one();
            if g.apply_vector(&ec) != expect {
                return Err(Error::Verification(format!("g_({i},{k}) acts wrongly on e_{c}")));
            }
        }
        Ok(g)
    }

    /// g ∈ R_V with g(e_k + u) = e_k, for u supported on blocks below k's block
    /// (plus the 15 and 12bar components allowed above 12bar and 8bar).
    pub fn eliminate(&self, k: usize, u: &[F::Elem]) -> Result<GroupElement<F>> {
        let f = &self.field;
        let l = &self.layout;
        let n = self.n();
        let m = 2 * n;
        let bk = l
            .block_of(k)
            .ok_or_else(|| Error::Hypothesis(format!("{k} is not in I+")))?;
        let plus = l.plus_indices();
        for (idx, c) in u.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let i = idx + 1;
            let bi = l
                .block_of(i)
                .ok_or_else(|| Error::Hypothesis(format!("u has a component outside U+ at {i}")))?;
            let allowed = precedes(bi, bk)
                || matches!(
                    (bi, bk),
                    (Block::J(15), Block::Bar12) | (Block::J(15), Block::Bar8) | (Block::Bar12, Block::Bar8)
                );
            if !allowed {
                return Err(Error::Hypothesis(format!(
                    "component in block {bi} is not below block {bk}"
                )));
            }
        }
        let mut target = u.to_vec();
        target[k - 1] = f.add(&target[k - 1], &f.one());
        let mut g = GroupElement::identity(f, n);
        let coef = |w: &[F::Elem], i: usize| w[i - 1].clone();
        let apply = |h: GroupElement<F>, g: &mut GroupElement<F>, w: &mut Vec<F::Elem>| {
            *w = h.apply_vector(w);
            *g = h.compose(g);
        };
        let mut w = target.clone();
        // exceptional components first; they may introduce components in I(8) or I(12)
        if bk == Block::Bar8 || bk == Block::Bar12 {
            let above: Vec<Block> = if bk == Block::Bar8 {
                vec![Block::J(15), Block::Bar12]
            } else {
                vec![Block::J(15)]
            };
            for blk in above {
                for c in l.block(blk) {
                    let x = coef(&w, c);
                    if f.is_zero(&x) {
                        continue;
                    }
                    let (i_idx, k_idx) = match (blk, bk) {
                        (Block::Bar12, Block::Bar8) => (self.eta8_preimage_of_bar(k)?, self.kappa_preimage_of_bar(c)?),
                        (Block::J(15), Block::Bar8) => (self.eta8_preimage_of_bar(k)?, self.eta15_preimage_of_bar(c)?),
                        (Block::J(15), Block::Bar12) => (self.kappa_preimage_of_bar(k)?, self.eta15_preimage_of_bar(c)?),
                        _ => unreachable!(),
                    };
                    let mu = if blk == Block::J(15) { self.xi_signed(k_idx, x) } else { x };
                    let h = self.transvection(i_idx, k_idx, &mu)?;
                    apply(h, &mut g, &mut w);
                }
            }
        }
        for &c in &plus {
            if c == k {
                continue;
            }
            let x = coef(&w, c);
            if f.is_zero(&x) {
                continue;
            }
            let h = self.transvection(c, k, &f.neg(&x))?;
            apply(h, &mut g, &mut w);
        }
        let mut ek = vec![f.zero(); m];
        ek[k - 1] = f.one();
        if g.apply_vector(&target) != ek || !self.is_member(&g) {
            return Err(Error::Verification("elimination postcondition failed".into()));
        }
        Ok(g)
    }

    fn eta8_preimage_of_bar(&self, k: usize) -> Result<usize> {
        let l = &self.layout;
        let t = bar(self.n(), k);
        l.set(8)
            .iter()
            .copied()
            .find(|&i| l.eta(8, i).ok() == Some(t))
            .ok_or_else(|| Error::Hypothesis(format!("{k} is not in block 8bar")))
    }

    fn kappa_preimage_of_bar(&self, k: usize) -> Result<usize> {
        let l = &self.layout;
        let t = bar(self.n(), k);
        l.set(12)
            .iter()
            .copied()
            .find(|&i| l.kappa(i).ok() == Some(t))
            .ok_or_else(|| Error::Hypothesis(format!("{k} is not in block 12bar")))
    }

    fn eta15_preimage_of_bar(&self, c: usize) -> Result<usize> {
        let l = &self.layout;
        let t = bar(self.n(), c);
        l.set(15)
            .iter()
            .copied()
            .find(|&i| l.eta15(i).ok() == Some(t))
            .ok_or_else(|| Error::Hypothesis(format!("{c} is not in block 15")))
    }
}

/// A solution of the affine system (rows · x = rhs) with free variables set to zero.
fn solve_affine<F: Field>(f: &F, eqs: &[(Vec<F::Elem>, F::Elem)], nv: usize) -> Result<Option<Vec<F::Elem>>> {
    let mut a = Matrix::zeros(f, eqs.len(), nv + 1);
    for (r, (row, rhs)) in eqs.iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            if !f.is_zero(x) {
                a.set(r, c, x.clone());
            }
        }
        a.set(r, nv, rhs.clone());
    }
    let (red, pivots) = a.rref();
    if pivots.contains(&nv) {
        return Ok(None);
    }
    let mut x = vec![f.zero(); nv];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = red.get(r, nv).clone();
    }
    Ok(Some(x))
}

/// Symplectic transvection x ↦ x + c⟨x,v⟩v for the Sp′ form.
pub fn sp_prime_transvection<F: Field>(f: &F, v: &[F::Elem], c: &F::Elem) -> Matrix<F> {
    let size = v.len();
    let o = sp_prime_form(f, size);
    // ⟨x, v⟩ = xᵀ O v
    let ov = o.mul_vec(v).expect("square");
    let mut t = Matrix::identity(f, size);
    for r in 0..size {
        for col in 0..size {
            let add = f.mul(c, &f.mul(&v[r], &ov[col]));
            let cur = t.get(r, col).clone();
            t.set(r, col, f.add(&cur, &add));
        }
    }
    t
}
