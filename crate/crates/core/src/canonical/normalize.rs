//! Standard position of a pair (U₊, U₋) and the representative V(b).

use crate::canonical::layout::IndexLayout;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{bar, e, pairing, GroupElement};
use crate::invariants::{theta, BInvariants, PairFrame, ThetaInvariants};
use crate::matrix::{solve_combination, Matrix};
use crate::subspace::Subspace;

/// (U₊, U₋) as coordinate subspaces W_(0)⊕W_(+)⊕U_(+) and W_(0)⊕W_(−)⊕U_(−).
pub fn standard_pair<F: Field>(f: &F, t: &ThetaInvariants) -> (Subspace<F>, Subspace<F>) {
    let m = 2 * t.n;
    let plus: Vec<usize> = (1..=t.a0 + t.a_plus).chain(t.d + 1..=t.d + t.a1).collect();
    let minus: Vec<usize> = (1..=t.a0)
        .chain(t.a0 + t.a_plus + 1..=t.d)
        .chain(t.d_prime + 1..=t.d_prime + t.a1)
        .collect();
    (Subspace::coordinate(f, m, &plus), Subspace::coordinate(f, m, &minus))
}

/// Vectors of `big` completing a basis of `small` to one of `big`.
fn complement<F: Field>(small: &Subspace<F>, big: &Subspace<F>) -> Result<Vec<Vec<F::Elem>>> {
    let mut acc = small.clone();
    let mut out = Vec::new();
    for v in big.basis_vectors() {
        if !acc.contains_vector(&v) {
            let mut rows = acc.basis_vectors();
            rows.push(v.clone());
            acc = Subspace::from_vectors(small.field(), small.ambient(), rows)?;
            out.push(v);
        }
    }
    Ok(out)
}

fn axpy<F: Field>(f: &F, y: &mut [F::Elem], a: &F::Elem, x: &[F::Elem]) {
    if f.is_zero(a) {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = f.add(yi, &f.mul(a, xi));
    }
}

fn reflection<F: Field>(f: &F, v: &[F::Elem]) -> Result<Matrix<F>> {
    let m = v.len();
    let q = pairing(f, v, v);
    let c = f.div(&f.from_i64(2), &q)?;
    let mut r = Matrix::identity(f, m);
    // s_v(x) = x − 2(x,v)/(v,v) v; (x,v) = x · rev(v)
    for row in 0..m {
        for col in 0..m {
            let t = f.mul(&c, &f.mul(&v[row], &v[m - 1 - col]));
            let cur = r.get(row, col).clone();
            r.set(row, col, f.sub(&cur, &t));
        }
    }
    Ok(r)
}

/// An isometry sending each x_i to y_i, for orthogonal anisotropic x's and y's with (x_i,x_i) = (y_i,y_i).
fn witt_extension<F: Field>(f: &F, m: usize, xs: &[Vec<F::Elem>], ys: &[Vec<F::Elem>]) -> Result<Matrix<F>> {
    let mut g = Matrix::identity(f, m);
    for (x, y) in xs.iter().zip(ys) {
        let gx = g.mul_vec(x)?;
        let diff: Vec<F::Elem> = gx.iter().zip(y).map(|(a, b)| f.sub(a, b)).collect();
        if diff.iter().all(|a| f.is_zero(a)) {
            continue;
        }
        if !f.is_zero(&pairing(f, &diff, &diff)) {
            g = reflection(f, &diff)?.mul(&g)?;
        } else {
            let sum: Vec<F::Elem> = gx.iter().zip(y).map(|(a, b)| f.add(a, b)).collect();
            g = reflection(f, y)?.mul(&reflection(f, &sum)?)?.mul(&g)?;
        }
    }
    Ok(g)
}

/// g ∈ G with (gU₊, gU₋) = standard_pair(θ(U₊, U₋)).
pub fn normalize_pair<F: Field>(up: &Subspace<F>, um: &Subspace<F>) -> Result<GroupElement<F>> {
    let f = up.field().clone();
    let t = theta(up, um)?;
    let n = t.n;
    let m = 2 * n;
    let fr = PairFrame::new(up, um)?;

    // frame[i-1] is the vector that e_i should be sent to
    let mut frame: Vec<Option<Vec<F::Elem>>> = vec![None; m];
    let mut wvecs = fr.w0.basis_vectors();
    wvecs.extend(complement(&fr.w0, &fr.wp)?);
    wvecs.extend(complement(&fr.w0, &fr.wm)?);
    for (a, v) in wvecs.iter().enumerate() {
        frame[a] = Some(v.clone());
    }
    let cp = complement(&fr.wp, up)?;
    let cm = complement(&fr.wm, um)?;
    // q_t with (p_s, q_t) = δ_{s, a1+1−t}
    let a1 = t.a1;
    let mut bmat = Matrix::zeros(&f, a1, a1);
    for (s, p) in cp.iter().enumerate() {
        for (r, c) in cm.iter().enumerate() {
            bmat.set(s, r, pairing(&f, p, c));
        }
    }
    let binv = bmat.inverse()?;
    for tt in 0..a1 {
        let s = a1 - 1 - tt;
        let mut q = vec![f.zero(); m];
        for (r, c) in cm.iter().enumerate() {
            axpy(&f, &mut q, binv.get(r, s), c);
        }
        frame[t.d_prime + tt] = Some(q);
    }
    for (s, p) in cp.iter().enumerate() {
        frame[t.d + s] = Some(p.clone());
    }

    // duals of W inside the perp of the a1-blocks
    let d = t.d;
    if d > 0 {
        let mut h = cp.clone();
        h.extend(frame[t.d_prime..t.d_prime + a1].iter().map(|v| v.clone().unwrap()));
        let hperp = crate::geometry::perp(&Subspace::from_vectors(&f, m, h)?);
        let hb = hperp.basis_vectors();
        // solve (w_a, Σ c_r h_r) = δ_{ab}
        let mut sys = Matrix::zeros(&f, d, hb.len());
        for (a, wv) in wvecs.iter().enumerate() {
            for (r, hv) in hb.iter().enumerate() {
                sys.set(a, r, pairing(&f, wv, hv));
            }
        }
        let mut ys = Vec::with_capacity(d);
        for bidx in 0..d {
            let target: Vec<F::Elem> = (0..d).map(|a| if a == bidx { f.one() } else { f.zero() }).collect();
            let cols: Vec<Vec<F::Elem>> = (0..hb.len()).map(|r| sys.col(r)).collect();
            let c = solve_combination(&f, &cols, &target)
                .ok_or_else(|| Error::Verification("W has no dual inside the complement".into()))?;
            let mut y = vec![f.zero(); m];
            for (cr, hv) in c.iter().zip(&hb) {
                axpy(&f, &mut y, cr, hv);
            }
            ys.push(y);
        }
        let half = f.half();
        let gram: Vec<Vec<F::Elem>> = ys.iter().map(|a| ys.iter().map(|b| pairing(&f, a, b)).collect()).collect();
        for (bidx, y) in ys.iter_mut().enumerate() {
            for (c, wv) in wvecs.iter().enumerate() {
                let coef = f.neg(&f.mul(&half, &gram[bidx][c]));
                axpy(&f, y, &coef, wv);
            }
        }
        for (bidx, y) in ys.into_iter().enumerate() {
            frame[bar(n, bidx + 1) - 1] = Some(y);
        }
    }

    // orthogonal anisotropic basis e_a ± e_{ā} of the assigned part, and its image
    let mut xs = Vec::new();
    let mut targets = Vec::new();
    for a in 1..=n {
        let ab = bar(n, a);
        if let (Some(va), Some(vb)) = (&frame[a - 1], &frame[ab - 1]) {
            for sign in [1i64, -1] {
                let s = f.from_i64(sign);
                let mut x = e(&f, n, a);
                axpy(&f, &mut x, &s, &e(&f, n, ab));
                let mut y = va.clone();
                axpy(&f, &mut y, &s, vb);
                xs.push(x);
                targets.push(y);
            }
        }
    }
    let h = witt_extension(&f, m, &xs, &targets)?;
    let g = GroupElement::new(h)?.inverse();
    let (sp, sm) = standard_pair(&f, &t);
    if g.apply(up)? != sp || g.apply(um)? != sm {
        return Err(Error::Verification("normalize_pair postcondition failed".into()));
    }
    Ok(g)
}

/// All b satisfying the five relations against θ, with b₁₅ even.
pub fn valid_b(t: &ThetaInvariants) -> Vec<BInvariants> {
    let mut out = Vec::new();
    for b1 in 0..=t.a0 {
        let b2 = t.a0 - b1;
        for b12 in 0..=t.a2 {
            for b13 in 0..=t.a2 - b12 {
                let b14 = t.a2 - b12 - b13;
                let rest1 = match t.a1.checked_sub(2 * b12 + b13) {
                    Some(r) => r,
                    None => continue,
                };
                // a1 − 2b12 − b13 = b5+b6+b8+b9+b15
                for b7 in 0..=t.a_plus.min(t.a_minus) {
                    for b8 in 0..=(t.a_plus - b7).min(rest1) {
                        for b9 in 0..=(t.a_minus - b7).min(rest1 - b8) {
                            let r = rest1 - b8 - b9;
                            for b15 in (0..=r).step_by(2) {
                                for b5 in 0..=r - b15 {
                                    let b6 = r - b15 - b5;
                                    for b3 in 0..=t.a_plus - b7 - b8 {
                                        let b10 = t.a_plus - b7 - b8 - b3;
                                        for b4 in 0..=t.a_minus - b7 - b9 {
                                            let b11 = t.a_minus - b7 - b9 - b4;
                                            out.push(BInvariants::new([
                                                b1, b2, b3, b4, b5, b6, b7, b8, b9, b10, b11, b12, b13, b14, b15,
                                            ]));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// V(b): maximal isotropic, with invariants b against the standard pair.
pub fn representative<F: Field>(f: &F, t: &ThetaInvariants, b: &BInvariants) -> Result<Subspace<F>> {
    let l = IndexLayout::new(*t, *b)?;
    Ok(representative_from_layout(f, &l))
}

pub fn representative_from_layout<F: Field>(f: &F, l: &IndexLayout) -> Subspace<F> {
    let n = l.n();
    let m = 2 * n;
    let one = f.one();
    let neg = f.neg(&one);
    let vec_of = |terms: &[(usize, &F::Elem)]| -> Vec<F::Elem> {
        let mut v = vec![f.zero(); m];
        for &(i, c) in terms {
            v[i - 1] = f.add(&v[i - 1], c);
        }
        v
    };
    let mut rows = Vec::with_capacity(n);
    for j in [1, 3, 4, 5, 6, 14] {
        for &i in l.set(j) {
            rows.push(vec_of(&[(i, &one)]));
        }
    }
    for j in [2, 10, 11] {
        for &i in l.set(j) {
            rows.push(vec_of(&[(bar(n, i), &one)]));
        }
    }
    for j in [7, 8, 9, 13] {
        for &i in l.set(j) {
            let h = l.eta(j, i).expect("index in block");
            rows.push(vec_of(&[(i, &one), (h, &one)]));
            rows.push(vec_of(&[(bar(n, i), &one), (bar(n, h), &neg)]));
        }
    }
    for &i in l.set(12) {
        let (k, la) = (l.kappa(i).unwrap(), l.lambda(i).unwrap());
        rows.push(vec_of(&[(i, &one), (k, &one)]));
        rows.push(vec_of(&[(i, &one), (la, &one)]));
        rows.push(vec_of(&[(bar(n, i), &one), (bar(n, k), &neg), (bar(n, la), &neg)]));
    }
    let b15 = l.b.get(15);
    for k in 1..=b15 / 2 {
        let i = l.i(15, k);
        let h = l.eta15(i).unwrap();
        rows.push(vec_of(&[(i, &one), (h, &one)]));
        rows.push(vec_of(&[(bar(n, i), &one), (bar(n, h), &neg)]));
    }
    Subspace::from_vectors(f, m, rows).expect("consistent rows")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals};
    use crate::geometry::u_d;
    use crate::invariants::b_invariants;

    #[test]
    fn standard_pair_examples() {
        let f = Fp::new(3).unwrap();
        let t = ThetaInvariants::new(3, 3, 0, 0, 0).unwrap();
        let (a, b) = standard_pair(&f, &t);
        assert_eq!(a, u_d(&f, 3, 0).unwrap());
        assert_eq!(b, a);
        let t = ThetaInvariants::new(3, 0, 0, 0, 3).unwrap();
        let (a, b) = standard_pair(&f, &t);
        assert_eq!(a, u_d(&f, 3, 0).unwrap());
        assert_eq!(b, u_d(&f, 3, 3).unwrap());
        let t = ThetaInvariants::new(3, 1, 1, 0, 1).unwrap();
        let (a, b) = standard_pair(&f, &t);
        assert_eq!(theta(&a, &b).unwrap(), t);
    }

    #[test]
    fn representative_examples() {
        let f = Rationals;
        let t = ThetaInvariants::new(2, 0, 0, 0, 2).unwrap();
        let mut b = [0; 15];
        b[14] = 2;
        let v = representative(&f, &t, &BInvariants::new(b)).unwrap();
        let expect = Subspace::from_i64(&f, 4, &[vec![1, 0, 1, 0], vec![0, -1, 0, 1]]).unwrap();
        assert_eq!(v, expect);
        let t = ThetaInvariants::new(3, 3, 0, 0, 0).unwrap();
        let mut b = [0; 15];
        b[0] = 3;
        assert_eq!(representative(&f, &t, &BInvariants::new(b)).unwrap(), u_d(&f, 3, 0).unwrap());
    }

    #[test]
    fn roundtrip_at_rank_three() {
        let f = Fp::new(3).unwrap();
        for t in ThetaInvariants::all(3) {
            let (up, um) = standard_pair(&f, &t);
            for b in valid_b(&t) {
                let v = representative(&f, &t, &b).unwrap();
                assert_eq!(b_invariants(&up, &um, &v).unwrap(), b, "theta {t}");
            }
        }
    }

    #[test]
    fn bad_b_is_rejected() {
        let t = ThetaInvariants::new(2, 2, 0, 0, 0).unwrap();
        let b = BInvariants::new([1; 15]);
        assert!(matches!(representative(&Rationals, &t, &b), Err(Error::BadInvariants(_))));
    }
}
