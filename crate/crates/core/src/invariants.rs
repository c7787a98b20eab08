//! Relative-position invariants: θ for a pair of isotropic subspaces (U₊, U₋) and
//! b₁..b₁₅ for a triple (U₊, U₋, V) with V maximal isotropic.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{is_isotropic, is_maximal_isotropic, pairing, perp};
use crate::matrix::{solve_combination, Matrix};
use crate::subspace::{kernel, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaInvariants {
    pub n: usize,
    pub a0: usize,
    pub a_plus: usize,
    pub a_minus: usize,
    pub a1: usize,
    pub a2: usize,
    pub d: usize,
    pub d_prime: usize,
}

impl ThetaInvariants {
    /// Fills in d, d′ and a₂ and checks a₂ ≥ 0.
    pub fn new(n: usize, a0: usize, a_plus: usize, a_minus: usize, a1: usize) -> Result<Self> {
        let d = a0 + a_plus + a_minus;
        if d + a1 > n {
            return Err(Error::BadInvariants(format!(
                "a0+a++a-+a1 = {} exceeds n = {n}",
                d + a1
            )));
        }
        Ok(ThetaInvariants {
            n,
            a0,
            a_plus,
            a_minus,
            a1,
            a2: n - d - a1,
            d,
            d_prime: 2 * n - d - a1,
        })
    }

    pub fn alpha(&self) -> usize {
        self.a0 + self.a_plus + self.a1
    }

    pub fn beta(&self) -> usize {
        self.a0 + self.a_minus + self.a1
    }

    /// Every θ at rank n.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for a0 in 0..=n {
            for ap in 0..=n - a0 {
                for am in 0..=n - a0 - ap {
                    for a1 in 0..=n - a0 - ap - am {
                        out.push(Self::new(n, a0, ap, am, a1).expect("bounded by n"));
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n, "a0": self.a0, "a_plus": self.a_plus, "a_minus": self.a_minus,
            "a1": self.a1, "a2": self.a2, "d": self.d, "d_prime": self.d_prime,
        })
    }
}

impl fmt::Display for ThetaInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(a0,a+,a-,a1,a2) = ({},{},{},{},{}), d = {}, d' = {}",
            self.a0, self.a_plus, self.a_minus, self.a1, self.a2, self.d, self.d_prime
        )
    }
}

/// b₁..b₁₅, stored 0-based; `get(j)` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BInvariants {
    pub b: [usize; 15],
}

impl BInvariants {
    pub fn new(b: [usize; 15]) -> Self {
        BInvariants { b }
    }

    pub fn get(&self, j: usize) -> usize {
        self.b[j - 1]
    }

    pub fn to_json(&self, theta: &ThetaInvariants) -> Value {
        json!({ "b": self.b.to_vec(), "theta": theta.to_json() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .or_else(|| v["b"].as_array())
            .ok_or_else(|| Error::Parse("expected a 15-integer array".into()))?;
        if arr.len() != 15 {
            return Err(Error::Parse(format!("expected 15 entries, got {}", arr.len())));
        }
        let mut b = [0usize; 15];
        for (slot, x) in b.iter_mut().zip(arr) {
            *slot = x
                .as_u64()
                .ok_or_else(|| Error::Parse(format!("bad entry {x}")))? as usize;
        }
        Ok(BInvariants { b })
    }
}

impl fmt::Display for BInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.b.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

fn check_isotropic<F: Field>(s: &Subspace<F>) -> Result<()> {
    if !is_isotropic(s) {
        return Err(Error::NotIsotropic);
    }
    Ok(())
}

pub fn theta<F: Field>(up: &Subspace<F>, um: &Subspace<F>) -> Result<ThetaInvariants> {
    if up.ambient() != um.ambient() {
        return Err(Error::AmbientMismatch(up.ambient(), um.ambient()));
    }
    check_isotropic(up)?;
    check_isotropic(um)?;
    let n = up.ambient() / 2;
    let w0 = up.meet(um)?;
    let wp = up.meet(&perp(um))?;
    let wm = um.meet(&perp(up))?;
    let a0 = w0.dim();
    let a_plus = wp.dim() - a0;
    let a_minus = wm.dim() - a0;
    let a1 = up.dim() - a0 - a_plus;
    if um.dim() - a0 - a_minus != a1 {
        return Err(Error::Verification("the two a1 formulas disagree".into()));
    }
    ThetaInvariants::new(n, a0, a_plus, a_minus, a1)
}

/// The subspaces W₀, W₊, W₋, W = W₊+W₋ and Z = (U₊+U₋)^⊥ of a pair.
#[derive(Clone, Debug)]
pub struct PairFrame<F: Field> {
    pub up: Subspace<F>,
    pub um: Subspace<F>,
    pub w0: Subspace<F>,
    pub wp: Subspace<F>,
    pub wm: Subspace<F>,
    pub w: Subspace<F>,
    pub z: Subspace<F>,
}

impl<F: Field> PairFrame<F> {
    pub fn new(up: &Subspace<F>, um: &Subspace<F>) -> Result<Self> {
        check_isotropic(up)?;
        check_isotropic(um)?;
        let w0 = up.meet(um)?;
        let wp = up.meet(&perp(um))?;
        let wm = um.meet(&perp(up))?;
        let w = wp.join(&wm)?;
        let z = perp(&up.join(um)?);
        Ok(PairFrame {
            up: up.clone(),
            um: um.clone(),
            w0,
            wp,
            wm,
            w,
            z,
        })
    }

    /// dim π(S) = dim(S+W) − dim W for S ⊆ W^⊥.
    pub fn pi_dim(&self, s: &Subspace<F>) -> Result<usize> {
        Ok(s.join(&self.w)?.dim() - self.w.dim())
    }
}

/// Everything computed along the way to b₁..b₁₅.
#[derive(Clone, Debug)]
pub struct TripleAnalysis<F: Field> {
    pub theta: ThetaInvariants,
    pub b: BInvariants,
    pub x: Subspace<F>,
    pub x0: Subspace<F>,
    pub x1: Subspace<F>,
    /// dim π(Z∩V), which must equal b₁₄.
    pub b14_via_z: usize,
    /// M_ij = (x_i⁺, x_j) on the canonical basis of X.
    pub pairing: Matrix<F>,
}

impl<F: Field> TripleAnalysis<F> {
    pub fn pairing_is_alternating(&self) -> bool {
        let f = self.pairing.field();
        let k = self.pairing.rows();
        (0..k).all(|i| {
            f.is_zero(self.pairing.get(i, i))
                && (0..k).all(|j| f.is_zero(&f.add(self.pairing.get(i, j), self.pairing.get(j, i))))
        })
    }
}

fn sub_count(a: usize, b: usize, what: &str) -> Result<usize> {
    a.checked_sub(b)
        .ok_or_else(|| Error::Verification(format!("{what} came out negative")))
}

/// Splits x ∈ U₊+U₋ as x₊ + x₋ with x₊ ∈ U₊, x₋ ∈ U₋.
fn split<F: Field>(f: &F, up: &Subspace<F>, um: &Subspace<F>, x: &[F::Elem]) -> Result<Vec<F::Elem>> {
    let mut rows = up.basis_vectors();
    let k = rows.len();
    rows.extend(um.basis_vectors());
    let c = solve_combination(f, &rows, x)
        .ok_or_else(|| Error::Verification("vector of X not in U+ + U-".into()))?;
    let mut xp = vec![f.zero(); x.len()];
    for (ci, r) in c[..k].iter().zip(&rows[..k]) {
        for (a, b) in xp.iter_mut().zip(r) {
            *a = f.add(a, &f.mul(ci, b));
        }
    }
    Ok(xp)
}

/// (X, X₀, X₁) for the triple.
pub fn x_filtration<F: Field>(
    frame: &PairFrame<F>,
    v: &Subspace<F>,
) -> Result<(Subspace<F>, Subspace<F>, Subspace<F>, Matrix<F>)> {
    let f = v.field().clone();
    let x = frame.up.join(&frame.um)?.meet(v)?;
    let x0 = frame
        .up
        .join(&frame.wm)?
        .meet(v)?
        .join(&frame.wp.join(&frame.um)?.meet(v)?)?;
    let xs = x.basis_vectors();
    // x₊ is only defined modulo W, so W must pair trivially with X
    for wv in frame.w.basis_vectors() {
        for xv in &xs {
            if !f.is_zero(&pairing(&f, &wv, xv)) {
                return Err(Error::Verification("(W, X) is not zero".into()));
            }
        }
    }
    let plus: Vec<Vec<F::Elem>> = xs
        .iter()
        .map(|xv| split(&f, &frame.up, &frame.um, xv))
        .collect::<Result<_>>()?;
    let k = xs.len();
    let mut m = Matrix::zeros(&f, k, k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, pairing(&f, &plus[i], &xs[j]));
        }
    }
    // X₁ = {Σ c_i x_i : Σ_i c_i M_ij = 0 for all j}
    let coeffs = kernel(&m.transpose());
    let mut x1_rows = Vec::new();
    for c in coeffs.basis_vectors() {
        let mut y = vec![f.zero(); v.ambient()];
        for (ci, xv) in c.iter().zip(&xs) {
            for (a, b) in y.iter_mut().zip(xv) {
                *a = f.add(a, &f.mul(ci, b));
            }
        }
        x1_rows.push(y);
    }
    let x1 = Subspace::from_vectors(&f, v.ambient(), x1_rows)?;
    Ok((x, x0, x1, m))
}

pub fn analyze<F: Field>(up: &Subspace<F>, um: &Subspace<F>, v: &Subspace<F>) -> Result<TripleAnalysis<F>> {
    if !is_maximal_isotropic(v) {
        return Err(Error::NotMaximalIsotropic);
    }
    let t = theta(up, um)?;
    let fr = PairFrame::new(up, um)?;
    let dimv = |s: &Subspace<F>| -> Result<usize> { Ok(s.meet(v)?.dim()) };

    let b1 = dimv(&fr.w0)?;
    let b2 = sub_count(t.a0, b1, "b2")?;
    let b3 = sub_count(dimv(&fr.wp)?, b1, "b3")?;
    let b4 = sub_count(dimv(&fr.wm)?, b1, "b4")?;
    let b5 = sub_count(dimv(&fr.up)?, b1 + b3, "b5")?;
    let b6 = sub_count(dimv(&fr.um)?, b1 + b4, "b6")?;
    let wv = dimv(&fr.w)?;
    let b7 = sub_count(wv, b1 + b3 + b4, "b7")?;
    let b8 = sub_count(dimv(&fr.wp.join(&fr.um)?)?, wv + b6, "b8")?;
    let b9 = sub_count(dimv(&fr.up.join(&fr.wm)?)?, wv + b5, "b9")?;
    let b10 = sub_count(t.a_plus, b3 + b7 + b8, "b10")?;
    let b11 = sub_count(t.a_minus, b4 + b7 + b9, "b11")?;

    let (x, x0, x1, m) = x_filtration(&fr, v)?;
    if !x0.is_subspace_of(&x1) {
        return Err(Error::Verification("X0 is not contained in X1".into()));
    }
    let b12 = x1.dim() - x0.dim();
    let b15 = x.dim() - x1.dim();
    let pix = fr.pi_dim(&x)?;
    let b13 = sub_count(t.a1, pix + b12, "b13")?;
    let b14 = sub_count(t.a2, b12 + b13, "b14")?;
    let b14_via_z = fr.pi_dim(&fr.z.meet(v)?)?;

    Ok(TripleAnalysis {
        theta: t,
        b: BInvariants::new([b1, b2, b3, b4, b5, b6, b7, b8, b9, b10, b11, b12, b13, b14, b15]),
        x,
        x0,
        x1,
        b14_via_z,
        pairing: m,
    })
}

pub fn b_invariants<F: Field>(up: &Subspace<F>, um: &Subspace<F>, v: &Subspace<F>) -> Result<BInvariants> {
    Ok(analyze(up, um, v)?.b)
}

/// The violated relations among a₀ = b₁+b₂, a₊ = b₃+b₇+b₈+b₁₀, a₋ = b₄+b₇+b₉+b₁₁,
/// a₁ = b₅+b₆+b₈+b₉+2b₁₂+b₁₃+b₁₅, a₂ = b₁₂+b₁₃+b₁₄ and evenness of b₁₅.
pub fn verify_relations(b: &BInvariants, t: &ThetaInvariants) -> Vec<String> {
    let g = |j| b.get(j);
    let mut bad = Vec::new();
    if t.a0 != g(1) + g(2) {
        bad.push("a0 = b1+b2".to_string());
    }
    if t.a_plus != g(3) + g(7) + g(8) + g(10) {
        bad.push("a+ = b3+b7+b8+b10".to_string());
    }
    if t.a_minus != g(4) + g(7) + g(9) + g(11) {
        bad.push("a- = b4+b7+b9+b11".to_string());
    }
    if t.a1 != g(5) + g(6) + g(8) + g(9) + 2 * g(12) + g(13) + g(15) {
        bad.push("a1 = b5+b6+b8+b9+2b12+b13+b15".to_string());
    }
    if t.a2 != g(12) + g(13) + g(14) {
        bad.push("a2 = b12+b13+b14".to_string());
    }
    if g(15) % 2 != 0 {
        bad.push("b15 even".to_string());
    }
    bad
}
