//! Linear subspaces of F^m stored by their canonical RREF basis.
//!
//! Coordinate indices in this crate are 1-based, matching e_1, ..., e_m.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace<F: Field> {
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    /// Span of the rows of `vectors`, canonicalized.
    pub fn canonicalize(vectors: &Matrix<F>) -> Self {
        Subspace {
            basis: vectors.rref().0,
        }
    }

    pub fn from_vectors(field: &F, ambient: usize, vectors: Vec<Vec<F::Elem>>) -> Result<Self> {
        let m = Matrix::from_rows_with_cols(field, vectors, ambient)?;
        Ok(Self::canonicalize(&m))
    }

    pub fn from_i64(field: &F, ambient: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        let rows = vectors
            .iter()
            .map(|v| v.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_vectors(field, ambient, rows)
    }

    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(field, 0, ambient),
        }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        Subspace {
            basis: Matrix::identity(field, ambient),
        }
    }

    /// span{e_i : i in indices}, 1-based.
    pub fn coordinate(field: &F, ambient: usize, indices: &[usize]) -> Self {
        let mut idx: Vec<usize> = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let mut m = Matrix::zeros(field, idx.len(), ambient);
        for (r, &i) in idx.iter().enumerate() {
            m.set(r, i - 1, field.one());
        }
        Subspace { basis: m }
    }

    pub fn field(&self) -> &F {
        self.basis.field()
    }
    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }
    pub fn basis_vectors(&self) -> Vec<Vec<F::Elem>> {
        self.basis.row_vecs()
    }

    /// 1-based pivot columns of the canonical basis.
    pub fn pivots(&self) -> Vec<usize> {
        let f = self.field();
        (0..self.dim())
            .map(|r| {
                self.basis
                    .row(r)
                    .iter()
                    .position(|x| !f.is_zero(x))
                    .expect("basis rows are nonzero")
                    + 1
            })
            .collect()
    }

    /// True when the subspace is spanned by standard basis vectors.
    pub fn is_coordinate(&self) -> bool {
        let f = self.field();
        (0..self.dim()).all(|r| self.basis.row(r).iter().filter(|x| !f.is_zero(x)).count() == 1)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ambient() != other.ambient() {
            return Err(Error::AmbientMismatch(self.ambient(), other.ambient()));
        }
        Ok(())
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::canonicalize(&self.basis.vstack(&other.basis)?))
    }

    /// Intersection via the Zassenhaus block reduction.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = self.field();
        let m = self.ambient();
        let rows = self.dim() + other.dim();
        let mut z = Matrix::zeros(f, rows, 2 * m);
        for r in 0..self.dim() {
            for c in 0..m {
                let x = self.basis.get(r, c).clone();
                z.set(r, c, x.clone());
                z.set(r, m + c, x);
            }
        }
        for r in 0..other.dim() {
            for c in 0..m {
                z.set(self.dim() + r, c, other.basis.get(r, c).clone());
            }
        }
        let (red, pivots) = z.rref();
        let mut out = Vec::new();
        for (r, &p) in pivots.iter().enumerate() {
            if p >= m {
                out.push(red.row(r)[m..].to_vec());
            }
        }
        Self::from_vectors(f, m, out)
    }

    pub fn contains_vector(&self, v: &[F::Elem]) -> bool {
        let f = self.field();
        let mut w = v.to_vec();
        for (r, p) in self.pivots().into_iter().enumerate() {
            let c = w[p - 1].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (j, b) in self.basis.row(r).iter().enumerate() {
                if !f.is_zero(b) {
                    w[j] = f.sub(&w[j], &f.mul(&c, b));
                }
            }
        }
        w.iter().all(|x| f.is_zero(x))
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient() == other.ambient()
            && (0..self.dim()).all(|r| other.contains_vector(self.basis.row(r)))
    }

    /// Image under x -> g x.
    pub fn image(&self, g: &Matrix<F>) -> Result<Self> {
        if g.cols() != self.ambient() || g.rows() != self.ambient() {
            return Err(Error::AmbientMismatch(g.cols(), self.ambient()));
        }
        Ok(Self::canonicalize(&self.basis.mul(&g.transpose())?))
    }

    /// Image when `gt` is already the transpose of g.
    pub fn image_by_transpose(&self, gt: &Matrix<F>) -> Self {
        Self::canonicalize(&self.basis.mul(gt).expect("ambient checked by caller"))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ambient": self.ambient(),
            "q": self.field().descriptor(),
            "basis": self.basis.to_json(),
        })
    }

    pub fn from_json(field: &F, v: &Value) -> Result<Self> {
        let ambient = v["ambient"]
            .as_u64()
            .ok_or_else(|| Error::Parse("missing ambient".into()))? as usize;
        if v["q"] != field.descriptor() {
            return Err(Error::Parse(format!(
                "field mismatch: {} vs {}",
                v["q"],
                field.descriptor()
            )));
        }
        let m = Matrix::from_json(field, &v["basis"], ambient)?;
        Ok(Self::canonicalize(&m))
    }
}

/// {x : M x = 0} as a subspace of F^{cols}.
pub fn kernel<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    Subspace {
        basis: m.kernel_basis(),
    }
}

/// 1-based standard basis vector e_i of F^m.
pub fn unit<F: Field>(field: &F, m: usize, i: usize) -> Vec<F::Elem> {
    let mut v = vec![field.zero(); m];
    v[i - 1] = field.one();
    v
}
