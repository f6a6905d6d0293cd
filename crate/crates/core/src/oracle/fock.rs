//! Sparse operators on a product of truncated Fock spaces.
//!
//! Mode 0 is the most significant factor of the product basis, so the basis
//! index of `|n_0, n_1, ...>` is `((n_0 d_1 + n_1) d_2 + n_2) ...`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};

pub type Op = CsMat<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Entries below this magnitude are dropped when converting dense matrices.
pub const DROP_TOLERANCE: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    pub dims: Vec<usize>,
}

impl FockSpace {
    pub fn new(dims: &[usize], budget: usize) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidParameter(format!("Fock dimensions must be positive, got {dims:?}")));
        }
        let dim = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match dim {
            Some(d) if d <= budget => Ok(Self { dims: dims.to_vec() }),
            _ => Err(Error::DimensionOverflow { dim: dim.unwrap_or(usize::MAX), budget }),
        }
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn identity(&self) -> Op {
        identity(self.dim())
    }

    /// Embeds a single-mode operator acting on `mode`.
    pub fn embed(&self, mode: usize, op: &Op) -> Op {
        let before: usize = self.dims[..mode].iter().product();
        let after: usize = self.dims[mode + 1..].iter().product();
        kron(&kron(&identity(before), op), &identity(after))
    }

    pub fn destroy(&self, mode: usize) -> Op {
        self.embed(mode, &destroy(self.dims[mode]))
    }

    pub fn number(&self, mode: usize) -> Op {
        self.embed(mode, &number(self.dims[mode]))
    }

    /// Basis index of an occupation tuple.
    pub fn index(&self, occupation: &[usize]) -> usize {
        occupation.iter().zip(&self.dims).fold(0, |acc, (&n, &d)| acc * d + n)
    }

    /// Occupation tuple of a basis index.
    pub fn occupation(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }
}

pub fn identity(n: usize) -> Op {
    CsMat::eye(n)
}

pub fn destroy(n: usize) -> Op {
    let mut t = TriMat::new((n, n));
    for m in 1..n {
        t.add_triplet(m - 1, m, Complex64::new((m as f64).sqrt(), 0.0));
    }
    t.to_csr()
}

pub fn number(n: usize) -> Op {
    diagonal(&(0..n).map(|m| Complex64::new(m as f64, 0.0)).collect::<Vec<_>>())
}

pub fn diagonal(values: &[Complex64]) -> Op {
    let n = values.len();
    let mut t = TriMat::new((n, n));
    for (i, v) in values.iter().enumerate() {
        if *v != ZERO {
            t.add_triplet(i, i, *v);
        }
    }
    t.to_csr()
}

pub fn kron(a: &Op, b: &Op) -> Op {
    sprs::kronecker_product(a.view(), b.view()).to_csr()
}

pub fn adjoint(a: &Op) -> Op {
    a.transpose_view().map(|c| c.conj()).to_csr()
}

pub fn transpose(a: &Op) -> Op {
    a.transpose_view().to_owned().to_csr()
}

pub fn conj(a: &Op) -> Op {
    a.map(|c| c.conj())
}

pub fn scale(a: &Op, s: Complex64) -> Op {
    a.map(|c| c * s)
}

pub fn add(a: &Op, b: &Op) -> Op {
    (a + b).to_csr()
}

pub fn mul(a: &Op, b: &Op) -> Op {
    (a * b).to_csr()
}

/// Sum of terms; `None` entries are skipped.
pub fn sum(n: usize, terms: impl IntoIterator<Item = Op>) -> Op {
    terms.into_iter().fold(CsMat::zero((n, n)), |acc, t| add(&acc, &t))
}

pub fn to_dense(a: &Op) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(a.rows(), a.cols());
    for (v, (i, j)) in a.iter() {
        m[(i, j)] += *v;
    }
    m
}

pub fn from_dense(m: &DMatrix<Complex64>) -> Op {
    let mut t = TriMat::new((m.nrows(), m.ncols()));
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v.norm() > DROP_TOLERANCE {
                t.add_triplet(i, j, v);
            }
        }
    }
    t.to_csr()
}

/// `y = A x` for a CSR matrix.
pub fn apply(a: &Op, x: &[Complex64], y: &mut [Complex64]) {
    debug_assert!(a.is_csr());
    for (row, out) in a.outer_iterator().zip(y.iter_mut()) {
        let mut acc = ZERO;
        for (j, v) in row.iter() {
            acc += v * x[j];
        }
        *out = acc;
    }
}

/// Largest `|A - A^dag|` entry.
pub fn hermiticity_defect(a: &Op) -> f64 {
    let d = add(a, &scale(&adjoint(a), -ONE));
    d.data().iter().fold(0.0, |m, c| m.max(c.norm()))
}

/// Matrix exponential of a single-mode operator, computed densely.
pub fn expm(a: &Op) -> Op {
    from_dense(&to_dense(a).exp())
}
