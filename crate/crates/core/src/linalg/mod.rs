//! Real symmetric matrices with dense/sparse storage, and eigensolvers for
//! their lowest eigenpairs.

mod csr;
mod eigen;

pub use csr::CsrMatrix;
pub use eigen::{dense_lowest, hermitian_eigen, lanczos_lowest, LanczosOptions};

use nalgebra::DMatrix;

/// Dimension above which a [`SymMatrix`] is kept in sparse row storage.
pub const DENSE_LIMIT: usize = 64;

/// Real symmetric matrix; dense up to [`DENSE_LIMIT`], CSR beyond.
#[derive(Clone, Debug, PartialEq)]
pub enum SymMatrix {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix),
}

impl SymMatrix {
    pub fn from_dense(m: DMatrix<f64>) -> Self {
        if m.nrows() <= DENSE_LIMIT {
            SymMatrix::Dense(m)
        } else {
            SymMatrix::Sparse(CsrMatrix::from_dense(&m))
        }
    }

    pub fn from_csr(m: CsrMatrix) -> Self {
        if m.dim() <= DENSE_LIMIT {
            SymMatrix::Dense(m.to_dense())
        } else {
            SymMatrix::Sparse(m)
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_csr(CsrMatrix::from_triplets(n, Vec::new()))
    }

    pub fn dim(&self) -> usize {
        match self {
            SymMatrix::Dense(m) => m.nrows(),
            SymMatrix::Sparse(m) => m.dim(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            SymMatrix::Dense(m) => m[(i, j)],
            SymMatrix::Sparse(m) => m.get(i, j),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            SymMatrix::Dense(m) => m.clone(),
            SymMatrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_csr(&self) -> CsrMatrix {
        match self {
            SymMatrix::Dense(m) => CsrMatrix::from_dense(m),
            SymMatrix::Sparse(m) => m.clone(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        match self {
            SymMatrix::Dense(m) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = (0..x.len()).map(|j| m[(i, j)] * x[j]).sum();
                }
            }
            SymMatrix::Sparse(m) => m.matvec(x, &mut y),
        }
        y
    }

    /// `a * x + b * y`, stored according to the dimension.
    pub fn lin_comb(a: f64, x: &SymMatrix, b: f64, y: &SymMatrix) -> SymMatrix {
        match (x, y) {
            (SymMatrix::Dense(p), SymMatrix::Dense(q)) => SymMatrix::Dense(p * a + q * b),
            _ => SymMatrix::from_csr(CsrMatrix::lin_comb(a, &x.to_csr(), b, &y.to_csr())),
        }
    }

    /// Maximum absolute row sum (the induced infinity norm).
    pub fn max_row_sum(&self) -> f64 {
        match self {
            SymMatrix::Dense(m) => m
                .row_iter()
                .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            SymMatrix::Sparse(m) => m.max_row_sum(),
        }
    }

    /// Largest `|A_ij - A_ji|` relative to the largest entry.
    pub fn relative_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        match self {
            SymMatrix::Dense(m) => {
                for i in 0..n {
                    for j in 0..n {
                        scale = scale.max(m[(i, j)].abs());
                        worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
                    }
                }
            }
            SymMatrix::Sparse(m) => {
                for i in 0..n {
                    for (j, v) in m.row(i) {
                        scale = scale.max(v.abs());
                        worst = worst.max((v - m.get(j, i)).abs());
                    }
                }
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        match self {
            SymMatrix::Dense(m) => (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == 0.0)),
            SymMatrix::Sparse(m) => (0..n).all(|i| m.row(i).all(|(j, _)| j == i)),
        }
    }
}
