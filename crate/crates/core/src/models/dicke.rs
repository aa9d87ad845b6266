//! Collective-spin (Dicke) operators for `L` spin-1/2 particles in the
//! fully symmetric sector `j = L/2`. Basis index `n` counts up spins, so
//! `m = n - L/2`.

use crate::linalg::CsrMatrix;

/// Diagonal of `sum_i sigma^z_i = 2 J_z`.
pub fn sz_diag(l: usize) -> Vec<f64> {
    (0..=l).map(|n| 2.0 * n as f64 - l as f64).collect()
}

/// `<m+1| J_+ |m>` for the Dicke state with `n` up spins.
pub fn raise_element(l: usize, n: usize) -> f64 {
    let j = l as f64 / 2.0;
    let m = n as f64 - j;
    (j * (j + 1.0) - m * (m + 1.0)).sqrt()
}

/// `sum_i sigma^x_i = J_+ + J_-` as a sparse tridiagonal matrix.
pub fn sx(l: usize) -> CsrMatrix {
    let mut t = Vec::with_capacity(2 * l);
    for n in 0..l {
        let v = raise_element(l, n);
        t.push((n + 1, n, v));
        t.push((n, n + 1, v));
    }
    CsrMatrix::from_triplets(l + 1, t)
}
