use super::SymMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lowest `n` eigenpairs of a dense symmetric matrix, ascending. Eigenvectors
/// are the columns of the returned matrix.
pub fn dense_lowest(m: &DMatrix<f64>, n: usize) -> (Vec<f64>, DMatrix<f64>) {
    if m.nrows() == 2 {
        return two_by_two(m, n);
    }
    // faer rather than nalgebra's SymmetricEigen: the latter occasionally
    // returns eigenvectors with O(1e-2) residuals.
    let eig = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]).selfadjoint_eigendecomposition(faer::Side::Lower);
    let (s, u) = (eig.s().column_vector(), eig.u());
    let n = n.min(m.nrows());
    let values = (0..n).map(|i| s.read(i)).collect();
    let mut vecs = DMatrix::zeros(m.nrows(), n);
    for c in 0..n {
        let mut v = DVector::from_fn(m.nrows(), |i, _| u.read(i, c));
        fix_sign(&mut v);
        vecs.set_column(c, &v);
    }
    (values, vecs)
}

/// All eigenpairs of a dense Hermitian matrix, ascending, with eigenvectors
/// as columns. Only the lower triangle is read.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    use faer::complex_native::c64;
    let n = m.nrows();
    let eig = faer::Mat::<c64>::from_fn(n, n, |i, j| c64::new(m[(i, j)].re, m[(i, j)].im)).selfadjoint_eigendecomposition(faer::Side::Lower);
    let (s, u) = (eig.s().column_vector(), eig.u());
    let values = (0..n).map(|i| s.read(i).re).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| {
        let z = u.read(i, j);
        C64::new(z.re, z.im)
    });
    (values, vecs)
}

/// Closed-form 2x2 case. The rotation angle keeps full relative precision in
/// the small eigenvector components, which the iterative solver does not
/// when the off-diagonal element is tiny.
fn two_by_two(m: &DMatrix<f64>, n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let (a, b, c) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
    let mean = 0.5 * (a + c);
    let r = (0.5 * (a - c)).hypot(b);
    let phi = 0.5 * (2.0 * b).atan2(a - c);
    let (sn, cs) = phi.sin_cos();
    let mut lo = DVector::from_vec(vec![-sn, cs]);
    let mut hi = DVector::from_vec(vec![cs, sn]);
    fix_sign(&mut lo);
    fix_sign(&mut hi);
    let n = n.min(2);
    let values = [mean - r, mean + r][..n].to_vec();
    let vecs = DMatrix::from_columns(&[lo, hi][..n]);
    (values, vecs)
}

/// Makes the largest-magnitude component positive so eigenvectors are
/// reproducible across solvers.
pub(crate) fn fix_sign(v: &mut DVector<f64>) {
    let k = v.iamax();
    if v[k] < 0.0 {
        v.neg_mut();
    }
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Krylov dimension per restart.
    pub max_krylov: usize,
    pub max_restarts: usize,
    /// Converged when `||Hv - Ev|| <= tol * ||H||`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { max_krylov: 300, max_restarts: 60, tol: 1e-11, seed: 0x5eed }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    // twice is enough
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Lowest `n` eigenpairs by Lanczos with full reorthogonalization, explicit
/// restarts and locking of converged vectors (one eigenpair per sweep).
pub fn lanczos_lowest(h: &SymMatrix, n: usize, opts: &LanczosOptions) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dim = h.dim();
    let n = n.min(dim);
    let hnorm = h.max_row_sum().max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::new();

    for _ in 0..n {
        let mut start: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mut best_res = f64::INFINITY;
        let mut found = None;
        for _ in 0..opts.max_restarts {
            orthogonalize(&mut start, &locked);
            let s = norm(&start);
            if s == 0.0 {
                start = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
                continue;
            }
            start.iter_mut().for_each(|x| *x /= s);
            let (theta, vec, res) = lanczos_sweep(h, &start, &locked, opts.max_krylov, opts.tol * hnorm);
            best_res = best_res.min(res);
            if res <= opts.tol * hnorm {
                found = Some((theta, vec));
                break;
            }
            start = vec;
        }
        match found {
            Some((_, v)) => locked.push(v),
            None => {
                return Err(Error::NoConvergence {
                    iterations: opts.max_restarts * opts.max_krylov,
                    residual: best_res / hnorm,
                })
            }
        }
    }

    // Rayleigh-Ritz on the locked space to order and polish the pairs.
    let k = locked.len();
    let mut small = DMatrix::zeros(k, k);
    let hv: Vec<Vec<f64>> = locked.iter().map(|v| h.matvec(v)).collect();
    for i in 0..k {
        for j in 0..k {
            small[(i, j)] = dot(&locked[i], &hv[j]);
        }
    }
    let small = (&small + small.transpose()) * 0.5;
    let (vals, coeffs) = dense_lowest(&small, k);
    let mut vecs = DMatrix::zeros(dim, k);
    for c in 0..k {
        let mut v = DVector::zeros(dim);
        for (i, lv) in locked.iter().enumerate() {
            let a = coeffs[(i, c)];
            v.iter_mut().zip(lv).for_each(|(x, y)| *x += a * y);
        }
        v /= v.norm();
        fix_sign(&mut v);
        vecs.set_column(c, &v);
    }
    Ok((vals, vecs))
}

/// One Lanczos run; returns the lowest Ritz pair and its residual norm.
fn lanczos_sweep(h: &SymMatrix, start: &[f64], locked: &[Vec<f64>], max_m: usize, tol: f64) -> (f64, Vec<f64>, f64) {
    let dim = h.dim();
    let max_m = max_m.min(dim - locked.len()).max(1);
    let mut q: Vec<Vec<f64>> = vec![start.to_vec()];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut best = (0.0, start.to_vec(), f64::INFINITY);
    for j in 0..max_m {
        let mut w = h.matvec(&q[j]);
        let a = dot(&w, &q[j]);
        alpha.push(a);
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &q);
        let b = norm(&w);
        let m = j + 1;
        let check = m == max_m || b < 1e-14 || m % 10 == 0;
        if check {
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alpha[i];
                if i + 1 < m {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let (ev, y) = dense_lowest(&t, 1);
            let res = (b * y[(m - 1, 0)]).abs();
            let mut v = vec![0.0; dim];
            for (i, qi) in q.iter().enumerate() {
                let c = y[(i, 0)];
                v.iter_mut().zip(qi).for_each(|(x, z)| *x += c * z);
            }
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            best = (ev[0], v, res);
            if res <= tol * 0.1 || b < 1e-14 {
                // confirm with a true residual
                let hv = h.matvec(&best.1);
                let r: f64 = hv.iter().zip(&best.1).map(|(x, y)| (x - best.0 * y).powi(2)).sum::<f64>().sqrt();
                best.2 = r;
                break;
            }
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        q.push(w);
    }
    if best.2.is_finite() {
        let hv = h.matvec(&best.1);
        best.2 = hv.iter().zip(&best.1).map(|(x, y)| (x - best.0 * y).powi(2)).sum::<f64>().sqrt();
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CsrMatrix;

    fn laplacian(n: usize) -> SymMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SymMatrix::from_csr(CsrMatrix::from_triplets(n, t))
    }

    #[test]
    fn lanczos_matches_closed_form_laplacian() {
        let n = 200;
        let h = laplacian(n);
        let (vals, vecs) = lanczos_lowest(&h, 3, &LanczosOptions::default()).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let x = std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64;
            let exact = 2.0 - 2.0 * x.cos();
            assert!((v - exact).abs() < 1e-10, "{k}: {v} vs {exact}");
        }
        let g = vecs.column(0).clone_owned();
        let r = DVector::from_vec(h.matvec(g.as_slice())) - &g * vals[0];
        assert!(r.norm() < 1e-9);
    }

    #[test]
    fn dense_sorted_ascending() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let (v, _) = dense_lowest(&m, 2);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
    }
}
