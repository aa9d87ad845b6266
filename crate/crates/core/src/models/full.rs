//! Full computational-basis Hamiltonians. Bit `i` of a basis index set means
//! spin `i` is down, so `sigma^z_i = 1 - 2 bit_i`. Biclique spins `0..L_A`
//! form part A.

use super::{BasisKind, HSplit, HamiltonianRep, ModelSpec};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, SymMatrix};

/// Largest total qubit count accepted by the full-space builders.
pub const FULL_SPACE_LIMIT: usize = 14;
/// Grover's `H2` is dense in the full space; its limit is lower.
const GROVER_FULL_LIMIT: usize = 12;

fn z_sum(bits: usize, range: std::ops::Range<usize>) -> f64 {
    range.map(|i| if bits >> i & 1 == 0 { 1.0 } else { -1.0 }).sum()
}

fn sx_full(l: usize) -> CsrMatrix {
    let dim = 1usize << l;
    let mut t = Vec::with_capacity(l * dim);
    for a in 0..dim {
        for i in 0..l {
            t.push((a ^ (1 << i), a, 1.0));
        }
    }
    CsrMatrix::from_triplets(dim, t)
}

/// `(H1, H2)` in the full computational basis. Grover marks state 0.
pub fn build_h_split_full(spec: &ModelSpec) -> Result<HSplit> {
    spec.validate()?;
    let l = spec.size();
    let limit = if matches!(spec, ModelSpec::Grover { .. }) { GROVER_FULL_LIMIT } else { FULL_SPACE_LIMIT };
    if l > limit {
        return Err(Error::TooLarge { size: l, limit });
    }
    let dim = 1usize << l;
    let basis = BasisKind::FullComputational { l };
    let (h1, h2) = match *spec {
        ModelSpec::Grover { .. } => {
            let h1 = CsrMatrix::from_triplets(dim, vec![(0, 0, -1.0)]);
            let w = -1.0 / dim as f64;
            let mut t = Vec::with_capacity(dim * dim);
            for a in 0..dim {
                for b in 0..dim {
                    t.push((a, b, w));
                }
            }
            (h1, CsrMatrix::from_triplets(dim, t))
        }
        ModelSpec::PSpin { p, k, lambda, .. } => {
            let lf = l as f64;
            let diag: Vec<f64> =
                (0..dim).map(|a| -lambda * lf.powi(1 - p as i32) * z_sum(a, 0..l).powi(p as i32)).collect();
            let sx = sx_full(l);
            let mut h1 = CsrMatrix::diagonal_from(&diag);
            if lambda < 1.0 {
                let mut xk = sx.clone();
                for _ in 1..k {
                    xk = xk.mul(&sx);
                }
                h1 = CsrMatrix::lin_comb(1.0, &h1, (1.0 - lambda) * lf.powi(1 - k as i32), &xk);
            }
            let mut h2 = sx;
            h2.scale(-1.0);
            (h1, h2)
        }
        ModelSpec::Biclique { l_a, j, .. } => {
            let (h_a, h_b) = spec.biclique_fields().unwrap();
            let diag: Vec<f64> = (0..dim)
                .map(|a| {
                    let za = z_sum(a, 0..l_a);
                    let zb = z_sum(a, l_a..l);
                    j * za * zb + h_a * za + h_b * zb
                })
                .collect();
            (CsrMatrix::diagonal_from(&diag), sx_full(l))
        }
    };
    Ok(HSplit {
        h1: HamiltonianRep::new(basis, SymMatrix::from_csr(h1))?,
        h2: HamiltonianRep::new(basis, SymMatrix::from_csr(h2))?,
    })
}

/// `H1 + theta * H2` in the full computational basis.
pub fn build_full_space(spec: &ModelSpec, theta: f64) -> Result<HamiltonianRep> {
    Ok(build_h_split_full(spec)?.at(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense_lowest;
    use crate::models::build_hamiltonian;

    #[test]
    fn size_guard() {
        assert!(build_full_space(&ModelSpec::pspin(2, 3, 1, 1.0), 1.0).is_ok());
        assert!(matches!(
            build_full_space(&ModelSpec::pspin(15, 3, 1, 1.0), 1.0),
            Err(Error::TooLarge { size: 15, .. })
        ));
    }

    #[test]
    fn grover_full_ground_energy_matches_two_level() {
        for theta in [0.3, 1.0, 1.7] {
            let spec = ModelSpec::grover(3);
            let (f, _) = dense_lowest(&build_full_space(&spec, theta).unwrap().matrix.to_dense(), 1);
            let (r, _) = dense_lowest(&build_hamiltonian(&spec, theta).unwrap().matrix.to_dense(), 1);
            assert!((f[0] - r[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn biclique_theta_zero_is_diagonal() {
        let h = build_full_space(&ModelSpec::biclique(3, 2, 1.0, 0.49, 0.5), 0.0).unwrap();
        assert!(h.matrix.is_diagonal());
    }
}
