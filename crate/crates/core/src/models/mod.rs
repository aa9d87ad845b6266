//! Hamiltonians for the Grover, p-spin and biclique models in their
//! symmetry-reduced bases, plus full computational-basis builders used as
//! cross-checks.

pub mod dicke;
mod full;
mod measurement;
mod presets;

pub use full::{build_full_space, build_h_split_full, FULL_SPACE_LIMIT};
pub use measurement::{optimal_measurement, optimal_measurement_full, MeasurementBasis, Projector};
pub use presets::{list_presets, preset, Preset, Transition, PRESET_NAMES};

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, SymMatrix};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// One of the three models together with all its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Grover {
        #[serde(rename = "L")]
        l: usize,
    },
    #[serde(rename = "pspin")]
    PSpin {
        #[serde(rename = "L")]
        l: usize,
        p: u32,
        k: u32,
        lambda: f64,
    },
    Biclique {
        #[serde(rename = "L_A")]
        l_a: usize,
        #[serde(rename = "L_B")]
        l_b: usize,
        #[serde(rename = "J")]
        j: f64,
        #[serde(rename = "W_A")]
        w_a: f64,
        #[serde(rename = "W_B")]
        w_b: f64,
    },
}

impl ModelSpec {
    pub fn grover(l: usize) -> Self {
        ModelSpec::Grover { l }
    }

    pub fn pspin(l: usize, p: u32, k: u32, lambda: f64) -> Self {
        ModelSpec::PSpin { l, p, k, lambda }
    }

    pub fn biclique(l_a: usize, l_b: usize, j: f64, w_a: f64, w_b: f64) -> Self {
        ModelSpec::Biclique { l_a, l_b, j, w_a, w_b }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Grover { .. } => "grover",
            ModelSpec::PSpin { .. } => "pspin",
            ModelSpec::Biclique { .. } => "biclique",
        }
    }

    /// Total number of qubits.
    pub fn size(&self) -> usize {
        match *self {
            ModelSpec::Grover { l } | ModelSpec::PSpin { l, .. } => l,
            ModelSpec::Biclique { l_a, l_b, .. } => l_a + l_b,
        }
    }

    /// Same family at total size `l`. Biclique parts keep their orientation:
    /// the larger part stays on the same side.
    pub fn with_size(&self, l: usize) -> Result<Self> {
        let out = match self.clone() {
            ModelSpec::Grover { .. } => ModelSpec::Grover { l },
            ModelSpec::PSpin { p, k, lambda, .. } => ModelSpec::PSpin { l, p, k, lambda },
            ModelSpec::Biclique { l_a, l_b, j, w_a, w_b } => {
                if l % 2 == 0 {
                    return Err(Error::InvalidModel(format!("biclique total size must be odd, got {l}")));
                }
                let (big, small) = ((l + 1) / 2, (l - 1) / 2);
                if l_a > l_b {
                    ModelSpec::Biclique { l_a: big, l_b: small, j, w_a, w_b }
                } else {
                    ModelSpec::Biclique { l_a: small, l_b: big, j, w_a, w_b }
                }
            }
        };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::Grover { l } => {
                if l == 0 || l > 62 {
                    return Err(Error::InvalidModel(format!("grover needs 1 <= L <= 62, got {l}")));
                }
            }
            ModelSpec::PSpin { l, p, k, lambda } => {
                if l == 0 {
                    return Err(Error::InvalidModel("pspin needs L >= 1".into()));
                }
                if p < 3 || p % 2 == 0 {
                    return Err(Error::InvalidModel(format!("pspin needs odd p >= 3, got {p}")));
                }
                if k == 0 {
                    return Err(Error::InvalidModel("pspin needs k >= 1".into()));
                }
                if !(0.0..=1.0).contains(&lambda) {
                    return Err(Error::InvalidModel(format!("pspin needs lambda in [0, 1], got {lambda}")));
                }
            }
            ModelSpec::Biclique { l_a, l_b, j, w_a, w_b } => {
                if l_a.abs_diff(l_b) != 1 || l_a.min(l_b) == 0 {
                    return Err(Error::InvalidModel(format!(
                        "biclique parts must differ by one spin, got L_A = {l_a}, L_B = {l_b}"
                    )));
                }
                if !(j.is_finite() && w_a.is_finite() && w_b.is_finite()) {
                    return Err(Error::InvalidModel("biclique couplings must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Derived longitudinal fields `(h_A, h_B)` of the biclique model.
    pub fn biclique_fields(&self) -> Option<(f64, f64)> {
        match *self {
            ModelSpec::Biclique { l_a, l_b, j, w_a, w_b } => Some((
                l_b as f64 * j - 2.0 * w_a / l_a as f64,
                l_a as f64 * j - 2.0 * w_b / l_b as f64,
            )),
            _ => None,
        }
    }

    /// Dimension of the reduced basis.
    pub fn reduced_basis(&self) -> BasisKind {
        match *self {
            ModelSpec::Grover { .. } => BasisKind::EffectiveTwoLevel,
            ModelSpec::PSpin { l, .. } => BasisKind::CollectiveSpin { l },
            ModelSpec::Biclique { l_a, l_b, .. } => BasisKind::BipartiteCollective { l_a, l_b },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasisKind {
    /// Span of the marked state and its orthogonal complement within the
    /// uniform superposition.
    EffectiveTwoLevel,
    /// Dicke states of `l` spins, `j = l/2`.
    CollectiveSpin { l: usize },
    /// Dicke(A) tensor Dicke(B).
    BipartiteCollective { l_a: usize, l_b: usize },
    FullComputational { l: usize },
}

impl BasisKind {
    pub fn dim(&self) -> usize {
        match *self {
            BasisKind::EffectiveTwoLevel => 2,
            BasisKind::CollectiveSpin { l } => l + 1,
            BasisKind::BipartiteCollective { l_a, l_b } => (l_a + 1) * (l_b + 1),
            BasisKind::FullComputational { l } => 1 << l,
        }
    }

    /// Quantum numbers of basis state `i`.
    pub fn label(&self, i: usize) -> StateLabel {
        match *self {
            BasisKind::EffectiveTwoLevel => StateLabel::Grover { marked: i == 0 },
            BasisKind::CollectiveSpin { l } => StateLabel::Dicke { m: i as f64 - l as f64 / 2.0 },
            BasisKind::BipartiteCollective { l_a, l_b } => StateLabel::Bipartite {
                m_a: (i / (l_b + 1)) as f64 - l_a as f64 / 2.0,
                m_b: (i % (l_b + 1)) as f64 - l_b as f64 / 2.0,
            },
            BasisKind::FullComputational { .. } => StateLabel::Configuration { bits: i as u64 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateLabel {
    Grover { marked: bool },
    Dicke { m: f64 },
    Bipartite { m_a: f64, m_b: f64 },
    /// Bit `i` set means spin `i` points down.
    Configuration { bits: u64 },
}

/// A real symmetric Hamiltonian in a declared basis.
#[derive(Clone, Debug)]
pub struct HamiltonianRep {
    pub basis: BasisKind,
    pub matrix: SymMatrix,
}

impl HamiltonianRep {
    pub fn new(basis: BasisKind, matrix: SymMatrix) -> Result<Self> {
        if matrix.dim() != basis.dim() {
            return Err(Error::InvalidArgument(format!(
                "matrix dimension {} does not match basis dimension {}",
                matrix.dim(),
                basis.dim()
            )));
        }
        let asym = matrix.relative_asymmetry();
        if asym > 1e-12 {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self { basis, matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn labels(&self) -> Vec<StateLabel> {
        (0..self.dim()).map(|i| self.basis.label(i)).collect()
    }

    /// `a * self + b * other` in the same basis.
    pub fn lin_comb(a: f64, x: &HamiltonianRep, b: f64, y: &HamiltonianRep) -> HamiltonianRep {
        assert_eq!(x.basis, y.basis);
        HamiltonianRep { basis: x.basis, matrix: SymMatrix::lin_comb(a, &x.matrix, b, &y.matrix) }
    }
}

/// The pair `(H1, H2)` with `H(theta) = H1 + theta * H2`.
#[derive(Clone, Debug)]
pub struct HSplit {
    pub h1: HamiltonianRep,
    pub h2: HamiltonianRep,
}

impl HSplit {
    pub fn at(&self, theta: f64) -> HamiltonianRep {
        HamiltonianRep::lin_comb(1.0, &self.h1, theta, &self.h2)
    }

    pub fn basis(&self) -> BasisKind {
        self.h1.basis
    }
}

/// Builds `(H1, H2)` in the model's reduced basis.
pub fn build_h_split(spec: &ModelSpec) -> Result<HSplit> {
    spec.validate()?;
    let basis = spec.reduced_basis();
    let (h1, h2) = match *spec {
        ModelSpec::Grover { l } => {
            let n = (l as f64).exp2();
            let a = 1.0 / n.sqrt();
            let b = ((n - 1.0) / n).sqrt();
            let h1 = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 0.0]);
            let h2 = DMatrix::from_row_slice(2, 2, &[-a * a, -a * b, -a * b, -b * b]);
            (SymMatrix::Dense(h1), SymMatrix::Dense(h2))
        }
        ModelSpec::PSpin { l, p, k, lambda } => {
            let lf = l as f64;
            let sx = dicke::sx(l);
            let zp: Vec<f64> = dicke::sz_diag(l)
                .iter()
                .map(|z| -lambda * lf.powi(1 - p as i32) * z.powi(p as i32))
                .collect();
            let mut h1 = CsrMatrix::diagonal_from(&zp);
            if lambda < 1.0 {
                let mut xk = sx.clone();
                for _ in 1..k {
                    xk = xk.mul(&sx);
                }
                h1 = CsrMatrix::lin_comb(1.0, &h1, (1.0 - lambda) * lf.powi(1 - k as i32), &xk);
            }
            let mut h2 = sx;
            h2.scale(-1.0);
            (SymMatrix::from_csr(h1), SymMatrix::from_csr(h2))
        }
        ModelSpec::Biclique { l_a, l_b, j, .. } => {
            let (h_a, h_b) = spec.biclique_fields().unwrap();
            let za = dicke::sz_diag(l_a);
            let zb = dicke::sz_diag(l_b);
            let nb = l_b + 1;
            let dim = (l_a + 1) * nb;
            let mut diag = vec![0.0; dim];
            for (ia, a) in za.iter().enumerate() {
                for (ib, b) in zb.iter().enumerate() {
                    diag[ia * nb + ib] = j * a * b + h_a * a + h_b * b;
                }
            }
            let h1 = CsrMatrix::diagonal_from(&diag);
            let mut t = Vec::new();
            for ia in 0..=l_a {
                for ib in 0..=l_b {
                    let i = ia * nb + ib;
                    if ia < l_a {
                        let v = dicke::raise_element(l_a, ia);
                        t.push((i + nb, i, v));
                        t.push((i, i + nb, v));
                    }
                    if ib < l_b {
                        let v = dicke::raise_element(l_b, ib);
                        t.push((i + 1, i, v));
                        t.push((i, i + 1, v));
                    }
                }
            }
            let h2 = CsrMatrix::from_triplets(dim, t);
            (SymMatrix::from_csr(h1), SymMatrix::from_csr(h2))
        }
    };
    Ok(HSplit { h1: HamiltonianRep::new(basis, h1)?, h2: HamiltonianRep::new(basis, h2)? })
}

/// `H1 + theta * H2` in the reduced basis.
pub fn build_hamiltonian(spec: &ModelSpec, theta: f64) -> Result<HamiltonianRep> {
    Ok(build_h_split(spec)?.at(theta))
}
