use super::{BasisKind, ModelSpec};
use crate::error::Result;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A projector that is diagonal in its basis, stored by its support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projector {
    pub support: Vec<usize>,
}

impl Projector {
    pub fn to_matrix(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for &i in &self.support {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.support.len()
    }
}

/// Projective measurement with one outcome value per projector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub basis: BasisKind,
    pub projectors: Vec<Projector>,
    pub labels: Vec<f64>,
}

impl MeasurementBasis {
    /// Groups basis states by an outcome value; values are compared after
    /// rounding to 1e-9.
    pub fn from_values(basis: BasisKind, value: impl Fn(usize) -> f64) -> Self {
        let mut groups: BTreeMap<i64, (f64, Vec<usize>)> = BTreeMap::new();
        for i in 0..basis.dim() {
            let v = value(i);
            groups.entry((v * 1e9).round() as i64).or_insert((v, Vec::new())).1.push(i);
        }
        let (labels, projectors) =
            groups.into_values().map(|(v, support)| (v, Projector { support })).unzip();
        Self { basis, projectors, labels }
    }

    /// The uninformative measurement (identity only).
    pub fn trivial(basis: BasisKind) -> Self {
        Self { basis, projectors: vec![Projector { support: (0..basis.dim()).collect() }], labels: vec![0.0] }
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// Outcome probabilities given the diagonal of a density matrix.
    pub fn probabilities(&self, diag: &[f64]) -> Vec<f64> {
        self.projectors.iter().map(|p| p.support.iter().map(|&i| diag[i]).sum()).collect()
    }

    /// Largest elementwise deviation of `sum_n Pi_n` from the identity.
    pub fn completeness_error(&self) -> f64 {
        let dim = self.basis.dim();
        let mut count = vec![0.0; dim];
        for p in &self.projectors {
            for &i in &p.support {
                count[i] += 1.0;
            }
        }
        count.iter().map(|c: &f64| (c - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Measurement in the reduced basis: marked/unmarked for Grover, total
/// magnetization for p-spin, magnetization imbalance between the two parts
/// for the biclique.
pub fn optimal_measurement(spec: &ModelSpec) -> Result<MeasurementBasis> {
    spec.validate()?;
    let basis = spec.reduced_basis();
    Ok(match *spec {
        ModelSpec::Grover { .. } => MeasurementBasis {
            basis,
            projectors: vec![Projector { support: vec![0] }, Projector { support: vec![1] }],
            labels: vec![1.0, 0.0],
        },
        ModelSpec::PSpin { l, .. } => MeasurementBasis::from_values(basis, |i| 2.0 * i as f64 - l as f64),
        ModelSpec::Biclique { l_a, l_b, .. } => MeasurementBasis::from_values(basis, |i| {
            let za = 2.0 * (i / (l_b + 1)) as f64 - l_a as f64;
            let zb = 2.0 * (i % (l_b + 1)) as f64 - l_b as f64;
            za - zb
        }),
    })
}

/// The same measurement expressed in the full computational basis.
pub fn optimal_measurement_full(spec: &ModelSpec) -> Result<MeasurementBasis> {
    spec.validate()?;
    let l = spec.size();
    let basis = BasisKind::FullComputational { l };
    let z = |a: usize, r: std::ops::Range<usize>| -> f64 { r.map(|i| 1.0 - 2.0 * (a >> i & 1) as f64).sum() };
    Ok(match *spec {
        ModelSpec::Grover { .. } => MeasurementBasis::from_values(basis, |a| if a == 0 { 1.0 } else { 0.0 }),
        ModelSpec::PSpin { .. } => MeasurementBasis::from_values(basis, |a| z(a, 0..l)),
        ModelSpec::Biclique { l_a, .. } => MeasurementBasis::from_values(basis, |a| z(a, 0..l_a) - z(a, l_a..l)),
    })
}
