//! Quantum and classical Fisher information and the Cramér–Rao bound.

use crate::dynamics::SymmetricState;
use crate::error::{Error, Result};
use crate::models::{build_h_split, BasisKind, HSplit, MeasurementBasis, ModelSpec};
use crate::spectra::{eigensolve_matrix, Solver, DEGENERACY_THRESHOLD};
use crate::linalg::hermitian_eigen;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Default eigenvalue-pair floor for the mixed-state sum.
pub const EIG_FLOOR: f64 = 1e-10;
/// Outcomes with lower probability are skipped in the classical sum.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum QuantumState {
    Pure { vector: DVector<C64>, basis: BasisKind },
    Mixed { rho: DMatrix<C64>, basis: BasisKind },
    /// Permutation-invariant density matrix of a collective-spin model in
    /// compressed form. Populations and reference states refer to the
    /// reduced (collective) basis.
    Symmetric(SymmetricState),
}

impl QuantumState {
    pub fn pure_real(v: &DVector<f64>, basis: BasisKind) -> Self {
        QuantumState::Pure { vector: v.map(|x| C64::new(x, 0.0)), basis }
    }

    pub fn basis(&self) -> BasisKind {
        match self {
            QuantumState::Pure { basis, .. } | QuantumState::Mixed { basis, .. } => *basis,
            QuantumState::Symmetric(s) => s.space.reduced,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure { vector, .. } => vector.len(),
            QuantumState::Mixed { rho, .. } => rho.nrows(),
            QuantumState::Symmetric(s) => s.space.reduced.dim(),
        }
    }

    /// Populations in the basis.
    pub fn populations(&self) -> Vec<f64> {
        match self {
            QuantumState::Pure { vector, .. } => vector.iter().map(|a| a.norm_sqr()).collect(),
            QuantumState::Mixed { rho, .. } => (0..rho.nrows()).map(|i| rho[(i, i)].re).collect(),
            QuantumState::Symmetric(s) => s.populations(),
        }
    }

    /// Dense density matrix; for symmetric states this is the full
    /// `2^L` matrix.
    pub fn density(&self) -> Result<DMatrix<C64>> {
        match self {
            QuantumState::Pure { vector, .. } => Ok(vector * vector.adjoint()),
            QuantumState::Mixed { rho, .. } => Ok(rho.clone()),
            QuantumState::Symmetric(s) => s.to_dense(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            QuantumState::Pure { vector, .. } => vector.norm_squared(),
            QuantumState::Mixed { rho, .. } => rho.trace().re,
            QuantumState::Symmetric(s) => s.trace(),
        }
    }

    /// `<psi|rho|psi>` for a pure reference state.
    pub fn fidelity_with(&self, psi: &DVector<C64>) -> f64 {
        match self {
            QuantumState::Pure { vector, .. } => psi.dotc(vector).norm_sqr(),
            QuantumState::Mixed { rho, .. } => psi.dotc(&(rho * psi)).re,
            QuantumState::Symmetric(s) => s.fidelity_with(psi),
        }
    }

    /// Checks the norm (pure) or trace and positivity (mixed) to 1e-10.
    pub fn validate(&self) -> Result<()> {
        match self {
            QuantumState::Pure { vector, .. } => {
                let drift = (vector.norm() - 1.0).abs();
                if drift > 1e-10 {
                    return Err(Error::NormDrift { t: 0.0, drift });
                }
            }
            QuantumState::Mixed { rho, .. } => {
                let drift = (rho.trace().re - 1.0).abs();
                if drift > 1e-10 {
                    return Err(Error::TraceDrift { t: 0.0, drift });
                }
                let min = SymmetricEigen::new(rho.clone()).eigenvalues.min();
                if min < -1e-10 {
                    return Err(Error::NegativeDensity(min));
                }
            }
            QuantumState::Symmetric(s) => {
                let drift = (s.trace() - 1.0).abs();
                if drift > 1e-10 {
                    return Err(Error::TraceDrift { t: 0.0, drift });
                }
                let min = s.min_eigenvalue();
                if min < -1e-10 {
                    return Err(Error::NegativeDensity(min));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FisherMethod {
    PureOverlap,
    SpectralSum,
    MixedSld,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FisherEstimate {
    pub value: f64,
    pub method: FisherMethod,
    pub delta: Option<f64>,
}

/// Ground state of `H1 + theta H2`, failing on a degenerate ground level.
pub fn ground_state(split: &HSplit, theta: f64) -> Result<DVector<f64>> {
    let s = eigensolve_matrix(&split.at(theta).matrix, 2, Solver::Auto)?;
    let gap = s.energies[1] - s.energies[0];
    if gap < DEGENERACY_THRESHOLD {
        return Err(Error::Degenerate { gap });
    }
    Ok(s.ground_state())
}

/// `8 (1 - |<a|b>|) / delta^2` for states separated by `delta`.
///
/// The deficit is evaluated as `|a - e^{i phi} b|^2 / 2` with the phase
/// aligned, which avoids the cancellation in `1 - |<a|b>|` when the states
/// are close.
pub fn overlap_fisher(a: &DVector<C64>, b: &DVector<C64>, delta: f64) -> Result<f64> {
    // normalised so that integrator norm drift does not masquerade as
    // distinguishability
    let (a, b) = (a / C64::from(a.norm()), b / C64::from(b.norm()));
    let z = a.dotc(&b);
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::OverlapAboveOne(z.norm()));
    }
    let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { C64::from(1.0) };
    Ok(4.0 * (&a - b * phase).norm_squared() / (delta * delta))
}

fn real_overlap_fisher(a: &DVector<f64>, b: &DVector<f64>, delta: f64) -> Result<f64> {
    let (a, b) = (a / a.norm(), b / b.norm());
    let ov = a.dot(&b);
    if ov.abs() > 1.0 + 1e-12 {
        return Err(Error::OverlapAboveOne(ov.abs()));
    }
    Ok(4.0 * (&a - b * ov.signum()).norm_squared() / (delta * delta))
}

pub fn qfi_pure_overlap_split(split: &HSplit, theta: f64, delta: f64) -> Result<FisherEstimate> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    ground_state(split, theta)?;
    let a = ground_state(split, theta - delta / 2.0)?;
    let b = ground_state(split, theta + delta / 2.0)?;
    Ok(FisherEstimate { value: real_overlap_fisher(&a, &b, delta)?, method: FisherMethod::PureOverlap, delta: Some(delta) })
}

/// Ground-state QFI from the overlap of ground states at `theta ± delta/2`.
pub fn qfi_pure_overlap(spec: &ModelSpec, theta: f64, delta: f64) -> Result<FisherEstimate> {
    qfi_pure_overlap_split(&build_h_split(spec)?, theta, delta)
}

/// Overlap QFI with the default step `1e-4 max(1, |theta|)`, halved while
/// the estimate keeps moving and the overlap deficit stays above
/// `100 eps`.
pub fn qfi_pure_overlap_auto(split: &HSplit, theta: f64) -> Result<FisherEstimate> {
    let mut delta = 1e-4 * theta.abs().max(1.0);
    let mut prev = qfi_pure_overlap_split(split, theta, delta)?;
    for _ in 0..40 {
        let next = qfi_pure_overlap_split(split, theta, delta / 2.0)?;
        let deficit = next.value * (delta / 2.0).powi(2) / 8.0;
        if (next.value - prev.value).abs() <= 1e-6 * next.value || deficit < 400.0 * f64::EPSILON {
            return Ok(next);
        }
        prev = next;
        delta /= 2.0;
    }
    Ok(prev)
}

pub fn qfi_spectral_split(split: &HSplit, theta: f64) -> Result<FisherEstimate> {
    let h = split.at(theta);
    let s = eigensolve_matrix(&h.matrix, h.dim(), Solver::Dense)?;
    let gap = s.energies[1] - s.energies[0];
    if gap < DEGENERACY_THRESHOLD {
        return Err(Error::Degenerate { gap });
    }
    let g = s.ground_state();
    let h2g = DVector::from_vec(split.h2.matrix.matvec(g.as_slice()));
    let mut f = 0.0;
    for n in 1..s.energies.len() {
        let m = s.states.column(n).dot(&h2g);
        f += m * m / (s.energies[n] - s.energies[0]).powi(2);
    }
    Ok(FisherEstimate { value: 4.0 * f, method: FisherMethod::SpectralSum, delta: None })
}

/// Ground-state QFI as the perturbative sum over excited states.
pub fn qfi_spectral(spec: &ModelSpec, theta: f64) -> Result<FisherEstimate> {
    qfi_spectral_split(&build_h_split(spec)?, theta)
}

/// Largest `|A_ij - conj(A_ji)|`.
pub fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Clone, Debug)]
pub struct MixedFisher {
    pub estimate: FisherEstimate,
    /// Symmetric logarithmic derivative in the input basis.
    pub sld: DMatrix<C64>,
}

/// QFI of `rho` given `d rho / d theta`, with pairs `lambda_i + lambda_j <=
/// eig_floor` dropped.
pub fn qfi_mixed(rho: &DMatrix<C64>, drho: &DMatrix<C64>, eig_floor: f64, delta: Option<f64>) -> Result<MixedFisher> {
    for m in [rho, drho] {
        let d = hermitian_defect(m);
        if d > 1e-9 {
            return Err(Error::NotHermitian(d));
        }
    }
    if !(eig_floor > 0.0) {
        return Err(Error::InvalidArgument("eig_floor must be positive".into()));
    }
    let herm = |m: &DMatrix<C64>| (m + m.adjoint()) * C64::new(0.5, 0.0);
    let (values, v) = hermitian_eigen(&herm(rho));
    let v = &v;
    let d = v.adjoint() * herm(drho) * v;
    let n = rho.nrows();
    let mut f = 0.0;
    let mut l = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let s = values[i] + values[j];
            if s > eig_floor {
                f += 2.0 * d[(i, j)].norm_sqr() / s;
                l[(i, j)] = d[(i, j)] * (2.0 / s);
            }
        }
    }
    Ok(MixedFisher {
        estimate: FisherEstimate { value: f, method: FisherMethod::MixedSld, delta },
        sld: v * l * v.adjoint(),
    })
}

/// QFI at the state `center` from states at `theta ± delta/2`, for any
/// representation. Permutation-invariant states are handled block by block:
/// the QFI is the multiplicity-weighted sum over irreducible blocks.
pub fn qfi_from_states(minus: &QuantumState, center: &QuantumState, plus: &QuantumState, delta: f64) -> Result<FisherEstimate> {
    let d = C64::new(1.0 / delta, 0.0);
    match (minus, center, plus) {
        (QuantumState::Pure { vector: a, .. }, QuantumState::Pure { .. }, QuantumState::Pure { vector: b, .. }) => Ok(FisherEstimate {
            value: overlap_fisher(a, b, delta)?,
            method: FisherMethod::PureOverlap,
            delta: Some(delta),
        }),
        (QuantumState::Symmetric(m), QuantumState::Symmetric(c), QuantumState::Symmetric(p)) => {
            let (bm, bc, bp) = (m.blocks(), c.blocks(), p.blocks());
            let mut value = 0.0;
            for ((mult, rc), ((_, rm), (_, rp))) in bc.iter().zip(bm.iter().zip(&bp)) {
                let drho = (rp - rm) * d;
                value += mult * qfi_mixed(rc, &drho, EIG_FLOOR, None)?.estimate.value;
            }
            Ok(FisherEstimate { value, method: FisherMethod::MixedSld, delta: Some(delta) })
        }
        _ => {
            let drho = (plus.density()? - minus.density()?) * d;
            let mut f = qfi_mixed(&center.density()?, &drho, EIG_FLOOR, Some(delta))?.estimate;
            f.delta = Some(delta);
            Ok(f)
        }
    }
}

/// Classical Fisher information of measuring `basis` on `state_at(theta)`,
/// with a central difference of step `delta`.
pub fn cfi(
    state_at: impl Fn(f64) -> Result<QuantumState>,
    basis: &MeasurementBasis,
    theta: f64,
    delta: f64,
) -> Result<FisherEstimate> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let probs = |t: f64| -> Result<Vec<f64>> {
        let p = basis.probabilities(&state_at(t)?.populations());
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::ProbabilityMismatch(total));
        }
        Ok(p)
    };
    let p0 = probs(theta)?;
    let pm = probs(theta - delta / 2.0)?;
    let pp = probs(theta + delta / 2.0)?;
    Ok(FisherEstimate { value: classical_fisher(&p0, &pm, &pp, delta), method: FisherMethod::Classical, delta: Some(delta) })
}

/// `sum_n (dp_n)^2 / p_n` from probabilities at `theta` and `theta ± delta/2`.
pub fn classical_fisher(p0: &[f64], pm: &[f64], pp: &[f64], delta: f64) -> f64 {
    p0.iter()
        .zip(pm.iter().zip(pp))
        .filter(|(p, _)| **p > PROB_FLOOR)
        .map(|(p, (a, b))| ((b - a) / delta).powi(2) / p)
        .sum()
}

/// CFI of the ground state measured in `basis` (given in the split's basis).
pub fn ground_state_cfi(split: &HSplit, basis: &MeasurementBasis, theta: f64, delta: f64) -> Result<FisherEstimate> {
    let kind = split.basis();
    cfi(|t| Ok(QuantumState::pure_real(&ground_state(split, t)?, kind)), basis, theta, delta)
}

/// `1 / sqrt(M F)`; infinite when no information is available.
pub fn cramer_rao(f: &FisherEstimate, shots: u64) -> f64 {
    if f.value <= 0.0 || shots == 0 {
        f64::INFINITY
    } else {
        1.0 / (shots as f64 * f.value).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::models::{optimal_measurement, HamiltonianRep};
    use approx::assert_relative_eq;

    fn grover_qfi(n: f64, t: f64) -> f64 {
        4.0 * (n - 1.0) / (n * (1.0 - t).powi(2) + 4.0 * t).powi(2)
    }

    #[test]
    fn grover_overlap_form() {
        let f = qfi_pure_overlap(&ModelSpec::grover(4), 1.0, 1e-4).unwrap();
        assert!((f.value - 3.75).abs() < 1e-3);
        let f = qfi_pure_overlap(&ModelSpec::grover(4), 0.0, 1e-4).unwrap();
        assert!((f.value - 0.234375).abs() < 1e-4);
    }

    #[test]
    fn grover_spectral_form() {
        let f = qfi_spectral(&ModelSpec::grover(6), 1.0).unwrap();
        assert!((f.value - 15.75).abs() < 1e-9);
        for t in [0.0, 0.4, 1.3, 2.0] {
            let f = qfi_spectral(&ModelSpec::grover(12), t).unwrap();
            assert_relative_eq!(f.value, grover_qfi(4096.0, t), max_relative = 1e-9);
        }
    }

    fn frozen_split() -> HSplit {
        let h1 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.5]);
        HSplit {
            h1: HamiltonianRep::new(BasisKind::EffectiveTwoLevel, SymMatrix::Dense(h1.clone())).unwrap(),
            h2: HamiltonianRep::new(BasisKind::EffectiveTwoLevel, SymMatrix::Dense(h1 * 0.0)).unwrap(),
        }
    }

    #[test]
    fn parameter_independent_hamiltonian_has_no_information() {
        let s = frozen_split();
        assert!(qfi_pure_overlap_split(&s, 0.3, 1e-4).unwrap().value < 1e-8);
        assert_eq!(qfi_spectral_split(&s, 0.3).unwrap().value, 0.0);
    }

    #[test]
    fn commuting_terms_have_no_information() {
        let h1 = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let h2 = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.2]);
        let s = HSplit {
            h1: HamiltonianRep::new(BasisKind::EffectiveTwoLevel, SymMatrix::Dense(h1)).unwrap(),
            h2: HamiltonianRep::new(BasisKind::EffectiveTwoLevel, SymMatrix::Dense(h2)).unwrap(),
        };
        assert!(qfi_spectral_split(&s, 0.7).unwrap().value < 1e-30);
    }

    #[test]
    fn spectral_and_overlap_agree_off_critical() {
        for (spec, t) in [
            (ModelSpec::pspin(10, 3, 1, 1.0), 0.8),
            (ModelSpec::pspin(10, 5, 2, 0.1), 2.3),
            (ModelSpec::biclique(3, 2, 1.0, 0.49, 0.5), 0.4),
        ] {
            let a = qfi_spectral(&spec, t).unwrap().value;
            let b = qfi_pure_overlap(&spec, t, 1e-4).unwrap().value;
            assert_relative_eq!(a, b, max_relative = 1e-3);
        }
    }

    #[test]
    fn mixed_reduces_to_pure() {
        let split = build_h_split(&ModelSpec::pspin(8, 3, 1, 1.0)).unwrap();
        let (t, d) = (1.1, 1e-4);
        let c = |v: DVector<f64>| v.map(|x| C64::new(x, 0.0));
        let g0 = c(ground_state(&split, t).unwrap());
        let mut gm = c(ground_state(&split, t - d / 2.0).unwrap());
        let mut gp = c(ground_state(&split, t + d / 2.0).unwrap());
        // align phases so the finite difference is smooth
        for g in [&mut gm, &mut gp] {
            if g0.dotc(g).re < 0.0 {
                g.neg_mut();
            }
        }
        let rho = &g0 * g0.adjoint();
        let drho = (&gp * gp.adjoint() - &gm * gm.adjoint()) / C64::new(d, 0.0);
        let mixed = qfi_mixed(&rho, &drho, EIG_FLOOR, Some(d)).unwrap().estimate.value;
        let pure = qfi_spectral_split(&split, t).unwrap().value;
        assert_relative_eq!(mixed, pure, max_relative = 1e-3);
    }

    #[test]
    fn maximally_mixed_qubit() {
        let eps = 0.3;
        let rho = DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
        let drho = DMatrix::from_row_slice(2, 2, &[C64::new(eps / 2.0, 0.0), C64::default(), C64::default(), C64::new(-eps / 2.0, 0.0)]);
        let m = qfi_mixed(&rho, &drho, EIG_FLOOR, None).unwrap();
        // two diagonal pairs, each 2 (eps/2)^2 / 1
        assert!((m.estimate.value - eps * eps).abs() < 1e-14);
        let zero = DMatrix::zeros(2, 2);
        assert_eq!(qfi_mixed(&rho, &zero, EIG_FLOOR, None).unwrap().estimate.value, 0.0);
    }

    #[test]
    fn sld_satisfies_defining_equation() {
        let rho = DMatrix::from_row_slice(2, 2, &[C64::new(0.7, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.3, 0.0)]);
        let drho = DMatrix::from_row_slice(2, 2, &[C64::new(0.2, 0.0), C64::new(-0.3, 0.1), C64::new(-0.3, -0.1), C64::new(-0.2, 0.0)]);
        let m = qfi_mixed(&rho, &drho, EIG_FLOOR, None).unwrap();
        let back = (&rho * &m.sld + &m.sld * &rho) * C64::new(0.5, 0.0);
        assert!((back - &drho).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        let f = (&rho * &m.sld * &m.sld).trace().re;
        assert_relative_eq!(f, m.estimate.value, max_relative = 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let rho = DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
        let mut drho = DMatrix::zeros(2, 2);
        drho[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(qfi_mixed(&rho, &drho, EIG_FLOOR, None), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn trivial_measurement_has_no_information() {
        let spec = ModelSpec::grover(6);
        let split = build_h_split(&spec).unwrap();
        let f = ground_state_cfi(&split, &MeasurementBasis::trivial(spec.reduced_basis()), 1.0, 1e-4).unwrap();
        assert_eq!(f.value, 0.0);
    }

    #[test]
    fn optimal_bases_saturate_qfi_in_ground_state() {
        let spec = ModelSpec::grover(20);
        let split = build_h_split(&spec).unwrap();
        let m = optimal_measurement(&spec).unwrap();
        for t in [0.999, 1.0, 1.001] {
            let c = ground_state_cfi(&split, &m, t, 1e-6).unwrap().value;
            let q = qfi_spectral_split(&split, t).unwrap().value;
            assert!(c <= q * 1.02 && c >= 0.95 * q, "{t}: {c} vs {q}");
        }
        let spec = ModelSpec::pspin(10, 3, 1, 1.0);
        let split = build_h_split(&spec).unwrap();
        let tc = crate::spectra::locate_critical_split(&split, (1.0, 1.6), 1e-10).unwrap().theta_c;
        let c = ground_state_cfi(&split, &optimal_measurement(&spec).unwrap(), tc, 1e-6).unwrap().value;
        let q = qfi_spectral_split(&split, tc).unwrap().value;
        assert!((c - q).abs() <= 0.05 * q, "{c} vs {q}");
    }

    #[test]
    fn cramer_rao_values() {
        let f = |v| FisherEstimate { value: v, method: FisherMethod::SpectralSum, delta: None };
        assert_eq!(cramer_rao(&f(4.0), 1), 0.5);
        assert!((cramer_rao(&f(255.75), 100) - 0.006253).abs() < 1e-5);
        assert!(cramer_rao(&f(0.0), 10).is_infinite());
    }
}
