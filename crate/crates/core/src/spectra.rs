//! Lowest eigenpairs, energy gaps and critical-point location.

use crate::error::{Error, Result};
use crate::linalg::{dense_lowest, lanczos_lowest, LanczosOptions, SymMatrix};
use crate::models::{build_h_split, HSplit, HamiltonianRep, ModelSpec};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Matrices up to this dimension are diagonalized densely.
pub const DENSE_SOLVER_LIMIT: usize = 1024;
/// Gaps below this are reported as an exact degeneracy.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;
const COARSE_POINTS: usize = 51;

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub energies: Vec<f64>,
    /// Column `n` is the eigenvector of `energies[n]`.
    pub states: DMatrix<f64>,
}

impl Spectrum {
    pub fn ground_state(&self) -> DVector<f64> {
        self.states.column(0).into_owned()
    }

    pub fn gap(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Auto,
    Dense,
    Lanczos,
}

pub fn eigensolve_lowest(h: &HamiltonianRep, n_eig: usize) -> Result<Spectrum> {
    eigensolve_matrix(&h.matrix, n_eig, Solver::Auto)
}

pub fn eigensolve_matrix(m: &SymMatrix, n_eig: usize, solver: Solver) -> Result<Spectrum> {
    let dim = m.dim();
    if n_eig == 0 || n_eig > dim {
        return Err(Error::InvalidArgument(format!("n_eig must be in 1..={dim}, got {n_eig}")));
    }
    let dense = match solver {
        Solver::Auto => dim <= DENSE_SOLVER_LIMIT,
        Solver::Dense => true,
        Solver::Lanczos => false,
    };
    let (energies, states) = if dense {
        dense_lowest(&m.to_dense(), n_eig)
    } else {
        lanczos_lowest(m, n_eig, &LanczosOptions::default())?
    };
    Ok(Spectrum { energies, states })
}

/// Gap of a Hamiltonian together with a degeneracy flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapValue {
    pub gap: f64,
    pub degenerate: bool,
}

pub fn gap_of(h: &SymMatrix) -> Result<GapValue> {
    let s = eigensolve_matrix(h, 2, Solver::Auto)?;
    let g = (s.energies[1] - s.energies[0]).max(0.0);
    Ok(if g < DEGENERACY_THRESHOLD { GapValue { gap: 0.0, degenerate: true } } else { GapValue { gap: g, degenerate: false } })
}

pub fn split_gap(split: &HSplit, theta: f64) -> Result<f64> {
    Ok(gap_of(&split.at(theta).matrix)?.gap)
}

/// `E1 - E0` in the reduced basis; 0 for a degenerate ground state.
pub fn energy_gap(spec: &ModelSpec, theta: f64) -> Result<f64> {
    split_gap(&build_h_split(spec)?, theta)
}

/// Gaps on an ascending grid, evaluated in parallel.
pub fn gap_profile(spec: &ModelSpec, thetas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("empty theta grid".into()));
    }
    if thetas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("theta grid must be strictly ascending".into()));
    }
    let split = build_h_split(spec)?;
    thetas.par_iter().map(|&t| split_gap(&split, t).map(|g| (t, g))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub theta_c: f64,
    pub gap_at_c: f64,
    pub bracket: (f64, f64),
}

/// Golden-section minimization of `f` after a 51-point coarse scan of
/// `bracket`. Returns the minimum and the sequence of shrinking brackets.
pub fn minimize_in_bracket(
    f: impl Fn(f64) -> Result<f64>,
    bracket: (f64, f64),
    tol: f64,
) -> Result<(CriticalPoint, Vec<(f64, f64)>)> {
    let (lo, hi) = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bad bracket ({lo}, {hi}) or tolerance {tol}")));
    }
    let step = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..COARSE_POINTS).map(|i| lo + step * i as f64).collect();
    let vals = grid.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let i = (0..COARSE_POINTS).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    if i == 0 || i == COARSE_POINTS - 1 || !(vals[i] < vals[0] && vals[i] < vals[COARSE_POINTS - 1]) {
        return Err(Error::MonotoneGap { lo, hi });
    }

    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[i - 1], grid[i + 1]);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut history = vec![(a, b)];
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
        history.push((a, b));
        if history.len() > 400 {
            break;
        }
    }
    let (theta_c, gap_at_c) = [(c, fc), (d, fd), (grid[i], vals[i])]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    Ok((CriticalPoint { theta_c, gap_at_c, bracket }, history))
}

/// Locates the gap minimum of `spec` inside `bracket` to width `tol`.
pub fn locate_critical(spec: &ModelSpec, bracket: (f64, f64), tol: f64) -> Result<CriticalPoint> {
    let split = build_h_split(spec)?;
    locate_critical_split(&split, bracket, tol)
}

pub fn locate_critical_split(split: &HSplit, bracket: (f64, f64), tol: f64) -> Result<CriticalPoint> {
    Ok(minimize_in_bracket(|t| split_gap(split, t), bracket, tol)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CsrMatrix;

    fn grover_gap(n: f64, t: f64) -> f64 {
        (n * n * (1.0 - t).powi(2) + 4.0 * n * t).sqrt() / n
    }

    #[test]
    fn grover_gaps_match_closed_form() {
        assert!((energy_gap(&ModelSpec::grover(2), 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((energy_gap(&ModelSpec::grover(4), 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((energy_gap(&ModelSpec::grover(4), 0.0).unwrap() - 1.0).abs() < 1e-12);
        let g = energy_gap(&ModelSpec::grover(6), 0.5).unwrap();
        assert!((g - grover_gap(64.0, 0.5)).abs() < 1e-10);
    }

    #[test]
    fn diagonal_spectrum_is_sorted_diagonal() {
        let d = [3.0, -1.0, 2.0, 0.5];
        let s = eigensolve_matrix(&SymMatrix::from_csr(CsrMatrix::diagonal_from(&d)), 4, Solver::Auto).unwrap();
        assert_eq!(s.energies, vec![-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn dense_and_lanczos_agree_on_pspin() {
        let h = crate::models::build_full_space(&ModelSpec::pspin(8, 3, 1, 1.0), 1.3).unwrap();
        let a = eigensolve_matrix(&h.matrix, 2, Solver::Dense).unwrap();
        let b = eigensolve_matrix(&h.matrix, 2, Solver::Lanczos).unwrap();
        for k in 0..2 {
            assert!((a.energies[k] - b.energies[k]).abs() < 1e-9);
        }
        let r = h.matrix.matvec(b.states.column(0).as_slice());
        let res: f64 = r.iter().zip(b.states.column(0).iter()).map(|(x, y)| (x - b.energies[0] * y).powi(2)).sum();
        assert!(res.sqrt() <= 1e-9 * h.matrix.max_row_sum());
    }

    #[test]
    fn profile_minimum_for_grover() {
        let p = gap_profile(&ModelSpec::grover(10), &[0.5, 1.0, 1.5]).unwrap();
        let min = p.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert_eq!(min.0, 1.0);
        assert_eq!(gap_profile(&ModelSpec::grover(3), &[0.2]).unwrap().len(), 1);
    }

    #[test]
    fn grover_critical_point() {
        // the exact two-level gap is minimal at 1 - 2/N, which tends to 1
        let c = locate_critical(&ModelSpec::grover(8), (0.5, 1.5), 1e-8).unwrap();
        assert!((c.theta_c - (1.0 - 2.0 / 256.0)).abs() < 1e-6);
        assert!((c.gap_at_c - 2.0 * 255f64.sqrt() / 256.0).abs() < 1e-12);
        let c = locate_critical(&ModelSpec::grover(30), (0.5, 1.5), 1e-8).unwrap();
        assert!((c.theta_c - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pspin_first_order_minimum_near_1_3() {
        let c = locate_critical(&ModelSpec::pspin(12, 3, 1, 1.0), (1.0, 1.6), 1e-8).unwrap();
        assert!((c.theta_c - 1.3).abs() < 0.07, "{}", c.theta_c);
    }

    #[test]
    fn symmetric_profile_minimum_is_symmetry_point() {
        let (c, hist) = minimize_in_bracket(|t| Ok((t - 0.37).powi(2)), (0.0, 1.0), 1e-9).unwrap();
        assert!((c.theta_c - 0.37).abs() < 1e-8);
        assert!(hist.iter().all(|&(a, b)| a <= c.theta_c && c.theta_c <= b));
    }

    #[test]
    fn monotone_gap_is_reported() {
        let r = minimize_in_bracket(|t| Ok(t), (0.0, 1.0), 1e-6);
        assert!(matches!(r, Err(Error::MonotoneGap { .. })));
    }
}
