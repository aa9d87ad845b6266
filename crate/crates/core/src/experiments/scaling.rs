//! Finite-size scaling of the critical gap, critical QFI and preparation time.

use super::fit::{check_beta_two_alpha, default_window, fit_window, BetaAlphaReport, FitKind, ScalingResult};
use crate::dynamics::{local_adiabatic_schedule, s_for_theta, Form, Numerator};
use crate::error::{Error, Result};
use crate::metrology::qfi_spectral_split;
use crate::models::{build_h_split, HSplit, ModelSpec, Preset, Transition};
use crate::spectra::{locate_critical_split, split_gap, CriticalPoint};
use rayon::prelude::*;
use serde::Serialize;

/// Width of the golden-section bracket at which the critical search stops.
pub const CRITICAL_TOL: f64 = 1e-10;

/// Critical point of one member of `family`. Grover uses `theta_c = 1`,
/// where the closed forms for gap and QFI are quoted.
pub fn critical_point(family: &Preset, split: &HSplit) -> Result<CriticalPoint> {
    if matches!(family.spec, ModelSpec::Grover { .. }) {
        return Ok(CriticalPoint { theta_c: 1.0, gap_at_c: split_gap(split, 1.0)?, bracket: family.bracket });
    }
    locate_critical_split(split, family.bracket, CRITICAL_TOL)
}

pub fn gap_fit_kind(family: &Preset) -> FitKind {
    match (&family.spec, family.transition) {
        (_, Transition::SecondOrder) => FitKind::Algebraic,
        (ModelSpec::PSpin { .. }, Transition::FirstOrder) => FitKind::ExpLinearPrefactor,
        _ => FitKind::Exponential,
    }
}

pub fn qfi_fit_kind(family: &Preset) -> FitKind {
    match family.transition {
        Transition::SecondOrder => FitKind::Algebraic,
        Transition::FirstOrder => FitKind::Exponential,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub theta_c: f64,
    pub gap: f64,
    pub qfi: f64,
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("size list is empty".into()));
    }
    Ok(())
}

/// Critical point, gap and ground-state QFI at every size, in size order.
pub fn critical_table(family: &Preset, sizes: &[usize]) -> Result<Vec<CriticalRow>> {
    check_sizes(sizes)?;
    let mut rows = sizes
        .par_iter()
        .map(|&l| {
            let split = build_h_split(&family.at_size(l)?)?;
            let cp = critical_point(family, &split)?;
            let qfi = qfi_spectral_split(&split, cp.theta_c)?.value;
            Ok(CriticalRow { l, theta_c: cp.theta_c, gap: cp.gap_at_c, qfi })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.l);
    Ok(rows)
}

fn fit_column(rows: &[CriticalRow], kind: FitKind, value: impl Fn(&CriticalRow) -> f64) -> Result<ScalingResult> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.l as f64, value(r))).collect();
    fit_window(&pts, default_window(pts.len()), kind)
}

pub fn run_gap_scaling(family: &Preset, sizes: &[usize]) -> Result<ScalingResult> {
    fit_column(&critical_table(family, sizes)?, gap_fit_kind(family), |r| r.gap)
}

pub fn run_qfi_scaling(family: &Preset, sizes: &[usize]) -> Result<ScalingResult> {
    fit_column(&critical_table(family, sizes)?, qfi_fit_kind(family), |r| r.qfi)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingStudy {
    pub rows: Vec<CriticalRow>,
    pub gap: ScalingResult,
    pub qfi: ScalingResult,
    pub beta_two_alpha: BetaAlphaReport,
}

/// Gap and QFI fits from one pass over the sizes.
pub fn run_scaling(family: &Preset, sizes: &[usize], tol_rel: f64) -> Result<ScalingStudy> {
    let rows = critical_table(family, sizes)?;
    let gap = fit_column(&rows, gap_fit_kind(family), |r| r.gap)?;
    let qfi = fit_column(&rows, qfi_fit_kind(family), |r| r.qfi)?;
    let beta_two_alpha = check_beta_two_alpha(&gap, &qfi, tol_rel);
    Ok(ScalingStudy { rows, gap, qfi, beta_two_alpha })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub theta: f64,
    pub gap: f64,
    pub qfi: f64,
}

/// Gap and ground-state QFI over a grid of `theta` at each size.
pub fn theta_scan(family: &Preset, sizes: &[usize], thetas: &[f64]) -> Result<Vec<ScanRow>> {
    check_sizes(sizes)?;
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("theta grid is empty".into()));
    }
    let splits = sizes.iter().map(|&l| Ok((l, build_h_split(&family.at_size(l)?)?))).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, f64)> = (0..splits.len()).flat_map(|i| thetas.iter().map(move |&t| (i, t))).collect();
    jobs.par_iter()
        .map(|&(i, theta)| {
            let (l, split) = &splits[i];
            Ok(ScanRow { l: *l, theta, gap: split_gap(split, theta)?, qfi: qfi_spectral_split(split, theta)?.value })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepTimeRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub theta_c: f64,
    pub gap: f64,
    pub t_total: f64,
}

/// Time of the bound-numerator local adiabatic schedule (`c = L`) from the
/// `H2` ground state to the critical point, without turn-on.
pub fn preparation_time(family: &Preset, l: usize, epsilon: f64) -> Result<PrepTimeRow> {
    let split = build_h_split(&family.at_size(l)?)?;
    let cp = critical_point(family, &split)?;
    let sch = local_adiabatic_schedule(&split, &Form::Reparameterized, epsilon, s_for_theta(cp.theta_c), Numerator::AppendixBound, l)?;
    Ok(PrepTimeRow { l, theta_c: cp.theta_c, gap: cp.gap_at_c, t_total: sch.t_total })
}

pub fn preparation_table(family: &Preset, sizes: &[usize], epsilon: f64) -> Result<Vec<PrepTimeRow>> {
    check_sizes(sizes)?;
    let mut rows = sizes.par_iter().map(|&l| preparation_time(family, l, epsilon)).collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.l);
    Ok(rows)
}

/// Exponential fit of the preparation time over `sizes`.
pub fn run_preparation_time_scaling(family: &Preset, sizes: &[usize], epsilon: f64) -> Result<ScalingResult> {
    if !matches!(family.spec, ModelSpec::PSpin { .. }) || family.transition != Transition::FirstOrder {
        return Err(Error::InvalidArgument("preparation-time scaling is defined for first-order p-spin families".into()));
    }
    let rows = preparation_table(family, sizes, epsilon)?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.l as f64, r.t_total)).collect();
    fit_window(&pts, default_window(pts.len()), FitKind::Exponential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::preset;

    #[test]
    fn grover_closed_forms_at_the_critical_point() {
        let g = preset("grover").unwrap();
        let rows = critical_table(&g, &[4, 6, 8, 10]).unwrap();
        for r in &rows {
            let n = (r.l as f64).exp2();
            assert_eq!(r.theta_c, 1.0);
            assert!((r.gap / (2.0 / n.sqrt()) - 1.0).abs() < 1e-9);
            assert!((r.qfi / ((n - 1.0) / 4.0) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn grover_gap_exponent_is_half_ln_two() {
        let g = preset("grover").unwrap();
        let study = run_scaling(&g, &(6..=20).step_by(2).collect::<Vec<_>>(), 0.01).unwrap();
        assert!((study.gap.decay_rate() - 2f64.ln() / 2.0).abs() < 1e-9, "{}", study.gap.exponent);
        assert!((study.qfi.exponent - 2f64.ln()).abs() < 1e-3);
        assert!(study.beta_two_alpha.within_tolerance);
        assert_eq!(study.gap.fit_from, 2);
    }

    #[test]
    fn scan_rows_cover_the_grid() {
        let g = preset("grover").unwrap();
        let rows = theta_scan(&g, &[6, 8], &[0.9, 1.0, 1.1]).unwrap();
        assert_eq!(rows.len(), 6);
        let at_c = rows.iter().find(|r| r.l == 8 && r.theta == 1.0).unwrap();
        assert!((at_c.qfi - 255.0 / 4.0).abs() < 1e-9);
        assert!(theta_scan(&g, &[], &[1.0]).is_err());
    }

    #[test]
    fn preparation_time_is_inverse_in_epsilon() {
        let p = preset("pspin-first").unwrap();
        let a = preparation_time(&p, 10, 0.1).unwrap();
        let b = preparation_time(&p, 10, 0.05).unwrap();
        assert!((b.t_total / a.t_total - 2.0).abs() < 1e-9);
        assert!(run_preparation_time_scaling(&preset("grover").unwrap(), &[4, 6, 8, 10], 0.1).is_err());
    }
}
