//! Probe preparation when the parameter is unknown: a control field
//! `s/(1-s)` on `H1` is ramped to `s = 1/2`, where the Hamiltonian is
//! `H1 + theta H2` again (optionally with `theta_c` added to the `H2` term).

use super::evolve::{evolve_pure_split, EvolveOptions};
use super::schedule::{default_ramp, gap_and_element, local_adiabatic_schedule, Form, Numerator, Schedule};
use crate::error::{Error, Result};
use crate::metrology::{ground_state, QuantumState};
use crate::models::{build_h_split, list_presets, HSplit, ModelSpec};
use crate::spectra::locate_critical_split;
use nalgebra::DVector;
use num_complex::Complex64 as C64;

pub const PROBE_S_END: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct Probe {
    pub state: QuantumState,
    /// Parameter whose ground state the probe approximates:
    /// `theta_true + offset`.
    pub theta_effective: f64,
    pub offset: f64,
    /// Overlap with the exact ground state at `theta_effective`.
    pub fidelity: f64,
    /// Lowest instantaneous fidelity along the ramp.
    pub min_fidelity: f64,
    pub t_total: f64,
}

/// Critical point used to design the ramp: `1` for Grover, otherwise the gap
/// minimum inside the bracket of the preset family the model belongs to.
pub fn design_critical_point(spec: &ModelSpec, split: &HSplit) -> Result<f64> {
    if let ModelSpec::Grover { .. } = spec {
        return Ok(1.0);
    }
    let bracket = list_presets()
        .into_iter()
        .find(|p| p.at_size(spec.size()).map(|s| &s == spec).unwrap_or(false))
        .map(|p| p.bracket)
        .ok_or_else(|| Error::InvalidArgument("no preset family matches this model; pass theta_c explicitly".into()))?;
    Ok(locate_critical_split(split, bracket, 1e-9)?.theta_c)
}

/// Local adiabatic ramp `s: 0 -> 1/2` for the worst case, an `H2`
/// coefficient equal to `theta_c`, where the gap minimum sits at the end.
///
/// The numerator is the peak matrix element, held constant, and the ramp
/// starts and stops smoothly (ten periods of the initial gap, one period of
/// the final gap).
pub fn probe_schedule(split: &HSplit, theta_c: f64, epsilon: f64) -> Result<Schedule> {
    let form = Form::Controlled { theta: theta_c, offset: 0.0 };
    let ramp = default_ramp(split, &form)?;
    let (end_gap, _) = gap_and_element(split, &form, PROBE_S_END)?;
    let size = split.h1.dim();
    Ok(local_adiabatic_schedule(split, &form, epsilon, PROBE_S_END, Numerator::PeakMatrixElement, size)?
        .with_ramp(ramp)
        .with_landing(2.0 * std::f64::consts::PI / end_gap))
}

pub fn prepare_probe(spec: &ModelSpec, theta_true: f64, epsilon: f64, use_offset: bool) -> Result<Probe> {
    let split = build_h_split(spec)?;
    let theta_c = design_critical_point(spec, &split)?;
    let schedule = probe_schedule(&split, theta_c, epsilon)?;
    prepare_probe_with(&split, &schedule, theta_c, theta_true, use_offset, &EvolveOptions::default())
}

/// Runs the ramp for one value of the parameter along a given schedule.
pub fn prepare_probe_with(
    split: &HSplit,
    schedule: &Schedule,
    theta_c: f64,
    theta_true: f64,
    use_offset: bool,
    opts: &EvolveOptions,
) -> Result<Probe> {
    if !(theta_true >= 0.0) {
        return Err(Error::InvalidArgument(format!("theta must be >= 0, got {theta_true}")));
    }
    if !use_offset && theta_true < theta_c {
        return Err(Error::InvalidArgument(format!(
            "theta = {theta_true} is below theta_c = {theta_c}: the ramp would cross the transition; use the offset"
        )));
    }
    if (schedule.s_end - PROBE_S_END).abs() > 1e-15 {
        return Err(Error::InvalidArgument("probe schedules end at s = 1/2".into()));
    }
    let offset = if use_offset { theta_c } else { 0.0 };
    let form = Form::Controlled { theta: theta_true, offset };
    let r = evolve_pure_split(split, schedule, &form, &EvolveOptions { end_s: None, ..opts.clone() })?;
    let theta_effective = theta_true + offset;
    let g = ground_state(split, theta_effective)?;
    let QuantumState::Pure { vector, .. } = &r.final_state else { unreachable!("closed evolution yields a pure state") };
    let ov: C64 = g.iter().zip(vector.iter()).map(|(a, b)| b * *a).sum();
    let min_fidelity = r.min_fidelity();
    Ok(Probe {
        state: r.final_state,
        theta_effective,
        offset,
        fidelity: ov.norm_sqr().min(1.0),
        min_fidelity,
        t_total: r.t_total,
    })
}

/// The probe vector, for finite differences between neighbouring runs.
pub fn probe_vector(p: &Probe) -> &DVector<C64> {
    match &p.state {
        QuantumState::Pure { vector, .. } => vector,
        _ => unreachable!("probes are pure"),
    }
}
